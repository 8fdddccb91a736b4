#include <doctest.h>

#include <random>

#include "cvp/surface.hpp"

using namespace cvp;

namespace {

Instance critical_torus(int nt, int nx, double range) {
  LatticeSpec spec;
  spec.dim = 2;
  spec.extent = {nt, nx};
  spec.spacing = 1.0;
  spec.kernel = {KernelSpec::Kind::IsoBump, range, 1.0, 1.0};
  spec.periodic_axes = {true, true};
  return solve_critical_weights(generate_lattice(spec));
}

Instance slab(int nt, int nx, double range) {
  LatticeSpec spec;
  spec.dim = 2;
  spec.extent = {nt, nx};
  spec.spacing = 1.0;
  spec.kernel = {KernelSpec::Kind::IsoBump, range, 1.0, 1.0};
  spec.periodic_axes = {false, true};
  return generate_lattice(spec);
}

Vec random_jet(const Instance& inst, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Vec v(inst.coeff_count());
  for (Index c = 0; c < v.size(); ++c) v[c] = g(rng);
  return v;
}

// Jet derivative of L in one argument with jet coefficients held fixed.
double nabla1(const Instance& inst, const KernelBlocks& kb, const Vec& jet, Index x) {
  return jet_scalar(inst, jet, x) * kb.value + kb.d1.dot(jet_vector(inst, jet, x));
}

// Brute-force quadruple-derivative surface layer forms over ordered pairs.
std::pair<double, double> brute_forms(const Instance& inst, const Vec& wxy_flat, const Vec& u,
                                      const Vec& v) {
  const Index n = inst.size();
  double sigma = 0.0, prod = 0.0;
  for (Index x = 0; x < n; ++x) {
    for (Index y = 0; y < n; ++y) {
      const double w = wxy_flat[x * n + y];
      if (w == 0.0) continue;
      KernelBlocks kb = eval_kernel(inst, x, y, 2);
      const double ax = jet_scalar(inst, u, x), bx = jet_scalar(inst, v, x);
      const double ay = jet_scalar(inst, u, y), by = jet_scalar(inst, v, y);
      Vec ux = jet_vector(inst, u, x), vx = jet_vector(inst, v, x);
      Vec uy = jet_vector(inst, u, y), vy = jet_vector(inst, v, y);
      const double n1u_n2v = ax * by * kb.value + ax * kb.d2.dot(vy) + by * kb.d1.dot(ux) +
                             ux.dot(kb.d12 * vy);
      const double n2u_n1v = ay * bx * kb.value + ay * kb.d1.dot(vx) + bx * kb.d2.dot(uy) +
                             uy.dot(kb.d12.transpose() * vx);
      const double n1u_n1v = ax * bx * kb.value + ax * kb.d1.dot(vx) + bx * kb.d1.dot(ux) +
                             ux.dot(kb.d11 * vx);
      const double n2u_n2v = ay * by * kb.value + ay * kb.d2.dot(vy) + by * kb.d2.dot(uy) +
                             uy.dot(kb.d22 * vy);
      sigma += w * (n1u_n2v - n2u_n1v);
      prod += w * (n1u_n1v - n2u_n2v);
    }
  }
  return {sigma, prod};
}

}  // namespace

TEST_CASE("sharp forms: trivial sets and antisymmetry") {
  Instance inst = critical_torus(4, 4, 1.6);
  const Index n = inst.size();
  PointSet empty(n, false), all(n, true);
  CHECK(sharp_forms(inst, empty).sigma.cwiseAbs().maxCoeff() == 0.0);
  CHECK(sharp_forms(inst, empty).product.cwiseAbs().maxCoeff() == 0.0);
  CHECK(sharp_forms(inst, all).sigma.cwiseAbs().maxCoeff() == 0.0);
  CHECK(sharp_forms(inst, all).product.cwiseAbs().maxCoeff() == 0.0);

  PointSet omega(n, false);
  for (Index i = 0; i < n / 2; ++i) omega[i] = true;
  FormPair fp = sharp_forms(inst, omega);
  Vec u = random_jet(inst, 61);
  CHECK(std::abs(u.dot(fp.sigma * u)) <= 1e-14 * fp.sigma.cwiseAbs().maxCoeff());
  CHECK((fp.sigma + fp.sigma.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((fp.product - fp.product.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("sharp forms agree with the brute-force quadruple loop") {
  Instance inst = critical_torus(4, 4, 1.2);
  const Index n = inst.size();
  std::mt19937_64 rng(62);
  PointSet omega(n, false);
  for (Index i = 0; i < n; ++i) omega[i] = rng() % 2 == 0;
  FormPair fp = sharp_forms(inst, omega);
  Vec wxy = Vec::Zero(n * n);
  for (Index x = 0; x < n; ++x)
    for (Index y = 0; y < n; ++y)
      if (omega[x] && !omega[y]) wxy[x * n + y] = inst.weights[x] * inst.weights[y];
  Vec u = random_jet(inst, 63), v = random_jet(inst, 64);
  auto [sig, prod] = brute_forms(inst, wxy, u, v);
  CHECK(u.dot(fp.sigma * v) == doctest::Approx(sig).epsilon(1e-12));
  CHECK(u.dot(fp.product * v) == doctest::Approx(prod).epsilon(1e-12));
}

TEST_CASE("soft forms: structure, reduction, brute force") {
  Instance inst = slab(8, 4, 1.6);
  inst = solve_critical_weights(inst);
  Foliation fol = make_foliation(inst, 2.0, 6.0, 0.8, 9);

  // symmetry pair at several t
  for (double t : {2.0, 2.75, 3.5, 4.25, 5.0}) {
    FormPair fp = soft_forms(inst, fol, t);
    CHECK((fp.sigma + fp.sigma.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((fp.product - fp.product.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
  }

  // far below the working range: eta = 0, forms vanish
  FormPair below = soft_forms(inst, fol, -3.0);
  CHECK(below.sigma.cwiseAbs().maxCoeff() == 0.0);
  CHECK(below.product.cwiseAbs().maxCoeff() == 0.0);

  // hard cutoff between slices reduces softened to sharp exactly
  Foliation hard = make_foliation(inst, 3.5, 3.5, 1e-3, 1);
  FormPair soft = soft_forms(inst, hard, 3.5);
  PointSet omega(inst.size(), false);
  for (Index i = 0; i < inst.size(); ++i) omega[i] = inst.time(i) < 3.5;
  FormPair sharp = sharp_forms(inst, omega);
  CHECK((soft.sigma - sharp.sigma).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((soft.product - sharp.product).cwiseAbs().maxCoeff() <= 1e-12);

  // generic t against the brute-force loop
  const Index n = inst.size();
  const double t = 3.9;
  Vec e = fol.eta_all(inst, t);
  Vec wxy = Vec::Zero(n * n);
  for (Index x = 0; x < n; ++x)
    for (Index y = 0; y < n; ++y)
      wxy[x * n + y] = inst.weights[x] * inst.weights[y] * e[x] * (1.0 - e[y]);
  Vec u = random_jet(inst, 65), v = random_jet(inst, 66);
  FormPair fp = soft_forms(inst, fol, t);
  auto [sig, prod] = brute_forms(inst, wxy, u, v);
  CHECK(u.dot(fp.sigma * v) == doctest::Approx(sig).epsilon(1e-12));
  CHECK(u.dot(fp.product * v) == doctest::Approx(prod).epsilon(1e-12));
}

TEST_CASE("soft forms are Lipschitz in t") {
  Instance inst = solve_critical_weights(slab(8, 4, 1.6));
  Foliation fol = make_foliation(inst, 2.0, 6.0, 0.8, 9);
  const double h = 1e-3;
  // reported constant: the largest difference quotient over the range
  double K = 0.0;
  for (double t = 2.0; t <= 6.0; t += 0.05)
    K = std::max(K, (soft_forms(inst, fol, t + h).product - soft_forms(inst, fol, t).product)
                        .cwiseAbs()
                        .maxCoeff() / h);
  CHECK(std::isfinite(K));
  CHECK(K > 0.0);
  // fresh samples respect the reported constant
  for (double t : {2.43, 3.91, 5.17}) {
    const double q =
        (soft_forms(inst, fol, t + 0.5 * h).product - soft_forms(inst, fol, t).product)
            .cwiseAbs()
            .maxCoeff() / (0.5 * h);
    CHECK(q <= 1.2 * K);
  }
}

TEST_CASE("energy identity") {
  Instance inst = critical_torus(10, 6, 1.6);
  Foliation fol = make_foliation(inst, 3.0, 6.0, 0.8, 7);
  LinOp op = assemble_delta(inst);
  Delta2Form d2 = assemble_delta2(inst);

  Vec zero = Vec::Zero(inst.coeff_count());
  EnergyCheck z = energy_identity_check(inst, fol, zero, 4.3, 0.05, op, d2);
  CHECK(z.lhs == 0.0);
  CHECK(z.rhs == 0.0);

  // translation jet: the <v, Delta v> term drops out
  Vec trans = Vec::Zero(inst.coeff_count());
  for (Index i = 0; i < inst.size(); ++i) trans[jet_vector_index(inst, i, 1)] = 1.0;
  EnergyCheck tr = energy_identity_check(inst, fol, trans, 4.3, 0.02, op, d2);
  Vec th = fol.theta_all(inst, 4.3);
  double expect = 0.0;
  for (Index i = 0; i < inst.size(); ++i)
    expect += th[i] * inst.weights[i] * (-2.0 * d2.eval(trans, i));
  CHECK(tr.rhs == doctest::Approx(expect).epsilon(1e-12));

  // random jets: second-order convergence of the finite difference
  for (uint64_t seed : {71, 72}) {
    Vec v = random_jet(inst, seed);
    EnergyCheck c1 = energy_identity_check(inst, fol, v, 4.3, 0.04, op, d2);
    EnergyCheck c2 = energy_identity_check(inst, fol, v, 4.3, 0.02, op, d2);
    CHECK(c1.gap / c2.gap >= std::pow(2.0, 1.9));
  }
}

TEST_CASE("hyperbolicity verifier: certified positive configuration") {
  // Scalar-only vary space carried by one mid-band slice, on a torus whose
  // spatial spacing exceeds the kernel range (only time neighbors couple),
  // with the volume parameter adjusted so the Delta2 term vanishes
  // identically on the carrier. The verifier's constant must match a dense
  // generalized eigensolve of (P_t, theta rho I).
  Instance inst;
  inst.dim = 2;
  const int nt = 10, nx = 3;
  inst.points = Mat::Zero(nt * nx, 2);
  for (int it = 0; it < nt; ++it)
    for (int ix = 0; ix < nx; ++ix) {
      inst.points(it * nx + ix, 0) = it;
      inst.points(it * nx + ix, 1) = 2.0 * ix;
    }
  inst.weights = Vec::Ones(nt * nx);
  inst.kernel = {KernelSpec::Kind::IsoBump, 1.2, 1.0, 1.0};
  inst.periodic = {static_cast<double>(nt), 2.0 * nx};
  inst.s_param = 1.0;  // placeholder, adjusted below
  Mat L = build_pair_table(inst, 0).L;
  // Delta2 of a single-point scalar jet with carrier pairs beyond range:
  // (1/2) b^2 (ell + 3 L(x,x)); choose s so ell = -3 L(x,x).
  inst.s_param = L.row(0).sum() + 3.0 * L(0, 0);
  validate_instance(inst);

  const double tsl = 5.0;  // carrier slice
  const double delta = 0.9;
  const double t = tsl + 0.75 * delta;  // slice sits in the past half of the band
  Foliation fol = make_foliation(inst, t, t, delta, 1);

  PointSet carrier(inst.size(), false);
  for (Index i = 0; i < inst.size(); ++i) carrier[i] = inst.time(i) == tsl;
  JetSpace vary = build_space(inst, carrier, std::vector<uint32_t>(inst.size(), 0u), Mat());
  REQUIRE(vary.dim() == 3);

  Delta2Form d2 = assemble_delta2(inst);
  for (Index i = 0; i < inst.size(); ++i)
    if (carrier[i])
      CHECK(std::abs(d2.eval(vary.basis.col(0) * std::sqrt(3.0), i)) <= 1e-12);

  HypReport rep = verify_hyperbolicity(inst, fol, t, 24, vary, d2, 42);
  CHECK(rep.pass);
  CHECK_FALSE(rep.degenerate_rhs);

  // dense generalized eigenvalue oracle
  FormPair fp = soft_forms(inst, fol, t);
  Mat P = vary.basis.transpose() * fp.product * vary.basis;
  Vec th = fol.theta_all(inst, t);
  Vec ncoef = Vec::Zero(inst.coeff_count());
  for (Index i = 0; i < inst.size(); ++i)
    ncoef.segment(i * (1 + inst.dim), 1 + inst.dim).setConstant(th[i] * inst.weights[i]);
  Mat N = vary.basis.transpose() * ncoef.asDiagonal() * vary.basis;
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> ge(P, N);
  const double lam = ge.eigenvalues().minCoeff();
  CHECK(lam > 0.0);
  CHECK(rep.best_ratio == doctest::Approx(lam).epsilon(1e-6));
  CHECK(rep.C == doctest::Approx(1.0 / std::sqrt(lam)).epsilon(1e-6));
  CHECK(rep.certified);
  CHECK(rep.cert_ratio <= rep.best_ratio + 1e-12);
}

TEST_CASE("hyperbolicity verifier: negative witness on the full space") {
  Instance inst = solve_critical_weights(slab(10, 4, 1.6));
  Foliation fol = make_foliation(inst, 3.0, 6.0, 0.8, 4);
  JetSpace vary = build_space_full(inst, Mat());
  Delta2Form d2 = assemble_delta2(inst);
  HypReport rep = verify_hyperbolicity(inst, fol, 4.5, 16, vary, d2, 42);
  CHECK_FALSE(rep.pass);
  CHECK(rep.witness.size() == inst.coeff_count());
  // the witness really violates the inequality: lhs < 0 <= rhs
  CHECK(rep.witness_lhs < 0.0);
  CHECK(rep.witness_rhs >= 0.0);

  // determinism of the sampling verifier
  HypReport rep2 = verify_hyperbolicity(inst, fol, 4.5, 16, vary, d2, 42);
  CHECK(rep.best_ratio == rep2.best_ratio);
}

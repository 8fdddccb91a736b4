#include <doctest.h>

#include <random>

#include "cvp/jets.hpp"

using namespace cvp;

namespace {

Instance plane_lattice(int nt, int nx, double range) {
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

}  // namespace

TEST_CASE("pointwise product with the identity metric") {
  Instance inst = plane_lattice(4, 4, 1.6);
  Vec z = Vec::Zero(inst.coeff_count());
  CHECK(pointwise_product(inst, z, z, 0) == 0.0);

  Vec a = z, b = z;
  a[jet_scalar_index(inst, 3)] = 1.0;
  b[jet_scalar_index(inst, 3)] = 1.0;
  CHECK(pointwise_product(inst, a, b, 3) == 1.0);

  // (a=2, u=(1,0)) . (a=1, u=(3,4)) = 2 + 3 = 5
  Vec v = z, w = z;
  v[jet_scalar_index(inst, 5)] = 2.0;
  v[jet_vector_index(inst, 5, 0)] = 1.0;
  w[jet_scalar_index(inst, 5)] = 1.0;
  w[jet_vector_index(inst, 5, 0)] = 3.0;
  w[jet_vector_index(inst, 5, 1)] = 4.0;
  CHECK(pointwise_product(inst, v, w, 5) == 5.0);
}

TEST_CASE("l2 product against a brute-force loop") {
  Instance inst = plane_lattice(2, 4, 1.6);
  const Index n = inst.size();
  Vec v = random_jet(inst, 1), w = random_jet(inst, 2);

  CHECK(l2_product(inst, v, w, Vec::Zero(n)) == 0.0);

  Vec unit = Vec::Zero(inst.coeff_count());
  for (Index i = 0; i < n; ++i) unit[jet_scalar_index(inst, i)] = 1.0;
  CHECK(l2_product(inst, unit, unit, Vec::Ones(n)) ==
        doctest::Approx(inst.weights.sum()).epsilon(1e-14));

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> uw(0.0, 1.0);
  Vec weight(n);
  for (Index i = 0; i < n; ++i) weight[i] = uw(rng);
  double oracle = 0.0;
  for (Index i = 0; i < n; ++i) {
    double dot = jet_scalar(inst, v, i) * jet_scalar(inst, w, i);
    for (int a = 0; a < inst.dim; ++a)
      dot += v[jet_vector_index(inst, i, a)] * w[jet_vector_index(inst, i, a)];
    oracle += weight[i] * inst.weights[i] * dot;
  }
  CHECK(l2_product(inst, v, w, weight) == doctest::Approx(oracle).epsilon(1e-13));

  // bilinear and symmetric
  Vec u = random_jet(inst, 4);
  CHECK(l2_product(inst, v, w, weight) == doctest::Approx(l2_product(inst, w, v, weight)));
  CHECK(l2_product(inst, u + v, w, weight) ==
        doctest::Approx(l2_product(inst, u, w, weight) + l2_product(inst, v, w, weight)));
  CHECK(l2_product(inst, v, v, Vec::Ones(n)) > 0.0);
}

TEST_CASE("build_space dimensions") {
  Instance inst = plane_lattice(2, 4, 1.6);
  const Index n = inst.size();
  PointSet all(n, true);
  std::vector<uint32_t> full_mask(n, 3u), no_vec(n, 0u);

  CHECK(build_space(inst, all, full_mask, Mat()).dim() == n * 3);
  CHECK(build_space(inst, all, no_vec, Mat()).dim() == n);

  // one independent condition sum a_i = 0 on a scalar-only space of 4 points
  LatticeSpec ls;
  ls.dim = 1;
  ls.extent = {4};
  ls.spacing = 1.0;
  ls.kernel = {KernelSpec::Kind::IsoBump, 0.9, 1.0, 1.0};
  ls.periodic_axes = {false};
  Instance small = generate_lattice(ls);
  PointSet all4(4, true);
  Mat constraint = Mat::Zero(1, small.coeff_count());
  for (Index i = 0; i < 4; ++i) constraint(0, jet_scalar_index(small, i)) = 1.0;
  JetSpace sp = build_space(small, all4, std::vector<uint32_t>(4, 0u), constraint);
  CHECK(sp.dim() == 3);
  for (Index c = 0; c < sp.dim(); ++c) {
    CHECK(std::abs((constraint * sp.basis.col(c))(0, 0)) <= 1e-12);
  }
}

TEST_CASE("build_space basis is orthonormal and idempotent") {
  Instance inst = plane_lattice(3, 4, 1.6);
  const Index n = inst.size();
  PointSet carrier(n, false);
  for (Index i = 0; i < n; i += 2) carrier[i] = true;
  std::vector<uint32_t> mask(n, 1u);
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g(0.0, 1.0);
  Mat constraints(2, inst.coeff_count());
  for (Index r = 0; r < 2; ++r)
    for (Index c = 0; c < inst.coeff_count(); ++c) constraints(r, c) = g(rng);

  JetSpace sp = build_space(inst, carrier, mask, constraints);
  Mat gram = sp.basis.transpose() * sp.basis;
  CHECK((gram - Mat::Identity(sp.dim(), sp.dim())).norm() <= 1e-12);

  // rebuilding from its own basis reproduces the projector
  JetSpace again = build_space(inst, carrier, mask, constraints);
  Mat p1 = sp.basis * sp.basis.transpose();
  Mat p2 = again.basis * again.basis.transpose();
  CHECK((p1 - p2).norm() <= 1e-10);
}

TEST_CASE("supports and norms") {
  Instance inst = plane_lattice(2, 4, 1.6);
  Vec v = Vec::Zero(inst.coeff_count());
  v[jet_scalar_index(inst, 2)] = 1.0;
  v[jet_vector_index(inst, 5, 1)] = 1e-12;
  PointSet s = supp_eps(inst, v);
  CHECK(s[2]);
  CHECK_FALSE(s[5]);
  CHECK(set_count(s) == 1);
}

#include "cvp/surface.hpp"

#include <Eigen/Eigenvalues>
#include <random>

#include "cvp/parallel.hpp"

namespace cvp {

namespace {

// Weighted assembly shared by sharp and soft forms: weight w(i,j) on ordered
// pairs, A(i,j) = [[L, g1^T],[g1, h11]] with jets at x_i,
// C(i,j) = [[L, g2^T],[g1, h12]] coupling jets at x_i (rows) and x_j (cols).
FormPair assemble_forms(const Instance& inst, const PairTable& t, const Mat& w) {
  const Index n = inst.size();
  const int m = inst.dim;
  const int jw = 1 + m;
  FormPair out;
  out.sigma = Mat::Zero(n * jw, n * jw);
  out.product = Mat::Zero(n * jw, n * jw);
  std::vector<Mat> sigma_rows(n);
  parallel_for(n, [&](long i) {
    Mat diag = Mat::Zero(jw, jw);
    Mat srow = Mat::Zero(jw, n * jw);
    for (Index j = 0; j < n; ++j) {
      const double wij = w(i, j);
      const double wji = w(j, i);
      if (wij == 0.0 && wji == 0.0) continue;
      const double Lij = t.L(i, j);
      Vec g1 = t.grad1(i, j);
      Mat h11 = t.hess11(i, j);
      if (Lij == 0.0 && g1.isZero(0.0) && h11.isZero(0.0)) continue;
      Mat A(jw, jw);
      A(0, 0) = Lij;
      A.block(0, 1, 1, m) = g1.transpose();
      A.block(1, 0, m, 1) = g1;
      A.block(1, 1, m, m) = h11;
      diag += (wij - wji) * A;
      if (wij != 0.0) {
        Mat C(jw, jw);
        C(0, 0) = Lij;
        C.block(0, 1, 1, m) = -g1.transpose();  // g2 = -g1
        C.block(1, 0, m, 1) = g1;
        C.block(1, 1, m, m) = -h11;             // h12 = -h11
        srow.block(0, j * jw, jw, jw) += wij * C;
      }
    }
    out.product.block(i * jw, i * jw, jw, jw) = diag;
    sigma_rows[i] = srow;
  });
  for (Index i = 0; i < n; ++i) {
    out.sigma.middleRows(i * jw, jw) += sigma_rows[i];
    out.sigma.middleCols(i * jw, jw) -= sigma_rows[i].transpose();
  }
  return out;
}

}  // namespace

FormPair sharp_forms(const Instance& inst, const PointSet& Omega) {
  const Index n = inst.size();
  PairTable t = build_pair_table(inst, 2);
  Mat w = Mat::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    if (!Omega[i]) continue;
    for (Index j = 0; j < n; ++j)
      if (!Omega[j]) w(i, j) = inst.weights[i] * inst.weights[j];
  }
  return assemble_forms(inst, t, w);
}

FormPair soft_forms(const Instance& inst, const Foliation& fol, double t) {
  const Index n = inst.size();
  PairTable pt = build_pair_table(inst, 2);
  Vec e = fol.eta_all(inst, t);
  Mat w = Mat::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    if (!fol.U[i]) continue;
    for (Index j = 0; j < n; ++j)
      if (fol.U[j]) w(i, j) = inst.weights[i] * inst.weights[j] * e[i] * (1.0 - e[j]);
  }
  return assemble_forms(inst, pt, w);
}

EnergyCheck energy_identity_check(const Instance& inst, const Foliation& fol, const Vec& v,
                                  double t, double h, const LinOp& op, const Delta2Form& d2) {
  if (!(h > 0.0)) throw CvpError("energy_identity_check: h must be positive");
  EnergyCheck out;
  FormPair fp = soft_forms(inst, fol, t + h);
  FormPair fm = soft_forms(inst, fol, t - h);
  out.lhs = (v.dot(fp.product * v) - v.dot(fm.product * v)) / (2.0 * h);

  Vec th = fol.theta_all(inst, t);
  Vec dv = op.apply(v);
  double rhs = 0.0;
  for (Index i = 0; i < inst.size(); ++i) {
    if (!fol.U[i] || th[i] == 0.0) continue;
    const double mass = th[i] * inst.weights[i];
    const double b = jet_scalar(inst, v, i);
    rhs += mass * (2.0 * pointwise_product(inst, v, dv, i) - 2.0 * d2.eval(v, i) +
                   inst.s_param * b * b);
  }
  out.rhs = rhs;
  out.gap = std::abs(out.lhs - out.rhs);
  return out;
}

EnergyCheck energy_identity_check(const Instance& inst, const Foliation& fol, const Vec& v,
                                  double t, double h) {
  LinOp op = assemble_delta(inst);
  Delta2Form d2 = assemble_delta2(inst);
  return energy_identity_check(inst, fol, v, t, h, op, d2);
}

namespace {

// |M| for a symmetric matrix: eigenvalues replaced by absolute values.
Mat sym_abs(const Mat& M) {
  Eigen::SelfAdjointEigenSolver<Mat> es(M);
  return es.eigenvectors() * es.eigenvalues().cwiseAbs().asDiagonal() *
         es.eigenvectors().transpose();
}

}  // namespace

HypReport verify_hyperbolicity(const Instance& inst, const Foliation& fol, double t, int trials,
                               const JetSpace& vary, const Delta2Form& d2, uint64_t seed) {
  HypReport rep;
  const Index n = inst.size();
  const Index nc = inst.coeff_count();
  const Index dim = vary.dim();
  if (dim == 0) throw CvpError("verify_hyperbolicity: empty vary space");
  const Mat& Q = vary.basis;

  FormPair forms = soft_forms(inst, fol, t);
  Mat P = Q.transpose() * forms.product * Q;
  P = 0.5 * (P + P.transpose());

  Vec th = fol.theta_all(inst, t);
  Vec mass = th.cwiseProduct(inst.weights);
  std::vector<Index> layer;
  for (Index i = 0; i < n; ++i)
    if (fol.U[i] && mass[i] > 0.0) layer.push_back(i);

  // Quadratic relaxation of the right side: N + sum_i mass_i |T_i|.
  Vec ncoef = Vec::Zero(nc);
  for (Index i : layer) ncoef.segment(i * (1 + inst.dim), 1 + inst.dim).setConstant(mass[i]);
  Mat Nq = Q.transpose() * ncoef.asDiagonal() * Q;
  Mat Rq = Nq;
  for (Index i : layer) {
    const auto& pf = d2.at[i];
    const Index k = static_cast<Index>(pf.star.size()) * d2.jet_width;
    Mat local = sym_abs(pf.form);
    // scatter Q-rows of the star, then restrict
    Mat Qs(k, dim);
    for (std::size_t s = 0; s < pf.star.size(); ++s)
      Qs.middleRows(s * d2.jet_width, d2.jet_width) =
          Q.middleRows(pf.star[s] * d2.jet_width, d2.jet_width);
    Rq += mass[i] * (Qs.transpose() * local * Qs);
  }
  Rq = 0.5 * (Rq + Rq.transpose());

  const double pscale = std::max(P.cwiseAbs().maxCoeff(), 1e-300);
  const double rscale = Rq.cwiseAbs().maxCoeff();

  if (layer.empty() || rscale <= 1e-14 * pscale) {
    // No layer mass on the vary space: the condition degenerates to
    // positive semidefiniteness of the form itself.
    rep.degenerate_rhs = true;
    Eigen::SelfAdjointEigenSolver<Mat> es(P);
    const double lo = es.eigenvalues().minCoeff();
    rep.pass = lo >= -1e-12 * pscale;
    if (!rep.pass) {
      rep.witness = Q * es.eigenvectors().col(0);
      rep.witness_lhs = lo;
    }
    return rep;
  }

  // Certified lower bound: min generalized eigenvalue of (P, Rq), reduced to
  // the range of Rq (Schur complement over its near-null directions).
  {
    Eigen::SelfAdjointEigenSolver<Mat> er(Rq);
    Vec lam = er.eigenvalues();
    Mat V = er.eigenvectors();
    const double cut = 1e-12 * lam.cwiseAbs().maxCoeff();
    std::vector<Index> plus, zero;
    for (Index k = 0; k < lam.size(); ++k) (lam[k] > cut ? plus : zero).push_back(k);
    if (!plus.empty()) {
      Mat Vp(dim, static_cast<Index>(plus.size())), V0(dim, static_cast<Index>(zero.size()));
      for (std::size_t k = 0; k < plus.size(); ++k) Vp.col(k) = V.col(plus[k]);
      for (std::size_t k = 0; k < zero.size(); ++k) V0.col(k) = V.col(zero[k]);
      bool reducible = true;
      Mat Peff = Vp.transpose() * P * Vp;
      if (V0.cols() > 0) {
        Mat P00 = V0.transpose() * P * V0;
        Eigen::SelfAdjointEigenSolver<Mat> e0(P00);
        if (e0.eigenvalues().minCoeff() < -1e-10 * pscale) {
          reducible = false;  // ratio unbounded below along null directions
        } else {
          Mat P0p = V0.transpose() * P * Vp;
          Vec l0 = e0.eigenvalues();
          Mat W0 = e0.eigenvectors();
          Vec inv = l0.unaryExpr([&](double x) {
            return x > 1e-12 * pscale ? 1.0 / x : 0.0;
          });
          Mat pinv = W0 * inv.asDiagonal() * W0.transpose();
          Peff -= P0p.transpose() * pinv * P0p;
        }
      }
      if (reducible) {
        Vec lp(static_cast<Index>(plus.size()));
        for (std::size_t k = 0; k < plus.size(); ++k) lp[k] = lam[plus[k]];
        Mat Bp = lp.asDiagonal();
        Eigen::GeneralizedSelfAdjointEigenSolver<Mat> ge(0.5 * (Peff + Peff.transpose()), Bp);
        rep.cert_ratio = ge.eigenvalues().minCoeff();
        rep.certified = true;
      }
    }
  }

  // Ratio on the vary space: R(c) = c^T P c / (c^T N c + sum mass_i |D2(v,v)(i)|).
  auto denom = [&](const Vec& c, const Vec& v) {
    double den = c.dot(Nq * c);
    for (Index i : layer) den += mass[i] * std::abs(d2.eval(v, i));
    return den;
  };
  auto ratio = [&](const Vec& c) {
    Vec v = Q * c;
    const double num = c.dot(P * c);
    const double den = denom(c, v);
    return std::pair<double, double>(num, den);
  };

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double best = std::numeric_limits<double>::infinity();
  Vec best_c;
  auto consider = [&](const Vec& c) {
    auto [num, den] = ratio(c);
    if (den <= 1e-14 * pscale * c.squaredNorm()) return;
    const double r = num / den;
    if (r < best) {
      best = r;
      best_c = c;
    }
  };

  // Eigen-guided starts plus random restarts, each refined by projected
  // gradient on the sphere.
  Eigen::SelfAdjointEigenSolver<Mat> ep(P);
  for (Index k = 0; k < std::min<Index>(4, dim); ++k) consider(ep.eigenvectors().col(k));
  for (int trial = 0; trial < trials; ++trial) {
    Vec c(dim);
    for (Index k = 0; k < dim; ++k) c[k] = gauss(rng);
    c.normalize();
    double step = 0.5;
    auto [num, den] = ratio(c);
    if (den <= 1e-14 * pscale) continue;
    double cur = num / den;
    for (int it = 0; it < 80; ++it) {
      Vec v = Q * c;
      const double numv = c.dot(P * c);
      const double denv = denom(c, v);
      if (denv <= 1e-14 * pscale) break;
      Vec grad_num = 2.0 * (P * c);
      Vec gv = Vec::Zero(nc);
      for (Index i : layer) {
        const double val = d2.eval(v, i);
        const double sgn = val > 0 ? 1.0 : (val < 0 ? -1.0 : 0.0);
        d2.add_gradient(v, i, mass[i] * sgn, gv);
      }
      Vec grad_den = 2.0 * (Nq * c) + Q.transpose() * gv;
      Vec g = (grad_num * denv - numv * grad_den) / (denv * denv);
      g -= g.dot(c) * c;  // tangent to the sphere
      if (g.norm() < 1e-14) break;
      Vec cn = (c - step * g.normalized()).normalized();
      auto [num2, den2] = ratio(cn);
      if (den2 > 1e-14 * pscale && num2 / den2 < cur) {
        c = cn;
        cur = num2 / den2;
      } else {
        step *= 0.5;
        if (step < 1e-6) break;
      }
    }
    consider(c);
  }

  if (!std::isfinite(best)) {
    rep.degenerate_rhs = true;
    Eigen::SelfAdjointEigenSolver<Mat> es(P);
    rep.pass = es.eigenvalues().minCoeff() >= -1e-12 * pscale;
    return rep;
  }
  rep.best_ratio = best;
  rep.pass = best > 0.0;
  if (rep.pass) {
    rep.C = 1.0 / std::sqrt(best);
  } else {
    rep.witness = Q * best_c;
    auto [num, den] = ratio(best_c);
    rep.witness_lhs = num;
    rep.witness_rhs = den;
  }
  return rep;
}

}  // namespace cvp

#include "cvp/action.hpp"

#include <Eigen/LU>
#include <cmath>

#include "cvp/parallel.hpp"

namespace cvp {

double eval_action(const Instance& inst) {
  Mat L = build_pair_table(inst, 0).L;
  return inst.weights.dot(L * inst.weights);
}

ElReport eval_ell(const Instance& inst) {
  const Index n = inst.size();
  const int m = inst.dim;
  PairTable t = build_pair_table(inst, 1);
  ElReport rep;
  rep.ell = t.L * inst.weights - Vec::Constant(n, inst.s_param);
  rep.grad_ell = Mat::Zero(n, m);
  for (int a = 0; a < m; ++a) rep.grad_ell.col(a) = t.g1[a] * inst.weights;
  rep.max_abs_ell = rep.ell.cwiseAbs().maxCoeff();
  return rep;
}

JetSpace make_test_space(const Instance& inst, const ElReport& rep, double dir_tol) {
  const Index n = inst.size();
  std::vector<uint32_t> mask(n, 0u);
  for (Index i = 0; i < n; ++i)
    for (int a = 0; a < inst.dim; ++a)
      if (std::abs(rep.grad_ell(i, a)) <= dir_tol) mask[i] |= (1u << a);
  PointSet all(n, true);
  return build_space(inst, all, mask, Mat(), true);
}

ElCheck check_restricted_el(const Instance& inst, const JetSpace& test, double tol) {
  ElReport rep = eval_ell(inst);
  ElCheck out;
  for (Index c = 0; c < test.dim(); ++c) {
    Vec u = test.basis.col(c);
    for (Index i = 0; i < inst.size(); ++i) {
      const double val = jet_scalar(inst, u, i) * rep.ell[i] +
                         jet_vector(inst, u, i).dot(rep.grad_ell.row(i));
      if (std::abs(val) > out.worst) {
        out.worst = std::abs(val);
        out.worst_point = i;
      }
    }
  }
  out.pass = out.worst <= tol;
  return out;
}

Instance solve_critical_weights(const Instance& inst) {
  const Index n = inst.size();
  Mat K = build_pair_table(inst, 0).L;
  Eigen::FullPivLU<Mat> lu(K);
  if (!lu.isInvertible()) throw CvpError("solve_critical_weights: singular kernel matrix");
  const Vec target = Vec::Constant(n, inst.s_param);
  Vec rho = lu.solve(target);

  // Projected Jacobi refinement; detects solutions pinned at the boundary.
  const Vec diag = K.diagonal();
  for (int it = 0; it < 200; ++it) {
    Vec resid = target - K * rho;
    if (resid.norm() <= 1e-13 * target.norm()) break;
    for (Index i = 0; i < n; ++i) rho[i] = std::max(0.0, rho[i] + resid[i] / diag[i]);
  }
  const double resid = (K * rho - target).norm();
  if (resid > 1e-12 * target.norm())
    throw CvpError("solve_critical_weights: no positive solution (residual " +
                   std::to_string(resid) + ")");
  for (Index i = 0; i < n; ++i)
    if (!(rho[i] > 0.0))
      throw CvpError("solve_critical_weights: nonpositive weight at point " + std::to_string(i));
  Instance out = inst;
  out.weights = rho;
  return out;
}

namespace {

// l and Dl of the varied instance, evaluated at the varied points, for the
// family x_i + tau v_i, rho_i (1 + tau b_i). Jet coefficients ride along.
Vec varied_el_field(const Instance& inst, const Vec& v, double tau) {
  const Index n = inst.size();
  const int m = inst.dim;
  Mat moved = inst.points;
  Vec rho = inst.weights;
  for (Index i = 0; i < n; ++i) {
    moved.row(i) += tau * jet_vector(inst, v, i).transpose();
    rho[i] *= 1.0 + tau * jet_scalar(inst, v, i);
  }
  Instance varied = inst;
  varied.points = moved;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      if (varied.distance(i, j) == 0.0)
        throw CvpError("variation_fd_oracle: step too large, varied points collide");
  Vec out(inst.coeff_count());
  parallel_for(n, [&](long i) {
    double ell = -inst.s_param;
    Vec grad = Vec::Zero(m);
    for (Index j = 0; j < n; ++j) {
      KernelDiff d = kernel_diff(varied.kernel, varied.displacement(i, j), 1);
      ell += rho[j] * d.value;
      grad += rho[j] * d.grad;
    }
    out[i * (1 + m)] = ell;
    out.segment(i * (1 + m) + 1, m) = grad;
  });
  return out;
}

}  // namespace

Vec variation_fd_oracle(const Instance& inst, const Vec& v, double h) {
  if (!(h > 0.0)) throw CvpError("variation_fd_oracle: h must be positive");
  Vec e2p = varied_el_field(inst, v, 2.0 * h);
  Vec e1p = varied_el_field(inst, v, h);
  Vec e1m = varied_el_field(inst, v, -h);
  Vec e2m = varied_el_field(inst, v, -2.0 * h);
  return (-e2p + 8.0 * e1p - 8.0 * e1m + e2m) / (12.0 * h);
}

}  // namespace cvp

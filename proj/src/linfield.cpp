#include "cvp/linfield.hpp"

#include "cvp/parallel.hpp"

namespace cvp {

LinOp assemble_delta(const Instance& inst) {
  const Index n = inst.size();
  const int m = inst.dim;
  const int w = 1 + m;
  PairTable t = build_pair_table(inst, 2);
  ElReport rep;
  rep.ell = t.L * inst.weights - Vec::Constant(n, inst.s_param);
  Mat grad_ell = Mat::Zero(n, m);
  for (int a = 0; a < m; ++a) grad_ell.col(a) = t.g1[a] * inst.weights;

  LinOp op;
  op.D = Mat::Zero(n * w, n * w);
  parallel_for(n, [&](long i) {
    Mat hess_ell = Mat::Zero(m, m);
    for (Index j = 0; j < n; ++j) hess_ell += inst.weights[j] * t.hess11(i, j);
    for (Index j = 0; j < n; ++j) {
      const double rj = inst.weights[j];
      const double Lij = t.L(i, j);
      Vec g1 = t.grad1(i, j);
      Mat h11 = t.hess11(i, j);
      // Difference kernels: d2 = -d1, d1d2 = -d1d1.
      auto blk = op.D.block(i * w, j * w, w, w);
      blk(0, 0) += rj * Lij;
      blk.block(0, 1, 1, m) += (-rj) * g1.transpose();
      blk.block(1, 0, m, 1) += rj * g1;
      blk.block(1, 1, m, m) += (-rj) * h11;
      if (i == j) {
        blk(0, 0) += rep.ell[i];
        blk.block(0, 1, 1, m) += grad_ell.row(i);
        blk.block(1, 0, m, 1) += grad_ell.row(i).transpose();
        blk.block(1, 1, m, m) += hess_ell;
      }
    }
  });
  return op;
}

double Delta2Form::eval_bilinear(const Vec& u, const Vec& v, Index i) const {
  const PointForm& pf = at[i];
  const Index k = static_cast<Index>(pf.star.size()) * jet_width;
  Vec us(k), vs(k);
  for (std::size_t s = 0; s < pf.star.size(); ++s) {
    us.segment(s * jet_width, jet_width) = u.segment(pf.star[s] * jet_width, jet_width);
    vs.segment(s * jet_width, jet_width) = v.segment(pf.star[s] * jet_width, jet_width);
  }
  return us.dot(pf.form * vs);
}

void Delta2Form::add_gradient(const Vec& v, Index i, double scale, Vec& g) const {
  const PointForm& pf = at[i];
  const Index k = static_cast<Index>(pf.star.size()) * jet_width;
  Vec vs(k);
  for (std::size_t s = 0; s < pf.star.size(); ++s)
    vs.segment(s * jet_width, jet_width) = v.segment(pf.star[s] * jet_width, jet_width);
  Vec gs = 2.0 * scale * (pf.form * vs);
  for (std::size_t s = 0; s < pf.star.size(); ++s)
    g.segment(pf.star[s] * jet_width, jet_width) += gs.segment(s * jet_width, jet_width);
}

Delta2Form assemble_delta2(const Instance& inst) {
  const Index n = inst.size();
  const int m = inst.dim;
  const int w = 1 + m;
  PairTable t = build_pair_table(inst, 2);

  Delta2Form d2;
  d2.jet_width = w;
  d2.at.resize(n);
  parallel_for(n, [&](long i) {
    auto& pf = d2.at[i];
    pf.star.push_back(i);
    for (Index j = 0; j < n; ++j) {
      if (j == i) continue;
      if (t.L(i, j) != 0.0 || !t.grad1(i, j).isZero(0.0) || !t.hess11(i, j).isZero(0.0))
        pf.star.push_back(j);
    }
    const Index k = static_cast<Index>(pf.star.size());
    pf.form = Mat::Zero(k * w, k * w);
    auto slot = [&](Index point) -> Index {
      for (Index s = 0; s < k; ++s)
        if (pf.star[s] == point) return s;
      return -1;
    };
    // 1/2 sum_j rho_j (nabla_1 + nabla_2)^2 L(x_i, x_j) - 1/2 s b(x_i)^2,
    // jets held constant under differentiation.
    for (Index j = 0; j < n; ++j) {
      const double rj = 0.5 * inst.weights[j];
      const double Lij = t.L(i, j);
      Vec g1 = t.grad1(i, j);
      Mat h11 = t.hess11(i, j);
      if (Lij == 0.0 && g1.isZero(0.0) && h11.isZero(0.0)) continue;
      const Vec g2 = -g1;
      const Mat h12 = -h11;
      const Index si = slot(i) * w;
      const Index sj = slot(j) * w;
      // nabla_1 nabla_1: both jets at x_i
      pf.form(si, si) += rj * Lij;
      pf.form.block(si, si + 1, 1, m) += rj * g1.transpose();
      pf.form.block(si + 1, si, m, 1) += rj * g1;
      pf.form.block(si + 1, si + 1, m, m) += rj * h11;
      // nabla_2 nabla_2: both jets at x_j
      pf.form(sj, sj) += rj * Lij;
      pf.form.block(sj, sj + 1, 1, m) += rj * g2.transpose();
      pf.form.block(sj + 1, sj, m, 1) += rj * g2;
      pf.form.block(sj + 1, sj + 1, m, m) += rj * h11;
      // nabla_1 nabla_2 + nabla_2 nabla_1 (symmetrized cross block)
      pf.form(si, sj) += rj * Lij;
      pf.form(sj, si) += rj * Lij;
      pf.form.block(si, sj + 1, 1, m) += rj * g2.transpose();
      pf.form.block(sj + 1, si, m, 1) += rj * g2;
      pf.form.block(si + 1, sj, m, 1) += rj * g1;
      pf.form.block(sj, si + 1, 1, m) += rj * g1.transpose();
      pf.form.block(si + 1, sj + 1, m, m) += rj * h12;
      pf.form.block(sj + 1, si + 1, m, m) += rj * h12.transpose();
    }
    pf.form(0, 0) -= 0.5 * inst.s_param;  // slot 0 is x_i itself
  });
  return d2;
}

Vec strong_residual(const Instance& inst, const LinOp& op, const Vec& v, const Vec& w,
                    const std::vector<bool>& test_mask) {
  Vec r = op.D * v - w;
  for (Index c = 0; c < r.size(); ++c)
    if (!test_mask[c]) r[c] = 0.0;
  return r;
}

double weak_residual(const Instance& inst, const LinOp& op, const Vec& v, const Vec& w,
                     const JetSpace& test, const Vec& weight) {
  if (test.dim() == 0) return 0.0;
  Vec wc = coeff_weight(inst, weight);
  const double nv = std::sqrt(v.dot(wc.cwiseProduct(v)));
  double worst = 0.0;
  for (Index c = 0; c < test.dim(); ++c) {
    Vec u = test.basis.col(c);
    Vec du = op.D * u;
    const double lhs = du.dot(wc.cwiseProduct(v));
    const double rhs = u.dot(wc.cwiseProduct(w));
    const double nu = std::sqrt(u.dot(wc.cwiseProduct(u)));
    worst = std::max(worst, std::abs(lhs - rhs) / (1.0 + nu * nv));
  }
  return worst;
}

}  // namespace cvp

#include "cvp/lens.hpp"

#include <Eigen/SVD>

#include "cvp/parallel.hpp"

namespace cvp {

Workspace make_workspace(const Instance& inst) {
  validate_instance(inst);
  Workspace ws{inst, build_pair_table(inst, 2), assemble_delta(inst), assemble_delta2(inst)};
  return ws;
}

namespace {

// Foliation condition: points carrying theta must not couple to M \ U.
void check_locality(const Workspace& ws, const PointSet& U, const Foliation& fol) {
  const Instance& inst = ws.inst;
  std::vector<Index> outside;
  for (Index j = 0; j < inst.size(); ++j)
    if (!U[j]) outside.push_back(j);
  if (outside.empty()) return;
  for (double t : fol.grid()) {
    for (Index i = 0; i < inst.size(); ++i) {
      if (!U[i] || fol.theta(inst, t, i) <= kEpsEta) continue;
      for (Index j : outside) {
        const double coupling = std::abs(ws.pairs.L(i, j)) + ws.pairs.grad1(i, j).norm() +
                                ws.pairs.hess11(i, j).norm();
        if (coupling > 1e-14)
          throw CvpError("build_lens: foliation leaks outside U (theta-support point " +
                         std::to_string(i) + " couples to " + std::to_string(j) + ")");
      }
    }
  }
}

JetSpace constrain(const JetSpace& space, const Mat& rows) {
  JetSpace out;
  out.mask = space.mask;
  if (space.dim() == 0 || rows.rows() == 0) {
    out.basis = space.basis;
    return out;
  }
  Mat restricted = rows * space.basis;
  out.basis = space.basis * nullspace(restricted, space.dim());
  return out;
}

// Rows forcing coefficients to vanish at the given points.
Mat support_rows(const Instance& inst, const PointSet& bad) {
  const int w = 1 + inst.dim;
  std::vector<Index> idx;
  for (Index i = 0; i < inst.size(); ++i)
    if (bad[i])
      for (int c = 0; c < w; ++c) idx.push_back(i * w + c);
  Mat rows = Mat::Zero(static_cast<Index>(idx.size()), inst.coeff_count());
  for (std::size_t k = 0; k < idx.size(); ++k) rows(static_cast<Index>(k), idx[k]) = 1.0;
  return rows;
}

}  // namespace

LensRegion build_lens(const Workspace& ws, const PointSet& U, const Foliation& fol,
                      const JetSpace& vary, const LensOptions& opt) {
  const Instance& inst = ws.inst;
  const Index n = inst.size();
  check_locality(ws, U, fol);

  LensRegion lens;
  lens.fol = fol;
  lens.fol.U = U;
  lens.vary = vary;
  lens.eta_top = lens.fol.eta_all(inst, fol.t_max);
  lens.eta_bot = lens.fol.eta_all(inst, fol.t_min);
  lens.eta_window = lens.eta_top - lens.eta_bot;

  FoliationReport frep = check_foliation(inst, lens.fol);
  lens.attainment_ok = frep.fully_attaining;
  if (!frep.theta_nonneg || !frep.monotone)
    throw CvpError("build_lens: foliation must be monotone with theta >= 0");

  lens.Lset.assign(n, false);
  for (double t : lens.fol.grid()) {
    Vec th = lens.fol.theta_all(inst, t);
    for (Index i = 0; i < n; ++i)
      if (th[i] > kEpsEta) lens.Lset[i] = true;
  }

  PointSet K1(n, false), K2(n, false);
  for (Index i = 0; i < n; ++i) {
    if (!U[i]) continue;
    if (lens.eta_top[i] < 1.0 - kEpsEta) K1[i] = true;
    if (lens.eta_top[i] > kEpsEta) K2[i] = true;
  }
  lens.Zset = set_and(compact_range_map(inst, K1), compact_range_map(inst, K2));

  lens.Wset.assign(n, false);
  for (Index i = 0; i < n; ++i)
    lens.Wset[i] = U[i] && lens.eta_window[i] >= 1.0 - kEpsEta && !lens.Zset[i] && lens.Lset[i];
  if (set_empty(lens.Wset)) throw CvpError("build_lens: empty W");

  // Jbar: vanish where eta_tmax < 1, and be form-orthogonal to the vary
  // space at t_max. Junder mirrors this at t_min.
  FormPair top = soft_forms(inst, lens.fol, fol.t_max);
  {
    PointSet bad(n, false);
    for (Index i = 0; i < n; ++i) bad[i] = (1.0 - lens.eta_top[i]) > kEpsEta;
    Mat form_rows(2 * vary.dim(), inst.coeff_count());
    form_rows.topRows(vary.dim()) = vary.basis.transpose() * top.product;
    form_rows.bottomRows(vary.dim()) = vary.basis.transpose() * top.sigma;
    Mat srows = support_rows(inst, bad);
    Mat all(srows.rows() + form_rows.rows(), inst.coeff_count());
    all.topRows(srows.rows()) = srows;
    all.bottomRows(form_rows.rows()) = form_rows;
    lens.Jbar = constrain(vary, all);
  }
  {
    FormPair bot = soft_forms(inst, lens.fol, fol.t_min);
    PointSet bad(n, false);
    for (Index i = 0; i < n; ++i) bad[i] = lens.eta_bot[i] > kEpsEta;
    Mat form_rows(2 * vary.dim(), inst.coeff_count());
    form_rows.topRows(vary.dim()) = vary.basis.transpose() * bot.product;
    form_rows.bottomRows(vary.dim()) = vary.basis.transpose() * bot.sigma;
    Mat srows = support_rows(inst, bad);
    Mat all(srows.rows() + form_rows.rows(), inst.coeff_count());
    all.topRows(srows.rows()) = srows;
    all.bottomRows(form_rows.rows()) = form_rows;
    lens.Junder = constrain(vary, all);
  }
  {
    // J' = {u in vary : eta_tmax u in Jbar}
    Mat proj = Mat::Identity(inst.coeff_count(), inst.coeff_count());
    if (lens.Jbar.dim() > 0) proj -= lens.Jbar.basis * lens.Jbar.basis.transpose();
    Vec scale(inst.coeff_count());
    for (Index i = 0; i < n; ++i)
      scale.segment(i * (1 + inst.dim), 1 + inst.dim).setConstant(lens.eta_top[i]);
    Mat rows = proj * scale.asDiagonal();
    lens.Jprime = constrain(vary, rows);
  }

  for (double t : lens.fol.grid()) {
    HypReport hr = verify_hyperbolicity(inst, lens.fol, t, opt.hyp_trials, vary, ws.d2, opt.seed);
    lens.hyp_all_pass = lens.hyp_all_pass && hr.pass;
    lens.hyp.push_back(std::move(hr));
    if (opt.hyp_mode == HypMode::Enforce && !lens.hyp.back().pass)
      throw CvpError("build_lens: hyperbolicity failed at t = " + std::to_string(t) +
                     " (witness ratio " + std::to_string(lens.hyp.back().best_ratio) + ")");
  }

  // Least-squares cache: A c = b with A = (D Jbar)^T W_window restricted to
  // unknown coefficients, minimal norm in the window-weighted metric.
  Vec wcoef = coeff_weight(inst, lens.eta_window);
  for (Index c = 0; c < inst.coeff_count(); ++c)
    if (wcoef[c] > opt.unknown_cut) lens.unknowns.push_back(c);
  const Index nu = static_cast<Index>(lens.unknowns.size());
  Mat A(lens.Jbar.dim(), nu);
  Mat DJ = ws.delta.D * lens.Jbar.basis;  // columns: Delta u_alpha
  lens.unknown_scale = Vec(nu);
  for (Index k = 0; k < nu; ++k) {
    const Index c = lens.unknowns[k];
    lens.unknown_scale[k] = std::sqrt(wcoef[c]);
    A.col(k) = DJ.row(c).transpose() * wcoef[c] / lens.unknown_scale[k];
  }
  if (lens.Jbar.dim() > 0 && nu > 0) {
    ThinSvd svd = thin_svd(A);
    lens.svd_u = std::move(svd.u);
    lens.svd_v = std::move(svd.v);
    lens.svd_s = std::move(svd.s);
    lens.svd_cut = lens.svd_s.size() ? kSvdRelCut * lens.svd_s[0] : 0.0;
  }
  return lens;
}

WeakSolution solve_weak(const Workspace& ws, const LensRegion& lens, const Vec& w) {
  const Instance& inst = ws.inst;
  WeakSolution out;
  out.v = Vec::Zero(inst.coeff_count());

  const double wnorm = l2_norm(inst, w, Vec::Ones(inst.size()));
  if (wnorm > 0.0) {
    Vec outside = w;
    for (Index i = 0; i < inst.size(); ++i)
      if (lens.Wset[i]) outside.segment(i * (1 + inst.dim), 1 + inst.dim).setZero();
    if (outside.norm() > 1e-12 * w.norm())
      throw CvpError("solve_weak: inhomogeneity not supported in W");
  }

  Vec wcoef = coeff_weight(inst, lens.eta_window);
  Vec b = lens.Jbar.basis.transpose() * wcoef.cwiseProduct(w);
  out.rhs_norm = b.norm();
  const double wnorm_L = l2_norm(inst, w, lens.eta_window);
  if (lens.Jbar.dim() == 0 || lens.unknowns.empty() || wnorm_L == 0.0) {
    // vacuous test space or zero data: the distinguished solution is zero
    out.gamma = 0.0;
    return out;
  }

  Vec d = Vec::Zero(lens.svd_s.size());
  Vec ub = lens.svd_u.transpose() * b;
  for (Index k = 0; k < lens.svd_s.size(); ++k)
    if (lens.svd_s[k] > lens.svd_cut) d[k] = ub[k] / lens.svd_s[k];
  Vec c = lens.svd_v * d;
  for (Index k = 0; k < static_cast<Index>(lens.unknowns.size()); ++k)
    out.v[lens.unknowns[k]] = c[k] / lens.unknown_scale[k];

  // residual in the test basis
  Vec Ac(lens.svd_s.size());
  Ac = lens.svd_u * (lens.svd_s.cwiseProduct(lens.svd_v.transpose() * c));
  out.residual = (Ac - b).norm();
  if (out.residual > 1e-8 * std::max(wnorm_L, 1e-300))
    throw CvpError("solve_weak: inconsistent system (residual " + std::to_string(out.residual) +
                   " vs |w| " + std::to_string(wnorm_L) + "), test space or foliation misconfigured");
  out.gamma = l2_norm(inst, out.v, lens.eta_window) / wnorm_L;
  return out;
}

Vec commutator_inhomogeneity(const Workspace& ws, const Vec& eta, const Vec& vt) {
  const Instance& inst = ws.inst;
  const Index n = inst.size();
  const int m = inst.dim;
  Vec out = Vec::Zero(inst.coeff_count());
  parallel_for(n, [&](long i) {
    double f = 0.0;
    Vec g = Vec::Zero(m);
    for (Index j = 0; j < n; ++j) {
      const double dd = eta[j] - eta[i];
      if (dd == 0.0) continue;
      const double Lij = ws.pairs.L(i, j);
      Vec g1 = ws.pairs.grad1(i, j);
      Mat h11 = ws.pairs.hess11(i, j);
      if (Lij == 0.0 && g1.isZero(0.0) && h11.isZero(0.0)) continue;
      const double bj = jet_scalar(inst, vt, j);
      Vec vj = jet_vector(inst, vt, j);
      // nabla_{2,vt} L = b(y) L + <d2 L, v(y)>, d2 = -g1; d1 of it, jets const
      f += inst.weights[j] * dd * (bj * Lij - g1.dot(vj));
      g += inst.weights[j] * dd * (bj * g1 - h11 * vj);
    }
    out[i * (1 + m)] = f;
    out.segment(i * (1 + m) + 1, m) = g;
  });
  return out;
}

GlueStep glue_step(const Workspace& ws, const LensRegion& lens, const Vec& w,
                   bool check_postconditions) {
  const Instance& inst = ws.inst;
  GlueStep step;
  step.local = solve_weak(ws, lens, w);

  Vec window(inst.coeff_count()), top(inst.coeff_count());
  for (Index i = 0; i < inst.size(); ++i) {
    window.segment(i * (1 + inst.dim), 1 + inst.dim).setConstant(lens.eta_window[i]);
    top.segment(i * (1 + inst.dim), 1 + inst.dim).setConstant(lens.eta_top[i]);
  }
  Vec vt = window.cwiseProduct(step.local.v);  // absorb the L2(L) weight
  step.v_out = top.cwiseProduct(vt);
  step.w_tilde = commutator_inhomogeneity(ws, lens.eta_top, vt);

  if (check_postconditions) {
    PointSet supp = supp_eps(inst, step.w_tilde);
    if (!set_subset(supp, lens.Zset)) {
      for (Index i = 0; i < inst.size(); ++i)
        if (supp[i] && !lens.Zset[i])
          throw CvpError("glue_step: w_tilde leaks outside Z at point " + std::to_string(i));
    }
    // modified weak identity on the J' basis
    Vec ones = Vec::Ones(inst.size());
    Vec wc = coeff_weight(inst, ones);
    double worst = 0.0, scale = 0.0;
    for (Index cix = 0; cix < lens.Jprime.dim(); ++cix) {
      Vec u = lens.Jprime.basis.col(cix);
      const double lhs = (ws.delta.D * u).dot(wc.cwiseProduct(step.v_out));
      const double rhs = u.dot(wc.cwiseProduct(w)) + u.dot(wc.cwiseProduct(step.w_tilde));
      worst = std::max(worst, std::abs(lhs - rhs));
      scale = std::max(scale, std::abs(rhs));
    }
    const double wnorm = l2_norm(inst, w, ones);
    step.weak_ll_residual = worst / std::max({scale, wnorm, 1e-300});
    if (step.weak_ll_residual > 1e-8)
      throw CvpError("glue_step: weak identity violated (relative residual " +
                     std::to_string(step.weak_ll_residual) + ")");
  }
  return step;
}

}  // namespace cvp

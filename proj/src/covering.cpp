#include "cvp/covering.hpp"

#include <algorithm>
#include <queue>

namespace cvp {

namespace {

JetSpace intersect_with_constraints(const JetSpace& space, const Mat& rows) {
  JetSpace out;
  out.mask = space.mask;
  if (space.dim() == 0 || rows.rows() == 0) {
    out.basis = space.basis;
    return out;
  }
  out.basis = space.basis * nullspace(rows * space.basis, space.dim());
  return out;
}

}  // namespace

Covering build_covering(const Workspace& ws, const CoveringParams& params, const JetSpace& vary) {
  const Instance& inst = ws.inst;
  const Index n = inst.size();
  if (!inst.periodic.empty() && inst.periodic[0] > 0.0)
    throw CvpError("build_covering: time-periodic instances are rejected (no strong causality)");

  double tau_max = -std::numeric_limits<double>::infinity();
  for (Index i = 0; i < n; ++i)
    tau_max = std::max(tau_max, params.time_sign * inst.time(i));

  Covering cov;
  cov.params = params;
  PointSet all_U(n, true);
  for (int l = 0; l < params.max_lenses; ++l) {
    const double t0 = params.t_start + l * params.stride;
    const double t1 = std::min(t0 + params.height, tau_max + params.top_pad);
    if (t1 <= t0) break;
    // The grid must sample every layer: keep its step below the softening
    // width, otherwise the L-set develops gaps.
    const int gn =
        std::max(params.grid_n, static_cast<int>(std::ceil((t1 - t0) / (0.75 * params.delta))) + 1);
    Foliation fol = make_foliation(inst, t0, t1, params.delta, gn, params.time_sign);
    // Peek at the candidate W band; a fully-clipped template contributes
    // nothing and ends the tiling.
    {
      Vec etop = fol.eta_all(inst, t1), ebot = fol.eta_all(inst, t0);
      PointSet K1(n, false), K2(n, false);
      for (Index i = 0; i < n; ++i) {
        if (etop[i] < 1.0 - kEpsEta) K1[i] = true;
        if (etop[i] > kEpsEta) K2[i] = true;
      }
      PointSet Z = set_and(compact_range_map(inst, K1), compact_range_map(inst, K2));
      PointSet Lset(n, false);
      for (double t : fol.grid()) {
        Vec th = fol.theta_all(inst, t);
        for (Index i = 0; i < n; ++i)
          if (th[i] > kEpsEta) Lset[i] = true;
      }
      bool any = false;
      for (Index i = 0; i < n && !any; ++i)
        any = Lset[i] && (etop[i] - ebot[i]) >= 1.0 - kEpsEta && !Z[i];
      if (!any) break;
    }
    LensRegion lens = build_lens(ws, all_U, fol, vary, params.lens);
    cov.lenses.push_back(std::move(lens));
    // Stop once the lens top is clipped: later strides add no new W band.
    if (t0 + params.height > tau_max + params.top_pad) break;
  }
  if (cov.lenses.empty()) throw CvpError("build_covering: no lenses constructed");

  const int L = static_cast<int>(cov.lenses.size());
  PointSet in_any_W(n, false);
  for (const auto& lens : cov.lenses) in_any_W = set_or(in_any_W, lens.Wset);

  cov.t_F = -std::numeric_limits<double>::infinity();
  for (Index i = 0; i < n; ++i)
    if (in_any_W[i]) cov.t_F = std::max(cov.t_F, params.time_sign * inst.time(i));
  cov.F_top.assign(n, false);
  for (Index i = 0; i < n; ++i) cov.F_top[i] = params.time_sign * inst.time(i) > cov.t_F;

  for (Index i = 0; i < n; ++i)
    if (!in_any_W[i] && !cov.F_top[i])
      throw CvpError("build_covering: covering gap at point " + std::to_string(i));

  cov.future_edges.assign(L, {});
  for (int a = 0; a < L; ++a)
    for (int b = 0; b < L; ++b)
      if (!set_empty(set_and(cov.lenses[b].Wset, cov.lenses[a].Zset)))
        cov.future_edges[a].push_back(b);

  // strong causality: reachable pairs must have disjoint W's
  for (int a = 0; a < L; ++a) {
    std::vector<bool> reach(L, false);
    std::queue<int> q;
    for (int b : cov.future_edges[a]) {
      if (!reach[b]) {
        reach[b] = true;
        q.push(b);
      }
    }
    while (!q.empty()) {
      int cur = q.front();
      q.pop();
      for (int b : cov.future_edges[cur])
        if (!reach[b]) {
          reach[b] = true;
          q.push(b);
        }
    }
    for (int b = 0; b < L; ++b) {
      if (!reach[b]) continue;
      if (!set_empty(set_and(cov.lenses[a].Wset, cov.lenses[b].Wset))) {
        cov.strongly_causal = false;
        cov.causality_witness = {a, b};
        throw CvpError("build_covering: strong causality violated by lenses " +
                       std::to_string(a) + " and " + std::to_string(b));
      }
    }
  }

  // J' = intersection of the per-lens test spaces; the "away" variant also
  // vanishes on the compact range of F_top.
  cov.Jprime = vary;
  for (const auto& lens : cov.lenses) {
    Mat proj = Mat::Identity(inst.coeff_count(), inst.coeff_count());
    if (lens.Jprime.dim() > 0) proj -= lens.Jprime.basis * lens.Jprime.basis.transpose();
    cov.Jprime = intersect_with_constraints(cov.Jprime, proj);
    if (cov.Jprime.dim() == 0) break;
  }
  {
    PointSet kf = compact_range_map(inst, cov.F_top);
    Mat rows = Mat::Zero(0, inst.coeff_count());
    std::vector<Index> idx;
    for (Index i = 0; i < n; ++i)
      if (kf[i])
        for (int c = 0; c < 1 + inst.dim; ++c) idx.push_back(i * (1 + inst.dim) + c);
    rows = Mat::Zero(static_cast<Index>(idx.size()), inst.coeff_count());
    for (std::size_t k = 0; k < idx.size(); ++k) rows(static_cast<Index>(k), idx[k]) = 1.0;
    cov.Jprime_away = intersect_with_constraints(cov.Jprime, rows);
  }
  return cov;
}

GlueResult glue_global(const Workspace& ws, const Covering& cov, const Vec& w, int max_iter,
                       double tol, bool final_check) {
  const Instance& inst = ws.inst;
  const Index n = inst.size();
  const int jw = 1 + inst.dim;
  GlueResult res;
  res.v = Vec::Zero(inst.coeff_count());

  PointSet in_any_W(n, false);
  for (const auto& lens : cov.lenses) in_any_W = set_or(in_any_W, lens.Wset);
  {
    PointSet supp = supp_eps(inst, w);
    if (!set_subset(supp, in_any_W))
      throw CvpError("glue_global: inhomogeneity not supported in the union of W's");
  }

  const Vec ones = Vec::Ones(n);
  const double wnorm = l2_norm(inst, w, ones);
  Vec cur = w;
  double prev_min_time = -std::numeric_limits<double>::infinity();
  int it = 0;
  for (; it < max_iter; ++it) {
    const double rnorm = l2_norm(inst, cur, ones);
    PointSet supp = supp_eps(inst, cur);
    double min_time = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < n; ++i)
      if (supp[i]) min_time = std::min(min_time, cov.params.time_sign * inst.time(i));
    res.trace.residual_norm.push_back(rnorm);
    res.trace.residual_min_time.push_back(min_time);

    const bool parked = set_subset(supp, cov.F_top);
    if (rnorm <= tol * wnorm || parked) {
      res.trace.finished_in_ftop = parked || rnorm == 0.0;
      break;
    }
    if (set_empty(supp)) break;
    if (min_time < prev_min_time - 1e-12)
      throw CvpError("glue_global: residual support moved to the past; covering certificate "
                     "no longer applies");
    prev_min_time = min_time;

    // first-index-wins decomposition over the covering W's
    Vec next = Vec::Zero(inst.coeff_count());
    PointSet used(n, false);
    bool any_piece = false;
    for (std::size_t l = 0; l < cov.lenses.size(); ++l) {
      const auto& lens = cov.lenses[l];
      Vec piece = Vec::Zero(inst.coeff_count());
      bool nonzero = false;
      for (Index i = 0; i < n; ++i) {
        if (!lens.Wset[i] || used[i]) continue;
        used[i] = true;
        auto seg = cur.segment(i * jw, jw);
        if (!seg.isZero(0.0)) {
          piece.segment(i * jw, jw) = seg;
          nonzero = true;
        }
      }
      if (!nonzero) continue;
      any_piece = true;
      GlueStep step = glue_step(ws, lens, piece);
      res.v += step.v_out;
      next -= step.w_tilde;  // solve the negated inhomogeneities next round
      GluePiece rec;
      rec.iteration = it;
      rec.lens = static_cast<int>(l);
      rec.piece_norm = l2_norm(inst, piece, ones);
      rec.solve_residual = step.local.residual;
      rec.v_support = supp_eps(inst, step.v_out);
      res.trace.pieces.push_back(std::move(rec));
    }
    if (!any_piece)
      throw CvpError("glue_global: residual intersects no W but is not parked in F_top");
    cur = next;
  }
  res.trace.iterations = it;
  if (it >= max_iter)
    throw CvpError("glue_global: max iterations exceeded with residual support not parked");

  if (final_check && cov.Jprime_away.dim() > 0) {
    Vec wc = coeff_weight(inst, ones);
    double worst = 0.0;
    for (Index c = 0; c < cov.Jprime_away.dim(); ++c) {
      Vec u = cov.Jprime_away.basis.col(c);
      const double lhs = (ws.delta.D * u).dot(wc.cwiseProduct(res.v));
      const double rhs = u.dot(wc.cwiseProduct(w));
      worst = std::max(worst, std::abs(lhs - rhs));
    }
    res.trace.final_residual = worst / std::max(wnorm, 1e-300);
    if (res.trace.final_residual > 1e-6)
      throw CvpError("glue_global: final weak check failed (relative residual " +
                     std::to_string(res.trace.final_residual) + ")");
  }
  return res;
}

LocalFiniteness audit_local_finiteness(const Workspace& ws, const Covering& cov,
                                       const GlueTrace& trace, const PointSet& K) {
  LocalFiniteness out;
  for (const auto& piece : trace.pieces)
    if (!set_empty(set_and(piece.v_support, K))) ++out.count;
  PointSet thick = compact_range_map(ws.inst, K);
  for (const auto& lens : cov.lenses)
    if (!set_empty(set_and(lens.Wset, thick))) ++out.bound;
  return out;
}

}  // namespace cvp

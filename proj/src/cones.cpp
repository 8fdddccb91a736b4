#include "cvp/cones.hpp"

namespace cvp {

PointSet causal_future(const Workspace& ws, const GreensSystem& gs, const PointSet& V) {
  const Instance& inst = ws.inst;
  const Index n = inst.size();
  const int jw = 1 + inst.dim;
  PointSet out(n, false);
  for (Index i = 0; i < n; ++i) {
    if (!V[i]) continue;
    if (!gs.admissible[i])
      throw CvpError("causal_future: source point " + std::to_string(i) +
                     " outside the admissible domain");
    for (int c = 0; c < jw; ++c) {
      const Index col = i * jw + c;
      if (!gs.col_ok[col]) continue;
      Vec sol = gs.S_ret.col(col);  // sign-stripped support below
      out = set_or(out, supp_eps(inst, sol));
    }
  }
  return out;
}

HatRResult build_hatR(const Workspace& ws, const GreensSystem& gs, double r_nb) {
  const Instance& inst = ws.inst;
  const Index n = inst.size();
  HatRResult res;
  res.rel.kind = CausalRelation::Kind::HatR;
  res.rel.n = n;
  res.rel.pairs.assign(n, std::vector<bool>(n, false));
  res.row_built.assign(n, false);
  for (Index x = 0; x < n; ++x) {
    PointSet ball(n, false);
    bool ok = true;
    for (Index z = 0; z < n; ++z) {
      if (inst.distance(x, z) <= r_nb) {
        ball[z] = true;
        if (!gs.admissible[z]) ok = false;
      }
    }
    if (!ok) continue;
    res.row_built[x] = true;
    PointSet fut = causal_future(ws, gs, ball);
    for (Index y = 0; y < n; ++y) res.rel.pairs[x][y] = fut[y];
  }
  return res;
}

namespace {

// r3 = r1 o r2 (does a path x -> z -> y exist)
std::vector<std::vector<bool>> compose(const std::vector<std::vector<bool>>& r1,
                                       const std::vector<std::vector<bool>>& r2) {
  const Index n = static_cast<Index>(r1.size());
  std::vector<std::vector<bool>> out(n, std::vector<bool>(n, false));
  for (Index x = 0; x < n; ++x)
    for (Index z = 0; z < n; ++z)
      if (r1[x][z])
        for (Index y = 0; y < n; ++y)
          if (r2[z][y]) out[x][y] = true;
  return out;
}

}  // namespace

CausalRelation transitive_closure(const CausalRelation& rel) {
  CausalRelation out = rel;
  out.kind = CausalRelation::Kind::R;
  for (;;) {
    auto step = compose(out.pairs, out.pairs);
    bool grew = false;
    for (Index x = 0; x < out.n; ++x)
      for (Index y = 0; y < out.n; ++y)
        if (step[x][y] && !out.pairs[x][y]) {
          out.pairs[x][y] = true;
          grew = true;
        }
    if (!grew) break;
  }
  return out;
}

bool is_transitive(const CausalRelation& rel) {
  auto step = compose(rel.pairs, rel.pairs);
  for (Index x = 0; x < rel.n; ++x)
    for (Index y = 0; y < rel.n; ++y)
      if (step[x][y] && !rel.pairs[x][y]) return false;
  return true;
}

PointSet future_set(const CausalRelation& rel, Index x) {
  if (rel.kind != CausalRelation::Kind::R)
    throw CvpError("future_set: relation must be the transitive closure");
  PointSet out(rel.n, false);
  for (Index y = 0; y < rel.n; ++y) out[y] = rel.pairs[x][y];
  return out;
}

}  // namespace cvp

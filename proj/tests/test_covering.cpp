#include <doctest.h>

#include <random>

#include "cvp/covering.hpp"

using namespace cvp;

namespace {

Instance slab(int nt, int nx, double range) {
  LatticeSpec spec;
  spec.dim = 2;
  spec.extent = {nt, nx};
  spec.spacing = 1.0;
  spec.kernel = {KernelSpec::Kind::IsoBump, range, 1.0, 1.0};
  spec.periodic_axes = {false, true};
  return generate_lattice(spec);
}

CoveringParams slab_params() {
  CoveringParams p;
  p.t_start = -0.75;
  p.stride = 7.0;
  p.height = 9.0;
  p.delta = 0.8;
  p.grid_n = 13;
  p.top_pad = 0.25;
  p.lens.hyp_mode = HypMode::Report;
  p.lens.hyp_trials = 2;
  return p;
}

Vec point_source(const Instance& inst, Index point, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Vec w = Vec::Zero(inst.coeff_count());
  for (int c = 0; c < 1 + inst.dim; ++c) w[point * (1 + inst.dim) + c] = g(rng);
  return w;
}

}  // namespace

TEST_CASE("covering a 1+1D slab: bands, edges, certificate") {
  Instance inst = slab(20, 6, 1.6);
  Workspace ws = make_workspace(inst);
  JetSpace vary = build_space_full(ws.inst, Mat());
  Covering cov = build_covering(ws, slab_params(), vary);

  REQUIRE(cov.lenses.size() == 3);
  CHECK(cov.strongly_causal);

  // W bands tile the slab below F_top
  PointSet all_w(inst.size(), false);
  for (const auto& lens : cov.lenses) {
    for (const auto& other : cov.lenses)
      if (&lens != &other) CHECK(set_empty(set_and(lens.Wset, other.Wset)));
    all_w = set_or(all_w, lens.Wset);
  }
  for (Index i = 0; i < inst.size(); ++i) CHECK((all_w[i] || cov.F_top[i]));

  // edges step into strictly later bands (BFS oracle: a chain 0 -> 1 -> 2)
  REQUIRE(cov.future_edges.size() == 3);
  CHECK(cov.future_edges[0] == std::vector<int>{1});
  CHECK(cov.future_edges[1] == std::vector<int>{2});
  CHECK(cov.future_edges[2].empty());

  CHECK(cov.Jprime.dim() > 0);
  CHECK(cov.Jprime_away.dim() > 0);
}

TEST_CASE("single lens covering M minus F_top is trivially strongly causal") {
  Instance inst = slab(8, 4, 1.6);
  Workspace ws = make_workspace(inst);
  JetSpace vary = build_space_full(ws.inst, Mat());
  CoveringParams p = slab_params();
  p.height = 12.0;  // single lens; its Z band is exactly the F_top band
  p.t_start = -0.75;
  Covering cov = build_covering(ws, p, vary);
  REQUIRE(cov.lenses.size() == 1);
  CHECK(set_subset(cov.lenses[0].Zset, cov.F_top));
  CHECK(cov.future_edges[0].empty());
  CHECK(cov.strongly_causal);
}

TEST_CASE("covering gap is reported with the offending point") {
  Instance inst = slab(20, 6, 1.6);
  Workspace ws = make_workspace(inst);
  JetSpace vary = build_space_full(ws.inst, Mat());
  CoveringParams p = slab_params();
  p.stride = 11.0;  // leaves slices uncovered between the W bands
  CHECK_THROWS_WITH_AS((void)build_covering(ws, p, vary), doctest::Contains("covering gap"),
                       CvpError);
}

TEST_CASE("time-periodic instances are rejected") {
  LatticeSpec spec;
  spec.dim = 2;
  spec.extent = {12, 6};
  spec.spacing = 1.0;
  spec.kernel = {KernelSpec::Kind::IsoBump, 1.6, 1.0, 1.0};
  spec.periodic_axes = {true, true};
  Instance inst = generate_lattice(spec);
  Workspace ws = make_workspace(inst);
  JetSpace vary = build_space_full(ws.inst, Mat());
  CHECK_THROWS_WITH_AS((void)build_covering(ws, slab_params(), vary),
                       doctest::Contains("time-periodic"), CvpError);
}

TEST_CASE("global gluing of a point source") {
  Instance inst = slab(20, 6, 1.6);
  Workspace ws = make_workspace(inst);
  JetSpace vary = build_space_full(ws.inst, Mat());
  Covering cov = build_covering(ws, slab_params(), vary);

  // zero inhomogeneity: zero solution, zero iterations
  GlueResult zero = glue_global(ws, cov, Vec::Zero(inst.coeff_count()), 8, 1e-12);
  CHECK(zero.v.cwiseAbs().maxCoeff() == 0.0);
  CHECK(zero.trace.pieces.empty());

  // early point source: support of the residual advances strictly in time
  Index src = -1;
  for (Index i = 0; i < inst.size(); ++i)
    if (cov.lenses[0].Wset[i] && inst.time(i) == 2.0) {
      src = i;
      break;
    }
  REQUIRE(src >= 0);
  Vec w = point_source(inst, src, 101);
  GlueResult res = glue_global(ws, cov, w, 8, 1e-12);
  CHECK(res.trace.finished_in_ftop);
  CHECK(res.trace.iterations <= 3);
  for (int k = 1; k < res.trace.iterations; ++k)
    CHECK(res.trace.residual_min_time[k] > res.trace.residual_min_time[k - 1]);
  CHECK(res.trace.final_residual <= 1e-6);

  // determinism: bit-identical rerun
  GlueResult res2 = glue_global(ws, cov, w, 8, 1e-12);
  CHECK((res.v - res2.v).cwiseAbs().maxCoeff() == 0.0);

  // source already below a terminal lens: single iteration
  CoveringParams p1 = slab_params();
  p1.height = 22.0;  // single lens, Z empty
  Covering cov1 = build_covering(ws, p1, vary);
  REQUIRE(cov1.lenses.size() == 1);
  GlueResult one = glue_global(ws, cov1, w, 4, 1e-12);
  CHECK(one.trace.iterations == 1);
  GlueStep direct = glue_step(ws, cov1.lenses[0], w);
  CHECK((one.v - direct.v_out).cwiseAbs().maxCoeff() == 0.0);

  // local finiteness audit
  LocalFiniteness on_src = audit_local_finiteness(ws, cov, res.trace, supp_eps(inst, w));
  CHECK(on_src.count >= 1);
  CHECK(on_src.count <= on_src.bound);
  PointSet empty(inst.size(), false);
  CHECK(audit_local_finiteness(ws, cov, res.trace, empty).count == 0);
}

TEST_CASE("gluing rejects sources outside the covering") {
  Instance inst = slab(20, 6, 1.6);
  Workspace ws = make_workspace(inst);
  JetSpace vary = build_space_full(ws.inst, Mat());
  Covering cov = build_covering(ws, slab_params(), vary);
  Index top_point = -1;
  for (Index i = 0; i < inst.size(); ++i)
    if (cov.F_top[i]) top_point = i;
  REQUIRE(top_point >= 0);
  CHECK_THROWS_WITH_AS((void)glue_global(ws, cov, point_source(inst, top_point, 1), 4, 1e-12),
                       doctest::Contains("not supported in the union"), CvpError);
}

#include <doctest.h>

#include <random>

#include "cvp/green.hpp"

using namespace cvp;

namespace {

struct GreenRig {
  Workspace ws;
  JetSpace vary;
  Covering fut, past;
  GreensSystem gs;
};

// Small 1+1D slab with matching future- and past-directed coverings.
const GreenRig& rig() {
  static GreenRig* r = [] {
    LatticeSpec spec;
    spec.dim = 2;
    spec.extent = {16, 3};
    spec.spacing = 1.0;
    spec.kernel = {KernelSpec::Kind::IsoBump, 1.4, 1.0, 1.0};
    spec.periodic_axes = {false, true};
    Instance inst = generate_lattice(spec);
    auto* out = new GreenRig{make_workspace(inst), {}, {}, {}, {}};
    out->vary = build_space_full(out->ws.inst, Mat());
    CoveringParams p;
    p.t_start = -0.75;
    p.stride = 8.0;
    p.height = 10.0;
    p.delta = 0.8;
    p.grid_n = 15;
    p.top_pad = 0.25;
    p.lens.hyp_mode = HypMode::Report;
    p.lens.hyp_trials = 2;
    out->fut = build_covering(out->ws, p, out->vary);
    CoveringParams q = p;
    q.time_sign = -1.0;
    q.t_start = -15.75;  // mirrored time runs over [-15, 0]
    out->past = build_covering(out->ws, q, out->vary);
    out->gs = assemble_greens(out->ws, out->fut, out->past);
    return out;
  }();
  return *r;
}

}  // namespace

TEST_CASE("greens assembly: admissible domain and columns") {
  const GreenRig& g = rig();
  const Instance& inst = g.ws.inst;
  CHECK(!set_empty(g.gs.admissible));
  // every admissible point sits at least a kernel range inside both margins
  for (Index i = 0; i < inst.size(); ++i)
    if (g.gs.admissible[i]) {
      CHECK(inst.time(i) >= inst.kernel.range);
      CHECK(15.0 - inst.time(i) >= inst.kernel.range);
    }
  // G = S_adv - S_ret by construction, and inadmissible columns stay zero
  CHECK((g.gs.G - (g.gs.S_adv - g.gs.S_ret)).cwiseAbs().maxCoeff() == 0.0);
  for (Index c = 0; c < inst.coeff_count(); ++c)
    if (!g.gs.col_ok[c]) CHECK(g.gs.S_ret.col(c).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("retarded and advanced supports are causally separated") {
  // The distinguished local solution fills its lens window, so a retarded
  // column reaches below its source at most to the window bottom of the
  // lens whose W band holds the source; mirrored for advanced columns.
  const GreenRig& g = rig();
  const Instance& inst = g.ws.inst;
  Index src = -1;
  for (Index i = 0; i < inst.size(); ++i)
    if (g.gs.admissible[i] && inst.time(i) == 9.0) src = i;
  REQUIRE(src >= 0);
  double ret_floor = -1e300, adv_ceil = 1e300;
  for (const auto& lens : g.fut.lenses)
    if (lens.Wset[src]) ret_floor = lens.fol.t_min - lens.fol.delta;
  for (const auto& lens : g.past.lenses)
    if (lens.Wset[src]) adv_ceil = -(lens.fol.t_min - lens.fol.delta);
  CHECK(ret_floor > 0.0);  // the bound is nontrivial for this source
  for (int c = 0; c < 3; ++c) {
    const Index col = src * 3 + c;
    REQUIRE(g.gs.col_ok[col]);
    PointSet sret = supp_eps(inst, Vec(g.gs.S_ret.col(col)));
    PointSet sadv = supp_eps(inst, Vec(g.gs.S_adv.col(col)));
    CHECK(!set_empty(sret));
    CHECK(!set_empty(sadv));
    for (Index i = 0; i < inst.size(); ++i) {
      if (sret[i]) CHECK(inst.time(i) >= ret_floor);
      if (sadv[i]) CHECK(inst.time(i) <= adv_ceil);
    }
  }
}

TEST_CASE("G maps to global homogeneous weak solutions") {
  const GreenRig& g = rig();
  const Instance& inst = g.ws.inst;
  // test jets valid for both coverings and vanishing on both residual
  // parking bands (pointwise pairing needs no compact-range dilation here)
  JetSpace test = g.fut.Jprime;
  {
    Mat rows = Mat::Identity(inst.coeff_count(), inst.coeff_count());
    if (g.past.Jprime.dim() > 0)
      rows -= g.past.Jprime.basis * g.past.Jprime.basis.transpose();
    PointSet banned = set_or(g.fut.F_top, g.past.F_top);
    Mat sel = Mat::Zero(inst.coeff_count(), inst.coeff_count());
    for (Index i = 0; i < inst.size(); ++i)
      if (banned[i])
        for (int c = 0; c < 3; ++c) sel(i * 3 + c, i * 3 + c) = 1.0;
    Mat stacked(2 * inst.coeff_count(), inst.coeff_count());
    stacked.topRows(inst.coeff_count()) = rows;
    stacked.bottomRows(inst.coeff_count()) = sel;
    JetSpace both;
    both.mask = test.mask;
    both.basis = test.basis * nullspace(stacked * test.basis, test.dim());
    test = both;
  }
  REQUIRE(test.dim() > 0);
  Vec wc = coeff_weight(inst, Vec::Ones(inst.size()));
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 5; ++rep) {
    // random admissible source
    std::vector<Index> ok;
    for (Index c = 0; c < inst.coeff_count(); ++c)
      if (g.gs.col_ok[c]) ok.push_back(c);
    Vec w = Vec::Zero(inst.coeff_count());
    for (int k = 0; k < 6; ++k) w[ok[rng() % ok.size()]] += 1.0;
    Vec gw = g.gs.G * w;
    const double wnorm = l2_norm(inst, w, Vec::Ones(inst.size()));
    for (Index c = 0; c < test.dim(); ++c) {
      Vec u = test.basis.col(c);
      CHECK(std::abs((g.ws.delta.D * u).dot(wc.cwiseProduct(gw))) <= 1e-6 * wnorm);
    }
  }
}

TEST_CASE("sign audit: Delta S w = -w on the extracted dual space") {
  const GreenRig& g = rig();
  SequenceSpaces sp = extract_sequence_spaces(g.ws, g.gs, g.vary);
  const Mat& Q1 = sp.J0_dual.basis;
  if (Q1.cols() > 0) {
    Mat r1 = g.ws.delta.D * (g.gs.S_ret * Q1) + Q1;
    Mat r2 = g.ws.delta.D * (g.gs.S_adv * Q1) + Q1;
    CHECK(r1.cwiseAbs().maxCoeff() <= 1e-8);
    CHECK(r2.cwiseAbs().maxCoeff() <= 1e-8);
  }
  // zero jet belongs to every space
  CHECK(sp.J0_testlike.membership_residual(Vec::Zero(g.ws.inst.coeff_count())) == 0.0);
  CHECK(sp.J0_dual.membership_residual(Vec::Zero(g.ws.inst.coeff_count())) == 0.0);

  // a random jet generically fails the defining identities
  std::mt19937_64 rng(8);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec rnd(g.ws.inst.coeff_count());
  for (Index c = 0; c < rnd.size(); ++c) rnd[c] = gauss(rng);
  Vec resid = g.ws.delta.D * (g.gs.S_ret * rnd) + rnd;
  CHECK(resid.norm() > 1e-4 * rnd.norm());
}

TEST_CASE("membership transfer: Delta maps J0** into J0*") {
  const GreenRig& g = rig();
  SequenceSpaces sp = extract_sequence_spaces(g.ws, g.gs, g.vary);
  const Mat& Q0 = sp.J0_testlike.basis;
  for (Index c = 0; c < Q0.cols(); ++c) {
    Vec du = g.ws.delta.D * Q0.col(c);
    CHECK(sp.J0_dual.membership_residual(du) <= 1e-6 * du.norm());
  }
}

TEST_CASE("nine exactness checks pass or are flagged vacuous") {
  const GreenRig& g = rig();
  SequenceSpaces sp = extract_sequence_spaces(g.ws, g.gs, g.vary);
  auto checks = verify_exact_sequence(g.ws, g.gs, sp, 1e-8);
  REQUIRE(checks.size() == 9);
  int vacuous = 0;
  for (const auto& chk : checks) {
    INFO(chk.name << " residual " << chk.residual << " vacuous " << chk.vacuous);
    CHECK(chk.pass);
    vacuous += chk.vacuous;
  }
  MESSAGE("vacuous checks: " << vacuous << " of 9");
}

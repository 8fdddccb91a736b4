#ifndef CVP_COVERING_HPP
#define CVP_COVERING_HPP

#include "cvp/lens.hpp"

namespace cvp {

struct CoveringParams {
  double t_start = 0.0;   // t_min of the first lens
  double stride = 1.0;    // t_min increment between lenses
  double height = 2.0;    // lens t_max - t_min (clipped at the top)
  double delta = 0.5;
  int grid_n = 9;
  double top_pad = 0.25;  // lens t_max may exceed the last slice by this
  double time_sign = 1.0;
  int max_lenses = 64;
  LensOptions lens;
};

struct Covering {
  CoveringParams params;
  std::vector<LensRegion> lenses;
  std::vector<std::vector<int>> future_edges;  // l -> l' iff W_{l'} meets Z_l
  PointSet F_top;    // future-infinity band excluded from testing
  double t_F = 0.0;  // F_top = { tau > t_F }
  JetSpace Jprime;   // intersection of the J'_L, for the global weak equation
  JetSpace Jprime_away;  // further restricted to jets vanishing on K(F_top)

  bool strongly_causal = true;
  std::pair<int, int> causality_witness{-1, -1};
};

// Tile a slab with translated lens templates and certify the covering and
// strong-causality invariants. Throws on a covering gap or a violation.
Covering build_covering(const Workspace& ws, const CoveringParams& params, const JetSpace& vary);

struct GluePiece {
  int iteration = 0;
  int lens = 0;
  double piece_norm = 0.0;
  double solve_residual = 0.0;
  PointSet v_support;
};

struct GlueTrace {
  std::vector<GluePiece> pieces;
  std::vector<double> residual_norm;   // per iteration (incoming residual)
  std::vector<double> residual_min_time;
  int iterations = 0;
  bool finished_in_ftop = false;
  double final_residual = 0.0;  // global weak residual over Jprime_away
};

struct GlueResult {
  Vec v;
  GlueTrace trace;
};

GlueResult glue_global(const Workspace& ws, const Covering& cov, const Vec& w, int max_iter,
                       double tol, bool final_check = true);

// Number of glue pieces whose solution support meets K, with the
// strong-causality bound (count of W's meeting the K-thickened set).
struct LocalFiniteness {
  int count = 0;
  int bound = 0;
};

LocalFiniteness audit_local_finiteness(const Workspace& ws, const Covering& cov,
                                       const GlueTrace& trace, const PointSet& K);

}  // namespace cvp

#endif

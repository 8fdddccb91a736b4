#ifndef CVP_LENS_HPP
#define CVP_LENS_HPP

#include "cvp/surface.hpp"

namespace cvp {

// Shared per-instance assemblies, built once and reused by lens solves,
// gluing and Green's operators.
struct Workspace {
  Instance inst;
  PairTable pairs;
  LinOp delta;
  Delta2Form d2;
};

Workspace make_workspace(const Instance& inst);

enum class HypMode { Enforce, Report };

struct LensOptions {
  HypMode hyp_mode = HypMode::Enforce;
  int hyp_trials = 16;
  uint64_t seed = 42;
  double unknown_cut = 1e-12;  // drop unknowns with window weight below this
};

// A lens-shaped region with its boundary-adapted jet spaces and a cached
// least-squares factorization of the weak Cauchy system.
struct LensRegion {
  Foliation fol;
  PointSet Lset, Wset, Zset;
  Vec eta_top, eta_bot, eta_window;  // per point; eta_window = eta_tmax - eta_tmin
  JetSpace vary;
  JetSpace Jbar;    // vanishing in the future of t_max, forms orthogonal at t_max
  JetSpace Junder;  // vanishing in the past of t_min
  JetSpace Jprime;  // {u in vary0 : eta_tmax u in Jbar}
  std::vector<HypReport> hyp;  // per grid t
  bool hyp_all_pass = true;
  bool attainment_ok = true;

  // minimal-norm solver cache for <Delta u, .>_{L2(L)} = <u, .>_{L2(L)}
  std::vector<Index> unknowns;  // coefficient indices
  Vec unknown_scale;            // sqrt of window-weighted coefficient mass
  Mat svd_u, svd_v;
  Vec svd_s;
  double svd_cut = 0.0;
};

LensRegion build_lens(const Workspace& ws, const PointSet& U, const Foliation& fol,
                      const JetSpace& vary, const LensOptions& opt = {});

struct WeakSolution {
  Vec v;             // supported where the window weight is positive
  double gamma = 0.0;  // |v|_{L2(L)} / |w|_{L2(L)}
  double residual = 0.0;
  double rhs_norm = 0.0;
};

// Distinguished (minimal-norm) weak solution for an inhomogeneity supported
// in W. Throws if w leaks outside W or the system is inconsistent beyond
// tolerance.
WeakSolution solve_weak(const Workspace& ws, const LensRegion& lens, const Vec& w);

struct GlueStep {
  Vec v_out;    // eta_tmax * (eta_window * v), extended by zero
  Vec w_tilde;  // commutator inhomogeneity, supported in Z
  WeakSolution local;
  double weak_ll_residual = 0.0;  // relative, on the J'_L basis
};

GlueStep glue_step(const Workspace& ws, const LensRegion& lens, const Vec& w,
                   bool check_postconditions = true);

// Commutator jet [Delta, eta] vt as scalar/vector fields:
//   f(x) = sum_y rho_y (eta(y)-eta(x)) nabla_{2,vt} L(x,y)
//   g(x) = sum_y rho_y (eta(y)-eta(x)) d1[nabla_{2,vt} L(x,y)]
Vec commutator_inhomogeneity(const Workspace& ws, const Vec& eta, const Vec& vt);

}  // namespace cvp

#endif

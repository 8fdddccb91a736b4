#ifndef CVP_SURFACE_HPP
#define CVP_SURFACE_HPP

#include "cvp/foliation.hpp"
#include "cvp/linfield.hpp"

namespace cvp {

// Surface-layer forms as full matrices over jet coefficients:
//   sigma    antisymmetric (symplectic form)
//   product  symmetric (surface layer inner product), block diagonal per point
struct FormPair {
  Mat sigma;
  Mat product;
};

// Sharp forms over Omega x (M \ Omega).
FormPair sharp_forms(const Instance& inst, const PointSet& Omega);

// Softened forms with weights eta_t(x) (1 - eta_t(y)) over U x U.
FormPair soft_forms(const Instance& inst, const Foliation& fol, double t);

struct EnergyCheck {
  double lhs = 0.0;  // central finite difference of (v,v)^t in t
  double rhs = 0.0;  // 2 int <v,Dv> drho_t - 2 int Delta2 drho_t + s int b^2 drho_t
  double gap = 0.0;
};

EnergyCheck energy_identity_check(const Instance& inst, const Foliation& fol, const Vec& v,
                                  double t, double h, const LinOp& op, const Delta2Form& d2);
EnergyCheck energy_identity_check(const Instance& inst, const Foliation& fol, const Vec& v,
                                  double t, double h);

// Hyperbolicity condition verifier at one time parameter:
//   (v,v)^t >= (1/C^2) sum_U (|v(x)|^2 + |Delta2[v,v](x)|) theta_t rho
// over the vary space. Hybrid: a certified eigenvalue lower bound for the
// quadratic relaxation plus seeded multistart projected-gradient
// minimization of the ratio. Reports the best constant or a witness.
struct HypReport {
  bool pass = false;
  bool degenerate_rhs = false;  // rho_t vanishes on the vary space
  double best_ratio = 0.0;      // min sampled (v,v)^t / RHS
  double cert_ratio = 0.0;      // certified lower bound, valid if certified
  bool certified = false;
  double C = 0.0;               // 1/sqrt(best_ratio) when pass
  Vec witness;                  // filled when !pass
  double witness_lhs = 0.0;
  double witness_rhs = 0.0;
};

HypReport verify_hyperbolicity(const Instance& inst, const Foliation& fol, double t, int trials,
                               const JetSpace& vary, const Delta2Form& d2, uint64_t seed = 42);

}  // namespace cvp

#endif

#ifndef CVP_ACTION_HPP
#define CVP_ACTION_HPP

#include "cvp/jets.hpp"

namespace cvp {

// S = sum_ij rho_i rho_j L(x_i, x_j)
double eval_action(const Instance& inst);

struct ElReport {
  Vec ell;                        // l(x_i) = sum_j L(x_i,x_j) rho_j - s
  Mat grad_ell;                   // N x m, Dl(x_i)
  double max_abs_ell = 0.0;
  double max_grad_norm_on_test = 0.0;  // filled by check_restricted_el
};

ElReport eval_ell(const Instance& inst);

// Test space per the restricted EL equations: scalar components everywhere;
// vector directions at x_i admitted only where |<e_a, Dl(x_i)>| <= dir_tol
// (on symmetric instances all directions survive).
JetSpace make_test_space(const Instance& inst, const ElReport& rep, double dir_tol);

struct ElCheck {
  bool pass = false;
  double worst = 0.0;   // max over basis jets and points of |a l + <u, Dl>|
  Index worst_point = -1;
};

ElCheck check_restricted_el(const Instance& inst, const JetSpace& test, double tol);

// Solves K rho = s 1 for positive weights (nonnegativity-projected Jacobi
// refinement on top of a direct solve). Throws on singular kernel matrix or
// nonpositive weights at convergence.
Instance solve_critical_weights(const Instance& inst);

// Push-forward variation oracle (finite differences along the family
// x_i + tau v_i, rho_i (1 + tau b_i)): returns per point the 4-point central
// difference of (d/dtau)[l_tau(x_i + tau v_i); Dl_tau(x_i + tau v_i)],
// flattened like a jet. On critical instances this equals the pointwise jet
// (Delta v)(x_i).
Vec variation_fd_oracle(const Instance& inst, const Vec& v, double h);

}  // namespace cvp

#endif

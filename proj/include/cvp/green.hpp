#ifndef CVP_GREEN_HPP
#define CVP_GREEN_HPP

#include "cvp/covering.hpp"

namespace cvp {

// Retarded/advanced Green's operators assembled column-by-column from glued
// distinguished solutions (sign convention w -> -v), and the causal
// fundamental solution G = S_adv - S_ret.
struct GreensSystem {
  PointSet admissible;          // admissible source points
  std::vector<bool> col_ok;     // per coefficient column
  Mat S_ret, S_adv, G;          // coeff x coeff, zero columns where !col_ok
  int glue_max_iter = 32;
  double glue_tol = 1e-12;
};

GreensSystem assemble_greens(const Workspace& ws, const Covering& cov_future,
                             const Covering& cov_past);

// The four jet spaces of the exact sequence, extracted by identity testing
// over the admissible domain (threshold 1e-8 relative).
struct SequenceSpaces {
  JetSpace J0_testlike;  // u with S_adv Delta u = S_ret Delta u = -u
  JetSpace J0_dual;      // w with Delta S w = -w both ways, S w in vary
  JetSpace J_sc;         // S_ret u1 + S_adv u2 with the inverting property
  JetSpace J_sc_dual;    // u1 + u2 likewise
  bool core_domain_empty = false;
};

SequenceSpaces extract_sequence_spaces(const Workspace& ws, const GreensSystem& gs,
                                       const JetSpace& vary, double threshold = 1e-8);

struct SequenceCheck {
  std::string name;
  bool pass = false;
  bool vacuous = false;
  double residual = 0.0;
  Vec witness;
};

// The nine numeric checks of the exactness proof.
std::vector<SequenceCheck> verify_exact_sequence(const Workspace& ws, const GreensSystem& gs,
                                                 const SequenceSpaces& sp, double tol);

}  // namespace cvp

#endif

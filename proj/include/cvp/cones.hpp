#ifndef CVP_CONES_HPP
#define CVP_CONES_HPP

#include "cvp/green.hpp"

namespace cvp {

struct CausalRelation {
  enum class Kind { HatR, R };
  Kind kind = Kind::HatR;
  Index n = 0;
  std::vector<std::vector<bool>> pairs;  // pairs[x][y]

  bool at(Index x, Index y) const { return pairs[x][y]; }
  std::size_t edge_count() const {
    std::size_t c = 0;
    for (const auto& row : pairs)
      for (bool b : row) c += b;
    return c;
  }
};

// J_vee(V): union over the basis inhomogeneities supported in V of the
// numerical supports of the retarded solutions.
PointSet causal_future(const Workspace& ws, const GreensSystem& gs, const PointSet& V);

// hatR: (x,y) iff y lies in the causal future of the canonical lattice-scale
// neighborhood of x. Rows are built only where every neighborhood point has
// admissible Green columns; others stay empty (reported vacuous).
struct HatRResult {
  CausalRelation rel;
  std::vector<bool> row_built;  // per point x
};

HatRResult build_hatR(const Workspace& ws, const GreensSystem& gs, double r_nb);

// Smallest transitive superset, by repeated boolean composition to fixpoint.
CausalRelation transitive_closure(const CausalRelation& rel);

bool is_transitive(const CausalRelation& rel);

PointSet future_set(const CausalRelation& rel, Index x);

}  // namespace cvp

#endif

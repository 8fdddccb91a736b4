#ifndef CVP_LINFIELD_HPP
#define CVP_LINFIELD_HPP

#include "cvp/action.hpp"

namespace cvp {

// Linearized field operator in the jet coefficient basis. D maps jet
// coefficients of v to the pointwise jets (Delta v)(x_i) (identity-metric
// Riesz representation), so that
//   sum_i rho_i <u(x_i), (Delta v)(x_i)> = u^T W D v,
// with W the per-coefficient weight diagonal.
struct LinOp {
  Mat D;

  Vec apply(const Vec& v) const { return D * v; }

  // Pointwise pairing <u, Delta v>(x_i).
  double pair_at(const Instance& inst, const Vec& u, const Vec& v, Index i) const {
    Vec dv = D * v;
    return pointwise_product(inst, u, dv, i);
  }
};

LinOp assemble_delta(const Instance& inst);

// Pointwise quadratic correction Delta_2[.,.](x_i), one symmetric bilinear
// form per point, stored over the local interaction star.
struct Delta2Form {
  struct PointForm {
    std::vector<Index> star;  // points interacting with x_i (x_i first)
    Mat form;                 // symmetric, dim = star.size()*(1+m)
  };
  int jet_width = 0;
  std::vector<PointForm> at;

  double eval(const Vec& v, Index i) const { return eval_bilinear(v, v, i); }
  double eval_bilinear(const Vec& u, const Vec& v, Index i) const;

  // Gradient of v -> Delta_2[v,v](x_i), accumulated into g.
  void add_gradient(const Vec& v, Index i, double scale, Vec& g) const;
};

Delta2Form assemble_delta2(const Instance& inst);

// (Delta v)(x_i) - w(x_i), with coefficients outside the test mask zeroed.
Vec strong_residual(const Instance& inst, const LinOp& op, const Vec& v, const Vec& w,
                    const std::vector<bool>& test_mask);

// max over test basis jets u of |<Delta u, v> - <u, w>|_{L2,weight} normalized
// by (1 + |u| |v|).
double weak_residual(const Instance& inst, const LinOp& op, const Vec& v, const Vec& w,
                     const JetSpace& test, const Vec& weight);

}  // namespace cvp

#endif

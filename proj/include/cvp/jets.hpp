#ifndef CVP_JETS_HPP
#define CVP_JETS_HPP

#include "cvp/instance.hpp"

namespace cvp {

// A jet (a, u) is stored as a flat coefficient vector of length N*(1+m),
// ordered [a_1, u_1^1..u_1^m, a_2, ...].
inline Index jet_scalar_index(const Instance& inst, Index i) { return i * (1 + inst.dim); }
inline Index jet_vector_index(const Instance& inst, Index i, int axis) {
  return i * (1 + inst.dim) + 1 + axis;
}

inline double jet_scalar(const Instance& inst, const Vec& v, Index i) {
  return v[jet_scalar_index(inst, i)];
}
inline Vec jet_vector(const Instance& inst, const Vec& v, Index i) {
  return v.segment(jet_vector_index(inst, i, 0), inst.dim);
}

// Pointwise scalar product <v,w>_x with the identity metric (swappable hook).
double pointwise_product(const Instance& inst, const Vec& v, const Vec& w, Index i);

// Per-point Euclidean norms |v(x_i)|, length N.
Vec jet_point_norms(const Instance& inst, const Vec& v);

// Numerical support {i : |v(x_i)| > eps * max_j |v(x_j)|}.
PointSet supp_eps(const Instance& inst, const Vec& v, double eps = kEpsSupp);

// sum_i weight_i rho_i <v,w>_{x_i}; weight entries in [0,1].
double l2_product(const Instance& inst, const Vec& v, const Vec& w, const Vec& weight);
double l2_norm(const Instance& inst, const Vec& v, const Vec& weight);

// Diagonal of the weighted coefficient inner product, length N(1+m).
Vec coeff_weight(const Instance& inst, const Vec& point_weight);

// A linear subspace of jets, kept as an orthonormal basis (coefficients).
struct JetSpace {
  std::vector<bool> mask;  // admissible coefficients, length N(1+m)
  Mat basis;               // N(1+m) x dim, orthonormal columns

  Index dim() const { return basis.cols(); }
  // Residual of v against the space, |v - P v|.
  double membership_residual(const Vec& v) const {
    if (basis.cols() == 0) return v.norm();
    return (v - basis * (basis.transpose() * v)).norm();
  }
};

// Orthonormal basis of {jets supported on carrier, vector components on the
// masked axes} intersected with ker(constraints).
// vector_mask: per point, bitmask of admitted axes (bit a = axis a).
JetSpace build_space(const Instance& inst, const PointSet& carrier,
                     const std::vector<uint32_t>& vector_mask, const Mat& constraints,
                     bool include_scalar = true);

// Convenience: full space restricted by constraints only.
JetSpace build_space_full(const Instance& inst, const Mat& constraints);

// Orthonormal null-space basis of A (columns span ker A), with the shared
// singular-value threshold.
Mat nullspace(const Mat& A, Index ncols);

// Thin SVD A = U diag(s) V^T. Wide inputs are factored via the transpose
// and non-finite BDCSVD output (a known failure mode on degenerate
// spectra) falls back to the slower Jacobi algorithm.
struct ThinSvd {
  Mat u, v;
  Vec s;
};
ThinSvd thin_svd(const Mat& A);

// Right-singular vectors and singular values (full V).
struct FullVSvd {
  Mat v;
  Vec s;
};
FullVSvd svd_full_v(const Mat& A);

}  // namespace cvp

#endif

#ifndef CVP_INSTANCE_HPP
#define CVP_INSTANCE_HPP

#include "cvp/kernel.hpp"
#include "cvp/types.hpp"

namespace cvp {

// A discrete causal variational principle: weighted points in R^m with a
// compactly supported Lagrangian kernel. Axis 0 is interpreted as time.
struct Instance {
  int dim = 1;
  Mat points;                    // N x dim
  Vec weights;                   // N, strictly positive
  KernelSpec kernel;
  double s_param = 1.0;
  std::vector<double> periodic;  // per-axis period, <= 0 for open axes

  Index size() const { return points.rows(); }
  Index coeff_count() const { return size() * (1 + dim); }

  double time(Index i) const { return points(i, 0); }

  // Minimal-image displacement x_i - x_j.
  Vec displacement(Index i, Index j) const {
    Vec u = points.row(i) - points.row(j);
    wrap(u);
    return u;
  }

  void wrap(Vec& u) const {
    for (int a = 0; a < dim; ++a) {
      const double p = a < static_cast<int>(periodic.size()) ? periodic[a] : 0.0;
      if (p > 0.0) u[a] -= p * std::round(u[a] / p);
    }
  }

  double distance(Index i, Index j) const { return displacement(i, j).norm(); }
};

// Throws CvpError if the instance violates its invariants.
void validate_instance(const Instance& inst);

KernelBlocks eval_kernel(const Instance& inst, Index i, Index j, int order);

// Dense per-pair kernel tables; the building block of every assembly.
// Difference-kernel structure: d2 = -g1, h11 = h22 = hess, h12 = -hess.
struct PairTable {
  Index n = 0;
  int m = 0;
  Mat L;                  // n x n values
  std::vector<Mat> g1;    // m matrices, g1[a](i,j) = (d1 L)_a(x_i, x_j)
  std::vector<Mat> h11;   // m*m matrices, h11[a*m+b](i,j)

  Vec grad1(Index i, Index j) const {
    Vec g(m);
    for (int a = 0; a < m; ++a) g[a] = g1[a](i, j);
    return g;
  }
  Mat hess11(Index i, Index j) const {
    Mat h(m, m);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) h(a, b) = h11[a * m + b](i, j);
    return h;
  }
};

PairTable build_pair_table(const Instance& inst, int order = 2);

// K(K): all points within wrapped distance range + range/10 of the set K.
PointSet compact_range_map(const Instance& inst, const PointSet& K);

struct LatticeSpec {
  int dim = 2;
  std::vector<int> extent;        // points per axis
  double spacing = 1.0;
  KernelSpec kernel;
  std::vector<bool> periodic_axes;
  double s_param = 0.0;           // <= 0: use median kernel row sum
};

Instance generate_lattice(const LatticeSpec& spec);

}  // namespace cvp

#endif

#include "cvp/instance.hpp"

#include <algorithm>
#include <cmath>

#include "cvp/parallel.hpp"

namespace cvp {

void validate_instance(const Instance& inst) {
  const Index n = inst.size();
  if (n < 1) throw CvpError("instance: N >= 1 required");
  if (inst.dim < 1) throw CvpError("instance: dim >= 1 required");
  if (inst.points.cols() != inst.dim) throw CvpError("instance: point dimension mismatch");
  if (inst.weights.size() != n) throw CvpError("instance: weight count mismatch");
  if (!inst.points.allFinite()) throw CvpError("instance: non-finite coordinates");
  for (Index i = 0; i < n; ++i)
    if (!(inst.weights[i] > 0.0)) throw CvpError("instance: weights must be strictly positive");
  if (!(inst.kernel.range > 0.0) || !(inst.kernel.amplitude > 0.0))
    throw CvpError("instance: kernel range and amplitude must be positive");
  if (inst.kernel.kind == KernelSpec::Kind::LightconeBump && !(inst.kernel.cone_slope > 0.0))
    throw CvpError("instance: cone_slope must be positive");
  if (!(inst.s_param > 0.0)) throw CvpError("instance: s_param must be positive");
  for (int a = 0; a < inst.dim; ++a) {
    const double p = a < static_cast<int>(inst.periodic.size()) ? inst.periodic[a] : 0.0;
    if (p > 0.0 && p <= 2.0 * inst.kernel.range)
      throw CvpError("instance: period <= 2*range on axis " + std::to_string(a) +
                     " (kernel would self-overlap)");
  }
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      if (inst.distance(i, j) == 0.0) throw CvpError("instance: points must be distinct");
  KernelDiff diag = kernel_diff(inst.kernel, Vec::Zero(inst.dim), 0);
  if (!(diag.value > 0.0)) throw CvpError("instance: L(x,x) must be positive");
}

KernelBlocks eval_kernel(const Instance& inst, Index i, Index j, int order) {
  const Index n = inst.size();
  if (i < 0 || i >= n || j < 0 || j >= n) throw CvpError("eval_kernel: index out of range");
  return kernel_blocks(inst.kernel, inst.displacement(i, j), order);
}

PairTable build_pair_table(const Instance& inst, int order) {
  const Index n = inst.size();
  const int m = inst.dim;
  PairTable t;
  t.n = n;
  t.m = m;
  t.L = Mat::Zero(n, n);
  if (order >= 1) t.g1.assign(m, Mat::Zero(n, n));
  if (order >= 2) t.h11.assign(m * m, Mat::Zero(n, n));
  parallel_for(n, [&](long i) {
    for (Index j = 0; j < n; ++j) {
      KernelDiff d = kernel_diff(inst.kernel, inst.displacement(i, j), order);
      t.L(i, j) = d.value;
      if (order >= 1)
        for (int a = 0; a < m; ++a) t.g1[a](i, j) = d.grad[a];
      if (order >= 2)
        for (int a = 0; a < m; ++a)
          for (int b = 0; b < m; ++b) t.h11[a * m + b](i, j) = d.hess(a, b);
    }
  });
  return t;
}

PointSet compact_range_map(const Instance& inst, const PointSet& K) {
  const Index n = inst.size();
  if (static_cast<Index>(K.size()) != n) throw CvpError("compact_range_map: set size mismatch");
  const double reach = inst.kernel.range * 1.1;  // r + r/10
  PointSet out(n, false);
  std::vector<Index> members;
  for (Index i = 0; i < n; ++i)
    if (K[i]) members.push_back(i);
  if (members.empty()) return out;
  parallel_for(n, [&](long j) {
    for (Index i : members) {
      if (inst.distance(j, i) < reach) {
        out[j] = true;
        break;
      }
    }
  });
  return out;
}

Instance generate_lattice(const LatticeSpec& spec) {
  const int m = spec.dim;
  if (m < 1) throw CvpError("generate_lattice: dim >= 1 required");
  if (static_cast<int>(spec.extent.size()) != m) throw CvpError("generate_lattice: extent per axis required");
  if (!(spec.spacing > 0.0)) throw CvpError("generate_lattice: spacing must be positive");

  Index n = 1;
  for (int a = 0; a < m; ++a) {
    if (spec.extent[a] < 1) throw CvpError("generate_lattice: extent >= 1 required");
    n *= spec.extent[a];
  }
  Instance inst;
  inst.dim = m;
  inst.kernel = spec.kernel;
  inst.periodic.assign(m, 0.0);
  for (int a = 0; a < m; ++a) {
    const bool per = a < static_cast<int>(spec.periodic_axes.size()) && spec.periodic_axes[a];
    if (per) {
      if (spec.extent[a] < 3) throw CvpError("generate_lattice: periodic axes need extent >= 3");
      const double period = spec.extent[a] * spec.spacing;
      if (period <= 2.0 * spec.kernel.range)
        throw CvpError("generate_lattice: period <= 2*range on periodic axis " + std::to_string(a));
      inst.periodic[a] = period;
    }
  }
  inst.points = Mat::Zero(n, m);
  std::vector<int> idx(m, 0);
  for (Index p = 0; p < n; ++p) {
    for (int a = 0; a < m; ++a) inst.points(p, a) = idx[a] * spec.spacing;
    for (int a = m - 1; a >= 0; --a) {
      if (++idx[a] < spec.extent[a]) break;
      idx[a] = 0;
    }
  }
  inst.weights = Vec::Ones(n);

  if (spec.s_param > 0.0) {
    inst.s_param = spec.s_param;
  } else {
    // Median kernel row sum: exact criticality scale on homogeneous lattices.
    Mat L = build_pair_table(inst, 0).L;
    std::vector<double> sums(n);
    for (Index i = 0; i < n; ++i) sums[i] = L.row(i).sum();
    std::nth_element(sums.begin(), sums.begin() + n / 2, sums.end());
    inst.s_param = sums[n / 2];
  }
  validate_instance(inst);
  return inst;
}

}  // namespace cvp

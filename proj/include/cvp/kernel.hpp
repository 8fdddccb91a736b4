#ifndef CVP_KERNEL_HPP
#define CVP_KERNEL_HPP

#include "cvp/types.hpp"

namespace cvp {

// Compactly supported Lagrangian kernels. Both are smooth functions of the
// (wrapped) displacement u = x - y, so the second-argument derivative blocks
// follow from the displacement derivatives: d2 = -d1, h22 = h11, h12 = -h11.
struct KernelSpec {
  enum class Kind { IsoBump, LightconeBump };
  Kind kind = Kind::IsoBump;
  double range = 1.0;      // Euclidean support radius r
  double amplitude = 1.0;  // c
  double cone_slope = 1.0; // kappa, lightcone_bump only

  static constexpr double diag_bump_fraction = 0.01;  // lightcone diagonal bump radius, as a fraction of range
};

// Value and derivatives with respect to the displacement u.
struct KernelDiff {
  double value = 0.0;
  Vec grad;   // dL/du, size m (order >= 1)
  Mat hess;   // d2L/du2, m x m (order == 2)
};

KernelDiff kernel_diff(const KernelSpec& k, const Vec& u, int order);

// Full derivative blocks of L(x,y) as used by the jet calculus.
struct KernelBlocks {
  double value = 0.0;
  Vec d1, d2;        // first-argument / second-argument gradients
  Mat d11, d12, d22; // second-derivative blocks
};

KernelBlocks kernel_blocks(const KernelSpec& k, const Vec& u, int order);

const char* kernel_kind_name(KernelSpec::Kind kind);
KernelSpec::Kind kernel_kind_from_name(const std::string& name);

}  // namespace cvp

#endif

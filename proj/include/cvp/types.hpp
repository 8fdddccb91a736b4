#ifndef CVP_TYPES_HPP
#define CVP_TYPES_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace cvp {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Index = Eigen::Index;
using PointSet = std::vector<bool>;  // indexed by point, size N

// Shared numerical thresholds (one definition across modules).
inline constexpr double kEpsEta = 1e-9;    // cutoff-value set membership
inline constexpr double kEpsSupp = 1e-9;   // relative support threshold
inline constexpr double kSvdRelCut = 1e-10;  // rank decisions

struct CvpError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::size_t set_count(const PointSet& s) {
  std::size_t n = 0;
  for (bool b : s) n += b;
  return n;
}

inline bool set_empty(const PointSet& s) { return set_count(s) == 0; }

inline PointSet set_and(const PointSet& a, const PointSet& b) {
  PointSet r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] && b[i];
  return r;
}

inline PointSet set_or(const PointSet& a, const PointSet& b) {
  PointSet r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] || b[i];
  return r;
}

inline PointSet set_not(const PointSet& a) {
  PointSet r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = !a[i];
  return r;
}

inline bool set_subset(const PointSet& a, const PointSet& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] && !b[i]) return false;
  return true;
}

}  // namespace cvp

#endif

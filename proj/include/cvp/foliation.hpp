#ifndef CVP_FOLIATION_HPP
#define CVP_FOLIATION_HPP

#include "cvp/instance.hpp"

namespace cvp {

// C^2 smoothstep: 0 for z <= 0, 6z^5-15z^4+10z^3 on (0,1), 1 for z >= 1.
double smoothstep(double z);
double smoothstep_deriv(double z);

// Time-coordinate foliation eta_t(x) = s((t - tau(x))/delta) inside U.
// time_sign = -1 mirrors time (used for past-directed constructions).
struct Foliation {
  PointSet U;
  double t_min = 0.0;
  double t_max = 1.0;
  int grid_n = 9;
  double delta = 0.5;
  double time_sign = 1.0;

  double tau(const Instance& inst, Index i) const { return time_sign * inst.time(i); }
  double eta(const Instance& inst, double t, Index i) const {
    return smoothstep((t - tau(inst, i)) / delta);
  }
  double theta(const Instance& inst, double t, Index i) const {
    return smoothstep_deriv((t - tau(inst, i)) / delta) / delta;
  }
  Vec eta_all(const Instance& inst, double t) const;
  Vec theta_all(const Instance& inst, double t) const;
  std::vector<double> grid() const;
};

Foliation make_foliation(const Instance& inst, double t_min, double t_max, double delta,
                         int grid_n, double time_sign = 1.0);

struct FoliationReport {
  bool monotone = true;          // by construction; re-checked on the grid
  bool theta_nonneg = true;
  std::vector<double> grid;
  std::vector<bool> attains_zero;   // per grid t: min eta on U <= eps
  std::vector<bool> attains_one;    // per grid t: max eta on U >= 1 - eps
  bool fully_attaining = true;
};

FoliationReport check_foliation(const Instance& inst, const Foliation& fol);

}  // namespace cvp

#endif

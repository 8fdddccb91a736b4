#include "cvp/foliation.hpp"

namespace cvp {

double smoothstep(double z) {
  if (z <= 0.0) return 0.0;
  if (z >= 1.0) return 1.0;
  return ((6.0 * z - 15.0) * z + 10.0) * z * z * z;
}

double smoothstep_deriv(double z) {
  if (z <= 0.0 || z >= 1.0) return 0.0;
  return ((30.0 * z - 60.0) * z + 30.0) * z * z;
}

Vec Foliation::eta_all(const Instance& inst, double t) const {
  Vec e(inst.size());
  for (Index i = 0; i < inst.size(); ++i) e[i] = U[i] ? eta(inst, t, i) : 0.0;
  return e;
}

Vec Foliation::theta_all(const Instance& inst, double t) const {
  Vec th(inst.size());
  for (Index i = 0; i < inst.size(); ++i) th[i] = U[i] ? theta(inst, t, i) : 0.0;
  return th;
}

std::vector<double> Foliation::grid() const {
  std::vector<double> g;
  if (grid_n <= 1) {
    g.push_back(t_min);
    return g;
  }
  for (int k = 0; k < grid_n; ++k)
    g.push_back(t_min + (t_max - t_min) * k / (grid_n - 1));
  return g;
}

Foliation make_foliation(const Instance& inst, double t_min, double t_max, double delta,
                         int grid_n, double time_sign) {
  if (!(delta > 0.0)) throw CvpError("foliation: delta must be positive");
  if (!(t_max >= t_min)) throw CvpError("foliation: t_max >= t_min required");
  Foliation fol;
  fol.U.assign(inst.size(), true);
  fol.t_min = t_min;
  fol.t_max = t_max;
  fol.delta = delta;
  fol.grid_n = grid_n;
  fol.time_sign = time_sign;
  return fol;
}

FoliationReport check_foliation(const Instance& inst, const Foliation& fol) {
  FoliationReport rep;
  rep.grid = fol.grid();
  Vec prev;
  for (double t : rep.grid) {
    double lo = 1.0, hi = 0.0;
    Vec e = fol.eta_all(inst, t);
    Vec th = fol.theta_all(inst, t);
    for (Index i = 0; i < inst.size(); ++i) {
      if (!fol.U[i]) continue;
      lo = std::min(lo, e[i]);
      hi = std::max(hi, e[i]);
      if (th[i] < 0.0) rep.theta_nonneg = false;
      if (prev.size() && e[i] < prev[i] - 1e-15) rep.monotone = false;
    }
    rep.attains_zero.push_back(lo <= kEpsEta);
    rep.attains_one.push_back(hi >= 1.0 - kEpsEta);
    if (!rep.attains_zero.back() || !rep.attains_one.back()) rep.fully_attaining = false;
    prev = e;
  }
  return rep;
}

}  // namespace cvp

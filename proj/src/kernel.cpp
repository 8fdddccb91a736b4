#include "cvp/kernel.hpp"

#include <cmath>

namespace cvp {

namespace {

// c * max(0, 1 - |u|^2/r^2)^2 and displacement derivatives.
// The zero branch (including all derivatives) applies for |u| >= r.
void add_bump(double c, double r, const Vec& u, int order, KernelDiff& out) {
  const double r2 = r * r;
  const double s = u.squaredNorm() / r2;
  const double t = 1.0 - s;
  if (t <= 0.0) return;
  out.value += c * t * t;
  if (order >= 1) out.grad += (-4.0 * c * t / r2) * u;
  if (order >= 2) {
    const int m = static_cast<int>(u.size());
    out.hess += (-4.0 * c / r2) * (t * Mat::Identity(m, m) - (2.0 / r2) * (u * u.transpose()));
  }
}

// c * max(0, q)^2 * max(0, 1 - |u|^2/r^2)^2 with q = u_0^2 - kappa^2 |u_s|^2.
void add_cone_bump(double c, double r, double kappa, const Vec& u, int order, KernelDiff& out) {
  const int m = static_cast<int>(u.size());
  const double r2 = r * r;
  const double s = u.squaredNorm() / r2;
  const double t = 1.0 - s;
  if (t <= 0.0) return;
  const double k2 = kappa * kappa;
  double q = u[0] * u[0];
  for (int a = 1; a < m; ++a) q -= k2 * u[a] * u[a];
  if (q <= 0.0) return;

  const double F = q * q;
  const double G = t * t;
  out.value += c * F * G;
  if (order == 0) return;

  Vec gq = Vec::Zero(m);
  gq[0] = 2.0 * u[0];
  for (int a = 1; a < m; ++a) gq[a] = -2.0 * k2 * u[a];
  const Vec gF = 2.0 * q * gq;
  const Vec gG = (-4.0 * t / r2) * u;
  out.grad += c * (G * gF + F * gG);
  if (order >= 2) {
    Mat Hq = Mat::Zero(m, m);
    Hq(0, 0) = 2.0;
    for (int a = 1; a < m; ++a) Hq(a, a) = -2.0 * k2;
    const Mat HF = 2.0 * (gq * gq.transpose() + q * Hq);
    const Mat HG = (-4.0 / r2) * (t * Mat::Identity(m, m) - (2.0 / r2) * (u * u.transpose()));
    out.hess += c * (G * HF + gF * gG.transpose() + gG * gF.transpose() + F * HG);
  }
}

}  // namespace

KernelDiff kernel_diff(const KernelSpec& k, const Vec& u, int order) {
  if (order < 0 || order > 2) throw CvpError("kernel_diff: order must be 0, 1 or 2");
  if (!u.allFinite()) throw CvpError("kernel_diff: non-finite displacement");
  const int m = static_cast<int>(u.size());
  KernelDiff out;
  if (order >= 1) out.grad = Vec::Zero(m);
  if (order >= 2) out.hess = Mat::Zero(m, m);
  switch (k.kind) {
    case KernelSpec::Kind::IsoBump:
      add_bump(k.amplitude, k.range, u, order, out);
      break;
    case KernelSpec::Kind::LightconeBump:
      add_cone_bump(k.amplitude, k.range, k.cone_slope, u, order, out);
      // Narrow coincidence bump keeps L(x,x) > 0; it vanishes beyond
      // range/100, below any sane point separation.
      add_bump(k.amplitude, k.range * KernelSpec::diag_bump_fraction, u, order, out);
      break;
  }
  return out;
}

KernelBlocks kernel_blocks(const KernelSpec& k, const Vec& u, int order) {
  KernelDiff d = kernel_diff(k, u, order);
  KernelBlocks b;
  b.value = d.value;
  if (order >= 1) {
    b.d1 = d.grad;
    b.d2 = -d.grad;
  }
  if (order >= 2) {
    b.d11 = d.hess;
    b.d22 = d.hess;
    b.d12 = -d.hess;
  }
  return b;
}

const char* kernel_kind_name(KernelSpec::Kind kind) {
  switch (kind) {
    case KernelSpec::Kind::IsoBump: return "iso_bump";
    case KernelSpec::Kind::LightconeBump: return "lightcone_bump";
  }
  return "?";
}

KernelSpec::Kind kernel_kind_from_name(const std::string& name) {
  if (name == "iso_bump") return KernelSpec::Kind::IsoBump;
  if (name == "lightcone_bump") return KernelSpec::Kind::LightconeBump;
  throw CvpError("unknown kernel name: " + name);
}

}  // namespace cvp

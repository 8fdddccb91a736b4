#include "cvp/jets.hpp"

#include <Eigen/SVD>

namespace cvp {

double pointwise_product(const Instance& inst, const Vec& v, const Vec& w, Index i) {
  if (v.size() != inst.coeff_count() || w.size() != inst.coeff_count())
    throw CvpError("pointwise_product: coefficient length mismatch");
  const Index base = jet_scalar_index(inst, i);
  double acc = v[base] * w[base];
  for (int a = 0; a < inst.dim; ++a) acc += v[base + 1 + a] * w[base + 1 + a];
  return acc;
}

Vec jet_point_norms(const Instance& inst, const Vec& v) {
  const Index n = inst.size();
  Vec out(n);
  for (Index i = 0; i < n; ++i)
    out[i] = v.segment(i * (1 + inst.dim), 1 + inst.dim).norm();
  return out;
}

PointSet supp_eps(const Instance& inst, const Vec& v, double eps) {
  Vec norms = jet_point_norms(inst, v);
  const double top = norms.maxCoeff();
  PointSet s(inst.size(), false);
  if (top <= 0.0) return s;
  for (Index i = 0; i < inst.size(); ++i) s[i] = norms[i] > eps * top;
  return s;
}

double l2_product(const Instance& inst, const Vec& v, const Vec& w, const Vec& weight) {
  if (weight.size() != inst.size()) throw CvpError("l2_product: weight length mismatch");
  double acc = 0.0;
  for (Index i = 0; i < inst.size(); ++i) {
    if (weight[i] == 0.0) continue;
    acc += weight[i] * inst.weights[i] * pointwise_product(inst, v, w, i);
  }
  return acc;
}

double l2_norm(const Instance& inst, const Vec& v, const Vec& weight) {
  return std::sqrt(std::max(0.0, l2_product(inst, v, v, weight)));
}

Vec coeff_weight(const Instance& inst, const Vec& point_weight) {
  Vec w(inst.coeff_count());
  for (Index i = 0; i < inst.size(); ++i)
    w.segment(i * (1 + inst.dim), 1 + inst.dim).setConstant(point_weight[i] * inst.weights[i]);
  return w;
}

namespace {

bool finite(const Mat& a, const Vec& b) { return a.allFinite() && b.allFinite(); }

}  // namespace

ThinSvd thin_svd(const Mat& A) {
  ThinSvd out;
  const bool tall = A.rows() >= A.cols();
  Mat work = tall ? A : Mat(A.transpose());
  {
    Eigen::BDCSVD<Mat> svd(work, Eigen::ComputeThinU | Eigen::ComputeThinV);
    out.u = svd.matrixU();
    out.v = svd.matrixV();
    out.s = svd.singularValues();
  }
  if (!finite(out.u, out.s) || !out.v.allFinite()) {
    Eigen::JacobiSVD<Mat> svd(work, Eigen::ComputeThinU | Eigen::ComputeThinV);
    out.u = svd.matrixU();
    out.v = svd.matrixV();
    out.s = svd.singularValues();
  }
  if (!tall) std::swap(out.u, out.v);
  return out;
}

FullVSvd svd_full_v(const Mat& A) {
  FullVSvd out;
  const bool tall = A.rows() >= A.cols();
  if (tall) {
    {
      Eigen::BDCSVD<Mat> svd(A, Eigen::ComputeFullV);
      out.v = svd.matrixV();
      out.s = svd.singularValues();
    }
    if (!finite(out.v, out.s)) {
      Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeFullV);
      out.v = svd.matrixV();
      out.s = svd.singularValues();
    }
  } else {
    Mat at = A.transpose();
    {
      Eigen::BDCSVD<Mat> svd(at, Eigen::ComputeFullU);
      out.v = svd.matrixU();
      out.s = svd.singularValues();
    }
    if (!finite(out.v, out.s)) {
      Eigen::JacobiSVD<Mat> svd(at, Eigen::ComputeFullU);
      out.v = svd.matrixU();
      out.s = svd.singularValues();
    }
  }
  return out;
}

Mat nullspace(const Mat& A, Index ncols) {
  if (A.rows() == 0) return Mat::Identity(ncols, ncols);
  FullVSvd svd = svd_full_v(A);
  const double cut = svd.s.size() ? kSvdRelCut * svd.s[0] : 0.0;
  Index rank = 0;
  for (Index k = 0; k < svd.s.size(); ++k)
    if (svd.s[k] > cut) ++rank;
  return svd.v.rightCols(ncols - rank);
}

JetSpace build_space(const Instance& inst, const PointSet& carrier,
                     const std::vector<uint32_t>& vector_mask, const Mat& constraints,
                     bool include_scalar) {
  const Index n = inst.size();
  const Index nc = inst.coeff_count();
  if (static_cast<Index>(carrier.size()) != n) throw CvpError("build_space: carrier size mismatch");
  if (set_empty(carrier)) throw CvpError("build_space: carrier must be nonempty");

  JetSpace sp;
  sp.mask.assign(nc, false);
  std::vector<Index> kept;
  for (Index i = 0; i < n; ++i) {
    if (!carrier[i]) continue;
    if (include_scalar) {
      sp.mask[jet_scalar_index(inst, i)] = true;
      kept.push_back(jet_scalar_index(inst, i));
    }
    const uint32_t axes = i < static_cast<Index>(vector_mask.size()) ? vector_mask[i] : 0u;
    for (int a = 0; a < inst.dim; ++a) {
      if (axes & (1u << a)) {
        sp.mask[jet_vector_index(inst, i, a)] = true;
        kept.push_back(jet_vector_index(inst, i, a));
      }
    }
  }
  const Index k = static_cast<Index>(kept.size());
  if (k == 0) {
    sp.basis = Mat::Zero(nc, 0);
    return sp;
  }
  Mat embed = Mat::Zero(nc, k);
  for (Index c = 0; c < k; ++c) embed(kept[c], c) = 1.0;

  if (constraints.rows() == 0) {
    sp.basis = embed;
    return sp;
  }
  if (constraints.cols() != nc) throw CvpError("build_space: constraint width mismatch");
  Mat restricted = constraints * embed;
  Mat nz = nullspace(restricted, k);
  sp.basis = embed * nz;
  return sp;
}

JetSpace build_space_full(const Instance& inst, const Mat& constraints) {
  PointSet all(inst.size(), true);
  std::vector<uint32_t> mask(inst.size(), (1u << inst.dim) - 1u);
  return build_space(inst, all, mask, constraints, true);
}

}  // namespace cvp

#include "risac/precoding.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <stdexcept>

namespace risac {

namespace {
constexpr double kRankThreshold = 1e-10;  // relative to the largest singular value
}

CMat zero_forcing(const CMat& h) {
  const Eigen::Index k = h.cols();
  if (k == 0) return CMat(h.rows(), 0);
  Eigen::JacobiSVD<CMat> svd(h, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.singularValues()(k - 1) < kRankThreshold * svd.singularValues()(0))
    throw std::runtime_error("zero_forcing: rank-deficient user channel matrix");
  // Right pseudo-inverse h (h^H h)^-1; its columns null the other users.
  const CVec inv_sv = svd.singularValues().cwiseInverse().cast<std::complex<double>>();
  CMat f = svd.matrixU() * inv_sv.asDiagonal() * svd.matrixV().adjoint();
  for (Eigen::Index c = 0; c < f.cols(); ++c) f.col(c).normalize();
  return f;
}

CMat null_space_basis(const CMat& h) {
  const Eigen::Index dtx = h.rows();
  const Eigen::Index k = h.cols();
  if (k >= dtx)
    throw std::runtime_error("null_space_basis: no dimensions left for the radar stream");
  if (k == 0) return CMat::Identity(dtx, dtx);
  Eigen::JacobiSVD<CMat> svd(h, Eigen::ComputeFullU);
  if (svd.singularValues()(k - 1) < kRankThreshold * svd.singularValues()(0))
    throw std::runtime_error("null_space_basis: rank-deficient user channel matrix");
  return svd.matrixU().rightCols(dtx - k);
}

Eigen::VectorXd uniform_power_split(int users, double gamma_r) {
  Eigen::VectorXd g(users + 1);
  if (users > 0) g.head(users).setConstant((1.0 - gamma_r) / users);
  g(users) = gamma_r;
  return g;
}

CommMetrics comm_metrics(const std::vector<CMat>& h, const BeamformerSet& bf, double power_w,
                         double sigma2_user_w) {
  const int nq = static_cast<int>(h.size());
  const int k = nq > 0 ? static_cast<int>(h[0].cols()) : 0;
  CommMetrics m;
  m.sinr = Eigen::MatrixXd::Zero(k, nq);
  m.rate_per_user = Eigen::VectorXd::Zero(k);
  for (int q = 0; q < nq; ++q) {
    const CMat& hq = h[static_cast<size_t>(q)];
    const CMat& fq = bf.f[static_cast<size_t>(q)];
    const Eigen::VectorXd& g = bf.gamma[static_cast<size_t>(q)];
    // |h_k^H f_j|^2 for every user/stream pair, radar stream included.
    const Eigen::MatrixXd p = (hq.adjoint() * fq).cwiseAbs2();
    for (int uk = 0; uk < k; ++uk) {
      const double wanted = p(uk, uk) * g(uk);
      double interference = 0.0;
      for (int j = 0; j < p.cols(); ++j)
        if (j != uk) interference += p(uk, j) * g(j);
      const double sinr = wanted / (interference + sigma2_user_w / power_w);
      m.sinr(uk, q) = sinr;
      m.rate_per_user(uk) += std::log2(1.0 + sinr);
    }
  }
  m.sum_rate = m.rate_per_user.sum();
  return m;
}

}  // namespace risac

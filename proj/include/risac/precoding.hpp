// Downlink precoding: zero-forcing beamformers, the orthonormal null-space
// basis reserved for the radar stream, power splits, and the user metrics.
#pragma once

#include <vector>

#include "risac/channel.hpp"
#include "risac/geometry.hpp"

namespace risac {

// Beamformers and power split of one CPI: per subcarrier a D_tx x (K+1)
// matrix of unit-norm columns (users first, radar last), the matching power
// fractions, and the RIS response.
struct BeamformerSet {
  std::vector<CMat> f;
  std::vector<Eigen::VectorXd> gamma;
  CVec omega;

  int users() const { return f.empty() ? 0 : static_cast<int>(f[0].cols()) - 1; }
};

// Zero-forcing beamformers: column k nulls every other user's channel and is
// scaled to unit norm. Throws if the channel matrix is rank deficient.
CMat zero_forcing(const CMat& h);

// Orthonormal basis of the orthogonal complement of the column space of h,
// i.e. h^H * basis = 0. Throws when no dimensions remain.
CMat null_space_basis(const CMat& h);

// Uniform split: the radar stream gets gamma_r, each user (1-gamma_r)/K.
Eigen::VectorXd uniform_power_split(int users, double gamma_r);

struct CommMetrics {
  Eigen::MatrixXd sinr;           // K x N_sub
  Eigen::VectorXd rate_per_user;  // bits per OFDM symbol
  double sum_rate = 0.0;
};

CommMetrics comm_metrics(const std::vector<CMat>& h, const BeamformerSet& bf, double power_w,
                         double sigma2_user_w);

}  // namespace risac

#include "risac/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace risac {
namespace {

// Element-pairwise link coefficient: amplitude from the element gains and
// the free-space loss, phase from the exact propagation distance.
std::complex<double> link_coefficient(const Vec3& from, const ArrayFrame& from_frame,
                                      const Vec3& to, const ArrayFrame& to_frame, double freq_hz) {
  const Vec3 diff = to - from;
  const double d = diff.norm();
  if (d <= 0.0) throw std::runtime_error("channel: coincident elements");
  const Vec3 u = diff / d;
  const double g_dep = element_gain(from_frame.angles_of(u));
  const double g_arr = element_gain(to_frame.angles_of(-u));
  const double lambda = kSpeedOfLight / freq_hz;
  const double amp = std::sqrt(g_dep * g_arr) * lambda / (4.0 * M_PI * d);
  const double phase = -2.0 * M_PI * d * freq_hz / kSpeedOfLight;
  return std::polar(amp, phase);
}

}  // namespace

ChannelSet build_bs_ris_channels(const Scenario& scn) {
  const auto tx = scn.tx_array();
  const auto rx = scn.rx_array();
  const auto ris = scn.ris_array();
  const int nq = scn.ofdm.employed_subcarriers;

  ChannelSet c;
  c.sigma2_radar_w = scn.noise_variance_w();
  c.sigma2_user_w = scn.noise_variance_w();
  c.g_tx.resize(static_cast<size_t>(nq));
  c.g_rx.resize(static_cast<size_t>(nq));
  for (int q = 1; q <= nq; ++q) {
    const double f = scn.ofdm.subcarrier_frequency(q);
    CMat gt(static_cast<Eigen::Index>(ris.positions.size()),
            static_cast<Eigen::Index>(tx.positions.size()));
    for (Eigen::Index i = 0; i < gt.rows(); ++i)
      for (Eigen::Index k = 0; k < gt.cols(); ++k)
        gt(i, k) = link_coefficient(tx.positions[static_cast<size_t>(k)], tx.frame,
                                    ris.positions[static_cast<size_t>(i)], ris.frame, f);
    CMat gr(static_cast<Eigen::Index>(rx.positions.size()),
            static_cast<Eigen::Index>(ris.positions.size()));
    for (Eigen::Index i = 0; i < gr.rows(); ++i)
      for (Eigen::Index k = 0; k < gr.cols(); ++k)
        gr(i, k) = link_coefficient(ris.positions[static_cast<size_t>(k)], ris.frame,
                                    rx.positions[static_cast<size_t>(i)], rx.frame, f);
    c.g_tx[static_cast<size_t>(q - 1)] = std::move(gt);
    c.g_rx[static_cast<size_t>(q - 1)] = std::move(gr);
  }
  return c;
}

std::vector<Vec3> sample_user_positions(const Scenario& scn, int count, Rng& rng) {
  const auto& u = scn.geometry.users;
  std::vector<Vec3> p(static_cast<size_t>(count));
  for (auto& pos : p)
    pos = Vec3(rng.uniform(u.x_m.lo, u.x_m.hi), rng.uniform(u.y_m.lo, u.y_m.hi),
               rng.uniform(u.z_m.lo, u.z_m.hi));
  return p;
}

CVec user_channel_los(const Scenario& scn, const Vec3& pos, int q) {
  const auto tx = scn.tx_array();
  const double f = scn.ofdm.subcarrier_frequency(q);
  const Vec3 diff = pos - scn.geometry.bs_position;
  const double d = diff.norm();
  const Vec3 u = diff / d;
  const Direction dep = tx.frame.angles_of(u);
  // The user antenna is pointed back at the BS, so its gain is the peak value.
  const double g_user = M_PI;
  const double lambda = kSpeedOfLight / f;
  const double amp = std::sqrt(element_gain(dep) * g_user) * lambda / (4.0 * M_PI * d);
  const double phase = -2.0 * M_PI * d * f / kSpeedOfLight;
  return std::polar(amp, phase) * steering_vector(tx, dep, f);
}

void sample_user_channels_at(const Scenario& scn, const std::vector<Vec3>& positions, Rng& rng,
                             ChannelSet& channels) {
  const int nq = scn.ofdm.employed_subcarriers;
  const int dtx = scn.arrays.tx.nx * scn.arrays.tx.nz;
  const int k = static_cast<int>(positions.size());
  const double ricean = std::pow(10.0, scn.channel.ricean_factor_db / 10.0);

  channels.h.assign(static_cast<size_t>(nq), CMat(dtx, k));
  for (int q = 1; q <= nq; ++q) {
    CMat& hq = channels.h[static_cast<size_t>(q - 1)];
    for (int uk = 0; uk < k; ++uk) {
      const CVec los = user_channel_los(scn, positions[static_cast<size_t>(uk)], q);
      // Per-entry LoS power over multipath variance equals the Ricean factor.
      const double sigma2_mp = std::norm(los[0]) / ricean;
      CVec mp(dtx);
      for (int d = 0; d < dtx; ++d) mp[d] = rng.cgaussian(sigma2_mp);
      hq.col(uk) = los + mp;
    }
  }
}

void sample_user_channels(const Scenario& scn, int count, Rng& rng, ChannelSet& channels) {
  const auto positions = sample_user_positions(scn, count, rng);
  sample_user_channels_at(scn, positions, rng, channels);
}

TargetGeometry target_geometry(const Scenario& scn, const TargetState& target, double time_s) {
  const auto ris = scn.ris_array();
  const Vec3 p = target.position_at(time_s);
  const Vec3 diff = p - scn.geometry.ris_position;
  TargetGeometry g;
  g.range_m = diff.norm();
  if (g.range_m <= 0.0) throw std::runtime_error("target at the RIS reference point");
  const Vec3 u = diff / g.range_m;
  g.direction = ris.frame.angles_of(u);
  g.delay_s = 2.0 * g.range_m / kSpeedOfLight;
  g.doppler_hz = 2.0 * target.velocity.dot(u) / scn.ofdm.carrier_wavelength_m();
  return g;
}

double target_amplitude_variance(const Scenario& scn, const Direction& dir, double range_m,
                                 double rcs_m2) {
  const double g = element_gain(dir);
  const double lambda = scn.ofdm.carrier_wavelength_m();
  const double four_pi = 4.0 * M_PI;
  return g * g * rcs_m2 * lambda * lambda /
         (four_pi * four_pi * four_pi * std::pow(range_m, 4));
}

std::complex<double> sample_target_amplitude(const Scenario& scn, const TargetState& target,
                                             double time_s, Rng& rng) {
  const auto g = target_geometry(scn, target, time_s);
  return rng.cgaussian(target_amplitude_variance(scn, g.direction, g.range_m, target.rcs_m2));
}

}  // namespace risac

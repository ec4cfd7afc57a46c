// Propagation channels: deterministic BS<->RIS links modeled element by
// element, Ricean user channels, the fluctuating target response, and the
// receiver noise level.
#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "risac/geometry.hpp"
#include "risac/rng.hpp"
#include "risac/scenario.hpp"

namespace risac {

struct ChannelSet {
  std::vector<CMat> g_tx;  // per subcarrier: D_ris x D_tx
  std::vector<CMat> g_rx;  // per subcarrier: D_rx x D_ris
  std::vector<CMat> h;     // per subcarrier: D_tx x K (downlink users)
  double sigma2_radar_w = 0.0;
  double sigma2_user_w = 0.0;
};

// Fills g_tx/g_rx and the noise variances; h is left empty.
ChannelSet build_bs_ris_channels(const Scenario& scn);

// Draws user positions uniformly in the configured placement region.
std::vector<Vec3> sample_user_positions(const Scenario& scn, int count, Rng& rng);

// Line-of-sight part of the downlink channel for a user at `pos`.
CVec user_channel_los(const Scenario& scn, const Vec3& pos, int q);

// Ricean downlink channels for `count` users; positions drawn from rng.
// The multipath component is drawn independently per subcarrier.
void sample_user_channels(const Scenario& scn, int count, Rng& rng, ChannelSet& channels);
void sample_user_channels_at(const Scenario& scn, const std::vector<Vec3>& positions, Rng& rng,
                             ChannelSet& channels);

struct TargetState {
  Vec3 position{0, 0, 0};
  Vec3 velocity{0, 0, 0};
  double rcs_m2 = 1.0;

  Vec3 position_at(double t) const { return position + t * velocity; }
};

// Target parameters as seen from the RIS at a given instant.
struct TargetGeometry {
  double range_m = 0.0;
  Direction direction;      // in the RIS local frame
  double delay_s = 0.0;     // round trip RIS -> target -> RIS
  double doppler_hz = 0.0;  // 2 <v, u> / lambda with u the RIS->target unit vector
};

TargetGeometry target_geometry(const Scenario& scn, const TargetState& target, double time_s);

// Mean echo power E|alpha|^2 from the radar equation.
double target_amplitude_variance(const Scenario& scn, const Direction& dir, double range_m,
                                 double rcs_m2);

// One Swerling draw: complex Gaussian amplitude, constant over the scan.
std::complex<double> sample_target_amplitude(const Scenario& scn, const TargetState& target,
                                             double time_s, Rng& rng);

}  // namespace risac

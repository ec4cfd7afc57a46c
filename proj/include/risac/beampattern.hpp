// Transmit, receive, and two-way beampatterns of the RIS-aided radar, plus
// the post-integration target SNR.
#pragma once

#include <string>
#include <vector>

#include "risac/channel.hpp"
#include "risac/precoding.hpp"
#include "risac/scenario.hpp"

namespace risac {

struct BeampatternSample {
  Direction dir;
  Eigen::VectorXd per_q_tx, per_q_rx, per_q_two_way;
  double tx = 0.0, rx = 0.0, two_way = 0.0;
};

// Evaluates the spatial response through the RIS cascade at one direction:
// per subcarrier the transmit power sent toward `dir`, the receive gain
// collected from it, and their product; wideband values are the sums.
BeampatternSample bp_at(const Scenario& scn, const ChannelSet& channels, const BeamformerSet& bf,
                        const Direction& dir);

// Post-integration SNR of a target echo with mean power E|alpha|^2 given by
// the radar equation at (dir, range).
double target_snr(const Scenario& scn, const ChannelSet& channels, const BeamformerSet& bf,
                  const Direction& dir, double range_m, double rcs_m2);

// Radar cross-section that sets the nominal SNR at the configured reference
// point, assuming `bf` carries the all-power-to-radar design of the
// reference subvolume. Throws if the pattern is zero there.
double calibrate_rcs(const Scenario& scn, const ChannelSet& channels, const BeamformerSet& bf);

// Beampattern map over an az/el grid, one CSV row per direction.
void write_beampattern_csv(const Scenario& scn, const ChannelSet& channels,
                           const BeamformerSet& bf, const std::string& path,
                           double step_deg = 0.5);

}  // namespace risac

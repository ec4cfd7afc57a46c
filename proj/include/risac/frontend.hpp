// Radar front-end: CPI simulation through the RIS cascade and the bank of
// noise-normalized correlators whose outputs form the per-scan statistic
// array over (direction, delay, Doppler).
#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "risac/beampattern.hpp"
#include "risac/channel.hpp"
#include "risac/precoding.hpp"
#include "risac/scenario.hpp"

namespace risac {

// One CPI of raw data: for each (subcarrier, symbol) the received vector on
// the radar array and the transmitted symbol vector.
struct CpiObservation {
  std::vector<CMat> y;  // per q: D_rx x N_sym
  std::vector<CMat> x;  // per q: (K+1) x N_sym, scaled by the power split
  bool target_present = false;
};

// Unit-energy correlator weights, all taps equal.
Eigen::MatrixXd equal_weights(int n_sub, int n_sym);

// Simulates one CPI: transmitted symbols with random phases, the target echo
// when present, and receiver noise (noise_scale = 0 disables it).
CpiObservation simulate_cpi(const Scenario& scn, const ChannelSet& channels,
                            const BeamformerSet& bf, const TargetState* target,
                            std::complex<double> target_amplitude, double time_s, Rng& rng,
                            double noise_scale = 1.0);

// Normalized correlator output matched to (dir, delay, doppler). Throws if a
// normalizer in the matched filter vanishes.
double statistic(const Scenario& scn, const ChannelSet& channels, const BeamformerSet& bf,
                 const CpiObservation& obs, const Direction& dir, double delay_s,
                 double doppler_hz, const Eigen::MatrixXd& weights);

// Statistic array of one scan.
struct StatisticArray {
  int n_dir = 0, n_del = 0, n_dop = 0;
  int scan_index = 0;
  std::vector<double> dir_time_s;  // illumination timestamp per direction
  std::vector<double> values;      // row-major (dir, delay, doppler)

  double& at(int i, int j, int d) {
    return values[static_cast<size_t>((i * n_del + j) * n_dop + d)];
  }
  double at(int i, int j, int d) const {
    return values[static_cast<size_t>((i * n_del + j) * n_dop + d)];
  }
};

void dump_statistic_array(const StatisticArray& a, const std::string& path);

// Precomputed per-direction correlator bank; reused across scans and trials.
class ScanSimulator {
 public:
  ScanSimulator(const Scenario& scn, const ChannelSet& channels,
                const std::vector<BeamformerSet>& per_direction);

  // Simulates the scan with index `scan` (0-based). When a target is given,
  // its state is propagated to each illumination instant and one Swerling
  // amplitude draw is shared by the whole scan.
  StatisticArray simulate_scan(int scan, const TargetState* target, Rng& rng,
                               double noise_scale = 1.0) const;

  const Scenario& scenario() const { return *scn_; }

 private:
  const Scenario* scn_;
  const ChannelSet* channels_;
  std::vector<BeamformerSet> bf_;
  int nq_ = 0, nsym_ = 0, k_ = 0;
  double w_ = 0.0;  // common correlator tap weight
  // Per direction i and subcarrier q: the unit receive vector of the matched
  // filter and the transmit-side row through the precoder.
  std::vector<std::vector<CVec>> rx_unit_;   // [i][q] D_rx
  std::vector<std::vector<Eigen::RowVectorXcd>> tx_row_f_;  // [i][q] 1 x (K+1)
  CMat e_del_;  // N_del x N_sub grid phases
  CMat e_dop_;  // N_dop x N_sym grid phases
};

// Convenience wrapper matching the one-shot use in tests.
StatisticArray build_statistic_array(const Scenario& scn, const ChannelSet& channels,
                                     const std::vector<BeamformerSet>& per_direction, int scan,
                                     const TargetState* target, Rng& rng,
                                     double noise_scale = 1.0);

}  // namespace risac

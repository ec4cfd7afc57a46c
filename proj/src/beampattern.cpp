#include "risac/beampattern.hpp"

#include "risac/io.hpp"

#include <cmath>
#include <stdexcept>

namespace risac {

BeampatternSample bp_at(const Scenario& scn, const ChannelSet& channels, const BeamformerSet& bf,
                        const Direction& dir) {
  const int nq = scn.ofdm.employed_subcarriers;
  const auto ris = scn.ris_array();
  BeampatternSample s;
  s.dir = dir;
  s.per_q_tx.resize(nq);
  s.per_q_rx.resize(nq);
  s.per_q_two_way.resize(nq);
  for (int q = 0; q < nq; ++q) {
    const CVec t = steering_vector(ris, dir, scn.ofdm.subcarrier_frequency(q + 1));
    const CVec phased = t.cwiseProduct(bf.omega);
    const double rx = (channels.g_rx[static_cast<size_t>(q)] * phased).squaredNorm();
    // Row vector of per-stream amplitudes, weighted by the power split.
    const Eigen::RowVectorXcd row = phased.transpose() * channels.g_tx[static_cast<size_t>(q)] *
                                    bf.f[static_cast<size_t>(q)];
    const double tx = (row.cwiseAbs2() * bf.gamma[static_cast<size_t>(q)]).value();
    s.per_q_rx(q) = rx;
    s.per_q_tx(q) = tx;
    s.per_q_two_way(q) = tx * rx;
  }
  s.tx = s.per_q_tx.sum();
  s.rx = s.per_q_rx.sum();
  s.two_way = s.per_q_two_way.sum();
  return s;
}

double target_snr(const Scenario& scn, const ChannelSet& channels, const BeamformerSet& bf,
                  const Direction& dir, double range_m, double rcs_m2) {
  const auto s = bp_at(scn, channels, bf, dir);
  const double mean_echo_power = target_amplitude_variance(scn, dir, range_m, rcs_m2);
  return scn.ofdm.symbols_per_cpi * scn.ofdm.power_per_subcarrier_w * s.two_way *
         mean_echo_power / channels.sigma2_radar_w;
}

double calibrate_rcs(const Scenario& scn, const ChannelSet& channels, const BeamformerSet& bf) {
  const auto dirs = pointing_directions(scn);
  const Direction ref_dir = dirs.at(static_cast<size_t>(scn.target.reference_direction));
  const double range = scn.target.reference_range_m;
  const auto s = bp_at(scn, channels, bf, ref_dir);
  if (s.two_way <= 0.0)
    throw std::runtime_error("calibrate_rcs: zero beampattern at the reference direction");
  const double snr = std::pow(10.0, scn.target.nominal_snr_db / 10.0);
  const double needed_echo_power = snr * channels.sigma2_radar_w /
                                   (scn.ofdm.symbols_per_cpi * scn.ofdm.power_per_subcarrier_w *
                                    s.two_way);
  // Invert the radar equation for the cross-section.
  return needed_echo_power / target_amplitude_variance(scn, ref_dir, range, 1.0);
}

void write_beampattern_csv(const Scenario& scn, const ChannelSet& channels,
                           const BeamformerSet& bf, const std::string& path, double step_deg) {
  const auto& band = scn.regions.sidelobe_band;
  std::vector<std::vector<std::string>> rows;
  const double az_lo = std::min(band.az_deg.lo, scn.geometry.inspected.az_deg.lo) - 10.0;
  const double az_hi = std::max(band.az_deg.hi, scn.geometry.inspected.az_deg.hi) + 10.0;
  const double el_lo = std::min(band.el_deg.lo, scn.geometry.inspected.el_deg.lo) - 10.0;
  const double el_hi = std::max(band.el_deg.hi, scn.geometry.inspected.el_deg.hi) + 10.0;
  for (double el = el_lo; el <= el_hi + 1e-9; el += step_deg)
    for (double az = az_lo; az <= az_hi + 1e-9; az += step_deg) {
      const auto s = bp_at(scn, channels, bf, {az, el});
      rows.push_back({format_double(az), format_double(el), format_double(s.tx),
                      format_double(s.rx), format_double(s.two_way)});
    }
  write_csv(path, {"az_deg", "el_deg", "bp_tx", "bp_rx", "bp"}, rows);
}

}  // namespace risac

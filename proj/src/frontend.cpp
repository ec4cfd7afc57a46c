#include "risac/frontend.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace risac {
namespace {

constexpr std::uint64_t kAlphaStream = 0xA1FA;
constexpr std::uint64_t kSymbolStream = 0;
constexpr std::uint64_t kNoiseStream = 1;

std::complex<double> cis(double phase) { return {std::cos(phase), std::sin(phase)}; }

}  // namespace

Eigen::MatrixXd equal_weights(int n_sub, int n_sym) {
  return Eigen::MatrixXd::Constant(n_sub, n_sym, 1.0 / std::sqrt(double(n_sub) * n_sym));
}

CpiObservation simulate_cpi(const Scenario& scn, const ChannelSet& channels,
                            const BeamformerSet& bf, const TargetState* target,
                            std::complex<double> target_amplitude, double time_s, Rng& rng,
                            double noise_scale) {
  const int nq = scn.ofdm.employed_subcarriers;
  const int nsym = scn.ofdm.symbols_per_cpi;
  const int k = bf.users();
  const int drx = static_cast<int>(channels.g_rx[0].rows());
  const double sqrt_p = std::sqrt(scn.ofdm.power_per_subcarrier_w);
  const auto ris = scn.ris_array();

  Rng rsym = rng.derive(kSymbolStream);
  Rng rnoise = rng.derive(kNoiseStream);

  CpiObservation obs;
  obs.target_present = target != nullptr;
  obs.y.assign(static_cast<size_t>(nq), CMat::Zero(drx, nsym));
  obs.x.assign(static_cast<size_t>(nq), CMat::Zero(k + 1, nsym));

  // Echo cascade factors, fixed over the CPI.
  std::vector<CVec> echo_rx(static_cast<size_t>(nq));
  std::vector<Eigen::RowVectorXcd> echo_tx(static_cast<size_t>(nq));
  TargetGeometry geom;
  if (target) {
    geom = target_geometry(scn, *target, time_s);
    for (int q = 0; q < nq; ++q) {
      const CVec t = steering_vector(ris, geom.direction, scn.ofdm.subcarrier_frequency(q + 1));
      const CVec phased = t.cwiseProduct(bf.omega);
      echo_rx[static_cast<size_t>(q)] = channels.g_rx[static_cast<size_t>(q)] * phased;
      echo_tx[static_cast<size_t>(q)] =
          phased.transpose() * channels.g_tx[static_cast<size_t>(q)];
    }
  }

  for (int q = 0; q < nq; ++q) {
    const Eigen::VectorXd& g = bf.gamma[static_cast<size_t>(q)];
    for (int n = 0; n < nsym; ++n) {
      CVec x(k + 1);
      for (int s = 0; s <= k; ++s) x(s) = std::sqrt(g(s)) * rsym.unit_phase();
      obs.x[static_cast<size_t>(q)].col(n) = x;
      CVec y = CVec::Zero(drx);
      if (target) {
        const CVec s_qn = sqrt_p * (bf.f[static_cast<size_t>(q)] * x);
        const std::complex<double> tx_amp = echo_tx[static_cast<size_t>(q)] * s_qn;
        const std::complex<double> phase =
            cis(-2.0 * M_PI * (q + 1) * scn.ofdm.employed_spacing_hz * geom.delay_s) *
            cis(-2.0 * M_PI * geom.doppler_hz * (n + 1) * scn.ofdm.symbol_duration_s());
        y = target_amplitude * phase * tx_amp * echo_rx[static_cast<size_t>(q)];
      }
      if (noise_scale != 0.0)
        for (int d = 0; d < drx; ++d)
          y(d) += noise_scale * rnoise.cgaussian(channels.sigma2_radar_w);
      obs.y[static_cast<size_t>(q)].col(n) = y;
    }
  }
  return obs;
}

double statistic(const Scenario& scn, const ChannelSet& channels, const BeamformerSet& bf,
                 const CpiObservation& obs, const Direction& dir, double delay_s,
                 double doppler_hz, const Eigen::MatrixXd& weights) {
  const int nq = scn.ofdm.employed_subcarriers;
  const int nsym = scn.ofdm.symbols_per_cpi;
  const double sqrt_p = std::sqrt(scn.ofdm.power_per_subcarrier_w);
  const auto ris = scn.ris_array();

  std::complex<double> acc = 0.0;
  for (int q = 0; q < nq; ++q) {
    const CVec t = steering_vector(ris, dir, scn.ofdm.subcarrier_frequency(q + 1));
    const CVec phased = t.cwiseProduct(bf.omega);
    const CVec rx = channels.g_rx[static_cast<size_t>(q)] * phased;
    const double rx_norm = rx.norm();
    if (rx_norm < 1e-150) throw std::runtime_error("statistic: vanishing receive normalizer");
    const Eigen::RowVectorXcd tx_row =
        phased.transpose() * channels.g_tx[static_cast<size_t>(q)];
    const std::complex<double> del_phase =
        cis(-2.0 * M_PI * (q + 1) * scn.ofdm.employed_spacing_hz * delay_s);
    for (int n = 0; n < nsym; ++n) {
      const CVec s_qn = sqrt_p * (bf.f[static_cast<size_t>(q)] * obs.x[static_cast<size_t>(q)].col(n));
      const std::complex<double> tx_amp = tx_row * s_qn;
      const double tx_mag = std::abs(tx_amp);
      if (tx_mag < 1e-150) throw std::runtime_error("statistic: vanishing transmit normalizer");
      const std::complex<double> u_phase =
          del_phase * cis(-2.0 * M_PI * doppler_hz * (n + 1) * scn.ofdm.symbol_duration_s());
      // u = w * phases * (rx/|rx|) * (tx/|tx|); accumulate u^H y.
      const std::complex<double> proj =
          (rx.adjoint() * obs.y[static_cast<size_t>(q)].col(n))(0) / rx_norm;
      acc += weights(q, n) * std::conj(u_phase) * std::conj(tx_amp / tx_mag) * proj;
    }
  }
  return std::norm(acc) / channels.sigma2_radar_w;
}

ScanSimulator::ScanSimulator(const Scenario& scn, const ChannelSet& channels,
                             const std::vector<BeamformerSet>& per_direction)
    : scn_(&scn), channels_(&channels), bf_(per_direction) {
  const int ndir = scn.n_dir();
  if (static_cast<int>(bf_.size()) != ndir)
    throw std::invalid_argument("scan simulator: one beamformer set per pointing direction");
  nq_ = scn.ofdm.employed_subcarriers;
  nsym_ = scn.ofdm.symbols_per_cpi;
  k_ = bf_[0].users();
  w_ = 1.0 / std::sqrt(double(nq_) * nsym_);

  const auto dirs = pointing_directions(scn);
  const auto ris = scn.ris_array();
  rx_unit_.resize(static_cast<size_t>(ndir));
  tx_row_f_.resize(static_cast<size_t>(ndir));
  for (int i = 0; i < ndir; ++i) {
    rx_unit_[static_cast<size_t>(i)].resize(static_cast<size_t>(nq_));
    tx_row_f_[static_cast<size_t>(i)].resize(static_cast<size_t>(nq_));
    for (int q = 0; q < nq_; ++q) {
      const CVec t = steering_vector(ris, dirs[static_cast<size_t>(i)],
                                     scn.ofdm.subcarrier_frequency(q + 1));
      const CVec phased = t.cwiseProduct(bf_[static_cast<size_t>(i)].omega);
      CVec rx = channels.g_rx[static_cast<size_t>(q)] * phased;
      const double n = rx.norm();
      if (n < 1e-150)
        throw std::runtime_error("scan simulator: degenerate receive response for a direction");
      rx_unit_[static_cast<size_t>(i)][static_cast<size_t>(q)] = rx / n;
      tx_row_f_[static_cast<size_t>(i)][static_cast<size_t>(q)] =
          phased.transpose() * channels.g_tx[static_cast<size_t>(q)] *
          bf_[static_cast<size_t>(i)].f[static_cast<size_t>(q)];
    }
  }

  const Eigen::VectorXd delays = delay_grid(scn);
  const Eigen::VectorXd dopplers = doppler_grid(scn);
  e_del_.resize(delays.size(), nq_);
  for (Eigen::Index j = 0; j < delays.size(); ++j)
    for (int q = 0; q < nq_; ++q)
      e_del_(j, q) = cis(2.0 * M_PI * (q + 1) * scn.ofdm.employed_spacing_hz * delays(j));
  e_dop_.resize(dopplers.size(), nsym_);
  for (Eigen::Index d = 0; d < dopplers.size(); ++d)
    for (int n = 0; n < nsym_; ++n)
      e_dop_(d, n) = cis(2.0 * M_PI * dopplers(d) * (n + 1) * scn.ofdm.symbol_duration_s());
}

StatisticArray ScanSimulator::simulate_scan(int scan, const TargetState* target, Rng& rng,
                                            double noise_scale) const {
  const Scenario& scn = *scn_;
  const int ndir = scn.n_dir();
  StatisticArray a;
  a.n_dir = ndir;
  a.n_del = static_cast<int>(e_del_.rows());
  a.n_dop = static_cast<int>(e_dop_.rows());
  a.scan_index = scan;
  a.values.assign(static_cast<size_t>(ndir) * a.n_del * a.n_dop, 0.0);
  a.dir_time_s.resize(static_cast<size_t>(ndir));

  const double sigma2 = channels_->sigma2_radar_w;
  const double sqrt_p = std::sqrt(scn.ofdm.power_per_subcarrier_w);
  const auto dirs = pointing_directions(scn);
  const auto ris = scn.ris_array();

  // One fluctuation draw per scan, shared by all of its CPIs.
  std::complex<double> alpha = 0.0;
  if (target) {
    Rng ra = rng.derive(kAlphaStream);
    alpha = sample_target_amplitude(scn, *target, scn.illumination_time_s(scan, 0), ra);
  }

  CMat rho(nq_, nsym_);
  for (int i = 0; i < ndir; ++i) {
    const double t_ill = scn.illumination_time_s(scan, i);
    a.dir_time_s[static_cast<size_t>(i)] = t_ill;
    Rng rcpi = rng.derive(static_cast<std::uint64_t>(i));
    Rng rsym = rcpi.derive(kSymbolStream);
    Rng rnoise = rcpi.derive(kNoiseStream);

    // Echo factors through this direction's RIS configuration; the transmit
    // row already folds in the precoder, so it applies to the symbol vector.
    TargetGeometry geom;
    std::vector<std::complex<double>> echo_rx_proj(static_cast<size_t>(nq_), 0.0);
    std::vector<Eigen::RowVectorXcd> echo_tx(static_cast<size_t>(nq_));
    if (target) {
      geom = target_geometry(scn, *target, t_ill);
      for (int q = 0; q < nq_; ++q) {
        const CVec t = steering_vector(ris, geom.direction, scn.ofdm.subcarrier_frequency(q + 1));
        const CVec phased = t.cwiseProduct(bf_[static_cast<size_t>(i)].omega);
        const CVec rx = channels_->g_rx[static_cast<size_t>(q)] * phased;
        echo_rx_proj[static_cast<size_t>(q)] =
            (rx_unit_[static_cast<size_t>(i)][static_cast<size_t>(q)].adjoint() * rx)(0);
        echo_tx[static_cast<size_t>(q)] =
            phased.transpose() * channels_->g_tx[static_cast<size_t>(q)] *
            bf_[static_cast<size_t>(i)].f[static_cast<size_t>(q)];
      }
    }

    for (int q = 0; q < nq_; ++q) {
      const Eigen::VectorXd& g = bf_[static_cast<size_t>(i)].gamma[static_cast<size_t>(q)];
      const auto& row_f = tx_row_f_[static_cast<size_t>(i)][static_cast<size_t>(q)];
      const std::complex<double> del_phase =
          target ? cis(-2.0 * M_PI * (q + 1) * scn.ofdm.employed_spacing_hz * geom.delay_s)
                 : std::complex<double>(0.0);
      for (int n = 0; n < nsym_; ++n) {
        CVec x(k_ + 1);
        for (int s = 0; s <= k_; ++s) x(s) = std::sqrt(g(s)) * rsym.unit_phase();
        const std::complex<double> tx_amp = sqrt_p * (row_f * x)(0);
        const double tx_mag = std::abs(tx_amp);
        if (tx_mag < 1e-150)
          throw std::runtime_error("scan simulator: vanishing transmit normalizer");
        std::complex<double> meas = 0.0;
        if (target) {
          const std::complex<double> dop_phase =
              cis(-2.0 * M_PI * geom.doppler_hz * (n + 1) * scn.ofdm.symbol_duration_s());
          meas = alpha * del_phase * dop_phase * echo_rx_proj[static_cast<size_t>(q)] *
                 (sqrt_p * (echo_tx[static_cast<size_t>(q)] * x)(0));
        }
        if (noise_scale != 0.0) meas += noise_scale * rnoise.cgaussian(sigma2);
        rho(q, n) = w_ * std::conj(tx_amp / tx_mag) * meas;
      }
    }
    const CMat m = e_del_ * rho * e_dop_.transpose();
    for (int j = 0; j < a.n_del; ++j)
      for (int d = 0; d < a.n_dop; ++d) a.at(i, j, d) = std::norm(m(j, d)) / sigma2;
  }
  return a;
}

StatisticArray build_statistic_array(const Scenario& scn, const ChannelSet& channels,
                                     const std::vector<BeamformerSet>& per_direction, int scan,
                                     const TargetState* target, Rng& rng, double noise_scale) {
  ScanSimulator sim(scn, channels, per_direction);
  return sim.simulate_scan(scan, target, rng, noise_scale);
}

void dump_statistic_array(const StatisticArray& a, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  const std::int64_t shape[3] = {a.n_dir, a.n_del, a.n_dop};
  f.write(reinterpret_cast<const char*>(shape), sizeof(shape));
  f.write(reinterpret_cast<const char*>(a.values.data()),
          static_cast<std::streamsize>(a.values.size() * sizeof(double)));
}

}  // namespace risac

#include "risac/experiments.hpp"

#include "risac/beampattern.hpp"
#include "risac/io.hpp"
#include "risac/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>

namespace risac {
namespace {

constexpr std::uint64_t kUserChannelStream = 11;
constexpr std::uint64_t kH0Stream = 100;
constexpr std::uint64_t kH1Stream = 101;
constexpr std::uint64_t kTargetStream = 7;
constexpr std::uint64_t kScanStream = 13;

struct WilsonInterval {
  double lo, hi;
};

WilsonInterval wilson95(int k, int n) {
  if (n == 0) return {0.0, 1.0};
  const double z = 1.959963984540054;
  const double p = double(k) / n;
  const double denom = 1.0 + z * z / n;
  const double center = (p + z * z / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * double(n) * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

std::string design_cache_path(const std::string& cache_dir, const Scenario& scn,
                              bool orthogonal, int effective_users, int dir_index) {
  Scenario key = scn;
  key.geometry.users.count = std::max(effective_users, 0);
  std::uint64_t h = design_relevant_hash(key);
  h = splitmix64(h ^ (orthogonal ? 0x0F0F0F0Full : 0xF0F0F0F0ull));
  h = splitmix64(h ^ static_cast<std::uint64_t>(dir_index));
  std::ostringstream s;
  s << cache_dir << "/design_" << std::hex << h << ".json";
  return s.str();
}

DesignResult design_with_cache(const Scenario& scn, const ChannelSet& channels,
                               const std::vector<CMat>& f_comm,
                               const std::vector<CMat>& u_basis,
                               const std::vector<Eigen::VectorXd>& gamma, int dir,
                               bool orthogonal, int effective_users,
                               const std::string& cache_dir) {
  std::string path;
  if (!cache_dir.empty()) {
    path = design_cache_path(cache_dir, scn, orthogonal, effective_users, dir);
    if (file_exists(path)) {
      const auto j = json_from_file(path);
      return design_result_from_json_text(j.dump());
    }
  }
  DesignResult r = design_subvolume(scn, channels, f_comm, u_basis, gamma, dir, scn.design);
  if (!path.empty()) {
    ensure_directory(cache_dir);
    json_to_file(path, json::parse(design_result_to_json_text(r)));
  }
  return r;
}

}  // namespace

OperatingContext prepare_context(const Scenario& scn, bool orthogonal, double rcs_m2,
                                 const std::string& cache_dir, int threads) {
  OperatingContext ctx;
  ctx.scn = scn;
  ctx.orthogonal = orthogonal;
  ctx.rcs_m2 = rcs_m2;
  const double gamma_r = scn.powers.radar_fraction;
  // With all power on the radar stream the communication function is off and
  // the design no longer depends on the user set.
  ctx.effective_users = gamma_r >= 1.0 ? 0 : scn.geometry.users.count;
  const int k = ctx.effective_users;
  const int nq = scn.ofdm.employed_subcarriers;
  const int dtx = scn.arrays.tx.nx * scn.arrays.tx.nz;

  ctx.channels = build_bs_ris_channels(scn);
  if (k > 0) {
    Rng rng = Rng(scn.seed).derive(kUserChannelStream, static_cast<std::uint64_t>(k));
    sample_user_channels(scn, k, rng, ctx.channels);
  } else {
    ctx.channels.h.assign(static_cast<size_t>(nq), CMat(dtx, 0));
  }

  ctx.zf.resize(static_cast<size_t>(nq));
  ctx.u_basis.resize(static_cast<size_t>(nq));
  ctx.gamma.resize(static_cast<size_t>(nq));
  for (int q = 0; q < nq; ++q) {
    ctx.zf[static_cast<size_t>(q)] = zero_forcing(ctx.channels.h[static_cast<size_t>(q)]);
    ctx.u_basis[static_cast<size_t>(q)] =
        (orthogonal && k > 0) ? null_space_basis(ctx.channels.h[static_cast<size_t>(q)])
                              : CMat(CMat::Identity(dtx, dtx));
    ctx.gamma[static_cast<size_t>(q)] = uniform_power_split(k, k > 0 ? gamma_r : 1.0);
  }

  const int ndir = scn.n_dir();
  ctx.designs.resize(static_cast<size_t>(ndir));
  std::exception_ptr err;
  std::mutex err_mutex;
  parallel_for(ndir, threads, [&](int d) {
    try {
      ctx.designs[static_cast<size_t>(d)] =
          design_with_cache(scn, ctx.channels, ctx.zf, ctx.u_basis, ctx.gamma, d, orthogonal,
                            ctx.effective_users, cache_dir);
    } catch (...) {
      std::lock_guard<std::mutex> lock(err_mutex);
      if (!err) err = std::current_exception();
    }
  });
  if (err) std::rethrow_exception(err);

  ctx.beamformers.resize(static_cast<size_t>(ndir));
  for (int d = 0; d < ndir; ++d) {
    BeamformerSet bf;
    bf.omega = ctx.designs[static_cast<size_t>(d)].omega;
    bf.f.resize(static_cast<size_t>(nq));
    bf.gamma = ctx.gamma;
    for (int q = 0; q < nq; ++q) {
      CMat f(dtx, k + 1);
      if (k > 0) f.leftCols(k) = ctx.zf[static_cast<size_t>(q)];
      f.col(k) = ctx.designs[static_cast<size_t>(d)].f_radar[static_cast<size_t>(q)];
      bf.f[static_cast<size_t>(q)] = std::move(f);
    }
    ctx.beamformers[static_cast<size_t>(d)] = std::move(bf);
  }

  if (k > 0) {
    // The comm columns are shared by all dwells; with orthogonality enforced
    // the radar column is invisible to the users, otherwise the rate is the
    // average over the scan's dwell configurations.
    double sum = 0.0;
    for (int d = 0; d < ndir; ++d)
      sum += comm_metrics(ctx.channels.h, ctx.beamformers[static_cast<size_t>(d)],
                          scn.ofdm.power_per_subcarrier_w, ctx.channels.sigma2_user_w)
                 .sum_rate;
    ctx.sum_rate = sum / ndir;
  }
  return ctx;
}

double calibrated_rcs(const Scenario& scn, const std::string& cache_dir, int threads) {
  if (scn.target.rcs_m2 > 0.0) return scn.target.rcs_m2;
  Scenario all_radar = scn;
  all_radar.powers.radar_fraction = 1.0;
  const OperatingContext ctx = prepare_context(all_radar, true, 1.0, cache_dir, threads);
  const int ref = scn.target.reference_direction;
  return calibrate_rcs(all_radar, ctx.channels,
                       ctx.beamformers.at(static_cast<size_t>(ref)));
}

double h0_window_score(const OperatingContext& ctx, const ScanSimulator& sim, int n_scan,
                       std::uint64_t trial) {
  Rng rng = Rng(ctx.scn.seed)
                .derive(kH0Stream, static_cast<std::uint64_t>(ctx.effective_users))
                .derive(trial);
  std::vector<PlotList> scans(static_cast<size_t>(n_scan));
  for (int s = 0; s < n_scan; ++s) {
    Rng rs = rng.derive(kScanStream, static_cast<std::uint64_t>(s));
    const StatisticArray a = sim.simulate_scan(s, nullptr, rs);
    scans[static_cast<size_t>(s)] = extract_plots(ctx.scn, a, ctx.scn.detection.plot_threshold);
  }
  return tbd_detect(scans, ctx.scn.grids.max_speed_mps,
                    std::numeric_limits<double>::infinity())
      .trajectory.score;
}

TrialOutcome h1_window_trial(const OperatingContext& ctx, const ScanSimulator& sim, int n_scan,
                             double eta_tbd, std::uint64_t trial) {
  const Scenario& scn = ctx.scn;
  Rng rng = Rng(scn.seed)
                .derive(kH1Stream, static_cast<std::uint64_t>(ctx.effective_users))
                .derive(trial);

  // Random target: polar-uniform position inside the inspected volume,
  // uniform speed up to the configured maximum, isotropic heading.
  Rng rt = rng.derive(kTargetStream);
  const auto& vol = scn.geometry.inspected;
  const double range = rt.uniform(vol.range_m.lo, vol.range_m.hi);
  const double az = rt.uniform(vol.az_deg.lo, vol.az_deg.hi);
  const double el = rt.uniform(vol.el_deg.lo, vol.el_deg.hi);
  const auto ris = scn.ris_array();
  TargetState target;
  target.position = scn.geometry.ris_position + range * ris.frame.unit_toward({az, el});
  const double speed = rt.uniform(0.0, scn.grids.max_speed_mps);
  const double cz = rt.uniform(-1.0, 1.0);
  const double ph = rt.uniform(0.0, 2.0 * M_PI);
  const double sz = std::sqrt(std::max(0.0, 1.0 - cz * cz));
  target.velocity = speed * Vec3(sz * std::cos(ph), sz * std::sin(ph), cz);
  target.rcs_m2 = ctx.rcs_m2;

  std::vector<PlotList> scans(static_cast<size_t>(n_scan));
  for (int s = 0; s < n_scan; ++s) {
    Rng rs = rng.derive(kScanStream, static_cast<std::uint64_t>(s));
    const StatisticArray a = sim.simulate_scan(s, &target, rs);
    scans[static_cast<size_t>(s)] = extract_plots(scn, a, scn.detection.plot_threshold);
  }
  const TbdDecision dec = tbd_detect(scans, scn.grids.max_speed_mps, eta_tbd);
  TrialOutcome out;
  out.detected = dec.declared;
  if (!dec.declared) return out;

  const int k_last = dec.trajectory.plot_index.back();
  const Plot& final_plot = scans[static_cast<size_t>(n_scan - 1)][static_cast<size_t>(k_last - 1)];
  const Vec3 truth = target.position_at(final_plot.time_s);
  const SmoothedTrack fit = smooth_trajectory(dec.trajectory, scans);
  out.err_raw_m = (final_plot.position - truth).norm();
  out.err_smoothed_m = (fit.position_at(final_plot.time_s) - truth).norm();
  return out;
}

OperatingPoint run_operating_point(const OperatingContext& ctx, int n_scan, double pfa,
                                   int h0_trials, int h1_trials, int threads) {
  const ScanSimulator sim(ctx.scn, ctx.channels, ctx.beamformers);

  std::vector<double> scores(static_cast<size_t>(h0_trials));
  parallel_for(h0_trials, threads, [&](int t) {
    scores[static_cast<size_t>(t)] = h0_window_score(ctx, sim, n_scan, static_cast<std::uint64_t>(t));
  });
  const double eta = calibrate_tbd_threshold([&](int t) { return scores[static_cast<size_t>(t)]; },
                                             h0_trials, pfa);

  std::vector<TrialOutcome> outcomes(static_cast<size_t>(h1_trials));
  parallel_for(h1_trials, threads, [&](int t) {
    outcomes[static_cast<size_t>(t)] =
        h1_window_trial(ctx, sim, n_scan, eta, static_cast<std::uint64_t>(t));
  });

  OperatingPoint p;
  p.users = ctx.scn.geometry.users.count;
  p.gamma_r = ctx.scn.powers.radar_fraction;
  p.n_scan = n_scan;
  p.orthogonal = ctx.orthogonal;
  p.pfa_target = pfa;
  p.eta_tbd = eta;
  p.h0_trials = h0_trials;
  p.h1_trials = h1_trials;
  p.sum_rate = ctx.sum_rate;
  p.seed = ctx.scn.seed;

  std::vector<double> errs, errs_raw;
  for (const auto& o : outcomes)
    if (o.detected) {
      ++p.detections;
      errs.push_back(o.err_smoothed_m);
      errs_raw.push_back(o.err_raw_m);
    }
  p.pd = h1_trials > 0 ? double(p.detections) / h1_trials : 0.0;
  const auto ci = wilson95(p.detections, h1_trials);
  p.pd_lo = ci.lo;
  p.pd_hi = ci.hi;
  if (!errs.empty()) {
    p.rmse_m = position_rmse(errs);
    p.rmse_raw_m = position_rmse(errs_raw);
    p.rmse_defined = true;
  }
  return p;
}

std::vector<OperatingPoint> run_sweep(const Scenario& scn, const std::vector<double>& gamma_grid,
                                      const std::vector<int>& scan_counts,
                                      const std::vector<int>& user_counts, double pfa,
                                      int h0_trials, int h1_trials,
                                      const std::string& cache_dir, int threads) {
  const double rcs = calibrated_rcs(scn, cache_dir, threads);
  std::vector<OperatingPoint> points;
  for (int k : user_counts)
    for (double g : gamma_grid) {
      Scenario s = scn;
      s.geometry.users.count = k;
      s.powers.radar_fraction = g;
      const OperatingContext ctx = prepare_context(s, true, rcs, cache_dir, threads);
      for (int n : scan_counts)
        points.push_back(run_operating_point(ctx, n, pfa, h0_trials, h1_trials, threads));
    }
  return points;
}

std::vector<OperatingPoint> run_orthogonality_study(const Scenario& scn,
                                                    const std::vector<double>& gamma_grid,
                                                    const std::vector<int>& user_counts,
                                                    int n_scan, double pfa, int h0_trials,
                                                    int h1_trials, const std::string& cache_dir,
                                                    int threads) {
  const double rcs = calibrated_rcs(scn, cache_dir, threads);
  std::vector<OperatingPoint> points;
  for (int k : user_counts)
    for (double g : gamma_grid)
      for (bool orth : {true, false}) {
        Scenario s = scn;
        s.geometry.users.count = k;
        s.powers.radar_fraction = g;
        const OperatingContext ctx = prepare_context(s, orth, rcs, cache_dir, threads);
        points.push_back(run_operating_point(ctx, n_scan, pfa, h0_trials, h1_trials, threads));
      }
  return points;
}

double position_rmse(const std::vector<double>& errors_m) {
  if (errors_m.empty()) throw std::invalid_argument("position_rmse: no detected trials");
  double s = 0.0;
  for (double e : errors_m) s += e * e;
  return std::sqrt(s / static_cast<double>(errors_m.size()));
}

void write_operating_points_csv(const std::vector<OperatingPoint>& points,
                                const std::string& path) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& p : points)
    rows.push_back({std::to_string(p.users), format_double(p.gamma_r), std::to_string(p.n_scan),
                    p.orthogonal ? "1" : "0", format_double(p.pfa_target),
                    format_double(p.eta_tbd), std::to_string(p.h0_trials),
                    std::to_string(p.h1_trials), std::to_string(p.detections),
                    format_double(p.pd), format_double(p.pd_lo), format_double(p.pd_hi),
                    p.rmse_defined ? format_double(p.rmse_m) : "",
                    p.rmse_defined ? format_double(p.rmse_raw_m) : "",
                    format_double(p.sum_rate), std::to_string(p.seed)});
  write_csv(path,
            {"users", "gamma_r", "n_scan", "orthogonal", "pfa_target", "eta_tbd", "h0_trials",
             "h1_trials", "detections", "pd", "pd_lo", "pd_hi", "rmse_m", "rmse_raw_m",
             "sum_rate_bits_per_symbol", "seed"},
            rows);
}

}  // namespace risac

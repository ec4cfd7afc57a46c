// Command-line front end: scenario validation, beampattern design, threshold
// calibration, single-trial simulation, Monte Carlo sweeps, and figure-ready
// reports. All outputs land under --out with a manifest.
#include <CLI11.hpp>

#include "risac/beampattern.hpp"
#include "risac/designer.hpp"
#include "risac/detection.hpp"
#include "risac/experiments.hpp"
#include "risac/io.hpp"
#include "risac/parallel.hpp"
#include "risac/scenario.hpp"

#include <iomanip>
#include <iostream>
#include <thread>

namespace {

using namespace risac;

struct CommonArgs {
  std::string scenario_path;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::vector<std::string> overrides;
  int threads = static_cast<int>(std::thread::hardware_concurrency());
  bool full_scale = false;
};

Scenario load(const CommonArgs& a) {
  Scenario scn = load_scenario(a.scenario_path, a.overrides);
  if (a.seed_set) scn.seed = a.seed;
  return scn;
}

void write_manifest(const CommonArgs& a, const Scenario& scn, const std::string& command) {
  ensure_directory(a.out_dir);
  json m;
  m["command"] = command;
  m["scenario"] = a.scenario_path;
  m["scenario_hash"] = fnv1a64(scenario_to_json_text(scn));
  m["seed"] = scn.seed;
  m["overrides"] = a.overrides;
  m["threads"] = a.threads;
  m["full_scale"] = a.full_scale;
  m["version"] = "risac 1.0";
  json_to_file(a.out_dir + "/manifest.json", m);
}

int cmd_validate(const CommonArgs& a) {
  const Scenario scn = load(a);
  const auto violations = validate_scenario(scn);
  const auto specs = derived_radar_specs(scn);
  std::cout << "range resolution        " << specs.range_resolution_m << " m\n"
            << "velocity resolution     " << specs.velocity_resolution_mps << " m/s\n"
            << "cp-limited range        " << specs.cp_limited_range_m << " m\n"
            << "unambiguous range       " << specs.unambiguous_range_m << " m\n"
            << "unambiguous velocity    " << specs.unambiguous_velocity_mps << " m/s\n"
            << "scan duration           " << specs.scan_duration_s << " s\n";
  if (violations.empty()) {
    std::cout << "scenario ok\n";
    return 0;
  }
  for (const auto& v : violations) std::cout << "violation: " << v << "\n";
  return 1;
}

int cmd_design(const CommonArgs& a) {
  const Scenario scn = load(a);
  write_manifest(a, scn, "design");
  const std::string cache = a.out_dir + "/cache";
  const OperatingContext ctx = prepare_context(scn, true, 1.0, cache, a.threads);
  json summary = json::array();
  for (int d = 0; d < scn.n_dir(); ++d) {
    const auto& r = ctx.designs[static_cast<size_t>(d)];
    write_beampattern_csv(scn, ctx.channels, ctx.beamformers[static_cast<size_t>(d)],
                          a.out_dir + "/beampattern_" + std::to_string(d) + ".csv");
    summary.push_back({{"direction", d},
                       {"objective", r.objective_trace.back()},
                       {"mainlobe_power", r.mainlobe_power},
                       {"residual_sidelobe", r.residual_sl},
                       {"residual_eavesdropper", r.residual_ev},
                       {"residual_jammer", r.residual_ja},
                       {"outer_iterations", r.outer_iterations}});
    std::cout << "direction " << d << ": mainlobe " << r.mainlobe_power << ", residuals sl "
              << r.residual_sl << " ev " << r.residual_ev << " ja " << r.residual_ja << "\n";
  }
  json_to_file(a.out_dir + "/designs_summary.json", summary);
  return 0;
}

int cmd_calibrate(const CommonArgs& a) {
  Scenario scn = load(a);
  write_manifest(a, scn, "calibrate");
  const double pfa = a.full_scale ? scn.experiments.full_scale_pfa : scn.detection.pfa;
  const int trials =
      a.full_scale ? scn.experiments.full_scale_h0_trials : scn.experiments.h0_trials;
  const std::string cache = a.out_dir + "/cache";
  const double rcs = calibrated_rcs(scn, cache, a.threads);
  const OperatingContext ctx = prepare_context(scn, true, rcs, cache, a.threads);
  const ScanSimulator sim(ctx.scn, ctx.channels, ctx.beamformers);
  std::vector<double> scores(static_cast<size_t>(trials));
  parallel_for(trials, a.threads, [&](int t) {
    scores[static_cast<size_t>(t)] =
        h0_window_score(ctx, sim, scn.detection.scans, static_cast<std::uint64_t>(t));
  });
  const double eta = calibrate_tbd_threshold(
      [&](int t) { return scores[static_cast<size_t>(t)]; }, trials, pfa);
  json out{{"eta_tbd", eta},     {"pfa", pfa},           {"trials", trials},
           {"scans", scn.detection.scans}, {"rcs_m2", rcs}, {"seed", scn.seed}};
  json_to_file(a.out_dir + "/calibration.json", out);
  std::cout << "eta_tbd " << eta << " at pfa " << pfa << " (" << trials << " windows)\n";
  return 0;
}

int cmd_simulate(const CommonArgs& a) {
  Scenario scn = load(a);
  write_manifest(a, scn, "simulate");
  const std::string cache = a.out_dir + "/cache";
  const double rcs = calibrated_rcs(scn, cache, a.threads);
  const OperatingContext ctx = prepare_context(scn, true, rcs, cache, a.threads);
  const ScanSimulator sim(ctx.scn, ctx.channels, ctx.beamformers);
  const int n_scan = scn.detection.scans;

  const double pfa = a.full_scale ? scn.experiments.full_scale_pfa : scn.detection.pfa;
  const int trials =
      a.full_scale ? scn.experiments.full_scale_h0_trials : scn.experiments.h0_trials;
  std::vector<double> scores(static_cast<size_t>(trials));
  parallel_for(trials, a.threads, [&](int t) {
    scores[static_cast<size_t>(t)] = h0_window_score(ctx, sim, n_scan, static_cast<std::uint64_t>(t));
  });
  const double eta = calibrate_tbd_threshold(
      [&](int t) { return scores[static_cast<size_t>(t)]; }, trials, pfa);

  // One target window, fully traced.
  Rng rng = Rng(scn.seed).derive(0xD1CE);
  const auto& vol = scn.geometry.inspected;
  const auto ris = scn.ris_array();
  TargetState target;
  target.position = scn.geometry.ris_position +
                    rng.uniform(vol.range_m.lo, vol.range_m.hi) *
                        ris.frame.unit_toward({rng.uniform(vol.az_deg.lo, vol.az_deg.hi),
                                               rng.uniform(vol.el_deg.lo, vol.el_deg.hi)});
  const double speed = rng.uniform(0.0, scn.grids.max_speed_mps);
  const double cz = rng.uniform(-1.0, 1.0), ph = rng.uniform(0.0, 2 * M_PI);
  const double sz = std::sqrt(std::max(0.0, 1.0 - cz * cz));
  target.velocity = speed * Vec3(sz * std::cos(ph), sz * std::sin(ph), cz);
  target.rcs_m2 = rcs;

  std::vector<PlotList> scans(static_cast<size_t>(n_scan));
  for (int s = 0; s < n_scan; ++s) {
    Rng rs = rng.derive(13, static_cast<std::uint64_t>(s));
    const StatisticArray arr = sim.simulate_scan(s, &target, rs);
    if (s == 0) dump_statistic_array(arr, a.out_dir + "/statistics_scan0.bin");
    scans[static_cast<size_t>(s)] = extract_plots(scn, arr, scn.detection.plot_threshold);
  }
  write_plot_lists(scans, a.out_dir + "/plots.jsonl");
  const TbdDecision dec = tbd_detect(scans, scn.grids.max_speed_mps, eta);

  json traj;
  traj["declared"] = dec.declared;
  traj["score"] = dec.trajectory.score;
  traj["eta_tbd"] = eta;
  traj["plot_index"] = dec.trajectory.plot_index;
  if (dec.declared) {
    const SmoothedTrack fit = smooth_trajectory(dec.trajectory, scans);
    json pts = json::array();
    for (size_t i = 0; i < fit.time_s.size(); ++i) {
      const Vec3 truth = target.position_at(fit.time_s[i]);
      pts.push_back({{"time_s", fit.time_s[i]},
                     {"smoothed", {fit.position[i].x(), fit.position[i].y(), fit.position[i].z()}},
                     {"truth", {truth.x(), truth.y(), truth.z()}}});
    }
    traj["track"] = pts;
    traj["velocity_estimate"] = {fit.velocity.x(), fit.velocity.y(), fit.velocity.z()};
    traj["velocity_truth"] = {target.velocity.x(), target.velocity.y(), target.velocity.z()};
  }
  json_to_file(a.out_dir + "/trajectory.json", traj);

  for (int d = 0; d < scn.n_dir(); ++d)
    write_beampattern_csv(scn, ctx.channels, ctx.beamformers[static_cast<size_t>(d)],
                          a.out_dir + "/beampattern_" + std::to_string(d) + ".csv");
  std::cout << (dec.declared ? "declared" : "not declared") << ", score "
            << dec.trajectory.score << " vs eta " << eta << "\n";
  return 0;
}

int cmd_sweep(const CommonArgs& a) {
  Scenario scn = load(a);
  write_manifest(a, scn, "sweep");
  const auto& e = scn.experiments;
  const double pfa = a.full_scale ? e.full_scale_pfa : scn.detection.pfa;
  const int h0 = a.full_scale ? e.full_scale_h0_trials : e.h0_trials;
  const int h1 = a.full_scale ? e.full_scale_h1_trials : e.h1_trials;
  const auto points = run_sweep(scn, e.gamma_grid, e.scan_counts, e.user_counts, pfa, h0, h1,
                                a.out_dir + "/cache", a.threads);
  write_operating_points_csv(points, a.out_dir + "/operating_points.csv");
  std::cout << points.size() << " operating points -> " << a.out_dir
            << "/operating_points.csv\n";
  return 0;
}

int cmd_report(const CommonArgs& a) {
  Scenario scn = load(a);
  write_manifest(a, scn, "report");
  const auto& e = scn.experiments;
  const double pfa = a.full_scale ? e.full_scale_pfa : scn.detection.pfa;
  const int h0 = a.full_scale ? e.full_scale_h0_trials : e.h0_trials;
  const int h1 = a.full_scale ? e.full_scale_h1_trials : e.h1_trials;
  const std::string cache = a.out_dir + "/cache";

  // Operating characteristics over the power split and scan count.
  const auto sweep_points =
      run_sweep(scn, e.gamma_grid, e.scan_counts, e.user_counts, pfa, h0, h1, cache, a.threads);
  write_operating_points_csv(sweep_points, a.out_dir + "/fig6.csv");

  // Orthogonality on/off contrast at the configured scan count.
  const auto orth_points = run_orthogonality_study(scn, e.gamma_grid, e.user_counts,
                                                   scn.detection.scans, pfa, h0, h1, cache,
                                                   a.threads);
  write_operating_points_csv(orth_points, a.out_dir + "/fig7.csv");

  std::cout << "fig6.csv and fig7.csv written; run `simulate` for a trajectory instance\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RIS-aided ISAC radar simulation toolkit"};
  app.require_subcommand(1);

  CommonArgs args;
  app.add_option("--scenario", args.scenario_path, "Scenario JSON file")->required();
  app.add_option("--out", args.out_dir, "Output directory");
  auto* seed_opt = app.add_option("--seed", args.seed, "Master seed override");
  app.add_option("--set", args.overrides, "Override scenario values, dotted.key=value");
  app.add_option("--threads", args.threads, "Worker threads");
  app.add_flag("--full-scale", args.full_scale,
               "Use the full-scale false-alarm rate and trial counts (hours of runtime)");

  auto* c_validate = app.add_subcommand("validate", "Audit the scenario's physical consistency");
  auto* c_design = app.add_subcommand("design", "Synthesize per-subvolume beampatterns");
  auto* c_calibrate = app.add_subcommand("calibrate", "Calibrate the detection threshold");
  auto* c_simulate = app.add_subcommand("simulate", "Trace one full detection window");
  auto* c_sweep = app.add_subcommand("sweep", "Monte Carlo operating-point sweep");
  auto* c_report = app.add_subcommand("report", "Emit figure-ready CSV files");

  CLI11_PARSE(app, argc, argv);
  args.seed_set = seed_opt->count() > 0;

  try {
    if (c_validate->parsed()) return cmd_validate(args);
    if (c_design->parsed()) return cmd_design(args);
    if (c_calibrate->parsed()) return cmd_calibrate(args);
    if (c_simulate->parsed()) return cmd_simulate(args);
    if (c_sweep->parsed()) return cmd_sweep(args);
    if (c_report->parsed()) return cmd_report(args);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  }
  return 2;
}

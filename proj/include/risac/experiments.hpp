// Monte Carlo campaigns: detection/false-alarm calibration, operating
// points over the power split and scan count, the orthogonality study, and
// position accuracy summaries.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "risac/designer.hpp"
#include "risac/detection.hpp"
#include "risac/frontend.hpp"

namespace risac {

struct OperatingPoint {
  int users = 0;
  double gamma_r = 0.0;
  int n_scan = 1;
  bool orthogonal = true;
  double pfa_target = 0.0;
  double eta_tbd = 0.0;
  int h0_trials = 0;
  int h1_trials = 0;
  int detections = 0;
  double pd = 0.0, pd_lo = 0.0, pd_hi = 0.0;  // with 95% binomial interval
  double rmse_m = 0.0;
  double rmse_raw_m = 0.0;  // final plot before smoothing
  bool rmse_defined = false;
  double sum_rate = 0.0;
  std::uint64_t seed = 0;
};

// Everything needed to run trials at one (K, gamma_r, orthogonality) point:
// frozen user channels, zero-forcing beamformers, per-subvolume designs, the
// assembled per-direction beamformer sets, and the communication rate.
struct OperatingContext {
  Scenario scn;
  bool orthogonal = true;
  int effective_users = 0;  // 0 when all power goes to the radar
  ChannelSet channels;
  std::vector<CMat> zf;       // per q
  std::vector<CMat> u_basis;  // per q
  std::vector<Eigen::VectorXd> gamma;
  std::vector<DesignResult> designs;           // per direction
  std::vector<BeamformerSet> beamformers;      // per direction
  double sum_rate = 0.0;
  double rcs_m2 = 0.0;
};

// Cross-section matching the configured nominal SNR, computed from the
// all-power-to-radar design of the reference subvolume (cached per scenario).
double calibrated_rcs(const Scenario& scn, const std::string& cache_dir, int threads);

OperatingContext prepare_context(const Scenario& scn, bool orthogonal, double rcs_m2,
                                 const std::string& cache_dir, int threads);

// Best trajectory score of one noise-only window.
double h0_window_score(const OperatingContext& ctx, const ScanSimulator& sim, int n_scan,
                       std::uint64_t trial);

struct TrialOutcome {
  bool detected = false;
  double err_smoothed_m = 0.0;
  double err_raw_m = 0.0;
};

// One window with a random target (uniform position in the inspected
// volume, speed uniform up to the configured maximum).
TrialOutcome h1_window_trial(const OperatingContext& ctx, const ScanSimulator& sim, int n_scan,
                             double eta_tbd, std::uint64_t trial);

// Calibrates the threshold at the requested false-alarm rate, then runs the
// detection trials.
OperatingPoint run_operating_point(const OperatingContext& ctx, int n_scan, double pfa,
                                   int h0_trials, int h1_trials, int threads);

std::vector<OperatingPoint> run_sweep(const Scenario& scn, const std::vector<double>& gamma_grid,
                                      const std::vector<int>& scan_counts,
                                      const std::vector<int>& user_counts, double pfa,
                                      int h0_trials, int h1_trials,
                                      const std::string& cache_dir, int threads);

// Paired sweep with the radar-user orthogonality enabled and disabled.
std::vector<OperatingPoint> run_orthogonality_study(const Scenario& scn,
                                                    const std::vector<double>& gamma_grid,
                                                    const std::vector<int>& user_counts,
                                                    int n_scan, double pfa, int h0_trials,
                                                    int h1_trials, const std::string& cache_dir,
                                                    int threads);

// Root-mean-square Euclidean error; throws when `errors` is empty.
double position_rmse(const std::vector<double>& errors_m);

void write_operating_points_csv(const std::vector<OperatingPoint>& points,
                                const std::string& path);

}  // namespace risac

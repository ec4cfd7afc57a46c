// Detector back-end: plot extraction from statistic arrays, the multi-frame
// track-before-detect processor (dynamic programming plus a brute-force
// oracle), threshold calibration, trajectory smoothing, and successive
// track cancellation.
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "risac/frontend.hpp"
#include "risac/scenario.hpp"

namespace risac {

struct Plot {
  double value = 0.0;    // correlator statistic at the peak
  double range_m = 0.0;
  double az_deg = 0.0;
  double el_deg = 0.0;
  double time_s = 0.0;   // illumination instant of the containing subvolume
  Vec3 position;         // Cartesian, derived from the polar fields
};

using PlotList = std::vector<Plot>;  // plots of one scan; may be empty

// Peaks of the statistic array above the threshold: strict local maxima over
// the (direction, delay, doppler) neighborhood, truncated at the borders.
PlotList extract_plots(const Scenario& scn, const StatisticArray& a, double threshold);

struct Trajectory {
  std::vector<int> plot_index;  // per scan: 0 = not observed, k = k-th plot (1-based)
  double score = 0.0;

  int observations() const {
    int n = 0;
    for (int k : plot_index) n += k > 0 ? 1 : 0;
    return n;
  }
};

struct TbdDecision {
  bool declared = false;
  Trajectory trajectory;  // empty plot_index when no feasible trajectory exists
};

// Kinematic gate between consecutive observed plots: Cartesian displacement
// bounded by max_speed times the elapsed time, gaps included.
bool gate_ok(const Plot& a, const Plot& b, double max_speed_mps);

// Multi-frame detector over the window S_1..S_N: maximizes the summed
// statistic over all trajectories that end in a plot of the last scan and
// respect the kinematic gate; declares a target when the best score exceeds
// the threshold.
TbdDecision tbd_detect(const std::vector<PlotList>& scans, double max_speed_mps,
                       double threshold);

// Exhaustive enumeration oracle; throws when the instance is too large.
TbdDecision brute_force_tbd(const std::vector<PlotList>& scans, double max_speed_mps,
                            double threshold);

// Empirical threshold for the requested false-alarm probability: the
// (1 - pfa) quantile of the best trajectory score under noise-only windows
// produced by `h0_score` (windows without plots score zero).
double calibrate_tbd_threshold(const std::function<double(int)>& h0_score, int trials,
                               double pfa);

struct SmoothedTrack {
  std::vector<double> time_s;          // observed-scans timestamps
  std::vector<Vec3> position;          // fitted positions at those instants
  Vec3 velocity{0, 0, 0};              // fit derivative at the final instant
  int degree = 0;
  bool degenerate = false;             // fewer than two observations

  Vec3 position_at(double t) const;
  Eigen::Matrix<double, 3, Eigen::Dynamic> coeffs;  // per axis, centered time powers
  double t_center = 0.0, t_scale = 1.0;
};

// Least-squares polynomial fit of the trajectory's Cartesian track versus
// time; degree min(2, observations - 1).
SmoothedTrack smooth_trajectory(const Trajectory& traj, const std::vector<PlotList>& scans);

// Successive track cancellation: repeatedly detect, record, and remove the
// winning trajectory's plots until no declaration or max_targets is hit.
std::vector<Trajectory> cancel_tracks(std::vector<PlotList> scans, double max_speed_mps,
                                      double threshold, int max_targets);

// JSON-lines serialization of plot lists (one scan per line) for replay.
// Reading rebuilds the Cartesian positions from the scenario's RIS frame.
void write_plot_lists(const std::vector<PlotList>& scans, const std::string& path);
std::vector<PlotList> read_plot_lists(const std::string& path, const Scenario& scn);

}  // namespace risac

#include "risac/detection.hpp"

#include "risac/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace risac {

PlotList extract_plots(const Scenario& scn, const StatisticArray& a, double threshold) {
  if (threshold <= 0.0) throw std::invalid_argument("extract_plots: threshold must be positive");
  const auto dirs = pointing_directions(scn);
  const Eigen::VectorXd delays = delay_grid(scn);
  const auto ris = scn.ris_array();
  const auto& nb = scn.detection.peak_neighborhood;

  PlotList plots;
  for (int i = 0; i < a.n_dir; ++i)
    for (int j = 0; j < a.n_del; ++j)
      for (int d = 0; d < a.n_dop; ++d) {
        const double v = a.at(i, j, d);
        if (v <= threshold) continue;
        bool peak = true;
        for (int di = -nb[0]; di <= nb[0] && peak; ++di)
          for (int dj = -nb[1]; dj <= nb[1] && peak; ++dj)
            for (int dd = -nb[2]; dd <= nb[2] && peak; ++dd) {
              if (di == 0 && dj == 0 && dd == 0) continue;
              const int ii = i + di, jj = j + dj, ddd = d + dd;
              if (ii < 0 || ii >= a.n_dir || jj < 0 || jj >= a.n_del || ddd < 0 ||
                  ddd >= a.n_dop)
                continue;
              if (a.at(ii, jj, ddd) >= v) peak = false;
            }
        if (!peak) continue;
        Plot p;
        p.value = v;
        p.range_m = kSpeedOfLight * delays(j) / 2.0;
        p.az_deg = dirs[static_cast<size_t>(i)].az_deg;
        p.el_deg = dirs[static_cast<size_t>(i)].el_deg;
        p.time_s = a.dir_time_s[static_cast<size_t>(i)];
        p.position = scn.geometry.ris_position +
                     p.range_m * ris.frame.unit_toward({p.az_deg, p.el_deg});
        plots.push_back(p);
      }
  return plots;
}

bool gate_ok(const Plot& a, const Plot& b, double max_speed_mps) {
  const double dt = std::abs(b.time_s - a.time_s);
  return (a.position - b.position).norm() <= max_speed_mps * dt;
}

TbdDecision tbd_detect(const std::vector<PlotList>& scans, double max_speed_mps,
                       double threshold) {
  const int n = static_cast<int>(scans.size());
  TbdDecision out;
  if (n == 0 || scans.back().empty()) return out;  // no trajectory can end in the last scan

  // best[i][k]: best cumulative score of a trajectory whose latest observed
  // plot is plot k of scan i; prev stores the (scan, plot) backpointer.
  std::vector<std::vector<double>> best(static_cast<size_t>(n));
  std::vector<std::vector<std::pair<int, int>>> prev(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    best[static_cast<size_t>(i)].assign(scans[static_cast<size_t>(i)].size(), 0.0);
    prev[static_cast<size_t>(i)].assign(scans[static_cast<size_t>(i)].size(), {-1, -1});
    for (size_t k = 0; k < scans[static_cast<size_t>(i)].size(); ++k) {
      double inherited = 0.0;
      std::pair<int, int> from{-1, -1};
      for (int e = 0; e < i; ++e)
        for (size_t m = 0; m < scans[static_cast<size_t>(e)].size(); ++m)
          if (gate_ok(scans[static_cast<size_t>(e)][m], scans[static_cast<size_t>(i)][k],
                      max_speed_mps) &&
              best[static_cast<size_t>(e)][m] > inherited) {
            inherited = best[static_cast<size_t>(e)][m];
            from = {e, static_cast<int>(m)};
          }
      best[static_cast<size_t>(i)][k] = scans[static_cast<size_t>(i)][k].value + inherited;
      prev[static_cast<size_t>(i)][k] = from;
    }
  }

  double top = -std::numeric_limits<double>::infinity();
  int top_k = -1;
  for (size_t k = 0; k < scans[static_cast<size_t>(n - 1)].size(); ++k)
    if (best[static_cast<size_t>(n - 1)][k] > top) {
      top = best[static_cast<size_t>(n - 1)][k];
      top_k = static_cast<int>(k);
    }

  out.trajectory.plot_index.assign(static_cast<size_t>(n), 0);
  out.trajectory.score = top_k >= 0 ? top : 0.0;
  int si = n - 1, ki = top_k;
  while (si >= 0 && ki >= 0) {
    out.trajectory.plot_index[static_cast<size_t>(si)] = ki + 1;
    const auto [ps, pk] = prev[static_cast<size_t>(si)][static_cast<size_t>(ki)];
    si = ps;
    ki = pk;
  }
  out.declared = top > threshold;
  return out;
}

TbdDecision brute_force_tbd(const std::vector<PlotList>& scans, double max_speed_mps,
                            double threshold) {
  const int n = static_cast<int>(scans.size());
  double combos = 1.0;
  for (const auto& s : scans) combos *= static_cast<double>(s.size() + 1);
  if (combos > 1e6) throw std::runtime_error("brute_force_tbd: instance too large");

  TbdDecision out;
  if (n == 0 || scans.back().empty()) return out;

  std::vector<int> xi(static_cast<size_t>(n), 0);
  double top = -std::numeric_limits<double>::infinity();
  std::vector<int> top_xi;
  // Odometer over all index vectors; the last scan must carry a plot.
  while (true) {
    if (xi[static_cast<size_t>(n - 1)] > 0) {
      bool ok = true;
      double score = 0.0;
      const Plot* last = nullptr;
      for (int i = 0; i < n && ok; ++i) {
        const int k = xi[static_cast<size_t>(i)];
        if (k == 0) continue;
        const Plot& p = scans[static_cast<size_t>(i)][static_cast<size_t>(k - 1)];
        if (last && !gate_ok(*last, p, max_speed_mps)) ok = false;
        score += p.value;
        last = &p;
      }
      if (ok && score > top) {
        top = score;
        top_xi = xi;
      }
    }
    int pos = 0;
    while (pos < n) {
      if (++xi[static_cast<size_t>(pos)] <= static_cast<int>(scans[static_cast<size_t>(pos)].size()))
        break;
      xi[static_cast<size_t>(pos)] = 0;
      ++pos;
    }
    if (pos == n) break;
  }
  out.trajectory.plot_index = top_xi;
  out.trajectory.score = top_xi.empty() ? 0.0 : top;
  out.declared = !top_xi.empty() && top > threshold;
  return out;
}

double calibrate_tbd_threshold(const std::function<double(int)>& h0_score, int trials,
                               double pfa) {
  if (pfa <= 0.0 || pfa > 1.0) throw std::invalid_argument("calibrate: pfa must be in (0, 1]");
  if (trials < static_cast<int>(std::ceil(10.0 / pfa)))
    throw std::invalid_argument("calibrate: need at least 10/pfa trials");
  std::vector<double> scores(static_cast<size_t>(trials));
  for (int t = 0; t < trials; ++t) scores[static_cast<size_t>(t)] = h0_score(t);
  std::sort(scores.begin(), scores.end(), std::greater<double>());
  // Declare when score > threshold; the m-th largest score leaves m-1
  // exceedances among the calibration windows.
  const int m = std::max(1, static_cast<int>(std::ceil(pfa * trials)));
  return scores[static_cast<size_t>(m - 1)];
}

Vec3 SmoothedTrack::position_at(double t) const {
  const double tt = (t - t_center) / t_scale;
  Vec3 p = Vec3::Zero();
  double pw = 1.0;
  for (Eigen::Index c = 0; c < coeffs.cols(); ++c) {
    p += coeffs.col(c) * pw;
    pw *= tt;
  }
  return p;
}

SmoothedTrack smooth_trajectory(const Trajectory& traj, const std::vector<PlotList>& scans) {
  SmoothedTrack out;
  std::vector<const Plot*> obs;
  for (size_t i = 0; i < traj.plot_index.size(); ++i)
    if (traj.plot_index[i] > 0)
      obs.push_back(&scans[i][static_cast<size_t>(traj.plot_index[i] - 1)]);

  if (obs.size() < 2) {
    out.degenerate = true;
    out.coeffs.resize(3, 1);
    if (!obs.empty()) {
      out.time_s.push_back(obs[0]->time_s);
      out.position.push_back(obs[0]->position);
      out.coeffs.col(0) = obs[0]->position;
      out.t_center = obs[0]->time_s;
    } else {
      out.coeffs.col(0) = Vec3::Zero();
    }
    return out;
  }

  const int n = static_cast<int>(obs.size());
  const int degree = std::min(2, n - 1);
  double tc = 0.0;
  for (const Plot* p : obs) tc += p->time_s;
  tc /= n;
  double ts = 0.0;
  for (const Plot* p : obs) ts = std::max(ts, std::abs(p->time_s - tc));
  if (ts <= 0.0) ts = 1.0;

  Eigen::MatrixXd vand(n, degree + 1);
  Eigen::MatrixXd rhs(n, 3);
  for (int r = 0; r < n; ++r) {
    const double tt = (obs[static_cast<size_t>(r)]->time_s - tc) / ts;
    double pw = 1.0;
    for (int c = 0; c <= degree; ++c) {
      vand(r, c) = pw;
      pw *= tt;
    }
    rhs.row(r) = obs[static_cast<size_t>(r)]->position.transpose();
  }
  const Eigen::MatrixXd sol = vand.colPivHouseholderQr().solve(rhs);  // (deg+1) x 3

  out.degree = degree;
  out.t_center = tc;
  out.t_scale = ts;
  out.coeffs = sol.transpose();
  for (const Plot* p : obs) {
    out.time_s.push_back(p->time_s);
    out.position.push_back(Vec3::Zero());
  }
  for (size_t r = 0; r < obs.size(); ++r) out.position[r] = out.position_at(out.time_s[r]);

  // Velocity from the fit derivative at the last observation.
  const double t_last = obs.back()->time_s;
  const double tt = (t_last - tc) / ts;
  Vec3 v = Vec3::Zero();
  double pw = 1.0;
  for (int c = 1; c <= degree; ++c) {
    v += out.coeffs.col(c) * (c * pw);
    pw *= tt;
  }
  out.velocity = v / ts;
  return out;
}

std::vector<Trajectory> cancel_tracks(std::vector<PlotList> scans, double max_speed_mps,
                                      double threshold, int max_targets) {
  if (max_targets < 1) throw std::invalid_argument("cancel_tracks: max_targets must be >= 1");
  std::vector<Trajectory> confirmed;
  while (static_cast<int>(confirmed.size()) < max_targets) {
    const TbdDecision dec = tbd_detect(scans, max_speed_mps, threshold);
    if (!dec.declared) break;
    confirmed.push_back(dec.trajectory);
    // Remove the used plots; later trajectories may not reuse them.
    for (size_t i = 0; i < dec.trajectory.plot_index.size(); ++i) {
      const int k = dec.trajectory.plot_index[i];
      if (k > 0) scans[i].erase(scans[i].begin() + (k - 1));
    }
  }
  return confirmed;
}

void write_plot_lists(const std::vector<PlotList>& scans, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  for (size_t i = 0; i < scans.size(); ++i) {
    json line;
    line["scan"] = i;
    auto& plots = line["plots"] = json::array();
    for (const auto& p : scans[i])
      plots.push_back({p.value, p.range_m, p.az_deg, p.el_deg, p.time_s});
    f << line.dump() << "\n";
  }
}

std::vector<PlotList> read_plot_lists(const std::string& path, const Scenario& scn) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  const auto ris = scn.ris_array();
  std::vector<PlotList> scans;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    PlotList list;
    for (const auto& row : j.at("plots")) {
      Plot p;
      p.value = row[0].get<double>();
      p.range_m = row[1].get<double>();
      p.az_deg = row[2].get<double>();
      p.el_deg = row[3].get<double>();
      p.time_s = row[4].get<double>();
      p.position = scn.geometry.ris_position +
                   p.range_m * ris.frame.unit_toward({p.az_deg, p.el_deg});
      list.push_back(p);
    }
    scans.push_back(std::move(list));
  }
  return scans;
}

}  // namespace risac

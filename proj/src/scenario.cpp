#include "risac/scenario.hpp"

#include "risac/io.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace risac {
namespace {

constexpr double kBoltzmann = 1.380649e-23;

void check_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw std::runtime_error("scenario: " + path + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed)
      if (it.key() == a) {
        ok = true;
        break;
      }
    if (!ok) throw std::runtime_error("scenario: unknown key '" + path + "." + it.key() + "'");
  }
}

Interval read_interval(const json& j, const char* key, Interval def) {
  if (!j.contains(key)) return def;
  const auto& a = j.at(key);
  if (!a.is_array() || a.size() != 2) throw std::runtime_error(std::string("scenario: ") + key + " must be [lo, hi]");
  return {a[0].get<double>(), a[1].get<double>()};
}

Vec3 read_vec3(const json& j, const char* key, Vec3 def) {
  if (!j.contains(key)) return def;
  const auto& a = j.at(key);
  if (!a.is_array() || a.size() != 3) throw std::runtime_error(std::string("scenario: ") + key + " must be [x, y, z]");
  return {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
}

AngularBox read_box(const json& j, const char* key, AngularBox def) {
  if (!j.contains(key)) return def;
  const auto& b = j.at(key);
  check_keys(b, key, {"az_deg", "el_deg"});
  return {read_interval(b, "az_deg", def.az_deg), read_interval(b, "el_deg", def.el_deg)};
}

PlanarArrayConfig read_array(const json& j, const char* key, PlanarArrayConfig def) {
  if (!j.contains(key)) return def;
  const auto& a = j.at(key);
  check_keys(a, key, {"nx", "nz", "spacing_m"});
  def.nx = a.value("nx", def.nx);
  def.nz = a.value("nz", def.nz);
  def.spacing_m = a.value("spacing_m", def.spacing_m);
  return def;
}

json interval_json(const Interval& v) { return json::array({v.lo, v.hi}); }
json vec3_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }
json box_json(const AngularBox& b) {
  return json{{"az_deg", interval_json(b.az_deg)}, {"el_deg", interval_json(b.el_deg)}};
}
json array_json(const PlanarArrayConfig& a) {
  return json{{"nx", a.nx}, {"nz", a.nz}, {"spacing_m", a.spacing_m}};
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(static_cast<size_t>(n));
  if (n == 1) {
    v[0] = 0.5 * (lo + hi);
    return v;
  }
  for (int i = 0; i < n; ++i) v[static_cast<size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  return v;
}

// Inclusive uniform sampling of an interval with the requested step.
std::vector<double> sample_interval(const Interval& iv, double step) {
  const int n = std::max(1, static_cast<int>(std::lround(iv.span() / step)) + 1);
  return linspace(iv.lo, iv.hi, n);
}

}  // namespace

double Scenario::noise_variance_w() const {
  if (channel.noise_variance_w > 0.0) return channel.noise_variance_w;
  const double f = std::pow(10.0, channel.noise_figure_db / 10.0);
  return f * kBoltzmann * channel.reference_temperature_k * ofdm.spacing_hz;
}

DerivedRadarSpecs derived_radar_specs(const Scenario& scn) {
  const auto& o = scn.ofdm;
  DerivedRadarSpecs d{};
  d.range_resolution_m = kSpeedOfLight / (2.0 * o.employed_subcarriers * o.employed_spacing_hz);
  d.velocity_resolution_mps =
      o.carrier_wavelength_m() / (2.0 * o.symbols_per_cpi * o.symbol_duration_s());
  d.cp_limited_range_m = kSpeedOfLight * o.cyclic_prefix_s / 2.0;
  d.unambiguous_range_m = kSpeedOfLight / (2.0 * o.employed_spacing_hz);
  d.unambiguous_velocity_mps = o.carrier_wavelength_m() / (4.0 * o.symbol_duration_s());
  d.scan_duration_s = scn.scan_duration_s();
  d.symbol_duration_s = o.symbol_duration_s();
  d.cpi_duration_s = o.cpi_duration_s();
  return d;
}

std::vector<Direction> pointing_directions(const Scenario& scn) {
  const auto& v = scn.geometry.inspected;
  const int na = scn.grids.azimuth_directions, ne = scn.grids.elevation_directions;
  std::vector<Direction> dirs;
  dirs.reserve(static_cast<size_t>(na) * ne);
  for (int ie = 0; ie < ne; ++ie) {
    const double el = v.el_deg.lo + (ie + 0.5) * v.el_deg.span() / ne;
    for (int ia = 0; ia < na; ++ia) {
      const double az = v.az_deg.lo + (ia + 0.5) * v.az_deg.span() / na;
      dirs.push_back({az, el});
    }
  }
  return dirs;
}

Eigen::VectorXd delay_grid(const Scenario& scn) {
  const auto& r = scn.geometry.inspected.range_m;
  const auto v = linspace(2.0 * r.lo / kSpeedOfLight, 2.0 * r.hi / kSpeedOfLight,
                          scn.grids.delay_points);
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Eigen::VectorXd doppler_grid(const Scenario& scn) {
  const double vmax = scn.grids.max_speed_mps;
  const auto v = linspace(-vmax, vmax, scn.grids.doppler_points);
  Eigen::VectorXd nu(static_cast<Eigen::Index>(v.size()));
  for (Eigen::Index i = 0; i < nu.size(); ++i)
    nu[i] = 2.0 * v[static_cast<size_t>(i)] / scn.ofdm.carrier_wavelength_m();
  return nu;
}

std::vector<Direction> mainlobe_directions(const Scenario& scn, int dir_index) {
  const auto center = pointing_directions(scn).at(static_cast<size_t>(dir_index));
  const auto& r = scn.regions;
  const Interval az{center.az_deg - r.mainlobe_halfwidth_az_deg,
                    center.az_deg + r.mainlobe_halfwidth_az_deg};
  const Interval el{center.el_deg - r.mainlobe_halfwidth_el_deg,
                    center.el_deg + r.mainlobe_halfwidth_el_deg};
  std::vector<Direction> out;
  for (double e : sample_interval(el, r.mainlobe_step_el_deg))
    for (double a : sample_interval(az, r.mainlobe_step_az_deg)) out.push_back({a, e});
  return out;
}

std::vector<Direction> sidelobe_directions(const Scenario& scn, int dir_index) {
  const auto center = pointing_directions(scn).at(static_cast<size_t>(dir_index));
  const auto& r = scn.regions;
  std::vector<Direction> out;
  for (double e : sample_interval(r.sidelobe_band.el_deg, r.sidelobe_step_deg))
    for (double a : sample_interval(r.sidelobe_band.az_deg, r.sidelobe_step_deg)) {
      if (std::abs(a - center.az_deg) < r.transition_halfwidth_az_deg) continue;
      out.push_back({a, e});
    }
  return out;
}

namespace {
std::vector<Direction> sample_box(const AngularBox& box, double step) {
  std::vector<Direction> out;
  for (double e : sample_interval(box.el_deg, step))
    for (double a : sample_interval(box.az_deg, step)) out.push_back({a, e});
  return out;
}
}  // namespace

std::vector<Direction> eavesdropper_directions(const Scenario& scn) {
  return sample_box(scn.regions.eavesdropper_box, scn.regions.eavesdropper_step_deg);
}

std::vector<Direction> jammer_directions(const Scenario& scn) {
  return sample_box(scn.regions.jammer_box, scn.regions.jammer_step_deg);
}

std::vector<std::string> validate_scenario(const Scenario& scn) {
  std::vector<std::string> v;
  const auto& o = scn.ofdm;
  auto fail = [&](const std::string& msg) { v.push_back(msg); };

  if (o.carrier_hz <= 0 || o.spacing_hz <= 0 || o.employed_spacing_hz <= 0)
    fail("ofdm: frequencies must be positive");
  if (o.available_subcarriers < 1 || o.employed_subcarriers < 1 || o.symbols_per_cpi < 1 ||
      o.guard_symbols < 0)
    fail("ofdm: counts must be positive");
  const double ratio = o.employed_spacing_hz / o.spacing_hz;
  if (std::abs(ratio - std::lround(ratio)) > 1e-9)
    fail("ofdm: employed spacing must be an integer multiple of the available spacing");
  if (o.employed_subcarriers * o.employed_spacing_hz > o.available_subcarriers * o.spacing_hz)
    fail("ofdm: employed band exceeds the available band");
  if (o.cyclic_prefix_s <= 0) fail("ofdm: cyclic prefix must be positive");
  if (o.power_per_subcarrier_w <= 0) fail("ofdm: power must be positive");

  const double d_tx = scn.tx_array().aperture();
  const double d_rx = scn.rx_array().aperture();
  const double d_ris = scn.ris_array().aperture();
  const double narrowband = (d_tx + d_rx + d_ris) * o.spacing_hz / kSpeedOfLight;
  if (narrowband >= 0.1) {
    std::ostringstream s;
    s << "narrowband assumption violated: aperture sum " << (d_tx + d_rx + d_ris)
      << " m vs c/W_o, ratio " << narrowband;
    fail(s.str());
  }

  const double lam = o.band_edge_wavelength_m();
  const double rmin = scn.geometry.inspected.range_m.lo;
  const double farfield = 2.0 * d_ris * d_ris / lam;
  if (rmin < farfield) {
    std::ostringstream s;
    s << "far-field assumption violated: R_min " << rmin << " m < 2*aperture^2/lambda "
      << farfield << " m";
    fail(s.str());
  }

  const double bs_ris = (scn.geometry.bs_position - scn.geometry.ris_position).norm();
  const double max_radar_delay =
      2.0 * (scn.geometry.inspected.range_m.hi + bs_ris) / kSpeedOfLight;
  if (max_radar_delay > o.cyclic_prefix_s) {
    std::ostringstream s;
    s << "radar path delay " << max_radar_delay << " s exceeds the cyclic prefix "
      << o.cyclic_prefix_s << " s";
    fail(s.str());
  }
  const auto& u = scn.geometry.users;
  double max_user_dist = 0.0;
  for (double x : {u.x_m.lo, u.x_m.hi})
    for (double y : {u.y_m.lo, u.y_m.hi})
      for (double z : {u.z_m.lo, u.z_m.hi})
        max_user_dist = std::max(max_user_dist, (Vec3(x, y, z) - scn.geometry.bs_position).norm());
  if (max_user_dist / kSpeedOfLight > o.cyclic_prefix_s)
    fail("user path delay exceeds the cyclic prefix");

  // Disjointness of the user region and the inspected volume, checked on
  // Cartesian bounding boxes.
  {
    const auto ris = scn.ris_array();
    const auto& iv = scn.geometry.inspected;
    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
    Vec3 hi = -lo;
    for (double rr : {iv.range_m.lo, iv.range_m.hi})
      for (double az : {iv.az_deg.lo, iv.az_deg.mid(), iv.az_deg.hi})
        for (double el : {iv.el_deg.lo, iv.el_deg.mid(), iv.el_deg.hi}) {
          const Vec3 p = scn.geometry.ris_position + rr * ris.frame.unit_toward({az, el});
          lo = lo.cwiseMin(p);
          hi = hi.cwiseMax(p);
        }
    const bool disjoint = u.x_m.hi < lo.x() || u.x_m.lo > hi.x() || u.y_m.hi < lo.y() ||
                          u.y_m.lo > hi.y() || u.z_m.hi < lo.z() || u.z_m.lo > hi.z();
    if (!disjoint) fail("user region intersects the inspected volume");
  }

  if (scn.powers.radar_fraction < 0.0 || scn.powers.radar_fraction > 1.0)
    fail("powers: radar_fraction must lie in [0, 1]");
  if (scn.geometry.users.count < 1) fail("users: count must be >= 1");
  if (scn.geometry.users.count >= scn.arrays.tx.nx * scn.arrays.tx.nz)
    fail("users: count must be smaller than the transmit array size");
  if (scn.regions.epsilon_sidelobe <= 0 || scn.regions.epsilon_eavesdropper <= 0 ||
      scn.regions.epsilon_jammer <= 0)
    fail("regions: bounds must be positive");
  if (scn.detection.pfa <= 0 || scn.detection.pfa >= 1) fail("detection: pfa must be in (0, 1)");
  if (scn.detection.plot_threshold <= 0) fail("detection: plot threshold must be positive");
  if (scn.detection.scans < 1) fail("detection: scans must be >= 1");
  if (scn.grids.delay_points < 2 || scn.grids.doppler_points < 1 ||
      scn.grids.azimuth_directions < 1 || scn.grids.elevation_directions < 1)
    fail("grids: insufficient sampling points");
  if (scn.grids.max_speed_mps <= 0) fail("grids: max speed must be positive");
  if (scn.design.beta_relative <= 0) fail("design: beta must be positive");
  return v;
}

Scenario scenario_from_json_text(const std::string& text) {
  const json j = json::parse(text);
  check_keys(j, "", {"seed", "ofdm", "arrays", "geometry", "grids", "regions", "powers",
                     "channel", "target", "detection", "design", "experiments"});
  Scenario s;
  s.seed = j.value("seed", s.seed);
  if (j.contains("ofdm")) {
    const auto& o = j.at("ofdm");
    check_keys(o, "ofdm",
               {"carrier_hz", "spacing_hz", "available_subcarriers", "cyclic_prefix_s",
                "employed_subcarriers", "employed_spacing_hz", "symbols_per_cpi",
                "guard_symbols", "power_per_subcarrier_w"});
    s.ofdm.carrier_hz = o.value("carrier_hz", s.ofdm.carrier_hz);
    s.ofdm.spacing_hz = o.value("spacing_hz", s.ofdm.spacing_hz);
    s.ofdm.available_subcarriers = o.value("available_subcarriers", s.ofdm.available_subcarriers);
    s.ofdm.cyclic_prefix_s = o.value("cyclic_prefix_s", s.ofdm.cyclic_prefix_s);
    s.ofdm.employed_subcarriers = o.value("employed_subcarriers", s.ofdm.employed_subcarriers);
    s.ofdm.employed_spacing_hz = o.value("employed_spacing_hz", s.ofdm.employed_spacing_hz);
    s.ofdm.symbols_per_cpi = o.value("symbols_per_cpi", s.ofdm.symbols_per_cpi);
    s.ofdm.guard_symbols = o.value("guard_symbols", s.ofdm.guard_symbols);
    s.ofdm.power_per_subcarrier_w = o.value("power_per_subcarrier_w", s.ofdm.power_per_subcarrier_w);
  }
  if (j.contains("arrays")) {
    const auto& a = j.at("arrays");
    check_keys(a, "arrays", {"tx", "rx", "ris"});
    s.arrays.tx = read_array(a, "tx", s.arrays.tx);
    s.arrays.rx = read_array(a, "rx", s.arrays.rx);
    s.arrays.ris = read_array(a, "ris", s.arrays.ris);
  }
  if (j.contains("geometry")) {
    const auto& g = j.at("geometry");
    check_keys(g, "geometry",
               {"bs_position_m", "ris_position_m", "bs_boresight", "ris_boresight",
                "inspected_volume", "users"});
    s.geometry.bs_position = read_vec3(g, "bs_position_m", s.geometry.bs_position);
    s.geometry.ris_position = read_vec3(g, "ris_position_m", s.geometry.ris_position);
    s.geometry.bs_boresight = read_vec3(g, "bs_boresight", s.geometry.bs_boresight);
    s.geometry.ris_boresight = read_vec3(g, "ris_boresight", s.geometry.ris_boresight);
    if (g.contains("inspected_volume")) {
      const auto& iv = g.at("inspected_volume");
      check_keys(iv, "inspected_volume", {"range_m", "azimuth_deg", "elevation_deg"});
      s.geometry.inspected.range_m = read_interval(iv, "range_m", s.geometry.inspected.range_m);
      s.geometry.inspected.az_deg = read_interval(iv, "azimuth_deg", s.geometry.inspected.az_deg);
      s.geometry.inspected.el_deg = read_interval(iv, "elevation_deg", s.geometry.inspected.el_deg);
    }
    if (g.contains("users")) {
      const auto& uu = g.at("users");
      check_keys(uu, "users", {"count", "x_m", "y_m", "z_m"});
      s.geometry.users.count = uu.value("count", s.geometry.users.count);
      s.geometry.users.x_m = read_interval(uu, "x_m", s.geometry.users.x_m);
      s.geometry.users.y_m = read_interval(uu, "y_m", s.geometry.users.y_m);
      s.geometry.users.z_m = read_interval(uu, "z_m", s.geometry.users.z_m);
    }
  }
  if (j.contains("grids")) {
    const auto& g = j.at("grids");
    check_keys(g, "grids",
               {"azimuth_directions", "elevation_directions", "delay_points", "doppler_points",
                "max_speed_mps"});
    s.grids.azimuth_directions = g.value("azimuth_directions", s.grids.azimuth_directions);
    s.grids.elevation_directions = g.value("elevation_directions", s.grids.elevation_directions);
    s.grids.delay_points = g.value("delay_points", s.grids.delay_points);
    s.grids.doppler_points = g.value("doppler_points", s.grids.doppler_points);
    s.grids.max_speed_mps = g.value("max_speed_mps", s.grids.max_speed_mps);
  }
  if (j.contains("regions")) {
    const auto& r = j.at("regions");
    check_keys(r, "regions",
               {"mainlobe_halfwidth_az_deg", "mainlobe_halfwidth_el_deg", "mainlobe_step_az_deg",
                "mainlobe_step_el_deg", "sidelobe_band", "sidelobe_step_deg",
                "transition_halfwidth_az_deg", "eavesdropper_box", "eavesdropper_step_deg",
                "jammer_box", "jammer_step_deg", "epsilon_sidelobe", "epsilon_eavesdropper",
                "epsilon_jammer"});
    auto& rr = s.regions;
    rr.mainlobe_halfwidth_az_deg = r.value("mainlobe_halfwidth_az_deg", rr.mainlobe_halfwidth_az_deg);
    rr.mainlobe_halfwidth_el_deg = r.value("mainlobe_halfwidth_el_deg", rr.mainlobe_halfwidth_el_deg);
    rr.mainlobe_step_az_deg = r.value("mainlobe_step_az_deg", rr.mainlobe_step_az_deg);
    rr.mainlobe_step_el_deg = r.value("mainlobe_step_el_deg", rr.mainlobe_step_el_deg);
    rr.sidelobe_band = read_box(r, "sidelobe_band", rr.sidelobe_band);
    rr.sidelobe_step_deg = r.value("sidelobe_step_deg", rr.sidelobe_step_deg);
    rr.transition_halfwidth_az_deg = r.value("transition_halfwidth_az_deg", rr.transition_halfwidth_az_deg);
    rr.eavesdropper_box = read_box(r, "eavesdropper_box", rr.eavesdropper_box);
    rr.eavesdropper_step_deg = r.value("eavesdropper_step_deg", rr.eavesdropper_step_deg);
    rr.jammer_box = read_box(r, "jammer_box", rr.jammer_box);
    rr.jammer_step_deg = r.value("jammer_step_deg", rr.jammer_step_deg);
    rr.epsilon_sidelobe = r.value("epsilon_sidelobe", rr.epsilon_sidelobe);
    rr.epsilon_eavesdropper = r.value("epsilon_eavesdropper", rr.epsilon_eavesdropper);
    rr.epsilon_jammer = r.value("epsilon_jammer", rr.epsilon_jammer);
  }
  if (j.contains("powers")) {
    const auto& p = j.at("powers");
    check_keys(p, "powers", {"radar_fraction"});
    s.powers.radar_fraction = p.value("radar_fraction", s.powers.radar_fraction);
  }
  if (j.contains("channel")) {
    const auto& c = j.at("channel");
    check_keys(c, "channel",
               {"ricean_factor_db", "noise_figure_db", "reference_temperature_k",
                "noise_variance_w"});
    s.channel.ricean_factor_db = c.value("ricean_factor_db", s.channel.ricean_factor_db);
    s.channel.noise_figure_db = c.value("noise_figure_db", s.channel.noise_figure_db);
    s.channel.reference_temperature_k = c.value("reference_temperature_k", s.channel.reference_temperature_k);
    s.channel.noise_variance_w = c.value("noise_variance_w", s.channel.noise_variance_w);
  }
  if (j.contains("target")) {
    const auto& t = j.at("target");
    check_keys(t, "target",
               {"rcs_m2", "nominal_snr_db", "reference_range_m", "reference_direction"});
    s.target.rcs_m2 = t.value("rcs_m2", s.target.rcs_m2);
    s.target.nominal_snr_db = t.value("nominal_snr_db", s.target.nominal_snr_db);
    s.target.reference_range_m = t.value("reference_range_m", s.target.reference_range_m);
    s.target.reference_direction = t.value("reference_direction", s.target.reference_direction);
  }
  if (j.contains("detection")) {
    const auto& d = j.at("detection");
    check_keys(d, "detection",
               {"plot_threshold", "pfa", "scans", "max_targets", "peak_neighborhood"});
    s.detection.plot_threshold = d.value("plot_threshold", s.detection.plot_threshold);
    s.detection.pfa = d.value("pfa", s.detection.pfa);
    s.detection.scans = d.value("scans", s.detection.scans);
    s.detection.max_targets = d.value("max_targets", s.detection.max_targets);
    if (d.contains("peak_neighborhood")) {
      const auto& p = d.at("peak_neighborhood");
      if (!p.is_array() || p.size() != 3)
        throw std::runtime_error("scenario: detection.peak_neighborhood must be [dir, delay, doppler]");
      for (int i = 0; i < 3; ++i) s.detection.peak_neighborhood[static_cast<size_t>(i)] = p[static_cast<size_t>(i)].get<int>();
    }
  }
  if (j.contains("design")) {
    const auto& d = j.at("design");
    check_keys(d, "design",
               {"beta_relative", "inner_tol", "inner_max", "outer_tol", "outer_max", "armijo_c1",
                "armijo_backtracks", "phase_states"});
    s.design.beta_relative = d.value("beta_relative", s.design.beta_relative);
    s.design.inner_tol = d.value("inner_tol", s.design.inner_tol);
    s.design.inner_max = d.value("inner_max", s.design.inner_max);
    s.design.outer_tol = d.value("outer_tol", s.design.outer_tol);
    s.design.outer_max = d.value("outer_max", s.design.outer_max);
    s.design.armijo_c1 = d.value("armijo_c1", s.design.armijo_c1);
    s.design.armijo_backtracks = d.value("armijo_backtracks", s.design.armijo_backtracks);
    s.design.phase_states = d.value("phase_states", s.design.phase_states);
  }
  if (j.contains("experiments")) {
    const auto& e = j.at("experiments");
    check_keys(e, "experiments",
               {"h0_trials", "h1_trials", "gamma_grid", "scan_counts", "user_counts",
                "full_scale_pfa", "full_scale_h0_trials", "full_scale_h1_trials"});
    s.experiments.h0_trials = e.value("h0_trials", s.experiments.h0_trials);
    s.experiments.h1_trials = e.value("h1_trials", s.experiments.h1_trials);
    if (e.contains("gamma_grid")) s.experiments.gamma_grid = e.at("gamma_grid").get<std::vector<double>>();
    if (e.contains("scan_counts")) s.experiments.scan_counts = e.at("scan_counts").get<std::vector<int>>();
    if (e.contains("user_counts")) s.experiments.user_counts = e.at("user_counts").get<std::vector<int>>();
    s.experiments.full_scale_pfa = e.value("full_scale_pfa", s.experiments.full_scale_pfa);
    s.experiments.full_scale_h0_trials = e.value("full_scale_h0_trials", s.experiments.full_scale_h0_trials);
    s.experiments.full_scale_h1_trials = e.value("full_scale_h1_trials", s.experiments.full_scale_h1_trials);
  }
  return s;
}

std::string scenario_to_json_text(const Scenario& s) {
  json j;
  j["seed"] = s.seed;
  j["ofdm"] = {{"carrier_hz", s.ofdm.carrier_hz},
               {"spacing_hz", s.ofdm.spacing_hz},
               {"available_subcarriers", s.ofdm.available_subcarriers},
               {"cyclic_prefix_s", s.ofdm.cyclic_prefix_s},
               {"employed_subcarriers", s.ofdm.employed_subcarriers},
               {"employed_spacing_hz", s.ofdm.employed_spacing_hz},
               {"symbols_per_cpi", s.ofdm.symbols_per_cpi},
               {"guard_symbols", s.ofdm.guard_symbols},
               {"power_per_subcarrier_w", s.ofdm.power_per_subcarrier_w}};
  j["arrays"] = {{"tx", array_json(s.arrays.tx)},
                 {"rx", array_json(s.arrays.rx)},
                 {"ris", array_json(s.arrays.ris)}};
  j["geometry"] = {{"bs_position_m", vec3_json(s.geometry.bs_position)},
                   {"ris_position_m", vec3_json(s.geometry.ris_position)},
                   {"bs_boresight", vec3_json(s.geometry.bs_boresight)},
                   {"ris_boresight", vec3_json(s.geometry.ris_boresight)},
                   {"inspected_volume",
                    {{"range_m", interval_json(s.geometry.inspected.range_m)},
                     {"azimuth_deg", interval_json(s.geometry.inspected.az_deg)},
                     {"elevation_deg", interval_json(s.geometry.inspected.el_deg)}}},
                   {"users",
                    {{"count", s.geometry.users.count},
                     {"x_m", interval_json(s.geometry.users.x_m)},
                     {"y_m", interval_json(s.geometry.users.y_m)},
                     {"z_m", interval_json(s.geometry.users.z_m)}}}};
  j["grids"] = {{"azimuth_directions", s.grids.azimuth_directions},
                {"elevation_directions", s.grids.elevation_directions},
                {"delay_points", s.grids.delay_points},
                {"doppler_points", s.grids.doppler_points},
                {"max_speed_mps", s.grids.max_speed_mps}};
  j["regions"] = {{"mainlobe_halfwidth_az_deg", s.regions.mainlobe_halfwidth_az_deg},
                  {"mainlobe_halfwidth_el_deg", s.regions.mainlobe_halfwidth_el_deg},
                  {"mainlobe_step_az_deg", s.regions.mainlobe_step_az_deg},
                  {"mainlobe_step_el_deg", s.regions.mainlobe_step_el_deg},
                  {"sidelobe_band", box_json(s.regions.sidelobe_band)},
                  {"sidelobe_step_deg", s.regions.sidelobe_step_deg},
                  {"transition_halfwidth_az_deg", s.regions.transition_halfwidth_az_deg},
                  {"eavesdropper_box", box_json(s.regions.eavesdropper_box)},
                  {"eavesdropper_step_deg", s.regions.eavesdropper_step_deg},
                  {"jammer_box", box_json(s.regions.jammer_box)},
                  {"jammer_step_deg", s.regions.jammer_step_deg},
                  {"epsilon_sidelobe", s.regions.epsilon_sidelobe},
                  {"epsilon_eavesdropper", s.regions.epsilon_eavesdropper},
                  {"epsilon_jammer", s.regions.epsilon_jammer}};
  j["powers"] = {{"radar_fraction", s.powers.radar_fraction}};
  j["channel"] = {{"ricean_factor_db", s.channel.ricean_factor_db},
                  {"noise_figure_db", s.channel.noise_figure_db},
                  {"reference_temperature_k", s.channel.reference_temperature_k},
                  {"noise_variance_w", s.channel.noise_variance_w}};
  j["target"] = {{"rcs_m2", s.target.rcs_m2},
                 {"nominal_snr_db", s.target.nominal_snr_db},
                 {"reference_range_m", s.target.reference_range_m},
                 {"reference_direction", s.target.reference_direction}};
  j["detection"] = {{"plot_threshold", s.detection.plot_threshold},
                    {"pfa", s.detection.pfa},
                    {"scans", s.detection.scans},
                    {"max_targets", s.detection.max_targets},
                    {"peak_neighborhood", s.detection.peak_neighborhood}};
  j["design"] = {{"beta_relative", s.design.beta_relative},
                 {"inner_tol", s.design.inner_tol},
                 {"inner_max", s.design.inner_max},
                 {"outer_tol", s.design.outer_tol},
                 {"outer_max", s.design.outer_max},
                 {"armijo_c1", s.design.armijo_c1},
                 {"armijo_backtracks", s.design.armijo_backtracks},
                 {"phase_states", s.design.phase_states}};
  j["experiments"] = {{"h0_trials", s.experiments.h0_trials},
                      {"h1_trials", s.experiments.h1_trials},
                      {"gamma_grid", s.experiments.gamma_grid},
                      {"scan_counts", s.experiments.scan_counts},
                      {"user_counts", s.experiments.user_counts},
                      {"full_scale_pfa", s.experiments.full_scale_pfa},
                      {"full_scale_h0_trials", s.experiments.full_scale_h0_trials},
                      {"full_scale_h1_trials", s.experiments.full_scale_h1_trials}};
  return j.dump(2);
}

Scenario load_scenario(const std::string& path) {
  return load_scenario(path, {});
}

Scenario load_scenario(const std::string& path, const std::vector<std::string>& overrides) {
  json j = json_from_file(path);
  for (const auto& ov : overrides) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("override must be key.path=value: " + ov);
    const std::string key = ov.substr(0, eq);
    const std::string val = ov.substr(eq + 1);
    std::vector<std::string> parts;
    std::stringstream ss(key);
    std::string part;
    while (std::getline(ss, part, '.')) parts.push_back(part);
    if (parts.empty()) throw std::runtime_error("empty override key");
    json* node = &j;
    for (size_t i = 0; i + 1 < parts.size(); ++i) {
      if (!node->is_object() || !node->contains(parts[i]))
        throw std::runtime_error("unknown override key: " + key);
      node = &node->at(parts[i]);
    }
    if (!node->is_object() || !node->contains(parts.back()))
      throw std::runtime_error("unknown override key: " + key);
    json parsed;
    try {
      parsed = json::parse(val);
    } catch (const json::parse_error&) {
      parsed = val;  // plain string
    }
    (*node)[parts.back()] = parsed;
  }
  return scenario_from_json_text(j.dump());
}

std::uint64_t design_relevant_hash(const Scenario& s) {
  json j;
  const json full = json::parse(scenario_to_json_text(s));
  for (const char* k : {"seed", "ofdm", "arrays", "geometry", "regions", "design"})
    j[k] = full.at(k);
  j["gamma_r"] = s.powers.radar_fraction;
  j["users"] = s.geometry.users.count;
  j["directions"] = {s.grids.azimuth_directions, s.grids.elevation_directions};
  return fnv1a64(j.dump());
}

}  // namespace risac

// Scenario configuration: OFDM numerology, array layouts, scene geometry,
// radar grids, beampattern control regions, and campaign parameters.
// Loaded from a JSON document; all units SI, all angles degrees.
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "risac/geometry.hpp"

namespace risac {

struct OfdmConfig {
  double carrier_hz = 3.5e9;
  double spacing_hz = 15e3;        // spacing of the available subcarriers
  int available_subcarriers = 3300;
  double cyclic_prefix_s = 10e-3 / 140.0 - 1.0 / 15e3;
  int employed_subcarriers = 32;
  double employed_spacing_hz = 720e3;
  int symbols_per_cpi = 64;
  int guard_symbols = 76;
  double power_per_subcarrier_w = 4.803e-6;

  double symbol_duration_s() const { return 1.0 / spacing_hz + cyclic_prefix_s; }
  double cpi_duration_s() const { return symbols_per_cpi * symbol_duration_s(); }
  double dwell_duration_s() const {
    return (symbols_per_cpi + guard_symbols) * symbol_duration_s();
  }
  double carrier_wavelength_m() const { return kSpeedOfLight / carrier_hz; }
  // Wavelength at the lower edge of the available band; sets the default
  // element spacing and the far-field bound.
  double band_edge_wavelength_m() const {
    return kSpeedOfLight / (carrier_hz - 0.5 * available_subcarriers * spacing_hz);
  }
  // Employed subcarriers are centered on the carrier.
  double subcarrier_frequency(int q) const {  // q in 1..employed_subcarriers
    return carrier_hz + (q - 0.5 * (employed_subcarriers + 1)) * employed_spacing_hz;
  }
};

struct PlanarArrayConfig {
  int nx = 1, nz = 1;
  double spacing_m = 0.0;  // <= 0: half of the band-edge wavelength
};

struct ArraysConfig {
  PlanarArrayConfig tx{5, 3, 0.0};
  PlanarArrayConfig rx{5, 3, 0.0};
  PlanarArrayConfig ris{8, 8, 0.0};
};

struct Interval {
  double lo = 0.0, hi = 0.0;
  double span() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  bool contains(double v) const { return v >= lo && v <= hi; }
};

struct AngularBox {
  Interval az_deg, el_deg;
  bool contains(const Direction& d) const {
    return az_deg.contains(d.az_deg) && el_deg.contains(d.el_deg);
  }
};

// Inspected volume in polar coordinates relative to the RIS.
struct VolumeSpec {
  Interval range_m{10.0, 200.0};
  Interval az_deg{-22.5, 22.5};
  Interval el_deg{5.0, 15.0};
};

struct UserPlacement {
  int count = 3;
  Interval x_m{-150.0, 150.0};
  Interval y_m{-250.0, -50.0};
  Interval z_m{1.5, 1.5};
};

struct GeometryConfig {
  Vec3 bs_position{-1.5, 1.5, 25.0};
  Vec3 ris_position{0.0, 0.0, 25.0};
  Vec3 bs_boresight{0.0, -1.0, 0.0};
  Vec3 ris_boresight{0.0, 1.0, 0.0};
  VolumeSpec inspected;
  UserPlacement users;
};

struct GridConfig {
  int azimuth_directions = 6;
  int elevation_directions = 1;
  int delay_points = 60;
  int doppler_points = 9;
  double max_speed_mps = 40.0;
};

struct RegionConfig {
  // Mainlobe box half-widths around each pointing direction.
  double mainlobe_halfwidth_az_deg = 3.75;
  double mainlobe_halfwidth_el_deg = 5.0;
  double mainlobe_step_az_deg = 1.25;
  double mainlobe_step_el_deg = 2.5;
  // Sidelobe-control band; a transition strip around the active pointing
  // direction is excluded so the constraint set stays feasible.
  AngularBox sidelobe_band{{-30.0, 30.0}, {7.5, 12.5}};
  double sidelobe_step_deg = 2.5;
  double transition_halfwidth_az_deg = 11.25;
  AngularBox eavesdropper_box{{-34.0, -28.0}, {4.0, 10.0}};
  double eavesdropper_step_deg = 2.0;
  AngularBox jammer_box{{28.0, 34.0}, {10.0, 16.0}};
  double jammer_step_deg = 2.0;
  double epsilon_sidelobe = 1e-8;
  double epsilon_eavesdropper = 1e-8;
  double epsilon_jammer = 1e-8;
};

struct PowerConfig {
  double radar_fraction = 0.5;  // gamma_r, shared by all subcarriers
};

struct ChannelConfig {
  double ricean_factor_db = 20.0;
  double noise_figure_db = 5.0;
  double reference_temperature_k = 293.0;
  double noise_variance_w = 0.0;  // <= 0: F * kB * T0 * W_o
};

struct TargetConfig {
  double rcs_m2 = 0.0;  // <= 0: calibrated from the nominal SNR
  double nominal_snr_db = 27.0;
  double reference_range_m = 105.0;
  int reference_direction = 3;  // subvolume index, 0-based
};

struct DetectionConfig {
  double plot_threshold = 5.0;
  double pfa = 1e-2;
  int scans = 15;
  int max_targets = 1;
  std::array<int, 3> peak_neighborhood{1, 2, 1};  // direction, delay, doppler
};

struct DesignConfig {
  double beta_relative = 3.0;  // penalty weight, relative to the mainlobe optimum
  double inner_tol = 1e-6;
  int inner_max = 60;
  double outer_tol = 1e-5;
  int outer_max = 6;
  double armijo_c1 = 1e-4;
  int armijo_backtracks = 40;
  int phase_states = 0;  // 0: continuous phases
};

struct ExperimentConfig {
  int h0_trials = 2000;
  int h1_trials = 500;
  std::vector<double> gamma_grid{0.05, 0.1, 0.2, 0.35, 0.5, 0.75, 1.0};
  std::vector<int> scan_counts{1, 5, 15};
  std::vector<int> user_counts{3};
  double full_scale_pfa = 1e-3;
  int full_scale_h0_trials = 100000;
  int full_scale_h1_trials = 2000;
};

struct Scenario {
  std::uint64_t seed = 20250520;
  OfdmConfig ofdm;
  ArraysConfig arrays;
  GeometryConfig geometry;
  GridConfig grids;
  RegionConfig regions;
  PowerConfig powers;
  ChannelConfig channel;
  TargetConfig target;
  DetectionConfig detection;
  DesignConfig design;
  ExperimentConfig experiments;

  double array_spacing_m(const PlanarArrayConfig& a) const {
    return a.spacing_m > 0.0 ? a.spacing_m : 0.5 * ofdm.band_edge_wavelength_m();
  }
  ArrayGeometry tx_array() const {
    return ArrayGeometry::planar(geometry.bs_position, geometry.bs_boresight, arrays.tx.nx,
                                 arrays.tx.nz, array_spacing_m(arrays.tx));
  }
  ArrayGeometry rx_array() const {
    return ArrayGeometry::planar(geometry.bs_position, geometry.bs_boresight, arrays.rx.nx,
                                 arrays.rx.nz, array_spacing_m(arrays.rx));
  }
  ArrayGeometry ris_array() const {
    return ArrayGeometry::planar(geometry.ris_position, geometry.ris_boresight, arrays.ris.nx,
                                 arrays.ris.nz, array_spacing_m(arrays.ris));
  }
  int n_dir() const { return grids.azimuth_directions * grids.elevation_directions; }
  double noise_variance_w() const;
  double scan_duration_s() const { return n_dir() * ofdm.dwell_duration_s(); }
  // Start time of the CPI illuminating direction `dir` in scan `scan` (0-based).
  double illumination_time_s(int scan, int dir) const {
    return scan * scan_duration_s() + dir * ofdm.dwell_duration_s();
  }
};

// Closed-form radar specifications implied by the configuration.
struct DerivedRadarSpecs {
  double range_resolution_m;
  double velocity_resolution_mps;
  double cp_limited_range_m;
  double unambiguous_range_m;
  double unambiguous_velocity_mps;
  double scan_duration_s;
  double symbol_duration_s;
  double cpi_duration_s;
};

DerivedRadarSpecs derived_radar_specs(const Scenario& scn);

// Nominal pointing directions, row-major over (elevation, azimuth) cells.
std::vector<Direction> pointing_directions(const Scenario& scn);

// Uniform delay grid covering the inspected range interval, seconds.
Eigen::VectorXd delay_grid(const Scenario& scn);

// Uniform Doppler grid covering radial speeds up to max_speed_mps, Hz.
Eigen::VectorXd doppler_grid(const Scenario& scn);

// Region sampling for the beampattern design of subvolume `dir_index`.
std::vector<Direction> mainlobe_directions(const Scenario& scn, int dir_index);
std::vector<Direction> sidelobe_directions(const Scenario& scn, int dir_index);
std::vector<Direction> eavesdropper_directions(const Scenario& scn);
std::vector<Direction> jammer_directions(const Scenario& scn);

// Physical-consistency audit; an empty list means the scenario is usable.
std::vector<std::string> validate_scenario(const Scenario& scn);

Scenario load_scenario(const std::string& path);
Scenario scenario_from_json_text(const std::string& text);
std::string scenario_to_json_text(const Scenario& scn);

// Applies "dotted.key=value" overrides onto the JSON document before
// parsing; unknown keys are a hard error.
Scenario load_scenario(const std::string& path, const std::vector<std::string>& overrides);

// Hash of the fields that affect beampattern designs; used as cache key.
std::uint64_t design_relevant_hash(const Scenario& scn);

}  // namespace risac

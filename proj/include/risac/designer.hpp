// Two-way beampattern synthesis: maximize the mainlobe power of the RIS
// cascade over the unit-modulus RIS response and the radar beamformers,
// with quadratic penalties on the sidelobe, eavesdropper, and jammer
// regions. Solved by block-coordinate ascent with projected-gradient inner
// loops and a backtracking Armijo line search.
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "risac/channel.hpp"
#include "risac/precoding.hpp"
#include "risac/scenario.hpp"

namespace risac {

enum class RegionKind { mainlobe, sidelobe, eavesdropper, jammer };

struct PenaltyProblem {
  std::vector<CMat> g_tx;    // per q: D_ris x D_tx
  std::vector<CMat> g_rx;    // per q: D_rx x D_ris
  std::vector<CMat> f_comm;  // per q: D_tx x K, unit-norm columns
  std::vector<CMat> u_basis; // per q: D_tx x M, orthonormal columns
  std::vector<Eigen::VectorXd> gamma;  // per q: K+1 power fractions, radar last

  std::vector<Direction> dirs;       // sampled constraint directions
  std::vector<RegionKind> kinds;     // kind of each direction
  std::vector<CMat> steering;        // per q: D_ris x dirs.size()
  CMat center_steering;              // D_ris x n_sub, pointing direction per subcarrier

  double eps_sl = 1e-8, eps_ev = 1e-8, eps_ja = 1e-8;
  double beta = 0.0;  // raw penalty weight

  int n_sub() const { return static_cast<int>(g_tx.size()); }
  int n_ris() const { return static_cast<int>(g_tx[0].rows()); }
  int n_tx() const { return static_cast<int>(g_tx[0].cols()); }
  int n_users() const { return static_cast<int>(f_comm[0].cols()); }
  int n_radar_dims() const { return static_cast<int>(u_basis[0].cols()); }
};

struct DesignInit {
  CVec omega;
  std::vector<CVec> ftilde;
};

struct DesignRunOptions {
  double inner_tol = 1e-6;
  int inner_max = 200;
  double outer_tol = 1e-5;
  int outer_max = 50;
  double armijo_c1 = 1e-4;
  int armijo_backtracks = 40;
  int phase_states = 0;  // 0: continuous

  static DesignRunOptions from(const DesignConfig& c) {
    return {c.inner_tol, c.inner_max, c.outer_tol, c.outer_max, c.armijo_c1,
            c.armijo_backtracks, c.phase_states};
  }
};

struct StepRecord {
  int block = 0;  // 0: RIS phases, 1: radar beamformers
  double lambda = 0.0;
  double grad_norm2 = 0.0;
  double obj_before = 0.0;
  double obj_after = 0.0;
};

struct DesignResult {
  CVec omega;
  std::vector<CVec> ftilde;
  std::vector<CVec> f_radar;  // expanded u_basis * ftilde, unit norm
  std::vector<double> objective_trace;  // initial value, then one per sweep
  double mainlobe_power = 0.0;
  double residual_sl = 0.0, residual_ev = 0.0, residual_ja = 0.0;
  std::vector<StepRecord> steps;
  int outer_iterations = 0;
  double beta_raw = 0.0;
  double beta_relative = 0.0;
  double mainlobe_scale = 0.0;  // normalizer used to convert relative beta
};

// Shared evaluation engine; precomputes per-direction response stacks so the
// objective and both gradients are dense matrix-vector products.
class PenaltyEvaluator {
 public:
  explicit PenaltyEvaluator(const PenaltyProblem& pb);

  void set_ftilde(const std::vector<CVec>& ftilde);
  double objective(const CVec& omega) const;
  CVec grad_omega(const CVec& omega) const;
  std::vector<CVec> grad_ftilde(const CVec& omega) const;

  // Radar-beamformer block: freezes the omega-dependent factors, then works
  // in the low-dimensional coefficient space.
  void begin_ftilde_block(const CVec& omega) const;
  double objective_ftilde(const std::vector<CVec>& ftilde) const;
  std::vector<CVec> grad_ftilde_block(const std::vector<CVec>& ftilde) const;

  double mainlobe_power(const CVec& omega) const;
  struct Residuals {
    double sl = 0.0, ev = 0.0, ja = 0.0;
  };
  Residuals residuals(const CVec& omega) const;

  const PenaltyProblem& problem() const { return *pb_; }

 private:
  struct Stats;  // per-direction beampattern pieces
  Stats compute_stats(const CVec& omega) const;

  const PenaltyProblem* pb_;
  int nd_ = 0, nq_ = 0, n_rx_ = 0, n_users_ = 0;
  CMat r_stack_;   // (nd*nq*n_rx) x D_ris receive responses
  CMat tc_stack_;  // (nd*nq*K) x D_ris weighted comm transmit responses
  CMat tr_rows_;   // (nd*nq) x D_ris radar transmit rows for current ftilde
  std::vector<CMat> gu_;       // per q: g_tx * u_basis
  std::vector<CMat> proj_;     // per q: u_basis^H g_tx^H (for the b vectors)
  std::vector<CVec> ftilde_;   // current radar coefficients

  // ftilde-block caches (omega frozen)
  mutable Eigen::MatrixXd p_rx_, p_txc_;  // nd x nq
  mutable std::vector<CMat> b_;           // per q: M x nd
  mutable bool block_ready_ = false;
};

// Objective of the penalized synthesis problem, evaluated exactly.
double penalty_objective(const PenaltyProblem& pb, const CVec& omega,
                         const std::vector<CVec>& ftilde);

// Ascent direction with respect to the RIS response (Wirtinger form,
// including the penalty terms).
CVec grad_omega(const PenaltyProblem& pb, const CVec& omega, const std::vector<CVec>& ftilde);

// Ascent direction with respect to the radar coefficients of subcarrier q.
CVec grad_radar_beamformer(const PenaltyProblem& pb, const CVec& omega,
                           const std::vector<CVec>& ftilde, int q);

CVec project_unit_modulus(const CVec& v);
CVec project_phase_states(const CVec& v, int states);

// Matched start: RIS phases conjugate the dominant cascade toward the
// subvolume center; radar coefficients match the illuminated aperture.
DesignInit matched_init(const PenaltyProblem& pb);

// Block-coordinate ascent on (omega, ftilde) from `init`.
DesignResult design(const PenaltyProblem& pb, const DesignInit& init,
                    const DesignRunOptions& opt);

// Scenario-level entry point: builds the problem for one subvolume, scales
// the relative penalty weight by the unconstrained mainlobe power, and runs
// the ascent from the matched start.
PenaltyProblem make_penalty_problem(const Scenario& scn, const ChannelSet& channels,
                                    const std::vector<CMat>& f_comm,
                                    const std::vector<CMat>& u_basis,
                                    const std::vector<Eigen::VectorXd>& gamma, int dir_index,
                                    double beta_raw);

DesignResult design_subvolume(const Scenario& scn, const ChannelSet& channels,
                              const std::vector<CMat>& f_comm,
                              const std::vector<CMat>& u_basis,
                              const std::vector<Eigen::VectorXd>& gamma, int dir_index,
                              const DesignConfig& cfg);

std::string design_result_to_json_text(const DesignResult& r);
DesignResult design_result_from_json_text(const std::string& text);

}  // namespace risac

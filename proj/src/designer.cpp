#include "risac/designer.hpp"

#include "risac/io.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace risac {
namespace {

double penalty_g(double x) {
  const double m = std::max(0.0, x);
  return m * m;
}
double penalty_dg(double x) { return 2.0 * std::max(0.0, x); }

double stack_norm2(const std::vector<CVec>& v) {
  double s = 0.0;
  for (const auto& x : v) s += x.squaredNorm();
  return s;
}

}  // namespace

struct PenaltyEvaluator::Stats {
  Eigen::MatrixXd p_rx, p_tx;      // nd x nq
  Eigen::VectorXd bp, bp_tx, bp_rx;  // per direction, wideband sums
  CVec z_r, z_tc, z_tr;
};

PenaltyEvaluator::PenaltyEvaluator(const PenaltyProblem& pb) : pb_(&pb) {
  nq_ = pb.n_sub();
  nd_ = static_cast<int>(pb.dirs.size());
  n_rx_ = static_cast<int>(pb.g_rx[0].rows());
  n_users_ = pb.n_users();
  const int n_ris = pb.n_ris();
  if (static_cast<int>(pb.kinds.size()) != nd_)
    throw std::invalid_argument("penalty problem: kinds/dirs size mismatch");
  if (static_cast<int>(pb.steering.size()) != nq_)
    throw std::invalid_argument("penalty problem: steering per subcarrier required");

  r_stack_.resize(static_cast<Eigen::Index>(nd_) * nq_ * n_rx_, n_ris);
  if (n_users_ > 0) tc_stack_.resize(static_cast<Eigen::Index>(nd_) * nq_ * n_users_, n_ris);
  tr_rows_ = CMat::Zero(static_cast<Eigen::Index>(nd_) * nq_, n_ris);

  gu_.resize(static_cast<size_t>(nq_));
  proj_.resize(static_cast<size_t>(nq_));
  std::vector<CMat> gf(static_cast<size_t>(nq_));  // g_tx * f_comm, per q
  for (int q = 0; q < nq_; ++q) {
    gu_[static_cast<size_t>(q)] = pb.g_tx[static_cast<size_t>(q)] * pb.u_basis[static_cast<size_t>(q)];
    proj_[static_cast<size_t>(q)] = gu_[static_cast<size_t>(q)].adjoint();
    if (n_users_ > 0)
      gf[static_cast<size_t>(q)] = pb.g_tx[static_cast<size_t>(q)] * pb.f_comm[static_cast<size_t>(q)];
  }

  for (int d = 0; d < nd_; ++d) {
    for (int q = 0; q < nq_; ++q) {
      const auto t = pb.steering[static_cast<size_t>(q)].col(d);
      r_stack_.middleRows(static_cast<Eigen::Index>(d * nq_ + q) * n_rx_, n_rx_) =
          pb.g_rx[static_cast<size_t>(q)] * t.asDiagonal();
      if (n_users_ > 0) {
        const Eigen::VectorXd& g = pb.gamma[static_cast<size_t>(q)];
        auto block = tc_stack_.middleRows(static_cast<Eigen::Index>(d * nq_ + q) * n_users_, n_users_);
        for (int k = 0; k < n_users_; ++k)
          block.row(k) = std::sqrt(g(k)) *
                         (gf[static_cast<size_t>(q)].col(k).cwiseProduct(t)).transpose();
      }
    }
  }
  ftilde_.assign(static_cast<size_t>(nq_), CVec::Zero(pb.n_radar_dims()));
}

void PenaltyEvaluator::set_ftilde(const std::vector<CVec>& ftilde) {
  if (static_cast<int>(ftilde.size()) != nq_)
    throw std::invalid_argument("set_ftilde: one coefficient vector per subcarrier");
  ftilde_ = ftilde;
  for (int q = 0; q < nq_; ++q) {
    const double gr = pb_->gamma[static_cast<size_t>(q)](n_users_);
    const CVec guf = std::sqrt(gr) * (gu_[static_cast<size_t>(q)] * ftilde[static_cast<size_t>(q)]);
    for (int d = 0; d < nd_; ++d)
      tr_rows_.row(static_cast<Eigen::Index>(d * nq_ + q)) =
          pb_->steering[static_cast<size_t>(q)].col(d).cwiseProduct(guf).transpose();
  }
  block_ready_ = false;
}

PenaltyEvaluator::Stats PenaltyEvaluator::compute_stats(const CVec& omega) const {
  Stats s;
  s.p_rx.resize(nd_, nq_);
  s.p_tx.resize(nd_, nq_);
  s.z_r = r_stack_ * omega;
  if (n_users_ > 0) s.z_tc = tc_stack_ * omega;
  s.z_tr = tr_rows_ * omega;
  for (int d = 0; d < nd_; ++d)
    for (int q = 0; q < nq_; ++q) {
      const Eigen::Index i = static_cast<Eigen::Index>(d * nq_ + q);
      s.p_rx(d, q) = s.z_r.segment(i * n_rx_, n_rx_).squaredNorm();
      double ptx = std::norm(s.z_tr(i));
      if (n_users_ > 0) ptx += s.z_tc.segment(i * n_users_, n_users_).squaredNorm();
      s.p_tx(d, q) = ptx;
    }
  s.bp = (s.p_rx.array() * s.p_tx.array()).rowwise().sum();
  s.bp_tx = s.p_tx.rowwise().sum();
  s.bp_rx = s.p_rx.rowwise().sum();
  return s;
}

double PenaltyEvaluator::objective(const CVec& omega) const {
  const Stats s = compute_stats(omega);
  double main = 0.0, sl = 0.0, ev = 0.0, ja = 0.0;
  for (int d = 0; d < nd_; ++d) {
    switch (pb_->kinds[static_cast<size_t>(d)]) {
      case RegionKind::mainlobe: main += s.bp(d); break;
      case RegionKind::sidelobe: sl += penalty_g(s.bp(d) - pb_->eps_sl); break;
      case RegionKind::eavesdropper: ev += penalty_g(s.bp_tx(d) - pb_->eps_ev); break;
      case RegionKind::jammer: ja += penalty_g(s.bp_rx(d) - pb_->eps_ja); break;
    }
  }
  return main - pb_->beta * (sl + ev + ja);
}

CVec PenaltyEvaluator::grad_omega(const CVec& omega) const {
  const Stats s = compute_stats(omega);
  // Per-direction coefficients of the two-way, transmit-only, and
  // receive-only terms in the penalized objective.
  Eigen::VectorXd cbp = Eigen::VectorXd::Zero(nd_), ctx = Eigen::VectorXd::Zero(nd_),
                  crx = Eigen::VectorXd::Zero(nd_);
  for (int d = 0; d < nd_; ++d) {
    switch (pb_->kinds[static_cast<size_t>(d)]) {
      case RegionKind::mainlobe: cbp(d) = 1.0; break;
      case RegionKind::sidelobe: cbp(d) = -pb_->beta * penalty_dg(s.bp(d) - pb_->eps_sl); break;
      case RegionKind::eavesdropper:
        ctx(d) = -pb_->beta * penalty_dg(s.bp_tx(d) - pb_->eps_ev);
        break;
      case RegionKind::jammer:
        crx(d) = -pb_->beta * penalty_dg(s.bp_rx(d) - pb_->eps_ja);
        break;
    }
  }
  CVec w_r(r_stack_.rows());
  CVec w_tc(n_users_ > 0 ? tc_stack_.rows() : 0);
  CVec w_tr(tr_rows_.rows());
  for (int d = 0; d < nd_; ++d)
    for (int q = 0; q < nq_; ++q) {
      const Eigen::Index i = static_cast<Eigen::Index>(d * nq_ + q);
      const double wr = 2.0 * (cbp(d) * s.p_tx(d, q) + crx(d));
      const double wt = 2.0 * (cbp(d) * s.p_rx(d, q) + ctx(d));
      w_r.segment(i * n_rx_, n_rx_).setConstant(wr);
      if (n_users_ > 0) w_tc.segment(i * n_users_, n_users_).setConstant(wt);
      w_tr(i) = wt;
    }
  CVec grad = r_stack_.adjoint() * w_r.cwiseProduct(s.z_r) +
              tr_rows_.adjoint() * w_tr.cwiseProduct(s.z_tr);
  if (n_users_ > 0) grad += tc_stack_.adjoint() * w_tc.cwiseProduct(s.z_tc);
  return grad;
}

void PenaltyEvaluator::begin_ftilde_block(const CVec& omega) const {
  const Stats s = compute_stats(omega);
  p_rx_ = s.p_rx;
  // Comm-only transmit power; the radar term is re-added from the b vectors.
  p_txc_ = Eigen::MatrixXd::Zero(nd_, nq_);
  if (n_users_ > 0)
    for (int d = 0; d < nd_; ++d)
      for (int q = 0; q < nq_; ++q)
        p_txc_(d, q) =
            s.z_tc.segment(static_cast<Eigen::Index>(d * nq_ + q) * n_users_, n_users_).squaredNorm();
  b_.assign(static_cast<size_t>(nq_), CMat());
  for (int q = 0; q < nq_; ++q) {
    const double gr = pb_->gamma[static_cast<size_t>(q)](n_users_);
    const CMat phased = omega.asDiagonal() * pb_->steering[static_cast<size_t>(q)];
    b_[static_cast<size_t>(q)] = std::sqrt(gr) * (proj_[static_cast<size_t>(q)] * phased.conjugate());
  }
  block_ready_ = true;
}

double PenaltyEvaluator::objective_ftilde(const std::vector<CVec>& ftilde) const {
  if (!block_ready_) throw std::logic_error("objective_ftilde: begin_ftilde_block first");
  Eigen::VectorXd bp = Eigen::VectorXd::Zero(nd_), bptx = Eigen::VectorXd::Zero(nd_);
  for (int q = 0; q < nq_; ++q) {
    const CVec s = b_[static_cast<size_t>(q)].adjoint() * ftilde[static_cast<size_t>(q)];
    for (int d = 0; d < nd_; ++d) {
      const double ptx = p_txc_(d, q) + std::norm(s(d));
      bp(d) += p_rx_(d, q) * ptx;
      bptx(d) += ptx;
    }
  }
  double main = 0.0, sl = 0.0, ev = 0.0, ja = 0.0;
  for (int d = 0; d < nd_; ++d) {
    const double bprx = p_rx_.row(d).sum();
    switch (pb_->kinds[static_cast<size_t>(d)]) {
      case RegionKind::mainlobe: main += bp(d); break;
      case RegionKind::sidelobe: sl += penalty_g(bp(d) - pb_->eps_sl); break;
      case RegionKind::eavesdropper: ev += penalty_g(bptx(d) - pb_->eps_ev); break;
      case RegionKind::jammer: ja += penalty_g(bprx - pb_->eps_ja); break;
    }
  }
  return main - pb_->beta * (sl + ev + ja);
}

std::vector<CVec> PenaltyEvaluator::grad_ftilde_block(const std::vector<CVec>& ftilde) const {
  if (!block_ready_) throw std::logic_error("grad_ftilde_block: begin_ftilde_block first");
  std::vector<CVec> ss(static_cast<size_t>(nq_));
  Eigen::VectorXd bp = Eigen::VectorXd::Zero(nd_), bptx = Eigen::VectorXd::Zero(nd_);
  for (int q = 0; q < nq_; ++q) {
    ss[static_cast<size_t>(q)] = b_[static_cast<size_t>(q)].adjoint() * ftilde[static_cast<size_t>(q)];
    for (int d = 0; d < nd_; ++d) {
      const double ptx = p_txc_(d, q) + std::norm(ss[static_cast<size_t>(q)](d));
      bp(d) += p_rx_(d, q) * ptx;
      bptx(d) += ptx;
    }
  }
  Eigen::VectorXd cbp = Eigen::VectorXd::Zero(nd_), ctx = Eigen::VectorXd::Zero(nd_);
  for (int d = 0; d < nd_; ++d) {
    switch (pb_->kinds[static_cast<size_t>(d)]) {
      case RegionKind::mainlobe: cbp(d) = 1.0; break;
      case RegionKind::sidelobe: cbp(d) = -pb_->beta * penalty_dg(bp(d) - pb_->eps_sl); break;
      case RegionKind::eavesdropper:
        ctx(d) = -pb_->beta * penalty_dg(bptx(d) - pb_->eps_ev);
        break;
      case RegionKind::jammer: break;  // receive pattern does not depend on ftilde
    }
  }
  std::vector<CVec> grad(static_cast<size_t>(nq_));
  for (int q = 0; q < nq_; ++q) {
    CVec w(nd_);
    for (int d = 0; d < nd_; ++d)
      w(d) = 2.0 * (cbp(d) * p_rx_(d, q) + ctx(d)) * ss[static_cast<size_t>(q)](d);
    grad[static_cast<size_t>(q)] = b_[static_cast<size_t>(q)] * w;
  }
  return grad;
}

std::vector<CVec> PenaltyEvaluator::grad_ftilde(const CVec& omega) const {
  begin_ftilde_block(omega);
  return grad_ftilde_block(ftilde_);
}

double PenaltyEvaluator::mainlobe_power(const CVec& omega) const {
  const Stats s = compute_stats(omega);
  double main = 0.0;
  for (int d = 0; d < nd_; ++d)
    if (pb_->kinds[static_cast<size_t>(d)] == RegionKind::mainlobe) main += s.bp(d);
  return main;
}

PenaltyEvaluator::Residuals PenaltyEvaluator::residuals(const CVec& omega) const {
  const Stats s = compute_stats(omega);
  Residuals r;
  for (int d = 0; d < nd_; ++d) {
    switch (pb_->kinds[static_cast<size_t>(d)]) {
      case RegionKind::mainlobe: break;
      case RegionKind::sidelobe: r.sl = std::max(r.sl, s.bp(d) - pb_->eps_sl); break;
      case RegionKind::eavesdropper: r.ev = std::max(r.ev, s.bp_tx(d) - pb_->eps_ev); break;
      case RegionKind::jammer: r.ja = std::max(r.ja, s.bp_rx(d) - pb_->eps_ja); break;
    }
  }
  return r;
}

double penalty_objective(const PenaltyProblem& pb, const CVec& omega,
                         const std::vector<CVec>& ftilde) {
  PenaltyEvaluator ev(pb);
  ev.set_ftilde(ftilde);
  return ev.objective(omega);
}

CVec grad_omega(const PenaltyProblem& pb, const CVec& omega, const std::vector<CVec>& ftilde) {
  PenaltyEvaluator ev(pb);
  ev.set_ftilde(ftilde);
  return ev.grad_omega(omega);
}

CVec grad_radar_beamformer(const PenaltyProblem& pb, const CVec& omega,
                           const std::vector<CVec>& ftilde, int q) {
  PenaltyEvaluator ev(pb);
  ev.set_ftilde(ftilde);
  ev.begin_ftilde_block(omega);
  return ev.grad_ftilde_block(ftilde).at(static_cast<size_t>(q));
}

CVec project_unit_modulus(const CVec& v) {
  CVec p(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double m = std::abs(v(i));
    p(i) = m > 0.0 ? v(i) / m : std::complex<double>(1.0, 0.0);
  }
  return p;
}

CVec project_phase_states(const CVec& v, int states) {
  if (states < 1) return project_unit_modulus(v);
  CVec p(v.size());
  const double step = 2.0 * M_PI / states;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::arg(v(i));
    const double snapped = step * std::round(a / step);
    p(i) = std::polar(1.0, snapped);
  }
  return p;
}

DesignInit matched_init(const PenaltyProblem& pb) {
  const int nq = pb.n_sub();
  const int qc = nq / 2;
  CVec t_center;
  if (pb.center_steering.cols() == nq && pb.center_steering.rows() == pb.n_ris()) {
    t_center = pb.center_steering.col(qc);
  } else {
    // Fall back to the middle sampled mainlobe direction.
    int pick = 0;
    for (int d = 0; d < static_cast<int>(pb.dirs.size()); ++d)
      if (pb.kinds[static_cast<size_t>(d)] == RegionKind::mainlobe) pick = d;
    t_center = pb.steering[static_cast<size_t>(qc)].col(pick / 2);
  }
  // Dominant illumination of the RIS by the transmit array.
  Eigen::JacobiSVD<CMat> svd(pb.g_tx[static_cast<size_t>(qc)], Eigen::ComputeThinV);
  const CVec f0 = svd.matrixV().col(0);
  const CVec cascade = t_center.cwiseProduct(pb.g_tx[static_cast<size_t>(qc)] * f0);

  DesignInit init;
  init.omega = project_unit_modulus(cascade.conjugate());
  init.ftilde.resize(static_cast<size_t>(nq));
  for (int q = 0; q < nq; ++q) {
    const CVec tq = (pb.center_steering.cols() == nq)
                        ? CVec(pb.center_steering.col(q))
                        : CVec(pb.steering[static_cast<size_t>(q)].col(0));
    CVec f = pb.u_basis[static_cast<size_t>(q)].adjoint() *
             (pb.g_tx[static_cast<size_t>(q)].adjoint() *
              tq.conjugate().cwiseProduct(init.omega.conjugate()));
    const double n = f.norm();
    if (n > 1e-14) {
      f /= n;
    } else {
      f = CVec::Ones(pb.n_radar_dims()) / std::sqrt(static_cast<double>(pb.n_radar_dims()));
    }
    init.ftilde[static_cast<size_t>(q)] = f;
  }
  return init;
}

namespace {

// One projected-gradient pass over the RIS phases. The accepted step size
// is remembered across iterations so the line search does not restart from
// the top of the backtracking ladder every time.
double run_omega_block(const PenaltyEvaluator& ev, CVec& omega, double f,
                       const DesignRunOptions& opt, std::vector<StepRecord>& steps) {
  double lambda_prev = 0.0;
  for (int it = 0; it < opt.inner_max; ++it) {
    const CVec g = ev.grad_omega(omega);
    const double gn2 = g.squaredNorm();
    if (!(gn2 > 0.0) || !std::isfinite(gn2)) break;
    const double cap = 1.0 / std::sqrt(gn2);
    double lambda = lambda_prev > 0.0 ? std::min(cap, 4.0 * lambda_prev) : cap;
    bool accepted = false;
    CVec cand;
    double fc = f;
    for (int bt = 0; bt <= opt.armijo_backtracks; ++bt) {
      cand = project_unit_modulus(omega + lambda * g);
      fc = ev.objective(cand);
      if (!std::isfinite(fc)) throw std::runtime_error("design: objective became non-finite");
      if (fc >= f + opt.armijo_c1 * lambda * gn2) {
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!accepted) break;
    steps.push_back({0, lambda, gn2, f, fc});
    lambda_prev = lambda;
    const double imp = fc - f;
    omega = cand;
    f = fc;
    if (imp < opt.inner_tol * std::max(1.0, std::abs(f))) break;
  }
  return f;
}

// One projected-gradient pass over the radar coefficients of all
// subcarriers, with a shared step size.
double run_ftilde_block(const PenaltyEvaluator& ev, std::vector<CVec>& ftilde, double f,
                        const DesignRunOptions& opt, std::vector<StepRecord>& steps) {
  const int nq = static_cast<int>(ftilde.size());
  double lambda_prev = 0.0;
  for (int it = 0; it < opt.inner_max; ++it) {
    const auto g = ev.grad_ftilde_block(ftilde);
    const double gn2 = stack_norm2(g);
    if (!(gn2 > 0.0) || !std::isfinite(gn2)) break;
    const double cap = 1.0 / std::sqrt(gn2);
    double lambda = lambda_prev > 0.0 ? std::min(cap, 4.0 * lambda_prev) : cap;
    bool accepted = false;
    std::vector<CVec> cand(static_cast<size_t>(nq));
    double fc = f;
    for (int bt = 0; bt <= opt.armijo_backtracks; ++bt) {
      for (int q = 0; q < nq; ++q) {
        CVec v = ftilde[static_cast<size_t>(q)] + lambda * g[static_cast<size_t>(q)];
        const double n = v.norm();
        cand[static_cast<size_t>(q)] = n > 1e-300 ? CVec(v / n) : ftilde[static_cast<size_t>(q)];
      }
      fc = ev.objective_ftilde(cand);
      if (!std::isfinite(fc)) throw std::runtime_error("design: objective became non-finite");
      if (fc >= f + opt.armijo_c1 * lambda * gn2) {
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!accepted) break;
    steps.push_back({1, lambda, gn2, f, fc});
    lambda_prev = lambda;
    const double imp = fc - f;
    ftilde = cand;
    f = fc;
    if (imp < opt.inner_tol * std::max(1.0, std::abs(f))) break;
  }
  return f;
}

}  // namespace

DesignResult design(const PenaltyProblem& pb, const DesignInit& init,
                    const DesignRunOptions& opt) {
  PenaltyEvaluator ev(pb);
  CVec omega = init.omega;
  std::vector<CVec> ftilde = init.ftilde;
  ev.set_ftilde(ftilde);

  DesignResult r;
  r.beta_raw = pb.beta;
  double f = ev.objective(omega);
  if (!std::isfinite(f)) throw std::runtime_error("design: non-finite objective at the start");
  r.objective_trace.push_back(f);

  for (int sweep = 0; sweep < opt.outer_max; ++sweep) {
    const double f_before = f;
    f = run_omega_block(ev, omega, f, opt, r.steps);

    ev.begin_ftilde_block(omega);
    double fb = ev.objective_ftilde(ftilde);
    fb = run_ftilde_block(ev, ftilde, fb, opt, r.steps);
    ev.set_ftilde(ftilde);
    f = ev.objective(omega);

    r.objective_trace.push_back(f);
    ++r.outer_iterations;
    if (f - f_before < opt.outer_tol * std::max(1.0, std::abs(f))) break;
  }

  if (opt.phase_states > 0) omega = project_phase_states(omega, opt.phase_states);

  r.omega = omega;
  r.ftilde = ftilde;
  r.f_radar.resize(ftilde.size());
  for (size_t q = 0; q < ftilde.size(); ++q) r.f_radar[q] = pb.u_basis[q] * ftilde[q];
  r.mainlobe_power = ev.mainlobe_power(omega);
  const auto res = ev.residuals(omega);
  r.residual_sl = res.sl;
  r.residual_ev = res.ev;
  r.residual_ja = res.ja;
  return r;
}

PenaltyProblem make_penalty_problem(const Scenario& scn, const ChannelSet& channels,
                                    const std::vector<CMat>& f_comm,
                                    const std::vector<CMat>& u_basis,
                                    const std::vector<Eigen::VectorXd>& gamma, int dir_index,
                                    double beta_raw) {
  PenaltyProblem pb;
  pb.g_tx = channels.g_tx;
  pb.g_rx = channels.g_rx;
  pb.f_comm = f_comm;
  pb.u_basis = u_basis;
  pb.gamma = gamma;
  pb.eps_sl = scn.regions.epsilon_sidelobe;
  pb.eps_ev = scn.regions.epsilon_eavesdropper;
  pb.eps_ja = scn.regions.epsilon_jammer;
  pb.beta = beta_raw;

  auto add = [&pb](const std::vector<Direction>& ds, RegionKind k) {
    for (const auto& d : ds) {
      pb.dirs.push_back(d);
      pb.kinds.push_back(k);
    }
  };
  add(mainlobe_directions(scn, dir_index), RegionKind::mainlobe);
  add(sidelobe_directions(scn, dir_index), RegionKind::sidelobe);
  add(eavesdropper_directions(scn), RegionKind::eavesdropper);
  add(jammer_directions(scn), RegionKind::jammer);

  const auto ris = scn.ris_array();
  const int nq = scn.ofdm.employed_subcarriers;
  pb.steering.resize(static_cast<size_t>(nq));
  pb.center_steering.resize(static_cast<Eigen::Index>(ris.positions.size()), nq);
  const Direction pointing = pointing_directions(scn).at(static_cast<size_t>(dir_index));
  for (int q = 0; q < nq; ++q) {
    const double fq = scn.ofdm.subcarrier_frequency(q + 1);
    CMat t(static_cast<Eigen::Index>(ris.positions.size()),
           static_cast<Eigen::Index>(pb.dirs.size()));
    for (size_t d = 0; d < pb.dirs.size(); ++d)
      t.col(static_cast<Eigen::Index>(d)) = steering_vector(ris, pb.dirs[d], fq);
    pb.steering[static_cast<size_t>(q)] = std::move(t);
    pb.center_steering.col(q) = steering_vector(ris, pointing, fq);
  }
  return pb;
}

DesignResult design_subvolume(const Scenario& scn, const ChannelSet& channels,
                              const std::vector<CMat>& f_comm,
                              const std::vector<CMat>& u_basis,
                              const std::vector<Eigen::VectorXd>& gamma, int dir_index,
                              const DesignConfig& cfg) {
  PenaltyProblem pb = make_penalty_problem(scn, channels, f_comm, u_basis, gamma, dir_index, 0.0);
  const DesignInit init = matched_init(pb);

  // Short unconstrained run to estimate the mainlobe optimum; the relative
  // penalty weight is expressed against this scale.
  DesignRunOptions warm = DesignRunOptions::from(cfg);
  warm.outer_max = 1;
  warm.inner_max = std::min(cfg.inner_max, 25);
  warm.phase_states = 0;
  const DesignResult r0 = design(pb, init, warm);
  const double scale = std::max(r0.mainlobe_power, 1e-300);
  const double beta_final = cfg.beta_relative * scale;

  // Ramp the penalty weight geometrically from where the penalty is a small
  // fraction of the mainlobe. Jumping straight to the final weight flattens
  // the beam before any nulls form; warm-started stages instead trade beam
  // power for suppression gradually.
  DesignInit state{r0.omega, r0.ftilde};
  double violation0 = 0.0;
  {
    PenaltyEvaluator ev0(pb);
    ev0.set_ftilde(state.ftilde);
    pb.beta = 1.0;
    PenaltyEvaluator ev1(pb);
    ev1.set_ftilde(state.ftilde);
    violation0 = ev0.mainlobe_power(state.omega) - ev1.objective(state.omega);
    pb.beta = 0.0;
  }
  double beta0 = 0.05 * scale / std::max(violation0, 1e-30);
  beta0 = std::min(beta0, beta_final);
  DesignRunOptions stage_opt = DesignRunOptions::from(cfg);
  stage_opt.outer_max = std::max(2, cfg.outer_max / 4);
  stage_opt.phase_states = 0;
  for (double beta = beta0; beta < beta_final; beta *= 10.0) {
    pb.beta = beta;
    const DesignResult rs = design(pb, state, stage_opt);
    state.omega = rs.omega;
    state.ftilde = rs.ftilde;
  }

  pb.beta = beta_final;
  DesignResult r = design(pb, state, DesignRunOptions::from(cfg));
  r.beta_relative = cfg.beta_relative;
  r.mainlobe_scale = scale;
  return r;
}

std::string design_result_to_json_text(const DesignResult& r) {
  json j;
  auto cvec = [](const CVec& v) {
    std::vector<double> out;
    out.reserve(static_cast<size_t>(v.size()) * 2);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      out.push_back(v(i).real());
      out.push_back(v(i).imag());
    }
    return out;
  };
  std::vector<double> phases;
  for (Eigen::Index i = 0; i < r.omega.size(); ++i) phases.push_back(std::arg(r.omega(i)));
  j["omega_phases_rad"] = phases;
  j["ftilde"] = json::array();
  for (const auto& f : r.ftilde) j["ftilde"].push_back(cvec(f));
  j["f_radar"] = json::array();
  for (const auto& f : r.f_radar) j["f_radar"].push_back(cvec(f));
  j["objective_trace"] = r.objective_trace;
  j["mainlobe_power"] = r.mainlobe_power;
  j["residuals"] = {{"sidelobe", r.residual_sl},
                    {"eavesdropper", r.residual_ev},
                    {"jammer", r.residual_ja}};
  j["outer_iterations"] = r.outer_iterations;
  j["beta_raw"] = r.beta_raw;
  j["beta_relative"] = r.beta_relative;
  j["mainlobe_scale"] = r.mainlobe_scale;
  return j.dump();
}

DesignResult design_result_from_json_text(const std::string& text) {
  const json j = json::parse(text);
  DesignResult r;
  auto cvec = [](const json& a) {
    CVec v(static_cast<Eigen::Index>(a.size() / 2));
    for (Eigen::Index i = 0; i < v.size(); ++i)
      v(i) = std::complex<double>(a[static_cast<size_t>(2 * i)].get<double>(),
                                  a[static_cast<size_t>(2 * i + 1)].get<double>());
    return v;
  };
  const auto& phases = j.at("omega_phases_rad");
  r.omega.resize(static_cast<Eigen::Index>(phases.size()));
  for (Eigen::Index i = 0; i < r.omega.size(); ++i)
    r.omega(i) = std::polar(1.0, phases[static_cast<size_t>(i)].get<double>());
  for (const auto& f : j.at("ftilde")) r.ftilde.push_back(cvec(f));
  for (const auto& f : j.at("f_radar")) r.f_radar.push_back(cvec(f));
  r.objective_trace = j.at("objective_trace").get<std::vector<double>>();
  r.mainlobe_power = j.at("mainlobe_power").get<double>();
  r.residual_sl = j.at("residuals").at("sidelobe").get<double>();
  r.residual_ev = j.at("residuals").at("eavesdropper").get<double>();
  r.residual_ja = j.at("residuals").at("jammer").get<double>();
  r.outer_iterations = j.at("outer_iterations").get<int>();
  r.beta_raw = j.at("beta_raw").get<double>();
  r.beta_relative = j.at("beta_relative").get<double>();
  r.mainlobe_scale = j.at("mainlobe_scale").get<double>();
  return r;
}

}  // namespace risac

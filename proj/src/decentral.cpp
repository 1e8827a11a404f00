#include "cfxl/decentral.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "cfxl/linalg.hpp"

namespace cfxl {

const char* payload_kind_name(PayloadKind kind) {
  switch (kind) {
    case PayloadKind::WH_vectors: return "WH_vectors";
    case PayloadKind::WWH_matrix: return "WWH_matrix";
    case PayloadKind::Omega_matrix: return "Omega_matrix";
    case PayloadKind::ThetaWH_scalars: return "thetaWH_scalars";
    case PayloadKind::Gamma_scalars: return "gamma_scalars";
    case PayloadKind::Theta_subvectors: return "theta_subvectors";
    case PayloadKind::CrossAp_scalars: return "cross_ap_scalars";
  }
  return "?";
}

int payload_scalar_count(PayloadKind kind, int K, int L, int N) {
  switch (kind) {
    case PayloadKind::WH_vectors: return K * N;
    case PayloadKind::WWH_matrix: return N * N;
    case PayloadKind::Omega_matrix: return N * N;
    case PayloadKind::ThetaWH_scalars: return K;
    case PayloadKind::Gamma_scalars: return K;
    case PayloadKind::Theta_subvectors: return K * N;
    case PayloadKind::CrossAp_scalars: return K * (L - 1);
  }
  return 0;
}

std::pair<long long, long long> expected_overhead(int K, int L, int N) {
  if (K < 1 || L < 1 || N < 1)
    throw std::domain_error("expected_overhead: K, L, N must be positive");
  const long long up = 2LL * N * N + static_cast<long long>(K) * (N + 1);
  const long long down = static_cast<long long>(K) * (N + L);
  return {up, down};
}

OverheadReport overhead_from_messages(const std::vector<Message>& log, int L) {
  OverheadReport rep;
  int max_iter = 0;
  for (const auto& m : log) max_iter = std::max(max_iter, m.iteration);
  // index rows by (iteration 1..max_iter, ap)
  rep.rows.reserve(static_cast<std::size_t>(max_iter) * L);
  for (int t = 1; t <= max_iter; ++t)
    for (int i = 0; i < L; ++i) rep.rows.push_back({t, i, 0, 0});

  for (const auto& m : log) {
    if (m.iteration == 0) {
      if (m.direction == Direction::ApToCpu) rep.bootstrap_uplink_scalars += m.complex_scalar_count;
      continue;
    }
    auto& row = rep.rows[static_cast<std::size_t>(m.iteration - 1) * L + m.ap_index];
    if (m.direction == Direction::ApToCpu) {
      row.uplink_scalars += m.complex_scalar_count;
      rep.total_uplink += m.complex_scalar_count;
    } else {
      row.downlink_scalars += m.complex_scalar_count;
      rep.total_downlink += m.complex_scalar_count;
    }
  }
  return rep;
}

void messages_to_csv(const std::vector<Message>& log, std::ostream& os) {
  os << "iteration,direction,ap,payload_kind,complex_scalars\n";
  for (const auto& m : log)
    os << m.iteration << ','
       << (m.direction == Direction::ApToCpu ? "ap_to_cpu" : "cpu_to_ap") << ',' << m.ap_index
       << ',' << payload_kind_name(m.kind) << ',' << m.complex_scalar_count << '\n';
}

// --- ApNode -----------------------------------------------------------------

// The node works in the shared solver frame: unit noise variance, channel
// divided by sigma_z, init jointly rescaled (see normalized_init).
ApNode::ApNode(int index, const arma::cx_mat& H_i, const arma::vec& p, double sigma_z2,
               double C_F, ApProcessing init)
    : index_(index),
      H_(normalized_channel(H_i, sigma_z2)),
      p_(p),
      sigma_z2_(1.0),
      C_F_(C_F),
      state_(normalized_init(init, sigma_z2, static_cast<int>(init.W.n_rows))) {
  arma::cx_mat s = H_ * arma::diagmat(arma::conv_to<arma::cx_vec>::from(p_)) * H_.t();
  s.diag() += sigma_z2_;
  S_ = hermitize(s);
}

void ApNode::set_channel(const arma::cx_mat& H_i) {
  H_ = H_i;
  arma::cx_mat s = H_ * arma::diagmat(arma::conv_to<arma::cx_vec>::from(p_)) * H_.t();
  s.diag() += sigma_z2_;
  S_ = hermitize(s);
}

void ApNode::project_initial(const AfpConfig& cfg) {
  arma::cx_mat r;
  if (!arma::chol(r, state_.Omega))
    throw NumericError("decentralized: initial Omega for AP " + std::to_string(index_) +
                       " is not positive definite");
  project_ap(state_.W, S_, state_.Omega, C_F_, cfg.bisect_tol);
}

arma::cx_mat ApNode::local_sigma() const { return sigma_update(state_.W, S_, state_.Omega); }

ApReport ApNode::report() const { return make_report(state_.W, state_.Omega, H_); }

arma::cx_rowvec ApNode::theta_wh_scalars(const arma::cx_mat& theta_i) const {
  const arma::cx_mat V = state_.W * H_;
  const int K = static_cast<int>(V.n_cols);
  arma::cx_rowvec b(K);
  for (int k = 0; k < K; ++k) b(k) = arma::cdot(theta_i.col(k), V.col(k));
  return b;
}

int ApNode::update(const arma::vec& gamma, const arma::cx_mat& theta_i, const arma::cx_mat& alpha,
                   const AfpConfig& cfg) {
  const arma::cx_mat Sigma_i = local_sigma();
  const auto coef = assemble_ap_coefficients(H_, S_, p_, gamma, theta_i, alpha, Sigma_i, C_F_);
  const InnerResult inner = inner_solve(coef, state_.W, state_.Omega, cfg);
  state_.W = inner.W;
  state_.Omega = inner.Omega;
  project_ap(state_.W, S_, state_.Omega, C_F_, cfg.bisect_tol);
  return inner.iterations;
}

double ApNode::local_fronthaul_usage() const {
  return fronthaul_usage(state_.W, S_, state_.Omega);
}

// --- CpuNode ----------------------------------------------------------------

CpuNode::CpuNode(int L, int N, const arma::vec& p, double sigma_z2)
    : L_(L), N_(N), p_(p), sigma_z2_(sigma_z2), reports_(L), theta_wh_(L) {}

void CpuNode::receive_report(int i, ApReport report) { reports_[i] = std::move(report); }

void CpuNode::receive_theta_wh(int i, arma::cx_rowvec scalars) {
  theta_wh_[i] = std::move(scalars);
}

void CpuNode::compute_aux() { aux_gamma_theta(reports_, p_, sigma_z2_, gamma_, theta_); }

arma::cx_mat CpuNode::theta_block(int i) const {
  return theta_.rows(i * N_, (i + 1) * N_ - 1);
}

arma::cx_mat CpuNode::cross_couplings_for(int i) const {
  return cross_ap_couplings(i, reports_, theta_);
}

double CpuNode::sum_rate() const {
  const auto rates = rates_from_reports(reports_, p_, sigma_z2_);
  double acc = 0.0;
  for (const auto& r : rates) acc += r.bits;
  return acc;
}

double CpuNode::max_fronthaul_violation(double C_F) const {
  // W S W^H is recoverable from the report alone: V diag(p) V^H + sigma^2 G.
  double worst = 0.0;
  for (const auto& rep : reports_) {
    const arma::cx_mat B =
        hermitize(rep.V * arma::diagmat(arma::conv_to<arma::cx_vec>::from(p_)) * rep.V.t()) +
        sigma_z2_ * rep.G;
    const auto ld_total = logdet_hpd(B + rep.Omega);
    const auto ld_omega = logdet_hpd(rep.Omega);
    const double usage = (ld_total && ld_omega)
                             ? (*ld_total - *ld_omega) / std::numbers::ln2
                             : std::numeric_limits<double>::infinity();
    worst = std::max(worst, usage - C_F);
  }
  return std::max(0.0, worst);
}

// --- Decentralized sweep ------------------------------------------------------

DecentralResult run_decentralized(const SystemParams& params, const ChannelRealization& chan,
                                  const Solution& init, const AfpConfig& cfg) {
  params.validate();
  cfg.validate();
  init.validate(params.L, params.N, params.M);

  const int K = params.K, L = params.L, N = params.N;
  DecentralResult res;

  std::vector<ApNode> aps;
  aps.reserve(L);
  for (int i = 0; i < L; ++i)
    aps.emplace_back(i, chan.H[i], chan.p, chan.sigma_z2, params.C_F, init.aps[i]);
  CpuNode cpu(L, N, chan.p, /*sigma_z2 in the solver frame=*/1.0);

  auto log_msg = [&](Direction dir, int ap, int iter, PayloadKind kind) {
    res.messages.push_back({dir, ap, iter, kind, payload_scalar_count(kind, K, L, N)});
  };

  // Bootstrap: feasibility repair and initial state reports (iteration 0).
  for (int i = 0; i < L; ++i) {
    aps[i].project_initial(cfg);
    cpu.receive_report(i, aps[i].report());
    log_msg(Direction::ApToCpu, i, 0, PayloadKind::WH_vectors);
    log_msg(Direction::ApToCpu, i, 0, PayloadKind::WWH_matrix);
    log_msg(Direction::ApToCpu, i, 0, PayloadKind::Omega_matrix);
  }

  double rate_old = cpu.sum_rate();
  res.trace.initial_sum_rate = rate_old;
  const auto t0 = std::chrono::steady_clock::now();

  res.truncated = true;
  for (int outer = 1; outer <= cfg.max_outer; ++outer) {
    cpu.compute_aux();

    std::vector<int> inner_iters(L, 0);
    for (int i = 0; i < L; ++i) {
      const arma::vec gamma = cpu.gamma();
      const arma::cx_mat theta_i = cpu.theta_block(i);
      const arma::cx_mat alpha = cpu.cross_couplings_for(i);
      log_msg(Direction::CpuToAp, i, outer, PayloadKind::Gamma_scalars);
      log_msg(Direction::CpuToAp, i, outer, PayloadKind::Theta_subvectors);
      log_msg(Direction::CpuToAp, i, outer, PayloadKind::CrossAp_scalars);

      inner_iters[i] = aps[i].update(gamma, theta_i, alpha, cfg);

      cpu.receive_report(i, aps[i].report());
      cpu.receive_theta_wh(i, aps[i].theta_wh_scalars(theta_i));
      log_msg(Direction::ApToCpu, i, outer, PayloadKind::WH_vectors);
      log_msg(Direction::ApToCpu, i, outer, PayloadKind::WWH_matrix);
      log_msg(Direction::ApToCpu, i, outer, PayloadKind::Omega_matrix);
      log_msg(Direction::ApToCpu, i, outer, PayloadKind::ThetaWH_scalars);
    }

    const double rate_new = cpu.sum_rate();

    Solution snapshot;
    snapshot.aps.resize(L);
    for (int i = 0; i < L; ++i) snapshot.aps[i] = aps[i].state();

    ConvergenceTrace::Row row;
    row.outer_iter = outer;
    row.sum_rate = rate_new;
    row.elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    row.max_fh_violation = cpu.max_fronthaul_violation(params.C_F);
    row.inner_iters = inner_iters;
    row.digest = solution_digest(snapshot);
    res.trace.rows.push_back(std::move(row));

    if (std::abs(rate_new - rate_old) <= cfg.delta_out) {
      res.truncated = false;
      break;
    }
    rate_old = rate_new;
  }

  // map the in-frame iterates back to the caller's units
  const double sigma_z = std::sqrt(chan.sigma_z2);
  res.solution.aps.resize(L);
  for (int i = 0; i < L; ++i) {
    res.solution.aps[i] = aps[i].state();
    res.solution.aps[i].W /= sigma_z;
  }
  res.overhead = overhead_from_messages(res.messages, L);
  return res;
}

}  // namespace cfxl

#include "cfxl/afp.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <ostream>

#include "cfxl/linalg.hpp"

namespace cfxl {

void AfpConfig::validate() const {
  if (!(delta0 > 0)) throw ConfigError("afp.delta0 must be > 0");
  if (!(decay_r > 0 && decay_r < 1)) throw ConfigError("afp.decay_r must be in (0,1)");
  if (!(delta_in >= 0)) throw ConfigError("afp.delta_in must be >= 0 (0 = auto)");
  if (!(delta_out > 0)) throw ConfigError("afp.delta_out must be > 0");
  if (max_outer < 1 || max_inner < 1) throw ConfigError("afp iteration caps must be >= 1");
  if (!(mu_floor > 0)) throw ConfigError("afp.mu_floor must be > 0");
  if (!(ridge >= 0)) throw ConfigError("afp.ridge must be >= 0");
  if (!(bisect_tol > 0)) throw ConfigError("afp.bisect_tol must be > 0");
}

double AfpConfig::resolved_delta_in(int N, int M) const {
  return delta_in > 0 ? delta_in : 1e-6 * static_cast<double>(N) * (M + N);
}

void ConvergenceTrace::to_csv(std::ostream& os) const {
  os << "outer_iter,sum_rate_bps_hz,elapsed_s,max_fh_violation,inner_iters_per_ap\n";
  char buf[64];
  for (const auto& row : rows) {
    os << row.outer_iter << ',';
    std::snprintf(buf, sizeof(buf), "%.12g", row.sum_rate);
    os << buf << ',';
    std::snprintf(buf, sizeof(buf), "%.6g", row.elapsed_s);
    os << buf << ',';
    std::snprintf(buf, sizeof(buf), "%.6g", row.max_fh_violation);
    os << buf << ',';
    for (std::size_t i = 0; i < row.inner_iters.size(); ++i) {
      if (i) os << ';';
      os << row.inner_iters[i];
    }
    os << '\n';
  }
}

void aux_gamma_theta(const std::vector<ApReport>& reports, const arma::vec& p, double sigma_z2,
                     arma::vec& gamma, arma::cx_mat& theta) {
  const int K = static_cast<int>(p.n_elem);
  const arma::cx_mat U = stacked_effective_channels(reports);
  const arma::cx_mat B = stacked_noise_covariance(reports, sigma_z2);

  arma::cx_mat C = B;
  for (int k = 0; k < K; ++k) C += p(k) * (U.col(k) * U.col(k).t());
  C = hermitize(C);

  arma::cx_mat X;
  if (!solve_hpd(X, C, U))
    throw NumericError("aux update: total received covariance is singular");
  theta = X * arma::diagmat(arma::conv_to<arma::cx_vec>::from(arma::sqrt(p)));

  gamma.set_size(K);
  for (int k = 0; k < K; ++k) {
    arma::cx_mat c_if = B;
    for (int kp = 0; kp < K; ++kp) {
      if (kp == k) continue;
      c_if += p(kp) * (U.col(kp) * U.col(kp).t());
    }
    c_if = hermitize(c_if);
    arma::cx_mat y;
    if (!solve_hpd(y, c_if, arma::cx_mat(U.col(k))))
      throw NumericError("aux update: interference covariance singular for UE " +
                         std::to_string(k));
    gamma(k) = p(k) * std::real(arma::cdot(U.col(k), y.col(0)));
    if (gamma(k) < 0.0) gamma(k) = 0.0;  // roundoff clamp
  }
}

arma::cx_mat sigma_update(const arma::cx_mat& W, const arma::cx_mat& S, const arma::cx_mat& Omega) {
  return hermitize(W * S * W.t()) + Omega;
}

AuxState update_aux(const Solution& sol, const ChannelRealization& chan) {
  AuxState aux;
  const auto reports = local_reports(sol, chan);
  aux_gamma_theta(reports, chan.p, chan.sigma_z2, aux.gamma, aux.theta);
  aux.Sigma.resize(sol.aps.size());
  for (std::size_t i = 0; i < sol.aps.size(); ++i)
    aux.Sigma[i] = sigma_update(sol.aps[i].W, received_covariance(chan, static_cast<int>(i)),
                                sol.aps[i].Omega);
  return aux;
}

double surrogate_objective(const Solution& sol, const ChannelRealization& chan,
                           const AuxState& aux) {
  constexpr double inv_ln2 = 1.0 / std::numbers::ln2;
  const auto reports = local_reports(sol, chan);
  const arma::cx_mat U = stacked_effective_channels(reports);
  const arma::cx_mat B = stacked_noise_covariance(reports, chan.sigma_z2);
  const int K = chan.num_ues();

  double value = 0.0;
  for (int k = 0; k < K; ++k) {
    const arma::cx_vec tk = aux.theta.col(k);
    const double gk = aux.gamma(k);
    double quad = 2.0 * std::sqrt(chan.p(k)) * std::real(arma::cdot(U.col(k), tk));
    const arma::cx_rowvec y = tk.t() * U;  // y(k') = theta_k^H Wbar h_{k'}
    for (int kp = 0; kp < K; ++kp) quad -= chan.p(kp) * std::norm(y(kp));
    quad -= quad_form(tk, B);
    value += std::log2(1.0 + gk) - gk * inv_ln2 + (1.0 + gk) * inv_ln2 * quad;
  }
  return value;
}

arma::cx_mat cross_ap_couplings(int i, const std::vector<ApReport>& reports,
                                const arma::cx_mat& theta) {
  const int L = static_cast<int>(reports.size());
  const int K = static_cast<int>(theta.n_cols);
  const int N = static_cast<int>(theta.n_rows) / L;
  arma::cx_mat alpha(K, K, arma::fill::zeros);
  for (int ip = 0; ip < L; ++ip) {
    if (ip == i) continue;
    alpha += theta.rows(ip * N, (ip + 1) * N - 1).t() * reports[ip].V;
  }
  return alpha;
}

PerApCoefficients assemble_ap_coefficients(const arma::cx_mat& H_i, const arma::cx_mat& S_i,
                                           const arma::vec& p, const arma::vec& gamma,
                                           const arma::cx_mat& theta_i, const arma::cx_mat& alpha,
                                           const arma::cx_mat& Sigma_i, double C_F) {
  PerApCoefficients coef;
  coef.M = static_cast<int>(H_i.n_rows);
  coef.N = static_cast<int>(theta_i.n_rows);
  const int K = static_cast<int>(p.n_elem);
  const arma::vec weights = 1.0 + gamma;

  coef.T = hermitize(theta_i * arma::diagmat(arma::conv_to<arma::cx_vec>::from(weights)) *
                     theta_i.t());

  if (!inv_hpd(coef.inv_Sigma, Sigma_i)) {
    const arma::vec ev = arma::eig_sym(hermitize(Sigma_i));
    throw NumericError("Sigma is numerically singular (eigenvalues in [" +
                       std::to_string(ev.min()) + ", " + std::to_string(ev.max()) + "])");
  }
  const auto ld_sigma = logdet_hpd(Sigma_i);
  if (!ld_sigma) throw NumericError("Sigma log-det failed: matrix not positive definite");
  coef.C_tilde = C_F * std::numbers::ln2 - *ld_sigma + coef.N;

  // The per-user sums in D factor exactly into a single Kronecker product:
  // sum_k w_k (sum_k' p_k' conj(h h^H) + sigma^2 I) kron (theta theta^H)
  // collapses to conj(S) kron T.
  coef.S = S_i;
  coef.D = arma::kron(arma::conj(S_i), coef.T);
  coef.quad_kernel = arma::kron(arma::conj(S_i), coef.inv_Sigma);

  coef.g_tilde.zeros(static_cast<arma::uword>(coef.M) * coef.N);
  for (int k = 0; k < K; ++k) {
    const arma::cx_vec g_k =
        std::sqrt(p(k)) * H_i.col(k) -
        H_i * (arma::conv_to<arma::cx_vec>::from(p) % arma::conj(alpha.row(k).st()));
    coef.g_tilde += 2.0 * weights(k) * arma::kron(arma::conj(g_k), arma::cx_vec(theta_i.col(k)));
  }

  if (!arma::chol(coef.chol_S, S_i))
    throw NumericError("received covariance S is not positive definite");
  {
    const arma::cx_mat G = arma::reshape(coef.g_tilde, coef.N, coef.M);
    arma::cx_mat X = arma::solve(arma::trimatl(coef.chol_S.t()), arma::cx_mat(0.5 * G.t()));
    X = arma::solve(arma::trimatu(coef.chol_S), X);
    coef.P = X.t();
  }
  return coef;
}

PerApCoefficients per_ap_coefficients(int i, const Solution& sol, const ChannelRealization& chan,
                                      const AuxState& aux, double C_F) {
  const auto reports = local_reports(sol, chan);
  const int N = static_cast<int>(sol.aps[i].W.n_rows);
  const arma::cx_mat alpha = cross_ap_couplings(i, reports, aux.theta);
  return assemble_ap_coefficients(chan.H[i], received_covariance(chan, i), chan.p, aux.gamma,
                                  aux.theta.rows(i * N, (i + 1) * N - 1), alpha, aux.Sigma[i],
                                  C_F);
}

PrimalIterate primal_step(const PerApCoefficients& coef, double mu, const AfpConfig& cfg) {
  PrimalIterate out;
  const int M = coef.M;
  const int N = coef.N;

  const arma::cx_mat A_N = hermitize(coef.T + mu * coef.inv_Sigma);
  arma::cx_mat r_n;
  const bool factored_ok = coef.P.n_elem > 0 && arma::chol(r_n, A_N);
  if (factored_ok) {
    // D + mu*quad_kernel = conj(S) kron A_N, so the stationarity system
    // vec(A_N W S) = vec(G/2) separates: W = A_N^{-1} * P with P = (G/2) S^{-1}.
    arma::cx_mat Y = arma::solve(arma::trimatl(r_n.t()), coef.P);
    Y = arma::solve(arma::trimatu(r_n), Y);
    out.w = arma::vectorise(Y);
  } else {
    arma::cx_mat A = coef.D + mu * coef.quad_kernel;
    if (mu == 0.0)
      A.diag() += cfg.ridge * std::real(arma::trace(coef.D)) / static_cast<double>(M * N);
    arma::cx_mat x;
    if (!solve_hpd(x, hermitize(A), arma::cx_mat(coef.g_tilde)))
      throw NumericError("primal step: linear solve failed after ridge loading");
    out.w = 0.5 * x.col(0);
  }

  const double mu_eff = std::max(mu, cfg.mu_floor);
  arma::cx_mat inv_term;
  if (!inv_hpd(inv_term, hermitize(coef.T + mu_eff * coef.inv_Sigma)))
    throw NumericError("primal step: T + mu inv(Sigma) not positive definite");
  out.Omega = hermitize(mu_eff * inv_term);
  return out;
}

double dual_step(double mu, double delta, const PerApCoefficients& coef, const arma::cx_vec& w,
                 const arma::cx_mat& Omega) {
  const auto ld = logdet_hpd(Omega);
  if (!ld) throw NumericError("dual step: Omega not positive definite");
  const double constraint = quad_form(w, coef.quad_kernel) + trace_prod(coef.inv_Sigma, Omega) -
                            *ld - coef.C_tilde;
  return std::max(0.0, mu + delta * constraint);
}

InnerResult inner_solve(const PerApCoefficients& coef, const arma::cx_mat& W_entering,
                        const arma::cx_mat& Omega_entering, const AfpConfig& cfg) {
  const double threshold = cfg.resolved_delta_in(coef.N, coef.M);
  arma::cx_mat W_old = W_entering;
  arma::cx_mat Om_old = Omega_entering;

  InnerResult res;
  res.truncated = true;
  double mu = 0.0;
  double delta = cfg.delta0;
  for (int it = 1; it <= cfg.max_inner; ++it) {
    const PrimalIterate p = primal_step(coef, mu, cfg);
    mu = dual_step(mu, delta, coef, p.w, p.Omega);
    delta *= cfg.decay_r;

    res.W = arma::reshape(p.w, coef.N, coef.M);
    res.Omega = p.Omega;
    res.iterations = it;
    const double diff = std::pow(arma::norm(res.W - W_old, "fro"), 2) +
                        std::pow(arma::norm(res.Omega - Om_old, "fro"), 2);
    if (diff <= threshold) {
      res.truncated = false;
      break;
    }
    W_old = res.W;
    Om_old = res.Omega;
  }
  return res;
}

InnerResult inner_solve(int i, const Solution& sol, const ChannelRealization& chan,
                        const AuxState& aux, double C_F, const AfpConfig& cfg) {
  const auto coef = per_ap_coefficients(i, sol, chan, aux, C_F);
  return inner_solve(coef, sol.aps[i].W, sol.aps[i].Omega, cfg);
}

void project_ap(arma::cx_mat& W, const arma::cx_mat& S, const arma::cx_mat& Omega, double C_F,
                double bisect_tol) {
  const arma::cx_mat B = hermitize(W * S * W.t());
  const auto ld_omega = logdet_hpd(Omega);
  if (!ld_omega) throw NumericError("projection requires positive definite Omega");

  const auto usage_at = [&](double c) {
    const auto ld = logdet_hpd(c * c * B + Omega);
    return ld ? (*ld - *ld_omega) / std::numbers::ln2
              : std::numeric_limits<double>::infinity();
  };
  if (usage_at(1.0) <= C_F) return;

  // usage is monotone increasing in c, zero at c = 0, so the root is bracketed.
  double lo = 0.0, hi = 1.0, accepted = 0.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double u = usage_at(mid);
    if (u > C_F) {
      hi = mid;
    } else {
      lo = mid;
      accepted = mid;
    }
    if (std::abs(u - C_F) <= bisect_tol * C_F && u <= C_F * (1.0 + bisect_tol)) {
      accepted = mid;
      break;
    }
  }
  W *= accepted;
}

Solution project_feasible(int i, const Solution& sol, const ChannelRealization& chan,
                          const SystemParams& params, const AfpConfig& cfg) {
  Solution out = sol;
  project_ap(out.aps[i].W, received_covariance(chan, i), out.aps[i].Omega, params.C_F,
             cfg.bisect_tol);
  return out;
}

std::uint64_t solution_digest(const Solution& sol) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& ap : sol.aps) {
    h = fnv1a_cx_mat(ap.W, h);
    h = fnv1a_cx_mat(ap.Omega, h);
  }
  return h;
}

arma::cx_mat normalized_channel(const arma::cx_mat& H, double sigma_z2) {
  return H / std::sqrt(sigma_z2);
}

ApProcessing normalized_init(const ApProcessing& ap, double sigma_z2, int N) {
  const double wn = arma::norm(ap.W, "fro");
  ApProcessing out;
  if (wn > 0) {
    const double scale = std::sqrt(static_cast<double>(N)) / wn;
    out.W = scale * ap.W;
    out.Omega = (scale * scale / sigma_z2) * ap.Omega;
  } else {
    out.W = ap.W;
    out.Omega = ap.Omega / sigma_z2;
  }
  return out;
}

AfpResult run_afp(const SystemParams& params, const ChannelRealization& chan,
                  const Solution& init, const AfpConfig& cfg) {
  params.validate();
  cfg.validate();
  init.validate(params.L, params.N, params.M);

  const double sigma_z = std::sqrt(chan.sigma_z2);
  ChannelRealization frame = chan;
  frame.sigma_z2 = 1.0;
  for (int i = 0; i < params.L; ++i) frame.H[i] = normalized_channel(chan.H[i], chan.sigma_z2);

  AfpResult res;
  res.solution.aps.resize(params.L);
  Solution& sol = res.solution;
  for (int i = 0; i < params.L; ++i)
    sol.aps[i] = normalized_init(init.aps[i], chan.sigma_z2, params.N);

  std::vector<arma::cx_mat> S(params.L);
  for (int i = 0; i < params.L; ++i) {
    S[i] = received_covariance(frame, i);
    arma::cx_mat r;
    if (!arma::chol(r, sol.aps[i].Omega))
      throw NumericError("run_afp: initial Omega for AP " + std::to_string(i) +
                         " is not positive definite");
    project_ap(sol.aps[i].W, S[i], sol.aps[i].Omega, params.C_F, cfg.bisect_tol);
  }

  double rate_old = sum_rate(sol, frame);
  res.trace.initial_sum_rate = rate_old;

  const auto t0 = std::chrono::steady_clock::now();
  auto reports = local_reports(sol, frame);

  for (int outer = 1; outer <= cfg.max_outer; ++outer) {
    AuxState aux;
    aux_gamma_theta(reports, frame.p, frame.sigma_z2, aux.gamma, aux.theta);
    aux.Sigma.resize(params.L);
    for (int i = 0; i < params.L; ++i)
      aux.Sigma[i] = sigma_update(sol.aps[i].W, S[i], sol.aps[i].Omega);

    std::vector<int> inner_iters(params.L, 0);
    for (int i = 0; i < params.L; ++i) {
      const arma::cx_mat alpha = cross_ap_couplings(i, reports, aux.theta);
      const auto coef = assemble_ap_coefficients(
          frame.H[i], S[i], frame.p, aux.gamma,
          arma::cx_mat(aux.theta.rows(i * params.N, (i + 1) * params.N - 1)), alpha, aux.Sigma[i],
          params.C_F);
      const InnerResult inner = inner_solve(coef, sol.aps[i].W, sol.aps[i].Omega, cfg);
      sol.aps[i].W = inner.W;
      sol.aps[i].Omega = inner.Omega;
      inner_iters[i] = inner.iterations;
      project_ap(sol.aps[i].W, S[i], sol.aps[i].Omega, params.C_F, cfg.bisect_tol);
      reports[i] = make_report(sol.aps[i].W, sol.aps[i].Omega, frame.H[i]);
    }

    const double rate_new = sum_rate(sol, frame);
    double violation = 0.0;
    for (int i = 0; i < params.L; ++i)
      violation = std::max(violation,
                           fronthaul_usage(sol.aps[i].W, S[i], sol.aps[i].Omega) - params.C_F);

    ConvergenceTrace::Row row;
    row.outer_iter = outer;
    row.sum_rate = rate_new;
    row.elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    row.max_fh_violation = std::max(0.0, violation);
    row.inner_iters = inner_iters;
    row.digest = solution_digest(sol);
    res.trace.rows.push_back(std::move(row));

    if (std::abs(rate_new - rate_old) <= cfg.delta_out) {
      for (int i = 0; i < params.L; ++i) sol.aps[i].W /= sigma_z;
      return res;
    }
    rate_old = rate_new;
  }
  res.truncated = true;
  for (int i = 0; i < params.L; ++i) sol.aps[i].W /= sigma_z;
  return res;
}

}  // namespace cfxl

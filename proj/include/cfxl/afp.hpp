#ifndef CFXL_AFP_HPP
#define CFXL_AFP_HPP

#include <armadillo>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "cfxl/sigmodel.hpp"

namespace cfxl {

// Fractional-programming auxiliary variables. theta is stored stacked:
// column k holds theta_k (length L*N), rows [i*N, (i+1)*N) form theta_{i,k}.
struct AuxState {
  arma::vec gamma;                  // K, nonnegative; equals the per-UE SINR
  arma::cx_mat theta;               // LN x K
  std::vector<arma::cx_mat> Sigma;  // L Hermitian PD N x N
};

// Per-AP subproblem data. D always has the factored form
// conj(S) kron T, and quad_kernel equals conj(S) kron inv(Sigma); the primal
// solver exploits the factorization, while the materialized matrices define
// the subproblem for verification. vec() stacks columns of the N x M
// transform.
struct PerApCoefficients {
  arma::cx_mat D;            // MN x MN Hermitian PSD
  arma::cx_vec g_tilde;      // MN
  arma::cx_mat T;            // N x N Hermitian PSD
  arma::cx_mat quad_kernel;  // MN x MN Hermitian PD
  double C_tilde = 0.0;      // C_F ln2 - ln det(Sigma) + N

  arma::cx_mat S;          // M x M received covariance
  arma::cx_mat inv_Sigma;  // N x N
  arma::cx_mat chol_S;     // upper Cholesky factor of S; empty disables the
                           // factored solve path
  arma::cx_mat P;          // (G/2) S^{-1} with G the N x M unstacking of
                           // g_tilde; the mu-independent factor of the solve
  int M = 0;
  int N = 0;
};

struct AfpConfig {
  double delta0 = 1.0;     // initial dual step size
  double decay_r = 0.95;   // geometric step decay, in (0,1)
  double delta_in = 0.0;   // inner stop on ||dW||_F^2 + ||dOmega||_F^2;
                           // 0 selects the scale-aware default 1e-6*N*(M+N)
  double delta_out = 1e-4; // outer stop on |sum-rate change|, bits/s/Hz
  int max_outer = 200;
  int max_inner = 500;
  double mu_floor = 1e-8;  // clamp for mu when evaluating Omega, keeps the
                           // dual subgradient finite at mu = 0
  double ridge = 1e-10;    // diagonal loading factor for the mu = 0 solve
  double bisect_tol = 1e-6;

  void validate() const;
  double resolved_delta_in(int N, int M) const;
};

struct ConvergenceTrace {
  struct Row {
    int outer_iter = 0;
    double sum_rate = 0.0;
    double elapsed_s = 0.0;
    double max_fh_violation = 0.0;
    std::vector<int> inner_iters;  // one count per AP
    std::uint64_t digest = 0;      // iterate digest; not part of the CSV
  };
  double initial_sum_rate = 0.0;
  std::vector<Row> rows;

  // Columns: outer_iter,sum_rate_bps_hz,elapsed_s,max_fh_violation,
  // inner_iters_per_ap (semicolon-joined).
  void to_csv(std::ostream& os) const;
};

struct AfpResult {
  Solution solution;
  ConvergenceTrace trace;
  bool truncated = false;  // outer iteration cap reached
};

// --- Auxiliary updates (closed form) ---------------------------------------

// gamma_k and theta_k from the per-AP reports; shared verbatim by the
// decentralized CPU node. Throws NumericError (with the offending index) on a
// singular system.
void aux_gamma_theta(const std::vector<ApReport>& reports, const arma::vec& p, double sigma_z2,
                     arma::vec& gamma, arma::cx_mat& theta);

// Sigma_i = W_i S_i W_i^H + Omega_i.
arma::cx_mat sigma_update(const arma::cx_mat& W, const arma::cx_mat& S, const arma::cx_mat& Omega);

AuxState update_aux(const Solution& sol, const ChannelRealization& chan);

// Quadratic-transform surrogate value; equals sum_rate when aux comes from
// update_aux, and is strictly smaller for any other choice.
double surrogate_objective(const Solution& sol, const ChannelRealization& chan,
                           const AuxState& aux);

// --- Per-AP subproblem ------------------------------------------------------

// alpha(k, k') = sum over other APs of theta_{i',k}^H W_{i'} h_{i',k'}; the
// cross-AP couplings entering g_tilde. Computed from reports so the
// decentralized CPU can evaluate it identically.
arma::cx_mat cross_ap_couplings(int i, const std::vector<ApReport>& reports,
                                const arma::cx_mat& theta);

PerApCoefficients assemble_ap_coefficients(const arma::cx_mat& H_i, const arma::cx_mat& S_i,
                                           const arma::vec& p, const arma::vec& gamma,
                                           const arma::cx_mat& theta_i, const arma::cx_mat& alpha,
                                           const arma::cx_mat& Sigma_i, double C_F);

PerApCoefficients per_ap_coefficients(int i, const Solution& sol, const ChannelRealization& chan,
                                      const AuxState& aux, double C_F);

struct PrimalIterate {
  arma::cx_vec w;      // MN, vec of the transform
  arma::cx_mat Omega;  // N x N Hermitian PD
};

// Lagrangian minimizer for fixed mu: w = (D + mu K)^{-1} g/2 and
// Omega = mu'(T + mu' inv(Sigma))^{-1} with mu' = max(mu, mu_floor).
PrimalIterate primal_step(const PerApCoefficients& coef, double mu, const AfpConfig& cfg);

// Projected subgradient ascent step on the dual variable.
double dual_step(double mu, double delta, const PerApCoefficients& coef, const arma::cx_vec& w,
                 const arma::cx_mat& Omega);

struct InnerResult {
  arma::cx_mat W;
  arma::cx_mat Omega;
  int iterations = 0;
  bool truncated = false;  // inner cap reached; last iterate returned
};

InnerResult inner_solve(const PerApCoefficients& coef, const arma::cx_mat& W_entering,
                        const arma::cx_mat& Omega_entering, const AfpConfig& cfg);
InnerResult inner_solve(int i, const Solution& sol, const ChannelRealization& chan,
                        const AuxState& aux, double C_F, const AfpConfig& cfg);

// Scales W down (bisection on c in (0,1)) until the fronthaul constraint
// holds with near-equality; no-op when already feasible.
void project_ap(arma::cx_mat& W, const arma::cx_mat& S, const arma::cx_mat& Omega, double C_F,
                double bisect_tol);
Solution project_feasible(int i, const Solution& sol, const ChannelRealization& chan,
                          const SystemParams& params, const AfpConfig& cfg);

AfpResult run_afp(const SystemParams& params, const ChannelRealization& chan,
                  const Solution& init, const AfpConfig& cfg);

std::uint64_t solution_digest(const Solution& sol);

// --- Internal solver frame ---------------------------------------------------
//
// The solver runs on a noise-normalized copy of the problem: channels are
// divided by sigma_z (so the in-frame noise variance is 1) and each initial
// pair is rescaled as (c W, c^2 Omega), which leaves every rate and fronthaul
// usage exactly invariant while bringing the iterates to O(1) magnitudes the
// absolute thresholds (delta0, delta_in, mu_floor) are calibrated for. Both
// execution modes share these helpers so their arithmetic is identical.

arma::cx_mat normalized_channel(const arma::cx_mat& H, double sigma_z2);
ApProcessing normalized_init(const ApProcessing& ap, double sigma_z2, int N);

}  // namespace cfxl

#endif  // CFXL_AFP_HPP

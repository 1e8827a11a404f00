#ifndef CFXL_SIGMODEL_HPP
#define CFXL_SIGMODEL_HPP

#include <armadillo>
#include <string>
#include <vector>

#include "cfxl/scenario.hpp"

namespace cfxl {

// One AP's processing pair: dimension-reducing transform and quantization
// noise covariance.
struct ApProcessing {
  arma::cx_mat W;      // N x M
  arma::cx_mat Omega;  // N x N Hermitian PSD
};

struct Solution {
  std::vector<ApProcessing> aps;

  int num_aps() const { return static_cast<int>(aps.size()); }
  // Throws ConfigError unless shapes match (L, N, M), Omega is Hermitian
  // within 1e-12 and PSD within -1e-10*trace, and all entries are finite.
  void validate(int L, int N, int M) const;
};

// S_i = H_i diag(p) H_i^H + sigma_z^2 I; Hermitian positive definite.
arma::cx_mat received_covariance(const ChannelRealization& chan, int i);

// log2 det(W S W^H + Omega) - log2 det(Omega). Returns +inf when Omega is
// numerically singular, so feasibility checks stay total.
double fronthaul_usage(const arma::cx_mat& W, const arma::cx_mat& S, const arma::cx_mat& Omega);
double fronthaul_usage(const Solution& sol, const ChannelRealization& chan, int i);

struct RateResult {
  double bits = 0.0;
  bool used_pseudo_inverse = false;  // set when C_IF was singular and a
                                     // pseudo-inverse evaluated the SINR
};

RateResult user_rate(const Solution& sol, const ChannelRealization& chan, int k);
double sum_rate(const Solution& sol, const ChannelRealization& chan);

// --- Per-AP sufficient statistics ---------------------------------------
//
// Everything the central estimator needs from AP i is the triple below; the
// decentralized mode transmits exactly these, and the centralized mode
// computes them locally. Keeping a single code path for the downstream
// algebra makes the two modes produce identical floating-point results.

struct ApReport {
  arma::cx_mat V;      // N x K, W_i * H_i (effective channels)
  arma::cx_mat G;      // N x N, W_i * W_i^H
  arma::cx_mat Omega;  // N x N
};

ApReport make_report(const arma::cx_mat& W, const arma::cx_mat& Omega, const arma::cx_mat& H_i);
std::vector<ApReport> local_reports(const Solution& sol, const ChannelRealization& chan);

// Stacked effective channel matrix U (LN x K, column k = Wbar h_k).
arma::cx_mat stacked_effective_channels(const std::vector<ApReport>& reports);

// sigma^2 blkdiag(G_i) + blkdiag(Omega_i), the signal-independent part of the
// CPU-side covariance.
arma::cx_mat stacked_noise_covariance(const std::vector<ApReport>& reports, double sigma_z2);

std::vector<RateResult> rates_from_reports(const std::vector<ApReport>& reports,
                                           const arma::vec& p, double sigma_z2);

// --- Serialization --------------------------------------------------------

// Plain-text (JSON) round trip for trace replay; schema documented in README.
std::string solution_to_json(const Solution& sol);
Solution solution_from_json(const std::string& text);
void save_solution(const Solution& sol, const std::string& path);
Solution load_solution(const std::string& path);

}  // namespace cfxl

#endif  // CFXL_SIGMODEL_HPP

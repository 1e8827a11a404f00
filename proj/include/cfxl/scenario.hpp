#ifndef CFXL_SCENARIO_HPP
#define CFXL_SCENARIO_HPP

#include <armadillo>
#include <cstdint>
#include <vector>

#include "cfxl/errors.hpp"

namespace cfxl {

// All scenario constants. Powers are handled on a single linear scale (watts)
// after conversion from the dBm/dB inputs below.
struct SystemParams {
  int K = 8;                         // number of single-antenna UEs
  int L = 4;                         // number of APs
  int M = 100;                       // antennas per AP
  int N = 2;                         // reduced dimension per AP, N <= M
  double C_F = 4.0;                  // fronthaul capacity per AP, bits/s/Hz
  double fc = 3.5e9;                 // carrier frequency, Hz
  double bandwidth = 2e7;            // system bandwidth, Hz
  double tx_power_dbm = 23.0;        // per-UE transmit power, dBm
  double noise_psd_dbm_hz = -169.0;  // noise power spectral density, dBm/Hz
  double area_radius_m = 100.0;      // service-area radius, m
  double min_dist_m = 10.0;          // minimum AP-UE distance, m
  double shadowing_sigma_db = 8.1;   // log-normal shadowing std dev, dB

  void validate() const;  // throws ConfigError on violation
};

struct Placement {
  arma::mat ap_xy;  // L x 2, meters
  arma::mat ue_xy;  // K x 2, meters
};

struct ChannelRealization {
  std::vector<arma::cx_mat> H;  // L matrices, each M x K; column k = h_{i,k}
  arma::mat beta_lin;           // L x K linear-scale attenuation (path loss factor)
  arma::vec p;                  // K transmit powers, watts
  double sigma_z2 = 0.0;        // noise variance, watts

  int num_aps() const { return static_cast<int>(H.size()); }
  int num_ues() const { return static_cast<int>(p.n_elem); }
  int num_antennas() const { return H.empty() ? 0 : static_cast<int>(H[0].n_rows); }
  void validate() const;  // shape/positivity/finiteness checks
};

double db_to_linear(double db);
double linear_to_db(double lin);

// Distance/frequency path loss in dB plus the supplied shadowing realization.
// The caller draws the shadowing term separately.
double path_loss_db(double d_m, double fc_hz, double shadow_db);

// Total noise power (watts) over the configured bandwidth.
double noise_power(const SystemParams& params);

// Uniform AP/UE drop in the disc; UE positions are rejection-resampled until
// the nearest AP is at least min_dist_m away. Deterministic per seed.
Placement draw_placement(const SystemParams& params, std::uint64_t seed);

// Path loss + i.i.d. shadowing + Rayleigh fading channel draw; deterministic
// per seed for a fixed placement.
ChannelRealization draw_channel(const SystemParams& params, const Placement& placement,
                                std::uint64_t seed);

// Assembles a realization from explicit per-link path losses (dB) and fading
// matrices; draw_channel is this plus the random draws.
ChannelRealization assemble_channel(const SystemParams& params, const arma::mat& beta_db,
                                    const std::vector<arma::cx_mat>& fading);

// Stable digest of the channel contents, for paired-trial verification.
std::uint64_t channel_digest(const ChannelRealization& chan);

}  // namespace cfxl

#endif  // CFXL_SCENARIO_HPP

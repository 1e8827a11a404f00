#include "cfxl/scenario.hpp"

#include <cmath>
#include <sstream>

#include "cfxl/linalg.hpp"
#include "cfxl/rng.hpp"

namespace cfxl {
namespace {

constexpr double kSpeedOfLight = 299792458.0;  // m/s
constexpr int kMaxUePlacementAttempts = 100000;

// Substream tags so placement/shadowing/fading draws do not interleave.
constexpr std::uint64_t kTagPlacement = 0x706c6163;
constexpr std::uint64_t kTagShadowing = 0x73686164;
constexpr std::uint64_t kTagFading = 0x66616465;

arma::rowvec2 draw_in_disc(Rng& rng, double radius) {
  // Polar inversion sampling: radius sqrt(u) gives the uniform disc density.
  const double r = radius * std::sqrt(rng.uniform());
  const double a = 2.0 * arma::datum::pi * rng.uniform();
  return {r * std::cos(a), r * std::sin(a)};
}

}  // namespace

void SystemParams::validate() const {
  std::ostringstream bad;
  if (K < 1) bad << "K must be >= 1; ";
  if (L < 1) bad << "L must be >= 1; ";
  if (N < 1 || N > M) bad << "N must satisfy 1 <= N <= M; ";
  if (!(C_F > 0)) bad << "C_F must be > 0; ";
  if (!(fc > 0)) bad << "fc must be > 0; ";
  if (!(bandwidth > 0)) bad << "bandwidth must be > 0; ";
  if (!(min_dist_m >= 0)) bad << "min_dist_m must be >= 0; ";
  if (!(area_radius_m > min_dist_m)) bad << "area_radius_m must exceed min_dist_m; ";
  if (!(shadowing_sigma_db >= 0)) bad << "shadowing_sigma_db must be >= 0; ";
  const std::string msg = bad.str();
  if (!msg.empty()) throw ConfigError("invalid system parameters: " + msg);
}

void ChannelRealization::validate() const {
  const int L = num_aps();
  const int K = num_ues();
  const int M = num_antennas();
  if (L < 1 || K < 1 || M < 1) throw ConfigError("channel realization is empty");
  if (static_cast<int>(beta_lin.n_rows) != L || static_cast<int>(beta_lin.n_cols) != K)
    throw ConfigError("beta_lin shape does not match (L, K)");
  for (int i = 0; i < L; ++i) {
    if (static_cast<int>(H[i].n_rows) != M || static_cast<int>(H[i].n_cols) != K)
      throw ConfigError("channel matrix " + std::to_string(i) + " has inconsistent shape");
    if (!H[i].is_finite()) throw ConfigError("channel matrix has non-finite entries");
  }
  if (!beta_lin.is_finite() || arma::any(arma::vectorise(beta_lin) <= 0.0))
    throw ConfigError("beta_lin entries must be positive and finite");
  if (!p.is_finite() || arma::any(p <= 0.0)) throw ConfigError("transmit powers must be positive");
  if (!(sigma_z2 > 0.0) || !std::isfinite(sigma_z2)) throw ConfigError("sigma_z2 must be positive");
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

double path_loss_db(double d_m, double fc_hz, double shadow_db) {
  if (!(d_m > 0.0)) throw std::domain_error("path_loss_db: distance must be positive");
  if (!(fc_hz > 0.0)) throw std::domain_error("path_loss_db: carrier frequency must be positive");
  return 20.0 * std::log10(4.0 * arma::datum::pi * fc_hz / kSpeedOfLight) +
         31.0 * std::log10(d_m) + shadow_db;
}

double noise_power(const SystemParams& params) {
  const double total_dbm = params.noise_psd_dbm_hz + 10.0 * std::log10(params.bandwidth);
  return db_to_linear(total_dbm - 30.0);  // dBm -> watts
}

Placement draw_placement(const SystemParams& params, std::uint64_t seed) {
  params.validate();
  Rng rng(substream(seed, kTagPlacement));

  Placement out;
  out.ap_xy.set_size(params.L, 2);
  for (int i = 0; i < params.L; ++i) out.ap_xy.row(i) = draw_in_disc(rng, params.area_radius_m);

  out.ue_xy.set_size(params.K, 2);
  for (int k = 0; k < params.K; ++k) {
    bool placed = false;
    for (int attempt = 0; attempt < kMaxUePlacementAttempts; ++attempt) {
      const arma::rowvec2 pos = draw_in_disc(rng, params.area_radius_m);
      double min_d = arma::datum::inf;
      for (int i = 0; i < params.L; ++i)
        min_d = std::min(min_d, arma::norm(pos - out.ap_xy.row(i), 2));
      if (min_d >= params.min_dist_m) {
        out.ue_xy.row(k) = pos;
        placed = true;
        break;
      }
    }
    if (!placed)
      throw GenerationError("draw_placement: UE " + std::to_string(k) + " rejected " +
                            std::to_string(kMaxUePlacementAttempts) +
                            " times; geometry leaves no admissible area");
  }
  return out;
}

ChannelRealization assemble_channel(const SystemParams& params, const arma::mat& beta_db,
                                    const std::vector<arma::cx_mat>& fading) {
  ChannelRealization chan;
  chan.beta_lin.set_size(params.L, params.K);
  chan.H.resize(params.L);
  for (int i = 0; i < params.L; ++i) {
    chan.H[i].set_size(params.M, params.K);
    for (int k = 0; k < params.K; ++k) {
      const double bl = db_to_linear(beta_db(i, k));
      chan.beta_lin(i, k) = bl;
      chan.H[i].col(k) = fading[i].col(k) / std::sqrt(bl);
    }
  }
  chan.p = arma::vec(params.K, arma::fill::value(db_to_linear(params.tx_power_dbm - 30.0)));
  chan.sigma_z2 = noise_power(params);
  chan.validate();
  return chan;
}

ChannelRealization draw_channel(const SystemParams& params, const Placement& placement,
                                std::uint64_t seed) {
  params.validate();
  if (static_cast<int>(placement.ap_xy.n_rows) != params.L ||
      static_cast<int>(placement.ue_xy.n_rows) != params.K)
    throw ConfigError("draw_channel: placement does not match params");

  Rng shadow_rng(substream(seed, kTagShadowing));
  arma::mat beta_db(params.L, params.K);
  for (int i = 0; i < params.L; ++i)
    for (int k = 0; k < params.K; ++k) {
      const double d = arma::norm(placement.ap_xy.row(i) - placement.ue_xy.row(k), 2);
      const double chi = params.shadowing_sigma_db * shadow_rng.gauss();
      beta_db(i, k) = path_loss_db(d, params.fc, chi);
    }

  Rng fade_rng(substream(seed, kTagFading));
  std::vector<arma::cx_mat> fading(params.L);
  for (int i = 0; i < params.L; ++i) {
    fading[i].set_size(params.M, params.K);
    for (int k = 0; k < params.K; ++k)
      for (int m = 0; m < params.M; ++m) fading[i](m, k) = fade_rng.cgauss();
  }

  return assemble_channel(params, beta_db, fading);
}

std::uint64_t channel_digest(const ChannelRealization& chan) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& Hi : chan.H) h = fnv1a_cx_mat(Hi, h);
  h = fnv1a_bytes(chan.beta_lin.memptr(), chan.beta_lin.n_elem * sizeof(double), h);
  h = fnv1a_bytes(chan.p.memptr(), chan.p.n_elem * sizeof(double), h);
  h = fnv1a_bytes(&chan.sigma_z2, sizeof(double), h);
  return h;
}

}  // namespace cfxl

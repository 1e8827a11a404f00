#include "cfxl/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numeric>

#include "cfxl/linalg.hpp"
#include "cfxl/rng.hpp"

namespace cfxl {
namespace {

constexpr std::uint64_t kTagLocalRandom = 0x726e6477;

}  // namespace

BaselineKind baseline_kind_from_string(const std::string& tag) {
  if (tag == "evd") return BaselineKind::EVD;
  if (tag == "mf") return BaselineKind::MF;
  if (tag == "random") return BaselineKind::RANDOM;
  throw ConfigError("unknown baseline scheme '" + tag + "' (expected evd, mf or random)");
}

arma::cx_mat local_evd(const ChannelRealization& chan, int i, int N) {
  const arma::cx_mat S = received_covariance(chan, i);
  const int M = static_cast<int>(S.n_rows);
  if (N > M) throw ConfigError("local_evd: N exceeds M");

  arma::vec eigval;
  arma::cx_mat eigvec;
  if (!arma::eig_sym(eigval, eigvec, S))
    throw NumericError("local_evd: eigendecomposition failed for AP " + std::to_string(i));

  // eig_sym returns ascending eigenvalues; take the trailing N, leading first.
  arma::cx_mat W(N, M);
  for (int n = 0; n < N; ++n) {
    arma::cx_vec v = eigvec.col(M - 1 - n);
    const arma::uword imax = arma::index_max(arma::abs(v));
    const std::complex<double> pivot = v(imax);
    if (std::abs(pivot) > 0) v *= std::conj(pivot) / std::abs(pivot);
    W.row(n) = v.t();
  }
  return W;
}

arma::cx_mat local_mf(const ChannelRealization& chan, int i, int N) {
  const int K = chan.num_ues();
  if (N > K) throw ConfigError("local_mf: N exceeds the number of UEs");

  const arma::cx_mat& Hi = chan.H[i];
  arma::vec gain(K);
  for (int k = 0; k < K; ++k) gain(k) = chan.p(k) * std::pow(arma::norm(Hi.col(k), 2), 2);

  std::vector<int> order(K);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return gain(a) > gain(b); });

  arma::cx_mat W(N, Hi.n_rows);
  for (int n = 0; n < N; ++n) W.row(n) = Hi.col(order[n]).t();
  return W;
}

arma::cx_mat local_random(const SystemParams& params, std::uint64_t seed, int i) {
  Rng rng(substream(substream(seed, kTagLocalRandom), static_cast<std::uint64_t>(i)));
  arma::cx_mat W(params.N, params.M);
  for (int m = 0; m < params.M; ++m)
    for (int n = 0; n < params.N; ++n) W(n, m) = rng.cgauss();
  return W;
}

arma::cx_mat uniform_quantization(const arma::cx_mat& W_i, const arma::cx_mat& S_i, double C_F,
                                  double sigma_z2) {
  if (!(C_F > 0)) throw ConfigError("uniform_quantization: C_F must be positive");
  const int N = static_cast<int>(W_i.n_rows);
  const double denom = std::exp2(C_F / N) - 1.0;

  arma::cx_mat Omega(N, N, arma::fill::zeros);
  for (int n = 0; n < N; ++n) {
    const arma::cx_vec w = W_i.row(n).t();  // w_{i,n}
    double omega = std::real(arma::cdot(w, S_i * w)) / denom;
    if (!(omega > 0)) {
      std::fprintf(stderr,
                   "uniform_quantization: zero transform row %d, flooring its "
                   "quantization noise\n",
                   n);
      omega = 1e-12 * sigma_z2;
    }
    Omega(n, n) = omega;
  }
  return Omega;
}

arma::cx_mat uniform_quantization(const arma::cx_mat& W_i, const ChannelRealization& chan, int i,
                                  double C_F) {
  return uniform_quantization(W_i, received_covariance(chan, i), C_F, chan.sigma_z2);
}

Solution baseline_solution(BaselineKind kind, const SystemParams& params,
                           const ChannelRealization& chan, std::uint64_t seed) {
  Solution sol;
  sol.aps.resize(params.L);
  for (int i = 0; i < params.L; ++i) {
    arma::cx_mat W;
    switch (kind) {
      case BaselineKind::EVD: W = local_evd(chan, i, params.N); break;
      case BaselineKind::MF: W = local_mf(chan, i, params.N); break;
      case BaselineKind::RANDOM: W = local_random(params, seed, i); break;
    }
    sol.aps[i].Omega = uniform_quantization(W, chan, i, params.C_F);
    sol.aps[i].W = std::move(W);
  }
  return sol;
}

}  // namespace cfxl

#ifndef CFXL_TEST_SUPPORT_HPP
#define CFXL_TEST_SUPPORT_HPP

#include <armadillo>
#include <cstdint>

#include "cfxl/rng.hpp"
#include "cfxl/scenario.hpp"
#include "cfxl/sigmodel.hpp"

namespace cfxl::test {

inline arma::cx_mat random_cx_mat(Rng& rng, int rows, int cols) {
  arma::cx_mat m(rows, cols);
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r) m(r, c) = rng.cgauss();
  return m;
}

inline arma::cx_vec random_cx_vec(Rng& rng, int n) {
  return arma::cx_vec(random_cx_mat(rng, n, 1));
}

// Haar-ish random unitary via QR of a Gaussian matrix.
inline arma::cx_mat random_unitary(Rng& rng, int n) {
  arma::cx_mat q, r;
  arma::qr(q, r, random_cx_mat(rng, n, n));
  for (int j = 0; j < n; ++j) {
    const auto d = r(j, j);
    if (std::abs(d) > 0) q.col(j) *= d / std::abs(d);
  }
  return q;
}

// Hermitian PD with eigenvalues uniform in [lo, hi].
inline arma::cx_mat random_hpd(Rng& rng, int n, double lo = 0.5, double hi = 2.0) {
  const arma::cx_mat q = random_unitary(rng, n);
  arma::vec ev(n);
  for (int i = 0; i < n; ++i) ev(i) = lo + (hi - lo) * rng.uniform();
  return arma::cx_mat(q * arma::diagmat(arma::conv_to<arma::cx_vec>::from(ev)) * q.t());
}

// Small synthetic channel with O(1) scales; good conditioning for oracles.
inline ChannelRealization synthetic_channel(Rng& rng, int L, int K, int M) {
  ChannelRealization chan;
  chan.H.resize(L);
  chan.beta_lin.set_size(L, K);
  for (int i = 0; i < L; ++i) {
    chan.H[i] = random_cx_mat(rng, M, K);
    for (int k = 0; k < K; ++k) chan.beta_lin(i, k) = 0.5 + rng.uniform();
  }
  chan.p.set_size(K);
  for (int k = 0; k < K; ++k) chan.p(k) = 0.5 + rng.uniform();
  chan.sigma_z2 = 0.5 + rng.uniform();
  return chan;
}

// Random feasible-ish solution: Gaussian transforms, PD Omega.
inline Solution random_solution(Rng& rng, int L, int N, int M, double omega_scale = 1.0) {
  Solution sol;
  sol.aps.resize(L);
  for (int i = 0; i < L; ++i) {
    sol.aps[i].W = random_cx_mat(rng, N, M) / std::sqrt(static_cast<double>(M));
    sol.aps[i].Omega = omega_scale * random_hpd(rng, N, 0.3, 1.5);
  }
  return sol;
}

// Independent log-det route for the eigenvalue-product oracle.
inline double logdet_by_eigenvalues(const arma::cx_mat& a) {
  const arma::vec ev = arma::eig_sym(arma::cx_mat(0.5 * (a + a.t())));
  double acc = 0.0;
  for (const double v : ev) acc += std::log(v);
  return acc;
}

}  // namespace cfxl::test

#endif  // CFXL_TEST_SUPPORT_HPP

#ifndef CFXL_LINALG_HPP
#define CFXL_LINALG_HPP

#include <armadillo>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>

namespace cfxl {

// Hermitian part, used as roundoff hygiene after products of the form X*A*X^H.
inline arma::cx_mat hermitize(const arma::cx_mat& a) { return 0.5 * (a + a.t()); }

// log(det(A)) for Hermitian positive definite A via Cholesky; nullopt when the
// factorization fails (A not numerically PD).
inline std::optional<double> logdet_hpd(const arma::cx_mat& a) {
  arma::cx_mat r;
  if (!arma::chol(r, a)) return std::nullopt;
  double acc = 0.0;
  for (arma::uword j = 0; j < r.n_cols; ++j) acc += std::log(r(j, j).real());
  return 2.0 * acc;
}

// Cholesky-backed solve A*X = B for Hermitian positive definite A.
inline bool solve_hpd(arma::cx_mat& x, const arma::cx_mat& a, const arma::cx_mat& b) {
  arma::cx_mat r;
  if (!arma::chol(r, a)) return false;  // a = r.t()*r, r upper triangular
  const arma::cx_mat y = arma::solve(arma::trimatl(r.t()), b);
  x = arma::solve(arma::trimatu(r), y);
  return true;
}

inline bool inv_hpd(arma::cx_mat& x, const arma::cx_mat& a) {
  return arma::inv_sympd(x, a);
}

// x^H A x for Hermitian A; the imaginary part is roundoff and dropped.
inline double quad_form(const arma::cx_vec& x, const arma::cx_mat& a) {
  return std::real(arma::cdot(x, a * x));
}

inline double trace_prod(const arma::cx_mat& a, const arma::cx_mat& b) {
  return std::real(arma::accu(a % b.st()));  // tr(A*B) = sum_ij A_ij B_ji
}

// FNV-1a over the raw little-endian bytes of a double array; stable across
// runs and platforms with IEEE-754 doubles.
inline std::uint64_t fnv1a_bytes(const void* data, std::size_t n, std::uint64_t h = 0xcbf29ce484222325ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t fnv1a_cx_mat(const arma::cx_mat& m, std::uint64_t h = 0xcbf29ce484222325ULL) {
  return fnv1a_bytes(m.memptr(), m.n_elem * sizeof(std::complex<double>), h);
}

}  // namespace cfxl

#endif  // CFXL_LINALG_HPP

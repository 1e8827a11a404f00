#ifndef CFXL_BASELINES_HPP
#define CFXL_BASELINES_HPP

#include <armadillo>
#include <cstdint>
#include <string>

#include "cfxl/sigmodel.hpp"

namespace cfxl {

enum class BaselineKind { EVD, MF, RANDOM };

BaselineKind baseline_kind_from_string(const std::string& tag);  // throws ConfigError

// Rows of W are the N leading eigenvectors of S_i, leading eigenvalue first.
// Eigenvector phase is fixed by rotating the largest-magnitude entry to the
// positive real axis, so results are reproducible across LAPACK builds.
arma::cx_mat local_evd(const ChannelRealization& chan, int i, int N);

// Partial matched filter: rows are h_{i,k}^H for the N UEs with the largest
// received gains p_k ||h_{i,k}||^2; ties break toward the lower UE index.
arma::cx_mat local_mf(const ChannelRealization& chan, int i, int N);

// i.i.d. CN(0,1) entries; each AP index gets its own substream of the seed.
arma::cx_mat local_random(const SystemParams& params, std::uint64_t seed, int i);

// Uniform per-component quantization: Omega = diag(w_n^H S w_n / (2^(C_F/N)-1)).
// A zero row would make Omega singular; its entry is floored at
// 1e-12 * sigma_z2 with a warning on stderr.
arma::cx_mat uniform_quantization(const arma::cx_mat& W_i, const arma::cx_mat& S_i, double C_F,
                                  double sigma_z2);
arma::cx_mat uniform_quantization(const arma::cx_mat& W_i, const ChannelRealization& chan, int i,
                                  double C_F);

// Full local-CSI solution: per-AP transform of the given kind plus the
// uniform quantization rule.
Solution baseline_solution(BaselineKind kind, const SystemParams& params,
                           const ChannelRealization& chan, std::uint64_t seed);

}  // namespace cfxl

#endif  // CFXL_BASELINES_HPP

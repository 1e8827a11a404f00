#include "cfxl/sigmodel.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>

#include "cfxl/linalg.hpp"
#include "json.hpp"

namespace cfxl {

void Solution::validate(int L, int N, int M) const {
  if (num_aps() != L) throw ConfigError("solution must have exactly L AP entries");
  for (int i = 0; i < L; ++i) {
    const auto& ap = aps[i];
    if (static_cast<int>(ap.W.n_rows) != N || static_cast<int>(ap.W.n_cols) != M)
      throw ConfigError("W for AP " + std::to_string(i) + " must be N x M");
    if (static_cast<int>(ap.Omega.n_rows) != N || static_cast<int>(ap.Omega.n_cols) != N)
      throw ConfigError("Omega for AP " + std::to_string(i) + " must be N x N");
    if (!ap.W.is_finite() || !ap.Omega.is_finite())
      throw ConfigError("solution entries must be finite");
    const double scale = std::max(arma::norm(ap.Omega, "fro"), 1.0);
    if (arma::norm(ap.Omega - ap.Omega.t(), "fro") > 1e-12 * scale)
      throw ConfigError("Omega for AP " + std::to_string(i) + " is not Hermitian");
    const arma::vec ev = arma::eig_sym(hermitize(ap.Omega));
    const double tr = std::real(arma::trace(ap.Omega));
    if (ev.min() < -1e-10 * std::max(tr, 0.0) - 1e-300)
      throw ConfigError("Omega for AP " + std::to_string(i) + " is not PSD");
  }
}

arma::cx_mat received_covariance(const ChannelRealization& chan, int i) {
  const arma::cx_mat& Hi = chan.H.at(i);
  arma::cx_mat s = Hi * arma::diagmat(arma::conv_to<arma::cx_vec>::from(chan.p)) * Hi.t();
  s.diag() += chan.sigma_z2;
  return hermitize(s);
}

double fronthaul_usage(const arma::cx_mat& W, const arma::cx_mat& S, const arma::cx_mat& Omega) {
  const auto ld_omega = logdet_hpd(Omega);
  if (!ld_omega) return std::numeric_limits<double>::infinity();
  const arma::cx_mat B = hermitize(W * S * W.t()) + Omega;
  const auto ld_total = logdet_hpd(B);
  if (!ld_total) return std::numeric_limits<double>::infinity();
  return (*ld_total - *ld_omega) / std::numbers::ln2;
}

double fronthaul_usage(const Solution& sol, const ChannelRealization& chan, int i) {
  return fronthaul_usage(sol.aps.at(i).W, received_covariance(chan, i), sol.aps.at(i).Omega);
}

ApReport make_report(const arma::cx_mat& W, const arma::cx_mat& Omega, const arma::cx_mat& H_i) {
  return ApReport{W * H_i, hermitize(W * W.t()), Omega};
}

std::vector<ApReport> local_reports(const Solution& sol, const ChannelRealization& chan) {
  std::vector<ApReport> out;
  out.reserve(sol.aps.size());
  for (std::size_t i = 0; i < sol.aps.size(); ++i)
    out.push_back(make_report(sol.aps[i].W, sol.aps[i].Omega, chan.H[i]));
  return out;
}

arma::cx_mat stacked_effective_channels(const std::vector<ApReport>& reports) {
  const int L = static_cast<int>(reports.size());
  const int N = static_cast<int>(reports[0].V.n_rows);
  const int K = static_cast<int>(reports[0].V.n_cols);
  arma::cx_mat U(L * N, K);
  for (int i = 0; i < L; ++i) U.rows(i * N, (i + 1) * N - 1) = reports[i].V;
  return U;
}

arma::cx_mat stacked_noise_covariance(const std::vector<ApReport>& reports, double sigma_z2) {
  const int L = static_cast<int>(reports.size());
  const int N = static_cast<int>(reports[0].G.n_rows);
  arma::cx_mat B(L * N, L * N, arma::fill::zeros);
  for (int i = 0; i < L; ++i) {
    const arma::span blk(i * N, (i + 1) * N - 1);
    B(blk, blk) = sigma_z2 * reports[i].G + reports[i].Omega;
  }
  return B;
}

std::vector<RateResult> rates_from_reports(const std::vector<ApReport>& reports,
                                           const arma::vec& p, double sigma_z2) {
  const int K = static_cast<int>(p.n_elem);
  const arma::cx_mat U = stacked_effective_channels(reports);
  const arma::cx_mat B = stacked_noise_covariance(reports, sigma_z2);

  std::vector<RateResult> out(K);
  for (int k = 0; k < K; ++k) {
    arma::cx_mat c_if = B;
    for (int kp = 0; kp < K; ++kp) {
      if (kp == k) continue;
      c_if += p(kp) * (U.col(kp) * U.col(kp).t());
    }
    c_if = hermitize(c_if);
    arma::cx_mat x;
    RateResult r;
    if (solve_hpd(x, c_if, arma::cx_mat(U.col(k)))) {
      r.bits = std::log2(1.0 + p(k) * std::real(arma::cdot(U.col(k), x.col(0))));
    } else {
      // Singular interference covariance (Omega not PD). Evaluate through a
      // pseudo-inverse; tolerance is Armadillo's default max(dim)*eps*sigma_max.
      const arma::cx_mat pi = arma::pinv(c_if);
      r.bits = std::log2(1.0 + p(k) * std::real(arma::cdot(U.col(k), pi * U.col(k))));
      r.used_pseudo_inverse = true;
    }
    if (r.bits < 0.0 && r.bits > -1e-12) r.bits = 0.0;  // clamp roundoff
    out[k] = r;
  }
  return out;
}

RateResult user_rate(const Solution& sol, const ChannelRealization& chan, int k) {
  return rates_from_reports(local_reports(sol, chan), chan.p, chan.sigma_z2).at(k);
}

double sum_rate(const Solution& sol, const ChannelRealization& chan) {
  const auto rates = rates_from_reports(local_reports(sol, chan), chan.p, chan.sigma_z2);
  double acc = 0.0;
  for (const auto& r : rates) acc += r.bits;
  return acc;
}

namespace {

nlohmann::json mat_to_json(const arma::mat& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (arma::uword r = 0; r < m.n_rows; ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (arma::uword c = 0; c < m.n_cols; ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

arma::mat mat_from_json(const nlohmann::json& j) {
  const arma::uword rows = j.size();
  const arma::uword cols = rows == 0 ? 0 : j.at(0).size();
  arma::mat m(rows, cols);
  for (arma::uword r = 0; r < rows; ++r)
    for (arma::uword c = 0; c < cols; ++c) m(r, c) = j.at(r).at(c).get<double>();
  return m;
}

}  // namespace

std::string solution_to_json(const Solution& sol) {
  nlohmann::json j;
  j["format"] = "cfxl-solution";
  j["version"] = 1;
  j["aps"] = nlohmann::json::array();
  for (const auto& ap : sol.aps) {
    nlohmann::json a;
    a["W_re"] = mat_to_json(arma::real(ap.W));
    a["W_im"] = mat_to_json(arma::imag(ap.W));
    a["Omega_re"] = mat_to_json(arma::real(ap.Omega));
    a["Omega_im"] = mat_to_json(arma::imag(ap.Omega));
    j["aps"].push_back(std::move(a));
  }
  return j.dump(2);
}

Solution solution_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("solution parse error: ") + e.what());
  }
  if (!j.contains("aps")) throw ConfigError("solution file lacks 'aps'");
  Solution sol;
  for (const auto& a : j["aps"]) {
    ApProcessing ap;
    ap.W = arma::cx_mat(mat_from_json(a.at("W_re")), mat_from_json(a.at("W_im")));
    ap.Omega = arma::cx_mat(mat_from_json(a.at("Omega_re")), mat_from_json(a.at("Omega_im")));
    sol.aps.push_back(std::move(ap));
  }
  return sol;
}

void save_solution(const Solution& sol, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open " + path + " for writing");
  f << solution_to_json(sol) << "\n";
  if (!f) throw IoError("write failed: " + path);
}

Solution load_solution(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return solution_from_json(text);
}

}  // namespace cfxl

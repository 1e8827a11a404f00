#include "cfxl/scenario.hpp"

#include <cmath>

#include "cfxl/rng.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace cfxl;

namespace {

SystemParams small_params() {
  SystemParams p;
  p.K = 4;
  p.L = 3;
  p.M = 5;
  p.N = 2;
  return p;
}

}  // namespace

TEST_CASE("path_loss_db matches the frozen oracle values") {
  // frozen from an independent high-precision evaluation with c = 299792458
  CHECK(path_loss_db(10.0, 3.5e9, 0.0) == doctest::Approx(74.3291441089).epsilon(1e-9));
  CHECK(path_loss_db(100.0, 3.5e9, 0.0) == doctest::Approx(105.3291441089).epsilon(1e-9));
}

TEST_CASE("path_loss_db at d=1 reduces to the frequency term plus shadowing") {
  const double freq_term = path_loss_db(1.0, 3.5e9, 0.0);
  CHECK(path_loss_db(1.0, 3.5e9, 5.0) == doctest::Approx(freq_term + 5.0).epsilon(1e-14));
}

TEST_CASE("path_loss_db rejects non-positive inputs") {
  CHECK_THROWS_AS(path_loss_db(0.0, 3.5e9, 0.0), std::domain_error);
  CHECK_THROWS_AS(path_loss_db(-1.0, 3.5e9, 0.0), std::domain_error);
  CHECK_THROWS_AS(path_loss_db(10.0, 0.0, 0.0), std::domain_error);
}

TEST_CASE("dB and linear scales round trip") {
  Rng rng(11);
  for (int t = 0; t < 200; ++t) {
    const double x = -150.0 + 300.0 * rng.uniform();
    CHECK(linear_to_db(db_to_linear(x)) == doctest::Approx(x).epsilon(1e-12));
  }
}

TEST_CASE("noise_power matches the analytic dBm total") {
  SystemParams p;
  p.noise_psd_dbm_hz = -169.0;
  p.bandwidth = 2e7;
  // frozen oracle: -169 + 10 log10(2e7) dBm
  const double total_dbm = linear_to_db(noise_power(p)) + 30.0;
  CHECK(total_dbm == doctest::Approx(-95.9897000434).epsilon(1e-10));

  p.bandwidth = 1.0;
  CHECK(linear_to_db(noise_power(p)) + 30.0 == doctest::Approx(p.noise_psd_dbm_hz));

  p.bandwidth = 2.0;
  SystemParams q = p;
  q.bandwidth = 4.0;
  const double gain_db = linear_to_db(noise_power(q)) - linear_to_db(noise_power(p));
  CHECK(gain_db == doctest::Approx(10.0 * std::log10(2.0)).epsilon(1e-12));
}

TEST_CASE("draw_placement is deterministic and respects its invariants") {
  const SystemParams p = small_params();
  const Placement a = draw_placement(p, 42);
  const Placement b = draw_placement(p, 42);
  CHECK(arma::approx_equal(a.ap_xy, b.ap_xy, "absdiff", 0.0));
  CHECK(arma::approx_equal(a.ue_xy, b.ue_xy, "absdiff", 0.0));

  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const Placement pl = draw_placement(p, seed);
    for (int i = 0; i < p.L; ++i) CHECK(arma::norm(pl.ap_xy.row(i), 2) <= p.area_radius_m);
    for (int k = 0; k < p.K; ++k) {
      CHECK(arma::norm(pl.ue_xy.row(k), 2) <= p.area_radius_m);
      double min_d = arma::datum::inf;
      for (int i = 0; i < p.L; ++i)
        min_d = std::min(min_d, arma::norm(pl.ue_xy.row(k) - pl.ap_xy.row(i), 2));
      CHECK(min_d >= p.min_dist_m);
    }
  }
}

TEST_CASE("draw_placement accepts any point when min_dist is zero") {
  SystemParams p = small_params();
  p.min_dist_m = 0.0;
  CHECK_NOTHROW(draw_placement(p, 7));
}

TEST_CASE("uniform disc sampling has the analytic mean squared radius") {
  SystemParams p = small_params();
  p.L = 1;
  p.K = 1;
  p.min_dist_m = 0.0;
  double acc = 0.0;
  const int n = 10000;
  for (int t = 0; t < n; ++t) {
    const Placement pl = draw_placement(p, 1000000 + t);
    acc += std::pow(arma::norm(pl.ue_xy.row(0), 2), 2);
  }
  // E[r^2] = radius^2 / 2 = 5000 for radius 100
  CHECK(acc / n == doctest::Approx(5000.0).epsilon(0.05));
}

TEST_CASE("draw_placement errors out on infeasible geometry") {
  SystemParams p = small_params();
  p.L = 200;
  p.area_radius_m = 10.01;
  p.min_dist_m = 10.0;
  p.K = 1;
  CHECK_THROWS_AS(draw_placement(p, 3), GenerationError);
}

TEST_CASE("draw_channel scales fading by the linear attenuation") {
  SystemParams p = small_params();
  p.M = 4;

  SUBCASE("unit attenuation leaves unit-variance fading") {
    // beta = 0 dB -> beta_lin = 1 -> E||h||^2 = M
    std::vector<arma::cx_mat> fading(p.L);
    arma::mat beta_db(p.L, p.K, arma::fill::zeros);
    Rng rng(5);
    double acc = 0.0;
    const int reps = 2500;
    for (int t = 0; t < reps; ++t) {
      for (int i = 0; i < p.L; ++i) fading[i] = test::random_cx_mat(rng, p.M, p.K);
      const ChannelRealization chan = assemble_channel(p, beta_db, fading);
      CHECK(chan.beta_lin(0, 0) == doctest::Approx(1.0));
      acc += std::pow(arma::norm(chan.H[0].col(0), 2), 2);
    }
    CHECK(acc / reps == doctest::Approx(static_cast<double>(p.M)).epsilon(0.03));
  }

  SUBCASE("10 dB attenuation scales the energy down tenfold") {
    std::vector<arma::cx_mat> fading(p.L);
    arma::mat beta_db(p.L, p.K, arma::fill::value(10.0));
    Rng rng(6);
    double acc = 0.0;
    const int reps = 2500;
    for (int t = 0; t < reps; ++t) {
      for (int i = 0; i < p.L; ++i) fading[i] = test::random_cx_mat(rng, p.M, p.K);
      const ChannelRealization chan = assemble_channel(p, beta_db, fading);
      acc += std::pow(arma::norm(chan.H[0].col(0), 2), 2);
    }
    CHECK(acc / reps == doctest::Approx(p.M / 10.0).epsilon(0.03));
  }
}

TEST_CASE("draw_channel is bit-identical for a fixed seed") {
  const SystemParams p = small_params();
  const Placement pl = draw_placement(p, 9);
  const ChannelRealization a = draw_channel(p, pl, 123);
  const ChannelRealization b = draw_channel(p, pl, 123);
  for (int i = 0; i < p.L; ++i)
    CHECK(arma::approx_equal(a.H[i], b.H[i], "absdiff", 0.0));
  CHECK(channel_digest(a) == channel_digest(b));
  const ChannelRealization c = draw_channel(p, pl, 124);
  CHECK(channel_digest(a) != channel_digest(c));
}

TEST_CASE("adding Delta dB to beta scales channel energy exactly") {
  SystemParams p = small_params();
  p.M = 4;
  Rng rng(8);
  std::vector<arma::cx_mat> fading(p.L);
  for (int i = 0; i < p.L; ++i) fading[i] = test::random_cx_mat(rng, p.M, p.K);
  arma::mat beta_db(p.L, p.K, arma::fill::value(3.0));
  const double delta = 7.0;

  const ChannelRealization base = assemble_channel(p, beta_db, fading);
  const ChannelRealization shifted = assemble_channel(p, arma::mat(beta_db + delta), fading);
  for (int i = 0; i < p.L; ++i)
    for (int k = 0; k < p.K; ++k) {
      const double r = std::pow(arma::norm(shifted.H[i].col(k), 2), 2) /
                       std::pow(arma::norm(base.H[i].col(k), 2), 2);
      CHECK(r == doctest::Approx(std::pow(10.0, -delta / 10.0)).epsilon(1e-12));
    }
}

TEST_CASE("transmit power and noise share the linear watt scale") {
  SystemParams p = small_params();
  const Placement pl = draw_placement(p, 2);
  const ChannelRealization chan = draw_channel(p, pl, 2);
  CHECK(chan.p(0) == doctest::Approx(db_to_linear(p.tx_power_dbm - 30.0)));
  CHECK(chan.sigma_z2 == doctest::Approx(noise_power(p)));
}

TEST_CASE("SystemParams validation rejects bad values") {
  SystemParams p;
  p.N = 5;
  p.M = 2;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = SystemParams{};
  p.C_F = 0.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = SystemParams{};
  p.min_dist_m = 200.0;  // exceeds the radius
  CHECK_THROWS_AS(p.validate(), ConfigError);
}

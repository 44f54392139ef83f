#include <doctest.h>

#include <cmath>

#include "edgesim/channel.hpp"
#include "edgesim/rng.hpp"
#include "support.hpp"

using namespace edgesim;

namespace {
const RadioConfig kRadio{20e6, 5e6, 5e6, 5e6};

// Frequency of capacity outage under exponential fading, the Monte-Carlo
// oracle behind the closed forms.
double mc_outage(double mean_snr, double threshold, long trials, std::uint64_t seed) {
  Rng rng(seed);
  long hits = 0;
  for (long t = 0; t < trials; ++t) {
    if (rng.exponential(mean_snr) < threshold) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(trials);
}
}  // namespace

TEST_CASE("data distribution outage closed form") {
  CHECK(outage_data_dist(10.0, 4, kRadio) == doctest::Approx(0.09516258196).epsilon(1e-9));
  CHECK(outage_data_dist(10.0, 1, kRadio) == doctest::Approx(0.01874283843).epsilon(1e-9));
  CHECK(outage_data_dist(1e12, 4, kRadio) == doctest::Approx(0.0).epsilon(1e-9));

  // Monte-Carlo cross-check within 3 standard errors at 1e6 draws.
  const long trials = 1000000;
  for (auto [snr, k] : {std::pair{10.0, 4}, {10.0, 1}, {31.6227766, 8}}) {
    const double thr = std::exp2(static_cast<double>(k) * 0.25) - 1.0;
    const double p = outage_data_dist(snr, k, kRadio);
    const double est = mc_outage(snr, thr, trials, 99 + static_cast<std::uint64_t>(k));
    const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
    CHECK(std::abs(est - p) < 3.0 * se + 1e-12);
  }
}

TEST_CASE("local update OMA outage closed form") {
  CHECK(outage_local_update_oma(10.0, 4, kRadio) == doctest::Approx(0.02469008797).epsilon(1e-9));
  CHECK(outage_local_update_oma(10.0, 8, kRadio) == doctest::Approx(0.03680558228).epsilon(1e-9));
  // K = 1 reduces to the full-band single-user outage.
  CHECK(outage_local_update_oma(10.0, 1, kRadio) ==
        doctest::Approx(outage_data_dist(10.0, 1, kRadio)).epsilon(1e-12));
}

TEST_CASE("multicast outage and extremes") {
  SnrProfile one{{10.0}, {10.0}};
  CHECK(outage_multicast(one, kRadio) == doctest::Approx(0.01874283843).epsilon(1e-9));
  CHECK(outage_multicast(one, kRadio) ==
        doctest::Approx(outage_data_dist(10.0, 1, kRadio)).epsilon(1e-12));

  SnrProfile two{{10.0, 10.0}, {10.0, 10.0}};
  CHECK(outage_multicast(two, kRadio) == doctest::Approx(0.03713438287).epsilon(1e-9));
  CHECK(outage_multicast_extreme(10.0, 2, kRadio, ExtremeSnr::worst) ==
        doctest::Approx(outage_multicast(two, kRadio)).epsilon(1e-12));
  CHECK(outage_multicast_extreme(1e15, 3, kRadio, ExtremeSnr::best) ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK_THROWS_AS(outage_multicast_extreme(10.0, 0, kRadio, ExtremeSnr::worst), std::domain_error);

  // Minimum over two independent exponentials, sampled: oracle for the
  // summed-rates identity.
  Rng rng(5);
  long hits = 0;
  const long trials = 1000000;
  const double thr = std::exp2(0.25) - 1.0;
  for (long t = 0; t < trials; ++t) {
    if (std::min(rng.exponential(10.0), rng.exponential(10.0)) < thr) ++hits;
  }
  const double est = static_cast<double>(hits) / static_cast<double>(trials);
  const double p = outage_multicast(two, kRadio);
  CHECK(std::abs(est - p) < 3.0 * std::sqrt(p * (1 - p) / trials));
}

TEST_CASE("outage domain errors") {
  CHECK_THROWS_AS(outage_data_dist(0.0, 4, kRadio), std::domain_error);
  CHECK_THROWS_AS(outage_data_dist(-1.0, 4, kRadio), std::domain_error);
  CHECK_THROWS_AS(outage_data_dist(std::nan(""), 4, kRadio), std::domain_error);
  CHECK_THROWS_AS(outage_local_update_oma(10.0, 0, kRadio), std::domain_error);
  CHECK_THROWS_AS(outage_multicast(SnrProfile{}, kRadio), std::invalid_argument);
}

TEST_CASE("outage monotone in K and SNR") {
  for (double snr : {3.0, 10.0, 100.0}) {
    double prev_dist = 0.0, prev_up = 0.0;
    for (int k = 1; k <= 64; ++k) {
      const double pd = outage_data_dist(snr, k, kRadio);
      const double pu = outage_local_update_oma(snr, k, kRadio);
      if (pd < 1.0) CHECK(pd > prev_dist);
      if (pu < 1.0) CHECK(pu > prev_up);
      prev_dist = pd;
      prev_up = pu;
    }
  }
  double prev = 1.0;
  for (double snr : {1.0, 3.0, 10.0, 30.0, 100.0}) {
    const double p = outage_data_dist(snr, 4, kRadio);
    CHECK(p < prev);
    prev = p;
  }
}

TEST_CASE("multicast dominates the worst single device") {
  Rng rng(17);
  for (int rep = 0; rep < 20; ++rep) {
    const int k = 1 + static_cast<int>(rng.index_below(8));
    SnrProfile prof;
    for (int i = 0; i < k; ++i) {
      prof.rho_bar.push_back(1.0 + 99.0 * rng.uniform01());
      prof.eta_bar.push_back(1.0 + 99.0 * rng.uniform01());
    }
    double worst_single = 0.0;
    for (double rho : prof.rho_bar) {
      SnrProfile single{{rho}, {rho}};
      worst_single = std::max(worst_single, outage_multicast(single, kRadio));
    }
    CHECK(outage_multicast(prof, kRadio) >= worst_single - 1e-15);
  }
}

TEST_CASE("NOMA outage estimator") {
  SUBCASE("single device matches the closed form") {
    SnrProfile one{{10.0}, {10.0}};
    const auto est = outage_local_update_noma(one, kRadio, 400000, 11);
    const double p = 0.01874283843;
    CHECK(std::abs(est[0] - p) < 4.0 * std::sqrt(p * (1 - p) / 400000.0));
  }
  SUBCASE("deterministic for a fixed seed") {
    SnrProfile prof{{10.0, 31.6, 100.0}, {10.0, 31.6, 100.0}};
    const auto a = outage_local_update_noma(prof, kRadio, 20000, 123);
    const auto b = outage_local_update_noma(prof, kRadio, 20000, 123);
    CHECK(a == b);
  }
  SUBCASE("two equal-mean devices match 2-D quadrature oracle") {
    // Identity outage of either device: P[eta1 < eta2, eta1 < thr]
    //   + P[eta1 > eta2, eta1 < thr (eta2 + 1)], reduced to 1-D integrals
    // over the exponential density (computed by quadrature in-test).
    const double mean = 10.0;
    const double thr = std::exp2(0.25) - 1.0;
    auto f = [&](double x) { return std::exp(-x / mean) / mean; };
    // First piece: eta1 below both eta2 and thr.
    auto weaker = [&](double a) { return f(a) * std::exp(-a / mean); };
    // Second piece: eta2 < eta1 < thr(eta2+1); empty once eta2 >= thr/(1-thr).
    auto stronger = [&](double b) {
      const double hi = thr * (b + 1.0);
      return b >= hi ? 0.0 : f(b) * (std::exp(-b / mean) - std::exp(-hi / mean));
    };
    double oracle = 0.0;
    oracle += testsupport::simpson(weaker, 0.0, thr, 1e-12);
    oracle += testsupport::simpson(stronger, 0.0, thr / (1.0 - thr), 1e-12);
    SnrProfile prof{{mean, mean}, {mean, mean}};
    const long trials = 1000000;
    const auto est = outage_local_update_noma(prof, kRadio, trials, 321);
    const double se = std::sqrt(oracle * (1 - oracle) / static_cast<double>(trials));
    CHECK(std::abs(est[0] - oracle) < 4.0 * se);
    CHECK(std::abs(est[1] - oracle) < 4.0 * se);
  }
  SUBCASE("zero trials rejected") {
    SnrProfile one{{10.0}, {10.0}};
    CHECK_THROWS_AS(outage_local_update_noma(one, kRadio, 0, 1), std::domain_error);
  }
}

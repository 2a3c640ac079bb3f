#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "ucfg/alignment.hpp"
#include "ucfg/errors.hpp"
#include "ucfg/generators.hpp"
#include "ucfg/reductions.hpp"

using namespace ucfg;

namespace {

Instance single(std::vector<PointMass> masses) {
  Instance inst;
  inst.actions.push_back(ActionMenu{{ConfigDist{std::move(masses)}}});
  return inst;
}

Configuration zeros(const Instance& inst) { return Configuration{std::vector<std::size_t>(inst.num_actions(), 0)}; }

Configuration all_in(std::size_t n) { return Configuration{std::vector<std::size_t>(n, 0)}; }

double tightness_ratio(double T) {
  double x = (1 - 1 / T) * (1 - 2 / T);
  return (1 + x) / (1 + x / T);
}

// Conditional expectations straight from the joint outcomes.
void check_profile_against_outcomes(const Instance& inst, const Configuration& c) {
  auto outs = oracle::joint_outcomes(inst, c);
  auto base = oracle::expected_principal(inst, c);
  auto prof = alignment_profile(inst, c);
  for (const auto& pt : prof.points) {
    Rational q = oracle::max_cdf(outs, pt.U);
    Rational mass = 0;
    for (const auto& o : outs)
      if (o.any && o.agent <= pt.U) mass += o.prob * oracle::exact_rational(o.principal);
    CHECK(pt.q == q);
    CHECK(pt.cond == doctest::Approx(to_double(mass / q)).epsilon(1e-12));
    CHECK(pt.ratio == doctest::Approx(to_double(mass / q / base)).epsilon(1e-12));
  }
}

}  // namespace

TEST_CASE("profile of a two-outcome action") {
  auto inst = single({{1, 5, Rational(1, 2)}, {2, 1, Rational(1, 2)}});
  auto prof = alignment_profile(inst, zeros(inst));
  REQUIRE(prof.points.size() == 2);
  CHECK(prof.base == doctest::Approx(3.0));
  CHECK(prof.points[0].U == 1.0);
  CHECK(prof.points[0].q == Rational(1, 2));
  CHECK(prof.points[0].cond == doctest::Approx(5.0));
  CHECK(prof.points[0].ratio == doctest::Approx(5.0 / 3.0));
  CHECK(prof.points[1].q == 1);
  CHECK(prof.points[1].ratio == doctest::Approx(1.0));
}

TEST_CASE("profile matches the joint outcome space") {
  std::mt19937_64 rng(11);
  int checked = 0;
  for (int t = 0; t < 60; ++t) {
    auto inst = oracle::random_raw_instance(rng, 3, 2, 3, 6, -1.0, 3.0);
    auto c = oracle::best_configuration(inst).first;
    if (oracle::expected_principal(inst, c) == 0) continue;
    check_profile_against_outcomes(inst, c);
    auto prof = alignment_profile(inst, c);
    REQUIRE(!prof.points.empty());
    CHECK(prof.points.back().q == 1);
    CHECK(prof.points.back().ratio == doctest::Approx(1.0));
    for (std::size_t k = 1; k < prof.points.size(); ++k) {
      CHECK(prof.points[k - 1].U < prof.points[k].U);
      CHECK(prof.points[k - 1].q <= prof.points[k].q);
    }
    ++checked;
  }
  CHECK(checked > 30);
}

TEST_CASE("tightness gadget ratio at the 1/T quantile") {
  auto d = tightness_instance(4);
  auto inst = delegation_to_uc(d);
  auto prof = alignment_profile(inst, all_in(2));
  CHECK(prof.base == doctest::Approx(1.09375));
  bool found = false;
  for (const auto& pt : prof.points) {
    if (pt.q != Rational(1, 4)) continue;
    found = true;
    CHECK(pt.ratio == doctest::Approx(1.375 / 1.09375).epsilon(1e-12));
    CHECK(pt.ratio == doctest::Approx(tightness_ratio(4)).epsilon(1e-12));
  }
  CHECK(found);
}

TEST_CASE("tightness gadget breaks every constant below two") {
  for (int T : {10, 100, 1000}) {
    auto inst = delegation_to_uc(tightness_instance(T));
    auto prof = alignment_profile(inst, all_in(2));
    auto v = check_alignment(prof, constant_alignment(1.0));
    CHECK(v.ratio > 2.0 - 5.0 / T);
    CHECK(v.q == doctest::Approx(1.0 / T));
  }
  auto prof = alignment_profile(delegation_to_uc(tightness_instance(100)), all_in(2));
  auto v = check_alignment(prof, constant_alignment(1.9));
  CHECK_FALSE(v.holds);
  CHECK(v.ratio == doctest::Approx(tightness_ratio(100)).epsilon(1e-12));
  CHECK(v.f == 1.9);
  CHECK(check_alignment(prof, constant_alignment(2.0)).holds);
}

TEST_CASE("constant instance is 1-aligned") {
  auto inst = single({{2, 3, Rational(1)}});
  auto prof = alignment_profile(inst, zeros(inst));
  REQUIRE(prof.points.size() == 1);
  auto v = check_alignment(prof, constant_alignment(1.0));
  CHECK(v.holds);
  CHECK(v.ratio == doctest::Approx(1.0));
}

TEST_CASE("zero base utility is an error") {
  auto inst = single({{1, 0, Rational(1, 2)}, {2, 0, Rational(1, 2)}});
  CHECK_THROWS_AS(alignment_profile(inst, zeros(inst)), ZeroBaseUtility);
  Instance none = single({{NEG_INF, 0, Rational(1)}});
  CHECK_THROWS_AS(alignment_profile(none, zeros(none)), ZeroBaseUtility);
}

TEST_CASE("check_alignment tolerance and worst point") {
  AlignmentProfile prof;
  prof.base = 1.0;
  prof.points = {{0.0, Rational(1, 4), 3.0, 3.0}, {1.0, Rational(1, 2), 1.5, 1.5}, {2.0, Rational(1), 1.0, 1.0}};
  auto v = check_alignment(prof, constant_alignment(3.0));
  CHECK(v.holds);
  CHECK(v.q == 0.25);
  CHECK(check_alignment(prof, constant_alignment(3.0 * (1 - 1e-8))).holds == false);
  CHECK(check_alignment(prof, constant_alignment(3.0 * (1 - 1e-10))).holds);
  auto s = check_alignment(prof, sqrt_alignment());
  CHECK(s.holds);
  CHECK(s.ratio == 3.0);
}

TEST_CASE("local alignment") {
  SUBCASE("low agent utility paired with high principal utility fails") {
    auto inst = single({{0, 10, Rational(1, 2)}, {5, 0, Rational(1, 2)}});
    CHECK_FALSE(local_alignment_check(inst, constant_alignment(1.0)));
    CHECK(local_alignment_check(inst, constant_alignment(2.0)));
  }
  SUBCASE("excluded configurations pass vacuously") {
    auto inst = single({{NEG_INF, 0, Rational(1)}});
    CHECK(local_alignment_check(inst, constant_alignment(1.0)));
  }
  SUBCASE("delegation and outside-option images are locally 1-aligned") {
    for (Family fam : {Family::kDelegation, Family::kDelegationRandomBias, Family::kDelegationOutside}) {
      for (std::uint64_t seed = 0; seed < 40; ++seed) {
        RandomSpec spec;
        spec.n = 3;
        spec.K = 3;
        spec.lo = -2;
        spec.hi = 4;
        spec.family = fam;
        spec.seed = seed;
        auto inst = to_uc(random_instance(spec));
        CHECK(local_alignment_check(inst, constant_alignment(1.0)));
      }
    }
  }
}

TEST_CASE("delegation and pricing optima are 2-aligned") {
  int checked = 0;
  for (Family fam : {Family::kDelegation, Family::kPricing}) {
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
      RandomSpec spec;
      spec.n = 3;
      spec.K = 3;
      spec.m = 3;
      spec.lo = fam == Family::kPricing ? 0 : -2;
      spec.hi = 4;
      spec.family = fam;
      spec.seed = seed;
      auto inst = to_uc(random_instance(spec));
      auto best = brute_force_opt(inst);
      if (best.exact_value == 0) continue;
      auto prof = alignment_profile(inst, best.config);
      CHECK(check_alignment(prof, constant_alignment(2.0)).holds);
      ++checked;
    }
  }
  CHECK(checked > 60);
}

TEST_CASE("local 1-alignment implies the global bound") {
  std::mt19937_64 rng(5);
  int checked = 0;
  for (int t = 0; t < 3000 && checked < 60; ++t) {
    auto inst = oracle::random_raw_instance(rng, 3, 2, 3, 6, -1.0, 3.0);
    for (auto& menu : inst.actions) menu.configs.push_back(ConfigDist{{{NEG_INF, 0, Rational(1)}}});
    if (!local_alignment_check(inst, constant_alignment(1.0))) continue;
    auto best = brute_force_opt(inst);
    if (best.exact_value == 0) continue;
    CHECK(check_alignment(alignment_profile(inst, best.config), local_to_global_alignment(1.0)).holds);
    ++checked;
  }
  CHECK(checked >= 20);
  CHECK(local_to_global_alignment(1.0)(1.0) == 4.0);
  CHECK(local_to_global_alignment(1.0)(0.25) == 8.0);
  CHECK(local_to_global_alignment(3.0)(0.25) == 12.0);
}

TEST_CASE("alignment coefficients") {
  auto two = alignment_coefficients(constant_alignment(2.0), 10);
  CHECK(two.size() == 10);
  for (double r : two) CHECK(r == 2.0);
  auto s = alignment_coefficients(sqrt_alignment(), 4);
  CHECK(s[0] == doctest::Approx(8.0));
  CHECK(s[3] == doctest::Approx(4.0));
  for (int M : {6, 17, 50}) {
    auto r = alignment_coefficients(local_to_global_alignment(1.5), M);
    for (int j = 1; j < M; ++j) CHECK(r[j] <= r[j - 1]);
  }
  CHECK_THROWS_AS(alignment_coefficients(sqrt_alignment(), 0), MTooSmall);
}

TEST_CASE("approximation ratio") {
  auto two = [](int M) { return std::vector<double>(M, 2.0); };
  CHECK(approx_ratio(6, two(6)) == doctest::Approx(5.0 / 7.0 * (1.0 / 5 - 1.0 / 3 - 2.0 / 5)));
  CHECK(approx_ratio(6, two(6)) == doctest::Approx(-0.381).epsilon(1e-3));
  CHECK(approx_ratio(100, two(100)) == doctest::Approx(0.618).epsilon(1e-3));
  for (int M : {50, 100, 200, 400}) CHECK(1 - approx_ratio(M, two(M)) <= 20 * std::log(M) / M);
  double prev = approx_ratio(20, two(20));
  for (int M = 21; M <= 2000; ++M) {
    double a = approx_ratio(M, two(M));
    CHECK(a > prev);
    prev = a;
  }
  CHECK(prev > 0.96);
  CHECK(prev < 1.0);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(1.0, 5.0);
  for (int t = 0; t < 50; ++t) {
    int M = 6 + static_cast<int>(rng() % 60);
    std::vector<double> r(M);
    for (double& x : r) x = U(rng);
    CHECK(approx_ratio(M, r) == doctest::Approx(oracle::alpha_unsimplified(M, r)).epsilon(1e-9));
  }
  CHECK_THROWS_AS(approx_ratio(5, two(5)), MTooSmall);
  CHECK_THROWS_AS(approx_ratio(8, two(7)), BadSpec);
}

TEST_CASE("empirical alignment envelope") {
  std::mt19937_64 rng(21);
  std::vector<AlignmentProfile> profiles;
  for (int t = 0; t < 40; ++t) {
    auto inst = oracle::random_raw_instance(rng, 2, 2, 3, 6, -1.0, 3.0);
    auto c = oracle::best_configuration(inst).first;
    if (oracle::expected_principal(inst, c) == 0) continue;
    profiles.push_back(alignment_profile(inst, c));
  }
  auto f = empirical_alignment(profiles);
  for (const auto& p : profiles) CHECK(check_alignment(p, f).holds);
  double prev = f(1e-6);
  for (int k = 1; k <= 1000; ++k) {
    double q = k / 1000.0;
    CHECK(f(q) <= prev);
    CHECK(f(q) >= 1.0);
    prev = f(q);
  }
  CHECK(f(1.0) == doctest::Approx(1.0));
}

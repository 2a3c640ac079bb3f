#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "oracles.hpp"
#include "ucfg/errors.hpp"
#include "ucfg/generators.hpp"
#include "ucfg/reductions.hpp"

using namespace ucfg;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

DiscreteDist two_point(double a, double b) { return DiscreteDist{{{a, Rational(1, 2)}, {b, Rational(1, 2)}}}; }

bool same_atoms(const ConfigDist& d, std::vector<PointMass> want) {
  if (d.masses.size() != want.size()) return false;
  std::vector<bool> used(want.size(), false);
  for (const auto& m : d.masses) {
    bool hit = false;
    for (std::size_t k = 0; k < want.size() && !hit; ++k) {
      if (used[k]) continue;
      const auto& w = want[k];
      bool agent_eq = (is_neg_inf(m.agent_utility) && is_neg_inf(w.agent_utility)) || m.agent_utility == w.agent_utility;
      if (agent_eq && m.principal_utility == w.principal_utility && m.probability == w.probability) {
        used[k] = true;
        hit = true;
      }
    }
    if (!hit) return false;
  }
  return true;
}

// Every subset of n actions, as in-flags, in the order of the configuration odometer
// (configuration 0 = in, so the all-in vector comes first).
std::vector<std::vector<bool>> subsets(std::size_t n) {
  std::vector<std::vector<bool>> out;
  for (std::uint64_t mask = 0; mask < (1ull << n); ++mask) {
    std::vector<bool> in(n);
    for (std::size_t i = 0; i < n; ++i) in[i] = !((mask >> (n - 1 - i)) & 1);
    out.push_back(in);
  }
  return out;
}

Configuration from_flags(const std::vector<bool>& in) {
  Configuration c;
  for (bool b : in) c.choices.push_back(b ? 0 : 1);
  return c;
}

RandomSpec spec_for(Family f, std::uint64_t seed, int n) {
  RandomSpec s;
  s.n = n;
  s.m = 3;
  s.K = 3;
  s.D = 6;
  s.lo = f == Family::kPricing ? 0 : -2;
  s.hi = 4;
  s.family = f;
  s.seed = seed;
  return s;
}

// Within 4 combined standard errors.
bool mc_agrees(double a, double se_a, double b, double se_b) {
  return std::abs(a - b) <= 4 * std::sqrt(se_a * se_a + se_b * se_b) + 1e-12;
}

// Outside-option images carry principal utilities rounded to doubles.
bool close(const Rational& a, const Rational& b) {
  double x = to_double(a), y = to_double(b);
  return std::abs(x - y) <= 1e-12 * std::max(1.0, std::abs(y));
}

template <class Draw>
std::pair<double, double> source_mc(Draw draw, int samples) {
  double mean = 0, m2 = 0;
  for (int k = 1; k <= samples; ++k) {
    double x = draw();
    double d = x - mean;
    mean += d / k;
    m2 += d * (x - mean);
  }
  return {mean, std::sqrt(m2 / (samples - 1) / samples)};
}

}  // namespace

TEST_CASE("delegation images") {
  DelegationInstance d;
  d.actions.push_back({DiscreteDist::constant(0.5), two_point(0, 1)});
  auto inst = delegation_to_uc(d);
  REQUIRE(inst.actions[0].configs.size() == 2);
  CHECK(same_atoms(inst.dist(0, 0), {{0.5, 0, Rational(1, 2)}, {1.5, 1, Rational(1, 2)}}));
  CHECK(same_atoms(inst.dist(0, 1), {{NEG_INF, 0, Rational(1)}}));

  DelegationInstance r;
  r.actions.push_back({two_point(0, 1), two_point(1, 2)});
  auto img = delegation_to_uc(r);
  CHECK(same_atoms(img.dist(0, 0), {{1, 1, Rational(1, 4)}, {2, 2, Rational(1, 4)}, {2, 1, Rational(1, 4)},
                                    {3, 2, Rational(1, 4)}}));

  SUBCASE("equal pairs merge") {
    DelegationInstance m;
    m.actions.push_back({DiscreteDist{{{1, Rational(1, 3)}, {1, Rational(2, 3)}}}, DiscreteDist::constant(2)});
    auto mi = delegation_to_uc(m);
    CHECK(same_atoms(mi.dist(0, 0), {{3, 2, Rational(1)}}));
  }
  SUBCASE("outside option routes elsewhere") {
    r.outside_bias = DiscreteDist::constant(0);
    CHECK_THROWS_AS(delegation_to_uc(r), HasOutsideOption);
    r.outside_bias.reset();
    CHECK_THROWS_AS(outside_option_transform(r), NoOutsideOption);
  }
}

TEST_CASE("outside option transform") {
  DelegationInstance d;
  d.actions.push_back({DiscreteDist::constant(0), DiscreteDist::constant(2)});
  d.outside_bias = two_point(-1, 3);
  auto inst = outside_option_transform(d);
  CHECK(same_atoms(inst.dist(0, 0), {{2, 1, Rational(1)}}));
  CHECK(same_atoms(inst.dist(0, 1), {{NEG_INF, 0, Rational(1)}}));

  SUBCASE("outside bias below everything changes nothing") {
    DelegationInstance r;
    r.actions.push_back({two_point(0, 1), two_point(1, 2)});
    r.actions.push_back({DiscreteDist::constant(-1), two_point(0, 3)});
    auto plain = delegation_to_uc(r);
    r.outside_bias = DiscreteDist::constant(-2);
    auto moved = outside_option_transform(r);
    for (std::size_t i = 0; i < 2; ++i)
      CHECK(same_atoms(moved.dist(i, 0), plain.dist(i, 0).masses));
  }
  SUBCASE("outside bias above everything zeroes the principal") {
    DelegationInstance r;
    r.actions.push_back({two_point(0, 1), two_point(1, 2)});
    r.outside_bias = DiscreteDist::constant(10);
    auto img = outside_option_transform(r);
    for (const auto& m : img.dist(0, 0).masses) CHECK(m.principal_utility == 0);
  }
  SUBCASE("equality stays in") {
    DelegationInstance r;
    r.actions.push_back({DiscreteDist::constant(1), DiscreteDist::constant(2)});
    r.outside_bias = DiscreteDist::constant(3);
    CHECK(same_atoms(outside_option_transform(r).dist(0, 0), {{3, 2, Rational(1)}}));
  }
}

TEST_CASE("pricing images") {
  PricingInstance p;
  p.items.push_back({two_point(1, 3), std::vector<double>{2, 0, 3}});
  auto inst = pricing_to_uc(p);
  REQUIRE(inst.actions[0].configs.size() == 4);
  CHECK(same_atoms(inst.dist(0, 0), {{0, 0, Rational(1, 2)}, {1, 2, Rational(1, 2)}}));
  CHECK(same_atoms(inst.dist(0, 1), {{1, 0, Rational(1, 2)}, {3, 0, Rational(1, 2)}}));
  CHECK(same_atoms(inst.dist(0, 2), {{0, 0, Rational(1, 2)}, {0, 3, Rational(1, 2)}}));
  CHECK(same_atoms(inst.dist(0, 3), {{NEG_INF, 0, Rational(1)}}));

  PricingInstance empty;
  empty.items.push_back({two_point(1, 3), std::vector<double>{}});
  CHECK_THROWS_AS(pricing_to_uc(empty), EmptyPriceSet);

  PricingInstance grid;
  grid.items.push_back({two_point(1, 3), PriceGridRequest{1.0, 2.0, 0.25}});
  CHECK(pricing_to_uc(grid).actions[0].configs.size() == price_grid(1.0, 2.0, 0.25).size() + 1);
}

TEST_CASE("price grid") {
  // p_i = (1 + e^2 - e) / (1 - e^2)^i, i = 0..floor(log_{1/(1-e^2)} 2).
  auto g = price_grid(1.0, 2.0, 0.25);
  const double head = 1 + 0.0625 - 0.25, step = 1 / (1 - 0.0625);
  REQUIRE(g.size() == static_cast<std::size_t>(std::floor(std::log(2.0) / std::log(step))) + 1);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(g[i] == doctest::Approx(head * std::pow(step, i)));
  CHECK(g.size() == 11);
  CHECK(price_grid(1.0, 2.0, 0.49).size() == 3);
  CHECK(price_grid(1.0, 2.0, 0.49)[1] == doctest::Approx((1 + 0.49 * 0.49 - 0.49) / (1 - 0.49 * 0.49)));
  CHECK(price_grid(1.0, 1.0, 0.3).size() == 1);
  CHECK_THROWS_AS(price_grid(1.0, 2.0, 0.5), BadEpsilon);
  CHECK_THROWS_AS(price_grid(1.0, 2.0, 0.0), BadEpsilon);
  CHECK_THROWS_AS(price_grid(0.0, 2.0, 0.2), BadRange);
  CHECK_THROWS_AS(price_grid(2.0, 1.0, 0.2), BadRange);
  CHECK_THROWS_AS(price_grid(1.0, kInf, 0.2), BadRange);

  std::mt19937_64 rng(8);
  for (double eps : {0.1, 0.3, 0.49}) {
    for (int t = 0; t < 50; ++t) {
      double lo = std::uniform_real_distribution<double>(0.1, 10)(rng);
      double hi = lo * std::uniform_real_distribution<double>(1, 50)(rng);
      auto grid = price_grid(lo, hi, eps);
      for (std::size_t k = 1; k < grid.size(); ++k) CHECK(grid[k - 1] < grid[k]);
      std::uniform_real_distribution<double> P(lo, hi);
      for (int s = 0; s < 100; ++s) {
        double p = P(rng);
        bool ok = false;
        for (double x : grid) {
          double r = x / p;
          if (r >= 1 - eps - 1e-12 && r <= 1 + eps * eps - eps + 1e-12) ok = true;
        }
        CHECK(ok);
      }
    }
  }
}

TEST_CASE("assortment images") {
  AssortmentInstance a;
  a.items.push_back({1.0, two_point(0, 3)});
  a.outside_utility = DiscreteDist::constant(0);
  auto inst = assortment_to_uc(a);
  CHECK(same_atoms(inst.dist(0, 0), {{-1, 0, Rational(1, 2)}, {2, 1, Rational(1, 2)}}));

  AssortmentInstance over;
  over.items.push_back({5.0, two_point(0, 3)});
  over.outside_utility = two_point(-1, 1);
  auto over_img = assortment_to_uc(over);
  for (const auto& m : over_img.dist(0, 0).masses) CHECK(m.principal_utility == 0);

  std::mt19937_64 rng(4);
  for (int t = 0; t < 30; ++t) {
    AssortmentInstance s;
    double price = 0.25 * static_cast<int>(rng() % 12);
    s.items.push_back({price, DiscreteDist{{{0.5 * (rng() % 8), Rational(1, 3)}, {0.5 * (rng() % 8), Rational(2, 3)}}}});
    s.outside_utility = DiscreteDist{{{0.5 * (rng() % 4) - 1, Rational(1, 4)}, {0.5 * (rng() % 4), Rational(3, 4)}}};
    // Closed form p * Pr[v - p >= u_0].
    Rational want = 0;
    for (const auto& [v, pv] : s.items[0].value.atoms)
      for (const auto& [u0, pu] : s.outside_utility.atoms)
        if (v - price >= u0) want += pv * pu * oracle::exact_rational(price);
    auto img = assortment_to_uc(s);
    CHECK(close(evaluate_exact_rational(img, Configuration{{0}}), want));
  }
}

TEST_CASE("images equal the source objectives exactly") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    auto del = std::get<DelegationInstance>(random_instance(spec_for(Family::kDelegationRandomBias, seed, 3)));
    auto di = delegation_to_uc(del);
    for (const auto& in : subsets(3)) CHECK(evaluate_exact_rational(di, from_flags(in)) == oracle::delegation_value(del, in));

    auto out = std::get<DelegationInstance>(random_instance(spec_for(Family::kDelegationOutside, seed, 3)));
    auto oi = outside_option_transform(out);
    for (const auto& in : subsets(3)) CHECK(close(evaluate_exact_rational(oi, from_flags(in)), oracle::delegation_value(out, in)));

    auto as = std::get<AssortmentInstance>(random_instance(spec_for(Family::kAssortment, seed, 3)));
    auto ai = assortment_to_uc(as);
    for (const auto& in : subsets(3)) CHECK(close(evaluate_exact_rational(ai, from_flags(in)), oracle::assortment_revenue(as, in)));

    auto pr = std::get<PricingInstance>(random_instance(spec_for(Family::kPricing, seed, 2)));
    auto pi = pricing_to_uc(pr);
    auto p0 = item_prices(pr.items[0]), p1 = item_prices(pr.items[1]);
    p0.push_back(kInf);
    p1.push_back(kInf);
    for (std::size_t a = 0; a < p0.size(); ++a)
      for (std::size_t b = 0; b < p1.size(); ++b)
        CHECK(evaluate_exact_rational(pi, Configuration{{a, b}}) == oracle::pricing_revenue(pr, {p0[a], p1[b]}));
  }
}

TEST_CASE("reduction fidelity under sampling") {
  const int N = 20000;
  std::mt19937_64 rng(99);
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    auto del = std::get<DelegationInstance>(random_instance(spec_for(Family::kDelegationOutside, seed, 3)));
    auto di = outside_option_transform(del);
    for (const auto& in : subsets(3)) {
      auto src = source_mc([&] { return oracle::sample_delegation(del, in, rng); }, N);
      auto img = evaluate_monte_carlo(di, from_flags(in), N, seed * 100 + 1);
      CHECK(mc_agrees(src.first, src.second, img.estimate, img.std_error));
    }
    auto as = std::get<AssortmentInstance>(random_instance(spec_for(Family::kAssortment, seed, 3)));
    auto ai = assortment_to_uc(as);
    for (const auto& in : subsets(3)) {
      auto src = source_mc([&] { return oracle::sample_assortment(as, in, rng); }, N);
      auto img = evaluate_monte_carlo(ai, from_flags(in), N, seed * 100 + 2);
      CHECK(mc_agrees(src.first, src.second, img.estimate, img.std_error));
    }
    auto pr = std::get<PricingInstance>(random_instance(spec_for(Family::kPricing, seed, 2)));
    auto pi = pricing_to_uc(pr);
    auto p0 = item_prices(pr.items[0]), p1 = item_prices(pr.items[1]);
    p0.push_back(kInf);
    p1.push_back(kInf);
    for (std::size_t a = 0; a < p0.size(); ++a) {
      for (std::size_t b = 0; b < p1.size(); ++b) {
        std::vector<double> prices{p0[a], p1[b]};
        auto src = source_mc([&] { return oracle::sample_pricing(pr, prices, rng); }, N);
        auto img = evaluate_monte_carlo(pi, Configuration{{a, b}}, N, seed * 100 + 3);
        CHECK(mc_agrees(src.first, src.second, img.estimate, img.std_error));
      }
    }
  }
}

TEST_CASE("brute force agrees with the source problem") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    auto del = std::get<DelegationInstance>(random_instance(spec_for(Family::kDelegation, seed, 4)));
    Rational best = 0;
    for (const auto& in : subsets(4)) best = std::max(best, oracle::delegation_value(del, in));
    CHECK(brute_force_opt(delegation_to_uc(del)).exact_value == best);

    auto as = std::get<AssortmentInstance>(random_instance(spec_for(Family::kAssortment, seed, 4)));
    best = 0;
    for (const auto& in : subsets(4)) best = std::max(best, oracle::assortment_revenue(as, in));
    CHECK(close(brute_force_opt(assortment_to_uc(as)).exact_value, best));
  }
}

TEST_CASE("atom-count bound") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    for (Family f : {Family::kDelegationRandomBias, Family::kDelegationOutside, Family::kAssortment}) {
      auto g = random_instance(spec_for(f, seed, 3));
      auto inst = to_uc(g);
      std::vector<std::size_t> cap;
      if (auto* d = std::get_if<DelegationInstance>(&g))
        for (const auto& a : d->actions) cap.push_back(a.value.atoms.size() * a.bias.atoms.size() + 1);
      if (auto* a = std::get_if<AssortmentInstance>(&g))
        for (const auto& it : a->items) cap.push_back(it.value.atoms.size() + 1);
      for (std::size_t i = 0; i < inst.num_actions(); ++i)
        for (const auto& c : inst.actions[i].configs) CHECK(c.masses.size() <= cap[i]);
    }
    auto pr = std::get<PricingInstance>(random_instance(spec_for(Family::kPricing, seed, 3)));
    auto pi = pricing_to_uc(pr);
    for (std::size_t i = 0; i < pi.num_actions(); ++i)
      for (const auto& c : pi.actions[i].configs) CHECK(c.masses.size() <= pr.items[i].value.atoms.size() + 1);
  }
}

TEST_CASE("source validation") {
  DelegationInstance d;
  CHECK_THROWS_AS(require_valid(d), InvalidInstance);
  d.actions.push_back({DiscreteDist::constant(0), DiscreteDist{{{-1, Rational(1)}}}});
  CHECK_THROWS_AS(delegation_to_uc(d), InvalidInstance);
  d.actions[0].value = DiscreteDist{{{1, Rational(1, 3)}}};
  CHECK_THROWS_AS(delegation_to_uc(d), InvalidInstance);

  AssortmentInstance a;
  a.items.push_back({-1.0, DiscreteDist::constant(1)});
  a.outside_utility = DiscreteDist::constant(0);
  CHECK_THROWS_AS(assortment_to_uc(a), InvalidInstance);

  PricingInstance p;
  p.items.push_back({DiscreteDist::constant(1), std::vector<double>{-1}});
  CHECK_THROWS_AS(pricing_to_uc(p), InvalidInstance);
}

#include "ucfg/generators.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "ucfg/errors.hpp"

namespace ucfg {

namespace {

const std::vector<std::pair<Family, std::string>>& family_names() {
  static const std::vector<std::pair<Family, std::string>> names = {
      {Family::kGenericUc, "generic-uc"},
      {Family::kDelegation, "delegation"},
      {Family::kDelegationRandomBias, "delegation-random-bias"},
      {Family::kDelegationOutside, "delegation-outside"},
      {Family::kPricing, "pricing"},
      {Family::kAssortment, "assortment"},
  };
  return names;
}

class Draw {
 public:
  explicit Draw(std::uint64_t seed) : rng_(seed) {}

  long integer(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng_); }

  // Uniform over the quarter grid inside [lo, hi].
  double grid(double lo, double hi) {
    long a = static_cast<long>(std::ceil(lo * 4.0));
    long b = static_cast<long>(std::floor(hi * 4.0));
    if (a > b) throw BadSpec("utility range contains no multiple of 1/4");
    return static_cast<double>(integer(a, b)) / 4.0;
  }

  // Random composition of D into K positive parts, as probabilities.
  std::vector<Rational> composition(int K, int D) {
    std::vector<int> cuts(static_cast<std::size_t>(D - 1));
    for (int t = 0; t < D - 1; ++t) cuts[t] = t + 1;
    std::vector<int> chosen;
    std::sample(cuts.begin(), cuts.end(), std::back_inserter(chosen), K - 1, rng_);
    std::vector<Rational> out;
    int prev = 0;
    for (int c : chosen) {
      out.emplace_back(c - prev, D);
      prev = c;
    }
    out.emplace_back(D - prev, D);
    for (auto& r : out) r.canonicalize();
    return out;
  }

  DiscreteDist dist(int K, int D, double lo, double hi) {
    DiscreteDist out;
    for (const auto& p : composition(K, D)) out.atoms.emplace_back(grid(lo, hi), p);
    return out;
  }

 private:
  std::mt19937_64 rng_;
};

void check_spec(const RandomSpec& s) {
  if (s.n < 1 || s.m < 1 || s.K < 1) throw BadSpec("n, m and K must be at least 1");
  if (s.D < s.K) throw BadSpec("probability grid D must be at least K");
  if (!std::isfinite(s.lo) || !std::isfinite(s.hi) || s.lo > s.hi) throw BadSpec("need finite lo <= hi");
  bool needs_nonneg = s.family != Family::kGenericUc;
  if (needs_nonneg && s.hi < 0) throw BadSpec("this family needs a range reaching 0 or above");
}

}  // namespace

std::string family_name(Family f) {
  for (const auto& [fam, name] : family_names())
    if (fam == f) return name;
  throw InvariantBreach("unnamed family");
}

Family parse_family(const std::string& name) {
  for (const auto& [fam, n] : family_names())
    if (n == name) return fam;
  throw BadSpec("unknown family '" + name + "'");
}

GeneratedInstance random_instance(const RandomSpec& spec) {
  check_spec(spec);
  Draw draw(spec.seed);
  const double vlo = std::max(0.0, spec.lo);
  const double vhi = spec.hi;
  std::string label = family_name(spec.family) + "-seed-" + std::to_string(spec.seed);

  switch (spec.family) {
    case Family::kGenericUc: {
      Instance inst;
      inst.label = label;
      for (int i = 0; i < spec.n; ++i) {
        ActionMenu menu;
        for (int l = 0; l < spec.m; ++l) {
          ConfigDist dist;
          for (const auto& p : draw.composition(spec.K, spec.D)) {
            double ua = draw.grid(spec.lo, spec.hi);
            double up = draw.grid(0.0, std::max(1.0, std::abs(spec.hi)));
            dist.masses.push_back({ua, up, p});
          }
          menu.configs.push_back(std::move(dist));
        }
        inst.actions.push_back(std::move(menu));
      }
      return inst;
    }
    case Family::kDelegation:
    case Family::kDelegationRandomBias:
    case Family::kDelegationOutside: {
      DelegationInstance d;
      d.label = label;
      for (int i = 0; i < spec.n; ++i) {
        DelegationAction a;
        a.bias = spec.family == Family::kDelegation ? DiscreteDist::constant(draw.grid(spec.lo, spec.hi))
                                                    : draw.dist(spec.K, spec.D, spec.lo, spec.hi);
        a.value = draw.dist(spec.K, spec.D, vlo, vhi);
        d.actions.push_back(std::move(a));
      }
      if (spec.family == Family::kDelegationOutside) {
        d.outside_bias = draw.dist(spec.K, spec.D, spec.lo, spec.hi + vhi);
      }
      return d;
    }
    case Family::kPricing: {
      PricingInstance p;
      p.label = label;
      for (int i = 0; i < spec.n; ++i) {
        PricingItem item;
        item.value = draw.dist(spec.K, spec.D, vlo, vhi);
        std::vector<double> prices;
        for (int l = 0; l < spec.m; ++l) prices.push_back(draw.grid(vlo, vhi));
        std::sort(prices.begin(), prices.end());
        prices.erase(std::unique(prices.begin(), prices.end()), prices.end());
        item.prices = std::move(prices);
        p.items.push_back(std::move(item));
      }
      return p;
    }
    case Family::kAssortment: {
      AssortmentInstance a;
      a.label = label;
      for (int i = 0; i < spec.n; ++i) {
        AssortmentItem item;
        item.price = draw.grid(vlo, vhi);
        item.value = draw.dist(spec.K, spec.D, vlo, vhi);
        a.items.push_back(std::move(item));
      }
      a.outside_utility = draw.dist(spec.K, spec.D, spec.lo - vhi, spec.hi);
      return a;
    }
  }
  throw InvariantBreach("unhandled family");
}

Instance to_uc(const GeneratedInstance& g) {
  struct Visitor {
    Instance operator()(const Instance& i) const { return i; }
    Instance operator()(const DelegationInstance& d) const {
      return d.outside_bias ? outside_option_transform(d) : delegation_to_uc(d);
    }
    Instance operator()(const PricingInstance& p) const { return pricing_to_uc(p); }
    Instance operator()(const AssortmentInstance& a) const { return assortment_to_uc(a); }
  };
  return std::visit(Visitor{}, g);
}

DelegationInstance tightness_instance(int T) {
  if (T < 3) throw TTooSmall("the tightness instance needs T >= 3, got " + std::to_string(T));
  const double t = T;
  DelegationInstance d;
  d.label = "tightness-T" + std::to_string(T);
  DelegationAction first;
  first.bias = DiscreteDist::constant(t - 1.0 + 1.0 / t);
  first.value.atoms = {{1.0, Rational(T - 1, T)}, {1.0 - 2.0 / t, Rational(1, T)}};
  DelegationAction second;
  second.bias = DiscreteDist::constant(0.0);
  second.value.atoms = {{t, Rational(1, T)}, {0.0, Rational(T - 1, T)}};
  for (auto* a : {&first, &second})
    for (auto& [v, p] : a->value.atoms) p.canonicalize();
  d.actions = {first, second};
  return d;
}

namespace {

void check_integers(const std::vector<long>& c) {
  if (c.empty()) throw BadIntegers("need at least one integer");
  for (long x : c)
    if (x < 1) throw BadIntegers("all integers must be positive");
}

BigInt gadget_scale(const std::vector<long>& c) {
  long cmax = *std::max_element(c.begin(), c.end());
  BigInt n = static_cast<long>(c.size());
  BigInt cm = cmax;
  return BigInt(128) * n * n * n * cm * cm * cm;
}

double smallest_power_of_two_at_least(double x) {
  int e = 0;
  double m = std::frexp(x, &e);  // x = m 2^e, m in [0.5, 1)
  return m == 0.5 ? x : std::ldexp(1.0, e);
}

}  // namespace

double default_gadget_delta(const std::vector<long>& c) {
  check_integers(c);
  BigInt G = gadget_scale(c);
  long C = 0;
  for (long x : c) C += x;
  Rational B = Rational(G * G) - Rational(BigInt(C) * G, 2);
  double top = to_double(B) + 2.0;
  double ulp = std::nextafter(top, INFINITY) - top;
  BigInt G4 = G * G * G * G;
  double paper_scale = to_double(Rational(BigInt(1), BigInt(10) * G4));
  return smallest_power_of_two_at_least(std::max(paper_scale, 4.0 * ulp));
}

PartitionGadget partition_gadget(const std::vector<long>& c, std::optional<double> delta) {
  check_integers(c);
  PartitionGadget out;
  out.G = gadget_scale(c);
  const BigInt& G = out.G;
  long C = 0;
  for (long x : c) C += x;
  out.B = Rational(G * G) - Rational(BigInt(C) * G, 2);
  out.B.canonicalize();
  out.delta = delta ? *delta : default_gadget_delta(c);
  if (!(out.delta > 0) || !std::isfinite(out.delta)) throw BadSpec("delta must be positive");
  const double d = out.delta;
  const double B = to_double(out.B);
  // 2 G^4 (1 - C/(2G)) = 2 G^4 - C G^3.
  const BigInt G3 = G * G * G;
  const BigInt denom = BigInt(2) * G3 * G - BigInt(C) * G3;

  std::string tag;
  for (long x : c) tag += (tag.empty() ? "" : "-") + std::to_string(x);
  out.assortment.label = "partition-gadget-" + tag;
  out.delegation.label = "partition-gadget-delegation-" + tag;

  for (long ci : c) {
    Rational high = Rational(BigInt(ci), G) - Rational(BigInt(ci) * ci, denom);
    Rational mid = Rational(BigInt(ci), G);
    high.canonicalize();
    mid.canonicalize();
    Rational zero = 1 - high - mid;

    AssortmentItem item;
    item.price = 1.0;
    item.value.atoms = {{2.0 + d, high}, {2.0 - d, mid}, {0.0, zero}};
    out.assortment.items.push_back(std::move(item));

    DelegationAction act;
    act.bias = DiscreteDist::constant(B);
    act.value.atoms = {{1.0 + 2.0 * d, high}, {1.0, mid}, {0.0, zero}};
    out.delegation.actions.push_back(std::move(act));
  }
  AssortmentItem last;
  last.price = B + 1.0 + d;
  last.value.atoms = {{B + 2.0 + d, Rational(1, 2)}, {0.0, Rational(1, 2)}};
  out.assortment.items.push_back(std::move(last));
  out.assortment.outside_utility = DiscreteDist::constant(0.0);

  DelegationAction act;
  act.bias = DiscreteDist::constant(0.0);
  act.value.atoms = {{B + 1.0 + d, Rational(1, 2)}, {0.0, Rational(1, 2)}};
  out.delegation.actions.push_back(std::move(act));
  return out;
}

}  // namespace ucfg

#include "ucfg/reductions.hpp"

#include <cmath>
#include <map>

#include "ucfg/errors.hpp"

namespace ucfg {

Rational DiscreteDist::cdf(double x) const {
  Rational total = 0;
  for (const auto& [v, p] : atoms)
    if (v <= x) total += p;
  return total;
}

void require_valid(const DiscreteDist& dist, const std::string& what, bool nonnegative) {
  if (dist.atoms.empty()) throw InvalidInstance(what + ": distribution has no atoms");
  Rational total = 0;
  for (const auto& [v, p] : dist.atoms) {
    if (!std::isfinite(v)) throw InvalidInstance(what + ": support values must be finite");
    if (nonnegative && v < 0) throw InvalidInstance(what + ": support values must be nonnegative");
    if (p <= 0 || p > 1) throw InvalidInstance(what + ": probabilities must lie in (0, 1]");
    total += p;
  }
  if (total != 1) throw InvalidInstance(what + ": probabilities sum to " + to_string(total));
}

void require_valid(const DelegationInstance& d) {
  if (d.actions.empty()) throw InvalidInstance("delegation instance has no actions");
  for (std::size_t i = 0; i < d.actions.size(); ++i) {
    std::string path = "actions[" + std::to_string(i) + "]";
    require_valid(d.actions[i].bias, path + ".bias", false);
    require_valid(d.actions[i].value, path + ".value", true);
  }
  if (d.outside_bias) require_valid(*d.outside_bias, "outside_bias", false);
}

void require_valid(const PricingInstance& p) {
  if (p.items.empty()) throw InvalidInstance("pricing instance has no items");
  for (std::size_t i = 0; i < p.items.size(); ++i) {
    require_valid(p.items[i].value, "items[" + std::to_string(i) + "].value", true);
  }
}

void require_valid(const AssortmentInstance& a) {
  if (a.items.empty()) throw InvalidInstance("assortment instance has no items");
  for (std::size_t i = 0; i < a.items.size(); ++i) {
    std::string path = "items[" + std::to_string(i) + "]";
    if (!std::isfinite(a.items[i].price) || a.items[i].price < 0) {
      throw InvalidInstance(path + ".price must be finite and nonnegative");
    }
    require_valid(a.items[i].value, path + ".value", true);
  }
  require_valid(a.outside_utility, "outside_utility", false);
}

namespace {

// Accumulates atoms, merging equal (agent, principal) pairs; keeps first-seen order.
class AtomBuilder {
 public:
  void add(double agent, double principal, const Rational& p) {
    auto key = std::make_pair(agent, principal);
    auto it = index_.find(key);
    if (it == index_.end()) {
      index_.emplace(key, dist_.masses.size());
      dist_.masses.push_back({agent, principal, p});
    } else {
      dist_.masses[it->second].probability += p;
    }
  }
  ConfigDist take() { return std::move(dist_); }

 private:
  ConfigDist dist_;
  std::map<std::pair<double, double>, std::size_t> index_;
};

ConfigDist excluded() { return ConfigDist{{{NEG_INF, 0.0, Rational(1)}}}; }

Instance delegation_image(const DelegationInstance& d, const DiscreteDist* outside) {
  Instance out;
  out.label = d.label;
  for (const auto& a : d.actions) {
    AtomBuilder in;
    for (const auto& [v, pv] : a.value.atoms) {
      for (const auto& [b, pb] : a.bias.atoms) {
        double u = v + b;
        double up = v;
        if (outside) up = to_double(rational_from_double(v) * outside->cdf(u));
        in.add(u, up, pv * pb);
      }
    }
    out.actions.push_back(ActionMenu{{in.take(), excluded()}});
  }
  return out;
}

}  // namespace

Instance delegation_to_uc(const DelegationInstance& d) {
  require_valid(d);
  if (d.outside_bias) throw HasOutsideOption("use the outside-option transform for this instance");
  return delegation_image(d, nullptr);
}

Instance outside_option_transform(const DelegationInstance& d) {
  require_valid(d);
  if (!d.outside_bias) throw NoOutsideOption("instance has no outside option");
  return delegation_image(d, &*d.outside_bias);
}

std::vector<double> price_grid(double u_min, double u_max, double eps) {
  if (!(eps > 0 && eps < 0.5)) throw BadEpsilon("eps must lie in (0, 1/2)");
  if (!(u_min > 0) || !std::isfinite(u_min) || !std::isfinite(u_max) || u_max < u_min) {
    throw BadRange("need 0 < u_min <= u_max < inf");
  }
  const double shrink = 1.0 - eps * eps;
  const double lead = 1.0 + eps * eps - eps;
  auto top = static_cast<long>(std::floor(std::log(u_max / u_min) / -std::log(shrink)));
  // Guard the floor against log round-off in either direction.
  while (top > 0 && std::pow(shrink, -static_cast<double>(top)) > u_max / u_min) --top;
  while (std::pow(shrink, -static_cast<double>(top + 1)) <= u_max / u_min) ++top;
  std::vector<double> out;
  for (long i = 0; i <= top; ++i) out.push_back(lead / std::pow(shrink, static_cast<double>(i)) * u_min);
  return out;
}

std::vector<double> item_prices(const PricingItem& item) {
  if (const auto* list = std::get_if<std::vector<double>>(&item.prices)) return *list;
  const auto& g = std::get<PriceGridRequest>(item.prices);
  return price_grid(g.u_min, g.u_max, g.eps);
}

Instance pricing_to_uc(const PricingInstance& p) {
  require_valid(p);
  Instance out;
  out.label = p.label;
  for (std::size_t i = 0; i < p.items.size(); ++i) {
    auto prices = item_prices(p.items[i]);
    if (prices.empty()) throw EmptyPriceSet("item " + std::to_string(i) + " has no allowed price");
    ActionMenu menu;
    for (double price : prices) {
      if (!std::isfinite(price) || price < 0) {
        throw InvalidInstance("item " + std::to_string(i) + " has a negative or non-finite price");
      }
      AtomBuilder b;
      Rational pooled = 0;
      for (const auto& [v, pv] : p.items[i].value.atoms) {
        if (v >= price) {
          b.add(v - price, price, pv);
        } else {
          pooled += pv;
        }
      }
      if (pooled != 0) b.add(0.0, 0.0, pooled);
      menu.configs.push_back(b.take());
    }
    menu.configs.push_back(excluded());
    out.actions.push_back(std::move(menu));
  }
  return out;
}

DelegationInstance assortment_as_delegation(const AssortmentInstance& a) {
  require_valid(a);
  DelegationInstance d;
  d.label = a.label;
  for (const auto& item : a.items) {
    DelegationAction act;
    act.value = DiscreteDist::constant(item.price);
    for (const auto& [v, pv] : item.value.atoms) act.bias.atoms.emplace_back(v - 2.0 * item.price, pv);
    d.actions.push_back(std::move(act));
  }
  d.outside_bias = a.outside_utility;
  return d;
}

Instance assortment_to_uc(const AssortmentInstance& a) {
  require_valid(a);
  // Same image as outside_option_transform(assortment_as_delegation(a)), but the agent
  // side is v - price computed directly, since price + (v - 2 price) can round.
  Instance out;
  out.label = a.label;
  for (const auto& item : a.items) {
    AtomBuilder in;
    for (const auto& [v, pv] : item.value.atoms) {
      double u = v - item.price;
      double up = to_double(rational_from_double(item.price) * a.outside_utility.cdf(u));
      in.add(u, up, pv);
    }
    out.actions.push_back(ActionMenu{{in.take(), excluded()}});
  }
  return out;
}

}  // namespace ucfg

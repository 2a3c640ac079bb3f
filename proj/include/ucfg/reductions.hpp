#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ucfg/core.hpp"

namespace ucfg {

/// Finite-support distribution of a real quantity.
struct DiscreteDist {
  std::vector<std::pair<double, Rational>> atoms;  // (value, probability)

  static DiscreteDist constant(double value) { return DiscreteDist{{{value, Rational(1)}}}; }
  /// Pr[X <= x].
  Rational cdf(double x) const;
};

struct DelegationAction {
  DiscreteDist bias;
  DiscreteDist value;
};

struct DelegationInstance {
  std::string label;
  std::vector<DelegationAction> actions;
  std::optional<DiscreteDist> outside_bias;
};

struct PriceGridRequest {
  double u_min = 1.0;
  double u_max = 1.0;
  double eps = 0.25;
};

struct PricingItem {
  DiscreteDist value;
  std::variant<std::vector<double>, PriceGridRequest> prices;
};

struct PricingInstance {
  std::string label;
  std::vector<PricingItem> items;
};

struct AssortmentItem {
  double price = 0.0;
  DiscreteDist value;
};

struct AssortmentInstance {
  std::string label;
  std::vector<AssortmentItem> items;
  DiscreteDist outside_utility;
};

void require_valid(const DiscreteDist& dist, const std::string& what, bool nonnegative);
void require_valid(const DelegationInstance& d);
void require_valid(const PricingInstance& p);
void require_valid(const AssortmentInstance& a);

/// Configuration 0 is "in", configuration 1 is "out".
Instance delegation_to_uc(const DelegationInstance& d);
Instance outside_option_transform(const DelegationInstance& d);

/// Prices of an item, expanding a grid request.
std::vector<double> item_prices(const PricingItem& item);

/// One configuration per allowed price in order, then "don't sell" last.
Instance pricing_to_uc(const PricingInstance& p);

/// (1 + eps^2 - eps) / (1 - eps^2)^i * u_min for i = 0..floor(log_{1/(1-eps^2)}(u_max/u_min)).
std::vector<double> price_grid(double u_min, double u_max, double eps);

/// Item i becomes a delegation action with value p_i and bias v_i - 2 p_i; the
/// outside utility becomes the outside bias.
DelegationInstance assortment_as_delegation(const AssortmentInstance& a);

/// Configuration 0 stocks the item, configuration 1 does not.
Instance assortment_to_uc(const AssortmentInstance& a);

}  // namespace ucfg

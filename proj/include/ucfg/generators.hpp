#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ucfg/core.hpp"
#include "ucfg/reductions.hpp"

namespace ucfg {

enum class Family { kGenericUc, kDelegation, kDelegationRandomBias, kDelegationOutside, kPricing, kAssortment };

std::string family_name(Family f);
Family parse_family(const std::string& name);

struct RandomSpec {
  int n = 2;
  int m = 2;
  int K = 2;
  double lo = 0.0;
  double hi = 4.0;
  int D = 8;  // probabilities are multiples of 1/D
  Family family = Family::kGenericUc;
  std::uint64_t seed = 0;
};

using GeneratedInstance = std::variant<Instance, DelegationInstance, PricingInstance, AssortmentInstance>;

/// Utilities are drawn on the quarter grid inside [lo, hi]; value and price draws are
/// clipped to the nonnegative part of the range.
GeneratedInstance random_instance(const RandomSpec& spec);

/// The utility-configuration image of any generated instance.
Instance to_uc(const GeneratedInstance& g);

/// Two-action delegation instance whose optimum is nearly 2-misaligned.
DelegationInstance tightness_instance(int T);

struct PartitionGadget {
  AssortmentInstance assortment;
  DelegationInstance delegation;  // the structurally equivalent delegation instance
  BigInt G;
  Rational B;  // G^2 (1 - C / (2G))
  double delta = 0.0;
};

/// Smallest power of two that is at least 1/(10 G^4) and at least four units in the
/// last place of the largest value in the gadget.
double default_gadget_delta(const std::vector<long>& c);

PartitionGadget partition_gadget(const std::vector<long>& c, std::optional<double> delta = std::nullopt);

}  // namespace ucfg

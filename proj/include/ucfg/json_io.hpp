#pragma once

#include <json.hpp>
#include <string>

#include "ucfg/alignment.hpp"
#include "ucfg/core.hpp"
#include "ucfg/preprocess.hpp"
#include "ucfg/reductions.hpp"
#include "ucfg/scheme.hpp"

namespace ucfg {

using Json = nlohmann::ordered_json;

/// Probabilities: "num/den" strings, or JSON numbers read as their exact binary value.
Rational probability_from_json(const Json& j, const std::string& path);

Json instance_to_json(const Instance& instance);
/// Structural parse only; run validate() on the result for invariant checks.
Instance instance_from_json(const Json& j);

Json dist_to_json(const DiscreteDist& d);
DiscreteDist dist_from_json(const Json& j, const std::string& path);

Json delegation_to_json(const DelegationInstance& d);
DelegationInstance delegation_from_json(const Json& j);
Json pricing_to_json(const PricingInstance& p);
PricingInstance pricing_from_json(const Json& j);
Json assortment_to_json(const AssortmentInstance& a);
AssortmentInstance assortment_from_json(const Json& j);

Json configuration_to_json(const Configuration& c);
Json profile_to_json(const BinProfile& p);
Json diagnostics_to_json(const SchemeDiagnostics& d);
Json provenance_to_json(const PreprocessResult& r);
Json violations_to_json(const std::vector<Violation>& v);

Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace ucfg

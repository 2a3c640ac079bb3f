#include "ucfg/json_io.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "ucfg/errors.hpp"

namespace ucfg {

namespace {

const Json& field(const Json& j, const char* key, const std::string& path) {
  if (!j.is_object()) throw ParseError(path + " must be an object");
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(path + "." + key + " is missing");
  return *it;
}

const Json& array_field(const Json& j, const char* key, const std::string& path) {
  const Json& a = field(j, key, path);
  if (!a.is_array()) throw ParseError(path + "." + key + " must be an array");
  return a;
}

double number(const Json& j, const std::string& path) {
  if (!j.is_number()) throw ParseError(path + " must be a number");
  return j.get<double>();
}

double agent_utility_from_json(const Json& j, const std::string& path) {
  if (j.is_string() && j.get<std::string>() == "-inf") return NEG_INF;
  return number(j, path);
}

Json agent_utility_to_json(double u) {
  if (is_neg_inf(u)) return "-inf";
  return u;
}

std::string label_of(const Json& j) {
  auto it = j.find("label");
  if (it == j.end()) return "";
  if (!it->is_string()) throw ParseError("label must be a string");
  return it->get<std::string>();
}

}  // namespace

Rational probability_from_json(const Json& j, const std::string& path) {
  try {
    if (j.is_string()) return parse_rational(j.get<std::string>());
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
  if (j.is_number()) {
    double v = j.get<double>();
    if (!std::isfinite(v)) throw ParseError(path + " must be finite");
    return rational_from_double(v);
  }
  throw ParseError(path + " must be a \"num/den\" string or a number");
}

Json instance_to_json(const Instance& instance) {
  Json actions = Json::array();
  for (const auto& menu : instance.actions) {
    Json configs = Json::array();
    for (const auto& dist : menu.configs) {
      Json masses = Json::array();
      for (const auto& pm : dist.masses) {
        masses.push_back({{"ua", agent_utility_to_json(pm.agent_utility)},
                          {"up", pm.principal_utility},
                          {"p", to_string(pm.probability)}});
      }
      configs.push_back({{"masses", masses}});
    }
    actions.push_back({{"configs", configs}});
  }
  return {{"label", instance.label}, {"actions", actions}};
}

Instance instance_from_json(const Json& j) {
  Instance out;
  out.label = label_of(j);
  const Json& actions = array_field(j, "actions", "$");
  for (std::size_t i = 0; i < actions.size(); ++i) {
    std::string apath = "$.actions[" + std::to_string(i) + "]";
    ActionMenu menu;
    const Json& configs = array_field(actions[i], "configs", apath);
    for (std::size_t l = 0; l < configs.size(); ++l) {
      std::string cpath = apath + ".configs[" + std::to_string(l) + "]";
      ConfigDist dist;
      const Json& masses = array_field(configs[l], "masses", cpath);
      for (std::size_t k = 0; k < masses.size(); ++k) {
        std::string mpath = cpath + ".masses[" + std::to_string(k) + "]";
        PointMass pm;
        pm.agent_utility = agent_utility_from_json(field(masses[k], "ua", mpath), mpath + ".ua");
        pm.principal_utility = number(field(masses[k], "up", mpath), mpath + ".up");
        pm.probability = probability_from_json(field(masses[k], "p", mpath), mpath + ".p");
        dist.masses.push_back(std::move(pm));
      }
      menu.configs.push_back(std::move(dist));
    }
    out.actions.push_back(std::move(menu));
  }
  return out;
}

Json dist_to_json(const DiscreteDist& d) {
  Json out = Json::array();
  for (const auto& [v, p] : d.atoms) out.push_back({{"value", v}, {"p", to_string(p)}});
  return out;
}

DiscreteDist dist_from_json(const Json& j, const std::string& path) {
  DiscreteDist out;
  if (j.is_number()) return DiscreteDist::constant(j.get<double>());
  if (!j.is_array()) throw ParseError(path + " must be a number or a list of {value, p}");
  for (std::size_t k = 0; k < j.size(); ++k) {
    std::string apath = path + "[" + std::to_string(k) + "]";
    out.atoms.emplace_back(number(field(j[k], "value", apath), apath + ".value"),
                           probability_from_json(field(j[k], "p", apath), apath + ".p"));
  }
  return out;
}

Json delegation_to_json(const DelegationInstance& d) {
  Json actions = Json::array();
  for (const auto& a : d.actions) actions.push_back({{"bias", dist_to_json(a.bias)}, {"value", dist_to_json(a.value)}});
  Json out = {{"problem", "delegation"}, {"label", d.label}, {"actions", actions}};
  if (d.outside_bias) out["outside_bias"] = dist_to_json(*d.outside_bias);
  return out;
}

DelegationInstance delegation_from_json(const Json& j) {
  DelegationInstance d;
  d.label = label_of(j);
  const Json& actions = array_field(j, "actions", "$");
  for (std::size_t i = 0; i < actions.size(); ++i) {
    std::string path = "$.actions[" + std::to_string(i) + "]";
    DelegationAction a;
    a.bias = dist_from_json(field(actions[i], "bias", path), path + ".bias");
    a.value = dist_from_json(field(actions[i], "value", path), path + ".value");
    d.actions.push_back(std::move(a));
  }
  if (j.contains("outside_bias")) d.outside_bias = dist_from_json(j["outside_bias"], "$.outside_bias");
  return d;
}

Json pricing_to_json(const PricingInstance& p) {
  Json items = Json::array();
  for (const auto& item : p.items) {
    Json prices;
    if (const auto* list = std::get_if<std::vector<double>>(&item.prices)) {
      prices = *list;
    } else {
      const auto& g = std::get<PriceGridRequest>(item.prices);
      prices = {{"grid", {{"u_min", g.u_min}, {"u_max", g.u_max}, {"eps", g.eps}}}};
    }
    items.push_back({{"value", dist_to_json(item.value)}, {"prices", prices}});
  }
  return {{"problem", "pricing"}, {"label", p.label}, {"items", items}};
}

PricingInstance pricing_from_json(const Json& j) {
  PricingInstance p;
  p.label = label_of(j);
  const Json& items = array_field(j, "items", "$");
  for (std::size_t i = 0; i < items.size(); ++i) {
    std::string path = "$.items[" + std::to_string(i) + "]";
    PricingItem item;
    item.value = dist_from_json(field(items[i], "value", path), path + ".value");
    const Json& prices = field(items[i], "prices", path);
    if (prices.is_array()) {
      std::vector<double> list;
      for (std::size_t k = 0; k < prices.size(); ++k)
        list.push_back(number(prices[k], path + ".prices[" + std::to_string(k) + "]"));
      item.prices = std::move(list);
    } else {
      const Json& g = field(prices, "grid", path + ".prices");
      std::string gpath = path + ".prices.grid";
      item.prices = PriceGridRequest{number(field(g, "u_min", gpath), gpath + ".u_min"),
                                     number(field(g, "u_max", gpath), gpath + ".u_max"),
                                     number(field(g, "eps", gpath), gpath + ".eps")};
    }
    p.items.push_back(std::move(item));
  }
  return p;
}

Json assortment_to_json(const AssortmentInstance& a) {
  Json items = Json::array();
  for (const auto& item : a.items) items.push_back({{"price", item.price}, {"value", dist_to_json(item.value)}});
  return {{"problem", "assortment"},
          {"label", a.label},
          {"items", items},
          {"outside_utility", dist_to_json(a.outside_utility)}};
}

AssortmentInstance assortment_from_json(const Json& j) {
  AssortmentInstance a;
  a.label = label_of(j);
  const Json& items = array_field(j, "items", "$");
  for (std::size_t i = 0; i < items.size(); ++i) {
    std::string path = "$.items[" + std::to_string(i) + "]";
    AssortmentItem item;
    item.price = number(field(items[i], "price", path), path + ".price");
    item.value = dist_from_json(field(items[i], "value", path), path + ".value");
    a.items.push_back(std::move(item));
  }
  a.outside_utility = dist_from_json(field(j, "outside_utility", "$"), "$.outside_utility");
  return a;
}

Json configuration_to_json(const Configuration& c) { return c.choices; }

Json profile_to_json(const BinProfile& p) { return p.boundaries; }

Json diagnostics_to_json(const SchemeDiagnostics& d) {
  Json out = {{"mode", d.mode},
              {"profiles_enumerated", d.profiles_enumerated},
              {"profiles_feasible", d.profiles_feasible},
              {"prefixes_pruned", d.prefixes_pruned},
              {"profiles_total", d.profiles_total.get_str()},
              {"cap_reached", d.cap_reached},
              {"best_profile", d.best_profile ? profile_to_json(*d.best_profile) : Json(nullptr)},
              {"best_objective", d.best_objective ? Json(*d.best_objective) : Json(nullptr)},
              {"best_value", d.best_value},
              {"fallback_used", d.fallback_used},
              {"delta", d.delta}};
  return out;
}

Json provenance_to_json(const PreprocessResult& r) {
  Json atoms = Json::array();
  for (std::size_t i = 0; i < r.origin.size(); ++i) {
    for (std::size_t l = 0; l < r.origin[i].size(); ++l) {
      Json by_atom = Json::object();
      std::map<std::size_t, std::vector<std::size_t>> pieces;
      for (std::size_t k = 0; k < r.origin[i][l].size(); ++k) pieces[r.origin[i][l][k]].push_back(k);
      for (const auto& [atom, list] : pieces) {
        atoms.push_back({{"action", i}, {"config", l}, {"atom", atom}, {"pieces", list}});
      }
    }
  }
  return {{"M", r.M}, {"delta", r.delta}, {"provenance", atoms}};
}

Json violations_to_json(const std::vector<Violation>& v) {
  Json out = Json::array();
  for (const auto& x : v) out.push_back({{"path", x.path}, {"message", x.message}});
  return out;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ParseError("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write '" + path + "'");
  out << text;
}

}  // namespace ucfg

#include "ucfg/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "ucfg/errors.hpp"

namespace ucfg {

namespace {

void require_fineness(int M) {
  if (M < 2) throw MTooSmall("preprocessing needs M >= 2, got " + std::to_string(M));
}

Rational piece_size(int M) { return Rational(1, static_cast<unsigned long>(M) * M); }

}  // namespace

std::size_t piece_count(const Rational& p, int M) {
  Rational scaled = p * static_cast<long>(M) * M;
  auto whole = static_cast<std::size_t>(floor_to_int(scaled));
  return whole + (scaled != Rational(static_cast<long>(whole)) ? 1 : 0);
}

double min_utility_gap(const Instance& instance) {
  std::vector<double> us;
  for (const auto& menu : instance.actions)
    for (const auto& dist : menu.configs)
      for (const auto& pm : dist.masses)
        if (!is_neg_inf(pm.agent_utility)) us.push_back(pm.agent_utility);
  std::sort(us.begin(), us.end());
  us.erase(std::unique(us.begin(), us.end()), us.end());
  if (us.size() < 2) return 1.0;
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < us.size(); ++k) gap = std::min(gap, us[k] - us[k - 1]);
  return gap;
}

double delta_for(double min_gap, std::size_t atom_count) {
  return min_gap / (2.0 * static_cast<double>(std::max<std::size_t>(atom_count, 1)));
}

double choose_delta(const Instance& instance, int M) {
  require_valid(instance);
  require_fineness(M);
  std::size_t total = 0;
  for (const auto& menu : instance.actions)
    for (const auto& dist : menu.configs)
      for (const auto& pm : dist.masses) total += piece_count(pm.probability, M);
  return delta_for(min_utility_gap(instance), total);
}

PreprocessResult preprocess(const Instance& instance, const PreprocessParams& params) {
  require_valid(instance);
  require_fineness(params.M);
  const int M = params.M;
  double delta = params.delta ? *params.delta : choose_delta(instance, M);
  if (!(delta > 0) || !std::isfinite(delta)) {
    throw BadSpec("perturbation must be a positive finite number");
  }

  struct Ref {
    std::size_t action, config, atom;
    double principal;
  };
  std::vector<Ref> order;
  for (std::size_t i = 0; i < instance.actions.size(); ++i)
    for (std::size_t l = 0; l < instance.actions[i].configs.size(); ++l) {
      const auto& masses = instance.dist(i, l).masses;
      for (std::size_t k = 0; k < masses.size(); ++k)
        order.push_back({i, l, k, masses[k].principal_utility});
    }
  // Emission order is already (action, config, atom), so a stable sort gives the tie rule.
  std::stable_sort(order.begin(), order.end(),
                   [](const Ref& a, const Ref& b) { return a.principal < b.principal; });

  // Pieces of each input atom, filled in global order, then laid out per configuration.
  std::vector<std::vector<std::vector<std::vector<PointMass>>>> pieces(instance.actions.size());
  for (std::size_t i = 0; i < instance.actions.size(); ++i) {
    pieces[i].resize(instance.actions[i].configs.size());
    for (std::size_t l = 0; l < pieces[i].size(); ++l)
      pieces[i][l].resize(instance.dist(i, l).masses.size());
  }

  const Rational unit = piece_size(M);
  std::uint64_t counter = 0;
  for (const auto& ref : order) {
    const auto& pm = instance.dist(ref.action, ref.config).masses[ref.atom];
    Rational scaled = pm.probability * static_cast<long>(M) * M;
    auto whole = floor_to_int(scaled);
    Rational remainder = pm.probability - unit * whole;
    auto& out = pieces[ref.action][ref.config][ref.atom];
    auto emit = [&](const Rational& prob) {
      double u = is_neg_inf(pm.agent_utility)
                     ? NEG_INF
                     : pm.agent_utility + delta * static_cast<double>(counter);
      out.push_back({u, pm.principal_utility, prob});
      ++counter;
    };
    for (std::int64_t w = 0; w < whole; ++w) emit(unit);
    if (remainder != 0) emit(remainder);
  }

  PreprocessResult result;
  result.delta = delta;
  result.M = M;
  result.instance.label = instance.label;
  result.instance.actions.resize(instance.actions.size());
  result.origin.resize(instance.actions.size());
  for (std::size_t i = 0; i < instance.actions.size(); ++i) {
    result.instance.actions[i].configs.resize(pieces[i].size());
    result.origin[i].resize(pieces[i].size());
    for (std::size_t l = 0; l < pieces[i].size(); ++l) {
      auto& masses = result.instance.actions[i].configs[l].masses;
      for (std::size_t k = 0; k < pieces[i][l].size(); ++k) {
        for (auto& pm : pieces[i][l][k]) {
          masses.push_back(std::move(pm));
          result.origin[i][l].push_back(k);
        }
      }
    }
  }

  if (auto defect = preprocessing_defect(result.instance, M)) {
    throw PrecisionLoss("perturbation " + std::to_string(delta) +
                        " is below floating resolution: " + *defect);
  }
  return result;
}

std::optional<std::string> preprocessing_defect(const Instance& instance, int M) {
  const Rational cap = piece_size(M);
  std::vector<double> us;
  for (std::size_t i = 0; i < instance.actions.size(); ++i)
    for (std::size_t l = 0; l < instance.actions[i].configs.size(); ++l)
      for (const auto& pm : instance.dist(i, l).masses) {
        if (pm.probability > cap) {
          std::ostringstream msg;
          msg << "action " << i << " config " << l << " has a mass of probability "
              << to_string(pm.probability) << " above 1/" << M * M;
          return msg.str();
        }
        if (!is_neg_inf(pm.agent_utility)) us.push_back(pm.agent_utility);
      }
  std::sort(us.begin(), us.end());
  auto dup = std::adjacent_find(us.begin(), us.end());
  if (dup != us.end()) {
    std::ostringstream msg;
    msg << "agent utility " << *dup << " occurs more than once";
    return msg.str();
  }
  return std::nullopt;
}

void require_preprocessed(const Instance& instance, int M) {
  if (auto defect = preprocessing_defect(instance, M)) throw NotPreprocessed(*defect);
}

}  // namespace ucfg

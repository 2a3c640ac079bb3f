#include "ucfg/core.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "ucfg/errors.hpp"

namespace ucfg {

std::vector<Violation> validate(const Instance& instance) {
  std::vector<Violation> out;
  if (instance.actions.empty()) out.push_back({"actions", "instance has no actions"});
  for (std::size_t i = 0; i < instance.actions.size(); ++i) {
    const auto& menu = instance.actions[i];
    std::string apath = "actions[" + std::to_string(i) + "]";
    if (menu.configs.empty()) out.push_back({apath + ".configs", "action has no configurations"});
    for (std::size_t l = 0; l < menu.configs.size(); ++l) {
      const auto& dist = menu.configs[l];
      std::string cpath = apath + ".configs[" + std::to_string(l) + "]";
      if (dist.masses.empty()) {
        out.push_back({cpath + ".masses", "configuration has no point masses"});
        continue;
      }
      Rational total = 0;
      for (std::size_t k = 0; k < dist.masses.size(); ++k) {
        const auto& pm = dist.masses[k];
        std::string mpath = cpath + ".masses[" + std::to_string(k) + "]";
        if (std::isnan(pm.agent_utility) || (std::isinf(pm.agent_utility) && pm.agent_utility > 0)) {
          out.push_back({mpath + ".ua", "agent utility must be finite or -inf"});
        }
        if (!std::isfinite(pm.principal_utility) || pm.principal_utility < 0) {
          out.push_back({mpath + ".up", "principal utility must be finite and nonnegative"});
        }
        if (pm.probability <= 0 || pm.probability > 1) {
          out.push_back({mpath + ".p", "probability must lie in (0, 1], got " + to_string(pm.probability)});
        }
        total += pm.probability;
      }
      if (total != 1) {
        out.push_back({cpath, "probabilities sum to " + to_string(total) + ", not 1"});
      }
    }
  }
  return out;
}

void require_valid(const Instance& instance) {
  auto violations = validate(instance);
  if (violations.empty()) return;
  std::ostringstream msg;
  for (std::size_t k = 0; k < violations.size(); ++k) {
    if (k) msg << "; ";
    msg << violations[k].path << ": " << violations[k].message;
  }
  throw InvalidInstance(msg.str());
}

void require_configuration(const Instance& instance, const Configuration& config) {
  if (config.choices.size() != instance.num_actions()) {
    throw InvalidInstance("configuration has " + std::to_string(config.choices.size()) +
                          " entries for " + std::to_string(instance.num_actions()) + " actions");
  }
  for (std::size_t i = 0; i < config.choices.size(); ++i) {
    if (config.choices[i] >= instance.actions[i].configs.size()) {
      throw InvalidInstance("configuration index " + std::to_string(config.choices[i]) +
                            " out of range for action " + std::to_string(i));
    }
  }
}

namespace {

struct SweepAtom {
  double agent_utility;
  double principal_utility;
  std::size_t action;
  const Rational* probability;
};

// Agent preference order, worst first. Among equal agent utilities the atom the
// principal-favoring rule picks must come last.
bool sweep_less(const SweepAtom& a, const SweepAtom& b) {
  if (a.agent_utility != b.agent_utility) return a.agent_utility < b.agent_utility;
  if (a.principal_utility != b.principal_utility) return a.principal_utility < b.principal_utility;
  return a.action > b.action;
}

}  // namespace

MaxDistribution max_distribution(const Instance& instance, const Configuration& config,
                                 TieRule rule) {
  require_valid(instance);
  require_configuration(instance, config);
  const std::size_t n = instance.num_actions();

  std::vector<Rational> cum(n, Rational(0));
  std::vector<SweepAtom> atoms;
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& pm : instance.dist(i, config.choices[i]).masses) {
      if (is_neg_inf(pm.agent_utility)) {
        cum[i] += pm.probability;
      } else {
        atoms.push_back({pm.agent_utility, pm.principal_utility, i, &pm.probability});
      }
    }
  }
  std::sort(atoms.begin(), atoms.end(), sweep_less);

  if (rule == TieRule::kStrict) {
    for (std::size_t k = 0; k + 1 < atoms.size(); ++k) {
      for (std::size_t t = k + 1; t < atoms.size() && atoms[t].agent_utility == atoms[k].agent_utility; ++t) {
        if (atoms[t].action != atoms[k].action) {
          std::ostringstream msg;
          msg << "actions " << atoms[k].action << " and " << atoms[t].action
              << " share agent utility " << atoms[k].agent_utility;
          throw UnresolvedTie(msg.str());
        }
      }
    }
  }

  MaxDistribution out;
  out.none_probability = 1;
  for (const auto& c : cum) out.none_probability *= c;

  out.atoms.reserve(atoms.size());
  std::size_t zero_count = 0;
  for (const auto& c : cum) zero_count += (c == 0);
  for (const auto& a : atoms) {
    // Pr[every other action sits strictly earlier in the preference order].
    Rational win = *a.probability;
    bool others_zero = zero_count > (cum[a.action] == 0 ? 1u : 0u);
    if (others_zero) {
      win = 0;
    } else {
      for (std::size_t j = 0; j < n; ++j) {
        if (j != a.action) win *= cum[j];
      }
    }
    if (win != 0) out.atoms.push_back({a.agent_utility, a.principal_utility, a.action, win});
    if (cum[a.action] == 0) --zero_count;
    cum[a.action] += *a.probability;
  }
  return out;
}

Rational evaluate_exact_rational(const Instance& instance, const Configuration& config,
                                 TieRule rule) {
  auto dist = max_distribution(instance, config, rule);
  Rational total = 0;
  for (const auto& a : dist.atoms) {
    if (a.principal_utility != 0) total += a.probability * rational_from_double(a.principal_utility);
  }
  return total;
}

double evaluate_exact(const Instance& instance, const Configuration& config, TieRule rule) {
  return to_double(evaluate_exact_rational(instance, config, rule));
}

MonteCarloEstimate evaluate_monte_carlo(const Instance& instance, const Configuration& config,
                                        std::uint64_t samples, std::uint64_t seed, TieRule rule) {
  require_valid(instance);
  require_configuration(instance, config);
  if (samples == 0) throw InvalidInstance("Monte Carlo needs at least one sample");
  if (rule == TieRule::kStrict) max_distribution(instance, config, rule);  // surfaces ties

  const std::size_t n = instance.num_actions();
  struct Sampler {
    std::vector<double> cdf;
    const std::vector<PointMass>* masses;
  };
  std::vector<Sampler> samplers(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& masses = instance.dist(i, config.choices[i]).masses;
    samplers[i].masses = &masses;
    Rational acc = 0;
    for (const auto& pm : masses) {
      acc += pm.probability;
      samplers[i].cdf.push_back(to_double(acc));
    }
    samplers[i].cdf.back() = 1.0;
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double mean = 0.0, m2 = 0.0;
  for (std::uint64_t s = 0; s < samples; ++s) {
    bool any = false;
    double best_a = 0.0, best_p = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& sm = samplers[i];
      double x = unif(rng);
      auto k = static_cast<std::size_t>(std::upper_bound(sm.cdf.begin(), sm.cdf.end(), x) - sm.cdf.begin());
      if (k >= sm.cdf.size()) k = sm.cdf.size() - 1;
      const auto& pm = (*sm.masses)[k];
      if (is_neg_inf(pm.agent_utility)) continue;
      // Actions are visited in index order, so a strict improvement is needed to displace
      // an equal-utility, equal-principal earlier action.
      if (!any || pm.agent_utility > best_a ||
          (pm.agent_utility == best_a && pm.principal_utility > best_p)) {
        any = true;
        best_a = pm.agent_utility;
        best_p = pm.principal_utility;
      }
    }
    double x = any ? best_p : 0.0;
    double delta = x - mean;
    mean += delta / static_cast<double>(s + 1);
    m2 += delta * (x - mean);
  }
  MonteCarloEstimate out;
  out.estimate = mean;
  if (samples > 1) {
    double var = m2 / static_cast<double>(samples - 1);
    out.std_error = std::sqrt(std::max(var, 0.0) / static_cast<double>(samples));
  }
  return out;
}

std::uint64_t configuration_count(const Instance& instance) {
  std::uint64_t total = 1;
  for (const auto& menu : instance.actions) {
    std::uint64_t m = menu.configs.size();
    if (m == 0) return 0;
    if (total > UINT64_MAX / m) return UINT64_MAX;
    total *= m;
  }
  return total;
}

BruteForceResult brute_force_opt(const Instance& instance, std::uint64_t cap, TieRule rule) {
  require_valid(instance);
  std::uint64_t count = configuration_count(instance);
  if (count > cap) {
    throw SearchSpaceTooLarge(std::to_string(count) + " configurations exceed the cap of " +
                              std::to_string(cap));
  }
  const std::size_t n = instance.num_actions();
  Configuration current{std::vector<std::size_t>(n, 0)};
  BruteForceResult best;
  bool have = false;
  while (true) {
    Rational value = evaluate_exact_rational(instance, current, rule);
    ++best.evaluated;
    if (!have || value > best.exact_value) {
      have = true;
      best.exact_value = value;
      best.config = current;
    }
    // Odometer with the last action varying fastest gives lexicographic order.
    std::size_t i = n;
    while (i > 0) {
      --i;
      if (++current.choices[i] < instance.actions[i].configs.size()) break;
      current.choices[i] = 0;
      if (i == 0) {
        best.value = to_double(best.exact_value);
        return best;
      }
    }
  }
}

}  // namespace ucfg

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "ucfg/rational.hpp"

namespace ucfg {

/// Agent utility of an outcome that is never chosen.
inline constexpr double NEG_INF = -std::numeric_limits<double>::infinity();

inline bool is_neg_inf(double u) { return std::isinf(u) && u < 0; }

struct PointMass {
  double agent_utility = 0.0;
  double principal_utility = 0.0;
  Rational probability;
};

struct ConfigDist {
  std::vector<PointMass> masses;
};

struct ActionMenu {
  std::vector<ConfigDist> configs;
};

struct Instance {
  std::string label;
  std::vector<ActionMenu> actions;

  std::size_t num_actions() const { return actions.size(); }
  const ConfigDist& dist(std::size_t action, std::size_t config) const {
    return actions[action].configs[config];
  }
};

struct Configuration {
  std::vector<std::size_t> choices;

  friend bool operator==(const Configuration&, const Configuration&) = default;
};

struct Violation {
  std::string path;
  std::string message;
};

/// Every invariant violation, each tagged with a path like "actions[0].configs[1].masses[2]".
std::vector<Violation> validate(const Instance& instance);

/// Throws InvalidInstance listing the violations, if any.
void require_valid(const Instance& instance);

/// Throws InvalidInstance unless `config` addresses an existing configuration of every action.
void require_configuration(const Instance& instance, const Configuration& config);

/// How the agent resolves equal finite agent utilities across actions.
enum class TieRule {
  kPrincipalFavoring,  // larger principal utility, then lower action index
  kStrict,             // cross-action ties are an error
};

/// One atom of the joint law of (u^A, u^P) of the agent's chosen action.
struct OutcomeAtom {
  double agent_utility;
  double principal_utility;
  std::size_t action;
  Rational probability;
};

/// The law of the max over the chosen configurations. Atoms are in the agent's
/// preference order (worst first); `none_probability` is the mass on "every action NEG_INF".
struct MaxDistribution {
  std::vector<OutcomeAtom> atoms;
  Rational none_probability;
};

MaxDistribution max_distribution(const Instance& instance, const Configuration& config,
                                 TieRule rule = TieRule::kPrincipalFavoring);

/// Expected principal utility with principal utilities read as exact binary rationals.
Rational evaluate_exact_rational(const Instance& instance, const Configuration& config,
                                 TieRule rule = TieRule::kPrincipalFavoring);

double evaluate_exact(const Instance& instance, const Configuration& config,
                      TieRule rule = TieRule::kPrincipalFavoring);

struct MonteCarloEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

MonteCarloEstimate evaluate_monte_carlo(const Instance& instance, const Configuration& config,
                                        std::uint64_t samples, std::uint64_t seed,
                                        TieRule rule = TieRule::kPrincipalFavoring);

struct BruteForceResult {
  Configuration config;
  double value = 0.0;
  Rational exact_value;
  std::uint64_t evaluated = 0;
};

inline constexpr std::uint64_t kDefaultBruteForceCap = 1'000'000;

/// Exhaustive maximizer; ties go to the lexicographically smallest choice vector.
BruteForceResult brute_force_opt(const Instance& instance,
                                 std::uint64_t cap = kDefaultBruteForceCap,
                                 TieRule rule = TieRule::kPrincipalFavoring);

/// Number of configuration vectors, saturating at UINT64_MAX.
std::uint64_t configuration_count(const Instance& instance);

}  // namespace ucfg

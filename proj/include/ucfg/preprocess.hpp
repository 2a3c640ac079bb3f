#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "ucfg/core.hpp"

namespace ucfg {

struct PreprocessParams {
  int M = 2;
  std::optional<double> delta;  // nullopt selects choose_delta
};

/// Where each output mass came from: output masses of (action, config) keep the
/// configuration identity, and origin[action][config][k] is the input atom index
/// of output mass k.
struct PreprocessResult {
  Instance instance;
  double delta = 0.0;
  int M = 2;
  std::vector<std::vector<std::vector<std::size_t>>> origin;
};

/// Number of pieces an atom of probability p splits into at fineness M.
std::size_t piece_count(const Rational& p, int M);

/// Smallest gap between distinct finite agent utilities of the instance (1 if fewer than two).
double min_utility_gap(const Instance& instance);

/// gap / (2 * atom_count).
double delta_for(double min_gap, std::size_t atom_count);

double choose_delta(const Instance& instance, int M);

PreprocessResult preprocess(const Instance& instance, const PreprocessParams& params);

/// Empty when every mass is at most 1/M^2 and finite agent utilities are pairwise
/// distinct across the whole instance; otherwise the first offending reason.
std::optional<std::string> preprocessing_defect(const Instance& instance, int M);

/// Throws NotPreprocessed when preprocessing_defect reports something.
void require_preprocessed(const Instance& instance, int M);

}  // namespace ucfg

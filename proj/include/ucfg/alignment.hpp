#pragma once

#include <functional>
#include <vector>

#include "ucfg/core.hpp"

namespace ucfg {

/// f(q) of the alignment inequality, evaluated on (0, 1].
using AlignmentFn = std::function<double(double)>;

struct AlignmentPoint {
  double U = 0.0;
  Rational q;         // Pr[u^A <= U]
  double cond = 0.0;  // E[u^P | u^A <= U]
  double ratio = 0.0; // cond / E[u^P]
};

struct AlignmentProfile {
  std::vector<AlignmentPoint> points;
  double base = 0.0;
};

struct AlignmentVerdict {
  bool holds = true;
  double q = 0.0;
  double ratio = 0.0;
  double f = 0.0;  // f at the worst point
};

inline constexpr double kAlignmentTolerance = 1e-9;

AlignmentProfile alignment_profile(const Instance& instance, const Configuration& config,
                                   TieRule rule = TieRule::kPrincipalFavoring);

/// Worst point is the one maximizing ratio / f(q).
AlignmentVerdict check_alignment(const AlignmentProfile& profile, const AlignmentFn& f);

bool local_alignment_check(const Instance& instance, const AlignmentFn& f);

/// r_1..r_M (element j-1 is f(j/M)).
std::vector<double> alignment_coefficients(const AlignmentFn& f, int M);

double approx_ratio(int M, const std::vector<double>& r);

/// Smallest non-increasing step function dominating the ratios of the given profiles.
AlignmentFn empirical_alignment(const std::vector<AlignmentProfile>& profiles);

AlignmentFn constant_alignment(double c);
/// 4 / sqrt(q).
AlignmentFn sqrt_alignment();
/// max(4 c, 4 / sqrt(q)), the global bound implied by local c-alignment.
AlignmentFn local_to_global_alignment(double c = 1.0);

}  // namespace ucfg

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ucfg/core.hpp"

namespace ucfg {

struct SchemeParams {
  int M = 6;
  std::optional<std::uint64_t> profile_cap;  // bound on profiles handed to the DP
  bool parallel = false;
  unsigned threads = 0;  // 0 picks the hardware concurrency when parallel
};

/// Boundaries u_1 <= ... <= u_{M-1}. Bin 1 is (-inf, u_1], bin j is (u_{j-1}, u_j],
/// bin M is (u_{M-1}, +inf). NEG_INF belongs to no bin.
struct BinProfile {
  std::vector<double> boundaries;

  int M() const { return static_cast<int>(boundaries.size()) + 1; }
  friend bool operator==(const BinProfile&, const BinProfile&) = default;
};

/// Per-(action configuration, profile) statistics; vectors are indexed by j - 1.
struct BucketStats {
  std::vector<Rational> q_raw;
  std::vector<std::int64_t> k;
  double psi = 0.0;
  Rational psi_exact;
};

struct ConstraintBounds {
  Rational lower;
  std::optional<Rational> upper;  // nullopt is +infinity
};

/// Bounds on an increment total K_j, already scaled by M^2 n and rounded inward.
struct IncrementBounds {
  std::int64_t lower = 0;
  std::optional<std::int64_t> upper;
};

struct DpSolution {
  Configuration config;
  double objective = 0.0;
  std::vector<std::int64_t> increments;  // K_1..K_M
};

/// c_j for j = 6..M (element 0 is c_6).
std::vector<double> weights(int M);
Rational weight_exact(int j, int M);

/// 1-based bin of agent utility u; 0 for NEG_INF.
int bin_index(double u, const BinProfile& bins);

enum class FinenessCheck {
  kFull,          // masses at most 1/M^2 and distinct finite agent utilities
  kDistinctOnly,  // only distinct finite agent utilities (strict ties are still rejected)
};

/// Quantile boundaries of the max agent utility under `config`. The cumulative bin
/// bounds [j/M, j/M + 1/M^2] need the full check.
BinProfile bins_from_configuration(const Instance& instance, const Configuration& config, int M,
                                   FinenessCheck check = FinenessCheck::kFull);

BucketStats bucket_stats(const ConfigDist& dist, const BinProfile& bins, int M, int n);

ConstraintBounds constraint_bounds(int j, int M);
IncrementBounds increment_bounds(int j, int M, int n);

/// True when K_1..K_M all respect their increment bounds.
bool increments_feasible(const std::vector<std::int64_t>& K, int M, int n);

double approx_objective(const std::vector<BucketStats>& stats);

/// stats[i][l] for action i, configuration l.
using StatsTable = std::vector<std::vector<BucketStats>>;

StatsTable stats_table(const Instance& instance, const BinProfile& bins, int M);

std::optional<DpSolution> dp_solve_table(const StatsTable& table, int M);

std::optional<DpSolution> dp_solve(const Instance& instance, const BinProfile& bins,
                                   const SchemeParams& params);

/// Sorted distinct finite agent utilities across every atom of the instance.
std::vector<double> distinct_finite_utilities(const Instance& instance);

/// C(S + M - 2, M - 1).
BigInt profile_count(std::size_t S, int M);

/// Streams every non-decreasing boundary sequence in lexicographic order.
class ProfileEnumerator {
 public:
  ProfileEnumerator(const Instance& instance, int M, FinenessCheck check = FinenessCheck::kFull);

  bool next(BinProfile& out);
  const std::vector<double>& utilities() const { return utilities_; }
  BigInt total() const { return profile_count(utilities_.size(), M_); }

 private:
  std::vector<double> utilities_;
  std::vector<std::size_t> index_;
  int M_;
  bool started_ = false;
  bool done_ = false;
};

std::vector<BinProfile> enumerate_bin_profiles(const Instance& instance, int M,
                                               FinenessCheck check = FinenessCheck::kFull);

struct SchemeDiagnostics {
  std::string mode;  // "exhaustive" or "capped"
  std::uint64_t profiles_enumerated = 0;
  std::uint64_t profiles_feasible = 0;
  std::uint64_t prefixes_pruned = 0;
  bool cap_reached = false;
  BigInt profiles_total;
  std::optional<BinProfile> best_profile;
  std::optional<double> best_objective;
  double best_value = 0.0;
  bool fallback_used = false;
  double delta = 0.0;
};

struct PtasResult {
  Configuration config;
  double value = 0.0;
  SchemeDiagnostics diagnostics;
};

/// Preprocesses with M, then runs search_profiles.
PtasResult run_ptas(const Instance& instance, const SchemeParams& params);

/// The profile loop on an instance that is already preprocessed for params.M. Accepts
/// any M >= 2 (for M < 6 the objective is identically zero and only feasibility matters).
PtasResult search_profiles(const Instance& preprocessed, const SchemeParams& params);

}  // namespace ucfg

#include "ucfg/scheme.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <mutex>
#include <thread>

#include "ucfg/errors.hpp"
#include "ucfg/preprocess.hpp"

namespace ucfg {

namespace {

void require_scheme_M(int M) {
  if (M < 6) throw MTooSmall("the scheme needs M >= 6, got " + std::to_string(M));
}

void require_profile(const BinProfile& bins, int M) {
  if (bins.M() != M) {
    throw BadSpec("profile has " + std::to_string(bins.boundaries.size()) + " boundaries, expected " +
                  std::to_string(M - 1));
  }
  for (std::size_t k = 0; k < bins.boundaries.size(); ++k) {
    if (!std::isfinite(bins.boundaries[k])) throw BadSpec("profile boundaries must be finite");
    if (k && bins.boundaries[k] < bins.boundaries[k - 1]) throw BadSpec("profile boundaries must be non-decreasing");
  }
}

std::int64_t scale(int M, int n) { return static_cast<std::int64_t>(M) * M * n; }

std::int64_t rounded_increment(const Rational& q, int M, int n) {
  return floor_to_int(q * Rational(scale(M, n)));
}

}  // namespace

std::vector<double> weights(int M) {
  require_scheme_M(M);
  std::vector<double> out;
  for (int j = 6; j <= M; ++j) out.push_back(static_cast<double>(j - 5) / static_cast<double>(M - 1));
  return out;
}

Rational weight_exact(int j, int M) {
  if (j < 6) return 0;
  return Rational(j - 5, M - 1);
}

int bin_index(double u, const BinProfile& bins) {
  if (is_neg_inf(u)) return 0;
  auto it = std::lower_bound(bins.boundaries.begin(), bins.boundaries.end(), u);
  return static_cast<int>(it - bins.boundaries.begin()) + 1;
}

BinProfile bins_from_configuration(const Instance& instance, const Configuration& config, int M,
                                   FinenessCheck check) {
  require_valid(instance);
  require_preprocessed(instance, check == FinenessCheck::kFull ? M : 1);
  auto dist = max_distribution(instance, config, TieRule::kStrict);
  BinProfile out;
  Rational cum = dist.none_probability;
  std::size_t next = 0;
  for (int j = 1; j <= M - 1; ++j) {
    Rational target(j, M);
    if (out.boundaries.empty() && cum >= target) {
      throw DegenerateQuantile("the " + std::to_string(j) + "/" + std::to_string(M) +
                               " quantile of the max agent utility is -inf");
    }
    while (cum < target) {
      if (next >= dist.atoms.size()) throw InvariantBreach("max distribution does not sum to 1");
      cum += dist.atoms[next].probability;
      ++next;
    }
    if (next == 0) {
      throw DegenerateQuantile("the " + std::to_string(j) + "/" + std::to_string(M) +
                               " quantile of the max agent utility is -inf");
    }
    out.boundaries.push_back(dist.atoms[next - 1].agent_utility);
  }
  return out;
}

BucketStats bucket_stats(const ConfigDist& dist, const BinProfile& bins, int M, int n) {
  require_profile(bins, M);
  std::vector<Rational> mass(M), weight(M);
  // NEG_INF lies in no bin but below every boundary, so it counts toward B_{<=j}.
  Rational below = 0;
  for (const auto& pm : dist.masses) {
    int b = bin_index(pm.agent_utility, bins);
    if (b == 0) {
      below += pm.probability;
      continue;
    }
    mass[b - 1] += pm.probability;
    if (pm.principal_utility != 0) weight[b - 1] += pm.probability * rational_from_double(pm.principal_utility);
  }
  BucketStats out;
  out.q_raw.resize(M);
  out.k.resize(M);
  for (int j = 1; j <= M; ++j) {
    below += mass[j - 1];
    if (below != 0) {
      out.q_raw[j - 1] = mass[j - 1] / below;
      if (j >= 6) out.psi_exact += weight_exact(j, M) * weight[j - 1] / below;
    }
    out.k[j - 1] = rounded_increment(out.q_raw[j - 1], M, n);
  }
  out.psi = to_double(out.psi_exact);
  return out;
}

ConstraintBounds constraint_bounds(int j, int M) {
  if (j < 1 || j > M) throw BadSpec("bin index out of range");
  ConstraintBounds out;
  out.lower = Rational(M - 1, static_cast<long>(M) * j) - Rational(1, static_cast<long>(M) * M);
  if (j >= 2) out.upper = Rational(M + 1, static_cast<long>(M) * (j - 1));
  return out;
}

IncrementBounds increment_bounds(int j, int M, int n) {
  auto b = constraint_bounds(j, M);
  Rational s(scale(M, n));
  IncrementBounds out;
  out.lower = std::max<std::int64_t>(0, ceil_to_int(b.lower * s));
  if (b.upper) out.upper = floor_to_int(*b.upper * s);
  return out;
}

bool increments_feasible(const std::vector<std::int64_t>& K, int M, int n) {
  if (static_cast<int>(K.size()) != M) return false;
  for (int j = 1; j <= M; ++j) {
    auto b = increment_bounds(j, M, n);
    if (K[j - 1] < b.lower) return false;
    if (b.upper && K[j - 1] > *b.upper) return false;
  }
  return true;
}

double approx_objective(const std::vector<BucketStats>& stats) {
  Rational total = 0;
  for (const auto& s : stats) total += s.psi_exact;
  return to_double(total);
}

StatsTable stats_table(const Instance& instance, const BinProfile& bins, int M) {
  StatsTable table(instance.num_actions());
  const int n = static_cast<int>(instance.num_actions());
  for (std::size_t i = 0; i < instance.num_actions(); ++i)
    for (const auto& dist : instance.actions[i].configs) table[i].push_back(bucket_stats(dist, bins, M, n));
  return table;
}

std::optional<DpSolution> dp_solve_table(const StatsTable& table, int M) {
  const std::size_t n = table.size();
  if (n == 0) return std::nullopt;
  const int ni = static_cast<int>(n);

  std::vector<std::int64_t> lo(M);
  std::vector<std::optional<std::int64_t>> hi(M);
  for (int j = 1; j <= M; ++j) {
    auto b = increment_bounds(j, M, ni);
    lo[j - 1] = b.lower;
    hi[j - 1] = b.upper;
  }
  // suffix[i][j]: the most actions i..n-1 can still add to K_j.
  std::vector<std::vector<std::int64_t>> suffix(n + 1, std::vector<std::int64_t>(M, 0));
  for (std::size_t i = n; i-- > 0;) {
    for (int j = 0; j < M; ++j) {
      std::int64_t best = 0;
      for (const auto& s : table[i]) best = std::max(best, s.k[j]);
      suffix[i][j] = suffix[i + 1][j] + best;
    }
  }

  struct Node {
    std::vector<std::int64_t> K;
    double objective;
    std::ptrdiff_t parent;
    std::size_t choice;
  };
  std::vector<std::vector<Node>> layers(n + 1);
  layers[0].push_back({std::vector<std::int64_t>(M, 0), 0.0, -1, 0});

  auto prefix = [&](std::size_t layer, std::size_t idx) {
    std::vector<std::size_t> out(layer);
    for (std::size_t l = layer; l > 0; --l) {
      const Node& node = layers[l][idx];
      out[l - 1] = node.choice;
      idx = static_cast<std::size_t>(node.parent);
    }
    return out;
  };

  for (std::size_t i = 0; i < n; ++i) {
    std::map<std::vector<std::int64_t>, std::size_t> index;
    auto& next = layers[i + 1];
    for (std::size_t a = 0; a < layers[i].size(); ++a) {
      for (std::size_t l = 0; l < table[i].size(); ++l) {
        const auto& st = table[i][l];
        std::vector<std::int64_t> K = layers[i][a].K;
        bool alive = true;
        for (int j = 0; j < M && alive; ++j) {
          K[j] += st.k[j];
          if (hi[j]) {
            if (K[j] > *hi[j]) alive = false;
          } else {
            K[j] = std::min(K[j], lo[j]);
          }
          if (K[j] + suffix[i + 1][j] < lo[j]) alive = false;
        }
        if (!alive) continue;
        double objective = layers[i][a].objective + st.psi;
        auto [it, inserted] = index.try_emplace(K, next.size());
        if (inserted) {
          next.push_back({std::move(K), objective, static_cast<std::ptrdiff_t>(a), l});
          continue;
        }
        Node& cur = next[it->second];
        bool better = objective > cur.objective;
        if (!better && objective == cur.objective) {
          auto mine = prefix(i, a);
          mine.push_back(l);
          better = mine < prefix(i + 1, it->second);
        }
        if (better) {
          cur.objective = objective;
          cur.parent = static_cast<std::ptrdiff_t>(a);
          cur.choice = l;
        }
      }
    }
    if (next.empty()) return std::nullopt;
  }

  std::optional<std::size_t> best;
  std::vector<std::size_t> best_prefix;
  for (std::size_t a = 0; a < layers[n].size(); ++a) {
    const Node& node = layers[n][a];
    bool ok = true;
    for (int j = 0; j < M && ok; ++j) ok = node.K[j] >= lo[j];
    if (!ok) continue;
    if (!best || node.objective > layers[n][*best].objective) {
      best = a;
      best_prefix = prefix(n, a);
    } else if (node.objective == layers[n][*best].objective) {
      auto mine = prefix(n, a);
      if (mine < best_prefix) {
        best = a;
        best_prefix = std::move(mine);
      }
    }
  }
  if (!best) return std::nullopt;

  DpSolution out;
  out.config.choices = best_prefix;
  out.objective = layers[n][*best].objective;
  out.increments.assign(M, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (int j = 0; j < M; ++j) out.increments[j] += table[i][best_prefix[i]].k[j];
  return out;
}

std::optional<DpSolution> dp_solve(const Instance& instance, const BinProfile& bins,
                                   const SchemeParams& params) {
  require_scheme_M(params.M);
  require_valid(instance);
  require_preprocessed(instance, params.M);
  require_profile(bins, params.M);
  return dp_solve_table(stats_table(instance, bins, params.M), params.M);
}

std::vector<double> distinct_finite_utilities(const Instance& instance) {
  std::vector<double> us;
  for (const auto& menu : instance.actions)
    for (const auto& dist : menu.configs)
      for (const auto& pm : dist.masses)
        if (!is_neg_inf(pm.agent_utility)) us.push_back(pm.agent_utility);
  std::sort(us.begin(), us.end());
  us.erase(std::unique(us.begin(), us.end()), us.end());
  return us;
}

BigInt profile_count(std::size_t S, int M) {
  if (S == 0) return 0;
  BigInt out;
  mpz_bin_uiui(out.get_mpz_t(), S + static_cast<std::size_t>(M) - 2, static_cast<unsigned long>(M - 1));
  return out;
}

ProfileEnumerator::ProfileEnumerator(const Instance& instance, int M, FinenessCheck check) : M_(M) {
  if (M < 2) throw MTooSmall("profiles need M >= 2");
  require_valid(instance);
  require_preprocessed(instance, check == FinenessCheck::kFull ? M : 1);
  utilities_ = distinct_finite_utilities(instance);
  index_.assign(static_cast<std::size_t>(M - 1), 0);
  done_ = utilities_.empty();
}

bool ProfileEnumerator::next(BinProfile& out) {
  if (done_) return false;
  if (started_) {
    const std::size_t S = utilities_.size();
    std::size_t k = index_.size();
    while (k > 0 && index_[k - 1] == S - 1) --k;
    if (k == 0) {
      done_ = true;
      return false;
    }
    std::size_t v = index_[k - 1] + 1;
    for (std::size_t t = k - 1; t < index_.size(); ++t) index_[t] = v;
  }
  started_ = true;
  out.boundaries.resize(index_.size());
  for (std::size_t t = 0; t < index_.size(); ++t) out.boundaries[t] = utilities_[index_[t]];
  return true;
}

std::vector<BinProfile> enumerate_bin_profiles(const Instance& instance, int M, FinenessCheck check) {
  ProfileEnumerator e(instance, M, check);
  std::vector<BinProfile> out;
  BinProfile p;
  while (e.next(p)) out.push_back(p);
  return out;
}

namespace {

// Per-(action, config) cumulative tables over the global utility grid.
struct PairTable {
  std::size_t action;
  std::vector<Rational> F;  // Pr[u <= U[s]], NEG_INF included
  std::vector<Rational> W;  // E[u^P ; u <= U[s]]
  Rational F_total, W_total;
  Rational F_neg;  // Pr[u = NEG_INF]
  // F scaled to integers by a common denominator, when it fits in 64 bits.
  bool exact = false;
  std::vector<std::int64_t> A;
  std::int64_t A_total = 0;
  std::int64_t A_neg = 0;
};

struct SearchOutcome {
  std::uint64_t enumerated = 0, feasible = 0, pruned = 0;
  bool cap_reached = false;
  bool have = false;
  Rational value;
  std::vector<std::size_t> profile;  // boundary indices
  double objective = 0.0;
  Configuration config;
};

class ProfileSearch {
 public:
  ProfileSearch(const Instance& pre, int M, const std::vector<double>& U,
                const std::vector<PairTable>& pairs, const std::vector<std::vector<std::size_t>>& pair_of)
      : pre_(pre), M_(M), n_(static_cast<int>(pre.num_actions())), U_(U), pairs_(pairs), pair_of_(pair_of) {
    k_.assign(M + 1, std::vector<std::int64_t>(pairs.size(), 0));
    for (int j = 1; j <= M; ++j) bounds_.push_back(increment_bounds(j, M, n_));
    idx_.assign(M - 1, 0);
    scale_ = Rational(scale(M, n_));
    scale_int_ = scale(M, n_);
  }

  // Explores every profile whose first boundary index is in `firsts`.
  SearchOutcome run(const std::vector<std::size_t>& firsts, std::optional<std::uint64_t> cap) {
    out_ = SearchOutcome{};
    cap_ = cap;
    for (std::size_t s : firsts) {
      if (stop_) break;
      descend(1, s);  // bin 1 has no upper bound, so this never cuts the loop
    }
    return out_;
  }

 private:
  // k_j and the psi term of pair p for bin (lower, upper] in grid indices; lower
  // is nullopt for bin 1 and upper is nullopt for the open top bin.
  void fill_bin(int j, std::size_t p, std::optional<std::size_t> lower, std::optional<std::size_t> upper) {
    const auto& t = pairs_[p];
    std::int64_t k = 0;
    if (t.exact) {
      __int128 hi = upper ? t.A[*upper] : t.A_total;
      __int128 lo = lower ? t.A[*lower] : t.A_neg;
      if (hi != 0) k = static_cast<std::int64_t>(scale_int_ * (hi - lo) / hi);
    } else {
      const Rational& hi = upper ? t.F[*upper] : t.F_total;
      if (hi != 0) k = floor_to_int(Rational(hi - (lower ? t.F[*lower] : t.F_neg)) / hi * scale_);
    }
    k_[j][p] = k;
  }

  // Contribution of bin j to psi of pair p; only needed once a leaf is reached.
  Rational psi_term(int j, std::size_t p) const {
    const auto& t = pairs_[p];
    std::optional<std::size_t> lower, upper;
    if (j > 1) lower = idx_[j - 2];
    if (j < M_) upper = idx_[j - 1];
    const Rational& hi_F = upper ? t.F[*upper] : t.F_total;
    if (hi_F == 0) return 0;
    const Rational& hi_W = upper ? t.W[*upper] : t.W_total;
    Rational w = lower ? Rational(hi_W - t.W[*lower]) : hi_W;
    if (w == 0) return 0;
    return weight_exact(j, M_) * w / hi_F;
  }

  void compute_level(int j) {
    for (std::size_t p = 0; p < pairs_.size(); ++p) {
      std::optional<std::size_t> lower;
      if (j > 1) lower = idx_[j - 2];
      fill_bin(j, p, lower, idx_[j - 1]);
    }
  }

  void compute_top() {
    for (std::size_t p = 0; p < pairs_.size(); ++p) fill_bin(M_, p, idx_[M_ - 2], std::nullopt);
  }

  // Every choice overshoots the upper bound of bin j. Increments only grow with the
  // bin's upper boundary, so larger boundaries overshoot too.
  bool bin_overshoots(int j) const {
    const auto& b = bounds_[j - 1];
    if (!b.upper) return false;
    std::int64_t least = 0;
    for (const auto& options : pair_of_) {
      std::int64_t m = std::numeric_limits<std::int64_t>::max();
      for (std::size_t p : options) m = std::min(m, k_[j][p]);
      least += m;
    }
    return least > *b.upper;
  }

  // Whether some choice of one configuration per action lands K_j inside its bounds.
  bool bin_reachable(int j) {
    const auto& b = bounds_[j - 1];
    std::int64_t cap = b.upper ? *b.upper : b.lower;
    reach_.assign(static_cast<std::size_t>(cap) + 1, 0);
    reach_[0] = 1;
    for (const auto& options : pair_of_) {
      next_.assign(reach_.size(), 0);
      for (std::int64_t v = 0; v <= cap; ++v) {
        if (!reach_[v]) continue;
        for (std::size_t p : options) {
          std::int64_t w = v + k_[j][p];
          if (b.upper) {
            if (w > cap) continue;
          } else {
            w = std::min(w, cap);
          }
          next_[w] = 1;
        }
      }
      reach_.swap(next_);
    }
    for (std::int64_t v = b.lower; v <= cap; ++v)
      if (reach_[v]) return true;
    return false;
  }

  // Returns false when this and every larger boundary at level j is hopeless.
  bool descend(int j, std::size_t s) {
    idx_[j - 1] = s;
    compute_level(j);
    if (bin_overshoots(j)) {
      ++out_.pruned;
      return false;
    }
    if (!bin_reachable(j)) {
      ++out_.pruned;
      return true;
    }
    if (j == M_ - 1) {
      compute_top();
      // The top bin only loses mass as its lower boundary rises.
      if (most(M_) < bounds_[M_ - 1].lower) {
        ++out_.pruned;
        return false;
      }
      if (!bin_reachable(M_)) {
        ++out_.pruned;
        return true;
      }
      leaf();
      return true;
    }
    for (std::size_t t = first_reaching(j + 1, s); t < U_.size() && !stop_; ++t)
      if (!descend(j + 1, t)) break;
    return true;
  }

  // Largest achievable K_j under the current k_[j].
  std::int64_t most(int j) const {
    std::int64_t total = 0;
    for (const auto& options : pair_of_) {
      std::int64_t m = 0;
      for (std::size_t p : options) m = std::max(m, k_[j][p]);
      total += m;
    }
    return total;
  }

  // Smallest boundary index t >= from at level j whose largest achievable K_j meets
  // the lower bound; increments grow with t, so binary search applies.
  std::size_t first_reaching(int j, std::size_t from) {
    std::size_t lo = from, hi = U_.size();
    while (lo < hi) {
      std::size_t mid = lo + (hi - lo) / 2;
      idx_[j - 1] = mid;
      compute_level(j);
      if (most(j) >= bounds_[j - 1].lower) {
        hi = mid;
      } else {
        lo = mid + 1;
      }
    }
    out_.pruned += lo - from;
    return lo;
  }

  void leaf() {
    if (cap_ && out_.enumerated >= *cap_) {
      out_.cap_reached = true;
      stop_ = true;
      return;
    }
    ++out_.enumerated;
    StatsTable table(pair_of_.size());
    for (std::size_t i = 0; i < pair_of_.size(); ++i) {
      for (std::size_t p : pair_of_[i]) {
        BucketStats st;
        st.k.resize(M_);
        st.psi_exact = 0;
        for (int j = 1; j <= M_; ++j) {
          st.k[j - 1] = k_[j][p];
          if (j >= 6) st.psi_exact += psi_term(j, p);
        }
        st.psi = to_double(st.psi_exact);
        table[i].push_back(std::move(st));
      }
    }
    auto sol = dp_solve_table(table, M_);
    if (!sol) return;
    ++out_.feasible;
    auto it = cache_.find(sol->config.choices);
    if (it == cache_.end()) {
      it = cache_.emplace(sol->config.choices, evaluate_exact_rational(pre_, sol->config)).first;
    }
    if (!out_.have || it->second > out_.value) {
      out_.have = true;
      out_.value = it->second;
      out_.profile = idx_;
      out_.objective = sol->objective;
      out_.config = sol->config;
    }
  }

  const Instance& pre_;
  int M_, n_;
  const std::vector<double>& U_;
  const std::vector<PairTable>& pairs_;
  const std::vector<std::vector<std::size_t>>& pair_of_;
  std::vector<IncrementBounds> bounds_;
  std::vector<std::vector<std::int64_t>> k_;
  std::vector<char> reach_, next_;
  std::vector<std::size_t> idx_;
  Rational scale_;
  __int128 scale_int_ = 0;
  std::map<std::vector<std::size_t>, Rational> cache_;
  std::optional<std::uint64_t> cap_;
  bool stop_ = false;
  SearchOutcome out_;
};

}  // namespace

PtasResult run_ptas(const Instance& instance, const SchemeParams& params) {
  require_valid(instance);
  require_scheme_M(params.M);
  auto pre = preprocess(instance, PreprocessParams{params.M, std::nullopt});
  auto result = search_profiles(pre.instance, params);
  result.diagnostics.delta = pre.delta;
  return result;
}

PtasResult search_profiles(const Instance& inst, const SchemeParams& params) {
  const int M = params.M;
  if (M < 2) throw MTooSmall("profiles need M >= 2");
  require_valid(inst);
  require_preprocessed(inst, M);
  const auto U = distinct_finite_utilities(inst);

  std::vector<PairTable> pairs;
  std::vector<std::vector<std::size_t>> pair_of(inst.num_actions());
  for (std::size_t i = 0; i < inst.num_actions(); ++i) {
    for (const auto& dist : inst.actions[i].configs) {
      PairTable t;
      t.action = i;
      std::vector<Rational> f(U.size()), w(U.size());
      for (const auto& pm : dist.masses) {
        if (is_neg_inf(pm.agent_utility)) {
          t.F_neg += pm.probability;
          continue;
        }
        auto s = static_cast<std::size_t>(std::lower_bound(U.begin(), U.end(), pm.agent_utility) - U.begin());
        f[s] += pm.probability;
        if (pm.principal_utility != 0) w[s] += pm.probability * rational_from_double(pm.principal_utility);
      }
      if (!U.empty()) f[0] += t.F_neg;
      for (std::size_t s = 1; s < U.size(); ++s) {
        f[s] += f[s - 1];
        w[s] += w[s - 1];
      }
      t.F_total = U.empty() ? t.F_neg : f.back();
      if (!U.empty()) t.W_total = w.back();
      BigInt den = 1;
      for (const auto& pm : dist.masses) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), pm.probability.get_den_mpz_t());
      if (mpz_sizeinbase(den.get_mpz_t(), 2) <= 60) {
        t.exact = true;
        for (const auto& x : f) t.A.push_back(BigInt(x * den).get_si());
        t.A_total = BigInt(t.F_total * den).get_si();
        t.A_neg = BigInt(t.F_neg * den).get_si();
      }
      t.F = std::move(f);
      t.W = std::move(w);
      pair_of[i].push_back(pairs.size());
      pairs.push_back(std::move(t));
    }
  }

  PtasResult result;
  auto& diag = result.diagnostics;
  diag.mode = params.profile_cap ? "capped" : "exhaustive";
  diag.profiles_total = profile_count(U.size(), M);

  SearchOutcome best;
  if (!U.empty()) {
    unsigned workers = 1;
    if (params.parallel && !params.profile_cap) {
      workers = params.threads ? params.threads : std::max(1u, std::thread::hardware_concurrency());
      workers = static_cast<unsigned>(std::min<std::size_t>(workers, U.size()));
    }
    std::vector<std::vector<std::size_t>> firsts(workers);
    for (std::size_t s = 0; s < U.size(); ++s) firsts[s % workers].push_back(s);
    std::vector<SearchOutcome> outcomes(workers);
    if (workers == 1) {
      ProfileSearch search(inst, M, U, pairs, pair_of);
      outcomes[0] = search.run(firsts[0], params.profile_cap);
    } else {
      std::vector<std::thread> pool;
      for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          ProfileSearch search(inst, M, U, pairs, pair_of);
          outcomes[w] = search.run(firsts[w], std::nullopt);
        });
      }
      for (auto& t : pool) t.join();
    }
    for (auto& o : outcomes) {
      diag.profiles_enumerated += o.enumerated;
      diag.profiles_feasible += o.feasible;
      diag.prefixes_pruned += o.pruned;
      diag.cap_reached = diag.cap_reached || o.cap_reached;
      if (!o.have) continue;
      if (!best.have || o.value > best.value || (o.value == best.value && o.profile < best.profile)) {
        best.have = true;
        best.value = o.value;
        best.profile = o.profile;
        best.objective = o.objective;
        best.config = o.config;
      }
    }
  }

  if (best.have) {
    result.config = best.config;
    result.value = to_double(best.value);
    BinProfile profile;
    for (std::size_t s : best.profile) profile.boundaries.push_back(U[s]);
    diag.best_profile = profile;
    diag.best_objective = best.objective;
  } else {
    // No profile admitted a feasible configuration: scan configurations that change
    // at most one action away from the first configuration of every action.
    diag.fallback_used = true;
    Configuration base{std::vector<std::size_t>(inst.num_actions(), 0)};
    Rational best_value = evaluate_exact_rational(inst, base);
    result.config = base;
    for (std::size_t i = 0; i < inst.num_actions(); ++i) {
      for (std::size_t l = 1; l < inst.actions[i].configs.size(); ++l) {
        Configuration c = base;
        c.choices[i] = l;
        Rational v = evaluate_exact_rational(inst, c);
        if (v > best_value) {
          best_value = v;
          result.config = c;
        }
      }
    }
    result.value = to_double(best_value);
  }
  diag.best_value = result.value;
  return result;
}

}  // namespace ucfg

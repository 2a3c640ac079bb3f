#include "ucfg/alignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "ucfg/errors.hpp"

namespace ucfg {

AlignmentProfile alignment_profile(const Instance& instance, const Configuration& config, TieRule rule) {
  auto dist = max_distribution(instance, config, rule);
  Rational base = 0;
  for (const auto& a : dist.atoms) base += a.probability * rational_from_double(a.principal_utility);
  if (base == 0) throw ZeroBaseUtility("expected principal utility is 0 under this configuration");

  AlignmentProfile out;
  out.base = to_double(base);
  Rational q = dist.none_probability;
  Rational mass = 0;
  for (std::size_t k = 0; k < dist.atoms.size(); ++k) {
    const auto& a = dist.atoms[k];
    q += a.probability;
    mass += a.probability * rational_from_double(a.principal_utility);
    bool last_of_level = k + 1 == dist.atoms.size() || dist.atoms[k + 1].agent_utility != a.agent_utility;
    if (!last_of_level) continue;
    Rational cond = mass / q;
    out.points.push_back({a.agent_utility, q, to_double(cond), to_double(cond / base)});
  }
  return out;
}

AlignmentVerdict check_alignment(const AlignmentProfile& profile, const AlignmentFn& f) {
  AlignmentVerdict out;
  double worst = -1.0;
  for (const auto& p : profile.points) {
    double qd = to_double(p.q);
    double fq = f(qd);
    if (p.ratio > fq * (1.0 + kAlignmentTolerance)) out.holds = false;
    double score = fq > 0 ? p.ratio / fq : std::numeric_limits<double>::infinity();
    if (score > worst) {
      worst = score;
      out.q = qd;
      out.ratio = p.ratio;
      out.f = fq;
    }
  }
  return out;
}

bool local_alignment_check(const Instance& instance, const AlignmentFn& f) {
  require_valid(instance);
  for (const auto& menu : instance.actions) {
    for (const auto& dist : menu.configs) {
      // Never-chosen atoms pay the principal nothing.
      std::map<double, std::pair<Rational, Rational>> levels;  // u -> (mass, principal mass)
      Rational neg_mass = 0, total = 0;
      for (const auto& pm : dist.masses) {
        if (is_neg_inf(pm.agent_utility)) {
          neg_mass += pm.probability;
          continue;
        }
        auto& slot = levels[pm.agent_utility];
        Rational w = pm.probability * rational_from_double(pm.principal_utility);
        slot.first += pm.probability;
        slot.second += w;
        total += w;
      }
      if (total == 0) continue;
      Rational q = neg_mass, acc = 0;
      for (const auto& [u, pw] : levels) {
        q += pw.first;
        acc += pw.second;
        double ratio = to_double(acc / q / total);
        if (ratio > f(to_double(q)) * (1.0 + kAlignmentTolerance)) return false;
      }
    }
  }
  return true;
}

std::vector<double> alignment_coefficients(const AlignmentFn& f, int M) {
  if (M < 1) throw MTooSmall("alignment coefficients need M >= 1");
  std::vector<double> r;
  for (int j = 1; j <= M; ++j) r.push_back(f(static_cast<double>(j) / M));
  return r;
}

double approx_ratio(int M, const std::vector<double>& r) {
  if (M < 6) throw MTooSmall("the approximation ratio needs M >= 6, got " + std::to_string(M));
  if (static_cast<int>(r.size()) < M) throw BadSpec("need at least M alignment coefficients");
  const double m1 = M - 1;
  double tail = 0.0;
  for (int j = 6; j <= M; ++j) tail += r[j - 1] / (j - 1);
  double inner = (M - 5) / m1 - (5.0 / 6.0) * r[4] / m1 - (5.0 / m1) * tail;
  return (m1 / (M + 1)) * inner;
}

AlignmentFn empirical_alignment(const std::vector<AlignmentProfile>& profiles) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& p : profiles)
    for (const auto& pt : p.points) pts.emplace_back(to_double(pt.q), pt.ratio);
  std::sort(pts.begin(), pts.end());
  // Suffix maxima: f(q) = max ratio over recorded q' >= q.
  std::vector<double> qs(pts.size()), env(pts.size());
  double run = 1.0;
  for (std::size_t k = pts.size(); k-- > 0;) {
    run = std::max(run, pts[k].second);
    qs[k] = pts[k].first;
    env[k] = run;
  }
  return [qs = std::move(qs), env = std::move(env)](double q) {
    auto it = std::lower_bound(qs.begin(), qs.end(), q);
    if (it == qs.end()) return 1.0;
    return env[static_cast<std::size_t>(it - qs.begin())];
  };
}

AlignmentFn constant_alignment(double c) {
  return [c](double) { return c; };
}

AlignmentFn sqrt_alignment() {
  return [](double q) { return 4.0 / std::sqrt(q); };
}

AlignmentFn local_to_global_alignment(double c) {
  return [c](double q) { return std::max(4.0 * c, 4.0 / std::sqrt(q)); };
}

}  // namespace ucfg

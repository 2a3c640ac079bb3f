#include "ucfg/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <iostream>
#include <sstream>

#include "ucfg/alignment.hpp"
#include "ucfg/errors.hpp"
#include "ucfg/generators.hpp"
#include "ucfg/json_io.hpp"
#include "ucfg/preprocess.hpp"
#include "ucfg/reductions.hpp"
#include "ucfg/scheme.hpp"

namespace ucfg {

namespace {

int exit_code_for(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::kValidation:
      return kExitValidation;
    case ErrorCategory::kCapability:
      return kExitCapability;
    case ErrorCategory::kInternal:
      return kExitInternal;
  }
  return kExitInternal;
}

std::vector<long> parse_int_list(const std::string& text, const char* what) {
  std::vector<long> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      long v = std::stol(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw BadSpec(std::string(what) + " must be a comma-separated list of integers");
    }
  }
  return out;
}

Configuration parse_configuration(const std::string& text, const Instance& instance) {
  Configuration c;
  for (long v : parse_int_list(text, "--config")) {
    if (v < 0) throw InvalidInstance("configuration indices must be nonnegative");
    c.choices.push_back(static_cast<std::size_t>(v));
  }
  require_configuration(instance, c);
  return c;
}

Instance load_instance(const std::string& path) {
  Instance inst = instance_from_json(read_json_file(path));
  require_valid(inst);
  return inst;
}

void emit(const Json& j, const std::string& out_path, std::ostream& out) {
  std::string text = j.dump(2) + "\n";
  if (out_path.empty()) {
    out << text;
  } else {
    write_text_file(out_path, text);
  }
}

// "2" or any number: constant; "sqrt": 4/sqrt(q); "local-global": max(4, 4/sqrt(q));
// otherwise a JSON file [{"q": .., "f": ..}, ...] read as a step function.
AlignmentFn parse_alignment_fn(const std::string& spec) {
  if (spec == "sqrt") return sqrt_alignment();
  if (spec == "local-global") return local_to_global_alignment(1.0);
  try {
    std::size_t used = 0;
    double c = std::stod(spec, &used);
    if (used == spec.size()) {
      if (!(c > 0)) throw BadSpec("constant alignment must be positive");
      return constant_alignment(c);
    }
  } catch (const std::invalid_argument&) {
  }
  Json j = read_json_file(spec);
  std::vector<std::pair<double, double>> steps;
  if (!j.is_array()) throw ParseError("alignment file must hold a list of {q, f}");
  for (const auto& p : j) {
    if (!p.is_object() || !p.contains("q") || !p.contains("f")) throw ParseError("alignment file entries need q and f");
    steps.emplace_back(p["q"].get<double>(), p["f"].get<double>());
  }
  if (steps.empty()) throw ParseError("alignment file is empty");
  std::sort(steps.begin(), steps.end());
  return [steps](double q) {
    for (const auto& [sq, f] : steps)
      if (sq >= q) return f;
    return steps.back().second;
  };
}

struct Options {
  std::string input, out, method = "ptas", config, from, f = "2", csv, kind = "generic-uc", c_list = "1,1",
                         sidecar;
  int M = 6, threads = 1, n = 2, m = 2, K = 2, D = 8, T = 4;
  std::uint64_t profile_cap = 0, brute_cap = kDefaultBruteForceCap, seed = 0;
  double lo = 0.0, hi = 4.0, umin = 0, umax = 0, eps = 0, delta = 0;
  bool reduce_image = false, counterpart = false;
};

int cmd_solve(const Options& o, std::ostream& out) {
  Instance inst = load_instance(o.input);
  auto start = std::chrono::steady_clock::now();
  Json report;
  if (o.method == "brute") {
    auto r = brute_force_opt(inst, o.brute_cap);
    report = {{"method", "brute"},
              {"value", r.value},
              {"configuration", configuration_to_json(r.config)},
              {"diagnostics", {{"configurations_evaluated", r.evaluated}, {"exact_value", to_string(r.exact_value)}}}};
  } else if (o.method == "ptas") {
    SchemeParams params;
    params.M = o.M;
    if (o.profile_cap) params.profile_cap = o.profile_cap;
    params.parallel = o.threads != 1;
    params.threads = static_cast<unsigned>(std::max(0, o.threads));
    auto r = run_ptas(inst, params);
    report = {{"method", "ptas"},
              {"value", r.value},
              {"configuration", configuration_to_json(r.config)},
              {"diagnostics", diagnostics_to_json(r.diagnostics)}};
  } else {
    throw BadSpec("--method must be ptas or brute");
  }
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
  report["wall_time_ms"] = ms.count();
  emit(report, o.out, out);
  return kExitOk;
}

int cmd_eval(const Options& o, std::ostream& out) {
  Instance inst = load_instance(o.input);
  Configuration c = parse_configuration(o.config, inst);
  Rational v = evaluate_exact_rational(inst, c);
  emit(Json{{"value", to_double(v)}, {"exact_value", to_string(v)}, {"configuration", configuration_to_json(c)}},
       o.out, out);
  return kExitOk;
}

int cmd_align(const Options& o, std::ostream& out, std::ostream& err) {
  Instance inst = load_instance(o.input);
  Configuration c;
  if (!o.config.empty()) {
    c = parse_configuration(o.config, inst);
  } else if (o.method == "brute") {
    c = brute_force_opt(inst, o.brute_cap).config;
  } else {
    throw BadSpec("align needs --config or --method brute");
  }
  auto profile = alignment_profile(inst, c);
  auto verdict = check_alignment(profile, parse_alignment_fn(o.f));
  std::ostringstream csv;
  csv.precision(17);
  csv << "U,q,cond,ratio\n";
  for (const auto& p : profile.points) csv << p.U << ',' << to_double(p.q) << ',' << p.cond << ',' << p.ratio << '\n';
  if (o.csv.empty()) {
    out << csv.str();
  } else {
    write_text_file(o.csv, csv.str());
  }
  Json v = {{"holds", verdict.holds},
            {"worst", {{"q", verdict.q}, {"ratio", verdict.ratio}, {"f", verdict.f}}},
            {"base", profile.base},
            {"configuration", configuration_to_json(c)}};
  if (o.csv.empty()) {
    err << v.dump() << "\n";
  } else {
    emit(v, o.out, out);
  }
  return kExitOk;
}

int cmd_reduce(const Options& o, std::ostream& out) {
  Json src = read_json_file(o.input);
  Instance image;
  if (o.from == "delegation") {
    auto d = delegation_from_json(src);
    image = d.outside_bias ? outside_option_transform(d) : delegation_to_uc(d);
  } else if (o.from == "pricing") {
    auto p = pricing_from_json(src);
    if (o.eps > 0 || o.umin > 0 || o.umax > 0) {
      for (auto& item : p.items) item.prices = PriceGridRequest{o.umin, o.umax, o.eps};
    }
    image = pricing_to_uc(p);
  } else if (o.from == "assortment") {
    image = assortment_to_uc(assortment_from_json(src));
  } else {
    throw BadSpec("--from must be delegation, pricing or assortment");
  }
  require_valid(image);
  emit(instance_to_json(image), o.out, out);
  return kExitOk;
}

int cmd_gen(const Options& o, std::ostream& out) {
  Json j;
  if (o.kind == "tightness") {
    auto d = tightness_instance(o.T);
    j = o.reduce_image ? instance_to_json(delegation_to_uc(d)) : delegation_to_json(d);
  } else if (o.kind == "partition") {
    auto g = partition_gadget(parse_int_list(o.c_list, "--c"),
                              o.delta > 0 ? std::optional<double>(o.delta) : std::nullopt);
    if (o.counterpart) {
      j = o.reduce_image ? instance_to_json(delegation_to_uc(g.delegation)) : delegation_to_json(g.delegation);
    } else {
      j = o.reduce_image ? instance_to_json(assortment_to_uc(g.assortment)) : assortment_to_json(g.assortment);
    }
  } else {
    RandomSpec spec;
    spec.n = o.n;
    spec.m = o.m;
    spec.K = o.K;
    spec.lo = o.lo;
    spec.hi = o.hi;
    spec.D = o.D;
    spec.family = parse_family(o.kind);
    spec.seed = o.seed;
    auto g = random_instance(spec);
    if (o.reduce_image || std::holds_alternative<Instance>(g)) {
      j = instance_to_json(to_uc(g));
    } else if (const auto* d = std::get_if<DelegationInstance>(&g)) {
      j = delegation_to_json(*d);
    } else if (const auto* p = std::get_if<PricingInstance>(&g)) {
      j = pricing_to_json(*p);
    } else {
      j = assortment_to_json(std::get<AssortmentInstance>(g));
    }
  }
  emit(j, o.out, out);
  return kExitOk;
}

int cmd_grid(const Options& o, std::ostream& out) {
  emit(Json(price_grid(o.umin, o.umax, o.eps)), o.out, out);
  return kExitOk;
}

int cmd_preprocess(const Options& o, std::ostream& out) {
  Instance inst = load_instance(o.input);
  PreprocessParams params{o.M, o.delta > 0 ? std::optional<double>(o.delta) : std::nullopt};
  auto r = preprocess(inst, params);
  emit(instance_to_json(r.instance), o.out, out);
  if (!o.sidecar.empty()) write_text_file(o.sidecar, provenance_to_json(r).dump(2) + "\n");
  return kExitOk;
}

int cmd_validate(const Options& o, std::ostream& out) {
  Instance inst = instance_from_json(read_json_file(o.input));
  auto v = validate(inst);
  emit(Json{{"valid", v.empty()}, {"violations", violations_to_json(v)}}, o.out, out);
  return v.empty() ? kExitOk : kExitValidation;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Solver for stochastic utility-configuration principal-agent problems"};
  app.require_subcommand(1);
  Options o;

  auto* solve = app.add_subcommand("solve", "Optimize a configuration (scheme or brute force)");
  solve->add_option("input", o.input, "Instance JSON")->required();
  solve->add_option("--method", o.method, "ptas or brute")->check(CLI::IsMember({"ptas", "brute"}));
  solve->add_option("--bins", o.M, "Bin count M (>= 6)");
  solve->add_option("--profile-cap", o.profile_cap, "Stop after this many profiles (0 = no cap)");
  solve->add_option("--threads", o.threads, "Workers for the profile loop (0 = all cores)");
  solve->add_option("--brute-cap", o.brute_cap, "Largest configuration count brute force accepts");
  solve->add_option("--out", o.out, "Write the report here instead of stdout");

  auto* eval = app.add_subcommand("eval", "Exact expected principal utility of a configuration");
  eval->add_option("input", o.input, "Instance JSON")->required();
  eval->add_option("--config", o.config, "Comma-separated configuration indices")->required();
  eval->add_option("--out", o.out, "Output path");

  auto* align = app.add_subcommand("align", "Alignment profile (CSV) and verdict");
  align->add_option("input", o.input, "Instance JSON")->required();
  align->add_option("--config", o.config, "Comma-separated configuration indices");
  align->add_option("--method", o.method, "brute: use the brute-force optimum");
  align->add_option("--f", o.f, "Constant, sqrt, local-global, or a JSON step-function file");
  align->add_option("--brute-cap", o.brute_cap, "Largest configuration count brute force accepts");
  align->add_option("--csv", o.csv, "Write the CSV here (the verdict then goes to stdout)");
  align->add_option("--out", o.out, "Verdict path when --csv is given");

  auto* reduce = app.add_subcommand("reduce", "Translate a source problem into an instance");
  reduce->add_option("--from", o.from, "delegation, pricing or assortment")->required();
  reduce->add_option("input", o.input, "Source-problem JSON")->required();
  reduce->add_option("--eps", o.eps, "Pricing: replace every price set by the grid for this eps");
  reduce->add_option("--umin", o.umin, "Pricing grid lower end");
  reduce->add_option("--umax", o.umax, "Pricing grid upper end");
  reduce->add_option("--out", o.out, "Output path");

  auto* gen = app.add_subcommand("gen", "Generate an instance");
  gen->add_option("--kind", o.kind,
                  "generic-uc, delegation, delegation-random-bias, delegation-outside, pricing, assortment, "
                  "tightness or partition");
  gen->add_option("--seed", o.seed, "Random seed");
  gen->add_option("--n", o.n, "Actions or items");
  gen->add_option("--m", o.m, "Configurations (prices for pricing)");
  gen->add_option("--K", o.K, "Atoms per distribution");
  gen->add_option("--lo", o.lo, "Utility range lower end");
  gen->add_option("--hi", o.hi, "Utility range upper end");
  gen->add_option("--D", o.D, "Probabilities are multiples of 1/D");
  gen->add_option("--T", o.T, "Tightness parameter");
  gen->add_option("--c", o.c_list, "Partition integers, comma-separated");
  gen->add_option("--delta", o.delta, "Partition tie-break offset (0 = default)");
  gen->add_flag("--counterpart", o.counterpart, "Partition: emit the delegation counterpart");
  gen->add_flag("--reduce", o.reduce_image, "Emit the instance image instead of the source problem");
  gen->add_option("--out", o.out, "Output path");

  auto* grid = app.add_subcommand("grid", "Discretized price set");
  grid->add_option("--umin", o.umin, "Smallest value")->required();
  grid->add_option("--umax", o.umax, "Largest value")->required();
  grid->add_option("--eps", o.eps, "Accuracy in (0, 1/2)")->required();
  grid->add_option("--out", o.out, "Output path");

  auto* prep = app.add_subcommand("preprocess", "Split and perturb point masses");
  prep->add_option("input", o.input, "Instance JSON")->required();
  prep->add_option("--bins", o.M, "Fineness M (>= 2)");
  prep->add_option("--delta", o.delta, "Perturbation (0 = automatic)");
  prep->add_option("--sidecar", o.sidecar, "Write delta and piece provenance here");
  prep->add_option("--out", o.out, "Output path");

  auto* val = app.add_subcommand("validate", "List instance invariant violations");
  val->add_option("input", o.input, "Instance JSON")->required();
  val->add_option("--out", o.out, "Output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*solve) return cmd_solve(o, out);
    if (*eval) return cmd_eval(o, out);
    if (*align) return cmd_align(o, out, err);
    if (*reduce) return cmd_reduce(o, out);
    if (*gen) return cmd_gen(o, out);
    if (*grid) return cmd_grid(o, out);
    if (*prep) return cmd_preprocess(o, out);
    if (*val) return cmd_validate(o, out);
  } catch (const InvalidInstance& e) {
    Json j = {{"error", e.code()}, {"message", e.what()}};
    if (!o.input.empty()) {
      try {
        j["violations"] = violations_to_json(validate(instance_from_json(read_json_file(o.input))));
      } catch (const Error&) {
      }
    }
    err << j.dump() << "\n";
    return exit_code_for(e.category());
  } catch (const Error& e) {
    err << Json{{"error", e.code()}, {"message", e.what()}}.dump() << "\n";
    return exit_code_for(e.category());
  } catch (const std::exception& e) {
    err << Json{{"error", "Internal"}, {"message", e.what()}}.dump() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.push_back("ucfg");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace ucfg

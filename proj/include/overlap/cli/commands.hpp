#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "overlap/io/json.hpp"
#include "overlap/io/text.hpp"
#include "overlap/lab/expectations.hpp"
#include "overlap/lab/identities.hpp"
#include "overlap/operators.hpp"
#include "overlap/theorem.hpp"

namespace overlap::cli {

/// Bad flags, bad config values, or inputs that fail validation.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum ExitCode : int { exit_ok = 0, exit_violation = 1, exit_usage = 2 };

enum class Command { expand, verify, counts, estimate, identity, baseline };

inline const char* command_name(Command c) {
  switch (c) {
    case Command::expand: return "expand";
    case Command::verify: return "verify";
    case Command::counts: return "counts";
    case Command::estimate: return "estimate";
    case Command::identity: return "identity";
    case Command::baseline: return "baseline";
  }
  return "?";
}

struct RunConfig {
  Command command = Command::expand;
  std::string graph = "{1,2}";
  std::string word;
  int n = 1;
  int max_n = 3;
  std::string model = "sk";
  std::size_t N = 3;
  std::string lattice = "4";
  bool open = false;
  double beta = 0.5;
  std::size_t samples = 10000;
  std::uint64_t seed = 1;
  std::string lambda_grid;  // empty: the default for the derivative order
  double lambda = 0.0;
  std::string method = "mc";
  std::size_t nodes = 64;
  std::size_t threads = 0;  // 0: OVERLAP_THREADS or hardware concurrency
  bool antithetic = false;
  std::size_t budget = 24;
  bool json = false;
  std::string out;
  std::string csv;
  std::string config;
};

/// Parses "a,b,c" as a list of doubles.
inline std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (item.empty() || end != item.c_str() + item.size())
      throw UsageError("'" + item + "' is not a number in list '" + text + "'");
    out.push_back(v);
  }
  if (out.empty()) throw UsageError("empty number list");
  return out;
}

/// "4" or "3x3" or "2x2x3".
inline std::vector<std::size_t> parse_lattice(const std::string& text) {
  std::vector<std::size_t> dims;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, 'x')) {
    if (item.empty() || item.find_first_not_of("0123456789") != std::string::npos)
      throw UsageError("bad lattice '" + text + "' (expected L or LxL...)");
    dims.push_back(static_cast<std::size_t>(std::stoul(item)));
  }
  if (dims.empty()) throw UsageError("bad lattice '" + text + "'");
  return dims;
}

inline lab::ModelInstance build_model(const RunConfig& c) {
  if (c.model == "sk") return lab::ModelInstance::sk(c.N, c.beta);
  if (c.model == "ea") return lab::ModelInstance::ea(parse_lattice(c.lattice), c.beta, !c.open);
  throw UsageError("unknown model '" + c.model + "' (expected sk or ea)");
}

inline lab::Integrator build_integrator(const RunConfig& c) {
  if (c.method == "mc") {
    lab::SamplingOptions o;
    o.samples = c.samples;
    o.seed = c.seed;
    o.workers = c.threads ? c.threads : lab::default_workers();
    o.antithetic = c.antithetic;
    if (o.samples < (o.antithetic ? 4u : 2u)) throw UsageError("--samples is too small");
    if (o.antithetic && o.samples % 2) throw UsageError("--antithetic needs an even --samples");
    return o;
  }
  if (c.method == "quadrature") {
    lab::QuadratureOptions q;
    q.nodes = c.nodes;
    if (q.nodes == 0) throw UsageError("--nodes must be positive");
    return q;
  }
  throw UsageError("unknown method '" + c.method + "' (expected mc or quadrature)");
}

namespace detail {

enum Group : unsigned {
  g_graph = 1u << 0,
  g_word = 1u << 1,
  g_n = 1u << 2,
  g_model = 1u << 3,
  g_sampling = 1u << 4,
  g_grid = 1u << 5,
  g_lambda = 1u << 6,
  g_csv = 1u << 7,
};

inline unsigned groups_of(Command c) {
  switch (c) {
    case Command::expand: return g_graph | g_word;
    case Command::verify:
    case Command::counts: return g_graph | g_n;
    case Command::estimate: return g_graph | g_word | g_model | g_sampling | g_grid | g_lambda | g_csv;
    case Command::identity: return g_graph | g_n | g_model | g_sampling | g_grid | g_lambda | g_csv;
    case Command::baseline: return g_model | g_sampling;
  }
  return 0;
}

using Json = io::Json;

struct Binding {
  std::string key;
  CLI::Option* option = nullptr;
  std::function<void(const Json&)> from_config;
};

template <class T>
std::function<void(const Json&)> setter(T& target, const std::string& key) {
  return [&target, key](const Json& v) {
    try {
      target = v.get<T>();
    } catch (const nlohmann::json::exception&) {
      throw UsageError("config key '" + key + "' has the wrong type");
    }
  };
}

inline std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

inline void write_csv(const std::string& path,
                      const std::vector<std::pair<double, lab::QuenchedEstimate>>& curve) {
  std::ofstream f(path);
  if (!f) throw UsageError("cannot open '" + path + "' for writing");
  f << "lambda,mean,stderr,truncation_bound\n";
  char buf[128];
  for (const auto& [l, e] : curve) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", l, e.mean, e.std_error,
                  e.truncation_bound);
    f << buf;
  }
}

inline std::vector<double> curve_nodes(std::span<const double> grid) {
  const auto pos = lab::positive_nodes(grid);
  std::vector<double> nodes;
  for (auto it = pos.rbegin(); it != pos.rend(); ++it) nodes.push_back(-*it);
  nodes.push_back(0.0);
  nodes.insert(nodes.end(), pos.begin(), pos.end());
  return nodes;
}

inline std::string estimate_text(const lab::QuenchedEstimate& e) {
  std::string s = num(e.mean);
  if (e.method == lab::Method::monte_carlo)
    s += " +- " + num(e.std_error) + " (mc, samples=" + std::to_string(e.samples) +
         ", seed=" + std::to_string(e.seed) + ")";
  else
    s += " (quadrature, nodes=" + std::to_string(e.samples) +
         ", truncation=" + num(e.truncation_bound) + ")";
  return s;
}

inline std::string report_text(const lab::IdentityReport& r) {
  std::string s = r.identity + " on " + r.model + " [" + lab::method_name(r.method) +
                  ", samples=" + std::to_string(r.samples);
  if (r.method == lab::Method::monte_carlo) s += ", seed=" + std::to_string(r.seed);
  s += "]\n";
  for (const auto& row : r.rows)
    s += std::string(row.passed ? "PASS " : "FAIL ") + row.label + ": lhs=" + num(row.lhs) +
         " rhs=" + num(row.rhs) + " diff=" + num(row.difference) +
         " stderr=" + num(row.combined_stderr) + " tol=" + num(row.tolerance) + "\n";
  return s;
}

struct Outcome {
  std::string text;
  Json payload;
  int code = exit_ok;
};

inline Json run_info(const RunConfig& c, const lab::ModelInstance& model) {
  Json j;
  j["model"] = model.describe();
  j["method"] = c.method;
  if (c.method == "mc") {
    j["samples"] = c.samples;
    j["seed"] = c.seed;
    j["antithetic"] = c.antithetic;
  } else {
    j["nodes"] = c.nodes;
  }
  return j;
}

inline Outcome do_expand(const RunConfig& c) {
  const auto word = OperatorWord::parse(c.word);
  const auto p = io::parse_polynomial(c.graph);
  const auto r = apply_word(word, p);
  Outcome o;
  o.text = io::format_polynomial(r) + "\n";
  o.payload = {{"kind", "expansion"},
               {"input", c.graph},
               {"operator_word", word.to_string()},
               {"result_polynomial", io::polynomial_to_json(r)},
               {"result_text", io::format_polynomial(r)}};
  return o;
}

inline TheoremLimits limits_of(const RunConfig& c) {
  TheoremLimits l;
  l.max_n = c.max_n;
  return l;
}

inline Outcome do_verify(const RunConfig& c) {
  const auto g = io::parse_monomial(c.graph);
  const auto r = theorem_verify(g, c.n, limits_of(c));
  Outcome o;
  const std::string k = std::to_string(2 * c.n);
  o.text = "C d^" + k + " " + io::format_monomial(g) + " = " + std::to_string(2 * c.n - 1) +
           "!! D^" + std::to_string(c.n) + " " + io::format_monomial(g) + ": " +
           (r.equal ? "equal" : "NOT equal") + "\n";
  o.text += "lhs = " + io::format_polynomial(r.lhs) + "\n";
  o.text += "rhs = " + io::format_polynomial(r.rhs) + "\n";
  o.text += "raw terms: lhs " + std::to_string(r.counts.raw_lhs) + ", rhs " +
            std::to_string(r.counts.raw_rhs) + "; canonical terms: lhs " +
            std::to_string(r.counts.canonical_lhs) + ", rhs " +
            std::to_string(r.counts.canonical_rhs) + "\n";
  o.payload = io::to_json(r);
  o.code = r.equal ? exit_ok : exit_violation;
  return o;
}

inline Outcome do_counts(const RunConfig& c) {
  const auto g = io::parse_monomial(c.graph);
  const auto counts = term_count_report(g, c.n, limits_of(c));
  Outcome o;
  o.text = "raw lhs " + std::to_string(counts.raw_lhs) + "\nraw rhs " +
           std::to_string(counts.raw_rhs) + "\nemitted lhs " +
           std::to_string(counts.emitted_lhs) + "\nemitted rhs " +
           std::to_string(counts.emitted_rhs) + "\ncanonical lhs " +
           std::to_string(counts.canonical_lhs) + "\ncanonical rhs " +
           std::to_string(counts.canonical_rhs) + "\n";
  o.payload = {{"kind", "counts"},
               {"input", io::format_monomial(g)},
               {"n", c.n},
               {"counts", io::to_json(counts)}};
  return o;
}

inline Outcome do_estimate(const RunConfig& c) {
  const auto model = build_model(c);
  const auto how = build_integrator(c);
  const auto word = OperatorWord::parse(c.word);
  const auto p = apply_word(word, io::parse_polynomial(c.graph));
  if (!p.leg_free()) throw UsageError("estimate needs a leg-free polynomial after the word");
  const lab::ReplicaBudget budget{c.budget};
  lab::check_replica_budget(model, p.max_vertex_count(), budget);
  std::vector<double> grid;
  if (!c.csv.empty())
    grid = curve_nodes(c.lambda_grid.empty() ? lab::DeformationConfig{}.lambda_grid
                                             : parse_number_list(c.lambda_grid));
  const auto e = c.lambda == 0.0 ? lab::quenched_expectation(model, p, how, budget)
                                 : lab::deformed_expectation(model, p, c.lambda, how, budget);
  if (!c.csv.empty()) write_csv(c.csv, lab::lambda_curve(model, p, grid, how, budget));
  Outcome o;
  o.text = (c.lambda == 0.0 ? std::string("E(") : "E_" + num(c.lambda) + "(") +
           io::format_polynomial(p) + ") = " + estimate_text(e) + "\n";
  o.payload = {{"kind", "estimate_run"},
               {"input", c.graph},
               {"operator_word", word.to_string()},
               {"result_polynomial", io::polynomial_to_json(p)},
               {"lambda", c.lambda},
               {"run", run_info(c, model)},
               {"estimate", io::to_json(e)}};
  return o;
}

inline Outcome do_identity(const RunConfig& c) {
  const auto model = build_model(c);
  const auto how = build_integrator(c);
  const auto g = io::parse_monomial(c.graph);
  lab::IdentityOptions opt;
  opt.budget = lab::ReplicaBudget{c.budget};
  if (c.lambda != 0.0) opt.lambda0 = c.lambda;
  if (!c.lambda_grid.empty()) {
    lab::DeformationConfig d;
    d.lambda_grid = parse_number_list(c.lambda_grid);
    d.fd_order = 2 * c.n;
    lab::richardson_stencil(d.fd_order, d.lambda_grid);  // validates the grid
    opt.deformation = d;
  }
  const auto report = lab::identity_check(model, g, c.n, how, opt);
  if (!c.csv.empty())
    write_csv(c.csv, lab::lambda_curve(model, GraphPolynomial(g), curve_nodes(report.lambda_grid),
                                       how, opt.budget));
  Outcome o;
  o.text = report_text(report);
  o.payload = {{"kind", "identity_run"},
               {"input", io::format_monomial(g)},
               {"n", c.n},
               {"run", run_info(c, model)},
               {"report", io::to_json(report)}};
  o.code = report.passed() ? exit_ok : exit_violation;
  return o;
}

inline Outcome do_baseline(const RunConfig& c) {
  const auto model = build_model(c);
  const auto how = build_integrator(c);
  const auto report = lab::wick_baseline_check(model, how, lab::ReplicaBudget{c.budget});
  Outcome o;
  o.text = report_text(report);
  o.payload = {{"kind", "baseline_run"}, {"run", run_info(c, model)},
               {"report", io::to_json(report)}};
  o.code = report.passed() ? exit_ok : exit_violation;
  return o;
}

inline void apply_config_file(const std::string& path, const std::vector<Binding>& bindings) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot read config file '" + path + "'");
  Json j;
  try {
    j = Json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw UsageError("config file must hold a JSON object");
  for (const auto& [key, value] : j.items()) {
    const auto it = std::find_if(bindings.begin(), bindings.end(),
                                 [&](const Binding& b) { return b.key == key; });
    if (it == bindings.end())
      throw UsageError("config key '" + key + "' does not apply to this command");
    if (it->option->count() == 0) it->from_config(value);  // flags win
  }
}

}  // namespace detail

/// Runs the command-line interface; returns the process exit code.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  using namespace detail;
  RunConfig cfg;
  CLI::App app("Overlap-monomial algebra and quenched-measure checks", "overlap");
  app.require_subcommand(1);
  std::map<CLI::App*, std::pair<Command, std::vector<Binding>>> subs;

  auto add = [&](Command cmd, const std::string& help) {
    CLI::App* s = app.add_subcommand(command_name(cmd), help);
    std::vector<Binding> b;
    const unsigned groups = groups_of(cmd);
    auto opt = [&](const std::string& key, auto& target, const std::string& desc) {
      b.push_back({key, s->add_option("--" + key, target, desc), setter(target, key)});
    };
    auto flag = [&](const std::string& key, bool& target, const std::string& desc) {
      b.push_back({key, s->add_flag("--" + key, target, desc), setter(target, key)});
    };
    if (groups & g_graph) opt("graph", cfg.graph, "monomial or polynomial, e.g. {1,2}^2{1,3}");
    if (groups & g_word) opt("word", cfg.word, "operator word: d (delta), C (contraction), D (Delta)");
    if (groups & g_n) {
      opt("n", cfg.n, "power n");
      opt("max-n", cfg.max_n, "refuse n above this bound");
    }
    if (groups & g_model) {
      opt("model", cfg.model, "sk or ea");
      opt("N", cfg.N, "SK spin count (2..5)");
      opt("lattice", cfg.lattice, "EA box, e.g. 4 or 3x3");
      flag("open", cfg.open, "EA with open boundaries");
      opt("beta", cfg.beta, "inverse temperature");
      opt("budget", cfg.budget, "replica budget as log2 of (2^N)^R");
    }
    if (groups & g_sampling) {
      opt("method", cfg.method, "mc or quadrature (SK N=2)");
      opt("samples", cfg.samples, "Monte Carlo disorder samples");
      opt("seed", cfg.seed, "Monte Carlo seed");
      opt("nodes", cfg.nodes, "Gauss-Hermite nodes per dimension");
      opt("threads", cfg.threads, "worker threads (default OVERLAP_THREADS or all cores)");
      flag("antithetic", cfg.antithetic, "pair samples with negated deformation field");
    }
    if (groups & g_grid) opt("lambda-grid", cfg.lambda_grid, "comma-separated symmetric lambda grid");
    if (groups & g_lambda) opt("lambda", cfg.lambda, "deformation strength (identity: first-order point)");
    if (groups & g_csv) opt("csv", cfg.csv, "write E_lambda over the grid as CSV");
    flag("json", cfg.json, "emit a JSON document");
    opt("out", cfg.out, "write output to a file");
    s->add_option("--config", cfg.config, "JSON file with default option values");
    subs[s] = {cmd, std::move(b)};
  };
  add(Command::expand, "apply an operator word to a polynomial");
  add(Command::verify, "check C d^{2n} g = (2n-1)!! D^n g exactly");
  add(Command::counts, "term counts for the theorem");
  add(Command::estimate, "quenched or deformed expectation of a polynomial");
  add(Command::identity, "derivative identity on a model");
  add(Command::baseline, "Gaussian baselines on a model");

  std::vector<const char*> argv{"overlap"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_usage;
  }

  try {
    CLI::App* chosen = app.get_subcommands().front();
    auto& [cmd, bindings] = subs.at(chosen);
    cfg.command = cmd;
    if (!cfg.config.empty()) apply_config_file(cfg.config, bindings);

    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    switch (cfg.command) {
      case Command::expand: o = do_expand(cfg); break;
      case Command::verify: o = do_verify(cfg); break;
      case Command::counts: o = do_counts(cfg); break;
      case Command::estimate: o = do_estimate(cfg); break;
      case Command::identity: o = do_identity(cfg); break;
      case Command::baseline: o = do_baseline(cfg); break;
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::string text = o.text;
    if (cfg.json) text = io::make_document(o.payload, {{"wall_seconds", seconds}}).dump(2) + "\n";
    if (cfg.out.empty()) {
      out << text;
    } else {
      std::ofstream f(cfg.out);
      if (!f) throw UsageError("cannot open '" + cfg.out + "' for writing");
      f << text;
    }
    return o.code;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  }
}

}  // namespace overlap::cli

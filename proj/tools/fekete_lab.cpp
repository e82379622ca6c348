// fekete_lab: batch experiments on subadditive functions.
//
// Exit codes: 0 success, 2 usage or config error, 3 violations found,
// 4 internal error.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fekete/counter_rng.hpp"
#include "fekete/errors.hpp"
#include "fekete/fekete_estimator.hpp"
#include "fekete/function_registry.hpp"
#include "fekete/io.hpp"
#include "fekete/levelset_bound.hpp"
#include "fekete/subadd_check.hpp"
#include "fekete/subshift_entropy.hpp"
#include "fekete/svg_plot.hpp"

#ifndef FEKETE_VERSION
#define FEKETE_VERSION "dev"
#endif

namespace {

using namespace fekete;
using json = nlohmann::json;

constexpr int kOk = 0;
constexpr int kUsage = 2;
constexpr int kViolations = 3;
constexpr int kInternal = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::string out = "fekete_out";
  std::uint64_t seed = 0;
  std::size_t threads = 0;
  bool no_timestamp = false;
  std::string config;
};

std::string version_string() { return std::string("fekete_lab ") + FEKETE_VERSION; }

std::string out_path(const Globals& g, const std::string& file) {
  return (std::filesystem::path(g.out) / file).string();
}

void emit(const Globals& g, const std::string& file, const std::string& content) {
  write_file_atomic(out_path(g, file), content);
  std::cout << "wrote " << out_path(g, file) << "\n";
}

json ext_json(ExtendedReal v) {
  if (!v.is_finite()) return to_string(v);
  return v.value();
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw UsageError("not a number: '" + item + "'");
    }
    if (used != item.size()) throw UsageError("not a number: '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw UsageError("empty list");
  return out;
}

std::string file_stem(const std::string& s) {
  std::string out;
  for (char c : s) out += std::isalnum(static_cast<unsigned char>(c)) || c == '_' ? c : '_';
  return out;
}

FunctionOracle resolve_oracle(const std::string& fn, const std::string& table) {
  if (!table.empty()) return load_tabulated(table);
  if (fn.empty()) throw UsageError("one of --fn or --table is required");
  return builtin(fn);
}

LinePlot base_plot(const Globals& g, std::string title, std::string x, std::string y) {
  LinePlot p;
  p.title = std::move(title);
  p.x_label = std::move(x);
  p.y_label = std::move(y);
  if (!g.no_timestamp) p.timestamp = utc_timestamp();
  return p;
}

// ---------------------------------------------------------------------- check

struct CheckArgs {
  std::string fn;
  std::string table;
  std::string mode = "componentwise";
  std::size_t samples = 10000;
  std::string sets;
  std::int64_t shift = 1;
};

int cmd_check(const Globals& g, const CheckArgs& a) {
  SampleBudget budget;
  budget.count = a.samples;
  budget.seed = g.seed;
  budget.threads = g.threads;
  ViolationReport report;
  std::string subject;
  if (a.mode == "set_union") {
    if (a.sets.empty()) throw UsageError("--mode set_union needs --sets FILE");
    const FiniteSetInput in = parse_finite_set_input(read_text_file(a.sets));
    report = check_set_union(in.g, in.sets);
    subject = in.g.name();
  } else {
    const FunctionOracle f = resolve_oracle(a.fn, a.table);
    subject = f.name();
    if (a.mode == "joint") {
      report = check_joint(f, budget);
    } else if (a.mode == "componentwise") {
      report = check_componentwise(f, budget);
    } else if (a.mode == "four_term") {
      report = check_four_term(f, budget);
    } else if (a.mode == "monoid") {
      report = check_monoid_sign(f, budget);
    } else if (a.mode == "shifted") {
      report = check_shifted_subadditivity(f, a.shift, budget);
      subject += "_shift" + std::to_string(a.shift);
    } else {
      throw UsageError("unknown --mode " + a.mode);
    }
  }
  const std::string stem = "check_" + file_stem(subject) + "_" + a.mode;
  json j{{"version", version_string()},
         {"subject", subject},
         {"mode", a.mode},
         {"seed", g.seed},
         {"samples", a.samples},
         {"checked", report.checked},
         {"violations", json::parse(report_to_json(report))}};
  if (a.mode == "shifted") j["shift"] = a.shift;
  emit(g, stem + ".json", j.dump(1) + "\n");
  emit(g, stem + ".csv", report_to_csv(report));
  std::cout << a.mode << ": " << report.checked << " instances, " << report.size()
            << " violations\n";
  for (std::size_t i = 0; i < report.size() && i < 5; ++i) {
    const auto& v = report.violations[i];
    std::string w;
    for (const auto& t : v.witness) {
      if (!w.empty()) w += " + ";
      w += to_string(DomainPoint(t));
    }
    std::cout << "  " << w << ": " << format_double(v.lhs) << " > " << format_double(v.rhs) << "\n";
  }
  return report.empty() ? kOk : kViolations;
}

// ---------------------------------------------------------------------- limit

struct LimitArgs {
  std::string fn;
  std::string table;
  double delta = 1e-2;
  int levels = 40;
  double growth = 2.0;
  std::string iterated;
  std::string orthant;
};

LinePlot bracket_plot(const Globals& g, const std::string& title, const LimitBracket& b) {
  LinePlot p = base_plot(g, title, "shell", "ratio");
  PlotSeries samples{"shell minimum", {}, "#1f77b4", true, false};
  std::map<int, double> shell_min;
  for (const auto& s : b.samples) {
    if (!s.ratio.is_finite()) continue;
    auto [it, fresh] = shell_min.emplace(s.shell, s.ratio.value());
    if (!fresh) it->second = std::min(it->second, s.ratio.value());
  }
  for (const auto& [k, v] : shell_min) samples.points.emplace_back(k, v);
  PlotSeries running{"running min", {}, "#d62728", false, true};
  for (std::size_t k = 0; k < b.running_best.size(); ++k) {
    if (b.running_best[k].is_finite()) running.points.emplace_back(static_cast<double>(k), b.running_best[k].value());
  }
  p.series = {samples, running};
  return p;
}

int cmd_limit(const Globals& g, const LimitArgs& a) {
  const FunctionOracle f = resolve_oracle(a.fn, a.table);
  EstimatorConfig cfg;
  cfg.delta = a.delta;
  if (!(a.delta > 0)) throw UsageError("--delta must be positive");
  if (a.levels < 1) throw UsageError("--levels must be >= 1");
  const std::size_t d = f.dim();
  const GridSchedule schedule(DomainPoint(std::vector<double>(d, 1.0)), a.growth, a.levels);
  const std::string stem = "limit_" + file_stem(f.name());

  if (!a.iterated.empty()) {
    std::vector<std::size_t> order;
    for (double v : parse_list(a.iterated)) {
      if (v < 1 || v > static_cast<double>(d) || v != std::floor(v)) {
        throw UsageError("--iterated takes a permutation of 1.." + std::to_string(d));
      }
      order.push_back(static_cast<std::size_t>(v) - 1);
    }
    const IteratedLimit it = iterated_limit(f, order, schedule, cfg);
    std::string order_text;
    json levels = json::array();
    for (std::size_t i = 0; i < order.size(); ++i) {
      order_text += (i ? "_" : "") + std::to_string(order[i] + 1);
      const auto& s = it.levels[i];
      json counts = json::object();
      for (const auto& [st, n] : s.counts) counts[to_string(st)] = n;
      levels.push_back({{"axis", s.axis + 1}, {"levels", s.levels}, {"worst", to_string(s.worst)},
                        {"counts", counts}});
    }
    json j{{"version", version_string()},
           {"function", f.name()},
           {"order", json::array()},
           {"value", ext_json(it.value)},
           {"status", to_string(it.status)},
           {"evaluations", it.evaluations},
           {"levels", levels}};
    for (auto o : order) j["order"].push_back(o + 1);
    emit(g, stem + "_iterated_" + order_text + ".json", j.dump(1) + "\n");
    std::cout << "iterated " << a.iterated << ": " << to_string(it.value) << " (" << to_string(it.status)
              << ")\n";
    return kOk;
  }

  if (!a.orthant.empty()) {
    const OrthantWord w = OrthantWord::parse(a.orthant);
    const OrthantBracket ob = orthant_limit(f, w, schedule, cfg);
    json j = json::parse(bracket_to_json(ob.reflected));
    j = json{{"version", version_string()},
             {"function", f.name()},
             {"orthant", w.to_string()},
             {"sense", ob.sense == LimitSense::inf ? "inf" : "sup"},
             {"bound", ext_json(ob.bound)},
             {"tail_estimate", ext_json(ob.tail_estimate)},
             {"status", to_string(ob.status)},
             {"reflected", j}};
    emit(g, stem + "_orthant_" + w.to_string() + ".json", j.dump(1) + "\n");
    std::cout << "orthant " << w.to_string() << ": bound " << to_string(ob.bound) << " ("
              << to_string(ob.status) << ")\n";
    return kOk;
  }

  const LimitBracket b = simultaneous_limit(f, schedule, cfg);
  json j = json::parse(bracket_to_json(b));
  j["version"] = version_string();
  j["function"] = f.name();
  if (f.metadata().known_limit) j["known_limit"] = ext_json(*f.metadata().known_limit);
  emit(g, stem + ".json", j.dump(1) + "\n");
  emit(g, stem + "_samples.csv", samples_to_csv(b));
  emit(g, stem + ".svg", render_svg(bracket_plot(g, f.name() + ": ratio by shell", b)));
  std::cout << "best_upper " << to_string(b.best_upper) << ", tail " << to_string(b.tail_estimate)
            << ", status " << to_string(b.status) << "\n";
  return kOk;
}

// -------------------------------------------------------------------- entropy

struct EntropyArgs {
  std::string sft = "golden_mean_1d";
  std::int64_t max_side = 8;
  std::size_t max_volume = 144;
  int alphabet = 2;
  std::size_t dim = 2;
};

int cmd_entropy(const Globals& g, const EntropyArgs& a) {
  const SftSpec sft = a.sft == "full_shift" ? full_shift(a.alphabet, a.dim) : load_sft(a.sft);
  CountCaps caps;
  caps.max_volume = a.max_volume;
  caps.threads = std::max<std::size_t>(1, g.threads);
  const EntropyBracket b = entropy_bounds(sft, a.max_side, caps);
  const std::string stem = "entropy_" + file_stem(std::filesystem::path(a.sft).stem().string());
  emit(g, stem + ".csv", entropy_rows_to_csv(b, sft.dim));
  json j{{"version", version_string()},
         {"sft", json::parse(serialize_sft(sft))},
         {"admissibility", to_string(b.admissibility)},
         {"best_upper", ext_json(b.best_upper)},
         {"exact_1d", b.exact_1d ? json(*b.exact_1d) : json(nullptr)},
         {"rows", b.rows.size()},
         {"truncated", b.truncated},
         {"truncation_reason", b.truncation_reason}};
  emit(g, stem + ".json", j.dump(1) + "\n");
  LinePlot p = base_plot(g, "log-count ratio by side", "n", "log_a(count) / n^d");
  PlotSeries ratio{"ratio", {}, "#1f77b4", true, false};
  PlotSeries running{"running min", {}, "#d62728", false, true};
  for (const auto& r : b.rows) {
    const double n = static_cast<double>(r.sides[0]);
    if (r.ratio.is_finite()) ratio.points.emplace_back(n, r.ratio.value());
    if (r.running_min.is_finite()) running.points.emplace_back(n, r.running_min.value());
  }
  p.series = {ratio, running};
  if (b.exact_1d && !b.rows.empty()) {
    p.series.push_back({"transfer-matrix entropy",
                        {{1.0, *b.exact_1d}, {static_cast<double>(b.rows.back().sides[0]), *b.exact_1d}},
                        "#2ca02c", false, true});
  }
  emit(g, stem + ".svg", render_svg(p));
  std::cout << "best_upper " << to_string(b.best_upper);
  if (b.exact_1d) std::cout << ", transfer-matrix entropy " << format_double(*b.exact_1d);
  if (b.truncated) std::cout << ", truncated: " << b.truncation_reason;
  std::cout << "\n";
  return kOk;
}

// ------------------------------------------------------------------- levelset

struct LevelsetArgs {
  std::string fn;
  std::string table;
  std::vector<std::string> anchors;
  std::size_t random_anchors = 0;
  std::string method = "grid";
  std::size_t cells = 2000;
  std::size_t mc_samples = 100000;
};

int cmd_levelset(const Globals& g, const LevelsetArgs& a) {
  const FunctionOracle f = resolve_oracle(a.fn, a.table);
  std::vector<DomainPoint> anchors;
  for (const auto& text : a.anchors) {
    const auto v = parse_list(text);
    if (v.size() != f.dim()) throw UsageError("anchor " + text + " has the wrong dimension");
    anchors.emplace_back(v);
  }
  const CounterRng rng(g.seed);
  for (std::size_t i = 0; i < a.random_anchors; ++i) {
    std::vector<double> t(f.dim());
    for (std::size_t k = 0; k < t.size(); ++k) t[k] = rng.uniform(0.5, 4.0, 7, i * f.dim() + k);
    anchors.emplace_back(t);
  }
  if (anchors.empty()) throw UsageError("give --anchors or --random-anchors");
  MeasureMethod m = a.method == "grid" ? MeasureMethod::grid(a.cells)
                    : a.method == "mc" ? MeasureMethod::monte_carlo(a.mc_samples, g.seed)
                                       : throw UsageError("--method is grid or mc");
  m.threads = std::max<std::size_t>(1, g.threads);
  const auto rows = check_levelset_lemma(f, anchors, m);
  emit(g, "levelset_" + file_stem(f.name()) + ".csv", levelset_rows_to_csv(rows));
  bool all = true;
  for (const auto& r : rows) {
    all = all && r.holds;
    std::cout << to_string(r.anchor) << ": margin " << format_double(r.margin) << " (error "
              << format_double(r.mu.error_bound) << ")" << (r.holds ? "" : " FAILS") << "\n";
  }
  return all ? kOk : kViolations;
}

// ------------------------------------------------------------ counterexamples

struct Replay {
  std::string name;
  bool reproduced = false;
  std::string detail;
  json data;
};

Replay replay_not_joint(const Globals& g) {
  Replay r{"sqrt_prod_componentwise_not_joint", false, "", json::object()};
  const FunctionOracle f = builtin("sqrt_prod");
  SampleBudget budget;
  budget.seed = g.seed;
  budget.threads = g.threads;
  const ViolationReport joint = check_joint(f, budget);
  const ViolationReport comp = check_componentwise(f, budget);
  const Violation* v = joint.find({{1, 2}, {2, 1}});
  const double expected = 3.0 - 2.0 * std::sqrt(2.0);
  r.reproduced = v != nullptr && std::abs(v->margin - expected) <= 1e-12 && comp.empty();
  r.detail = v ? "f(3,3)=" + format_double(v->lhs) + " > f(1,2)+f(2,1)=" + format_double(v->rhs) +
                     ", componentwise violations " + std::to_string(comp.size())
               : "witness (1,2)+(2,1) not reported";
  r.data = {{"joint_violations", joint.size()}, {"componentwise_violations", comp.size()},
            {"componentwise_checked", comp.checked}};
  if (v) r.data["margin"] = v->margin;
  return r;
}

Replay replay_rubin() {
  Replay r{"rubin_bounded_per_line_unbounded_on_box", false, "", json::object()};
  const RubinDemo demo = rubin_unboundedness_demo(1000);
  bool diagonal = true;
  for (std::size_t i = 0; i < demo.diagonal.size(); ++i) {
    diagonal = diagonal && demo.diagonal[i].value == static_cast<std::int64_t>(i + 1);
  }
  bool lines = !demo.lines.empty();
  json lj = json::array();
  for (const auto& l : demo.lines) {
    lines = lines && l.bounded;
    lj.push_back({{"fixed", std::to_string(l.fixed.num) + "/" + std::to_string(l.fixed.den)},
                  {"denominator", l.denominator},
                  {"max_along_line", l.max_along_line}});
  }
  r.reproduced = diagonal && lines;
  r.detail = "diagonal value n at n=1..1000: " + std::string(diagonal ? "yes" : "no") +
             ", all 20 lines bounded: " + (lines ? "yes" : "no");
  r.data = {{"diagonal_max", demo.diagonal.back().value}, {"lines", lj},
            {"line_grid_max_denominator", demo.line_grid_max_denominator}};
  return r;
}

Replay replay_iterated_orders() {
  Replay r{"x1sq_sqrt_x2_iterated_orders_disagree", false, "", json::object()};
  const FunctionOracle f = builtin("x1sq_sqrt_x2");
  const GridSchedule s = GridSchedule::standard(2);
  const IteratedLimit a = iterated_limit(f, {0, 1}, s);
  const IteratedLimit b = iterated_limit(f, {1, 0}, s);
  const EstimatorConfig cfg;
  r.reproduced = a.status == LimitStatus::converged && a.value.is_finite() &&
                 std::abs(a.value.value()) <= cfg.delta &&
                 b.status == LimitStatus::diverging_to_plus_infinity &&
                 b.value == ExtendedReal::plus_infinity();
  r.detail = "order (1,2): " + to_string(a.value) + " " + to_string(a.status) + ", order (2,1): " +
             to_string(b.value) + " " + to_string(b.status);
  r.data = {{"order_1_2", {{"value", ext_json(a.value)}, {"status", to_string(a.status)}}},
            {"order_2_1", {{"value", ext_json(b.value)}, {"status", to_string(b.status)}}}};
  return r;
}

Replay replay_set_extension(const Globals& g) {
  Replay r{"nmod2_set_extension_and_shift", false, "", json::object()};
  const FunctionOracle f = builtin("nmod2");
  const FiniteSetFunction gs = set_function_from(f);
  const IntSet U{1, 2}, V{2, 3};
  const ViolationReport unions = check_set_union(gs, {U, V});
  const Violation* uv = unions.find({{1, 2}, {2, 3}});
  SampleBudget budget;
  budget.seed = g.seed;
  budget.count = 1000;
  const ViolationReport s1 = check_shifted_subadditivity(f, 1, budget);
  const ViolationReport s0 = check_shifted_subadditivity(f, 0, budget);
  const Violation* h = s1.find({{1}, {1}});
  r.reproduced = uv && uv->lhs == 1.0 && uv->rhs == 0.0 && h && h->lhs == 1.0 && h->rhs == 0.0 && s0.empty();
  r.detail = std::string("g(U u V) > g(U)+g(V): ") + (uv ? format_double(uv->lhs) + " > " + format_double(uv->rhs) : "missing") +
             ", h(2) > 2h(1): " + (h ? format_double(h->lhs) + " > " + format_double(h->rhs) : "missing") +
             ", unshifted violations " + std::to_string(s0.size());
  r.data = {{"set_union_violations", unions.size()}, {"shift1_violations", s1.size()},
            {"shift0_violations", s0.size()}};
  return r;
}

int cmd_counterexamples(const Globals& g) {
  std::vector<Replay> replays{replay_not_joint(g), replay_rubin(), replay_iterated_orders(),
                              replay_set_extension(g)};
  std::size_t ok = 0;
  json j{{"version", version_string()}, {"seed", g.seed}, {"examples", json::array()}};
  std::string text;
  for (const auto& r : replays) {
    ok += r.reproduced;
    const std::string line = std::string(r.reproduced ? "PASS " : "FAIL ") + r.name + ": " + r.detail;
    text += line + "\n";
    std::cout << line << "\n";
    j["examples"].push_back({{"name", r.name}, {"reproduced", r.reproduced}, {"detail", r.detail}, {"data", r.data}});
  }
  const std::string summary = std::to_string(ok) + "/" + std::to_string(replays.size()) + " reproduced";
  text += summary + "\n";
  j["reproduced"] = ok;
  emit(g, "counterexamples.json", j.dump(1) + "\n");
  emit(g, "counterexamples.txt", text);
  std::cout << summary << "\n";
  return ok == replays.size() ? kOk : kInternal;
}

// --------------------------------------------------------------------- config

/// Rewrites argv so that values from a JSON --config file come first; the
/// options take their last value, so explicit flags win.
std::vector<std::string> expand_config(const std::vector<std::string>& args,
                                       const std::vector<std::string>& subcommands) {
  std::string path;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  json cfg;
  try {
    cfg = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw UsageError("config " + path + ": " + e.what());
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  if (!cfg.is_object()) throw UsageError("config " + path + " must be a JSON object");
  static const std::set<std::string> global_keys{"out", "seed", "threads", "no_timestamp"};
  std::vector<std::string> globals, locals;
  for (const auto& [key, value] : cfg.items()) {
    std::string flag = "--" + key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    auto& dst = global_keys.count(key) ? globals : locals;
    if (value.is_boolean()) {
      if (value.get<bool>()) dst.push_back(flag);
    } else if (value.is_array()) {
      for (const auto& v : value) {
        dst.push_back(flag);
        dst.push_back(v.is_string() ? v.get<std::string>() : v.dump());
      }
    } else {
      dst.push_back(flag);
      dst.push_back(value.is_string() ? value.get<std::string>() : value.dump());
    }
  }
  std::vector<std::string> out{args[0]};
  out.insert(out.end(), globals.begin(), globals.end());
  bool placed = false;
  for (std::size_t i = 1; i < args.size(); ++i) {
    out.push_back(args[i]);
    if (!placed && std::find(subcommands.begin(), subcommands.end(), args[i]) != subcommands.end()) {
      out.insert(out.end(), locals.begin(), locals.end());
      placed = true;
    }
  }
  return out;
}

int run(int argc, char** argv) {
  CLI::App app{"Experiments on subadditive functions of several variables", "fekete_lab"};
  app.set_version_flag("--version", version_string());
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  Globals g;
  app.add_option("--out", g.out, "Output directory");
  app.add_option("--seed", g.seed, "Seed for every random stream");
  app.add_option("--threads", g.threads, "Worker threads (default: FEKETE_LAB_THREADS or 1)");
  app.add_flag("--no-timestamp", g.no_timestamp, "Leave the timestamp out of SVG files");
  app.add_option("--config", g.config, "JSON file whose keys mirror the flags");

  CheckArgs ca;
  auto* check = app.add_subcommand("check", "Search for subadditivity violations");
  check->add_option("--fn", ca.fn, "Built-in function");
  check->add_option("--table", ca.table, "Tabulated function file");
  check->add_option("--mode", ca.mode, "joint, componentwise, four_term, monoid, shifted or set_union")
      ->capture_default_str();
  check->add_option("--samples", ca.samples, "Random samples")->capture_default_str();
  check->add_option("--sets", ca.sets, "Finite-set input file for set_union");
  check->add_option("--shift", ca.shift, "Shift for the shifted mode")->capture_default_str();

  LimitArgs la;
  auto* limit = app.add_subcommand("limit", "Estimate the limit of f(x)/(x_1...x_d)");
  limit->add_option("--fn", la.fn, "Built-in function");
  limit->add_option("--table", la.table, "Tabulated function file");
  limit->add_option("--delta", la.delta, "Convergence tolerance")->capture_default_str();
  limit->add_option("--levels", la.levels, "Schedule levels per axis")->capture_default_str();
  limit->add_option("--growth", la.growth, "Schedule growth factor")->capture_default_str();
  limit->add_option("--iterated", la.iterated, "Iterated limit order, e.g. 2,1 (outermost first)");
  limit->add_option("--orthant", la.orthant, "Orthant word, e.g. 10");

  EntropyArgs ea;
  auto* entropy = app.add_subcommand("entropy", "Entropy upper bounds for a subshift of finite type");
  entropy->add_option("--sft", ea.sft, "Fixture name or JSON file")->capture_default_str();
  entropy->add_option("--max-side", ea.max_side, "Largest box side")->capture_default_str();
  entropy->add_option("--max-volume", ea.max_volume, "Largest box volume")->capture_default_str();
  entropy->add_option("--alphabet", ea.alphabet, "Alphabet size for full_shift")->capture_default_str();
  entropy->add_option("--dim", ea.dim, "Dimension for full_shift")->capture_default_str();

  LevelsetArgs va;
  auto* levelset = app.add_subcommand("levelset", "Level-set measure margins");
  levelset->add_option("--fn", va.fn, "Built-in function");
  levelset->add_option("--table", va.table, "Tabulated function file");
  levelset->add_option("--anchors", va.anchors, "Anchor t as a comma list; repeatable")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  levelset->add_option("--random-anchors", va.random_anchors, "Seeded anchors in [0.5, 4]^d");
  levelset->add_option("--method", va.method, "grid or mc")->capture_default_str();
  levelset->add_option("--cells", va.cells, "Grid cells per axis")->capture_default_str();
  levelset->add_option("--mc-samples", va.mc_samples, "Monte Carlo samples")->capture_default_str();

  auto* counter = app.add_subcommand("counterexamples", "Replay the known counterexamples");

  std::vector<std::string> args(argv, argv + argc);
  args = expand_config(args, {"check", "limit", "entropy", "levelset", "counterexamples"});
  std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
  try {
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  if (g.threads == 0) {
    if (const char* env = std::getenv("FEKETE_LAB_THREADS")) {
      try {
        g.threads = std::stoul(env);
      } catch (const std::exception&) {
        throw UsageError(std::string("FEKETE_LAB_THREADS is not a number: ") + env);
      }
    }
    if (g.threads == 0) g.threads = 1;
  }

  if (check->parsed()) return cmd_check(g, ca);
  if (limit->parsed()) return cmd_limit(g, la);
  if (entropy->parsed()) return cmd_entropy(g, ea);
  if (levelset->parsed()) return cmd_levelset(g, va);
  if (counter->parsed()) return cmd_counterexamples(g);
  return kUsage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const fekete::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const fekete::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  } catch (...) {
    std::cerr << "internal error\n";
    return kInternal;
  }
}

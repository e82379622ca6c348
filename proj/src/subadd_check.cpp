#include "fekete/subadd_check.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <thread>
#include <tuple>

#include "fekete/counter_rng.hpp"
#include "json.hpp"

namespace fekete {

std::string to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::joint: return "joint";
    case ViolationKind::componentwise: return "componentwise";
    case ViolationKind::four_term: return "four_term";
    case ViolationKind::monoid: return "monoid";
    case ViolationKind::set_union: return "set_union";
  }
  return "unknown";
}

double violation_tolerance(double lhs, double rhs) {
  return 0x1p-26 * std::max({1.0, std::fabs(lhs), std::fabs(rhs)});
}

namespace {

bool violation_order(const Violation& a, const Violation& b) {
  return std::tie(a.kind, a.axis, a.witness, a.lhs, a.rhs) <
         std::tie(b.kind, b.axis, b.witness, b.lhs, b.rhs);
}

bool same_instance(const Violation& a, const Violation& b) {
  return a.kind == b.kind && a.axis == b.axis && a.witness == b.witness;
}

void normalize(std::vector<Violation>& v) {
  std::sort(v.begin(), v.end(), violation_order);
  v.erase(std::unique(v.begin(), v.end(), same_instance), v.end());
}

std::optional<Violation> make_violation(ViolationKind kind, std::optional<std::size_t> axis,
                                        std::vector<std::vector<double>> witness, ExtendedReal lhs,
                                        ExtendedReal rhs) {
  bool violated = false;
  if (lhs.is_finite() && rhs.is_finite()) {
    violated = lhs.value() - rhs.value() > violation_tolerance(lhs.value(), rhs.value());
  } else {
    violated = lhs > rhs;
  }
  if (!violated) return std::nullopt;
  const double l = lhs.to_double();
  const double r = rhs.to_double();
  const double margin = (lhs.is_finite() && rhs.is_finite()) ? l - r
                                                              : std::numeric_limits<double>::infinity();
  return Violation{kind, axis, std::move(witness), l, r, margin};
}

std::vector<double> as_vector(const DomainPoint& p) { return {p.coords().begin(), p.coords().end()}; }

/// How one scalar slot of a sample is drawn, probed and shrunk.
struct SlotSampler {
  enum class Mode { grid, integer, real };
  Mode mode = Mode::real;
  double lo = 0.1;
  double hi = 100.0;
  double target = 0.1;  // shrink target
  std::vector<double> grid;
  std::vector<double> probes;

  double draw(const CounterRng& rng, std::uint64_t stream, std::uint64_t index) const {
    switch (mode) {
      case Mode::grid:
        return grid[static_cast<std::size_t>(
            rng.integer(0, static_cast<std::int64_t>(grid.size()) - 1, stream, index))];
      case Mode::integer:
        return static_cast<double>(rng.integer(static_cast<std::int64_t>(lo),
                                               static_cast<std::int64_t>(hi), stream, index));
      case Mode::real: break;
    }
    return rng.uniform(lo, hi, stream, index);
  }

  std::optional<double> shrink_step(double c) const {
    double next = c;
    switch (mode) {
      case Mode::grid: {
        const auto it = std::lower_bound(grid.begin(), grid.end(), c);
        const auto idx = static_cast<std::size_t>(it - grid.begin());
        next = grid[idx / 2];
        break;
      }
      case Mode::integer:
        next = target + std::trunc((c - target) / 2);
        break;
      case Mode::real:
        next = target + (c - target) / 2;
        break;
    }
    if (next == c) return std::nullopt;
    return next;
  }
};

SlotSampler axis_sampler(const FunctionOracle& f, std::size_t axis, const SampleBudget& budget) {
  SlotSampler s;
  const Domain& dom = f.domain();
  if (f.grid()) {
    s.mode = SlotSampler::Mode::grid;
    s.grid = (*f.grid())[axis];
    s.target = s.grid.front();
    for (std::size_t k = 0; k < std::min<std::size_t>(3, s.grid.size()); ++k) {
      s.probes.push_back(s.grid[k]);
    }
    return s;
  }
  s.mode = dom.integer ? SlotSampler::Mode::integer : SlotSampler::Mode::real;
  const bool neg = dom.orthant && dom.orthant->negative(axis);
  const bool whole = !dom.orthant;
  if (whole) {
    s.lo = -100;
    s.hi = 100;
    s.probes = {-2, -1, 0, 1, 2};
  } else if (neg) {
    s.lo = dom.integer ? -100 : -100;
    s.hi = dom.integer ? -1 : -0.1;
    s.probes = {-3, -2, -1};
  } else {
    s.lo = dom.integer ? 1 : 0.1;
    s.hi = 100;
    s.probes = {1, 2, 3};
  }
  if (axis < budget.ranges.size()) {
    s.lo = budget.ranges[axis].lo;
    s.hi = budget.ranges[axis].hi;
    if (!(s.lo <= s.hi)) throw DomainError("sample range has lo > hi");
  }
  s.target = std::clamp(0.0, s.lo, s.hi);
  if (s.mode == SlotSampler::Mode::integer) {
    s.lo = std::ceil(s.lo);
    s.hi = std::floor(s.hi);
    s.target = std::clamp(std::round(s.target), s.lo, s.hi);
  }
  return s;
}

/// Result of testing one instance: skipped (out of domain), passed or violated.
struct Outcome {
  bool checked = false;
  std::optional<Violation> violation;
};

using InstanceFn = std::function<Outcome(const std::vector<double>&)>;

/// Lattice probes, then the random stream with optional shrinking.
ViolationReport run_check(const std::vector<SlotSampler>& slots, const InstanceFn& test,
                          const SampleBudget& budget, std::uint64_t salt) {
  ViolationReport report;
  const std::size_t n = slots.size();

  if (budget.lattice_probes) {
    std::size_t combos = 1;
    for (const auto& s : slots) combos *= std::max<std::size_t>(1, s.probes.size());
    if (combos <= 4096) {
      std::vector<std::size_t> idx(n, 0);
      std::vector<double> v(n);
      for (std::size_t c = 0; c < combos; ++c) {
        std::size_t rem = c;
        for (std::size_t k = n; k-- > 0;) {
          const auto m = slots[k].probes.size();
          v[k] = slots[k].probes[rem % m];
          rem /= m;
        }
        Outcome o = test(v);
        report.checked += o.checked;
        if (o.violation) report.violations.push_back(std::move(*o.violation));
      }
    }
  }

  const CounterRng rng(budget.seed);
  auto block = [&](std::size_t begin, std::size_t end) {
    ViolationReport part;
    std::vector<double> v(n);
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t k = 0; k < n; ++k) v[k] = slots[k].draw(rng, i, salt * 64 + k);
      Outcome o = test(v);
      part.checked += o.checked;
      if (!o.violation) continue;
      if (budget.shrink) {
        for (int round = 0; round < 64; ++round) {
          bool changed = false;
          for (std::size_t k = 0; k < n; ++k) {
            const auto next = slots[k].shrink_step(v[k]);
            if (!next) continue;
            const double keep = v[k];
            v[k] = *next;
            Outcome trial = test(v);
            if (trial.violation) {
              o = std::move(trial);
              changed = true;
            } else {
              v[k] = keep;
            }
          }
          if (!changed) break;
        }
      }
      part.violations.push_back(std::move(*o.violation));
    }
    return part;
  };

  const std::size_t threads = std::max<std::size_t>(1, std::min(budget.threads, budget.count));
  if (threads == 1) {
    report.merge(block(0, budget.count));
  } else {
    std::vector<ViolationReport> parts(threads);
    std::vector<std::thread> pool;
    const std::size_t chunk = (budget.count + threads - 1) / threads;
    for (std::size_t t = 0; t < threads; ++t) {
      const std::size_t b = std::min(budget.count, t * chunk);
      const std::size_t e = std::min(budget.count, b + chunk);
      pool.emplace_back([&, t, b, e] { parts[t] = block(b, e); });
    }
    for (auto& th : pool) th.join();
    for (auto& p : parts) report.merge(std::move(p));
  }
  normalize(report.violations);
  return report;
}

std::vector<SlotSampler> pair_slots(const FunctionOracle& f, const SampleBudget& budget) {
  std::vector<SlotSampler> slots;
  for (int rep = 0; rep < 2; ++rep) {
    for (std::size_t i = 0; i < f.dim(); ++i) slots.push_back(axis_sampler(f, i, budget));
  }
  return slots;
}

std::pair<DomainPoint, DomainPoint> split_pair(const std::vector<double>& v, std::size_t d) {
  return {DomainPoint(std::vector<double>(v.begin(), v.begin() + static_cast<long>(d))),
          DomainPoint(std::vector<double>(v.begin() + static_cast<long>(d), v.end()))};
}

Outcome joint_instance(const FunctionOracle& f, const DomainPoint& x, const DomainPoint& y) {
  const DomainPoint s = x + y;
  if (!f.accepts(x) || !f.accepts(y) || !f.accepts(s)) return {};
  return {true, make_violation(ViolationKind::joint, std::nullopt, {as_vector(x), as_vector(y)},
                               f(s), f(x) + f(y))};
}

Outcome four_term_instance(const FunctionOracle& f, const DomainPoint& x, const DomainPoint& y) {
  const std::size_t d = f.dim();
  const DomainPoint s = x + y;
  if (!f.accepts(x) || !f.accepts(y) || !f.accepts(s)) return {};
  ExtendedReal rhs = 0.0;
  std::vector<double> z(d);
  for (std::size_t w = 0; w < (std::size_t{1} << d); ++w) {
    for (std::size_t i = 0; i < d; ++i) z[i] = (w >> i) & 1U ? y[i] : x[i];
    const DomainPoint p(z);
    if (!f.accepts(p)) return {};
    rhs = rhs + f(p);
  }
  return {true, make_violation(ViolationKind::four_term, std::nullopt,
                               {as_vector(x), as_vector(y)}, f(s), rhs)};
}

}  // namespace

std::vector<Violation> ViolationReport::of_kind(ViolationKind kind,
                                                std::optional<std::size_t> axis) const {
  std::vector<Violation> out;
  for (const auto& v : violations) {
    if (v.kind == kind && (!axis || v.axis == axis)) out.push_back(v);
  }
  return out;
}

const Violation* ViolationReport::find(const std::vector<std::vector<double>>& witness) const {
  for (const auto& v : violations) {
    if (v.witness == witness) return &v;
  }
  return nullptr;
}

void ViolationReport::merge(ViolationReport other) {
  checked += other.checked;
  violations.insert(violations.end(), std::make_move_iterator(other.violations.begin()),
                    std::make_move_iterator(other.violations.end()));
  normalize(violations);
}

ViolationReport check_joint(const FunctionOracle& f, const SampleBudget& budget) {
  const std::size_t d = f.dim();
  return run_check(
      pair_slots(f, budget),
      [&](const std::vector<double>& v) {
        auto [x, y] = split_pair(v, d);
        return joint_instance(f, x, y);
      },
      budget, 1);
}

ViolationReport check_joint_pairs(const FunctionOracle& f,
                                  const std::vector<std::pair<DomainPoint, DomainPoint>>& pairs) {
  ViolationReport report;
  for (const auto& [x, y] : pairs) {
    Outcome o = joint_instance(f, x, y);
    report.checked += o.checked;
    if (o.violation) report.violations.push_back(std::move(*o.violation));
  }
  normalize(report.violations);
  return report;
}

ViolationReport check_componentwise(const FunctionOracle& f, const SampleBudget& budget) {
  const std::size_t d = f.dim();
  ViolationReport report;
  for (std::size_t axis = 0; axis < d; ++axis) {
    // slots: base point (d), then a and b on the tested axis
    std::vector<SlotSampler> slots;
    for (std::size_t i = 0; i < d; ++i) slots.push_back(axis_sampler(f, i, budget));
    slots.push_back(axis_sampler(f, axis, budget));
    slots.push_back(axis_sampler(f, axis, budget));
    if (d > 0) slots[axis].probes = {slots[axis].probes.front()};  // overwritten by a, b
    report.merge(run_check(
        slots,
        [&, axis](const std::vector<double>& v) -> Outcome {
          std::vector<double> base(v.begin(), v.begin() + static_cast<long>(d));
          const double a = v[d];
          const double b = v[d + 1];
          base[axis] = a;
          const DomainPoint pa(base);
          base[axis] = b;
          const DomainPoint pb(base);
          base[axis] = a + b;
          const DomainPoint ps(base);
          if (!f.accepts(pa) || !f.accepts(pb) || !f.accepts(ps)) return {};
          return {true, make_violation(ViolationKind::componentwise, axis,
                                       {as_vector(pa), as_vector(pb)}, f(ps), f(pa) + f(pb))};
        },
        budget, 2 + axis));
  }
  return report;
}

ViolationReport check_four_term(const FunctionOracle& f, const SampleBudget& budget) {
  const std::size_t d = f.dim();
  if (d > 16) throw DomainError("four-term check supports d <= 16");
  return run_check(
      pair_slots(f, budget),
      [&](const std::vector<double>& v) {
        auto [x, y] = split_pair(v, d);
        return four_term_instance(f, x, y);
      },
      budget, 40);
}

ViolationReport check_four_term_pairs(const FunctionOracle& f,
                                      const std::vector<std::pair<DomainPoint, DomainPoint>>& pairs) {
  ViolationReport report;
  for (const auto& [x, y] : pairs) {
    Outcome o = four_term_instance(f, x, y);
    report.checked += o.checked;
    if (o.violation) report.violations.push_back(std::move(*o.violation));
  }
  normalize(report.violations);
  return report;
}

ViolationReport check_monoid_sign(const FunctionOracle& f, const SampleBudget& budget) {
  const std::size_t d = f.dim();
  const DomainPoint zero(std::vector<double>(d, 0.0));
  if (!f.accepts(zero)) {
    throw DomainError(f.name() + ": monoid check needs 0 in the domain");
  }
  ViolationReport report;
  report.checked = 1;
  if (auto v = make_violation(ViolationKind::monoid, std::nullopt, {as_vector(zero)}, 0.0, f(zero))) {
    report.violations.push_back(std::move(*v));
  }
  std::vector<SlotSampler> slots;
  for (std::size_t i = 0; i < d; ++i) slots.push_back(axis_sampler(f, i, budget));
  report.merge(run_check(
      slots,
      [&](const std::vector<double>& v) -> Outcome {
        const DomainPoint x(v);
        const DomainPoint nx = -x;
        if (!f.accepts(x) || !f.accepts(nx)) {
          throw DomainError(f.name() + ": monoid check needs -x in the domain for x = " +
                            to_string(x));
        }
        return {true, make_violation(ViolationKind::monoid, std::nullopt, {as_vector(x)}, 0.0,
                                     f(x) + f(nx))};
      },
      budget, 50));
  return report;
}

ViolationReport check_set_union(const FiniteSetFunction& g, const std::vector<IntSet>& family) {
  if (family.empty()) throw DomainError("set-union check needs a nonempty family");
  auto as_vec = [](const IntSet& s) {
    std::vector<double> v;
    for (auto e : s) v.push_back(static_cast<double>(e));
    return v;
  };
  ViolationReport report;
  for (std::size_t i = 0; i < family.size(); ++i) {
    for (std::size_t j = i; j < family.size(); ++j) {
      IntSet u = family[i];
      u.insert(family[j].begin(), family[j].end());
      ++report.checked;
      if (auto v = make_violation(ViolationKind::set_union, std::nullopt,
                                  {as_vec(family[i]), as_vec(family[j])}, g(u),
                                  ExtendedReal(g(family[i])) + ExtendedReal(g(family[j])))) {
        report.violations.push_back(std::move(*v));
      }
    }
  }
  normalize(report.violations);
  return report;
}

FunctionOracle shifted(const FunctionOracle& f, std::int64_t shift) {
  if (f.dim() != 1) throw DomainError("shifted subadditivity needs a one-variable oracle");
  const auto s = static_cast<double>(shift);
  return FunctionOracle(f.name() + "(n+" + std::to_string(shift) + ")", f.domain(),
                        [f, s](std::span<const double> x) { return f(DomainPoint{x[0] + s}); });
}

ViolationReport check_shifted_subadditivity(const FunctionOracle& f, std::int64_t shift,
                                            const SampleBudget& budget) {
  return check_joint(shifted(f, shift), budget);
}

ViolationReport check_sampled_subadditivity(const std::vector<double>& points,
                                            const std::vector<ExtendedReal>& values) {
  if (points.size() != values.size()) throw DomainError("points and values differ in length");
  std::map<double, std::size_t> index;
  for (std::size_t k = 0; k < points.size(); ++k) index.emplace(points[k], k);
  auto locate = [&](double s) -> std::optional<std::size_t> {
    auto it = index.lower_bound(s * (1 - 1e-12));
    if (it != index.end() && std::fabs(it->first - s) <= 1e-12 * std::fabs(s)) return it->second;
    return std::nullopt;
  };
  ViolationReport report;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i; j < points.size(); ++j) {
      const auto k = locate(points[i] + points[j]);
      if (!k) continue;
      ++report.checked;
      if (auto v = make_violation(ViolationKind::joint, std::nullopt, {{points[i]}, {points[j]}},
                                  values[*k], values[i] + values[j])) {
        report.violations.push_back(std::move(*v));
      }
    }
  }
  normalize(report.violations);
  return report;
}

// ------------------------------------------------------------------ serialization

namespace {

nlohmann::json number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

std::string witness_text(const std::vector<std::vector<double>>& w) {
  std::string s;
  for (std::size_t t = 0; t < w.size(); ++t) {
    if (t) s += ';';
    for (std::size_t i = 0; i < w[t].size(); ++i) {
      if (i) s += ' ';
      s += format_double(w[t][i]);
    }
  }
  return s;
}

}  // namespace

std::string report_to_json(const ViolationReport& report) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& v : report.violations) {
    nlohmann::json rec;
    rec["kind"] = to_string(v.kind);
    rec["axis"] = v.axis ? nlohmann::json(*v.axis + 1) : nlohmann::json(nullptr);
    rec["witness"] = v.witness;
    rec["lhs"] = number(v.lhs);
    rec["rhs"] = number(v.rhs);
    rec["margin"] = number(v.margin);
    arr.push_back(std::move(rec));
  }
  return arr.dump(1) + "\n";
}

std::string report_to_csv(const ViolationReport& report) {
  std::string out = "kind,axis,witness,lhs,rhs,margin\n";
  for (const auto& v : report.violations) {
    out += to_string(v.kind) + ",";
    out += v.axis ? std::to_string(*v.axis + 1) : std::string();
    out += "," + witness_text(v.witness) + "," + format_double(v.lhs) + "," +
           format_double(v.rhs) + "," + format_double(v.margin) + "\n";
  }
  return out;
}

}  // namespace fekete

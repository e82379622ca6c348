#include "fekete/fekete_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "json.hpp"

namespace fekete {

std::string to_string(LimitStatus s) {
  switch (s) {
    case LimitStatus::converged: return "converged";
    case LimitStatus::diverging_to_minus_infinity: return "diverging_to_minus_infinity";
    case LimitStatus::diverging_to_plus_infinity: return "diverging_to_plus_infinity";
    case LimitStatus::inconclusive: return "inconclusive";
  }
  return "unknown";
}

namespace {

int severity(LimitStatus s) {
  switch (s) {
    case LimitStatus::converged: return 0;
    case LimitStatus::diverging_to_minus_infinity:
    case LimitStatus::diverging_to_plus_infinity: return 1;
    case LimitStatus::inconclusive: return 2;
  }
  return 2;
}

ExtendedReal ratio_of(const FunctionOracle& f, const DomainPoint& x, double divisor) {
  return f(x) / ExtendedReal(divisor);
}

void require_main_orthant(const FunctionOracle& f) {
  const auto& o = f.domain().orthant;
  if (o && o->ones() != 0) {
    throw DomainError(f.name() + ": limit estimation needs the main orthant; use orthant_limit");
  }
}

void require_integral(const FunctionOracle& f, const DomainPoint& p) {
  if (!f.domain().integer) return;
  for (double c : p.coords()) {
    if (c != std::floor(c)) {
      throw DomainError(f.name() + ": integer-domain oracle needs an integer schedule (got " +
                        to_string(p) + ")");
    }
  }
}

/// Steady drift: the last `window` steps all move in direction `sign` and
/// the step sizes do not shrink. Linear-or-faster drift on a geometric
/// schedule means the ratio grows like log x or faster.
bool steady_drift(const std::vector<ExtendedReal>& v, int window, int sign) {
  const auto n = static_cast<int>(v.size());
  if (window < 2 || n < window + 1) return false;
  double prev_step = 0.0;
  for (int j = n - window; j < n; ++j) {
    const ExtendedReal a = v[static_cast<std::size_t>(j - 1)];
    const ExtendedReal b = v[static_cast<std::size_t>(j)];
    if (!a.is_finite() || !b.is_finite()) return false;
    const double step = sign * (b.value() - a.value());
    if (!(step > 0)) return false;
    if (j > n - window && step < prev_step * (1 - 1e-9)) return false;
    prev_step = step;
  }
  return true;
}

}  // namespace

// ------------------------------------------------------------------ sequences

SequenceEstimate estimate_sequence_limit(const std::vector<ExtendedReal>& values,
                                         const EstimatorConfig& config) {
  if (values.empty()) throw DomainError("empty sequence");
  SequenceEstimate e;
  e.best_upper = *std::min_element(values.begin(), values.end());
  e.tail = values.back();
  const double thr = config.divergence_threshold;
  const auto n = static_cast<int>(values.size());

  if (e.tail.is_plus_infinity() || e.tail.to_double() > thr) {
    e.status = LimitStatus::diverging_to_plus_infinity;
    e.value = ExtendedReal::plus_infinity();
    return e;
  }
  if (e.best_upper.is_minus_infinity() || e.tail.to_double() < -thr) {
    e.status = LimitStatus::diverging_to_minus_infinity;
    e.value = ExtendedReal::minus_infinity();
    return e;
  }
  // Suffix maxima: the tail from k on must stay within delta of the minimum.
  std::vector<ExtendedReal> suffix_max(values.size());
  suffix_max.back() = values.back();
  for (int k = n - 2; k >= 0; --k) {
    suffix_max[static_cast<std::size_t>(k)] =
        max(values[static_cast<std::size_t>(k)], suffix_max[static_cast<std::size_t>(k) + 1]);
  }
  const int last_start = n - std::max(1, config.min_tail_levels);
  for (int k = 0; k <= last_start; ++k) {
    const ExtendedReal gap = suffix_max[static_cast<std::size_t>(k)] - e.best_upper;
    if (gap.is_finite() && gap.value() <= config.delta) {
      e.status = LimitStatus::converged;
      e.R_level = k;
      e.value = e.best_upper;
      return e;
    }
  }
  if (steady_drift(values, config.trend_window, +1)) {
    e.status = LimitStatus::diverging_to_plus_infinity;
    e.value = ExtendedReal::plus_infinity();
  } else if (steady_drift(values, config.trend_window, -1)) {
    e.status = LimitStatus::diverging_to_minus_infinity;
    e.value = ExtendedReal::minus_infinity();
  } else {
    e.status = LimitStatus::inconclusive;
    e.value = e.best_upper;
  }
  return e;
}

// -------------------------------------------------------------- simultaneous

LimitBracket simultaneous_limit(const FunctionOracle& f, const GridSchedule& schedule,
                                const EstimatorConfig& config) {
  require_main_orthant(f);
  const std::size_t d = f.dim();
  if (schedule.dim() != d) throw DomainError("schedule dimension differs from oracle dimension");
  const int L = schedule.levels();
  const auto side = static_cast<std::size_t>(L) + 1;
  std::size_t total = 1;
  for (std::size_t i = 0; i < d; ++i) {
    if (total > config.max_points / side) throw DomainError("schedule has too many grid points");
    total *= side;
  }

  LimitBracket b;
  b.delta = config.delta;
  b.samples.reserve(total);
  // Per min-level maximum ratio, for the product-order tails.
  std::vector<ExtendedReal> max_at_min_level(side, ExtendedReal::minus_infinity());
  std::vector<ExtendedReal> shell_min(side, ExtendedReal::plus_infinity());

  std::vector<int> ks(d, 0);
  for (std::size_t c = 0; c < total; ++c) {
    std::size_t rem = c;
    for (std::size_t i = d; i-- > 0;) {
      ks[i] = static_cast<int>(rem % side);
      rem /= side;
    }
    const DomainPoint x = schedule.point(ks);
    require_integral(f, x);
    const ExtendedReal ratio = ratio_of(f, x, x.product());
    const int shell = *std::max_element(ks.begin(), ks.end());
    const auto lo = static_cast<std::size_t>(*std::min_element(ks.begin(), ks.end()));
    max_at_min_level[lo] = max(max_at_min_level[lo], ratio);
    shell_min[static_cast<std::size_t>(shell)] = min(shell_min[static_cast<std::size_t>(shell)], ratio);
    b.samples.push_back({x, ratio, shell});
  }
  b.evaluations = total;
  std::stable_sort(b.samples.begin(), b.samples.end(),
                   [](const RatioSample& a, const RatioSample& c) { return a.shell < c.shell; });

  ExtendedReal best = ExtendedReal::plus_infinity();
  for (const auto& m : shell_min) {
    best = min(best, m);
    b.running_best.push_back(best);
  }
  b.best_upper = best;
  b.tail_estimate = shell_min.back();

  const double thr = config.divergence_threshold;
  if (best.is_minus_infinity() || b.tail_estimate.to_double() < -thr) {
    b.status = LimitStatus::diverging_to_minus_infinity;
    return b;
  }
  // tail_max[k]: max ratio over points with every level >= k.
  std::vector<ExtendedReal> tail_max(side);
  tail_max[side - 1] = max_at_min_level[side - 1];
  for (std::size_t k = side - 1; k-- > 0;) tail_max[k] = max(max_at_min_level[k], tail_max[k + 1]);
  const int last_start = L - (std::max(1, config.min_tail_levels) - 1);
  for (int k = 0; k <= last_start; ++k) {
    const ExtendedReal gap = tail_max[static_cast<std::size_t>(k)] - best;
    if (gap.is_finite() && gap.value() <= config.delta) {
      b.status = LimitStatus::converged;
      b.R_level = k;
      b.R = schedule.point(std::vector<int>(d, k));
      return b;
    }
  }
  b.status = steady_drift(shell_min, config.trend_window, -1) ? LimitStatus::diverging_to_minus_infinity
                                                             : LimitStatus::inconclusive;
  return b;
}

// ------------------------------------------------------------------- iterated

namespace {

struct NestedContext {
  const FunctionOracle& f;
  const GridSchedule& schedule;
  const EstimatorConfig& config;
  std::vector<std::size_t> order;        // limit axes, outermost first
  std::vector<std::size_t> divisor_axes;  // axes whose product divides f
  std::vector<LevelSummary> summaries;
  std::size_t evaluations = 0;

  int levels_at(std::size_t depth) const {
    double l = schedule.levels();
    for (std::size_t k = 0; k < depth; ++k) l *= config.inner_level_factor;
    return static_cast<int>(std::min<double>(l, config.max_levels));
  }

  SequenceEstimate estimate(std::size_t depth, std::vector<double>& coords) {
    const std::size_t axis = order[depth];
    const int levels = std::max(schedule.levels(), levels_at(depth));
    std::vector<ExtendedReal> seq;
    seq.reserve(static_cast<std::size_t>(levels) + 1);
    for (int k = 0; k <= levels; ++k) {
      coords[axis] = schedule.value(axis, k);
      if (depth + 1 == order.size()) {
        const DomainPoint x(coords);
        require_integral(f, x);
        double divisor = 1.0;
        for (std::size_t a : divisor_axes) divisor *= x[a];
        seq.push_back(ratio_of(f, x, divisor));
        ++evaluations;
      } else {
        seq.push_back(estimate(depth + 1, coords).value);
      }
    }
    SequenceEstimate e = estimate_sequence_limit(seq, config);
    LevelSummary& s = summaries[depth];
    s.levels = levels;
    ++s.counts[e.status];
    if (severity(e.status) > severity(s.worst)) s.worst = e.status;
    return e;
  }
};

std::vector<LevelSummary> fresh_summaries(const std::vector<std::size_t>& order) {
  std::vector<LevelSummary> s(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) s[k].axis = order[k];
  return s;
}

}  // namespace

IteratedLimit iterated_limit(const FunctionOracle& f, const std::vector<std::size_t>& order,
                             const GridSchedule& schedule, const EstimatorConfig& config) {
  require_main_orthant(f);
  const std::size_t d = f.dim();
  if (schedule.dim() != d) throw DomainError("schedule dimension differs from oracle dimension");
  if (order.size() != d || std::set<std::size_t>(order.begin(), order.end()).size() != d ||
      *std::max_element(order.begin(), order.end()) >= d) {
    throw DomainError("order must be a permutation of the axes");
  }
  std::vector<std::size_t> all(d);
  for (std::size_t i = 0; i < d; ++i) all[i] = i;
  NestedContext ctx{f, schedule, config, order, all, fresh_summaries(order), 0};
  std::vector<double> coords(schedule.base().coords().begin(), schedule.base().coords().end());
  const SequenceEstimate outer = ctx.estimate(0, coords);

  IteratedLimit out;
  out.value = outer.value;
  out.status = outer.status;
  for (const auto& s : ctx.summaries) {
    if (severity(s.worst) > severity(out.status)) out.status = s.worst;
  }
  out.levels = std::move(ctx.summaries);
  out.evaluations = ctx.evaluations;
  return out;
}

// ----------------------------------------------------------- one-variable nets

namespace {

LimitBracket bracket_from_sequence(std::vector<RatioSample> samples, const EstimatorConfig& config) {
  std::vector<ExtendedReal> ratios;
  for (const auto& s : samples) ratios.push_back(s.ratio);
  const SequenceEstimate e = estimate_sequence_limit(ratios, config);
  LimitBracket b;
  b.delta = config.delta;
  b.best_upper = e.best_upper;
  b.tail_estimate = e.tail;
  b.status = e.status;
  b.evaluations = samples.size();
  ExtendedReal best = ExtendedReal::plus_infinity();
  for (const auto& r : ratios) {
    best = min(best, r);
    b.running_best.push_back(best);
  }
  if (e.R_level) {
    b.R_level = e.R_level;
    b.R = samples[static_cast<std::size_t>(*e.R_level)].point;
  }
  b.samples = std::move(samples);
  return b;
}

}  // namespace

LimitBracket diagonal_limit(const FunctionOracle& f, const std::vector<Path>& paths,
                            const GridSchedule& t_schedule, const EstimatorConfig& config) {
  require_main_orthant(f);
  if (paths.size() != f.dim()) throw DomainError("need one path per axis");
  if (t_schedule.dim() != 1) throw DomainError("diagonal schedule must be one-dimensional");
  const int L = t_schedule.levels();
  const double g = t_schedule.growth();
  const double t0 = t_schedule.value(0, 0);
  const double t1 = t_schedule.value(0, L);
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const double first = paths[i](t0);
    const double last = paths[i](t1);
    if (!(last > first * std::pow(g, L / 2.0))) {
      throw DomainError("path " + std::to_string(i + 1) + " does not diverge over the schedule");
    }
  }
  std::vector<RatioSample> samples;
  std::vector<double> c(f.dim());
  for (int k = 0; k <= L; ++k) {
    const double t = t_schedule.value(0, k);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = paths[i](t);
    const DomainPoint x(c);
    require_integral(f, x);
    samples.push_back({x, ratio_of(f, x, x.product()), k});
  }
  return bracket_from_sequence(std::move(samples), config);
}

LimitBracket ray_limit(const FunctionOracle& f, const DomainPoint& direction,
                       const GridSchedule& t_schedule, const EstimatorConfig& config) {
  if (direction.dim() != f.dim()) throw DomainError("direction dimension differs from oracle");
  if (std::all_of(direction.coords().begin(), direction.coords().end(),
                  [](double c) { return c == 0.0; })) {
    throw DomainError("ray direction must be nonzero");
  }
  if (t_schedule.dim() != 1) throw DomainError("ray schedule must be one-dimensional");
  std::vector<RatioSample> samples;
  std::vector<double> c(f.dim());
  for (int k = 0; k <= t_schedule.levels(); ++k) {
    const double t = t_schedule.value(0, k);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = t * direction[i];
    const DomainPoint x(c);
    samples.push_back({x, ratio_of(f, x, t), k});
  }
  return bracket_from_sequence(std::move(samples), config);
}

// ------------------------------------------------------------------ multiple_inf

double multiple_inf(const DenseGrid& grid, const std::vector<std::size_t>& order) {
  const std::size_t d = grid.shape.size();
  if (d == 0 || grid.values.empty()) throw DomainError("multiple_inf of an empty grid");
  std::size_t total = 1;
  for (auto s : grid.shape) {
    if (s == 0) throw DomainError("multiple_inf of an empty grid");
    total *= s;
  }
  if (total != grid.values.size()) throw DomainError("grid shape does not match value count");
  if (order.size() != d || std::set<std::size_t>(order.begin(), order.end()).size() != d ||
      *std::max_element(order.begin(), order.end()) >= d) {
    throw DomainError("order must be a permutation of the axes");
  }

  // Reduce the innermost axis first. `axes` tracks which original axis each
  // remaining dimension of `cur` holds.
  std::vector<std::size_t> axes(d);
  for (std::size_t i = 0; i < d; ++i) axes[i] = i;
  std::vector<std::size_t> shape = grid.shape;
  std::vector<double> cur = grid.values;
  for (std::size_t k = d; k-- > 0;) {
    const std::size_t pos =
        static_cast<std::size_t>(std::find(axes.begin(), axes.end(), order[k]) - axes.begin());
    std::size_t outer = 1;
    std::size_t inner = 1;
    for (std::size_t i = 0; i < pos; ++i) outer *= shape[i];
    for (std::size_t i = pos + 1; i < shape.size(); ++i) inner *= shape[i];
    const std::size_t n = shape[pos];
    std::vector<double> next(outer * inner);
    for (std::size_t o = 0; o < outer; ++o) {
      for (std::size_t in = 0; in < inner; ++in) {
        double m = cur[(o * n) * inner + in];
        for (std::size_t j = 1; j < n; ++j) m = std::min(m, cur[(o * n + j) * inner + in]);
        next[o * inner + in] = m;
      }
    }
    cur = std::move(next);
    shape.erase(shape.begin() + static_cast<long>(pos));
    axes.erase(axes.begin() + static_cast<long>(pos));
  }
  const double nested = cur.front();
  const double flat = *std::min_element(grid.values.begin(), grid.values.end());
  if (nested != flat) throw std::logic_error("nested minimum differs from the flat minimum");
  return nested;
}

// -------------------------------------------------------- decomposition bound

DecompositionBound verify_decomposition_bound(const FunctionOracle& f, const DomainPoint& x,
                                              const DomainPoint& t) {
  const std::size_t d = f.dim();
  if (x.dim() != d || t.dim() != d) throw DomainError("dimension mismatch");
  if (d > 20) throw DomainError("decomposition bound supports d <= 20");
  DecompositionBound out;
  for (std::size_t i = 0; i < d; ++i) {
    const QRDecomposition qr = qr_decompose(x[i], t[i]);
    out.q.push_back(qr.q);
    out.r.push_back(qr.r);
  }
  out.lhs = f(x);
  ExtendedReal rhs = 0.0;
  std::vector<double> y(d);
  for (std::size_t w = 0; w < (std::size_t{1} << d); ++w) {
    DecompositionTerm term{std::string(d, '0'), 1.0, DomainPoint(std::vector<double>(d, 1.0)), 0.0, 0.0};
    for (std::size_t i = 0; i < d; ++i) {
      const bool bit = (w >> (d - 1 - i)) & 1U;
      term.word[i] = bit ? '1' : '0';
      y[i] = bit ? t[i] : out.r[i];
      if (bit) term.coefficient *= static_cast<double>(out.q[i]);
    }
    term.point = DomainPoint(y);
    term.value = f(term.point);
    term.term = ExtendedReal(term.coefficient) * term.value;
    rhs = rhs + term.term;
    out.terms.push_back(std::move(term));
  }
  out.rhs = rhs;
  if (out.lhs.is_finite() && rhs.is_finite()) {
    out.holds = out.lhs.value() - rhs.value() <= violation_tolerance(out.lhs.value(), rhs.value());
  } else {
    out.holds = out.lhs <= rhs;
  }
  return out;
}

// -------------------------------------------------------------------- orthants

OrthantBracket orthant_limit(const FunctionOracle& f, const OrthantWord& w,
                             const GridSchedule& schedule, const EstimatorConfig& config) {
  if (w.size() != f.dim()) throw DomainError("orthant word length differs from oracle dimension");
  const auto& o = f.domain().orthant;
  if (o && !(*o == w)) {
    throw DomainError(f.name() + " is defined on orthant " + o->to_string() + ", not " + w.to_string());
  }
  OrthantBracket out;
  out.reflected = simultaneous_limit(reflected(f, w), schedule, config);
  if (w.even()) {
    out.sense = LimitSense::inf;
    out.bound = out.reflected.best_upper;
    out.tail_estimate = out.reflected.tail_estimate;
    out.status = out.reflected.status;
  } else {
    // prod x = -prod x_w, so the ratio flips sign and inf becomes sup.
    out.sense = LimitSense::sup;
    out.bound = -out.reflected.best_upper;
    out.tail_estimate = -out.reflected.tail_estimate;
    switch (out.reflected.status) {
      case LimitStatus::diverging_to_minus_infinity:
        out.status = LimitStatus::diverging_to_plus_infinity;
        break;
      case LimitStatus::diverging_to_plus_infinity:
        out.status = LimitStatus::diverging_to_minus_infinity;
        break;
      default: out.status = out.reflected.status;
    }
  }
  return out;
}

// ---------------------------------------------------------------- inner profile

InnerProfile inner_limit_profile(const FunctionOracle& f, const std::map<std::size_t, double>& fixed,
                                 const std::vector<std::size_t>& limit_axes,
                                 std::size_t probe_axis, const std::vector<double>& probe_grid,
                                 const GridSchedule& schedule, const EstimatorConfig& config) {
  require_main_orthant(f);
  const std::size_t d = f.dim();
  if (schedule.dim() != d) throw DomainError("schedule dimension differs from oracle dimension");
  std::vector<int> seen(d, 0);
  auto mark = [&](std::size_t a) {
    if (a >= d) throw DomainError("axis index out of range");
    ++seen[a];
  };
  for (const auto& [a, v] : fixed) mark(a);
  for (auto a : limit_axes) mark(a);
  mark(probe_axis);
  if (std::any_of(seen.begin(), seen.end(), [](int s) { return s != 1; })) {
    throw DomainError("fixed, limit and probe axes must partition the axes");
  }
  if (limit_axes.empty()) throw DomainError("need at least one limit axis");

  InnerProfile out;
  NestedContext ctx{f, schedule, config, limit_axes, limit_axes, fresh_summaries(limit_axes), 0};
  std::vector<double> coords(d, 1.0);
  for (const auto& [a, v] : fixed) coords[a] = v;
  for (double p : probe_grid) {
    coords[probe_axis] = p;
    const SequenceEstimate e = ctx.estimate(0, coords);
    out.probes.push_back(p);
    out.values.push_back(e.value);
    out.statuses.push_back(e.status);
  }
  out.subadditivity = check_sampled_subadditivity(out.probes, out.values);
  return out;
}

// ------------------------------------------------------------------ serialization

namespace {

nlohmann::json ext(ExtendedReal v) {
  if (v.is_plus_infinity()) return "inf";
  if (v.is_minus_infinity()) return "-inf";
  return v.value();
}

}  // namespace

std::string bracket_to_json(const LimitBracket& b) {
  nlohmann::json j;
  j["best_upper"] = ext(b.best_upper);
  j["tail_estimate"] = ext(b.tail_estimate);
  j["status"] = to_string(b.status);
  j["delta"] = b.delta;
  if (b.R) {
    j["R"] = std::vector<double>(b.R->coords().begin(), b.R->coords().end());
  } else {
    j["R"] = nullptr;
  }
  j["evaluations"] = b.evaluations;
  nlohmann::json running = nlohmann::json::array();
  for (const auto& r : b.running_best) running.push_back(ext(r));
  j["running_best"] = std::move(running);
  return j.dump(1) + "\n";
}

std::string samples_to_csv(const LimitBracket& b) {
  std::string out = "shell,point,ratio\n";
  for (const auto& s : b.samples) {
    std::string p;
    for (std::size_t i = 0; i < s.point.dim(); ++i) {
      if (i) p += ' ';
      p += format_double(s.point[i]);
    }
    out += std::to_string(s.shell) + "," + p + "," + to_string(s.ratio) + "\n";
  }
  return out;
}

}  // namespace fekete

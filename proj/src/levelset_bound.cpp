#include "fekete/levelset_bound.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "fekete/counter_rng.hpp"
#include "json.hpp"

namespace fekete {

std::string MeasureMethod::describe() const {
  if (kind == Kind::grid_quadrature) return "grid_quadrature(" + std::to_string(cells_per_axis) + ")";
  return "monte_carlo(" + std::to_string(samples) + "," + std::to_string(seed) + ")";
}

namespace {

/// Runs body(begin, end) over [0, n) split into `threads` contiguous slabs.
template <class Body>
void for_slabs(std::size_t n, std::size_t threads, Body body) {
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads == 1) {
    body(0, n);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (n + threads - 1) / threads;
  for (std::size_t t = 0; t < threads; ++t) {
    const std::size_t b = std::min(n, t * chunk);
    const std::size_t e = std::min(n, b + chunk);
    pool.emplace_back([=, &body] { body(b, e); });
  }
  for (auto& th : pool) th.join();
}

bool at_least(const FunctionOracle& f, std::vector<double>& x, double k) {
  return f(DomainPoint(x)).to_double() >= k;
}

MeasureEstimate grid_quadrature(const FunctionOracle& f, const LevelSetSpec& spec,
                                const MeasureMethod& method) {
  const std::size_t d = spec.t.dim();
  const std::size_t n = method.cells_per_axis;
  if (n == 0) throw DomainError("quadrature needs at least one cell per axis");
  std::size_t nodes = 1;
  std::size_t cells = 1;
  for (std::size_t i = 0; i < d; ++i) {
    if (nodes > 50'000'000 / (n + 1)) throw DomainError("quadrature grid too large");
    nodes *= n + 1;
    cells *= n;
  }
  std::vector<double> h(d);
  double cell_volume = 1.0;
  for (std::size_t i = 0; i < d; ++i) {
    h[i] = spec.t[i] / static_cast<double>(n);
    cell_volume *= h[i];
  }
  // Node classification. Nodes on the x_i = 0 faces lie outside the open box
  // and are nudged inward.
  std::vector<unsigned char> node_in(nodes);
  for_slabs(nodes, method.threads, [&](std::size_t b, std::size_t e) {
    std::vector<double> x(d);
    for (std::size_t c = b; c < e; ++c) {
      std::size_t rem = c;
      for (std::size_t i = d; i-- > 0;) {
        const std::size_t j = rem % (n + 1);
        rem /= n + 1;
        x[i] = j == 0 ? h[i] * 1e-9 : static_cast<double>(j) * h[i];
      }
      node_in[c] = at_least(f, x, spec.k);
    }
  });

  std::vector<std::size_t> inside_parts(std::max<std::size_t>(1, method.threads), 0);
  std::vector<std::size_t> ambiguous_parts(inside_parts.size(), 0);
  std::vector<std::size_t> strides(d);
  std::size_t stride = 1;
  for (std::size_t i = d; i-- > 0;) {
    strides[i] = stride;
    stride *= n + 1;
  }
  const std::size_t corners = std::size_t{1} << d;
  const std::size_t chunk = (cells + inside_parts.size() - 1) / inside_parts.size();
  for_slabs(inside_parts.size(), inside_parts.size(), [&](std::size_t pb, std::size_t pe) {
    for (std::size_t part = pb; part < pe; ++part) {
      std::vector<double> x(d);
      std::vector<std::size_t> idx(d);
      const std::size_t b = std::min(cells, part * chunk);
      const std::size_t e = std::min(cells, b + chunk);
      for (std::size_t c = b; c < e; ++c) {
        std::size_t rem = c;
        std::size_t base = 0;
        for (std::size_t i = d; i-- > 0;) {
          idx[i] = rem % n;
          rem /= n;
          x[i] = (static_cast<double>(idx[i]) + 0.5) * h[i];
          base += idx[i] * strides[i];
        }
        const bool in = at_least(f, x, spec.k);
        bool ambiguous = false;
        for (std::size_t m = 0; m < corners && !ambiguous; ++m) {
          std::size_t node = base;
          for (std::size_t i = 0; i < d; ++i) {
            if ((m >> i) & 1U) node += strides[i];
          }
          ambiguous = static_cast<bool>(node_in[node]) != in;
        }
        inside_parts[part] += in;
        ambiguous_parts[part] += ambiguous;
      }
    }
  });
  const auto inside = std::accumulate(inside_parts.begin(), inside_parts.end(), std::size_t{0});
  const auto ambiguous =
      std::accumulate(ambiguous_parts.begin(), ambiguous_parts.end(), std::size_t{0});
  return {static_cast<double>(inside) * cell_volume, method,
          static_cast<double>(ambiguous) * cell_volume};
}

MeasureEstimate monte_carlo(const FunctionOracle& f, const LevelSetSpec& spec,
                            const MeasureMethod& method) {
  const std::size_t d = spec.t.dim();
  const std::size_t n = method.samples;
  if (n == 0) throw DomainError("Monte Carlo needs at least one sample");
  const CounterRng rng(method.seed);
  std::vector<std::size_t> parts(std::max<std::size_t>(1, method.threads), 0);
  const std::size_t chunk = (n + parts.size() - 1) / parts.size();
  for_slabs(parts.size(), parts.size(), [&](std::size_t pb, std::size_t pe) {
    std::vector<double> x(d);
    for (std::size_t part = pb; part < pe; ++part) {
      const std::size_t b = std::min(n, part * chunk);
      const std::size_t e = std::min(n, b + chunk);
      for (std::size_t s = b; s < e; ++s) {
        for (std::size_t i = 0; i < d; ++i) {
          // (0, t_i): redraw the measure-zero endpoint 0
          double u = rng.unit(s, i);
          if (u == 0.0) u = 0x1p-54;
          x[i] = u * spec.t[i];
        }
        parts[part] += at_least(f, x, spec.k);
      }
    }
  });
  const auto hits = std::accumulate(parts.begin(), parts.end(), std::size_t{0});
  const double volume = spec.t.product();
  const double half_width = std::sqrt(std::log(2.0 / 0.01) / (2.0 * static_cast<double>(n)));
  return {volume * static_cast<double>(hits) / static_cast<double>(n), method, volume * half_width};
}

}  // namespace

MeasureEstimate levelset_measure(const FunctionOracle& f, const LevelSetSpec& spec,
                                 const MeasureMethod& method) {
  if (spec.t.dim() != f.dim()) throw DomainError("level set dimension differs from oracle");
  for (double c : spec.t.coords()) {
    if (!(c > 0)) throw DomainError("level set corner t must have positive coordinates");
  }
  if (f.domain().integer) throw DomainError(f.name() + ": level-set measures need a real domain");
  if (method.kind == MeasureMethod::Kind::grid_quadrature) return grid_quadrature(f, spec, method);
  return monte_carlo(f, spec, method);
}

std::vector<LevelsetLemmaRow> check_levelset_lemma(const FunctionOracle& f,
                                                   const std::vector<DomainPoint>& anchors,
                                                   const MeasureMethod& method) {
  std::vector<LevelsetLemmaRow> rows;
  for (const auto& t : anchors) {
    const double scale = std::ldexp(1.0, -static_cast<int>(t.dim()));
    LevelsetLemmaRow row{t, f(t).to_double() * scale, {}, t.product() * scale, 0.0, false};
    row.mu = levelset_measure(f, {t, row.k}, method);
    row.margin = row.mu.value - row.bound;
    row.holds = row.mu.value + row.mu.error_bound >= row.bound;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string levelset_rows_to_csv(const std::vector<LevelsetLemmaRow>& rows) {
  std::string out = "anchor,k,mu_estimate,error,bound,margin\n";
  for (const auto& r : rows) {
    std::string a;
    for (std::size_t i = 0; i < r.anchor.dim(); ++i) {
      if (i) a += ' ';
      a += format_double(r.anchor[i]);
    }
    out += a + "," + format_double(r.k) + "," + format_double(r.mu.value) + "," +
           format_double(r.mu.error_bound) + "," + format_double(r.bound) + "," +
           format_double(r.margin) + "\n";
  }
  return out;
}

// -------------------------------------------------------------------- box scan

BoxScan compact_bound_scan(const FunctionOracle& f,
                           const std::vector<std::pair<double, double>>& box,
                           std::size_t resolution) {
  const std::size_t d = f.dim();
  if (box.size() != d) throw DomainError("box dimension differs from oracle");
  if (resolution < 2) throw DomainError("scan resolution must be >= 2");
  for (const auto& [a, b] : box) {
    if (!(a <= b)) throw DomainError("box interval has a > b");
  }
  std::size_t total = 1;
  for (std::size_t i = 0; i < d; ++i) {
    if (total > 50'000'000 / resolution) throw DomainError("scan grid too large");
    total *= resolution;
  }
  BoxScan s;
  s.box = box;
  s.resolution = resolution;
  s.min = ExtendedReal::plus_infinity();
  s.max = ExtendedReal::minus_infinity();
  std::vector<double> x(d);
  for (std::size_t c = 0; c < total; ++c) {
    std::size_t rem = c;
    for (std::size_t i = d; i-- > 0;) {
      const std::size_t j = rem % resolution;
      rem /= resolution;
      const auto [a, b] = box[i];
      x[i] = j + 1 == resolution ? b
                                 : a + (b - a) * static_cast<double>(j) /
                                           static_cast<double>(resolution - 1);
    }
    const DomainPoint p(x);
    const ExtendedReal v = f(p);
    if (c == 0 || v < s.min) {
      s.min = v;
      s.argmin = p;
    }
    if (c == 0 || v > s.max) {
      s.max = v;
      s.argmax = p;
    }
  }
  s.evaluations = total;
  return s;
}

std::string box_scan_to_json(const BoxScan& scan) {
  auto ext = [](ExtendedReal v) -> nlohmann::json {
    if (!v.is_finite()) return to_string(v);
    return v.value();
  };
  auto pt = [](const DomainPoint& p) { return std::vector<double>(p.coords().begin(), p.coords().end()); };
  nlohmann::json j;
  nlohmann::json box = nlohmann::json::array();
  for (const auto& [a, b] : scan.box) box.push_back({a, b});
  j["box"] = std::move(box);
  j["resolution"] = scan.resolution;
  j["min"] = ext(scan.min);
  j["argmin"] = pt(scan.argmin);
  j["max"] = ext(scan.max);
  j["argmax"] = pt(scan.argmax);
  j["evaluations"] = scan.evaluations;
  j["evidence_only"] = scan.evidence_only;
  return j.dump(1) + "\n";
}

// ---------------------------------------------------------------------- Rubin

namespace {

/// Distinct rationals 1 + p/q in [1, 2] with q <= Q, increasing.
std::vector<Rational> rational_unit_grid(std::int64_t Q) {
  std::vector<Rational> grid;
  for (std::int64_t q = 1; q <= Q; ++q) {
    for (std::int64_t p = 0; p <= q; ++p) {
      if (std::gcd(p, q) != 1) continue;
      grid.push_back(Rational::make(q + p, q));
    }
  }
  std::sort(grid.begin(), grid.end(), [](const Rational& a, const Rational& b) {
    return a.num * b.den < b.num * a.den;
  });
  return grid;
}

}  // namespace

RubinDemo rubin_unboundedness_demo(std::int64_t n_max) {
  if (n_max < 1) throw DomainError("n_max must be >= 1");
  RubinDemo demo;
  for (std::int64_t n = 1; n <= n_max; ++n) {
    const Rational c = Rational::make(n + 1, n);
    const RubinCoordinate rc{c};
    demo.diagonal.push_back({c, c, static_cast<std::int64_t>(rubin_eval(rc, rc).value())});
  }
  const std::int64_t Q = std::min<std::int64_t>(n_max, 200);
  demo.line_grid_max_denominator = Q;
  const auto grid = rational_unit_grid(Q);
  for (std::int64_t j = 0; j < 20; ++j) {
    const Rational fixed = Rational::make(20 + j, 20);
    const RubinCoordinate fx{fixed};
    RubinLineCheck line{fixed, rubin_h(fx), 0, false};
    for (const auto& y : grid) {
      const auto v = static_cast<std::int64_t>(rubin_eval(fx, RubinCoordinate{y}).value());
      line.max_along_line = std::max(line.max_along_line, v);
    }
    line.max_along_line = std::max<std::int64_t>(
        line.max_along_line,
        static_cast<std::int64_t>(rubin_eval(fx, RubinCoordinate::irrational()).value()));
    line.bounded = line.max_along_line <= line.denominator;
    demo.lines.push_back(line);
  }
  return demo;
}

RubinGridScan rubin_rational_scan(std::int64_t Q) {
  if (Q < 1) throw DomainError("Q must be >= 1");
  const auto grid = rational_unit_grid(Q);
  RubinGridScan s;
  s.max_denominator = Q;
  for (const auto& x : grid) {
    const std::int64_t hx = rubin_h(RubinCoordinate{x});
    for (const auto& y : grid) {
      const std::int64_t v = std::min(hx, rubin_h(RubinCoordinate{y}));
      ++s.points;
      if (v > s.max) {
        s.max = v;
        s.argmax = x;
      }
    }
  }
  return s;
}

}  // namespace fekete

#pragma once

// Level-set measures and boundedness scans. Measures are estimated
// numerically; f is assumed exactly evaluable (measurability is not checked).

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "fekete/function_registry.hpp"

namespace fekete {

/// V = {x : 0 < x_i < t_i for all i, f(x) >= k}.
struct LevelSetSpec {
  DomainPoint t;
  double k = 0.0;
};

struct MeasureMethod {
  enum class Kind { grid_quadrature, monte_carlo };
  Kind kind = Kind::grid_quadrature;
  std::size_t cells_per_axis = 2000;
  std::size_t samples = 100000;
  std::uint64_t seed = 0;
  std::size_t threads = 1;

  static MeasureMethod grid(std::size_t cells) { return {Kind::grid_quadrature, cells, 0, 0, 1}; }
  static MeasureMethod monte_carlo(std::size_t samples, std::uint64_t seed) {
    return {Kind::monte_carlo, 0, samples, seed, 1};
  }
  std::string describe() const;
};

/// value in [0, prod t_i]. For grid quadrature a cell counts when its center
/// is in V and error_bound is the volume of cells whose corners disagree with
/// the center; for Monte Carlo it is the 99% Hoeffding half-width.
struct MeasureEstimate {
  double value = 0.0;
  MeasureMethod method;
  double error_bound = 0.0;
};

MeasureEstimate levelset_measure(const FunctionOracle& f, const LevelSetSpec& spec,
                                 const MeasureMethod& method);

struct LevelsetLemmaRow {
  DomainPoint anchor;
  double k = 0.0;         // f(t) / 2^d
  MeasureEstimate mu;
  double bound = 0.0;     // prod t_i / 2^d
  double margin = 0.0;    // mu.value - bound
  bool holds = false;     // mu.value + mu.error_bound >= bound
};

std::vector<LevelsetLemmaRow> check_levelset_lemma(const FunctionOracle& f,
                                                   const std::vector<DomainPoint>& anchors,
                                                   const MeasureMethod& method);

/// anchor,k,mu_estimate,error,bound,margin
std::string levelset_rows_to_csv(const std::vector<LevelsetLemmaRow>& rows);

/// Min and max of f over an evaluation grid on a closed box. Evidence of
/// boundedness only, never a proof.
struct BoxScan {
  std::vector<std::pair<double, double>> box;
  std::size_t resolution = 0;  // grid points per axis, endpoints included
  ExtendedReal min;
  ExtendedReal max;
  DomainPoint argmin{0.0};
  DomainPoint argmax{0.0};
  std::size_t evaluations = 0;
  bool evidence_only = true;
};

BoxScan compact_bound_scan(const FunctionOracle& f,
                           const std::vector<std::pair<double, double>>& box,
                           std::size_t resolution);
std::string box_scan_to_json(const BoxScan& scan);

// --------------------------------------------------------------- Rubin function

struct RubinPoint {
  Rational x;
  Rational y;
  std::int64_t value = 0;
};

struct RubinLineCheck {
  Rational fixed;
  std::int64_t denominator = 0;      // h(fixed)
  std::int64_t max_along_line = 0;   // max of f(fixed, y) over the line grid
  bool bounded = false;              // max_along_line <= denominator
};

struct RubinDemo {
  std::vector<RubinPoint> diagonal;      // (1 + 1/n, 1 + 1/n), n = 1..n_max
  std::vector<RubinLineCheck> lines;     // 20 fixed rational x in [1, 2]
  std::int64_t line_grid_max_denominator = 0;
};

/// Exact-rational replay of the bounded-per-line / unbounded-on-the-box example.
RubinDemo rubin_unboundedness_demo(std::int64_t n_max);

struct RubinGridScan {
  std::int64_t max_denominator = 0;  // Q
  std::int64_t max = 0;
  Rational argmax;
  std::size_t points = 0;
};

/// Diagonal scan of the exact rational grid {1 + p/q : 0 <= p <= q <= Q}.
RubinGridScan rubin_rational_scan(std::int64_t Q);

}  // namespace fekete

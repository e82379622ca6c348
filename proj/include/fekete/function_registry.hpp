#pragma once

// Evaluable functions: the built-in examples, tabulated user functions and
// functions of finite integer sets.

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fekete/domain_core.hpp"

namespace fekete {

/// Where an oracle may be evaluated. An empty orthant means all of R^d (or Z^d).
struct Domain {
  std::size_t dim = 1;
  std::optional<OrthantWord> orthant;
  bool integer = false;

  static Domain positive(std::size_t d, bool integer = false) {
    return {d, OrthantWord::positive(d), integer};
  }
  static Domain whole(std::size_t d, bool integer = false) { return {d, std::nullopt, integer}; }

  bool contains(const DomainPoint& x) const;
  std::string describe() const;
};

struct OracleMetadata {
  bool claims_componentwise_subadditive = false;
  bool claims_joint_subadditive = false;
  std::optional<ExtendedReal> known_limit;
  /// Where known_limit comes from, e.g. "analytic: inf 1/sqrt(x1 x2) = 0".
  std::string known_limit_note;
};

/// A named function on a declared domain. Immutable; evaluation is pure.
class FunctionOracle {
 public:
  using Fn = std::function<ExtendedReal(std::span<const double>)>;
  using Grid = std::vector<std::vector<double>>;

  FunctionOracle(std::string name, Domain domain, Fn fn, OracleMetadata metadata = {},
                 std::optional<Grid> grid = std::nullopt);

  const std::string& name() const { return name_; }
  const Domain& domain() const { return domain_; }
  std::size_t dim() const { return domain_.dim; }
  const OracleMetadata& metadata() const { return metadata_; }
  /// Per-axis support when the oracle is only defined on a finite grid.
  const std::optional<Grid>& grid() const { return grid_; }

  /// Domain (and grid) membership test.
  bool accepts(const DomainPoint& x) const;
  /// Throws EvaluationError, naming the point, outside the domain or on failure.
  ExtendedReal evaluate(const DomainPoint& x) const;
  ExtendedReal operator()(const DomainPoint& x) const { return evaluate(x); }

  /// Same function, renamed and with replaced metadata.
  FunctionOracle with_metadata(std::string name, OracleMetadata metadata) const;

 private:
  std::string name_;
  Domain domain_;
  Fn fn_;
  OracleMetadata metadata_;
  std::optional<Grid> grid_;
};

/// Names accepted by builtin().
const std::vector<std::string>& builtin_names();
/// Throws DomainError for an unknown name.
FunctionOracle builtin(std::string_view name);

/// The negation -f, same domain; the metadata flags are cleared.
FunctionOracle negated(const FunctionOracle& f);
/// f(|x_1|, ..., |x_d|) on the orthant w, for f defined on the main orthant.
FunctionOracle lift_to_orthant(const FunctionOracle& f, const OrthantWord& w);
/// f_w(u) = f((-1)^{w_1} u_1, ...) on the main orthant, for f defined on R_w.
FunctionOracle reflected(const FunctionOracle& f, const OrthantWord& w);

// ------------------------------------------------------------------- rationals

/// Exact fraction in lowest terms with positive denominator.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  /// Reduces; throws DomainError on a zero denominator.
  static Rational make(std::int64_t num, std::int64_t den);
  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Rational&, const Rational&) = default;
};

/// A coordinate of the Rubin function: an exact rational or a declared irrational.
struct RubinCoordinate {
  std::optional<Rational> rational;

  static RubinCoordinate irrational() { return {}; }
  static RubinCoordinate of(std::int64_t num, std::int64_t den) {
    return {Rational::make(num, den)};
  }
};

/// h(p/q) = q for reduced fractions, h(irrational) = 0.
std::int64_t rubin_h(const RubinCoordinate& x);
/// min(h(x), h(y)).
ExtendedReal rubin_eval(const RubinCoordinate& x, const RubinCoordinate& y);
/// Denominator of the exact binary fraction a double represents.
double dyadic_denominator(double x);

// ----------------------------------------------------------- tabulated input

/// Values on a product grid, row-major (last axis fastest).
struct TabulatedFunction {
  std::vector<std::vector<double>> axes;
  std::vector<double> values;

  /// Throws ParseError on shape mismatch or non-increasing / non-positive axes.
  void validate() const;
  /// Exact grid lookup; throws EvaluationError off the grid.
  double lookup(std::span<const double> x) const;
};

/// {"dim": d, "axes": [[...], ...], "values": [...]}; values may be numbers or
/// the strings "inf" / "-inf".
TabulatedFunction parse_tabulated(std::string_view json_text);
std::string serialize_tabulated(const TabulatedFunction& table);
FunctionOracle make_tabulated_oracle(TabulatedFunction table, std::string name);
/// Reads and validates a tabulated-function file.
FunctionOracle load_tabulated(const std::string& path);
void write_tabulated(const std::string& path, const TabulatedFunction& table);

// ------------------------------------------------------------ finite sets

using IntSet = std::set<std::int64_t>;

class FiniteSetFunction {
 public:
  using Fn = std::function<double(const IntSet&)>;

  FiniteSetFunction(std::string name, Fn fn, bool translation_invariant)
      : name_(std::move(name)), fn_(std::move(fn)), translation_invariant_(translation_invariant) {}

  const std::string& name() const { return name_; }
  bool translation_invariant() const { return translation_invariant_; }
  double operator()(const IntSet& a) const { return fn_(a); }

 private:
  std::string name_;
  Fn fn_;
  bool translation_invariant_;
};

/// g(A) = f(|A|) for nonempty A, g(empty) = 0, for f defined on the integers.
FiniteSetFunction set_function_from(const FunctionOracle& f);
FiniteSetFunction cardinality_set_function();
/// Checks g(A) == g(A + n) for every set and shift; false on any mismatch.
bool translation_invariant_on(const FiniteSetFunction& g, const std::vector<IntSet>& sets,
                              const std::vector<std::int64_t>& shifts);

struct FiniteSetInput {
  FiniteSetFunction g;
  std::vector<IntSet> sets;
};

/// {"base": "nmod2" | "cardinality" | <integer builtin>, "sets": [[1,2],[2,3]]}.
FiniteSetInput parse_finite_set_input(std::string_view json_text);

std::string read_text_file(const std::string& path);

}  // namespace fekete

#include "fekete/function_registry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "fekete/io.hpp"
#include "json.hpp"

namespace fekete {

using nlohmann::json;

// ---------------------------------------------------------------------- Domain

bool Domain::contains(const DomainPoint& x) const {
  if (x.dim() != dim) return false;
  if (orthant && !orthant->contains(x)) return false;
  if (integer) {
    for (double c : x.coords()) {
      if (c != std::floor(c)) return false;
    }
  }
  return true;
}

std::string Domain::describe() const {
  std::string s = integer ? "Z^" : "R^";
  s += std::to_string(dim);
  if (orthant) s += " orthant " + orthant->to_string();
  return s;
}

// -------------------------------------------------------------- FunctionOracle

FunctionOracle::FunctionOracle(std::string name, Domain domain, Fn fn, OracleMetadata metadata,
                               std::optional<Grid> grid)
    : name_(std::move(name)),
      domain_(std::move(domain)),
      fn_(std::move(fn)),
      metadata_(std::move(metadata)),
      grid_(std::move(grid)) {
  if (domain_.dim == 0) throw DomainError("oracle dimension must be >= 1");
  if (domain_.orthant && domain_.orthant->size() != domain_.dim) {
    throw DomainError("orthant word length differs from oracle dimension");
  }
  if (grid_ && grid_->size() != domain_.dim) throw DomainError("grid has wrong dimension");
}

bool FunctionOracle::accepts(const DomainPoint& x) const {
  if (!domain_.contains(x)) return false;
  if (grid_) {
    for (std::size_t i = 0; i < x.dim(); ++i) {
      const auto& axis = (*grid_)[i];
      if (!std::binary_search(axis.begin(), axis.end(), x[i])) return false;
    }
  }
  return true;
}

ExtendedReal FunctionOracle::evaluate(const DomainPoint& x) const {
  if (!domain_.contains(x)) {
    throw EvaluationError(name_ + ": point " + to_string(x) + " is outside the domain " +
                          domain_.describe());
  }
  try {
    return fn_(x.coords());
  } catch (const EvaluationError&) {
    throw;
  } catch (const std::exception& e) {
    throw EvaluationError(name_ + ": evaluation failed at " + to_string(x) + ": " + e.what());
  }
}

FunctionOracle FunctionOracle::with_metadata(std::string name, OracleMetadata metadata) const {
  return FunctionOracle(std::move(name), domain_, fn_, std::move(metadata), grid_);
}

// ------------------------------------------------------------------- builtins

namespace {

OracleMetadata meta(bool cw, bool joint, std::optional<ExtendedReal> limit = std::nullopt,
                    std::string note = {}) {
  return {cw, joint, limit, std::move(note)};
}

}  // namespace

const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names = {
      "sqrt_prod", "neg_x1_sqrt_x2", "rubin_min_denominator", "x1sq_sqrt_x2",
      "nmod2",     "full_shift_count_log", "ceiling", "abs"};
  return names;
}

FunctionOracle builtin(std::string_view name) {
  using S = std::span<const double>;
  if (name == "sqrt_prod") {
    return {"sqrt_prod", Domain::positive(2),
            [](S x) { return ExtendedReal(std::sqrt(x[0] * x[1])); },
            meta(true, false, 0.0, "analytic: inf 1/sqrt(x1 x2) = 0")};
  }
  if (name == "neg_x1_sqrt_x2") {
    // Jointly subadditive because (x1+y1)sqrt(x2+y2) >= x1 sqrt(x2) + y1 sqrt(y2).
    return {"neg_x1_sqrt_x2", Domain::positive(2),
            [](S x) { return ExtendedReal(-x[0] * std::sqrt(x[1])); }, meta(false, true)};
  }
  if (name == "rubin_min_denominator") {
    // On doubles every input is an exact dyadic rational; see rubin_eval for
    // the exact-rational version.
    return {"rubin_min_denominator", Domain::positive(2),
            [](S x) {
              return ExtendedReal(std::min(dyadic_denominator(x[0]), dyadic_denominator(x[1])));
            },
            meta(false, false)};
  }
  if (name == "x1sq_sqrt_x2") {
    return {"x1sq_sqrt_x2", Domain::positive(2),
            [](S x) { return ExtendedReal(x[0] * x[0] * std::sqrt(x[1])); }, meta(false, false)};
  }
  if (name == "nmod2") {
    return {"nmod2", Domain::whole(1, true),
            [](S x) { return ExtendedReal(std::fmod(std::fabs(x[0]), 2.0)); },
            meta(true, true, 0.0, "analytic: (n mod 2)/n -> 0 on positive integers")};
  }
  if (name == "full_shift_count_log") {
    return {"full_shift_count_log", Domain::positive(2, true),
            [](S x) { return ExtendedReal(x[0] * x[1]); },
            meta(true, false, 1.0, "analytic: log2 of 2^(n1 n2) patterns, ratio 1")};
  }
  if (name == "ceiling") {
    return {"ceiling", Domain::whole(1), [](S x) { return ExtendedReal(std::ceil(x[0])); },
            meta(true, true, 1.0, "analytic: ceil(t)/t -> 1")};
  }
  if (name == "abs") {
    return {"abs", Domain::whole(1), [](S x) { return ExtendedReal(std::fabs(x[0])); },
            meta(true, true, 1.0, "analytic: |t|/t = 1 for t > 0")};
  }
  throw DomainError("unknown builtin function '" + std::string(name) + "'");
}

FunctionOracle negated(const FunctionOracle& f) {
  return FunctionOracle(
      "neg(" + f.name() + ")", f.domain(),
      [f](std::span<const double> x) { return -f.evaluate(DomainPoint({x.begin(), x.end()})); },
      {}, f.grid());
}

FunctionOracle lift_to_orthant(const FunctionOracle& f, const OrthantWord& w) {
  if (w.size() != f.dim()) throw DomainError("orthant word length differs from oracle dimension");
  Domain dom{f.dim(), w, f.domain().integer};
  OracleMetadata m;
  m.claims_componentwise_subadditive = f.metadata().claims_componentwise_subadditive;
  return FunctionOracle(f.name() + "@" + w.to_string(), dom,
                        [f](std::span<const double> x) {
                          std::vector<double> u(x.begin(), x.end());
                          for (double& c : u) c = std::fabs(c);
                          return f.evaluate(DomainPoint(std::move(u)));
                        },
                        m);
}

FunctionOracle reflected(const FunctionOracle& f, const OrthantWord& w) {
  if (w.size() != f.dim()) throw DomainError("orthant word length differs from oracle dimension");
  OracleMetadata m;
  m.claims_componentwise_subadditive = f.metadata().claims_componentwise_subadditive;
  return FunctionOracle(f.name() + "|reflect " + w.to_string(),
                        Domain::positive(f.dim(), f.domain().integer),
                        [f, w](std::span<const double> u) {
                          std::vector<double> x(u.begin(), u.end());
                          for (std::size_t i = 0; i < x.size(); ++i) {
                            if (w.negative(i)) x[i] = -x[i];
                          }
                          return f.evaluate(DomainPoint(std::move(x)));
                        },
                        m);
}

// ------------------------------------------------------------------- rationals

Rational Rational::make(std::int64_t num, std::int64_t den) {
  if (den == 0) throw DomainError("zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num, den);
  return {num / g, den / g};
}

std::int64_t rubin_h(const RubinCoordinate& x) {
  if (!x.rational) return 0;
  // Re-reduce in case the caller aggregate-initialized an unreduced value.
  return Rational::make(x.rational->num, x.rational->den).den;
}

ExtendedReal rubin_eval(const RubinCoordinate& x, const RubinCoordinate& y) {
  return ExtendedReal(static_cast<double>(std::min(rubin_h(x), rubin_h(y))));
}

double dyadic_denominator(double x) {
  if (!std::isfinite(x)) throw DomainError("dyadic_denominator of a non-finite value");
  if (x == std::floor(x)) return 1.0;
  int exp = 0;
  double m = std::frexp(std::fabs(x), &exp);
  // m in [0.5, 1): m * 2^53 is an integer; strip factors of two.
  auto mant = static_cast<std::uint64_t>(std::ldexp(m, 53));
  int shift = 53 - exp;
  while (shift > 0 && (mant & 1U) == 0) {
    mant >>= 1;
    --shift;
  }
  return std::ldexp(1.0, shift);
}

// ----------------------------------------------------------- tabulated input

void TabulatedFunction::validate() const {
  if (axes.empty()) throw ParseError("tabulated function needs at least one axis");
  std::size_t expected = 1;
  for (std::size_t i = 0; i < axes.size(); ++i) {
    const auto& a = axes[i];
    if (a.empty()) throw ParseError("axis " + std::to_string(i) + " is empty");
    for (std::size_t k = 0; k < a.size(); ++k) {
      if (!std::isfinite(a[k]) || !(a[k] > 0)) {
        throw ParseError("axis " + std::to_string(i) + " has a non-positive coordinate");
      }
      if (k > 0 && !(a[k - 1] < a[k])) {
        throw ParseError("axis " + std::to_string(i) + " is not strictly increasing");
      }
    }
    expected *= a.size();
  }
  if (values.size() != expected) {
    throw ParseError("values has " + std::to_string(values.size()) + " entries, grid needs " +
                     std::to_string(expected));
  }
  for (double v : values) {
    if (std::isnan(v)) throw ParseError("NaN in tabulated values");
  }
}

double TabulatedFunction::lookup(std::span<const double> x) const {
  if (x.size() != axes.size()) throw EvaluationError("tabulated lookup: dimension mismatch");
  std::size_t index = 0;
  for (std::size_t i = 0; i < axes.size(); ++i) {
    const auto& a = axes[i];
    const auto it = std::lower_bound(a.begin(), a.end(), x[i]);
    if (it == a.end() || *it != x[i]) {
      throw EvaluationError("off-grid query: coordinate " + std::to_string(i) + " = " +
                            format_double(x[i]) + " is not a grid value");
    }
    index = index * a.size() + static_cast<std::size_t>(it - a.begin());
  }
  return values[index];
}

namespace {

double json_to_value(const json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return parse_extended_real(v.get<std::string>()).to_double();
  throw ParseError("tabulated value must be a number or \"inf\"/\"-inf\"");
}

json value_to_json(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

}  // namespace

TabulatedFunction parse_tabulated(std::string_view json_text) {
  TabulatedFunction t;
  try {
    const json j = json::parse(json_text);
    const auto dim = j.at("dim").get<std::size_t>();
    t.axes = j.at("axes").get<std::vector<std::vector<double>>>();
    if (t.axes.size() != dim) {
      throw ParseError("dim is " + std::to_string(dim) + " but " + std::to_string(t.axes.size()) +
                       " axes given");
    }
    for (const auto& v : j.at("values")) t.values.push_back(json_to_value(v));
  } catch (const json::exception& e) {
    throw ParseError(std::string("tabulated function: ") + e.what());
  }
  t.validate();
  return t;
}

std::string serialize_tabulated(const TabulatedFunction& table) {
  json j;
  j["dim"] = table.axes.size();
  j["axes"] = table.axes;
  json values = json::array();
  for (double v : table.values) values.push_back(value_to_json(v));
  j["values"] = std::move(values);
  return j.dump() + "\n";
}

FunctionOracle make_tabulated_oracle(TabulatedFunction table, std::string name) {
  table.validate();
  const std::size_t d = table.axes.size();
  auto grid = table.axes;
  return FunctionOracle(
      std::move(name), Domain::positive(d),
      [t = std::move(table)](std::span<const double> x) { return ExtendedReal(t.lookup(x)); }, {},
      std::move(grid));
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

FunctionOracle load_tabulated(const std::string& path) {
  return make_tabulated_oracle(parse_tabulated(read_text_file(path)), "table:" + path);
}

void write_tabulated(const std::string& path, const TabulatedFunction& table) {
  table.validate();
  write_file_atomic(path, serialize_tabulated(table));
}

// ------------------------------------------------------------------ finite sets

FiniteSetFunction set_function_from(const FunctionOracle& f) {
  if (f.dim() != 1 || !f.domain().contains(DomainPoint{1.0})) {
    throw DomainError("set function needs a one-variable oracle defined at positive integers");
  }
  return FiniteSetFunction(
      "card->" + f.name(),
      [f](const IntSet& a) {
        if (a.empty()) return 0.0;
        return f.evaluate(DomainPoint{static_cast<double>(a.size())}).to_double();
      },
      true);
}

FiniteSetFunction cardinality_set_function() {
  return FiniteSetFunction(
      "cardinality", [](const IntSet& a) { return static_cast<double>(a.size()); }, true);
}

bool translation_invariant_on(const FiniteSetFunction& g, const std::vector<IntSet>& sets,
                              const std::vector<std::int64_t>& shifts) {
  for (const auto& a : sets) {
    const double base = g(a);
    for (std::int64_t n : shifts) {
      IntSet moved;
      for (std::int64_t v : a) moved.insert(v + n);
      if (g(moved) != base) return false;
    }
  }
  return true;
}

FiniteSetInput parse_finite_set_input(std::string_view json_text) {
  try {
    const json j = json::parse(json_text);
    const auto base = j.at("base").get<std::string>();
    std::vector<IntSet> sets;
    for (const auto& s : j.at("sets")) {
      const auto elems = s.get<std::vector<std::int64_t>>();
      sets.emplace_back(elems.begin(), elems.end());
    }
    if (base == "cardinality") return {cardinality_set_function(), std::move(sets)};
    return {set_function_from(builtin(base)), std::move(sets)};
  } catch (const json::exception& e) {
    throw ParseError(std::string("finite-set input: ") + e.what());
  }
}

}  // namespace fekete

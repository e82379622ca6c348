#include "fekete/domain_core.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>

namespace fekete {

// ---------------------------------------------------------------- ExtendedReal

ExtendedReal::ExtendedReal(double v) {
  if (std::isnan(v)) throw IndeterminateForm("NaN is not an extended real");
  if (std::isinf(v)) {
    kind_ = v > 0 ? Kind::plus_infinity : Kind::minus_infinity;
  } else {
    value_ = v;
  }
}

ExtendedReal ExtendedReal::plus_infinity() {
  return ExtendedReal(std::numeric_limits<double>::infinity());
}

ExtendedReal ExtendedReal::minus_infinity() {
  return ExtendedReal(-std::numeric_limits<double>::infinity());
}

double ExtendedReal::value() const {
  if (!is_finite()) throw DomainError("extended real is infinite: " + fekete::to_string(*this));
  return value_;
}

double ExtendedReal::to_double() const {
  switch (kind_) {
    case Kind::plus_infinity: return std::numeric_limits<double>::infinity();
    case Kind::minus_infinity: return -std::numeric_limits<double>::infinity();
    case Kind::finite: break;
  }
  return value_;
}

namespace {

int sign_of(ExtendedReal x) {
  const double v = x.to_double();
  return (v > 0) - (v < 0);
}

}  // namespace

ExtendedReal operator+(ExtendedReal a, ExtendedReal b) {
  if ((a.is_plus_infinity() && b.is_minus_infinity()) ||
      (a.is_minus_infinity() && b.is_plus_infinity())) {
    throw IndeterminateForm("(+inf) + (-inf)");
  }
  if (!a.is_finite()) return a;
  if (!b.is_finite()) return b;
  // Finite overflow legitimately saturates to an infinity.
  return ExtendedReal(a.value_ + b.value_);
}

ExtendedReal operator-(ExtendedReal a, ExtendedReal b) { return a + (-b); }

ExtendedReal ExtendedReal::operator-() const {
  switch (kind_) {
    case Kind::plus_infinity: return minus_infinity();
    case Kind::minus_infinity: return plus_infinity();
    case Kind::finite: break;
  }
  return ExtendedReal(-value_);
}

ExtendedReal operator*(ExtendedReal a, ExtendedReal b) {
  if (a.is_finite() && b.is_finite()) return ExtendedReal(a.value_ * b.value_);
  const int s = sign_of(a) * sign_of(b);
  if (s == 0) throw IndeterminateForm("0 * inf");
  return s > 0 ? ExtendedReal::plus_infinity() : ExtendedReal::minus_infinity();
}

ExtendedReal operator/(ExtendedReal a, ExtendedReal b) {
  if (b.is_finite() && b.value_ == 0.0) throw IndeterminateForm("division by zero");
  if (!a.is_finite() && !b.is_finite()) throw IndeterminateForm("inf / inf");
  if (!b.is_finite()) return ExtendedReal(0.0);
  if (!a.is_finite()) {
    return sign_of(a) * sign_of(b) > 0 ? ExtendedReal::plus_infinity()
                                       : ExtendedReal::minus_infinity();
  }
  return ExtendedReal(a.value_ / b.value_);
}

ExtendedReal min(ExtendedReal a, ExtendedReal b) { return b < a ? b : a; }
ExtendedReal max(ExtendedReal a, ExtendedReal b) { return a < b ? b : a; }

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) v = 0.0;  // fold -0
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string to_string(ExtendedReal x) { return format_double(x.to_double()); }

ExtendedReal parse_extended_real(std::string_view text) {
  if (text == "inf" || text == "+inf") return ExtendedReal::plus_infinity();
  if (text == "-inf") return ExtendedReal::minus_infinity();
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() || std::isnan(v)) {
    throw ParseError("not an extended real: '" + std::string(text) + "'");
  }
  return ExtendedReal(v);
}

// ----------------------------------------------------------------- DomainPoint

DomainPoint::DomainPoint(std::vector<double> coords) : coords_(std::move(coords)) {
  if (coords_.empty()) throw DomainError("point dimension must be >= 1");
  for (double c : coords_) {
    if (!std::isfinite(c)) throw DomainError("point coordinates must be finite");
  }
}

DomainPoint::DomainPoint(std::initializer_list<double> coords)
    : DomainPoint(std::vector<double>(coords)) {}

DomainPoint DomainPoint::with(std::size_t i, double v) const {
  auto c = coords_;
  c.at(i) = v;
  return DomainPoint(std::move(c));
}

double DomainPoint::product() const {
  return std::accumulate(coords_.begin(), coords_.end(), 1.0, std::multiplies<>());
}

DomainPoint operator+(const DomainPoint& a, const DomainPoint& b) {
  if (a.dim() != b.dim()) throw DomainError("dimension mismatch");
  std::vector<double> c(a.dim());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = a[i] + b[i];
  return DomainPoint(std::move(c));
}

DomainPoint operator-(const DomainPoint& a) {
  std::vector<double> c(a.coords().begin(), a.coords().end());
  for (double& v : c) v = -v;
  return DomainPoint(std::move(c));
}

std::string to_string(const DomainPoint& p) {
  std::string s = "(";
  for (std::size_t i = 0; i < p.dim(); ++i) {
    if (i) s += ",";
    s += format_double(p[i]);
  }
  return s + ")";
}

// ----------------------------------------------------------------- OrthantWord

OrthantWord::OrthantWord(std::vector<bool> bits) : bits_(std::move(bits)) {
  if (bits_.empty()) throw DomainError("orthant word must have length >= 1");
}

OrthantWord OrthantWord::parse(std::string_view text) {
  std::vector<bool> bits;
  for (char c : text) {
    if (c != '0' && c != '1') throw DomainError("orthant word must be binary: '" + std::string(text) + "'");
    bits.push_back(c == '1');
  }
  return OrthantWord(std::move(bits));
}

OrthantWord OrthantWord::positive(std::size_t d) { return OrthantWord(std::vector<bool>(d, false)); }

std::size_t OrthantWord::ones() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), true));
}

bool OrthantWord::contains(const DomainPoint& x) const {
  if (x.dim() != size()) return false;
  for (std::size_t i = 0; i < size(); ++i) {
    if (bits_[i] ? !(x[i] < 0) : !(x[i] > 0)) return false;
  }
  return true;
}

std::string OrthantWord::to_string() const {
  std::string s;
  for (bool b : bits_) s += b ? '1' : '0';
  return s;
}

namespace {

void require_in_orthant(const DomainPoint& x, const OrthantWord& w) {
  if (x.dim() != w.size()) {
    throw DomainError("dimension mismatch: point has d=" + std::to_string(x.dim()) +
                      ", word has length " + std::to_string(w.size()));
  }
  if (!w.contains(x)) {
    throw DomainError("point " + to_string(x) + " is outside orthant " + w.to_string());
  }
}

}  // namespace

bool product_leq(const DomainPoint& x, const DomainPoint& y, const OrthantWord& w) {
  require_in_orthant(x, w);
  require_in_orthant(y, w);
  for (std::size_t i = 0; i < x.dim(); ++i) {
    if (w.negative(i) ? x[i] < y[i] : x[i] > y[i]) return false;
  }
  return true;
}

DomainPoint directed_upper_bound(const DomainPoint& x, const DomainPoint& y,
                                 const OrthantWord& w) {
  require_in_orthant(x, w);
  require_in_orthant(y, w);
  std::vector<double> z(x.dim());
  for (std::size_t i = 0; i < z.size(); ++i) {
    z[i] = w.negative(i) ? std::min(x[i], y[i]) : std::max(x[i], y[i]);
  }
  return DomainPoint(std::move(z));
}

DomainPoint orthant_reflect(const DomainPoint& x, const OrthantWord& w) {
  if (x.dim() != w.size()) throw DomainError("orthant word and point differ in dimension");
  std::vector<double> z(x.coords().begin(), x.coords().end());
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (w.negative(i)) z[i] = -z[i];
  }
  return DomainPoint(std::move(z));
}

// --------------------------------------------------------------- qr_decompose

QRDecomposition qr_decompose(double x, double t) {
  if (!(t > 0) || !std::isfinite(t) || !std::isfinite(x)) {
    throw DomainError("qr_decompose needs finite x and t > 0");
  }
  if (x < 2 * t) {
    throw DomainError("qr_decompose needs x >= 2t (x=" + format_double(x) +
                      ", t=" + format_double(t) + ")");
  }
  const double qf = std::floor((x - t) / t);
  if (qf >= 0x1p62) throw DomainError("qr_decompose: quotient overflows");
  std::int64_t q = std::max<std::int64_t>(1, static_cast<std::int64_t>(qf));
  double r = x - static_cast<double>(q) * t;
  // Rounding in (x - t)/t can leave r one step outside [t, 2t).
  if (r >= 2 * t) {
    ++q;
    r = x - static_cast<double>(q) * t;
  } else if (r < t && q > 1) {
    --q;
    r = x - static_cast<double>(q) * t;
  }
  if (q < 1 || r < t || r >= 2 * t) {
    throw std::logic_error("qr_decompose post-condition failed for x=" + format_double(x) +
                           ", t=" + format_double(t));
  }
  return {q, r, t};
}

// ---------------------------------------------------------------- GridSchedule

GridSchedule::GridSchedule(DomainPoint base, double growth, int levels)
    : base_(std::move(base)), growth_(growth), levels_(levels) {
  for (double c : base_.coords()) {
    if (!(c > 0)) throw DomainError("schedule base coordinates must be positive");
  }
  if (!(growth_ > 1) || !std::isfinite(growth_)) throw DomainError("schedule growth must be > 1");
  if (levels_ < 1) throw DomainError("schedule needs at least one level");
}

GridSchedule GridSchedule::standard(std::size_t d) {
  return GridSchedule(DomainPoint(std::vector<double>(d, 1.0)), 2.0, 40);
}

double GridSchedule::value(std::size_t axis, int k) const {
  return base_[axis] * std::pow(growth_, k);
}

std::vector<double> GridSchedule::axis_values(std::size_t axis) const {
  std::vector<double> v(static_cast<std::size_t>(levels_) + 1);
  for (int k = 0; k <= levels_; ++k) v[static_cast<std::size_t>(k)] = value(axis, k);
  return v;
}

DomainPoint GridSchedule::point(std::span<const int> ks) const {
  if (ks.size() != dim()) throw DomainError("level vector has wrong dimension");
  std::vector<double> c(dim());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = value(i, ks[i]);
  return DomainPoint(std::move(c));
}

GridSchedule GridSchedule::with_levels(int levels) const {
  return GridSchedule(base_, growth_, levels);
}

GridSchedule GridSchedule::project(std::size_t axis) const {
  return GridSchedule(DomainPoint{base_[axis]}, growth_, levels_);
}

}  // namespace fekete

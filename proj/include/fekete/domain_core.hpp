#pragma once

// Core value types: extended reals, points, orthant words, the q*t + r
// decomposition and geometric sampling schedules.

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fekete/errors.hpp"

namespace fekete {

/// A real number or one of the two infinities. Never NaN.
class ExtendedReal {
 public:
  enum class Kind { finite, plus_infinity, minus_infinity };

  constexpr ExtendedReal() = default;
  /// Accepts any double; +-inf map to the infinite kinds, NaN throws.
  ExtendedReal(double v);  // NOLINT(google-explicit-constructor)

  static ExtendedReal plus_infinity();
  static ExtendedReal minus_infinity();

  Kind kind() const { return kind_; }
  bool is_finite() const { return kind_ == Kind::finite; }
  bool is_plus_infinity() const { return kind_ == Kind::plus_infinity; }
  bool is_minus_infinity() const { return kind_ == Kind::minus_infinity; }

  /// Finite value; throws DomainError on an infinity.
  double value() const;
  /// Value as a double, infinities mapped to +-HUGE_VAL.
  double to_double() const;

  friend ExtendedReal operator+(ExtendedReal a, ExtendedReal b);
  friend ExtendedReal operator-(ExtendedReal a, ExtendedReal b);
  friend ExtendedReal operator*(ExtendedReal a, ExtendedReal b);
  friend ExtendedReal operator/(ExtendedReal a, ExtendedReal b);
  ExtendedReal operator-() const;

  friend bool operator==(ExtendedReal a, ExtendedReal b) {
    return a.to_double() == b.to_double();
  }
  friend std::weak_ordering operator<=>(ExtendedReal a, ExtendedReal b) {
    const double x = a.to_double();
    const double y = b.to_double();
    if (x < y) return std::weak_ordering::less;
    if (x > y) return std::weak_ordering::greater;
    return std::weak_ordering::equivalent;
  }

 private:
  Kind kind_ = Kind::finite;
  double value_ = 0.0;
};

ExtendedReal min(ExtendedReal a, ExtendedReal b);
ExtendedReal max(ExtendedReal a, ExtendedReal b);

/// "inf", "-inf" or the shortest round-trip decimal form.
std::string to_string(ExtendedReal x);
/// Inverse of to_string; also accepts "+inf".
ExtendedReal parse_extended_real(std::string_view text);
/// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

/// A point of R^d (or Z^d) with finite coordinates, d >= 1.
class DomainPoint {
 public:
  explicit DomainPoint(std::vector<double> coords);
  DomainPoint(std::initializer_list<double> coords);

  std::size_t dim() const { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  std::span<const double> coords() const { return coords_; }

  /// Copy with coordinate i replaced.
  DomainPoint with(std::size_t i, double v) const;
  double product() const;

  friend bool operator==(const DomainPoint&, const DomainPoint&) = default;
  friend auto operator<=>(const DomainPoint& a, const DomainPoint& b) {
    return a.coords_ <=> b.coords_;
  }

 private:
  std::vector<double> coords_;
};

DomainPoint operator+(const DomainPoint& a, const DomainPoint& b);
DomainPoint operator-(const DomainPoint& a);
std::string to_string(const DomainPoint& p);

/// Binary word w in {0,1}^d. Bit i set means axis i is negative in the
/// open orthant R_w and the product order is reversed on that axis.
class OrthantWord {
 public:
  explicit OrthantWord(std::vector<bool> bits);
  /// Parses a word such as "10"; throws DomainError on other characters.
  static OrthantWord parse(std::string_view text);
  /// The main (all positive) orthant 0^d.
  static OrthantWord positive(std::size_t d);

  std::size_t size() const { return bits_.size(); }
  bool negative(std::size_t i) const { return bits_[i]; }
  std::size_t ones() const;
  bool even() const { return ones() % 2 == 0; }
  /// True iff every coordinate has the sign the word prescribes (open orthant).
  bool contains(const DomainPoint& x) const;
  std::string to_string() const;

  friend bool operator==(const OrthantWord&, const OrthantWord&) = default;

 private:
  std::vector<bool> bits_;
};

bool product_leq(const DomainPoint& x, const DomainPoint& y, const OrthantWord& w);
DomainPoint directed_upper_bound(const DomainPoint& x, const DomainPoint& y,
                                 const OrthantWord& w);
/// ((-1)^{w_1} x_1, ..., (-1)^{w_d} x_d); maps R_w onto the main orthant and back.
DomainPoint orthant_reflect(const DomainPoint& x, const OrthantWord& w);

/// x = q*t + r with q >= 1 and t <= r < 2t.
struct QRDecomposition {
  std::int64_t q = 1;
  double r = 0.0;
  double t = 0.0;
};

QRDecomposition qr_decompose(double x, double t);

/// Geometric sampling schedule: coordinate i at level k is base_i * g^k,
/// k = 0..levels.
class GridSchedule {
 public:
  GridSchedule(DomainPoint base, double growth, int levels);
  /// Base (1,...,1), growth 2, 40 levels.
  static GridSchedule standard(std::size_t d);

  std::size_t dim() const { return base_.dim(); }
  const DomainPoint& base() const { return base_; }
  double growth() const { return growth_; }
  int levels() const { return levels_; }

  double value(std::size_t axis, int k) const;
  std::vector<double> axis_values(std::size_t axis) const;
  /// Point whose coordinate i sits at level ks[i].
  DomainPoint point(std::span<const int> ks) const;
  /// Same base and growth with a different level count.
  GridSchedule with_levels(int levels) const;
  /// Same growth and levels on a single axis starting at base_i.
  GridSchedule project(std::size_t axis) const;

 private:
  DomainPoint base_;
  double growth_;
  int levels_;
};

}  // namespace fekete

#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "fekete/domain_core.hpp"

using namespace fekete;

TEST_CASE("extended reals keep the three kinds apart") {
  const ExtendedReal inf = ExtendedReal::plus_infinity();
  const ExtendedReal ninf = ExtendedReal::minus_infinity();
  CHECK(ExtendedReal(2.5).is_finite());
  CHECK(ExtendedReal(std::numeric_limits<double>::infinity()).is_plus_infinity());
  CHECK(ExtendedReal(-std::numeric_limits<double>::infinity()).is_minus_infinity());
  CHECK_THROWS_AS(ExtendedReal(std::nan("")), IndeterminateForm);
  CHECK_THROWS_AS(inf.value(), DomainError);

  CHECK((inf + 3.0).is_plus_infinity());
  CHECK((ninf - 3.0).is_minus_infinity());
  CHECK((inf * -2.0).is_minus_infinity());
  CHECK((ExtendedReal(1.0) / inf) == ExtendedReal(0.0));
  CHECK((ExtendedReal(6.0) / 4.0).value() == 1.5);
  CHECK((-inf).is_minus_infinity());

  CHECK(ninf < ExtendedReal(-1e300));
  CHECK(ExtendedReal(1e300) < inf);
  CHECK(min(inf, ExtendedReal(4.0)) == ExtendedReal(4.0));
  CHECK(max(ninf, ExtendedReal(4.0)) == ExtendedReal(4.0));
}

TEST_CASE("indeterminate forms are errors, never NaN") {
  const ExtendedReal inf = ExtendedReal::plus_infinity();
  const ExtendedReal ninf = ExtendedReal::minus_infinity();
  CHECK_THROWS_AS(inf + ninf, IndeterminateForm);
  CHECK_THROWS_AS(inf - inf, IndeterminateForm);
  CHECK_THROWS_AS(inf * 0.0, IndeterminateForm);
  CHECK_THROWS_AS(ExtendedReal(0.0) * ninf, IndeterminateForm);
  CHECK_THROWS_AS(inf / inf, IndeterminateForm);
  CHECK_THROWS_AS(ExtendedReal(1.0) / 0.0, IndeterminateForm);
}

TEST_CASE("extended reals round-trip through text") {
  for (double v : {0.0, -0.5, 1.0 / 3.0, 1e-300, 6.02214076e23}) {
    CHECK(parse_extended_real(to_string(ExtendedReal(v))) == ExtendedReal(v));
  }
  CHECK(to_string(ExtendedReal::plus_infinity()) == "inf");
  CHECK(to_string(ExtendedReal::minus_infinity()) == "-inf");
  CHECK(parse_extended_real("+inf").is_plus_infinity());
  CHECK(parse_extended_real("-inf").is_minus_infinity());
  CHECK_THROWS_AS(parse_extended_real("nan"), ParseError);
  CHECK_THROWS_AS(parse_extended_real("1.5x"), ParseError);
  CHECK(format_double(0.1) == "0.1");
}

TEST_CASE("points") {
  CHECK_THROWS_AS(DomainPoint(std::vector<double>{}), DomainError);
  CHECK_THROWS_AS(DomainPoint({1.0, std::numeric_limits<double>::infinity()}), DomainError);
  const DomainPoint p{1, 2};
  CHECK(p.with(1, 5) == DomainPoint{1, 5});
  CHECK(p.product() == 2);
  CHECK((p + DomainPoint{2, 1}) == DomainPoint{3, 3});
  CHECK(-p == DomainPoint{-1, -2});
  CHECK(to_string(p) == "(1,2)");
  CHECK_THROWS_AS(p + DomainPoint{1}, DomainError);
}

TEST_CASE("orthant words") {
  const OrthantWord w = OrthantWord::parse("10");
  CHECK(w.size() == 2);
  CHECK(w.negative(0));
  CHECK_FALSE(w.negative(1));
  CHECK(w.ones() == 1);
  CHECK_FALSE(w.even());
  CHECK(w.to_string() == "10");
  CHECK(w.contains(DomainPoint{-1, 2}));
  CHECK_FALSE(w.contains(DomainPoint{0, 2}));
  CHECK_FALSE(w.contains(DomainPoint{1, 2}));
  CHECK_THROWS_AS(OrthantWord::parse("12"), DomainError);
  CHECK(OrthantWord::positive(3).to_string() == "000");
}

TEST_CASE("product order") {
  const auto w00 = OrthantWord::parse("00");
  const auto w10 = OrthantWord::parse("10");
  CHECK(product_leq(DomainPoint{1, 2}, DomainPoint{1, 3}, w00));
  CHECK(product_leq(DomainPoint{-1, 2}, DomainPoint{-3, 5}, w10));
  CHECK_FALSE(product_leq(DomainPoint{1, 2}, DomainPoint{2, 1}, w00));
  CHECK_FALSE(product_leq(DomainPoint{2, 1}, DomainPoint{1, 2}, w00));
  CHECK_THROWS_AS(product_leq(DomainPoint{1, 2}, DomainPoint{1}, w00), DomainError);
  CHECK_THROWS_AS(product_leq(DomainPoint{1, 2}, DomainPoint{1, 3}, w10), DomainError);

  CHECK(directed_upper_bound(DomainPoint{1, 5}, DomainPoint{3, 2}, w00) == DomainPoint{3, 5});
  CHECK(directed_upper_bound(DomainPoint{-1, 5}, DomainPoint{-3, 2}, w10) == DomainPoint{-3, 5});
  CHECK(directed_upper_bound(DomainPoint{2, 2}, DomainPoint{2, 2}, w00) == DomainPoint{2, 2});
}

namespace {

DomainPoint random_in(const OrthantWord& w, std::mt19937_64& gen) {
  std::uniform_int_distribution<int> pick(1, 4);
  std::vector<double> c(w.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = (w.negative(i) ? -1.0 : 1.0) * pick(gen);
  return DomainPoint(c);
}

}  // namespace

TEST_CASE("product order is a partial order and the upper bound dominates") {
  std::mt19937_64 gen(7);
  for (const char* word : {"00", "01", "10", "11"}) {
    const auto w = OrthantWord::parse(word);
    for (int i = 0; i < 1000; ++i) {
      const auto x = random_in(w, gen), y = random_in(w, gen), z = random_in(w, gen);
      CHECK(product_leq(x, x, w));
      if (product_leq(x, y, w) && product_leq(y, x, w)) CHECK(x == y);
      if (product_leq(x, y, w) && product_leq(y, z, w)) CHECK(product_leq(x, z, w));
      const auto u = directed_upper_bound(x, y, w);
      CHECK(product_leq(x, u, w));
      CHECK(product_leq(y, u, w));
    }
  }
}

TEST_CASE("orthant reflection") {
  const auto w10 = OrthantWord::parse("10");
  CHECK(orthant_reflect(DomainPoint{-2, 3}, w10) == DomainPoint{2, 3});
  CHECK(orthant_reflect(DomainPoint{4, 7}, OrthantWord::parse("00")) == DomainPoint{4, 7});
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> mag(0.01, 50.0);
  const auto w = OrthantWord::parse("101");
  for (int i = 0; i < 100; ++i) {
    const DomainPoint x{-mag(gen), mag(gen), -mag(gen)};
    const DomainPoint r = orthant_reflect(x, w);
    CHECK(OrthantWord::positive(3).contains(r));
    CHECK(orthant_reflect(r, w) == x);
  }
}

TEST_CASE("q t + r decomposition") {
  auto qr = qr_decompose(7, 2);
  CHECK(qr.q == 2);
  CHECK(qr.r == 3);
  qr = qr_decompose(4, 2);
  CHECK(qr.q == 1);
  CHECK(qr.r == 2);
  qr = qr_decompose(5, 2);
  CHECK(qr.q == 1);
  CHECK(qr.r == 3);
  CHECK_THROWS_AS(qr_decompose(3.9, 2), DomainError);
  CHECK_THROWS_AS(qr_decompose(5, 0), DomainError);
}

TEST_CASE("q t + r decomposition invariants on random input") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> tdist(1e-3, 100.0);
  std::uniform_real_distribution<double> mult(2.0, 1e6);
  for (int i = 0; i < 10000; ++i) {
    const double t = tdist(gen);
    const double x = t * mult(gen);
    if (x < 2 * t) continue;
    const auto qr = qr_decompose(x, t);
    CHECK(qr.q >= 1);
    CHECK(qr.r >= t);
    CHECK(qr.r < 2 * t);
    const double back = static_cast<double>(qr.q) * t + qr.r;
    CHECK(std::abs(back - x) <= 2 * std::numeric_limits<double>::epsilon() * x);
  }
  for (int k = 1; k <= 40; ++k) {
    const double t = 3.0;
    const double x = std::ldexp(t, k);
    if (x < 2 * t) continue;
    const auto qr = qr_decompose(x, t);
    CHECK(std::abs(static_cast<double>(qr.q) / x - 1 / t) <= 2 * t / x);
  }
}

TEST_CASE("grid schedules") {
  const auto s = GridSchedule::standard(2);
  CHECK(s.levels() == 40);
  CHECK(s.growth() == 2);
  const auto v = s.axis_values(0);
  CHECK(v.size() == 41);
  CHECK(v.front() == 1);
  CHECK(v.back() == std::ldexp(1.0, 40));
  for (std::size_t i = 1; i < v.size(); ++i) CHECK(v[i] > v[i - 1]);
  const int ks[] = {2, 3};
  CHECK(s.point(ks) == DomainPoint{4, 8});
  CHECK(s.project(1).dim() == 1);
  CHECK(s.with_levels(5).axis_values(1).size() == 6);
  CHECK_THROWS_AS(GridSchedule(DomainPoint{1}, 1.0, 4), DomainError);
  CHECK_THROWS_AS(GridSchedule(DomainPoint{0}, 2.0, 4), DomainError);
  CHECK_THROWS_AS(GridSchedule(DomainPoint{1}, 2.0, 0), DomainError);
}

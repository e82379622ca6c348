#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "fekete/fekete_estimator.hpp"

using namespace fekete;

namespace {

const std::vector<std::vector<std::size_t>> kOrders2{{0, 1}, {1, 0}};

// Tabulated 1-D function with ratio -k at schedule level k.
FunctionOracle drifting_table(int levels) {
  TabulatedFunction t;
  t.axes.emplace_back();
  for (int k = 0; k <= levels; ++k) {
    const double x = std::ldexp(1.0, k);
    t.axes[0].push_back(x);
    t.values.push_back(-k * x);
  }
  return make_tabulated_oracle(t, "drift");
}

FunctionOracle coordinate_sum() {
  return FunctionOracle("sum", Domain::whole(2), [](std::span<const double> x) {
    return ExtendedReal(x[0] + x[1]);
  });
}

}  // namespace

TEST_CASE("simultaneous limit of sqrt_prod") {
  const auto f = builtin("sqrt_prod");
  const auto b = simultaneous_limit(f, GridSchedule::standard(2));
  CHECK(b.status == LimitStatus::converged);
  CHECK(b.best_upper <= ExtendedReal(0.01));
  CHECK(b.best_upper >= *f.metadata().known_limit);
  CHECK(b.best_upper <= b.tail_estimate);
  REQUIRE(b.R.has_value());
  CHECK(b.evaluations == 41 * 41);
  for (std::size_t k = 1; k < b.running_best.size(); ++k) CHECK(b.running_best[k] <= b.running_best[k - 1]);
  for (const auto& s : b.samples) CHECK(b.best_upper <= s.ratio);
  // closed form: ratio 1/sqrt(x1 x2), smallest at the far corner
  CHECK(b.best_upper.value() == doctest::Approx(std::ldexp(1.0, -40)));

  // a schedule ending at 2^14 > 10^4 per axis already certifies 0.01
  const auto short_b = simultaneous_limit(f, GridSchedule::standard(2).with_levels(14));
  CHECK(short_b.best_upper <= ExtendedReal(0.01));
  CHECK(short_b.status == LimitStatus::converged);
}

TEST_CASE("simultaneous limit of full_shift_count_log") {
  const auto b = simultaneous_limit(builtin("full_shift_count_log"), GridSchedule::standard(2));
  CHECK(b.status == LimitStatus::converged);
  CHECK(b.best_upper == ExtendedReal(1.0));
  REQUIRE(b.R.has_value());
  CHECK(*b.R == DomainPoint{1, 1});
  CHECK(b.R_level == 0);
}

TEST_CASE("steady negative drift is divergence") {
  const auto f = drifting_table(20);
  const GridSchedule s(DomainPoint{1}, 2.0, 20);
  const auto b = simultaneous_limit(f, s);
  CHECK(b.status == LimitStatus::diverging_to_minus_infinity);
  CHECK(b.best_upper == ExtendedReal(-20.0));
}

TEST_CASE("x1sq_sqrt_x2 has no simultaneous limit") {
  const auto b = simultaneous_limit(builtin("x1sq_sqrt_x2"), GridSchedule::standard(2));
  CHECK(b.status == LimitStatus::inconclusive);
}

TEST_CASE("best_upper is nonincreasing as the schedule grows") {
  for (const auto& name : builtin_names()) {
    const auto f = builtin(name);
    if (f.domain().orthant != OrthantWord::positive(f.dim()) || name == "rubin_min_denominator") continue;
    CAPTURE(name);
    ExtendedReal prev = ExtendedReal::plus_infinity();
    for (int L : {4, 8, 16, 24}) {
      GridSchedule s(DomainPoint(std::vector<double>(f.dim(), 1.0)), 2.0, L);
      const auto b = simultaneous_limit(f, s);
      CHECK(b.best_upper <= prev);
      prev = b.best_upper;
    }
  }
}

TEST_CASE("componentwise-subadditive builtins meet their known limits") {
  for (const auto& name : builtin_names()) {
    const auto f = builtin(name);
    const auto& m = f.metadata();
    if (!m.claims_componentwise_subadditive || !m.known_limit) continue;
    if (!f.domain().orthant || *f.domain().orthant != OrthantWord::positive(f.dim())) continue;
    CAPTURE(name);
    const auto b = simultaneous_limit(f, GridSchedule::standard(f.dim()));
    CHECK(b.best_upper >= *m.known_limit);
    CHECK(std::abs((b.best_upper - *m.known_limit).value()) <= 1e-2);
  }
}

TEST_CASE("iterated limits") {
  const auto s = GridSchedule::standard(2);
  const auto f = builtin("x1sq_sqrt_x2");
  const auto a = iterated_limit(f, {0, 1}, s);
  CHECK(a.status == LimitStatus::converged);
  REQUIRE(a.value.is_finite());
  CHECK(std::abs(a.value.value()) <= 1e-2);
  const auto b = iterated_limit(f, {1, 0}, s);
  CHECK(b.value.is_plus_infinity());
  CHECK(b.status == LimitStatus::diverging_to_plus_infinity);
  CHECK(a.levels.size() == 2);

  CHECK_THROWS_AS(iterated_limit(f, {0, 0}, s), DomainError);
  CHECK_THROWS_AS(iterated_limit(f, {0}, s), DomainError);
}

TEST_CASE("all limits agree for componentwise-subadditive functions") {
  const EstimatorConfig cfg;
  for (const char* name : {"sqrt_prod", "full_shift_count_log"}) {
    CAPTURE(name);
    const auto f = builtin(name);
    const auto s = GridSchedule::standard(2);
    const auto sim = simultaneous_limit(f, s, cfg);
    const std::vector<Path> id{[](double t) { return t; }, [](double t) { return t; }};
    const auto diag = diagonal_limit(f, id, s.project(0), cfg);
    CHECK(std::abs((sim.best_upper - diag.best_upper).value()) <= 2 * cfg.delta);
    for (const auto& order : kOrders2) {
      const auto it = iterated_limit(f, order, s, cfg);
      CHECK(it.status == LimitStatus::converged);
      CHECK(std::abs((sim.best_upper - it.value).value()) <= 2 * cfg.delta);
    }
  }
}

TEST_CASE("diagonal limits") {
  const auto s = GridSchedule::standard(1);
  const std::vector<Path> id{[](double t) { return t; }, [](double t) { return t; }};
  const auto a = diagonal_limit(builtin("sqrt_prod"), id, s);
  CHECK(a.status == LimitStatus::converged);
  CHECK(a.best_upper <= ExtendedReal(1e-2));
  CHECK(a.samples.front().ratio == ExtendedReal(1.0));

  const std::vector<Path> sq{[](double t) { return t; }, [](double t) { return t * t; }};
  const auto b = diagonal_limit(builtin("full_shift_count_log"), sq, s.with_levels(20));
  CHECK(b.best_upper == ExtendedReal(1.0));
  CHECK(b.tail_estimate == ExtendedReal(1.0));

  const std::vector<Path> flat{[](double) { return 3.0; }, [](double t) { return t; }};
  CHECK_THROWS_AS(diagonal_limit(builtin("sqrt_prod"), flat, s), DomainError);
}

TEST_CASE("multiple_inf commutes with the flat minimum") {
  std::mt19937_64 gen(29);
  std::uniform_real_distribution<double> u(-10, 10);
  std::uniform_int_distribution<std::size_t> side(1, 5);
  for (std::size_t d = 1; d <= 3; ++d) {
    for (int rep = 0; rep < 100; ++rep) {
      DenseGrid g;
      std::size_t n = 1;
      for (std::size_t i = 0; i < d; ++i) {
        g.shape.push_back(side(gen));
        n *= g.shape.back();
      }
      for (std::size_t i = 0; i < n; ++i) g.values.push_back(u(gen));
      std::vector<std::size_t> order(d);
      std::iota(order.begin(), order.end(), 0);
      const double flat = *std::min_element(g.values.begin(), g.values.end());
      do {
        CHECK(multiple_inf(g, order) == flat);
      } while (std::next_permutation(order.begin(), order.end()));
    }
  }
  CHECK(multiple_inf({{1}, {4.5}}, {0}) == 4.5);
  CHECK(multiple_inf({{2, 2}, {3, 1, 1, 5}}, {1, 0}) == 1);
  CHECK_THROWS_AS(multiple_inf({{0}, {}}, {0}), DomainError);
}

TEST_CASE("decomposition bound worked values") {
  const auto a = verify_decomposition_bound(builtin("sqrt_prod"), DomainPoint{5, 7}, DomainPoint{2, 3});
  CHECK(a.q == std::vector<std::int64_t>{1, 1});
  CHECK(a.r == std::vector<double>{3, 4});
  const double direct = std::sqrt(12.0) + std::sqrt(9.0) + std::sqrt(8.0) + std::sqrt(6.0);
  CHECK(std::abs(a.rhs.value() - direct) <= 1e-9);
  CHECK(a.rhs.value() == doctest::Approx(11.741).epsilon(1e-4));
  CHECK(a.lhs.value() == doctest::Approx(std::sqrt(35.0)));
  CHECK(a.holds);
  CHECK(a.terms.size() == 4);

  const auto b = verify_decomposition_bound(builtin("full_shift_count_log"), DomainPoint{4, 6}, DomainPoint{2, 3});
  CHECK(b.r == std::vector<double>{2, 3});
  CHECK(b.rhs == ExtendedReal(24.0));
  CHECK(b.lhs == ExtendedReal(24.0));
  CHECK(b.holds);

  const auto c = verify_decomposition_bound(builtin("abs"), DomainPoint{7}, DomainPoint{2});
  CHECK(c.q == std::vector<std::int64_t>{2});
  CHECK(c.rhs == ExtendedReal(7.0));
  CHECK(c.holds);

  CHECK_THROWS_AS(verify_decomposition_bound(builtin("abs"), DomainPoint{3}, DomainPoint{2}), DomainError);
}

TEST_CASE("decomposition bound holds on random pairs") {
  std::mt19937_64 gen(31);
  std::uniform_real_distribution<double> t(0.1, 20), m(2, 50);
  std::uniform_int_distribution<int> ti(1, 10), mi(2, 30);
  for (const auto& name : builtin_names()) {
    const auto f = builtin(name);
    if (!f.metadata().claims_componentwise_subadditive) continue;
    CAPTURE(name);
    for (int i = 0; i < 1000; ++i) {
      std::vector<double> tv(f.dim()), xv(f.dim());
      for (std::size_t k = 0; k < f.dim(); ++k) {
        if (f.domain().integer) {
          tv[k] = ti(gen);
          xv[k] = tv[k] * mi(gen) + ti(gen) % static_cast<int>(tv[k]);
        } else {
          tv[k] = t(gen);
          xv[k] = tv[k] * m(gen);
        }
      }
      CHECK(verify_decomposition_bound(f, DomainPoint(xv), DomainPoint(tv)).holds);
    }
  }
}

TEST_CASE("orthant limits") {
  const FunctionOracle identity("identity", {1, OrthantWord::parse("1"), false},
                                [](std::span<const double> x) { return ExtendedReal(x[0]); });
  const GridSchedule s = GridSchedule::standard(1);
  const auto a = orthant_limit(identity, OrthantWord::parse("1"), s);
  CHECK(a.sense == LimitSense::sup);
  CHECK(a.bound == ExtendedReal(1.0));

  const auto lifted = lift_to_orthant(builtin("sqrt_prod"), OrthantWord::parse("11"));
  const auto b = orthant_limit(lifted, OrthantWord::parse("11"), GridSchedule::standard(2));
  CHECK(b.sense == LimitSense::inf);
  CHECK(b.bound <= ExtendedReal(0.01));
  CHECK(b.bound >= ExtendedReal(0.0));

  const auto abs = builtin("abs");
  const auto pos = orthant_limit(abs, OrthantWord::parse("0"), s);
  const auto neg = orthant_limit(abs, OrthantWord::parse("1"), s);
  CHECK(pos.bound == ExtendedReal(1.0));
  CHECK(neg.bound == ExtendedReal(-1.0));
  CHECK(pos.bound >= neg.bound);

  CHECK_THROWS_AS(orthant_limit(builtin("sqrt_prod"), OrthantWord::parse("10"), GridSchedule::standard(2)),
                  DomainError);
}

TEST_CASE("ray limits") {
  const GridSchedule s = GridSchedule::standard(1);
  const auto a = ray_limit(coordinate_sum(), DomainPoint{1, 1}, s);
  CHECK(a.best_upper == ExtendedReal(2.0));
  CHECK(a.status == LimitStatus::converged);
  const auto b = ray_limit(builtin("abs"), DomainPoint{-1}, s);
  CHECK(b.best_upper == ExtendedReal(1.0));
  const GridSchedule offset(DomainPoint{0.3}, 2.0, 30);
  const auto c = ray_limit(builtin("ceiling"), DomainPoint{1}, offset);
  CHECK(c.best_upper >= ExtendedReal(1.0));
  CHECK(c.best_upper.value() == doctest::Approx(1.0).epsilon(1e-6));
  CHECK_THROWS_AS(ray_limit(builtin("abs"), DomainPoint{0}, s), DomainError);
}

TEST_CASE("inner limit profiles") {
  const auto s = GridSchedule::standard(2);
  const std::vector<double> probes{1, 2, 3, 4, 5, 6};
  const auto a = inner_limit_profile(builtin("sqrt_prod"), {}, {1}, 0, probes, s);
  REQUIRE(a.values.size() == probes.size());
  for (const auto& v : a.values) CHECK(std::abs(v.value()) <= 1e-2);
  CHECK(a.subadditivity.empty());

  const auto b = inner_limit_profile(builtin("full_shift_count_log"), {}, {1}, 0, probes, s);
  for (std::size_t i = 0; i < probes.size(); ++i) CHECK(b.values[i] == ExtendedReal(probes[i]));
  CHECK(b.subadditivity.empty());
  CHECK(b.subadditivity.checked > 0);

  const auto c = inner_limit_profile(builtin("sqrt_prod"), {}, {1}, 0, {2}, s);
  CHECK(c.values.size() == 1);
  CHECK(c.subadditivity.empty());
  CHECK(c.subadditivity.checked == 0);

  CHECK_THROWS_AS(inner_limit_profile(builtin("sqrt_prod"), {}, {0}, 0, probes, s), DomainError);
}

TEST_CASE("bracket serialization") {
  const auto b = simultaneous_limit(builtin("full_shift_count_log"), GridSchedule::standard(2).with_levels(3));
  const auto json = bracket_to_json(b);
  for (const char* key : {"\"best_upper\"", "\"tail_estimate\"", "\"status\"", "\"delta\"", "\"R\"", "\"evaluations\""}) {
    CHECK(json.find(key) != std::string::npos);
  }
  const auto csv = samples_to_csv(b);
  CHECK(csv.rfind("shell,point,ratio\n0,1 1,1\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 17);
}

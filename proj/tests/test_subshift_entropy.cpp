#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "fekete/subshift_entropy.hpp"
#include "sft_oracle.hpp"

using namespace fekete;
using test_oracle::brute_count;

namespace {

std::uint64_t fibonacci(int n) {  // F(1) = F(2) = 1
  std::uint64_t a = 0, b = 1;
  for (int i = 0; i < n; ++i) {
    const auto t = a + b;
    a = b;
    b = t;
  }
  return a;
}

SftSpec random_sft(std::mt19937_64& gen, std::size_t dim) {
  std::uniform_int_distribution<int> alpha(2, 3), npat(1, 3), len(1, 3), off(0, 1);
  SftSpec s;
  s.alphabet = alpha(gen);
  s.dim = dim;
  std::uniform_int_distribution<int> sym(0, s.alphabet - 1);
  for (int p = npat(gen); p > 0; --p) {
    ForbiddenPattern fp;
    std::set<std::vector<std::int64_t>> seen;
    for (int j = len(gen); j > 0; --j) {
      std::vector<std::int64_t> o(dim);
      for (auto& c : o) c = off(gen);
      if (!seen.insert(o).second) continue;
      fp.offsets.push_back(o);
      fp.symbols.push_back(sym(gen));
    }
    s.forbidden.push_back(fp);
  }
  return s;
}

}  // namespace

TEST_CASE("full shift counts") {
  const auto fs = full_shift(2, 2);
  CHECK(count_patterns(fs, {2, 3}).count == 64);
  CHECK(log_complexity(fs, {2, 3}).value == ExtendedReal(6.0));
  for (std::int64_t a = 1; a <= 24; ++a) {
    for (std::int64_t b = 1; a * b <= 24; ++b) CHECK(count_patterns(fs, {a, b}).count == (BigInt(1) << (a * b)));
  }
  CHECK(transfer_matrix_count_1d(full_shift(3, 1), 4) == 81);
}

TEST_CASE("golden mean counts") {
  const auto g = golden_mean_1d();
  CHECK(count_patterns(g, {1}).count == 2);
  CHECK(count_patterns(g, {3}).count == 5);
  CHECK(brute_count(g, {3}) == 5);
  CHECK(transfer_matrix_count_1d(g, 3) == 5);
  CHECK(transfer_matrix_count_1d(g, 10) == 144);
  for (int n = 1; n <= 20; ++n) {
    CHECK(count_patterns(g, {n}).count == fibonacci(n + 2));
    CHECK(transfer_matrix_count_1d(g, n) == fibonacci(n + 2));
  }
  CHECK(dominant_eigenvalue_1d(g) == doctest::Approx((1 + std::sqrt(5.0)) / 2).epsilon(1e-10));
  CHECK(transfer_matrix_entropy_1d(g).value() == doctest::Approx(std::log2((1 + std::sqrt(5.0)) / 2)).epsilon(1e-10));
}

TEST_CASE("hard square counts match enumeration") {
  const auto hs = hard_square_2d();
  for (std::int64_t n = 1; n <= 4; ++n) CHECK(count_patterns(hs, {n, n}).count == brute_count(hs, {n, n}));
  CHECK(count_patterns(hs, {2, 2}).count == 7);
  CHECK(count_patterns(hs, {3, 3}).count == 63);
  CHECK(count_patterns(hs, {4, 4}).count == 1234);
  CHECK(count_patterns(hs, {2, 4}).count == count_patterns(hs, {4, 2}).count);
}

TEST_CASE("random SFTs agree with enumeration") {
  std::mt19937_64 gen(101);
  for (int i = 0; i < 40; ++i) {
    const std::size_t dim = 1 + i % 2;
    const auto s = random_sft(gen, dim);
    const std::vector<std::vector<std::int64_t>> boxes =
        dim == 1 ? std::vector<std::vector<std::int64_t>>{{1}, {4}, {7}}
                 : std::vector<std::vector<std::int64_t>>{{1, 1}, {2, 3}, {3, 3}};
    for (const auto& box : boxes) {
      CAPTURE(serialize_sft(s));
      CHECK(count_patterns(s, box).count == brute_count(s, box));
      if (dim == 1) CHECK(transfer_matrix_count_1d(s, box[0]) == brute_count(s, box));
    }
  }
}

TEST_CASE("entropy brackets") {
  const auto fsb = entropy_bounds(full_shift(2, 2), 6);
  for (const auto& r : fsb.rows) {
    CHECK(r.ratio == ExtendedReal(1.0));
    CHECK(r.running_min == ExtendedReal(1.0));
  }
  CHECK(fsb.best_upper == ExtendedReal(1.0));
  CHECK_FALSE(fsb.truncated);

  const auto g = entropy_bounds(golden_mean_1d(), 16);
  REQUIRE(g.rows.size() == 16);
  CHECK(g.rows[9].ratio.value() == doctest::Approx(std::log2(144.0) / 10));
  for (std::size_t i = 1; i < g.rows.size(); ++i) CHECK(g.rows[i].running_min <= g.rows[i - 1].running_min);
  REQUIRE(g.exact_1d);
  CHECK(*g.exact_1d == doctest::Approx(std::log2((1 + std::sqrt(5.0)) / 2)));
  CHECK(g.best_upper.value() >= *g.exact_1d);

  const auto hs = entropy_bounds(hard_square_2d(), 12);
  CHECK_FALSE(hs.truncated);
  CHECK(hs.rows[6].count == BigInt("1280128950"));
  CHECK(hs.rows[7].count == BigInt("660647962955"));
  for (std::size_t i = 1; i < hs.rows.size(); ++i) CHECK(hs.rows[i].running_min <= hs.rows[i - 1].running_min);

  const auto csv = entropy_rows_to_csv(g, 1);
  CHECK(csv.rfind("n1,count,log_complexity,ratio,running_min\n1,2,1,1,1\n", 0) == 0);
}

TEST_CASE("caps truncate brackets instead of failing") {
  CountCaps tight;
  tight.max_volume = 20;
  const auto b = entropy_bounds(hard_square_2d(), 8, tight);
  CHECK(b.truncated);
  CHECK_FALSE(b.truncation_reason.empty());
  CHECK(b.rows.size() == 4);
  CHECK_THROWS_AS(count_patterns(hard_square_2d(), {5, 5}, tight), CapExceeded);
  CountCaps few_states;
  few_states.max_states = 4;
  CHECK_THROWS_AS(count_patterns(hard_square_2d(), {6, 6}, few_states), CapExceeded);
}

TEST_CASE("thread count does not change counts") {
  CountCaps t1, t3;
  t3.threads = 3;
  for (std::int64_t n = 1; n <= 7; ++n) {
    CHECK(count_patterns(hard_square_2d(), {n, n}, t1).count == count_patterns(hard_square_2d(), {n, n}, t3).count);
  }
}

TEST_CASE("count submultiplicativity") {
  const auto g = check_count_submultiplicativity(golden_mean_1d(), 16);
  CHECK(g.empty());
  CHECK(g.checked > 0);
  CHECK(check_count_submultiplicativity(full_shift(2, 2), 5).empty());
  CHECK(check_count_submultiplicativity(hard_square_2d(), 6).empty());
}

TEST_CASE("box ratios") {
  const auto fs = folner_box_ratio(full_shift(2, 2), {{1, 1}, {2, 3}, {4, 4}});
  for (const auto& r : fs) CHECK(r.ratio == ExtendedReal(1.0));
  const auto hs = folner_box_ratio(hard_square_2d(), {{2, 4}, {4, 2}});
  CHECK(hs[0].count == hs[1].count);
  CHECK(hs[0].ratio == hs[1].ratio);
}

TEST_CASE("relabeling leaves counts unchanged") {
  const auto g = golden_mean_1d();
  const auto r = relabeled(g, {1, 0});
  CHECK(r.forbidden[0].symbols == std::vector<int>{0, 0});
  for (std::int64_t n = 1; n <= 12; ++n) CHECK(count_patterns(g, {n}).count == count_patterns(r, {n}).count);
  const auto hs = hard_square_2d();
  const auto hr = relabeled(hs, {1, 0});
  for (std::int64_t n = 1; n <= 5; ++n) CHECK(count_patterns(hs, {n, n}).count == count_patterns(hr, {n, n}).count);
  CHECK_THROWS_AS(relabeled(g, {0, 0}), DomainError);
}

TEST_CASE("spec parsing and validation") {
  const auto hs = hard_square_2d();
  const auto back = parse_sft(serialize_sft(hs));
  CHECK(serialize_sft(back) == serialize_sft(hs));
  CHECK(count_patterns(back, {3, 3}).count == 63);
  for (const auto& name : sft_fixture_names()) CHECK_NOTHROW(sft_fixture(name).validate());
  CHECK_THROWS_AS(parse_sft("{"), ParseError);
  CHECK_THROWS_AS(parse_sft(R"({"alphabet": 1, "dim": 1, "forbidden": []})"), DomainError);
  CHECK_THROWS_AS(parse_sft(R"({"alphabet": 2, "dim": 1, "forbidden": [{"offsets": [[0]], "symbols": [2]}]})"),
                  DomainError);
  CHECK_THROWS_AS(
      parse_sft(R"({"alphabet": 2, "dim": 1, "forbidden": [{"offsets": [[0], [0]], "symbols": [1, 1]}]})"),
      DomainError);
  CHECK_THROWS_AS(parse_sft(R"({"alphabet": 2, "dim": 2, "forbidden": [{"offsets": [[0]], "symbols": [1]}]})"),
                  DomainError);
  CHECK_THROWS_AS(count_patterns(golden_mean_1d(), {0}), DomainError);
  CHECK_THROWS_AS(count_patterns(golden_mean_1d(), {2, 2}), DomainError);
}

TEST_CASE("an SFT with no admissible patterns has -inf log complexity") {
  SftSpec s;
  s.alphabet = 2;
  s.dim = 1;
  s.forbidden = {{{{0}}, {0}}, {{{0}}, {1}}};
  const auto lc = log_complexity(s, {3});
  CHECK(lc.empty);
  CHECK(lc.value.is_minus_infinity());
  CHECK(lc.count == 0);
  CHECK(transfer_matrix_entropy_1d(s).is_minus_infinity());
}

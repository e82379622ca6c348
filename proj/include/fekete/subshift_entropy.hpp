#pragma once

// Pattern counts and entropy upper bounds for subshifts of finite type on Z^d.
//
// Counts are of locally admissible patterns: symbol grids on a box with no
// forbidden translate fully inside the box. Whether such a pattern extends
// to a full configuration is not checked.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "fekete/domain_core.hpp"
#include "fekete/subadd_check.hpp"

namespace fekete {

using BigInt = boost::multiprecision::cpp_int;

struct ForbiddenPattern {
  std::vector<std::vector<std::int64_t>> offsets;
  std::vector<int> symbols;  // symbols[i] sits at offsets[i]
};

struct SftSpec {
  int alphabet = 2;
  std::size_t dim = 1;
  std::vector<ForbiddenPattern> forbidden;

  /// Throws DomainError unless a >= 2, d >= 1, symbols are in [0, a), offsets
  /// are distinct with the right dimension and fit in a box of side 8.
  void validate() const;
  /// Shifts every pattern so its smallest offset per axis is 0.
  SftSpec normalized() const;
};

inline constexpr std::int64_t max_pattern_side = 8;

SftSpec full_shift(int alphabet = 2, std::size_t dim = 2);
SftSpec golden_mean_1d();
SftSpec hard_square_2d();
std::vector<std::string> sft_fixture_names();
/// "full_shift", "golden_mean_1d" or "hard_square_2d".
SftSpec sft_fixture(const std::string& name);

/// {"alphabet": a, "dim": d, "forbidden": [{"offsets": [[..]], "symbols": [..]}]}
SftSpec parse_sft(const std::string& json_text);
std::string serialize_sft(const SftSpec& sft);
/// Fixture name or path to a JSON spec file.
SftSpec load_sft(const std::string& name_or_path);

/// Relabels symbols by perm (symbol s becomes perm[s]).
SftSpec relabeled(const SftSpec& sft, const std::vector<int>& perm);

enum class Admissibility { locally_admissible };
std::string to_string(Admissibility a);

struct CountCaps {
  std::size_t max_volume = 144;
  /// Live frontier states allowed at any cell.
  std::size_t max_states = 4'000'000;
  std::size_t threads = 1;
};

struct PatternCount {
  std::vector<std::int64_t> sides;
  BigInt count;
  Admissibility admissibility = Admissibility::locally_admissible;
};

/// Exact count over the box [1, n_1] x ... x [1, n_d]. Throws DomainError on
/// bad sides and CapExceeded past the caps.
PatternCount count_patterns(const SftSpec& sft, const std::vector<std::int64_t>& sides,
                            const CountCaps& caps = {});

struct LogComplexity {
  ExtendedReal value;  // log_a(count), -inf when empty
  bool empty = false;
  BigInt count;
};

LogComplexity log_complexity(const SftSpec& sft, const std::vector<std::int64_t>& sides,
                             const CountCaps& caps = {});

struct EntropyRow {
  std::vector<std::int64_t> sides;
  BigInt count;
  ExtendedReal log_complexity;
  ExtendedReal ratio;        // log_complexity / volume
  ExtendedReal running_min;  // min of ratio over this and earlier rows
};

struct EntropyBracket {
  std::vector<EntropyRow> rows;
  ExtendedReal best_upper = ExtendedReal::plus_infinity();
  /// log_a of the dominant transfer-matrix eigenvalue (d = 1 only).
  std::optional<double> exact_1d;
  bool truncated = false;
  std::string truncation_reason;
  Admissibility admissibility = Admissibility::locally_admissible;
};

/// Ratios f(n, ..., n) / n^d for n = 1..max_side. Stops at the first cap
/// violation and flags the bracket as truncated.
EntropyBracket entropy_bounds(const SftSpec& sft, std::int64_t max_side, const CountCaps& caps = {});

/// Counts length-n words by dynamic programming over the last (w - 1)
/// symbols, w the longest forbidden pattern. d = 1 only; w <= 8.
BigInt transfer_matrix_count_1d(const SftSpec& sft, std::int64_t n);

/// Power iteration on the shifted transfer matrix A + I.
double dominant_eigenvalue_1d(const SftSpec& sft);
/// log_a of the dominant eigenvalue; -inf when no infinite word exists.
ExtendedReal transfer_matrix_entropy_1d(const SftSpec& sft);

/// count(.., p + q, ..) <= count(.., p, ..) * count(.., q, ..) for every box
/// with sides <= side_cap, every axis and every split. Exact in integers.
ViolationReport check_count_submultiplicativity(const SftSpec& sft, std::int64_t side_cap,
                                                const CountCaps& caps = {});

struct BoxRatio {
  std::vector<std::int64_t> box;
  BigInt count;
  ExtendedReal ratio;
};

std::vector<BoxRatio> folner_box_ratio(const SftSpec& sft,
                                       const std::vector<std::vector<std::int64_t>>& boxes,
                                       const CountCaps& caps = {});

/// n1..nd,count,log_complexity,ratio,running_min
std::string entropy_rows_to_csv(const EntropyBracket& bracket, std::size_t dim);

}  // namespace fekete

#pragma once

// Limits of f(x)/(x_1 ... x_d) along the product-order net of the positive
// orthant and its relatives (iterated, diagonal, orthant and ray limits).
//
// Only best_upper is certified, and only when f really is componentwise
// subadditive: the limit then equals the infimum of the ratios, so every
// evaluated ratio bounds it from above. The convergence status is an
// empirical statement about the sampled (cofinal) points.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fekete/function_registry.hpp"
#include "fekete/subadd_check.hpp"

namespace fekete {

enum class LimitStatus {
  converged,
  diverging_to_minus_infinity,
  diverging_to_plus_infinity,
  inconclusive,
};

std::string to_string(LimitStatus s);

struct EstimatorConfig {
  double delta = 1e-2;
  /// Ratios beyond +-threshold on the last shell count as divergence.
  double divergence_threshold = 1e12;
  /// A convergence tail must span at least this many schedule levels.
  int min_tail_levels = 3;
  /// Shells inspected by the steady-drift divergence test.
  int trend_window = 8;
  /// Iterated limits: level count grows by this factor per nesting depth so
  /// inner limits are taken at larger scales than the outer variables.
  int inner_level_factor = 4;
  int max_levels = 250;
  /// Refuse simultaneous schedules with more grid points than this.
  std::size_t max_points = 5'000'000;
};

struct RatioSample {
  DomainPoint point;
  ExtendedReal ratio;
  int shell = 0;
};

struct LimitBracket {
  ExtendedReal best_upper;     // min over every evaluated ratio
  ExtendedReal tail_estimate;  // min over the last shell
  LimitStatus status = LimitStatus::inconclusive;
  double delta = 0.0;
  std::optional<DomainPoint> R;  // convergence threshold (converged only)
  std::optional<int> R_level;
  std::size_t evaluations = 0;
  std::vector<ExtendedReal> running_best;  // best_upper after each shell
  std::vector<RatioSample> samples;
};

/// Simultaneous limit over the product order. Shell k holds the grid points
/// whose largest level is k; converged(delta, R) means every sampled ratio at
/// points >= R lies within delta of best_upper, R the smallest such diagonal
/// schedule point.
LimitBracket simultaneous_limit(const FunctionOracle& f, const GridSchedule& schedule,
                                const EstimatorConfig& config = {});

/// Limit estimate for a one-variable sequence of ratios.
struct SequenceEstimate {
  ExtendedReal value;
  ExtendedReal best_upper;
  ExtendedReal tail;  // last value
  LimitStatus status = LimitStatus::inconclusive;
  std::optional<int> R_level;
};

SequenceEstimate estimate_sequence_limit(const std::vector<ExtendedReal>& values,
                                         const EstimatorConfig& config);

struct LevelSummary {
  std::size_t axis = 0;
  int levels = 0;
  LimitStatus worst = LimitStatus::converged;
  std::map<LimitStatus, std::size_t> counts;
};

struct IteratedLimit {
  ExtendedReal value;
  LimitStatus status = LimitStatus::inconclusive;
  /// Index 0 is the outermost limit.
  std::vector<LevelSummary> levels;
  std::size_t evaluations = 0;
};

/// lim over x_{order[0]} of ... lim over x_{order[d-1]} of f(x)/prod(x).
/// order is a 0-based permutation, outermost first.
IteratedLimit iterated_limit(const FunctionOracle& f, const std::vector<std::size_t>& order,
                             const GridSchedule& schedule, const EstimatorConfig& config = {});

/// x_i(t) for one axis.
using Path = std::function<double(double)>;

/// Ratios f(x_1(t), ..., x_d(t)) / prod x_i(t) along a one-variable schedule.
/// Each path must grow past first * g^(L/2) over the schedule.
LimitBracket diagonal_limit(const FunctionOracle& f, const std::vector<Path>& paths,
                            const GridSchedule& t_schedule, const EstimatorConfig& config = {});

/// Dense grid of reals, row-major (last axis fastest).
struct DenseGrid {
  std::vector<std::size_t> shape;
  std::vector<double> values;
};

/// Nested minimum along order (outermost first); checked against the flat min.
double multiple_inf(const DenseGrid& grid, const std::vector<std::size_t>& order);

struct DecompositionTerm {
  std::string word;   // w as a bit string, axis 1 first
  double coefficient;  // q_1^{w_1} ... q_d^{w_d}
  DomainPoint point;  // (y_1^{(w_1)}, ..., y_d^{(w_d)})
  ExtendedReal value;
  ExtendedReal term;
};

struct DecompositionBound {
  ExtendedReal lhs;
  ExtendedReal rhs;
  bool holds = false;
  std::vector<std::int64_t> q;
  std::vector<double> r;
  std::vector<DecompositionTerm> terms;
};

/// f(x) <= sum over w of q^w f(y^(w)) with x_i = q_i t_i + r_i, y^(0) = r,
/// y^(1) = t. Needs x_i >= 2 t_i.
DecompositionBound verify_decomposition_bound(const FunctionOracle& f, const DomainPoint& x,
                                              const DomainPoint& t);

enum class LimitSense { inf, sup };

struct OrthantBracket {
  LimitSense sense = LimitSense::inf;
  /// Upper bound (inf sense, even parity) or lower bound (sup sense, odd).
  ExtendedReal bound;
  ExtendedReal tail_estimate;
  LimitStatus status = LimitStatus::inconclusive;
  /// Bracket of the reflected function on the main orthant.
  LimitBracket reflected;
};

/// Limit over the orthant R_w via reflection to the main orthant.
OrthantBracket orthant_limit(const FunctionOracle& f, const OrthantWord& w,
                             const GridSchedule& schedule, const EstimatorConfig& config = {});

/// Limit of f(t v)/t as t -> +inf.
LimitBracket ray_limit(const FunctionOracle& f, const DomainPoint& direction,
                       const GridSchedule& t_schedule, const EstimatorConfig& config = {});

struct InnerProfile {
  std::vector<double> probes;
  std::vector<ExtendedReal> values;
  std::vector<LimitStatus> statuses;
  ViolationReport subadditivity;
};

/// h(x_i) = lim_{x_{j_1}} ... lim_{x_{j_k}} f(x) / (x_{j_1} ... x_{j_k}) at each
/// probe value, remaining axes held at the given values; the samples are
/// then checked for subadditivity. limit_axes are outermost first.
InnerProfile inner_limit_profile(const FunctionOracle& f, const std::map<std::size_t, double>& fixed,
                                 const std::vector<std::size_t>& limit_axes,
                                 std::size_t probe_axis, const std::vector<double>& probe_grid,
                                 const GridSchedule& schedule, const EstimatorConfig& config = {});

/// {"best_upper","tail_estimate","status","delta","R","evaluations"}.
std::string bracket_to_json(const LimitBracket& b);
/// shell,point,ratio rows.
std::string samples_to_csv(const LimitBracket& b);

}  // namespace fekete

#pragma once

// Sampling-based refutation of subadditivity-type inequalities. A clean
// report is evidence, never proof.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fekete/function_registry.hpp"

namespace fekete {

enum class ViolationKind { joint, componentwise, four_term, monoid, set_union };

std::string to_string(ViolationKind kind);

/// One refuted instance. margin = lhs - rhs is always > the tolerance.
struct Violation {
  ViolationKind kind = ViolationKind::joint;
  std::optional<std::size_t> axis;
  /// The input tuples: (x, y) for pair checks, (x) for monoid checks, the two
  /// sets for set_union.
  std::vector<std::vector<double>> witness;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;

  friend bool operator==(const Violation&, const Violation&) = default;
};

struct ViolationReport {
  std::vector<Violation> violations;  // sorted, duplicates removed
  std::size_t checked = 0;            // inequality instances evaluated

  bool empty() const { return violations.empty(); }
  std::size_t size() const { return violations.size(); }
  /// Violations of the given kind (and axis, if given).
  std::vector<Violation> of_kind(ViolationKind kind,
                                 std::optional<std::size_t> axis = std::nullopt) const;
  /// First violation whose witness equals the given tuples, if any.
  const Violation* find(const std::vector<std::vector<double>>& witness) const;

  /// Appends another report and restores the sorted, de-duplicated order.
  void merge(ViolationReport other);
};

struct AxisRange {
  double lo = 0.1;
  double hi = 100.0;
};

/// Reproducible sample stream description.
struct SampleBudget {
  std::size_t count = 10000;
  std::uint64_t seed = 0;
  /// Per-axis sampling ranges; empty means defaults derived from the domain:
  /// [0.1, 100] on positive real axes, [1, 100] on positive integer axes,
  /// mirrored on negative axes and [-100, 100] on unrestricted axes.
  std::vector<AxisRange> ranges;
  /// Also test every pair drawn from small lattice values ({1,2,3} on
  /// positive axes) before the random stream.
  bool lattice_probes = true;
  /// Shrink random hits toward the smallest witness that still violates.
  bool shrink = true;
  std::size_t threads = 1;
};

/// Relative tolerance 2^-26 * max(1, |lhs|, |rhs|).
double violation_tolerance(double lhs, double rhs);

/// f(x + y) <= f(x) + f(y).
ViolationReport check_joint(const FunctionOracle& f, const SampleBudget& budget);
/// Same inequality on explicitly given pairs (no shrinking).
ViolationReport check_joint_pairs(const FunctionOracle& f,
                                  const std::vector<std::pair<DomainPoint, DomainPoint>>& pairs);

/// For each axis i: f(.., a + b, ..) <= f(.., a, ..) + f(.., b, ..).
ViolationReport check_componentwise(const FunctionOracle& f, const SampleBudget& budget);

/// f(x + y) <= sum over w in {0,1}^d of f(z_w), z_w picking x_i (w_i = 0) or y_i.
ViolationReport check_four_term(const FunctionOracle& f, const SampleBudget& budget);
ViolationReport check_four_term_pairs(const FunctionOracle& f,
                                      const std::vector<std::pair<DomainPoint, DomainPoint>>& pairs);

/// f(0) >= 0 and f(x) + f(-x) >= 0. Needs 0 and -x in the domain.
ViolationReport check_monoid_sign(const FunctionOracle& f, const SampleBudget& budget);

/// g(A u B) <= g(A) + g(B) for every pair (A, B), A possibly equal to B.
ViolationReport check_set_union(const FiniteSetFunction& g, const std::vector<IntSet>& family);

/// check_joint applied to h(n) = f(n + shift).
ViolationReport check_shifted_subadditivity(const FunctionOracle& f, std::int64_t shift,
                                            const SampleBudget& budget);
FunctionOracle shifted(const FunctionOracle& f, std::int64_t shift);

/// Subadditivity of a sampled one-variable function: every pair of sample
/// points whose sum is also a sample point is tested.
ViolationReport check_sampled_subadditivity(const std::vector<double>& points,
                                            const std::vector<ExtendedReal>& values);

/// {"kind","axis","witness","lhs","rhs","margin"} records, one array.
std::string report_to_json(const ViolationReport& report);
/// Same columns as the JSON records.
std::string report_to_csv(const ViolationReport& report);

}  // namespace fekete

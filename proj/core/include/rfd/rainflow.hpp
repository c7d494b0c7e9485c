#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "rfd/battery.hpp"

namespace rfd::rainflow {

/// Normalized state-of-charge samples. A profile of T+1 samples describes T
/// power intervals; interval t runs from sample t to sample t+1.
class SocProfile {
 public:
  /// Values must be finite and lie in [0, 1]; values within 1e-9 outside
  /// that range (accumulated rounding) are clamped. Throws InputError.
  explicit SocProfile(std::vector<double> values, double interval_hours = 1.0);

  [[nodiscard]] std::span<const double> values() const { return values_; }
  [[nodiscard]] double interval_hours() const { return interval_hours_; }
  [[nodiscard]] std::size_t size() const { return values_.size(); }
  [[nodiscard]] std::size_t intervals() const { return values_.size() - 1; }

 private:
  std::vector<double> values_;
  double interval_hours_;
};

struct TurningPoints {
  std::vector<std::size_t> indices;
  std::vector<double> values;

  [[nodiscard]] std::size_t size() const { return indices.size(); }
};

enum class Direction { charge, discharge };
enum class CycleKind { half, full_member };

std::string_view to_string(Direction direction);
std::string_view to_string(CycleKind kind);

/// Part of one interval's SoC movement attributed to a half cycle.
struct IntervalShare {
  std::size_t interval = 0;
  double amount = 0.0;    // SoC owned, > 0
  double fraction = 0.0;  // amount / |s(t+1) - s(t)|
};

struct HalfCycle {
  double depth = 0.0;
  Direction direction = Direction::charge;
  CycleKind kind = CycleKind::half;
  // Sample indices of the two turning points whose SoC difference is the
  // depth: depth == |s(span_end) - s(span_begin)|, span_begin < span_end.
  // For both halves of a full cycle this is the span of the first half.
  std::size_t span_begin = 0;
  std::size_t span_end = 0;
  // Sample index where this half starts moving; differs from span_begin only
  // for the closing half of a full cycle.
  std::size_t start = 0;
  // +1 when depth == s(span_end) - s(span_begin), -1 otherwise.
  int span_sign = 1;
  // Index of the other half within CycleSet::half_cycles for full cycles.
  std::optional<std::size_t> partner;
  std::vector<IntervalShare> shares;
  std::vector<std::size_t> junction_intervals;

  [[nodiscard]] std::vector<std::size_t> intervals() const;
};

struct CycleSet {
  std::vector<HalfCycle> half_cycles;
  std::size_t source_length = 0;  // number of intervals T

  [[nodiscard]] std::vector<double> depths() const;
  [[nodiscard]] double total_charge_depth() const;
  [[nodiscard]] double total_discharge_depth() const;
  [[nodiscard]] std::size_t full_cycle_count() const;
};

struct CountOptions {
  // Interval attribution costs O(T * nesting depth); depth-only callers such
  // as the solver's inner loop switch it off.
  bool assign_intervals = true;
};

/// Local extrema of the series. Runs of equal values collapse to their first
/// sample; the first and last samples are always included.
TurningPoints extract_turning_points(std::span<const double> values);
TurningPoints extract_turning_points(const SocProfile& profile);

/// Rainflow counting by global-extremum pairing.
///
/// The global maximum and minimum (earliest occurrence on ties) bound the
/// deepest half cycle. Walking backwards from whichever comes first, half
/// cycles alternate between the most extreme opposite point earlier in the
/// history; walking forwards from the other, between the most extreme
/// opposite point later in the history. What remains between consecutive
/// points of that backbone are full cycles, each reported as a charging and a
/// discharging half of equal depth. Zero-depth cycles are never emitted.
///
/// Accepts any finite series (values need not lie in [0, 1]).
CycleSet count_cycles(std::span<const double> values, CountOptions options = {});
CycleSet count_cycles(const SocProfile& profile, CountOptions options = {});

/// Depth of every half cycle recomputed from interval power:
///   charge:    sum over owned intervals of fraction * c(t) * t_s * eta_c / E
///   discharge: sum over owned intervals of fraction * d(t) * t_s / (eta_d * E)
/// `cycles` must come from count_cycles with intervals assigned, on the
/// trajectory produced by (charge, discharge). The result equals the SoC
/// depths whenever no interval both charges and discharges.
std::vector<double> cycle_depths_from_power(std::span<const double> charge,
                                            std::span<const double> discharge,
                                            const CycleSet& cycles,
                                            const BatteryParams& params);

/// Routes one weight per half cycle onto SoC increments: interval t receives
/// sum of weight[h] * span_sign of h over half cycles h with
/// span_begin <= t < span_end. With weight[h] = phi'(depth_h) this is the
/// gradient of the half-cycle cost with respect to s(t+1) - s(t) wherever the
/// cycle structure is locally stable. `out` has one entry per interval and is
/// overwritten.
void span_gradient(const CycleSet& cycles, std::span<const double> weights, std::span<double> out);

}  // namespace rfd::rainflow

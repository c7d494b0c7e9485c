#include "rfd/rainflow.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rfd/error.hpp"

namespace rfd::rainflow {

namespace {

constexpr double kClampTolerance = 1e-9;

struct FullCyclePair {
  std::size_t first;   // turning-point position where the first half starts
  std::size_t second;  // turning-point position where the first half ends
};

// Walks forward from `from` claiming every portion of SoC movement that pushes
// the running extreme (started at `level`) toward `target`. Stops at `target`
// or at sample `stop` if given.
void claim_intervals(HalfCycle& half, std::span<const double> values, std::size_t from,
                     double level, double target, std::size_t stop) {
  const bool up = target > level;
  double run = level;
  for (std::size_t t = from; t < stop && t + 1 < values.size(); ++t) {
    const double a = values[t];
    const double b = values[t + 1];
    double amount = 0.0;
    if (up && b > run) {
      const double reach = std::min(b, target);
      amount = reach - run;
      run = reach;
    } else if (!up && b < run) {
      const double reach = std::max(b, target);
      amount = run - reach;
      run = reach;
    }
    if (amount > 0.0) {
      half.shares.push_back({t, amount, amount / std::abs(b - a)});
    }
    if (run == target) break;
  }
}

Direction direction_of(double from, double to) {
  return to > from ? Direction::charge : Direction::discharge;
}

}  // namespace

SocProfile::SocProfile(std::vector<double> values, double interval_hours)
    : values_(std::move(values)), interval_hours_(interval_hours) {
  if (values_.empty()) throw InputError("SoC profile must contain at least one sample");
  if (!(interval_hours_ > 0.0) || !std::isfinite(interval_hours_)) {
    throw InputError("SoC profile interval length must be positive");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    double& v = values_[i];
    if (!std::isfinite(v)) {
      throw InputError("SoC sample " + std::to_string(i) + " is not finite");
    }
    if (v < -kClampTolerance || v > 1.0 + kClampTolerance) {
      throw InputError("SoC sample " + std::to_string(i) + " lies outside [0, 1]");
    }
    v = std::clamp(v, 0.0, 1.0);
  }
}

std::string_view to_string(Direction direction) {
  return direction == Direction::charge ? "charge" : "discharge";
}

std::string_view to_string(CycleKind kind) {
  return kind == CycleKind::half ? "half" : "full";
}

std::vector<std::size_t> HalfCycle::intervals() const {
  std::vector<std::size_t> out;
  out.reserve(shares.size());
  for (const auto& share : shares) out.push_back(share.interval);
  return out;
}

std::vector<double> CycleSet::depths() const {
  std::vector<double> out;
  out.reserve(half_cycles.size());
  for (const auto& h : half_cycles) out.push_back(h.depth);
  return out;
}

double CycleSet::total_charge_depth() const {
  double sum = 0.0;
  for (const auto& h : half_cycles) {
    if (h.direction == Direction::charge) sum += h.depth;
  }
  return sum;
}

double CycleSet::total_discharge_depth() const {
  double sum = 0.0;
  for (const auto& h : half_cycles) {
    if (h.direction == Direction::discharge) sum += h.depth;
  }
  return sum;
}

std::size_t CycleSet::full_cycle_count() const {
  std::size_t n = 0;
  for (const auto& h : half_cycles) {
    if (h.kind == CycleKind::full_member) ++n;
  }
  return n / 2;
}

TurningPoints extract_turning_points(std::span<const double> values) {
  if (values.empty()) throw InputError("cannot extract turning points of an empty series");
  // Collapse flat runs to their first sample.
  std::vector<std::size_t> runs;
  runs.reserve(values.size());
  runs.push_back(0);
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] != values[runs.back()]) runs.push_back(i);
  }

  TurningPoints tp;
  tp.indices.reserve(runs.size());
  tp.values.reserve(runs.size());
  auto keep = [&](std::size_t i) {
    tp.indices.push_back(i);
    tp.values.push_back(values[i]);
  };
  keep(runs.front());
  for (std::size_t k = 1; k + 1 < runs.size(); ++k) {
    const double before = values[runs[k]] - values[runs[k - 1]];
    const double after = values[runs[k + 1]] - values[runs[k]];
    if ((before > 0.0) != (after > 0.0)) keep(runs[k]);
  }
  if (runs.size() > 1) keep(runs.back());
  return tp;
}

TurningPoints extract_turning_points(const SocProfile& profile) {
  return extract_turning_points(profile.values());
}

CycleSet count_cycles(std::span<const double> values, CountOptions options) {
  const TurningPoints tp = extract_turning_points(values);
  CycleSet result;
  result.source_length = values.size() - 1;
  const std::size_t n = tp.size();
  if (n < 2) return result;
  const auto& v = tp.values;

  // Prefix extremes for the backward walk (earliest occurrence wins) and
  // suffix extremes for the forward walk (latest occurrence wins).
  std::vector<std::size_t> prefix_min(n), prefix_max(n), suffix_min(n), suffix_max(n);
  prefix_min[0] = prefix_max[0] = 0;
  for (std::size_t k = 1; k < n; ++k) {
    prefix_min[k] = v[k] < v[prefix_min[k - 1]] ? k : prefix_min[k - 1];
    prefix_max[k] = v[k] > v[prefix_max[k - 1]] ? k : prefix_max[k - 1];
  }
  suffix_min[n - 1] = suffix_max[n - 1] = n - 1;
  for (std::size_t k = n - 1; k-- > 0;) {
    suffix_min[k] = v[k] < v[suffix_min[k + 1]] ? k : suffix_min[k + 1];
    suffix_max[k] = v[k] > v[suffix_max[k + 1]] ? k : suffix_max[k + 1];
  }

  const std::size_t global_max = prefix_max[n - 1];
  const std::size_t global_min = prefix_min[n - 1];
  const std::size_t first = std::min(global_max, global_min);
  const std::size_t second = std::max(global_max, global_min);

  std::vector<std::size_t> backbone;
  {
    bool want_min = first == global_max;
    for (std::size_t cur = first; cur > 0;) {
      cur = want_min ? prefix_min[cur - 1] : prefix_max[cur - 1];
      backbone.push_back(cur);
      want_min = !want_min;
    }
    std::reverse(backbone.begin(), backbone.end());
    backbone.push_back(first);
    backbone.push_back(second);
    bool want_max = second == global_min;
    for (std::size_t cur = second; cur + 1 < n;) {
      cur = want_max ? suffix_max[cur + 1] : suffix_min[cur + 1];
      backbone.push_back(cur);
      want_max = !want_max;
    }
  }

  // Residual full cycles between consecutive backbone points. The segment
  // start is an anchor that only leaves the stack when the profile returns
  // exactly to its level; the last anchor standing starts the backbone half.
  std::vector<FullCyclePair> full_cycles;
  std::vector<std::size_t> half_starts;
  half_starts.reserve(backbone.size());
  std::vector<std::size_t> stack;
  for (std::size_t k = 0; k + 1 < backbone.size(); ++k) {
    const std::size_t a = backbone[k];
    const std::size_t b = backbone[k + 1];
    stack.clear();
    stack.push_back(a);
    for (std::size_t j = a + 1; j <= b; ++j) {
      stack.push_back(j);
      while (stack.size() >= 3) {
        const std::size_t p2 = stack[stack.size() - 1];
        const std::size_t p1 = stack[stack.size() - 2];
        const std::size_t p0 = stack[stack.size() - 3];
        if (std::abs(v[p2] - v[p1]) < std::abs(v[p1] - v[p0])) break;
        full_cycles.push_back({p0, p1});
        stack.resize(stack.size() - 3);
        stack.push_back(p2);
      }
    }
    half_starts.push_back(stack.front());
  }

  auto& halves = result.half_cycles;
  halves.reserve(half_starts.size() + 2 * full_cycles.size());
  for (std::size_t k = 0; k < half_starts.size(); ++k) {
    const std::size_t p = half_starts[k];
    const std::size_t q = backbone[k + 1];
    HalfCycle h;
    h.depth = std::abs(v[q] - v[p]);
    h.direction = direction_of(v[p], v[q]);
    h.kind = CycleKind::half;
    h.span_begin = h.start = tp.indices[p];
    h.span_end = tp.indices[q];
    h.span_sign = v[q] > v[p] ? 1 : -1;
    halves.push_back(std::move(h));
  }
  for (const auto& fc : full_cycles) {
    const double lo = v[fc.first];
    const double hi = v[fc.second];
    HalfCycle opening;
    opening.depth = std::abs(hi - lo);
    opening.kind = CycleKind::full_member;
    opening.span_begin = opening.start = tp.indices[fc.first];
    opening.span_end = tp.indices[fc.second];
    opening.span_sign = hi > lo ? 1 : -1;
    opening.direction = direction_of(lo, hi);
    HalfCycle closing = opening;
    closing.direction = direction_of(hi, lo);
    closing.start = tp.indices[fc.second];
    halves.push_back(std::move(opening));
    halves.push_back(std::move(closing));
  }

  if (options.assign_intervals) {
    const std::size_t none = values.size();
    for (auto& h : halves) {
      if (h.kind == CycleKind::half) {
        claim_intervals(h, values, h.start, values[h.start], values[h.span_end], h.span_end);
      } else if (h.start == h.span_begin) {
        claim_intervals(h, values, h.start, values[h.span_begin], values[h.span_end], h.span_end);
      } else {
        claim_intervals(h, values, h.start, values[h.span_end], values[h.span_begin], none);
      }
    }
    std::vector<unsigned> owners(result.source_length, 0);
    for (const auto& h : halves) {
      for (const auto& s : h.shares) ++owners[s.interval];
    }
    for (auto& h : halves) {
      for (const auto& s : h.shares) {
        if (owners[s.interval] > 1) h.junction_intervals.push_back(s.interval);
      }
    }
  }

  // Chronological order by the sample where each half starts moving; the two
  // halves of a full cycle are linked through `partner`.
  std::vector<std::size_t> order(halves.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return halves[x].start < halves[y].start;
  });
  std::vector<std::size_t> position(halves.size());
  for (std::size_t i = 0; i < order.size(); ++i) position[order[i]] = i;
  std::vector<HalfCycle> sorted;
  sorted.reserve(halves.size());
  for (std::size_t i : order) sorted.push_back(std::move(halves[i]));
  const std::size_t backbone_halves = half_starts.size();
  for (std::size_t f = 0; f < full_cycles.size(); ++f) {
    const std::size_t opening = position[backbone_halves + 2 * f];
    const std::size_t closing = position[backbone_halves + 2 * f + 1];
    sorted[opening].partner = closing;
    sorted[closing].partner = opening;
  }
  result.half_cycles = std::move(sorted);
  return result;
}

CycleSet count_cycles(const SocProfile& profile, CountOptions options) {
  return count_cycles(profile.values(), options);
}

std::vector<double> cycle_depths_from_power(std::span<const double> charge,
                                            std::span<const double> discharge,
                                            const CycleSet& cycles,
                                            const BatteryParams& params) {
  if (charge.size() != discharge.size() || charge.size() != cycles.source_length) {
    throw InputError("cycle_depths_from_power: power vectors must have one entry per interval (" +
                     std::to_string(cycles.source_length) + ")");
  }
  const double kc = params.charge_gain();
  const double kd = params.discharge_gain();
  std::vector<double> depths;
  depths.reserve(cycles.half_cycles.size());
  for (const auto& h : cycles.half_cycles) {
    if (h.depth > 0.0 && h.shares.empty()) {
      throw InputError("cycle_depths_from_power: cycles were counted without interval assignment");
    }
    double depth = 0.0;
    for (const auto& s : h.shares) {
      depth += s.fraction *
               (h.direction == Direction::charge ? charge[s.interval] * kc : discharge[s.interval] * kd);
    }
    depths.push_back(depth);
  }
  return depths;
}

void span_gradient(const CycleSet& cycles, std::span<const double> weights, std::span<double> out) {
  if (weights.size() != cycles.half_cycles.size() || out.size() != cycles.source_length) {
    throw InputError("span_gradient: size mismatch");
  }
  std::fill(out.begin(), out.end(), 0.0);
  if (out.empty()) return;
  // Difference array over intervals; the span end is exclusive.
  std::vector<double> delta(out.size() + 1, 0.0);
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const auto& h = cycles.half_cycles[i];
    const double w = weights[i] * h.span_sign;
    delta[h.span_begin] += w;
    delta[h.span_end] -= w;
  }
  double running = 0.0;
  for (std::size_t t = 0; t < out.size(); ++t) {
    running += delta[t];
    out[t] = running;
  }
}

}  // namespace rfd::rainflow

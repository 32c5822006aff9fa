#pragma once
// Boundary descriptions, piecewise-linear discretization, and the merged
// (breakpoints + jump times) partition with jump-adjusted boundary values.

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "bcp/jump_model.hpp"

namespace bcp {

struct ConstantBoundary {
  double level = 1.0;
};

/// slope * s + intercept
struct LinearBoundary {
  double slope = 0.0;
  double intercept = 1.0;
};

/// Upper line a*s + b, lower line -(c*s + d).
struct TwoSidedLinearBoundary {
  double a = 0.0;
  double b = 1.0;
  double c = 0.0;
  double d = 1.0;
};

/// Linear interpolation through (nodes[i], values[i]); nodes start at 0 and
/// end at the horizon.
struct PiecewiseLinearBoundary {
  std::vector<double> nodes;
  std::vector<double> values;

  double value_at(double s) const;
};

/// Arbitrary s -> b(s), approximated on `points` equal subintervals.
struct GeneralBoundary {
  std::function<double(double)> fn;
  int points = 32;
};

using Boundary = std::variant<ConstantBoundary, LinearBoundary, TwoSidedLinearBoundary,
                              PiecewiseLinearBoundary, GeneralBoundary>;

/// Throws std::domain_error on a malformed boundary for horizon t.
void validate(const Boundary& b, double t);

bool is_two_sided(const Boundary& b);

/// Upper boundary value at s (for two-sided: the upper line).
double upper_value(const Boundary& b, double s);

/// Equally spaced nodes i*t/n, i = 0..n, with values b(s_i).
PiecewiseLinearBoundary discretize(const GeneralBoundary& b, double t);

/// Any one-sided boundary as a piecewise-linear one on [0, t].
PiecewiseLinearBoundary to_piecewise(const Boundary& b, double t);

struct MergedPartition {
  double start_level = 0.0;          // b(0), before any jump
  std::vector<double> times;         // t_1 < ... < t_m = t
  std::vector<double> jump_height;   // h at jump points, 0 elsewhere
  std::vector<double> left;          // effective boundary just before t_i
  std::vector<double> right;         // effective boundary just after t_i
  std::vector<int> node;             // breakpoint index, or -1 at jump points

  std::size_t size() const { return times.size(); }
  double beta(std::size_t i) const { return left[i] < right[i] ? left[i] : right[i]; }
  void clear();
};

/// Sorted union of breakpoints in (0, t] and jump times, with the boundary
/// reduced by the jumps already applied. Throws std::logic_error when a jump
/// time coincides with a breakpoint.
MergedPartition merge_partition(const PiecewiseLinearBoundary& b, const JumpRealization& jumps);
void merge_partition(const PiecewiseLinearBoundary& b, const JumpRealization& jumps,
                     MergedPartition& out);

/// Parses the command-line grammar:
///   constant:<b> | linear:<a>,<b> | two-sided:<a>,<b>,<c>,<d>
///   | pwl:<s0:v0;s1:v1;...> | quad | sqrt | expneg
/// Named curves become GeneralBoundary with `points` subintervals.
/// Throws std::invalid_argument naming the offending token.
Boundary parse_boundary(std::string_view spec, int points = 32);

}  // namespace bcp

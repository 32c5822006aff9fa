#include "bcp/boundary.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace bcp {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

double parse_number(std::string_view token, std::string_view spec) {
  double v = 0.0;
  const auto* first = token.data();
  const auto* last = token.data() + token.size();
  if (!token.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || token.empty())
    throw std::invalid_argument("bad number '" + std::string(token) + "' in boundary spec '" +
                                std::string(spec) + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::vector<double> parse_list(std::string_view body, std::size_t expected, std::string_view spec) {
  const auto parts = split(body, ',');
  if (parts.size() != expected)
    throw std::invalid_argument("expected " + std::to_string(expected) + " values in '" +
                                std::string(spec) + "'");
  std::vector<double> out;
  for (auto p : parts) out.push_back(parse_number(p, spec));
  return out;
}

}  // namespace

double PiecewiseLinearBoundary::value_at(double s) const {
  if (s <= nodes.front()) return values.front();
  if (s >= nodes.back()) return values.back();
  const auto it = std::upper_bound(nodes.begin(), nodes.end(), s);
  const std::size_t j = static_cast<std::size_t>(it - nodes.begin());
  const double s0 = nodes[j - 1], s1 = nodes[j];
  if (s == s0) return values[j - 1];
  const double w = (s - s0) / (s1 - s0);
  return values[j - 1] + w * (values[j] - values[j - 1]);
}

void MergedPartition::clear() {
  times.clear();
  jump_height.clear();
  left.clear();
  right.clear();
  node.clear();
}

void validate(const Boundary& b, double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw std::domain_error("horizon must be positive");
  std::visit(overloaded{[](const ConstantBoundary& c) {
                          if (!std::isfinite(c.level)) throw std::domain_error("constant: non-finite level");
                        },
                        [](const LinearBoundary& l) {
                          if (!std::isfinite(l.slope) || !std::isfinite(l.intercept))
                            throw std::domain_error("linear: non-finite coefficient");
                        },
                        [](const TwoSidedLinearBoundary& l) {
                          for (double v : {l.a, l.b, l.c, l.d})
                            if (!std::isfinite(v)) throw std::domain_error("two-sided: non-finite coefficient");
                        },
                        [t](const PiecewiseLinearBoundary& p) {
                          if (p.nodes.size() < 2 || p.nodes.size() != p.values.size())
                            throw std::domain_error("pwl: need at least two (node, value) pairs");
                          if (p.nodes.front() != 0.0) throw std::domain_error("pwl: first node must be 0");
                          if (std::abs(p.nodes.back() - t) > 1e-12 * std::max(1.0, t))
                            throw std::domain_error("pwl: last node must equal the horizon");
                          for (std::size_t i = 1; i < p.nodes.size(); ++i)
                            if (!(p.nodes[i] > p.nodes[i - 1]))
                              throw std::domain_error("pwl: nodes must be strictly increasing");
                          for (double v : p.values)
                            if (!std::isfinite(v)) throw std::domain_error("pwl: non-finite value");
                        },
                        [](const GeneralBoundary& g) {
                          if (!g.fn) throw std::domain_error("general: empty boundary function");
                          if (g.points < 1) throw std::domain_error("general: need at least one subinterval");
                        }},
             b);
}

bool is_two_sided(const Boundary& b) { return std::holds_alternative<TwoSidedLinearBoundary>(b); }

double upper_value(const Boundary& b, double s) {
  return std::visit(overloaded{[](const ConstantBoundary& c) { return c.level; },
                               [s](const LinearBoundary& l) { return l.slope * s + l.intercept; },
                               [s](const TwoSidedLinearBoundary& l) { return l.a * s + l.b; },
                               [s](const PiecewiseLinearBoundary& p) { return p.value_at(s); },
                               [s](const GeneralBoundary& g) { return g.fn(s); }},
                    b);
}

PiecewiseLinearBoundary discretize(const GeneralBoundary& b, double t) {
  if (b.points < 1) throw std::domain_error("discretize: need at least one subinterval");
  if (!(t > 0.0)) throw std::domain_error("discretize: horizon must be positive");
  const auto n = static_cast<std::size_t>(b.points);
  PiecewiseLinearBoundary out;
  out.nodes.resize(n + 1);
  out.values.resize(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const double s = i == n ? t : t * static_cast<double>(i) / static_cast<double>(n);
    const double v = b.fn(s);
    if (!std::isfinite(v)) throw std::domain_error("discretize: non-finite boundary value");
    out.nodes[i] = s;
    out.values[i] = v;
  }
  return out;
}

PiecewiseLinearBoundary to_piecewise(const Boundary& b, double t) {
  return std::visit(
      overloaded{[t](const ConstantBoundary& c) {
                   return PiecewiseLinearBoundary{{0.0, t}, {c.level, c.level}};
                 },
                 [t](const LinearBoundary& l) {
                   return PiecewiseLinearBoundary{{0.0, t}, {l.intercept, l.slope * t + l.intercept}};
                 },
                 [](const TwoSidedLinearBoundary&) -> PiecewiseLinearBoundary {
                   throw std::domain_error("two-sided boundary has no one-sided piecewise form");
                 },
                 [](const PiecewiseLinearBoundary& p) { return p; },
                 [t](const GeneralBoundary& g) { return discretize(g, t); }},
      b);
}

void merge_partition(const PiecewiseLinearBoundary& b, const JumpRealization& jumps,
                     MergedPartition& out) {
  out.clear();
  out.start_level = b.values.front();
  const auto& u = jumps.times;
  const auto& h = jumps.heights;
  std::size_t node = 1;  // skip s_0 = 0
  std::size_t jump = 0;
  double applied = 0.0;  // sum of heights of jumps strictly before the current point
  while (node < b.nodes.size() || jump < u.size()) {
    const bool take_jump = jump < u.size() && (node == b.nodes.size() || u[jump] < b.nodes[node]);
    if (jump < u.size() && node < b.nodes.size() && u[jump] == b.nodes[node])
      throw std::logic_error("merge_partition: jump time coincides with a breakpoint");
    if (jump > 0 && jump < u.size() && take_jump && !(u[jump] > u[jump - 1]))
      throw std::logic_error("merge_partition: duplicate jump times");
    if (take_jump) {
      const double level = b.value_at(u[jump]) - applied;
      out.times.push_back(u[jump]);
      out.jump_height.push_back(h[jump]);
      out.left.push_back(level);
      out.right.push_back(level - h[jump]);
      out.node.push_back(-1);
      applied += h[jump];
      ++jump;
    } else {
      const double level = b.values[node] - applied;
      out.times.push_back(b.nodes[node]);
      out.jump_height.push_back(0.0);
      out.left.push_back(level);
      out.right.push_back(level);
      out.node.push_back(static_cast<int>(node));
      ++node;
    }
  }
}

MergedPartition merge_partition(const PiecewiseLinearBoundary& b, const JumpRealization& jumps) {
  MergedPartition out;
  merge_partition(b, jumps, out);
  return out;
}

Boundary parse_boundary(std::string_view spec, int points) {
  if (spec == "quad") return GeneralBoundary{[](double s) { return 1.0 + s * s; }, points};
  if (spec == "sqrt") return GeneralBoundary{[](double s) { return std::sqrt(1.0 + s); }, points};
  if (spec == "expneg") return GeneralBoundary{[](double s) { return std::exp(-s); }, points};

  const auto colon = spec.find(':');
  if (colon == std::string_view::npos)
    throw std::invalid_argument("unknown boundary '" + std::string(spec) + "'");
  const auto kind = spec.substr(0, colon);
  const auto body = spec.substr(colon + 1);
  if (kind == "constant") return ConstantBoundary{parse_list(body, 1, spec)[0]};
  if (kind == "linear") {
    const auto v = parse_list(body, 2, spec);
    return LinearBoundary{v[0], v[1]};
  }
  if (kind == "two-sided") {
    const auto v = parse_list(body, 4, spec);
    return TwoSidedLinearBoundary{v[0], v[1], v[2], v[3]};
  }
  if (kind == "pwl") {
    PiecewiseLinearBoundary p;
    for (auto pair : split(body, ';')) {
      if (pair.empty()) continue;
      const auto sep = pair.find(':');
      if (sep == std::string_view::npos)
        throw std::invalid_argument("bad pwl point '" + std::string(pair) + "'");
      p.nodes.push_back(parse_number(pair.substr(0, sep), spec));
      p.values.push_back(parse_number(pair.substr(sep + 1), spec));
    }
    return p;
  }
  throw std::invalid_argument("unknown boundary kind '" + std::string(kind) + "'");
}

}  // namespace bcp

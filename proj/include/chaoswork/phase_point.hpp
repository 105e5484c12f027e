#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

namespace chaoswork {

template <std::size_t D>
using Vec = std::array<double, D>;

/// A point z = (q, p) in 2D-dimensional phase space.
template <std::size_t D>
struct PhasePoint {
  Vec<D> q{};
  Vec<D> p{};

  friend bool operator==(const PhasePoint&, const PhasePoint&) = default;
};

template <std::size_t D>
constexpr double dot(const Vec<D>& a, const Vec<D>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < D; ++i) s += a[i] * b[i];
  return s;
}

template <std::size_t D>
constexpr double norm2(const Vec<D>& a) {
  return dot(a, a);
}

template <std::size_t D>
bool is_finite(const PhasePoint<D>& z) {
  for (std::size_t i = 0; i < D; ++i) {
    if (!std::isfinite(z.q[i]) || !std::isfinite(z.p[i])) return false;
  }
  return true;
}

template <std::size_t D>
PhasePoint<D> reversed(PhasePoint<D> z) {
  for (auto& pi : z.p) pi = -pi;
  return z;
}

/// Flat (q..., p...) view, used when reporting failed trajectories.
template <std::size_t D>
std::vector<double> flatten(const PhasePoint<D>& z) {
  std::vector<double> out;
  out.reserve(2 * D);
  out.insert(out.end(), z.q.begin(), z.q.end());
  out.insert(out.end(), z.p.begin(), z.p.end());
  return out;
}

}  // namespace chaoswork

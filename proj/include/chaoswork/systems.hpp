#pragma once

// Classical systems with exact unperturbed (H0) flows.
//
// Every system exposes the same surface so the driven integrator, the
// thermal sampler, and the semiclassical engine can be written once:
//   dim, has_walls            compile-time shape
//   mass(), contains(q)       domain and kinetic term |p|^2 / (2m)
//   confining_potential(q)    the q-dependent part of H0 (zero for billiards)
//   free_flight(z, s)         exact H0 flow for time s (s < 0 allowed)
//   boundary_distance(q)      positive inside, negative outside (walls only)
//   reflect(z)                specular bounce at a boundary point
// Walled systems also name their walls so the driven integrator can root-find
// on one smooth wall at a time:
//   violated_wall(q)          the wall q lies furthest beyond
//   wall_signed_distance(w,q) smooth signed distance to wall w (extended)
//   reflect_off(z, w)         bounce off wall w if moving outward through it
//   sample_position(gen, b)   draw q from the position marginal of exp(-b H0)

#include <algorithm>
#include <cmath>
#include <concepts>
#include <limits>
#include <numbers>
#include <random>

#include "chaoswork/errors.hpp"
#include "chaoswork/phase_point.hpp"

namespace chaoswork {

using Engine = std::mt19937_64;

template <class S>
concept PhaseSpaceSystem = requires(const S& s, const PhasePoint<S::dim>& z,
                                    const Vec<S::dim>& q, double t, Engine& gen) {
  { S::dim } -> std::convertible_to<std::size_t>;
  { S::has_walls } -> std::convertible_to<bool>;
  { s.mass() } -> std::convertible_to<double>;
  { s.contains(q) } -> std::same_as<bool>;
  { s.confining_potential(q) } -> std::convertible_to<double>;
  { s.confining_gradient(q) } -> std::same_as<Vec<S::dim>>;
  { s.free_flight(z, t) } -> std::same_as<PhasePoint<S::dim>>;
  { s.boundary_distance(q) } -> std::convertible_to<double>;
  { s.reflect(z) } -> std::same_as<PhasePoint<S::dim>>;
  { s.sample_position(gen, t) } -> std::same_as<Vec<S::dim>>;
};

template <class S>
concept WalledSystem = PhaseSpaceSystem<S> && requires(const S& s, const PhasePoint<S::dim>& z,
                                                      const Vec<S::dim>& q, int w) {
  { s.violated_wall(q) } -> std::same_as<int>;
  { s.wall_signed_distance(w, q) } -> std::convertible_to<double>;
  { s.reflect_off(z, w) } -> std::same_as<PhasePoint<S::dim>>;
};

/// Tolerance for "on the boundary" membership tests.
inline constexpr double kBoundaryTolerance = 1e-12;
/// Two walls closer than this to a hit point make it a corner.
inline constexpr double kCornerTolerance = 1e-10;

template <class S>
double kinetic_energy(const S& sys, const Vec<S::dim>& p) {
  return norm2(p) / (2.0 * sys.mass());
}

/// Unperturbed Hamiltonian H0(z) = |p|^2/(2m) + U0(q).
template <class S>
double unperturbed_energy(const S& sys, const PhasePoint<S::dim>& z) {
  return kinetic_energy(sys, z.p) + sys.confining_potential(z.q);
}

// ---------------------------------------------------------------------------
// Desymmetrized stadium
// ---------------------------------------------------------------------------

/// Quarter stadium: straight top wall y = r over 0 <= x <= l, quarter circle of
/// radius r centered at (l, 0), and reflecting symmetry axes x = 0 and y = 0.
struct StadiumGeometry {
  double r = 1.0;
  double l = 1.0;

  void validate() const {
    if (!(r > 0.0)) throw ContractError("StadiumGeometry: radius must be positive");
    if (!(l >= 0.0)) throw ContractError("StadiumGeometry: length must be nonnegative");
  }

  double area() const { return r * l + std::numbers::pi * r * r / 4.0; }
  double x_extent() const { return l + r; }
  double y_extent() const { return r; }
};

/// True iff q is in the closed quarter-stadium domain (within kBoundaryTolerance).
inline bool contains(const StadiumGeometry& g, const Vec<2>& q) {
  const double x = q[0];
  const double y = q[1];
  const double tol = kBoundaryTolerance;
  if (x < -tol || y < -tol || y > g.r + tol) return false;
  if (x <= g.l) return true;
  const double dx = x - g.l;
  return dx * dx + y * y <= (g.r + tol) * (g.r + tol);
}

class Stadium {
 public:
  static constexpr std::size_t dim = 2;
  static constexpr bool has_walls = true;

  explicit Stadium(StadiumGeometry geometry = {}, double mass = 0.5)
      : geom_(geometry), mass_(mass) {
    geom_.validate();
    if (!(mass_ > 0.0)) throw ContractError("Stadium: mass must be positive");
  }

  const StadiumGeometry& geometry() const { return geom_; }
  double mass() const { return mass_; }
  bool contains(const Vec<2>& q) const { return chaoswork::contains(geom_, q); }
  double confining_potential(const Vec<2>&) const { return 0.0; }
  Vec<2> confining_gradient(const Vec<2>&) const { return {0.0, 0.0}; }

  double boundary_distance(const Vec<2>& q) const {
    double d = std::min({q[0], q[1], geom_.r - q[1]});
    if (q[0] > geom_.l) {
      d = std::min(d, geom_.r - std::hypot(q[0] - geom_.l, q[1]));
    }
    return d;
  }

  /// Specular reflection at (or within kCornerTolerance of) the boundary.
  /// Corners reflect off both walls.
  PhasePoint<2> reflect(PhasePoint<2> z) const {
    WallSet walls = walls_near(z.q, kCornerTolerance);
    if (walls.count == 0) walls.add(nearest_wall(z.q));
    const double speed2 = norm2(z.p);
    apply_reflections(z.p, walls, z.q);
    const double after = norm2(z.p);
    if (after > 0.0) {
      const double scale = std::sqrt(speed2 / after);
      z.p[0] *= scale;
      z.p[1] *= scale;
    }
    return z;
  }

  int violated_wall(const Vec<2>& q) const {
    int best = kLeft;
    double best_d = wall_signed_distance(kLeft, q);
    for (int w = kBottom; w <= kArc; ++w) {
      if (w == kArc && q[0] <= geom_.l) continue;
      if (w == kTop && q[0] > geom_.l) continue;
      const double d = wall_signed_distance(w, q);
      if (d < best_d) {
        best = w;
        best_d = d;
      }
    }
    return best;
  }

  // The top wall and the arc meet with a common tangent at (l, r), so they
  // share one C1 distance function; root finding then never sees a false
  // crossing at the junction.
  double wall_signed_distance(int wall, const Vec<2>& q) const {
    switch (wall) {
      case kLeft: return q[0];
      case kBottom: return q[1];
      default:
        return q[0] <= geom_.l ? geom_.r - q[1] : geom_.r - std::hypot(q[0] - geom_.l, q[1]);
    }
  }

  PhasePoint<2> reflect_off(PhasePoint<2> z, int wall) const {
    WallSet walls = walls_near(z.q, kCornerTolerance);
    bool listed = false;
    for (int i = 0; i < walls.count; ++i) listed = listed || walls.ids[i] == wall;
    if (!listed) walls.add(wall);
    const double speed2 = norm2(z.p);
    apply_reflections(z.p, walls, z.q);
    const double after = norm2(z.p);
    if (after > 0.0) {
      const double scale = std::sqrt(speed2 / after);
      z.p[0] *= scale;
      z.p[1] *= scale;
    }
    return z;
  }

  /// Exact H0 flow: straight segments at speed |p|/m with specular bounces.
  PhasePoint<2> free_flight(PhasePoint<2> z, double s) const {
    if (s == 0.0) return z;
    if (s < 0.0) return reversed(free_flight(reversed(z), -s));
    if (z.p[0] == 0.0 && z.p[1] == 0.0) return z;

    const double speed2 = norm2(z.p);
    double remaining = s;
    int stalled = 0;
    for (;;) {
      const Vec<2> v{z.p[0] / mass_, z.p[1] / mass_};
      const Hit hit = next_hit(z.q, v);
      // Arriving exactly at a wall counts as a bounce.
      if (hit.t > remaining) {
        z.q[0] += v[0] * remaining;
        z.q[1] += v[1] * remaining;
        return z;
      }
      z.q[0] += v[0] * hit.t;
      z.q[1] += v[1] * hit.t;
      snap(z.q, hit.walls);
      apply_reflections(z.p, hit.walls, z.q);
      const double scale = std::sqrt(speed2 / norm2(z.p));
      z.p[0] *= scale;
      z.p[1] *= scale;
      remaining -= hit.t;
      stalled = hit.t > 0.0 ? 0 : stalled + 1;
      if (stalled > 16) {
        throw NumericalFailure("Stadium::free_flight: trapped at boundary", flatten(z), s - remaining);
      }
    }
  }

  Vec<2> sample_position(Engine& gen, double /*beta*/) const {
    std::uniform_real_distribution<double> ux(0.0, geom_.x_extent());
    std::uniform_real_distribution<double> uy(0.0, geom_.y_extent());
    for (;;) {
      const Vec<2> q{ux(gen), uy(gen)};
      if (contains(q)) return q;
    }
  }

 private:
  enum Wall : int { kLeft = 0, kBottom = 1, kTop = 2, kArc = 3 };

  struct WallSet {
    int ids[4]{};
    int count = 0;
    void add(int id) { ids[count++] = id; }
  };

  struct Hit {
    double t = std::numeric_limits<double>::infinity();
    WallSet walls;
  };

  Vec<2> normal(int wall, const Vec<2>& q) const {
    switch (wall) {
      case kLeft: return {1.0, 0.0};
      case kBottom: return {0.0, 1.0};
      case kTop: return {0.0, -1.0};
      default: {
        const double dx = q[0] - geom_.l;
        const double dy = q[1];
        const double n = std::hypot(dx, dy);
        return {-dx / n, -dy / n};
      }
    }
  }

  double wall_distance(int wall, const Vec<2>& q) const {
    switch (wall) {
      case kLeft: return std::abs(q[0]);
      case kBottom: return std::abs(q[1]);
      case kTop: return q[0] <= geom_.l + kCornerTolerance ? std::abs(geom_.r - q[1])
                                                           : std::numeric_limits<double>::infinity();
      default: return q[0] >= geom_.l - kCornerTolerance
                          ? std::abs(geom_.r - std::hypot(q[0] - geom_.l, q[1]))
                          : std::numeric_limits<double>::infinity();
    }
  }

  int nearest_wall(const Vec<2>& q) const {
    int best = kLeft;
    double best_d = wall_distance(kLeft, q);
    for (int w = kBottom; w <= kArc; ++w) {
      const double d = wall_distance(w, q);
      if (d < best_d) {
        best = w;
        best_d = d;
      }
    }
    return best;
  }

  WallSet walls_near(const Vec<2>& q, double tol) const {
    WallSet set;
    for (int w = kLeft; w <= kArc; ++w) {
      if (wall_distance(w, q) < tol) set.add(w);
    }
    return set;
  }

  static void reflect_about(Vec<2>& p, const Vec<2>& n) {
    const double pn = p[0] * n[0] + p[1] * n[1];
    p[0] -= 2.0 * pn * n[0];
    p[1] -= 2.0 * pn * n[1];
  }

  // Reflect off every distinct wall in the set; parallel normals (the smooth
  // top/arc junction) count once. Only walls the momentum is moving into flip.
  void apply_reflections(Vec<2>& p, const WallSet& walls, const Vec<2>& q) const {
    Vec<2> used[4];
    int n_used = 0;
    for (int i = 0; i < walls.count; ++i) {
      const Vec<2> n = normal(walls.ids[i], q);
      bool parallel = false;
      for (int j = 0; j < n_used; ++j) {
        if (n[0] * used[j][0] + n[1] * used[j][1] > 1.0 - 1e-9) parallel = true;
      }
      if (parallel) continue;
      used[n_used++] = n;
      if (p[0] * n[0] + p[1] * n[1] < 0.0) reflect_about(p, n);
    }
  }

  void snap(Vec<2>& q, const WallSet& walls) const {
    for (int i = 0; i < walls.count; ++i) {
      switch (walls.ids[i]) {
        case kLeft: q[0] = 0.0; break;
        case kBottom: q[1] = 0.0; break;
        case kTop: q[1] = geom_.r; break;
        default: {
          const double dx = q[0] - geom_.l;
          const double n = std::hypot(dx, q[1]);
          if (n > 0.0) {
            q[0] = geom_.l + dx * geom_.r / n;
            q[1] = q[1] * geom_.r / n;
          }
        }
      }
    }
  }

  // Exit time of the ray q + v t from the (convex) domain. The quarter
  // stadium lies inside each of the half planes x >= 0, y >= 0, so those two
  // walls need no extent check; the top wall and the arc split at x = l.
  Hit next_hit(const Vec<2>& q, const Vec<2>& v) const {
    double times[4];
    std::fill(std::begin(times), std::end(times), std::numeric_limits<double>::infinity());
    if (v[0] < 0.0) times[kLeft] = std::max(0.0, -q[0] / v[0]);
    if (v[1] < 0.0) times[kBottom] = std::max(0.0, -q[1] / v[1]);
    if (v[1] > 0.0) {
      const double t = std::max(0.0, (geom_.r - q[1]) / v[1]);
      if (q[0] + v[0] * t <= geom_.l + kCornerTolerance) times[kTop] = t;
    }
    {
      const double dx = q[0] - geom_.l;
      const double dy = q[1];
      const double a = v[0] * v[0] + v[1] * v[1];
      const double b = dx * v[0] + dy * v[1];
      const double c = dx * dx + dy * dy - geom_.r * geom_.r;
      const double disc = b * b - a * c;
      if (disc >= 0.0) {
        // Larger root: the ray leaves the disk there. Written to avoid
        // cancellation when the start point sits on the circle.
        const double sq = std::sqrt(disc);
        double t = b <= 0.0 ? (-b + sq) / a : -c / (b + sq);
        t = std::max(0.0, t);
        if (q[0] + v[0] * t >= geom_.l - kCornerTolerance) times[kArc] = t;
      }
    }
    Hit hit;
    for (double t : times) hit.t = std::min(hit.t, t);
    const double speed = std::sqrt(v[0] * v[0] + v[1] * v[1]);
    for (int w = kLeft; w <= kArc; ++w) {
      if ((times[w] - hit.t) * speed < kCornerTolerance) hit.walls.add(w);
    }
    return hit;
  }

  StadiumGeometry geom_;
  double mass_;
};

// ---------------------------------------------------------------------------
// 1D validation models
// ---------------------------------------------------------------------------

/// Particle in a hard-wall box [0, L].
class Box1D {
 public:
  static constexpr std::size_t dim = 1;
  static constexpr bool has_walls = true;

  explicit Box1D(double length, double mass = 0.5) : length_(length), mass_(mass) {
    if (!(length_ > 0.0)) throw ContractError("Box1D: length must be positive");
    if (!(mass_ > 0.0)) throw ContractError("Box1D: mass must be positive");
  }

  double length() const { return length_; }
  double mass() const { return mass_; }
  bool contains(const Vec<1>& q) const {
    return q[0] >= -kBoundaryTolerance && q[0] <= length_ + kBoundaryTolerance;
  }
  double confining_potential(const Vec<1>&) const { return 0.0; }
  Vec<1> confining_gradient(const Vec<1>&) const { return {0.0}; }
  double boundary_distance(const Vec<1>& q) const { return std::min(q[0], length_ - q[0]); }

  PhasePoint<1> reflect(PhasePoint<1> z) const {
    const bool at_left = q_near(z.q[0], 0.0);
    if ((at_left && z.p[0] < 0.0) || (!at_left && z.p[0] > 0.0)) z.p[0] = -z.p[0];
    return z;
  }

  int violated_wall(const Vec<1>& q) const { return q[0] < length_ - q[0] ? 0 : 1; }
  double wall_signed_distance(int wall, const Vec<1>& q) const {
    return wall == 0 ? q[0] : length_ - q[0];
  }
  PhasePoint<1> reflect_off(PhasePoint<1> z, int wall) const {
    if ((wall == 0 && z.p[0] < 0.0) || (wall == 1 && z.p[0] > 0.0)) z.p[0] = -z.p[0];
    return z;
  }

  /// Unfolds the motion onto a circle of circumference 2L.
  PhasePoint<1> free_flight(PhasePoint<1> z, double s) const {
    if (s == 0.0 || z.p[0] == 0.0) return z;
    const double period = 2.0 * length_;
    const double x = z.q[0] + z.p[0] / mass_ * s;
    double m = std::fmod(x, period);
    if (m < 0.0) m += period;
    if (m < length_) {
      z.q[0] = m;
    } else {
      z.q[0] = period - m;
      z.p[0] = -z.p[0];
    }
    return z;
  }

  Vec<1> sample_position(Engine& gen, double /*beta*/) const {
    std::uniform_real_distribution<double> u(0.0, length_);
    return {u(gen)};
  }

 private:
  bool q_near(double x, double wall) const { return std::abs(x - wall) < 0.5 * length_; }

  double length_;
  double mass_;
};

/// Harmonic oscillator H0 = p^2/(2m) + m omega0^2 x^2 / 2 on the real line.
class Oscillator1D {
 public:
  static constexpr std::size_t dim = 1;
  static constexpr bool has_walls = false;

  explicit Oscillator1D(double omega0, double mass = 0.5) : omega_(omega0), mass_(mass) {
    if (!(omega_ > 0.0)) throw ContractError("Oscillator1D: omega0 must be positive");
    if (!(mass_ > 0.0)) throw ContractError("Oscillator1D: mass must be positive");
  }

  double omega() const { return omega_; }
  double mass() const { return mass_; }
  bool contains(const Vec<1>& q) const { return std::isfinite(q[0]); }
  double confining_potential(const Vec<1>& q) const {
    return 0.5 * mass_ * omega_ * omega_ * q[0] * q[0];
  }
  Vec<1> confining_gradient(const Vec<1>& q) const { return {mass_ * omega_ * omega_ * q[0]}; }
  double boundary_distance(const Vec<1>&) const { return std::numeric_limits<double>::infinity(); }
  PhasePoint<1> reflect(PhasePoint<1> z) const { return z; }

  PhasePoint<1> free_flight(PhasePoint<1> z, double s) const {
    const double c = std::cos(omega_ * s);
    const double sn = std::sin(omega_ * s);
    const double x = z.q[0];
    const double p = z.p[0];
    z.q[0] = x * c + p / (mass_ * omega_) * sn;
    z.p[0] = p * c - mass_ * omega_ * x * sn;
    return z;
  }

  Vec<1> sample_position(Engine& gen, double beta) const {
    std::normal_distribution<double> n(0.0, 1.0 / (omega_ * std::sqrt(beta * mass_)));
    return {n(gen)};
  }

 private:
  double omega_;
  double mass_;
};

static_assert(PhaseSpaceSystem<Stadium>);
static_assert(PhaseSpaceSystem<Box1D>);
static_assert(PhaseSpaceSystem<Oscillator1D>);
static_assert(WalledSystem<Stadium>);
static_assert(WalledSystem<Box1D>);

}  // namespace chaoswork

#pragma once

#include <cmath>
#include <concepts>
#include <numbers>
#include <vector>

#include "chaoswork/errors.hpp"
#include "chaoswork/phase_point.hpp"

namespace chaoswork {

/// Perturbation V(q) switched on by a process. Must be smooth wherever the
/// integrator can evaluate it, including slightly outside hard walls.
template <class P>
concept Perturbation = requires(const P& v, const Vec<P::dim>& q) {
  { P::dim } -> std::convertible_to<std::size_t>;
  { v.value(q) } -> std::convertible_to<double>;
  { v.gradient(q) } -> std::same_as<Vec<P::dim>>;
};

/// Sum of normalized isotropic Gaussians in the plane:
/// V(q) = lambda * sum_i exp(-|q - c_i|^2 / (2 sigma^2)) / (2 pi sigma^2).
class GaussianPotential {
 public:
  static constexpr std::size_t dim = 2;

  GaussianPotential(std::vector<Vec<2>> centers, double sigma, double lambda)
      : centers_(std::move(centers)), sigma_(sigma), lambda_(lambda) {
    if (!(sigma_ > 0.0)) throw ContractError("GaussianPotential: sigma must be positive");
    if (!(lambda_ >= 0.0)) throw ContractError("GaussianPotential: lambda must be nonnegative");
    amplitude_ = lambda_ / (2.0 * std::numbers::pi * sigma_ * sigma_);
    inv_two_sigma2_ = 1.0 / (2.0 * sigma_ * sigma_);
  }

  /// Four-Gaussian landscape used for the stadium process.
  static GaussianPotential reference(double sigma = 0.1, double lambda = 180.0) {
    return GaussianPotential({{0.2, 0.4}, {0.67, 0.5}, {0.5, 0.15}, {0.3, 0.75}}, sigma, lambda);
  }

  double value(const Vec<2>& q) const {
    double s = 0.0;
    for (const auto& c : centers_) {
      const double dx = q[0] - c[0];
      const double dy = q[1] - c[1];
      s += std::exp(-(dx * dx + dy * dy) * inv_two_sigma2_);
    }
    return amplitude_ * s;
  }

  Vec<2> gradient(const Vec<2>& q) const {
    double gx = 0.0;
    double gy = 0.0;
    for (const auto& c : centers_) {
      const double dx = q[0] - c[0];
      const double dy = q[1] - c[1];
      const double e = std::exp(-(dx * dx + dy * dy) * inv_two_sigma2_);
      gx += e * dx;
      gy += e * dy;
    }
    const double k = -2.0 * inv_two_sigma2_ * amplitude_;
    return {k * gx, k * gy};
  }

  const std::vector<Vec<2>>& centers() const { return centers_; }
  double sigma() const { return sigma_; }
  double lambda() const { return lambda_; }
  /// Height of a single isolated Gaussian, lambda / (2 pi sigma^2).
  double peak_height() const { return amplitude_; }

 private:
  std::vector<Vec<2>> centers_;
  double sigma_;
  double lambda_;
  double amplitude_ = 0.0;
  double inv_two_sigma2_ = 0.0;
};

/// V(x) = height * exp(-(x - center)^2 / (2 width^2)).
class GaussianBump1D {
 public:
  static constexpr std::size_t dim = 1;

  GaussianBump1D(double height, double center, double width)
      : height_(height), center_(center), width_(width) {
    if (!(width_ > 0.0)) throw ContractError("GaussianBump1D: width must be positive");
    if (!(height_ >= 0.0)) throw ContractError("GaussianBump1D: height must be nonnegative");
  }

  double value(const Vec<1>& q) const {
    const double d = (q[0] - center_) / width_;
    return height_ * std::exp(-0.5 * d * d);
  }

  Vec<1> gradient(const Vec<1>& q) const {
    const double d = (q[0] - center_) / width_;
    return {-height_ * std::exp(-0.5 * d * d) * d / width_};
  }

  double height() const { return height_; }
  double center() const { return center_; }
  double width() const { return width_; }

 private:
  double height_;
  double center_;
  double width_;
};

/// V(x) = stiffness * x^2 / 2; ramps an oscillator from omega0 to omega1 when
/// stiffness = m (omega1^2 - omega0^2).
class StiffnessPerturbation1D {
 public:
  static constexpr std::size_t dim = 1;

  explicit StiffnessPerturbation1D(double stiffness) : stiffness_(stiffness) {}

  static StiffnessPerturbation1D ramp(double mass, double omega0, double omega1) {
    return StiffnessPerturbation1D(mass * (omega1 * omega1 - omega0 * omega0));
  }

  double value(const Vec<1>& q) const { return 0.5 * stiffness_ * q[0] * q[0]; }
  Vec<1> gradient(const Vec<1>& q) const { return {stiffness_ * q[0]}; }
  double stiffness() const { return stiffness_; }

 private:
  double stiffness_;
};

/// V = c everywhere. Test hook: the action difference is then exactly c * s.
template <std::size_t D>
class ConstantPotential {
 public:
  static constexpr std::size_t dim = D;
  explicit ConstantPotential(double c) : c_(c) {}
  double value(const Vec<D>&) const { return c_; }
  Vec<D> gradient(const Vec<D>&) const { return Vec<D>{}; }

 private:
  double c_;
};

}  // namespace chaoswork

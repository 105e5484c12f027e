#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include "chaoswork/semiclassical.hpp"

using namespace chaoswork;

namespace {

const StadiumGeometry kGeom{1.0, 1.0};

ProcessSpec<GaussianPotential> reference_process(double lambda = 180.0, double tau = 0.1) {
  return {tau, GaussianPotential::reference(0.1, lambda), ScheduleKind::linear};
}

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t k = 0; k < n; ++k) v[k] = a + (b - a) * static_cast<double>(k) / static_cast<double>(n - 1);
  v.front() = a;
  v.back() = b;
  return v;
}

}  // namespace

TEST(ActionDifference, ZeroAtOrigin) {
  const Stadium s(kGeom);
  const PhasePoint<2> z{{0.4, 0.6}, {10.0, -7.0}};
  const auto ds = action_difference(s, reference_process(), z, {0.0}, 5e-4);
  ASSERT_EQ(ds.size(), 1u);
  EXPECT_EQ(ds[0], 0.0);
  EXPECT_THROW(action_difference(s, reference_process(), z, {0.1, 0.2}), ContractError);
}

TEST(ActionDifference, ZeroStrength) {
  const Stadium s(kGeom);
  const PhasePoint<2> z{{0.4, 0.6}, {10.0, -7.0}};
  const auto ds = action_difference(s, reference_process(0.0), z, linspace(0.0, 0.2, 9), 5e-4);
  for (double x : ds) EXPECT_NEAR(x, 0.0, 1e-10);
}

TEST(ActionDifference, ShortProcessApproachesQuench) {
  // The gap to the quench is first order in tau, so halving tau halves it.
  const Stadium s(kGeom);
  const auto nodes = linspace(0.0, 0.25, 26);
  for (const auto& z : {PhasePoint<2>{{0.3, 0.3}, {12.0, 5.0}}, PhasePoint<2>{{1.2, 0.5}, {-4.0, 9.0}}}) {
    const auto b = quench_action_difference(s, reference_process(180.0, 1e-4).potential, z, nodes);
    ASSERT_GT(std::abs(b.back()), 1.0);
    double scale = 0.0;
    for (double x : b) scale = std::max(scale, std::abs(x));
    double gap[2] = {0.0, 0.0};
    for (int j = 0; j < 2; ++j) {
      const double tau = j == 0 ? 1e-4 : 5e-5;
      const auto a = action_difference(s, reference_process(180.0, tau), z, nodes, tau / 100);
      for (std::size_t k = 0; k < nodes.size(); ++k) gap[j] = std::max(gap[j], std::abs(a[k] - b[k]));
    }
    EXPECT_LT(gap[0], 0.05 * scale);
    EXPECT_GT(gap[0] / gap[1], 1.6);
    EXPECT_LT(gap[0] / gap[1], 2.4);
  }
}

TEST(QuenchAction, ConstantPotential) {
  const Stadium s(kGeom);
  const ConstantPotential<2> c(3.5);
  const auto nodes = linspace(0.0, 2.0, 41);
  const auto ds = quench_action_difference(s, c, PhasePoint<2>{{0.5, 0.5}, {3.0, 1.0}}, nodes);
  for (std::size_t k = 0; k < nodes.size(); ++k) EXPECT_NEAR(ds[k], 3.5 * nodes[k], 1e-13);
  const auto back = quench_action_difference(s, c, PhasePoint<2>{{0.5, 0.5}, {3.0, 1.0}}, linspace(0.0, -1.0, 11));
  EXPECT_NEAR(back.back(), -3.5, 1e-13);
}

TEST(QuenchAction, StraightLineThroughGaussian) {
  // x(s) = 0.2 + s along y = 0.5 through a Gaussian centered at (0.5, 0.5).
  const Stadium s(kGeom);
  const GaussianPotential g({{0.5, 0.5}}, 0.1, 1.0);
  const PhasePoint<2> z{{0.2, 0.5}, {0.5, 0.0}};
  const auto nodes = linspace(0.0, 0.6, 20001);
  const auto ds = quench_action_difference(s, g, z, nodes);
  const double amp = 1.0 / (2.0 * std::numbers::pi * 0.01);
  const double oracle = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      [&](double x) { return amp * std::exp(-(x - 0.5) * (x - 0.5) / 0.02); }, 0.2, 0.8, 15, 1e-14);
  EXPECT_NEAR(ds.back(), oracle, 1e-6 * oracle);
}

TEST(QuenchAction, StrideInterpolates) {
  const Stadium s(kGeom);
  const ConstantPotential<2> c(2.0);
  const auto nodes = linspace(0.0, 1.0, 11);
  const auto a = quench_action_difference(s, c, PhasePoint<2>{{0.5, 0.5}, {3.0, 1.0}}, nodes, 4);
  for (std::size_t k = 0; k < nodes.size(); ++k) EXPECT_NEAR(a[k], 2.0 * nodes[k], 1e-14);
  EXPECT_EQ(integrand_stride(UGrid{0.25, 81}, 1.0, 2e-3), 1u);
  EXPECT_EQ(integrand_stride(UGrid{0.25, 81}, 0.1, 2e-3), 6u);
  EXPECT_EQ(integrand_stride(UGrid{0.25, 81}, 0.1, 0.0), 1u);
}

TEST(CharFuncSC, UnitAtOriginAndTrivialProcess) {
  const Stadium s(kGeom);
  const UGrid grid{0.25, 9};
  SemiclassicalOptions opt;
  opt.dt = 5e-4;
  const auto r = char_func_semiclassical(s, reference_process(), ThermalParams{1.0 / 256.0, 1.0}, grid, 200,
                                         SampleStream{1, 0}, opt);
  EXPECT_EQ(r.cf.g[0], complex(1.0, 0.0));
  EXPECT_EQ(r.cf.n_samples, 200u);
  const auto off = char_func_semiclassical(s, reference_process(0.0), ThermalParams{1.0 / 256.0, 1.0}, grid, 200,
                                           SampleStream{1, 0}, opt);
  for (const auto& g : off.cf.g) {
    EXPECT_NEAR(g.real(), 1.0, 1e-12);
    EXPECT_NEAR(g.imag(), 0.0, 1e-10);
  }
}

TEST(CharFuncSC, DeterministicAcrossThreadCounts) {
  const Stadium s(kGeom);
  const UGrid grid{0.25, 7};
  SemiclassicalOptions a;
  a.dt = 5e-4;
  a.record_works = true;
  a.parallel = {1, 0};
  SemiclassicalOptions b = a;
  b.parallel = {4, 0};
  const ThermalParams th{1.0 / 256.0, 1.0};
  const auto x = char_func_semiclassical(s, reference_process(), th, grid, 300, SampleStream{9, 0}, a);
  const auto y = char_func_semiclassical(s, reference_process(), th, grid, 300, SampleStream{9, 0}, b);
  const auto z = char_func_semiclassical(s, reference_process(), th, grid, 300, SampleStream{9, 0}, a);
  for (std::size_t k = 0; k < grid.n_points; ++k) {
    EXPECT_EQ(x.cf.g[k], y.cf.g[k]);
    EXPECT_EQ(x.cf.g[k], z.cf.g[k]);
    EXPECT_EQ(x.cf.std_error[k], y.cf.std_error[k]);
  }
  EXPECT_EQ(x.works, y.works);
}

TEST(CharFuncSC, BackwardAgreesWithConjugate) {
  // Direct negative-u evaluation (backward free flight) against G(-u) = conj G(u).
  const Stadium s(kGeom);
  const UGrid grid{0.25, 6};
  const ThermalParams th{1.0 / 256.0, 1.0};
  SemiclassicalOptions fwd;
  fwd.dt = 5e-4;
  SemiclassicalOptions bwd = fwd;
  bwd.direction = Direction::backward;
  const std::size_t n = 100000;
  const auto f = char_func_semiclassical(s, reference_process(), th, grid, n, SampleStream{21, 0}, fwd);
  const auto b = char_func_semiclassical(s, reference_process(), th, grid, n, SampleStream{22, 0}, bwd);
  for (std::size_t k = 1; k < grid.n_points; ++k) {
    EXPECT_DOUBLE_EQ(b.cf.u[k], -f.cf.u[k]);
    const double tol = 3.0 * std::hypot(f.cf.std_error[k], b.cf.std_error[k]);
    EXPECT_LT(std::abs(b.cf.g[k] - std::conj(f.cf.g[k])), tol) << "u = " << f.cf.u[k];
  }
  // Non-trivial at the far end of the grid.
  EXPECT_LT(std::abs(f.cf.g.back()), 0.9);
}

namespace {

// Oscillator whose free flight fails for initial positions q > 0: half of
// the Gibbs samples.
struct FlakyOscillator : Oscillator1D {
  FlakyOscillator() : Oscillator1D(1.0, 1.0) {}
  PhasePoint<1> free_flight(PhasePoint<1> z, double s) const {
    if (z.q[0] > 0.0 && s != 0.0) throw NumericalFailure("flaky", flatten(z), s);
    return Oscillator1D::free_flight(z, s);
  }
};

}  // namespace

TEST(CharFuncSC, FailureBudget) {
  const FlakyOscillator sys;
  const ProcessSpec<StiffnessPerturbation1D> proc{1.0, StiffnessPerturbation1D(0.2), ScheduleKind::linear};
  SemiclassicalOptions opt;
  opt.dt = 1e-2;
  const ThermalParams th{1.0, 1.0};
  EXPECT_THROW(char_func_semiclassical(sys, proc, th, UGrid{1.0, 4}, 400, SampleStream{2, 0}, opt),
               FailureBudgetExceeded);
  opt.failure_budget = 0.9;
  opt.record_works = true;
  const auto r = char_func_semiclassical(sys, proc, th, UGrid{1.0, 4}, 400, SampleStream{2, 0}, opt);
  EXPECT_GT(r.cf.n_failed, 150u);
  EXPECT_LT(r.cf.n_failed, 250u);
  EXPECT_EQ(r.cf.n_samples + r.cf.n_failed, 400u);
  std::size_t nan = 0;
  for (double w : r.works) nan += std::isnan(w) ? 1 : 0;
  EXPECT_EQ(nan, r.cf.n_failed);
}

TEST(HermitianExtend, SymmetryAndSingleOrigin) {
  CharFunc half;
  half.u = {0.0, 0.1, 0.2, 0.3};
  half.g = {1.0, {0.8, 0.3}, {0.4, -0.2}, {0.1, 0.05}};
  half.std_error = {0.0, 0.01, 0.02, 0.03};
  const auto full = hermitian_extend(half);
  ASSERT_EQ(full.size(), 7u);
  int origins = 0;
  for (std::size_t k = 0; k < full.size(); ++k) {
    origins += full.u[k] == 0.0 ? 1 : 0;
    EXPECT_EQ(full.g[6 - k], std::conj(full.g[k]));
    EXPECT_EQ(full.u[6 - k], -full.u[k]);
  }
  EXPECT_EQ(origins, 1);
  EXPECT_EQ(full.g[3], complex(1.0, 0.0));
  half.u[0] = 0.05;
  EXPECT_THROW(hermitian_extend(half), ContractError);
}

TEST(Bootstrap, ReplicatesAreDeterministicAndSpread) {
  const Stadium s(kGeom);
  SemiclassicalOptions opt;
  opt.dt = 5e-4;
  const auto r = char_func_semiclassical(s, reference_process(), ThermalParams{1.0 / 256.0, 1.0}, UGrid{0.25, 5}, 2000,
                                         SampleStream{4, 0}, opt);
  ASSERT_GE(r.cf.batch_sums.size(), 2u);
  const auto a = bootstrap_replicate(r.cf, SampleStream{4, 0}, 0);
  const auto b = bootstrap_replicate(r.cf, SampleStream{4, 0}, 0);
  const auto c = bootstrap_replicate(r.cf, SampleStream{4, 0}, 1);
  EXPECT_EQ(a.g, b.g);
  EXPECT_NE(a.g, c.g);
  EXPECT_NEAR(std::abs(a.g.back() - r.cf.g.back()), 0.0, 6.0 * r.cf.std_error.back());
}

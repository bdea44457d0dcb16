// Copyright 2026 The beg-stein Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "beg/density.hpp"

namespace {

// Plain trapezoid rule on [-L, L]; independent of the library quadrature.
template <class F>
double trapezoid(F f, double L, long pts) {
  const double h = 2.0 * L / pts;
  double acc = 0.5 * (f(-L) + f(L));
  for (long i = 1; i < pts; ++i) acc += f(-L + i * h);
  return acc * h;
}

TEST(PolyDensity, StandardNormal) {
  const auto d = beg::normalize_density(0.5, 0.0, 0.0);
  EXPECT_NEAR(d.log_norm(), 0.5 * std::log(2.0 * std::numbers::pi), 1e-12);
  EXPECT_NEAR(d.moment(2), 1.0, 1e-10);
  EXPECT_NEAR(d.moment(4), 3.0, 1e-10);
  EXPECT_NEAR(d.cdf(1.959964), 0.975, 1e-6);
  for (double t : {-3.0, -0.4, 0.7, 2.5}) EXPECT_NEAR(d.cdf(t), 0.5 * std::erfc(-t / std::sqrt(2.0)), 1e-12);
  EXPECT_NEAR(d.cdf(-8.0), 0.5 * std::erfc(8.0 / std::sqrt(2.0)), 1e-25);
}

TEST(PolyDensity, QuarticAgainstTrapezoid) {
  const double c = 9.0 / 40.0;
  const auto d = beg::normalize_density(0.0, c, 0.0);
  const double z = trapezoid([&](double x) { return std::exp(-c * std::pow(x, 4)); }, 12.0, 10000000);
  const double m4 = trapezoid([&](double x) { return std::pow(x, 4) * std::exp(-c * std::pow(x, 4)); }, 12.0, 10000000);
  EXPECT_NEAR(d.log_norm(), std::log(z), 1e-10);
  EXPECT_NEAR(d.moment(4), m4 / z, 1e-9);
  // Closed form: E X^4 = 1 / (4c) for density proportional to exp(-c x^4).
  EXPECT_NEAR(d.moment(4), 1.0 / (4.0 * c), 1e-10);
}

TEST(PolyDensity, DoubleWell) {
  const auto d = beg::normalize_density(-1.0, 0.0, 1.0);
  EXPECT_EQ(d.cdf(0.0), 0.5);
  for (double t : {0.3, 1.1, 2.0}) {
    EXPECT_NEAR(d.cdf(-t), 1.0 - d.cdf(t), 1e-10);
    EXPECT_DOUBLE_EQ(d.pdf(t), d.pdf(-t));
  }
  const double z = trapezoid([](double x) { return std::exp(x * x - std::pow(x, 6)); }, 6.0, 1000000);
  EXPECT_NEAR(d.log_norm(), std::log(z), 1e-9);
  EXPECT_NEAR(d.moment(0), 1.0, 1e-12);
  EXPECT_NEAR(2.0 * d.upper_tail(0.0), 1.0, 1e-12);
}

TEST(PolyDensity, NonIntegrable) {
  EXPECT_THROW(beg::normalize_density(1.0, 0.0, -1.0), beg::NonIntegrableError);
  EXPECT_THROW(beg::normalize_density(-1.0, 0.0, 0.0), beg::NonIntegrableError);
  EXPECT_THROW(beg::normalize_density(0.0, 0.0, 0.0), beg::NonIntegrableError);
  EXPECT_THROW(beg::normalize_density(1.0, -2.0, 0.0), beg::NonIntegrableError);
  EXPECT_NO_THROW(beg::normalize_density(-3.0, 1.0, 0.0));
}

TEST(PolyDensity, PsiIsLogDerivative) {
  const auto d = beg::normalize_density(-0.4, 0.3, 0.05);
  for (double x : {-2.0, -0.5, 0.1, 1.7}) {
    const double h = 1e-5;
    const double num = (std::log(d.pdf(x + h)) - std::log(d.pdf(x - h))) / (2 * h);
    EXPECT_NEAR(d.psi(x), num, 1e-6);
  }
}

TEST(PolyDensity, TailRatioMatchesQuotient) {
  const auto d = beg::normalize_density(0.5, 0.0, 0.0);
  for (double x : {0.0, 0.5, 3.0, 6.0, 9.0}) {
    const double mills = 0.5 * std::erfc(x / std::sqrt(2.0)) / (std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi));
    EXPECT_NEAR(d.tail_ratio(x) / mills, 1.0, 1e-9) << x;
  }
  // Far beyond the truncation the ratio tends to 1/V'(x).
  EXPECT_NEAR(d.tail_ratio(60.0) * 60.0, 1.0, 1e-3);
}

// Closed-form Gaussian Stein solution: f(x) = sqrt(2 pi) e^{x^2/2} Phi(min) (1 - Phi(max)).
TEST(SteinSolution, GaussianClosedForm) {
  const auto d = beg::normalize_density(0.5, 0.0, 0.0);
  auto Phi = [](double t) { return 0.5 * std::erfc(-t / std::sqrt(2.0)); };
  for (double z : {-1.0, 0.0, 0.8}) {
    for (double x : {-2.0, -0.3, 0.5, 1.5}) {
      const double ref = std::sqrt(2 * std::numbers::pi) * std::exp(0.5 * x * x) * Phi(std::min(x, z)) *
                         (1 - Phi(std::max(x, z)));
      EXPECT_NEAR(beg::stein_solution(d, z, x), ref, 1e-12);
    }
  }
  // f_z decays like P(z) / x on the right and Q(z) / |x| on the left.
  EXPECT_NEAR(beg::stein_solution(d, 0.3, 10.0) * 10.0, Phi(0.3), 0.02);
  EXPECT_NEAR(beg::stein_solution(d, 0.3, -10.0) * 10.0, 1.0 - Phi(0.3), 0.02);
  EXPECT_LT(std::abs(beg::stein_solution(d, 0.3, 1e6)), 1e-6);
  EXPECT_LT(std::abs(beg::stein_solution(d, 0.3, -1e6)), 1e-6);
}

TEST(SteinSolution, OdeResidualByCentralDifferences) {
  for (const auto& d : {beg::normalize_density(0.5, 0.0, 0.0), beg::normalize_density(0.0, 0.3, 0.0),
                        beg::normalize_density(-0.6, 0.2, 0.1), beg::normalize_density(0.0, 0.0, 0.225)}) {
    for (double z : {-1.3, 0.0, 0.6}) {
      for (double x = -6.0; x <= 6.0; x += 0.37) {
        if (std::abs(x - z) < 1e-3) continue;
        const double h = 1e-5;
        const double fp = (beg::stein_solution(d, z, x + h) - beg::stein_solution(d, z, x - h)) / (2 * h);
        const double rhs = (x <= z ? 1.0 : 0.0) - d.cdf(z);
        EXPECT_LT(std::abs(fp + d.psi(x) * beg::stein_solution(d, z, x) - rhs), 1e-6) << x << " " << z;
        EXPECT_NEAR(beg::stein_solution_point(d, z, x).f_prime, fp, 1e-6);
      }
    }
  }
}

TEST(SteinConstants, GaussianClassicalBounds) {
  const auto d = beg::normalize_density(0.5, 0.0, 0.0);
  const auto c = beg::estimate_stein_constants(d, -10.0, 10.0, 0.02);
  EXPECT_LE(c.d1, std::sqrt(2.0 * std::numbers::pi) / 4.0 + 0.01);
  EXPECT_LE(c.d2, 1.01);
  EXPECT_GT(c.d3, 0.9);
  EXPECT_GT(c.d4, 0.0);
  EXPECT_FALSE(c.grid_spec().empty());
}

TEST(SteinConstants, FiniteForSexticDensity) {
  const auto d = beg::normalize_density(0.0, 0.0, 0.225);
  const auto c = beg::estimate_stein_constants(d, -10.0, 10.0, 0.05);
  for (double v : {c.d1, c.d2, c.d3, c.d4}) {
    EXPECT_TRUE(std::isfinite(v));
    EXPECT_GT(v, 0.0);
  }
}

}  // namespace

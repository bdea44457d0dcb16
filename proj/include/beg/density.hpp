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

#pragma once

// Even polynomial densities p(x) = exp(-(b1 x^2 + b2 x^4 + b3 x^6)) / Z and
// the solution of the Stein equation f' + (p'/p) f = 1{x <= z} - P(z).

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "beg/errors.hpp"
#include "beg/numerics.hpp"

namespace beg {

class PolyDensity {
 public:
  static constexpr double kCutoff = 745.0;  // e^{-745} is below the smallest denormal
  static constexpr int kPanels = 2048;

  static PolyDensity normalize(double b1, double b2, double b3, double quadrature_tol = 1e-12) {
    return PolyDensity(b1, b2, b3, quadrature_tol);
  }

  double b1() const { return b1_; }
  double b2() const { return b2_; }
  double b3() const { return b3_; }
  double log_norm() const { return log_norm_; }
  double quadrature_tol() const { return tol_; }
  double truncation() const { return T_; }
  // Largest x >= 0 with V'(x) = 0; V is strictly increasing beyond it.
  double last_critical_point() const { return xc_; }

  double V(double x) const {
    const double u = x * x;
    return u * (b1_ + u * (b2_ + u * b3_));
  }
  double V_prime(double x) const {
    const double u = x * x;
    return x * (2.0 * b1_ + u * (4.0 * b2_ + u * 6.0 * b3_));
  }
  double V_second(double x) const {
    const double u = x * x;
    return 2.0 * b1_ + u * (12.0 * b2_ + u * 30.0 * b3_);
  }

  // psi = p'/p
  double psi(double x) const { return -V_prime(x); }
  double psi_prime(double x) const { return -V_second(x); }

  double pdf(double x) const { return std::exp(-(V(x) - v_min_) - shifted_log_norm_); }

  // P(X > t) for t >= 0 from the panel table; exact symmetric counterpart
  // gives the left tail without cancellation.
  double upper_tail(double t) const {
    if (t < 0.0) return 1.0 - upper_tail(-t);
    if (t >= T_) return 0.0;
    const double h = T_ / kPanels;
    const auto i = std::min<std::size_t>(static_cast<std::size_t>(t / h), kPanels - 1);
    const double right = static_cast<double>(i + 1) * h;
    const double part = numerics::integrate_panel([this](double y) { return pdf(y); }, t, right);
    return std::clamp(upper_[i + 1] + part, 0.0, 0.5);
  }

  double cdf(double t) const {
    if (t == 0.0) return 0.5;
    return t < 0.0 ? upper_tail(-t) : 1.0 - upper_tail(t);
  }

  double moment(int k) const {
    if (k < 0) throw ValidationError("moment order must be nonnegative");
    if (k == 0) return 1.0;
    if (k % 2 == 1) return 0.0;
    const double h = T_ / kPanels;
    numerics::CompensatedSum acc;
    for (int i = 0; i < kPanels; ++i) {
      acc += numerics::integrate([&](double y) { return std::pow(y, k) * pdf(y); }, i * h, (i + 1) * h, 1e-13);
    }
    return 2.0 * acc.value();
  }

  // Q(x) / p(x) = int_x^inf exp(V(x) - V(y)) dy for x >= 0 (Mills ratio).
  double tail_ratio(double x) const {
    if (x < 0.0) throw ValidationError("tail_ratio expects x >= 0");
    if (x < xc_ || (V(x) - v_min_) < 30.0) return upper_tail(x) / pdf(x);
    // Beyond the last critical point V is increasing, the integrand is <= 1
    // and decays on the scale 1/V'(x).
    const double scale = 1.0 / (V_prime(x) + 1.0);
    const double vx = V(x);
    auto g = [&](double v) { return std::exp(vx - V(x + v * scale)); };
    boost::math::quadrature::exp_sinh<double> integrator;
    double err = 0.0;
    return scale * integrator.integrate(g, 1e-12, &err);
  }

 private:
  PolyDensity(double b1, double b2, double b3, double tol) : b1_(b1), b2_(b2), b3_(b3), tol_(tol) {
    for (double b : {b1, b2, b3}) {
      if (!std::isfinite(b)) throw ValidationError("density coefficients must be finite");
    }
    if (!(tol > 0.0)) throw ValidationError("quadrature tolerance must be positive");
    const double lead = b3 != 0.0 ? b3 : (b2 != 0.0 ? b2 : b1);
    if (!(lead > 0.0)) {
      throw NonIntegrableError("leading nonzero density coefficient must be positive");
    }
    // Critical points in u = x^2: 3 b3 u^2 + 2 b2 u + b1 = 0.
    std::vector<double> roots;
    if (b3 != 0.0) {
      const double disc = b2 * b2 - 3.0 * b3 * b1;
      if (disc >= 0.0) {
        const double r = std::sqrt(disc);
        roots = {(-b2 - r) / (3.0 * b3), (-b2 + r) / (3.0 * b3)};
      }
    } else if (b2 != 0.0) {
      roots = {-b1 / (2.0 * b2)};
    }
    v_min_ = 0.0;
    xc_ = 0.0;
    for (double u : roots) {
      if (u > 0.0) {
        const double x = std::sqrt(u);
        v_min_ = std::min(v_min_, V(x));
        xc_ = std::max(xc_, x);
      }
    }
    T_ = std::max(1.0, 2.0 * xc_);
    while (V(T_) - v_min_ < kCutoff) T_ *= 1.25;

    const double h = T_ / kPanels;
    auto shifted = [this](double y) { return std::exp(-(V(y) - v_min_)); };
    std::vector<double> panel(kPanels);
    for (int i = 0; i < kPanels; ++i) panel[i] = numerics::integrate(shifted, i * h, (i + 1) * h, 1e-14);
    upper_.assign(kPanels + 1, 0.0);
    numerics::CompensatedSum acc;
    for (int i = kPanels - 1; i >= 0; --i) {
      acc += panel[i];
      upper_[i] = acc.value();
    }
    const double half_mass = upper_[0];
    shifted_log_norm_ = std::log(2.0 * half_mass);
    log_norm_ = shifted_log_norm_ - v_min_;
    for (double& u : upper_) u /= 2.0 * half_mass;
  }

  double b1_, b2_, b3_, tol_;
  double v_min_ = 0.0;
  double xc_ = 0.0;
  double T_ = 1.0;
  double shifted_log_norm_ = 0.0;
  double log_norm_ = 0.0;
  std::vector<double> upper_;  // upper_[i] = P(X > i h)
};

inline PolyDensity normalize_density(double b1, double b2, double b3, double quadrature_tol = 1e-12) {
  return PolyDensity::normalize(b1, b2, b3, quadrature_tol);
}

inline double density_cdf(const PolyDensity& d, double t) { return d.cdf(t); }
inline double density_moment(const PolyDensity& d, int k) { return d.moment(k); }

// ---------------------------------------------------------------------------
// Stein equation f' + psi f = 1{x <= z} - P(z), psi = p'/p.
//
// f_z(x) = P(min(x, z)) Q(max(x, z)) / p(x). Every branch is rewritten in
// terms of Mills ratios at nonnegative arguments so nothing overflows in the
// tails.

struct SteinPoint {
  double f = 0.0;
  double f_prime = 0.0;      // from the ODE; at x = z this is the left limit
  double psi_f_prime = 0.0;  // (psi f)'
};

namespace detail {

struct SteinSample {
  double x, v, cdf, upper, ratio;  // ratio = tail_ratio(|x|)
};

inline SteinSample stein_sample(const PolyDensity& d, double x) {
  return {x, d.V(x), d.cdf(x), d.cdf(-x), d.tail_ratio(std::abs(x))};
}

inline SteinPoint stein_eval(const PolyDensity& d, const SteinSample& z, const SteinSample& x) {
  double f;
  if (x.x <= z.x) {
    f = x.x <= 0.0 ? z.upper * x.ratio : x.cdf * z.ratio * std::exp(x.v - z.v);
  } else {
    f = x.x >= 0.0 ? z.cdf * x.ratio : x.upper * z.ratio * std::exp(x.v - z.v);
  }
  const double vp = d.V_prime(x.x);
  SteinPoint out;
  out.f = f;
  out.f_prime = (x.x <= z.x ? 1.0 : 0.0) - z.cdf + vp * f;
  out.psi_f_prime = -d.V_second(x.x) * f - vp * out.f_prime;
  return out;
}

}  // namespace detail

inline SteinPoint stein_solution_point(const PolyDensity& d, double z, double x) {
  return detail::stein_eval(d, detail::stein_sample(d, z), detail::stein_sample(d, x));
}

inline double stein_solution(const PolyDensity& d, double z, double x) {
  return stein_solution_point(d, z, x).f;
}

struct SteinConstants {
  double d1 = 0.0;  // sup |f_z|
  double d2 = 0.0;  // sup |f_z'|
  double d3 = 0.0;  // sup_z (sup_x f_z' - inf_x f_z')
  double d4 = 0.0;  // sup |(psi f_z)'|
  double grid_lo = -10.0;
  double grid_hi = 10.0;
  double grid_step = 0.005;

  std::string grid_spec() const {
    return "z,x in [" + std::to_string(grid_lo) + ", " + std::to_string(grid_hi) + "] step " +
           std::to_string(grid_step);
  }
};

inline SteinConstants estimate_stein_constants(const PolyDensity& d, double lo = -10.0, double hi = 10.0,
                                               double step = 0.005, unsigned threads = 1) {
  if (!(hi > lo) || !(step > 0.0)) throw ValidationError("invalid Stein grid");
  const auto count = static_cast<std::size_t>(std::llround((hi - lo) / step)) + 1;
  std::vector<detail::SteinSample> grid(count);
  for (std::size_t i = 0; i < count; ++i) grid[i] = detail::stein_sample(d, lo + static_cast<double>(i) * step);

  struct Partial {
    double d1 = 0.0, d2 = 0.0, d3 = 0.0, d4 = 0.0;
  };
  std::vector<Partial> rows(count);
  numerics::parallel_for(count, threads, [&](std::size_t iz) {
    Partial r;
    double fmax = -std::numeric_limits<double>::infinity();
    double fmin = std::numeric_limits<double>::infinity();
    for (std::size_t ix = 0; ix < count; ++ix) {
      SteinPoint p = detail::stein_eval(d, grid[iz], grid[ix]);
      r.d1 = std::max(r.d1, std::abs(p.f));
      r.d2 = std::max(r.d2, std::abs(p.f_prime));
      r.d4 = std::max(r.d4, std::abs(p.psi_f_prime));
      fmax = std::max(fmax, p.f_prime);
      fmin = std::min(fmin, p.f_prime);
      if (ix == iz) {
        // right limit at the jump
        const double right = p.f_prime - 1.0;
        r.d2 = std::max(r.d2, std::abs(right));
        fmin = std::min(fmin, right);
        const double vp = d.V_prime(grid[ix].x);
        r.d4 = std::max(r.d4, std::abs(-d.V_second(grid[ix].x) * p.f - vp * right));
      }
    }
    r.d3 = fmax - fmin;
    rows[iz] = r;
  });
  SteinConstants c;
  c.grid_lo = lo;
  c.grid_hi = hi;
  c.grid_step = step;
  for (const Partial& r : rows) {
    c.d1 = std::max(c.d1, r.d1);
    c.d2 = std::max(c.d2, r.d2);
    c.d3 = std::max(c.d3, r.d3);
    c.d4 = std::max(c.d4, r.d4);
  }
  return c;
}

}  // namespace beg

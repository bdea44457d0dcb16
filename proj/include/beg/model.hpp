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

// Closed-form analytics of the mean-field Blume-Emery-Griffiths model: the
// single-spin cumulant generating function, the critical curve K_c(beta),
// the free-energy function G_{beta,K}, conditional-expectation kernels,
// phase-diagram classification and the (beta_n, K_n) parameter schedules.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "beg/errors.hpp"
#include "beg/numerics.hpp"

namespace beg {

// Critical inverse temperature log 4.
inline const double kBetaCritical = 2.0 * std::numbers::ln2;

struct ModelParams {
  double beta = 1.0;
  double K = 0.5;

  void validate() const {
    if (!std::isfinite(beta) || !std::isfinite(K)) {
      throw ValidationError("model parameters must be finite");
    }
    if (!(beta > 0.0) || !(K > 0.0)) {
      throw ValidationError("model parameters require beta > 0 and K > 0");
    }
  }
};

namespace detail {

inline void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw ValidationError(std::string(what) + " must be finite");
}

inline void require_beta(double beta) {
  require_finite(beta, "beta");
  if (!(beta > 0.0)) throw ValidationError("beta must be positive");
}

}  // namespace detail

// m = rho_beta(omega^2) = 2e^{-beta} / (1 + 2e^{-beta}); every even moment of
// a single spin equals m.
inline double spin_square_mean(double beta) { return 2.0 / (std::exp(beta) + 2.0); }

// c_beta(t) = log((1 + e^{-beta}(e^t + e^{-t})) / (1 + 2 e^{-beta})).
inline double cumulant_gf(double beta, double t) {
  detail::require_beta(beta);
  detail::require_finite(t, "t");
  const double a = std::abs(t);
  if (a < 30.0) {
    // 1 + m (cosh t - 1) with cosh t - 1 = 2 sinh^2(t/2): keeps full relative
    // precision near t = 0, where G cancels to high order.
    const double sh = std::sinh(0.5 * a);
    return std::log1p(spin_square_mean(beta) * 2.0 * sh * sh);
  }
  const double u = a - beta;
  double log_num;
  if (u > 0.0) {
    log_num = u + std::log1p(std::exp(-u) + std::exp(-2.0 * a));
  } else {
    log_num = std::log1p(std::exp(u) + std::exp(-a - beta));
  }
  return log_num - std::log1p(2.0 * std::exp(-beta));
}

// K_c(beta) = 1 / (2 beta c''_beta(0)) = (e^beta + 2) / (4 beta).
inline double critical_K(double beta) {
  detail::require_beta(beta);
  return (std::exp(beta) + 2.0) / (4.0 * beta);
}

inline double G_eval(const ModelParams& p, double x) {
  p.validate();
  const double c = 2.0 * p.beta * p.K;
  return p.beta * p.K * x * x - cumulant_gf(p.beta, c * x);
}

// Single-spin conditional drift kernel 2e^{-b} sinh(y) / (1 + 2e^{-b} cosh(y)),
// y = 2 beta K x, evaluated without overflow for large |y|.
inline double f_single(const ModelParams& p, double x) {
  p.validate();
  const double y = 2.0 * p.beta * p.K * x;
  const double a = std::abs(y);
  const double eb = std::exp(-p.beta);
  const double e2 = std::exp(-2.0 * a);
  const double v = eb * (1.0 - e2) / (std::exp(-a) + eb * (1.0 + e2));
  return y < 0.0 ? -v : v;
}

inline double G_prime(const ModelParams& p, double x) {
  return 2.0 * p.beta * p.K * (x - f_single(p, x));
}

struct GDerivatives {
  double g2 = 0.0;
  double g4 = 0.0;
  double g6 = 0.0;
};

// Taylor data of G at the origin. g6 comes from the t^6 coefficient of
// log(1 + m (cosh t - 1)), namely (m - 15 m^2 + 30 m^3) / 720.
inline GDerivatives G_derivs_at_zero(const ModelParams& p) {
  p.validate();
  const double eb = std::exp(p.beta);
  const double c = 2.0 * p.beta * p.K;
  const double m = spin_square_mean(p.beta);
  GDerivatives d;
  d.g2 = c * (eb + 2.0 - 4.0 * p.beta * p.K) / (eb + 2.0);
  d.g4 = 2.0 * std::pow(c, 4) * (4.0 - eb) / ((eb + 2.0) * (eb + 2.0));
  d.g6 = -std::pow(c, 6) * (m - 15.0 * m * m + 30.0 * m * m * m);
  return d;
}

struct PairConditionals {
  double f1 = 0.0;  // E[omega_i^2 omega_j^2 | rest], leading order
  double f2 = 0.0;  // E[omega_i^2 | rest], leading order
};

inline PairConditionals pair_conditional_funcs(const ModelParams& p, double x) {
  p.validate();
  const double a = std::abs(2.0 * p.beta * p.K * x);
  const double eb = std::exp(-p.beta);
  const double e1 = std::exp(-a);
  const double e2 = std::exp(-2.0 * a);
  const double e4 = std::exp(-4.0 * a);
  PairConditionals r;
  // Numerators and denominators divided by e^{a} (f2) and e^{2a} (f1).
  r.f2 = eb * (1.0 + e2) / (e1 + eb * (1.0 + e2));
  const double one_plus_cosh2 = e2 + 0.5 + 0.5 * e4;
  const double num1 = 2.0 * eb * eb * one_plus_cosh2;
  const double den1 = e2 + 2.0 * eb * (e1 + std::exp(-3.0 * a)) + num1;
  r.f1 = num1 / den1;
  return r;
}

// ---------------------------------------------------------------------------
// Parameter schedules

enum class ScheduleMode {
  FixedBeta,      // beta_n = beta, K_n = K_c(beta) - k n^{-delta2}
  MovingBeta,     // beta_n = log(e^{beta_c} - b n^{-delta1}), K_n as above
  ApproachPoint,  // beta_n = beta + b n^{-delta1}, K_n = K - k n^{-delta2}
};

inline std::string_view to_string(ScheduleMode m) {
  switch (m) {
    case ScheduleMode::FixedBeta: return "fixed-beta";
    case ScheduleMode::MovingBeta: return "moving-beta";
    case ScheduleMode::ApproachPoint: return "approach-point";
  }
  return "?";
}

struct Schedule {
  ScheduleMode mode = ScheduleMode::FixedBeta;
  double beta_fixed = 1.0;
  double K_target = 0.0;  // ApproachPoint only
  double b = 1.0;
  double k = 1.0;
  double delta1 = 1.0;
  double delta2 = 1.0;

  void validate() const {
    for (double v : {beta_fixed, K_target, b, k, delta1, delta2}) {
      detail::require_finite(v, "schedule parameter");
    }
    if (!(delta1 > 0.0) || !(delta2 > 0.0)) {
      throw ValidationError("schedule speeds delta1, delta2 must be positive");
    }
    switch (mode) {
      case ScheduleMode::FixedBeta:
        detail::require_beta(beta_fixed);
        if (k == 0.0) throw ValidationError("schedule requires k != 0");
        break;
      case ScheduleMode::MovingBeta:
        if (b == 0.0 || k == 0.0) throw ValidationError("schedule requires b != 0 and k != 0");
        break;
      case ScheduleMode::ApproachPoint:
        detail::require_beta(beta_fixed);
        if (!(K_target > 0.0)) throw ValidationError("approach-point schedule requires K > 0");
        break;
    }
  }
};

inline ModelParams schedule_eval(const Schedule& s, long n) {
  s.validate();
  if (n < 1) throw ValidationError("schedule requires n >= 1");
  const double nd = static_cast<double>(n);
  ModelParams out;
  switch (s.mode) {
    case ScheduleMode::FixedBeta:
      out.beta = s.beta_fixed;
      out.K = critical_K(out.beta) - s.k * std::pow(nd, -s.delta2);
      break;
    case ScheduleMode::MovingBeta: {
      const double arg = std::exp(kBetaCritical) - s.b * std::pow(nd, -s.delta1);
      if (!(arg > 1.0)) {
        throw ScheduleUnderflowError("beta_n <= 0 at n = " + std::to_string(n));
      }
      out.beta = std::log(arg);
      out.K = critical_K(out.beta) - s.k * std::pow(nd, -s.delta2);
      break;
    }
    case ScheduleMode::ApproachPoint:
      out.beta = s.beta_fixed + s.b * std::pow(nd, -s.delta1);
      out.K = s.K_target - s.k * std::pow(nd, -s.delta2);
      break;
  }
  if (!(out.beta > 0.0)) throw ScheduleUnderflowError("beta_n <= 0 at n = " + std::to_string(n));
  if (!(out.K > 0.0)) throw ScheduleUnderflowError("K_n <= 0 at n = " + std::to_string(n));
  return out;
}

// ---------------------------------------------------------------------------
// Minimizers of G and the phase diagram

// Global minimizers of G on [-1.5, 1.5]: grid scan with step 1e-3, then
// bisection on G' inside every bracketing cell. Returned sorted; symmetric
// under negation by construction.
inline std::vector<double> minimize_G(const ModelParams& p) {
  p.validate();
  constexpr int kHalf = 1500;
  constexpr double kStep = 1e-3;
  std::vector<double> g(2 * kHalf + 1);
  for (int i = 0; i <= 2 * kHalf; ++i) g[i] = G_eval(p, (i - kHalf) * kStep);

  auto gp = [&](double x) { return G_prime(p, x); };
  std::vector<double> candidates;
  // Origin first: G' is odd so G'(0) = 0 exactly.
  if (g[kHalf] <= g[kHalf - 1] && g[kHalf] <= g[kHalf + 1]) candidates.push_back(0.0);
  for (int i = kHalf + 1; i < 2 * kHalf; ++i) {
    if (g[i] <= g[i - 1] && g[i] <= g[i + 1]) {
      const double lo = (i - 1 - kHalf) * kStep;
      const double hi = (i + 1 - kHalf) * kStep;
      double x = 0.5 * (lo + hi);
      if (gp(lo) < 0.0 && gp(hi) > 0.0) x = numerics::bisect(gp, lo, hi);
      candidates.push_back(x);
    }
  }
  if (g[2 * kHalf] < g[2 * kHalf - 1]) candidates.push_back(kHalf * kStep);

  double best = std::numeric_limits<double>::infinity();
  for (double x : candidates) best = std::min(best, G_eval(p, x));
  const double tol = 1e-14 * (1.0 + std::abs(best));
  std::vector<double> out;
  for (double x : candidates) {
    if (G_eval(p, x) <= best + tol) {
      if (x == 0.0) {
        out.push_back(0.0);
      } else {
        out.push_back(-x);
        out.push_back(x);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// For beta > beta_c: the interaction strength at which a nonzero minimizer of
// G first becomes degenerate with the origin (the first-order curve).
inline double first_order_K(double beta) {
  detail::require_beta(beta);
  if (!(beta > kBetaCritical)) {
    throw ValidationError("first-order curve exists only for beta > log 4");
  }
  auto excess = [beta](double K) {
    const ModelParams p{beta, K};
    double best = 0.0;
    for (int i = 1; i <= 1500; ++i) best = std::min(best, G_eval(p, i * 1e-3));
    return best;  // < 0 when a nonzero state beats the origin
  };
  double hi = critical_K(beta);
  double lo = 0.25 * hi;
  while (excess(lo) < 0.0) lo *= 0.5;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (excess(mid) < 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

enum class RegionTag { A, B, C, FirstOrderCurve, TwoPhase, Other };

inline std::string_view to_string(RegionTag t) {
  switch (t) {
    case RegionTag::A: return "A";
    case RegionTag::B: return "B";
    case RegionTag::C: return "C";
    case RegionTag::FirstOrderCurve: return "first-order-curve";
    case RegionTag::TwoPhase: return "two-phase";
    case RegionTag::Other: return "other";
  }
  return "?";
}

struct Region {
  RegionTag tag = RegionTag::Other;
  double boundary_tolerance = 1e-9;
};

// Boundaries are bands of absolute half-width tol around the critical curve
// and the tricritical point.
inline Region classify_region(const ModelParams& p, double tol = 1e-9) {
  p.validate();
  if (!(tol > 0.0) || tol > 1e-3) throw ValidationError("tolerance must lie in (0, 1e-3]");
  const double kc = critical_K(p.beta);
  Region r{RegionTag::Other, tol};
  if (std::abs(p.beta - kBetaCritical) <= tol &&
      std::abs(p.K - critical_K(kBetaCritical)) <= tol) {
    r.tag = RegionTag::C;
  } else if (p.beta <= kBetaCritical) {
    if (std::abs(p.K - kc) <= tol) {
      r.tag = p.beta < kBetaCritical ? RegionTag::B : RegionTag::C;
    } else if (p.K < kc) {
      r.tag = RegionTag::A;
    } else {
      r.tag = RegionTag::TwoPhase;
    }
  } else {
    const double k1 = first_order_K(p.beta);
    if (std::abs(p.K - k1) <= tol) {
      r.tag = RegionTag::FirstOrderCurve;
    } else if (p.K > k1) {
      r.tag = RegionTag::TwoPhase;
    } else {
      r.tag = RegionTag::Other;
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Legendre-Fenchel transform of c_beta

struct LegendreValue {
  double value = 0.0;
  bool saturated = false;  // maximizer sits on the |t| = 50 cap
};

inline double cumulant_gf_prime(double beta, double t) {
  return f_single(ModelParams{beta, 0.5 / beta}, t);
}

inline LegendreValue legendre_rate(double beta, double z) {
  detail::require_beta(beta);
  detail::require_finite(z, "z");
  if (std::abs(z) > 1.0) throw ValidationError("legendre_rate requires |z| <= 1");
  constexpr double kCap = 50.0;
  LegendreValue out;
  if (z == 0.0) return out;
  const double az = std::abs(z);
  double t;
  if (cumulant_gf_prime(beta, kCap) <= az) {
    t = kCap;
    out.saturated = true;
  } else {
    t = numerics::bisect([&](double s) { return cumulant_gf_prime(beta, s) - az; }, 0.0, kCap);
  }
  out.value = std::max(0.0, t * az - cumulant_gf(beta, t));
  return out;
}

}  // namespace beg

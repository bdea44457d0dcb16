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

// Gibbs-sampling exchangeable pair (W, W'): pick a site uniformly, redraw its
// spin from the exact conditional law given the others. Everything below is
// an exact finite-n expectation under a JointLaw.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "beg/density.hpp"
#include "beg/errors.hpp"
#include "beg/exact_law.hpp"
#include "beg/model.hpp"
#include "beg/numerics.hpp"

namespace beg {

// Law of a resampled spin given S^i = S (the sum of the other n - 1 spins):
// P(t) proportional to exp(-beta t^2 + (beta K / n)(t^2 + 2 t S)).
class SpinConditional {
 public:
  SpinConditional(const ModelParams& p, long n) : n_(n) {
    p.validate();
    const double e = std::exp(-p.beta + p.beta * p.K / static_cast<double>(n));
    const std::size_t size = 2 * static_cast<std::size_t>(n) + 3;
    plus_.resize(size);
    minus_.resize(size);
    zero_.resize(size);
    mean_.resize(size);
    single_.resize(size);
    for (long S = -n - 1; S <= n + 1; ++S) {
      const auto i = index(S);
      const double y = 2.0 * p.beta * p.K * static_cast<double>(S) / static_cast<double>(n);
      const double a = std::abs(y);
      // Everything divided by e^{|y|}.
      const double u = std::exp(-a);
      const double den = u + e * (1.0 + u * u);
      const double big = e / den;
      const double small = e * u * u / den;
      plus_[i] = y >= 0.0 ? big : small;
      minus_[i] = y >= 0.0 ? small : big;
      zero_[i] = u / den;
      const double m = e * (1.0 - u * u) / den;
      mean_[i] = y < 0.0 ? -m : m;
      single_[i] = f_single(p, static_cast<double>(S) / static_cast<double>(n));
    }
  }

  long n() const { return n_; }
  double plus(long S) const { return plus_[index(S)]; }
  double minus(long S) const { return minus_[index(S)]; }
  double zero(long S) const { return zero_[index(S)]; }
  // E[omega' | S^i = S]
  double mean(long S) const { return mean_[index(S)]; }
  // E[omega'^2 | S^i = S]
  double second(long S) const { return 1.0 - zero_[index(S)]; }
  // f_single(S / n), the leading-order approximation of mean(S)
  double single(long S) const { return single_[index(S)]; }

 private:
  std::size_t index(long S) const { return static_cast<std::size_t>(S + n_ + 1); }

  long n_;
  std::vector<double> plus_, minus_, zero_, mean_, single_;
};

// Conditional moments of the increment W - W' given the class (s, M).
struct ClassStep {
  long s = 0;
  long M = 0;
  double prob = 0.0;
  double step1 = 0.0;  // E[W - W' | s, M]
  double step2 = 0.0;  // E[(W - W')^2 | s, M]
  double jump1 = 0.0;  // P(|W - W'| = n^{gamma-1} | s, M)
  double jump2 = 0.0;  // P(|W - W'| = 2 n^{gamma-1} | s, M)
  double f_part = 0.0; // n^{gamma-1} (1/n) sum_i (f(S^i/n) - f(s/n))
};

namespace detail {

inline ClassStep class_step(const SpinConditional& c, long s, long M, double scale) {
  const long n = c.n();
  const double np = static_cast<double>((M + s) / 2);
  const double nm = static_cast<double>((M - s) / 2);
  const double n0 = static_cast<double>(n - M);
  const double nd = static_cast<double>(n);
  ClassStep r;
  r.s = s;
  r.M = M;
  double sum1 = n0 * (-c.mean(s));
  double fd = 0.0;
  double j1 = n0 * c.second(s);
  double j2 = 0.0;
  if (np > 0.0) {
    sum1 += np * (1.0 - c.mean(s - 1));
    j1 += np * c.zero(s - 1);
    j2 += np * c.minus(s - 1);
    fd += np * (c.single(s - 1) - c.single(s));
  }
  if (nm > 0.0) {
    sum1 += nm * (-1.0 - c.mean(s + 1));
    j1 += nm * c.zero(s + 1);
    j2 += nm * c.plus(s + 1);
    fd += nm * (c.single(s + 1) - c.single(s));
  }
  r.step1 = scale * sum1 / nd;
  r.jump1 = j1 / nd;
  r.jump2 = j2 / nd;
  r.step2 = scale * scale * (r.jump1 + 4.0 * r.jump2);
  r.f_part = scale * fd / nd;
  return r;
}

}  // namespace detail

// Per-class table over every stored atom, in for_each_atom order. Meant for
// small n; the bound evaluation streams the same quantities instead.
inline std::vector<ClassStep> conditional_step_moments(const JointLaw& law, double gamma) {
  require_gamma(gamma);
  const SpinConditional c(law.params(), law.n());
  const double scale = w_scale(law.n(), gamma);
  std::vector<ClassStep> out;
  out.reserve(law.atom_count());
  law.for_each_atom([&](long s, long M, double p) {
    ClassStep r = detail::class_step(c, s, M, scale);
    r.prob = p;
    out.push_back(r);
  });
  return out;
}

// Exact conditional mean against f_single at every S^i that occurs in a
// stored class. The ratio must stay within e^{+-2 beta K / n}.
struct SandwichCheck {
  double max_abs_log_ratio = 0.0;
  double allowed = 0.0;  // 2 beta K / n
  long checked = 0;
  bool holds = true;
};

inline SandwichCheck sandwich_check(const JointLaw& law) {
  const long n = law.n();
  const SpinConditional c(law.params(), n);
  std::vector<char> used(2 * static_cast<std::size_t>(n) + 3, 0);
  law.for_each_atom([&](long s, long M, double) {
    const long np = (M + s) / 2, nm = (M - s) / 2;
    if (np > 0) used[static_cast<std::size_t>(s - 1 + n + 1)] = 1;
    if (nm > 0) used[static_cast<std::size_t>(s + 1 + n + 1)] = 1;
    if (M < n) used[static_cast<std::size_t>(s + n + 1)] = 1;
  });
  SandwichCheck out;
  out.allowed = 2.0 * law.params().beta * law.params().K / static_cast<double>(n);
  for (long S = -n - 1; S <= n + 1; ++S) {
    if (!used[static_cast<std::size_t>(S + n + 1)]) continue;
    ++out.checked;
    const double exact = c.mean(S);
    const double approx = c.single(S);
    if (S == 0) {
      if (exact != 0.0 || approx != 0.0) out.holds = false;
      continue;
    }
    const double lr = std::log(exact / approx);
    out.max_abs_log_ratio = std::max(out.max_abs_log_ratio, std::abs(lr));
    if (!(std::abs(lr) <= out.allowed)) out.holds = false;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Regression E[W - W' | F] = -lambda psi(W) + R, psi(x) = -(q1 x + q3 x^3 + q5 x^5)

struct RegressionSpec {
  double lambda = 1.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double q5 = 0.0;

  // -lambda psi(w)
  double drift(double w) const {
    const double w2 = w * w;
    return lambda * w * (q1 + w2 * (q3 + w2 * q5));
  }
  double psi(double w) const {
    const double w2 = w * w;
    return -w * (q1 + w2 * (q3 + w2 * q5));
  }
  bool linear() const { return q3 == 0.0 && q5 == 0.0; }
};

// Taylor drift of E[W - W' | F] in powers of W:
// n^{gamma-1} G'(W n^{-gamma}) / (2 beta K) = a1 W + a3 W^3 + a5 W^5 + ...
struct DriftCoefficients {
  double a1 = 0.0;
  double a3 = 0.0;
  double a5 = 0.0;
};

inline DriftCoefficients drift_coefficients(const ModelParams& p, long n, double gamma) {
  require_gamma(gamma);
  const GDerivatives g = G_derivs_at_zero(p);
  const double nd = static_cast<double>(n);
  const double c = 2.0 * p.beta * p.K;
  DriftCoefficients d;
  d.a1 = g.g2 / (c * nd);
  d.a3 = g.g4 / (6.0 * c * std::pow(nd, 1.0 + 2.0 * gamma));
  d.a5 = g.g6 / (120.0 * c * std::pow(nd, 1.0 + 4.0 * gamma));
  return d;
}

namespace detail {

// One streaming pass over the law. W-conditional quantities are reduced per
// s >= 0 (the -s half is the mirror image: step1 odd, everything else even).
struct PairPass {
  double scale = 0.0;
  std::vector<double> ps, e1, e2, j1, j2;  // per s >= 0; conditional on s
  double var_F = 0.0;                      // Var E[(W-W')^2 | F]
  double r_F_l2sq = 0.0;                   // E[R_F^2]
  double r_F_max = 0.0;
  double identity_residual = 0.0;
  double envelope = 0.0;                   // max |f_part| n^{2-gamma}
};

inline PairPass pair_pass(const JointLaw& law, double gamma, const RegressionSpec& spec, unsigned threads = 1) {
  require_gamma(gamma);
  const long n = law.n();
  const SpinConditional c(law.params(), n);
  PairPass out;
  out.scale = w_scale(n, gamma);
  const auto ns = static_cast<std::size_t>(law.s_max() + 1);
  out.ps.assign(ns, 0.0);
  out.e1.assign(ns, 0.0);
  out.e2.assign(ns, 0.0);
  out.j1.assign(ns, 0.0);
  out.j2.assign(ns, 0.0);
  std::vector<double> rsq(ns, 0.0), rmax(ns, 0.0), ident(ns, 0.0), env(ns, 0.0), s2sq(ns, 0.0);
  const double env_scale = std::pow(static_cast<double>(n), 2.0 - gamma);
  numerics::parallel_for(ns, threads, [&](std::size_t i) {
    const long s = static_cast<long>(i);
    const JointLaw::Slice& sl = law.slice(s);
    const double w = static_cast<double>(s) * out.scale;
    const double d = spec.drift(w);
    numerics::CompensatedSum p, a1, a2, b1, b2, r2, q2;
    for (std::size_t j = 0; j < sl.prob.size(); ++j) {
      const long M = sl.m_lo + 2 * static_cast<long>(j);
      const double q = sl.prob[j];
      const ClassStep cs = class_step(c, s, M, out.scale);
      p += q;
      a1 += q * cs.step1;
      a2 += q * cs.step2;
      b1 += q * cs.jump1;
      b2 += q * cs.jump2;
      const double r = cs.step1 - d;
      r2 += q * r * r;
      q2 += q * cs.step2 * cs.step2;
      if (q > 0.0) {
        rmax[i] = std::max(rmax[i], std::abs(r));
        env[i] = std::max(env[i], std::abs(cs.f_part) * env_scale);
        // E[W'|F] rebuilt from the regression form
        const double direct = w - cs.step1;
        const double rebuilt = w - d - r;
        ident[i] = std::max(ident[i], std::abs(direct - rebuilt));
      }
    }
    const double pt = p.value();
    out.ps[i] = pt;
    if (pt > 0.0) {
      out.e1[i] = a1.value() / pt;
      out.e2[i] = a2.value() / pt;
      out.j1[i] = b1.value() / pt;
      out.j2[i] = b2.value() / pt;
    }
    rsq[i] = r2.value();
    s2sq[i] = q2.value();
  });
  numerics::CompensatedSum m2, rs, sq;
  for (std::size_t i = 0; i < ns; ++i) {
    const double mult = i == 0 ? 1.0 : 2.0;
    m2 += mult * out.ps[i] * out.e2[i];
    rs += mult * rsq[i];
    sq += mult * s2sq[i];
    out.r_F_max = std::max(out.r_F_max, rmax[i]);
    out.identity_residual = std::max(out.identity_residual, ident[i]);
    out.envelope = std::max(out.envelope, env[i]);
  }
  out.r_F_l2sq = rs.value();
  out.var_F = std::max(0.0, sq.value() - m2.value() * m2.value());
  return out;
}

// Weighted sum over s in (-s_max, s_max) of g(s >= 0 index, sign).
template <class G>
double sum_over_s(const PairPass& pp, G&& g) {
  numerics::CompensatedSum acc;
  for (std::size_t i = 0; i < pp.ps.size(); ++i) {
    if (!(pp.ps[i] > 0.0)) continue;
    acc += pp.ps[i] * g(i, 1.0);
    if (i > 0) acc += pp.ps[i] * g(i, -1.0);
  }
  return acc.value();
}

inline double variance_W(const PairPass& pp) {
  const double mean = sum_over_s(pp, [&](std::size_t i, double) { return pp.e2[i]; });
  return sum_over_s(pp, [&](std::size_t i, double) {
    const double d = pp.e2[i] - mean;
    return d * d;
  });
}

}  // namespace detail

// Var(E[(W - W')^2 | W]), collapsing (s, M) classes to s through p(M | s).
inline double variance_term(const JointLaw& law, double gamma, unsigned threads = 1) {
  return detail::variance_W(detail::pair_pass(law, gamma, RegressionSpec{}, threads));
}

// Var(E[(W - W')^2 | F]); never smaller than variance_term.
inline double variance_term_F(const JointLaw& law, double gamma, unsigned threads = 1) {
  return detail::pair_pass(law, gamma, RegressionSpec{}, threads).var_F;
}

struct RegressionDecomposition {
  double gamma = 0.5;
  double lambda = 1.0;
  double q1 = 0.0, q3 = 0.0, q5 = 0.0;
  double remainder_max = 0.0;    // sup |R(W)|, R conditional on W
  double remainder_l2 = 0.0;     // sqrt E[R(W)^2]
  double remainder_max_F = 0.0;  // same for the class-level remainder
  double remainder_l2_F = 0.0;
  double identity_residual = 0.0;
  double envelope_ratio = 0.0;   // max over classes of n^{2-gamma} |f-difference part|
};

inline RegressionDecomposition regression_decompose(const JointLaw& law, double gamma, const RegressionSpec& spec,
                                                    unsigned threads = 1) {
  if (!(spec.lambda > 0.0)) throw ValidationError("lambda must be positive");
  const detail::PairPass pp = detail::pair_pass(law, gamma, spec, threads);
  RegressionDecomposition out;
  out.gamma = gamma;
  out.lambda = spec.lambda;
  out.q1 = spec.q1;
  out.q3 = spec.q3;
  out.q5 = spec.q5;
  double rmax = 0.0;
  const double l2 = detail::sum_over_s(pp, [&](std::size_t i, double sign) {
    const double w = sign * static_cast<double>(i) * pp.scale;
    const double r = sign * pp.e1[i] - spec.drift(w);
    rmax = std::max(rmax, std::abs(r));
    return r * r;
  });
  out.remainder_max = rmax;
  out.remainder_l2 = std::sqrt(l2);
  out.remainder_max_F = pp.r_F_max;
  out.remainder_l2_F = std::sqrt(pp.r_F_l2sq);
  out.identity_residual = pp.identity_residual;
  out.envelope_ratio = pp.envelope;
  return out;
}

// ---------------------------------------------------------------------------
// Bound evaluation

struct BoundTerms {
  double variance_term = 0.0;
  double remainder_term = 0.0;
  double cube_term = 0.0;
  double psi_term = 0.0;
  double tail_term = 0.0;

  double sum() const { return variance_term + remainder_term + cube_term + psi_term + tail_term; }
};

struct BoundReport {
  BoundTerms terms;
  double total = 0.0;
  double exact_dK = 0.0;
  double A_halfwidth = 0.0;
  long n = 0;
  double gamma = 0.5;

  // exact inputs
  double lambda = 0.0;
  double kappa = 0.0;         // -E[W psi(W)]
  double lambda_tilde = 0.0;  // lambda * kappa, the rate for psi_p = p'/p
  double variance = 0.0;      // Var E[(W-W')^2 | W]
  double remainder_l2 = 0.0;
  double remainder_max = 0.0;
  double ew2 = 0.0;
  double e_abs_psi = 0.0;     // E|p'/p (W)|
  double tail_moment = 0.0;   // E[(W-W')^2 1{|W-W'| >= A}]
  SteinConstants consts;

  // Normal-comparison variant, available when psi is linear. A is raised to
  // the increment bound 2 n^{gamma-1} when smaller.
  bool has_normal = false;
  double sigma2 = 0.0;
  double normal_A = 0.0;
  BoundTerms normal_terms;
  double normal_total = 0.0;
};

// `density` must be the comparison density built from `spec` and the law's
// moments, i.e. p'/p = psi / kappa, and `consts` its Stein constants.
inline BoundReport evaluate_bound(const JointLaw& law, double gamma, const RegressionSpec& spec,
                                  const PolyDensity& density, const SteinConstants& consts, double A,
                                  unsigned threads = 1) {
  if (!(A > 0.0)) throw ValidationError("A must be positive");
  if (!(spec.lambda > 0.0)) throw ValidationError("lambda must be positive");
  const detail::PairPass pp = detail::pair_pass(law, gamma, spec, threads);
  const MomentSet ms = moments(law, gamma);

  BoundReport r;
  r.n = law.n();
  r.gamma = gamma;
  r.A_halfwidth = A;
  r.consts = consts;
  r.lambda = spec.lambda;
  r.kappa = spec.q1 * ms[2] + spec.q3 * ms[4] + spec.q5 * ms[6];
  if (!(r.kappa > 0.0)) throw ComputationError("-E[W psi(W)] is not positive");
  r.lambda_tilde = spec.lambda * r.kappa;
  r.ew2 = ms[2];
  r.variance = detail::variance_W(pp);
  double rmax = 0.0;
  const double rsq = detail::sum_over_s(pp, [&](std::size_t i, double sign) {
    const double w = sign * static_cast<double>(i) * pp.scale;
    const double v = sign * pp.e1[i] - spec.drift(w);
    rmax = std::max(rmax, std::abs(v));
    return v * v;
  });
  r.remainder_l2 = std::sqrt(rsq);
  r.remainder_max = rmax;
  r.e_abs_psi = detail::sum_over_s(pp, [&](std::size_t i, double sign) {
    return std::abs(density.psi(sign * static_cast<double>(i) * pp.scale));
  });
  const double sc = pp.scale;
  const bool one = sc >= A;
  const bool two = 2.0 * sc >= A;
  r.tail_moment = detail::sum_over_s(pp, [&](std::size_t i, double) {
    return sc * sc * ((one ? pp.j1[i] : 0.0) + (two ? 4.0 * pp.j2[i] : 0.0));
  });

  const double lt = r.lambda_tilde;
  r.terms.variance_term = consts.d2 / (2.0 * lt) * std::sqrt(r.variance);
  r.terms.remainder_term = (consts.d1 + consts.d2 * std::sqrt(r.ew2) + 1.5 * A) * r.remainder_l2 / lt;
  r.terms.cube_term = consts.d4 * A * A * A / (4.0 * lt);
  r.terms.psi_term = 1.5 * A * r.e_abs_psi;
  r.terms.tail_term = consts.d3 / (2.0 * lt) * r.tail_moment;
  r.total = r.terms.sum();

  if (spec.linear() && spec.q1 > 0.0) {
    r.has_normal = true;
    r.sigma2 = 1.0 / spec.q1;
    const double a = std::max(A, 2.0 * sc);
    r.normal_A = a;
    const double s2 = r.sigma2, lam = spec.lambda, rw = std::sqrt(r.ew2);
    const double root2pi = std::sqrt(2.0 * std::numbers::pi);
    r.normal_terms.variance_term = s2 / (2.0 * lam) * std::sqrt(r.variance);
    r.normal_terms.remainder_term = s2 * (rw * (root2pi + 4.0) / 4.0 + 1.5 * a) * r.remainder_l2 / lam;
    r.normal_terms.cube_term = s2 * a * a * a / lam * (rw * root2pi / 16.0 + rw / 4.0);
    r.normal_terms.psi_term = s2 * 1.5 * a * rw;
    r.normal_total = r.normal_terms.sum();
  }

  r.exact_dK = kolmogorov_distance(law, gamma, [&](double t) { return density.cdf(t); });
  return r;
}

}  // namespace beg

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

// n-ladder experiments: exact d_K between W_gamma and the case's comparison
// density, then a least-squares slope in log-log coordinates.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "beg/cases.hpp"
#include "beg/density.hpp"
#include "beg/errors.hpp"
#include "beg/exact_law.hpp"
#include "beg/stein.hpp"

namespace beg {

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

struct RatePoint {
  double n = 0.0;
  double d = 0.0;
};

inline LogLogFit fit_loglog(const std::vector<RatePoint>& pts) {
  if (pts.size() < 4) throw ValidationError("log-log fit needs at least 4 points");
  double mx = 0.0, my = 0.0;
  for (const RatePoint& p : pts) {
    if (!(p.n > 0.0) || !(p.d > 0.0)) throw ValidationError("log-log fit needs positive n and d");
    mx += std::log(p.n);
    my += std::log(p.d);
  }
  const double k = static_cast<double>(pts.size());
  mx /= k;
  my /= k;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const RatePoint& p : pts) {
    const double x = std::log(p.n) - mx, y = std::log(p.d) - my;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  if (!(sxx > 0.0)) throw DegenerateFitError("all n equal");
  if (!(syy > 0.0)) throw DegenerateFitError("all d equal");
  LogLogFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r_squared = sxy * sxy / (sxx * syy);
  return f;
}

struct ScanOptions {
  LawOptions law;
  unsigned threads = 1;
  bool with_bounds = false;
  // Stein-constant grid for the bounds
  double stein_lo = -10.0;
  double stein_hi = 10.0;
  double stein_step = 0.005;
  double slope_tolerance = 0.15;
  double bounded_factor = 10.0;
};

struct LadderPoint {
  long n = 0;
  ModelParams params;
  bool ok = false;
  std::string error;
  double dK = 0.0;
  MomentSet moments;
  DensityCoefficients density;
  // Bound with A = n^{gamma-1} and with A just above the increment bound
  // 2 n^{gamma-1}, where the tail term vanishes.
  std::optional<BoundReport> bound;
  std::optional<BoundReport> bound_tail_free;
};

struct RateReport {
  CaseSpec spec;
  std::vector<LadderPoint> ladder;
  bool fitted = false;
  std::string fit_error;
  LogLogFit fit;
  double predicted = 0.0;
  double scaled_first = 0.0;  // d_K n^r at the smallest n
  double scaled_max = 0.0;
  bool slope_ok = false;
  bool bounded_ok = false;
  bool dominance_ok = true;   // every evaluated bound >= d_K

  bool passed() const { return fitted && slope_ok && bounded_ok; }
};

// Increment bound plus a relative margin so the indicator is empty.
inline double tail_free_A(long n, double gamma) { return 2.0 * w_scale(n, gamma) * (1.0 + 1e-9); }

inline LadderPoint run_point(const CaseSpec& c, long n, const ScanOptions& opt = {}) {
  LadderPoint pt;
  pt.n = n;
  try {
    pt.params = c.params_at(n);
    LawOptions lo = opt.law;
    lo.threads = opt.threads;
    const JointLaw law = build_joint_law(pt.params, n, lo);
    pt.moments = moments(law, c.gamma);
    const RegressionSpec spec = regression_spec(c, pt.params, n);
    pt.density = comparison_coefficients(c, spec, pt.moments);
    const PolyDensity d = normalize_density(pt.density.b1, pt.density.b2, pt.density.b3);
    pt.dK = kolmogorov_distance(law, c.gamma, [&](double t) { return d.cdf(t); });
    if (opt.with_bounds) {
      const SteinConstants k = estimate_stein_constants(d, opt.stein_lo, opt.stein_hi, opt.stein_step, opt.threads);
      pt.bound = evaluate_bound(law, c.gamma, spec, d, k, w_scale(n, c.gamma), opt.threads);
      pt.bound_tail_free = evaluate_bound(law, c.gamma, spec, d, k, tail_free_A(n, c.gamma), opt.threads);
    }
    pt.ok = true;
  } catch (const Error& e) {
    pt.error = std::string(e.kind()) + ": " + e.what();
  }
  return pt;
}

inline RateReport run_case(const CaseSpec& c, const std::vector<long>& ladder, const ScanOptions& opt = {}) {
  if (ladder.size() < 4) throw ValidationError("rate scan needs a ladder of at least 4 points");
  for (std::size_t i = 1; i < ladder.size(); ++i) {
    if (ladder[i] <= ladder[i - 1]) throw ValidationError("ladder must be strictly increasing");
  }
  RateReport r;
  r.spec = c;
  r.predicted = predicted_rate(c);
  std::vector<RatePoint> pts;
  for (long n : ladder) {
    LadderPoint p = run_point(c, n, opt);
    if (p.ok) {
      pts.push_back({static_cast<double>(n), p.dK});
      for (const auto* b : {&p.bound, &p.bound_tail_free}) {
        if (*b && !((*b)->total >= (*b)->exact_dK)) r.dominance_ok = false;
      }
    }
    r.ladder.push_back(std::move(p));
  }
  try {
    r.fit = fit_loglog(pts);
    r.fitted = true;
  } catch (const Error& e) {
    r.fit_error = std::string(e.kind()) + ": " + e.what();
    return r;
  }
  r.slope_ok = r.fit.slope <= -r.predicted + opt.slope_tolerance;
  r.scaled_first = pts.front().d * std::pow(pts.front().n, r.predicted);
  for (const RatePoint& p : pts) r.scaled_max = std::max(r.scaled_max, p.d * std::pow(p.n, r.predicted));
  r.bounded_ok = r.scaled_max <= opt.bounded_factor * r.scaled_first;
  return r;
}

inline RateReport run_case(const CaseSpec& c, const ScanOptions& opt = {}) { return run_case(c, c.ladder, opt); }

}  // namespace beg

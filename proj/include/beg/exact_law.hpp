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

// Exact finite-n law of (s, M) = (spin sum, number of nonzero spins) under the
// Gibbs measure. The Hamiltonian depends on a configuration only through
// these two counts, so the law has O(n^2) atoms.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "beg/errors.hpp"
#include "beg/model.hpp"
#include "beg/numerics.hpp"

namespace beg {

struct LawOptions {
  long cap = 20000;
  unsigned threads = 0;
  // Atoms whose log-probability falls below this are dropped. Everything
  // cut is far below double-precision resolution of any reported statistic.
  double log_prob_floor = -80.0;
};

// Atoms with s >= 0 are stored; p(-s, M) = p(s, M) is exact by construction.
class JointLaw {
 public:
  // Probabilities of the atoms (s, M) for M = m_lo, m_lo + 2, ..., in order.
  struct Slice {
    long m_lo = 0;
    std::vector<double> prob;

    long m_hi() const { return m_lo + 2 * (static_cast<long>(prob.size()) - 1); }
    bool empty() const { return prob.empty(); }
  };

  JointLaw(ModelParams params, long n, double log_partition, std::vector<Slice> slices)
      : params_(params), n_(n), log_partition_(log_partition), slices_(std::move(slices)) {
    marginal_.resize(slices_.size());
    for (std::size_t s = 0; s < slices_.size(); ++s) {
      numerics::CompensatedSum acc;
      for (double p : slices_[s].prob) acc += p;
      marginal_[s] = acc.value();
    }
  }

  long n() const { return n_; }
  const ModelParams& params() const { return params_; }
  double log_partition() const { return log_partition_; }

  // Largest |s| with a stored atom.
  long s_max() const { return static_cast<long>(slices_.size()) - 1; }

  const Slice& slice(long s) const { return slices_.at(static_cast<std::size_t>(std::abs(s))); }

  // P(S_n = s).
  double s_prob(long s) const {
    const auto a = static_cast<std::size_t>(std::abs(s));
    return a < marginal_.size() ? marginal_[a] : 0.0;
  }

  double prob(long s, long M) const {
    const long a = std::abs(s);
    if (a > s_max() || M < a || M > n_ || ((M - a) & 1L)) return 0.0;
    const Slice& sl = slices_[static_cast<std::size_t>(a)];
    if (sl.empty() || M < sl.m_lo || M > sl.m_hi()) return 0.0;
    return sl.prob[static_cast<std::size_t>((M - sl.m_lo) / 2)];
  }

  // Calls f(s, M, p) for every stored atom, negative s included, in
  // increasing s and M.
  template <class F>
  void for_each_atom(F&& f) const {
    for (long s = -s_max(); s <= s_max(); ++s) {
      const Slice& sl = slice(s);
      for (std::size_t j = 0; j < sl.prob.size(); ++j) f(s, sl.m_lo + 2 * static_cast<long>(j), sl.prob[j]);
    }
  }

  std::size_t atom_count() const {
    std::size_t c = slices_.empty() ? 0 : slices_[0].prob.size();
    for (std::size_t s = 1; s < slices_.size(); ++s) c += 2 * slices_[s].prob.size();
    return c;
  }

 private:
  ModelParams params_;
  long n_;
  double log_partition_;
  std::vector<Slice> slices_;
  std::vector<double> marginal_;
};

inline JointLaw build_joint_law(const ModelParams& params, long n, const LawOptions& opt = {}) {
  params.validate();
  if (n < 1) throw ValidationError("n must be >= 1");
  if (n > opt.cap) {
    throw CapExceededError("n = " + std::to_string(n) + " exceeds the exact-law cap " +
                           std::to_string(opt.cap));
  }
  std::vector<double> lf(static_cast<std::size_t>(n) + 1);
  for (long i = 0; i <= n; ++i) lf[static_cast<std::size_t>(i)] = std::lgamma(static_cast<double>(i) + 1.0);

  const double beta = params.beta;
  const double bk_over_n = params.beta * params.K / static_cast<double>(n);
  auto log_weight = [&](long s, long M) {
    const auto np = static_cast<std::size_t>((M + s) / 2);
    const auto nm = static_cast<std::size_t>((M - s) / 2);
    const auto n0 = static_cast<std::size_t>(n - M);
    const double sd = static_cast<double>(s);
    return lf[static_cast<std::size_t>(n)] - lf[np] - lf[nm] - lf[n0] - beta * static_cast<double>(M) +
           bk_over_n * sd * sd;
  };

  const std::size_t ns = static_cast<std::size_t>(n) + 1;
  std::vector<numerics::LogSumExp> slice_lse(ns);
  numerics::parallel_for(ns, opt.threads, [&](std::size_t i) {
    const long s = static_cast<long>(i);
    numerics::LogSumExp acc;
    for (long M = s; M <= n; M += 2) acc.add(log_weight(s, M));
    slice_lse[i] = acc;
  });
  numerics::LogSumExp total = slice_lse[0];
  const double log2 = std::numbers::ln2;
  for (std::size_t i = 1; i < ns; ++i) {
    numerics::LogSumExp twice;
    twice.add(slice_lse[i].value() + log2);
    total.merge(twice);
  }
  const double log_z = total.value();

  std::vector<JointLaw::Slice> slices(ns);
  numerics::parallel_for(ns, opt.threads, [&](std::size_t i) {
    const long s = static_cast<long>(i);
    if (slice_lse[i].value() - log_z < opt.log_prob_floor) return;
    // log w is concave in M, so the retained atoms form one contiguous run.
    JointLaw::Slice& out = slices[i];
    for (long M = s; M <= n; M += 2) {
      const double lp = log_weight(s, M) - log_z;
      if (lp < opt.log_prob_floor) {
        if (!out.prob.empty()) break;
        continue;
      }
      if (out.prob.empty()) out.m_lo = M;
      out.prob.push_back(std::exp(lp));
    }
  });
  std::size_t last = ns;
  while (last > 1 && slices[last - 1].empty()) --last;
  slices.resize(last);

  const double log_partition = log_z - static_cast<double>(n) * std::log(3.0);
  return JointLaw(params, n, log_partition, std::move(slices));
}

// ---------------------------------------------------------------------------
// Statistics of W_gamma = S_n / n^{1 - gamma}

inline void require_gamma(double gamma) {
  if (!(gamma > 0.0) || gamma > 0.5) throw ValidationError("gamma must lie in (0, 1/2]");
}

inline double w_scale(long n, double gamma) {
  return std::pow(static_cast<double>(n), gamma - 1.0);
}

// E[W_gamma^k]; the +s and -s atoms are summed as a pair so odd orders
// vanish exactly.
inline double moment(const JointLaw& law, double gamma, int k) {
  require_gamma(gamma);
  if (k < 0 || k > 12) throw ValidationError("moment order must lie in [0, 12]");
  if (k == 0) return 1.0;
  if (k % 2 == 1) return 0.0;
  const double sc = w_scale(law.n(), gamma);
  numerics::CompensatedSum acc;
  for (long s = 1; s <= law.s_max(); ++s) {
    acc += 2.0 * law.s_prob(s) * std::pow(static_cast<double>(s) * sc, k);
  }
  return acc.value();
}

struct MomentSet {
  long n = 0;
  double gamma = 0.5;
  std::array<double, 9> m{};  // m[k] = E[W^k]

  double operator[](int k) const { return m.at(static_cast<std::size_t>(k)); }
};

inline MomentSet moments(const JointLaw& law, double gamma) {
  MomentSet out;
  out.n = law.n();
  out.gamma = gamma;
  for (int k = 0; k <= 8; ++k) out.m[static_cast<std::size_t>(k)] = moment(law, gamma, k);
  return out;
}

// sup_t |P(W <= t) - F(t)| evaluated at the jumps of the discrete law, where
// both one-sided limits are compared. F may itself have jumps; its left limit
// is taken one ulp below each atom.
template <class Cdf>
double kolmogorov_distance(const JointLaw& law, double gamma, Cdf&& F) {
  require_gamma(gamma);
  const double sc = w_scale(law.n(), gamma);
  numerics::CompensatedSum cum;
  double prev = 0.0;
  double dist = 0.0;
  for (long s = -law.s_max(); s <= law.s_max(); ++s) {
    const double p = law.s_prob(s);
    if (!(p > 0.0)) continue;
    cum += p;
    const double here = std::min(1.0, cum.value());
    const double t = static_cast<double>(s) * sc;
    const double f = F(t);
    const double f_left = F(std::nextafter(t, -std::numeric_limits<double>::infinity()));
    dist = std::max({dist, std::abs(here - f), std::abs(f_left - prev)});
    prev = here;
  }
  return std::min(dist, 1.0);
}

// Step CDF of W_gamma, accumulated in the same order as kolmogorov_distance
// so a law compared with itself gives exactly 0.
class LawCdf {
 public:
  LawCdf(const JointLaw& law, double gamma) {
    require_gamma(gamma);
    const double sc = w_scale(law.n(), gamma);
    numerics::CompensatedSum cum;
    for (long s = -law.s_max(); s <= law.s_max(); ++s) {
      const double p = law.s_prob(s);
      if (!(p > 0.0)) continue;
      cum += p;
      t_.push_back(static_cast<double>(s) * sc);
      c_.push_back(std::min(1.0, cum.value()));
    }
  }

  double operator()(double t) const {
    const auto it = std::upper_bound(t_.begin(), t_.end(), t);
    return it == t_.begin() ? 0.0 : c_[static_cast<std::size_t>(it - t_.begin()) - 1];
  }

 private:
  std::vector<double> t_, c_;
};

inline double kolmogorov_distance(const JointLaw& a, double gamma_a, const JointLaw& b, double gamma_b) {
  const LawCdf F(b, gamma_b);
  return kolmogorov_distance(a, gamma_a, F);
}

// Cov(omega_i^2, omega_j^2), i != j, from the law of M by exchangeability.
inline double pair_covariance(const JointLaw& law) {
  const long n = law.n();
  if (n < 2) throw ValidationError("pair covariance needs n >= 2");
  numerics::CompensatedSum em;
  law.for_each_atom([&](long, long M, double p) { em += p * static_cast<double>(M); });
  const double mean = em.value();
  numerics::CompensatedSum var;
  law.for_each_atom([&](long, long M, double p) {
    const double d = static_cast<double>(M) - mean;
    var += p * d * d;
  });
  const double nd = static_cast<double>(n);
  return (var.value() - mean + mean * mean / nd) / (nd * (nd - 1.0));
}

inline double pair_covariance(const ModelParams& params, long n, const LawOptions& opt = {}) {
  if (n < 2) throw ValidationError("pair covariance needs n >= 2");
  return pair_covariance(build_joint_law(params, n, opt));
}

// ---------------------------------------------------------------------------
// Hubbard-Stratonovich identity: W + Y / n^{1/2 - gamma} with
// Y ~ N(0, 1/(2 beta K)) independent of W has density proportional to
// exp(-n G(y / n^gamma)).

struct HsCheck {
  double sup_error = 0.0;
  std::vector<double> t;
  std::vector<double> smoothed_cdf;  // Gaussian convolution of the exact law
  std::vector<double> g_cdf;         // CDF of exp(-n G(y / n^gamma))
};

inline HsCheck hs_check(const JointLaw& law, double gamma, int grid_points = 2001) {
  require_gamma(gamma);
  if (grid_points < 3) throw ValidationError("hs_check needs at least 3 grid points");
  const ModelParams& p = law.params();
  const long n = law.n();
  const double nd = static_cast<double>(n);
  const double tau = 1.0 / std::sqrt(2.0 * p.beta * p.K * std::pow(nd, 1.0 - 2.0 * gamma));
  const double width = std::sqrt(moment(law, gamma, 2) + tau * tau);
  const double half = 8.0 * width;
  const double sc = w_scale(n, gamma);
  const double ng = std::pow(nd, gamma);

  HsCheck out;
  out.t.resize(static_cast<std::size_t>(grid_points));
  for (int i = 0; i < grid_points; ++i) out.t[static_cast<std::size_t>(i)] = -half + 2.0 * half * i / (grid_points - 1);

  out.smoothed_cdf.resize(out.t.size());
  for (std::size_t i = 0; i < out.t.size(); ++i) {
    numerics::CompensatedSum acc;
    for (long s = -law.s_max(); s <= law.s_max(); ++s) {
      const double q = law.s_prob(s);
      if (q > 0.0) acc += q * numerics::normal_cdf((out.t[i] - static_cast<double>(s) * sc) / tau);
    }
    out.smoothed_cdf[i] = acc.value();
  }

  // Shift the exponent by its minimum on the integration range so the
  // integrand peaks at 1.
  const double reach = 2.0 * half;
  double shift = 0.0;
  for (int i = 0; i <= 4000; ++i) {
    const double y = -reach + reach * i / 2000.0;
    shift = std::min(shift, nd * G_eval(p, y / ng));
  }
  auto dens = [&](double y) { return std::exp(-(nd * G_eval(p, y / ng) - shift)); };
  std::vector<double> cum(out.t.size());
  numerics::CompensatedSum acc;
  acc += numerics::integrate(dens, -reach, out.t[0], 1e-13);
  cum[0] = acc.value();
  for (std::size_t i = 1; i < out.t.size(); ++i) {
    acc += numerics::integrate_panel(dens, out.t[i - 1], out.t[i]);
    cum[i] = acc.value();
  }
  acc += numerics::integrate(dens, out.t.back(), reach, 1e-13);
  const double z = acc.value();
  out.g_cdf.resize(out.t.size());
  for (std::size_t i = 0; i < out.t.size(); ++i) {
    out.g_cdf[i] = cum[i] / z;
    out.sup_error = std::max(out.sup_error, std::abs(out.g_cdf[i] - out.smoothed_cdf[i]));
  }
  return out;
}

inline HsCheck hs_check(const ModelParams& params, long n, double gamma, const LawOptions& opt = {}) {
  return hs_check(build_joint_law(params, n, opt), gamma);
}

}  // namespace beg

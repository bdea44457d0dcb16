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

// Catalog of the limit theorems with rates: which gamma, which parameter
// path, which monomials the comparison density keeps, and the rate exponent
// r in d_K <= C n^{-r}.

#include <array>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "beg/density.hpp"
#include "beg/errors.hpp"
#include "beg/exact_law.hpp"
#include "beg/model.hpp"
#include "beg/stein.hpp"

namespace beg {

enum class Theorem { FixedA, FixedB, FixedC, SeqA, B1, B2, B3, C1, C2, C3, C4, C5, C6, C7, C8 };

inline std::string_view to_string(Theorem t) {
  switch (t) {
    case Theorem::FixedA: return "fixed-A";
    case Theorem::FixedB: return "fixed-B";
    case Theorem::FixedC: return "fixed-C";
    case Theorem::SeqA: return "seq-A";
    case Theorem::B1: return "B1";
    case Theorem::B2: return "B2";
    case Theorem::B3: return "B3";
    case Theorem::C1: return "C1";
    case Theorem::C2: return "C2";
    case Theorem::C3: return "C3";
    case Theorem::C4: return "C4";
    case Theorem::C5: return "C5";
    case Theorem::C6: return "C6";
    case Theorem::C7: return "C7";
    case Theorem::C8: return "C8";
  }
  return "?";
}

inline bool is_b_theorem(Theorem t) { return t == Theorem::B1 || t == Theorem::B2 || t == Theorem::B3; }
inline bool is_c_theorem(Theorem t) { return t >= Theorem::C1; }
inline bool is_fixed_theorem(Theorem t) {
  return t == Theorem::FixedA || t == Theorem::FixedB || t == Theorem::FixedC;
}

struct CaseSpec {
  std::string id;
  Theorem theorem = Theorem::FixedA;
  std::string subcase;
  double gamma = 0.5;
  ModelParams params;  // fixed-parameter theorems
  Schedule schedule;   // everything else
  std::array<bool, 3> pattern{true, false, false};  // active x^2, x^4, x^6
  std::string validity;
  double predicted_exponent = 0.5;
  std::vector<long> ladder;

  bool fixed() const { return is_fixed_theorem(theorem); }
  ModelParams params_at(long n) const { return fixed() ? params : schedule_eval(schedule, n); }
  double delta1() const { return schedule.delta1; }
  double delta2() const { return schedule.delta2; }
};

namespace detail {

constexpr double kEq = 1e-12;

inline bool eq(double a, double b) { return std::abs(a - b) <= kEq; }
// a in (lo, hi] etc. with the closed ends widened by kEq
inline bool in_oc(double a, double lo, double hi) { return a > lo + kEq && a <= hi + kEq; }
inline bool in_oo(double a, double lo, double hi) { return a > lo + kEq && a < hi - kEq; }
inline bool ge(double a, double b) { return a >= b - kEq; }
inline bool gt(double a, double b) { return a > b + kEq; }
inline bool lt(double a, double b) { return a < b - kEq; }

inline bool in_region_a(const ModelParams& p) { return classify_region(p).tag == RegionTag::A; }

inline double v_exponent(double g, double d2) { return std::min(2.0 * g + d2 - 1.0, 4.0 * g - 1.0); }
inline double w_exponent(double g, double d1, double d2) {
  return std::min({2.0 * g + d2 - 1.0, 4.0 * g + d1 - 1.0, 6.0 * g - 1.0});
}

// Rate exponent from the branch table, or a negative value when no branch
// (or the theorem's premise) applies.
inline double branch_rate(const CaseSpec& c) {
  const double g = c.gamma, d1 = c.delta1(), d2 = c.delta2();
  const Schedule& s = c.schedule;
  switch (c.theorem) {
    case Theorem::FixedA:
      return eq(g, 0.5) && in_region_a(c.params) ? 0.5 : -1.0;
    case Theorem::FixedB:
      return eq(g, 0.25) && c.params.beta < kBetaCritical && eq(c.params.K, critical_K(c.params.beta)) ? 0.25 : -1.0;
    case Theorem::FixedC:
      return eq(g, 1.0 / 6.0) && eq(c.params.beta, kBetaCritical) && eq(c.params.K, critical_K(kBetaCritical))
                 ? 1.0 / 6.0
                 : -1.0;
    case Theorem::SeqA:
      return eq(g, 0.5) && s.mode == ScheduleMode::ApproachPoint && in_region_a({s.beta_fixed, s.K_target}) ? 0.5
                                                                                                                : -1.0;
    default:
      break;
  }
  if (is_b_theorem(c.theorem)) {
    if (s.mode != ScheduleMode::FixedBeta || !(s.beta_fixed < kBetaCritical) || !eq(v_exponent(g, d2), 0.0)) {
      return -1.0;
    }
    switch (c.theorem) {
      case Theorem::B1:
        return eq(g, 0.25) && eq(d2, 0.5) ? 0.25 : -1.0;
      case Theorem::B2:
        if (!eq(2.0 * g, 1.0 - d2) || !in_oo(g, 0.25, 0.5) || s.k < 0.0) return -1.0;
        return g <= 1.0 / 3.0 + kEq ? 4.0 * g - 1.0 : g;
      case Theorem::B3:
        if (!eq(g, 0.25) || !gt(d2, 0.5)) return -1.0;
        return lt(d2, 0.75) ? d2 - 0.5 : 0.25;
      default:
        return -1.0;
    }
  }
  if (s.mode != ScheduleMode::MovingBeta || !eq(w_exponent(g, d1, d2), 0.0)) return -1.0;
  switch (c.theorem) {
    case Theorem::C1:
      return eq(g, 1.0 / 6.0) && eq(d1, 1.0 / 3.0) && eq(d2, 2.0 / 3.0) ? 1.0 / 6.0 : -1.0;
    case Theorem::C2:
      if (!eq(2.0 * g, 1.0 - d2) || !in_oo(g, 0.25, 0.5) || !gt(d1, 0.0) || s.k < 0.0) return -1.0;
      if (in_oc(g, 0.25, 1.0 / 3.0)) return lt(d1, 1.0 - 3.0 * g) ? 4.0 * g + d1 - 1.0 : g;
      return g;
    case Theorem::C3:
      if (!eq(2.0 * g, 1.0 - d2) || !in_oc(g, 1.0 / 6.0, 0.25) || !gt(d1, 2.0 * d2 - 1.0) || s.k < 0.0) return -1.0;
      if (in_oc(g, 1.0 / 6.0, 0.2)) {
        if (gt(d1, 1.0 - 4.0 * g) && lt(d1, 2.0 * g)) return 4.0 * g + d1 - 1.0;
        if (ge(d1, 2.0 * g)) return 6.0 * g - 1.0;
        return -1.0;
      }
      if (gt(d1, 1.0 - 4.0 * g) && lt(d1, 1.0 - 3.0 * g)) return 4.0 * g + d1 - 1.0;
      if (ge(d1, 1.0 - 3.0 * g)) return g;
      return -1.0;
    case Theorem::C4: {
      if (!eq(g, 1.0 / 6.0) || !gt(d1, 1.0 / 3.0) || !gt(d2, 2.0 / 3.0)) return -1.0;
      const bool d1_low = lt(d1, 0.5), d2_low = lt(d2, 5.0 / 6.0);
      if (d1_low && d2_low) return d1 <= d2 - 1.0 / 3.0 + kEq ? d1 - 1.0 / 3.0 : d2 - 2.0 / 3.0;
      if (d1_low) return d1 - 1.0 / 3.0;
      if (d2_low) return d2 - 2.0 / 3.0;
      return 1.0 / 6.0;
    }
    case Theorem::C5:
      if (!eq(4.0 * g, 1.0 - d1) || !in_oo(g, 1.0 / 6.0, 0.25) || !gt(2.0 * d2, d1 + 1.0) || s.b < 0.0) return -1.0;
      if (lt(g, 0.2)) return lt(d2, 4.0 * g) ? 2.0 * g + d2 - 1.0 : 6.0 * g - 1.0;
      return lt(d2, 1.0 - g) ? 2.0 * g + d2 - 1.0 : g;
    case Theorem::C6:
      if (!eq(g, 1.0 / 6.0) || !eq(d1, 1.0 / 3.0) || !gt(d2, 2.0 / 3.0)) return -1.0;
      return lt(d2, 5.0 / 6.0) ? d2 - 2.0 / 3.0 : 1.0 / 6.0;
    case Theorem::C7:
      if (!eq(g, 1.0 / 6.0) || !eq(d2, 2.0 / 3.0) || !gt(d1, 1.0 / 3.0)) return -1.0;
      return lt(d1, 0.5) ? d1 - 1.0 / 3.0 : 1.0 / 6.0;
    case Theorem::C8:
      if (!eq(4.0 * g, 1.0 - d1) || !in_oo(g, 1.0 / 6.0, 0.25) || !eq(2.0 * d2, d1 + 1.0) || s.b < 0.0) return -1.0;
      return g <= 0.2 + kEq ? 6.0 * g - 1.0 : g;
    default:
      return -1.0;
  }
}

}  // namespace detail

// Exponent r of the asserted rate n^{-r}. Throws when the case's parameters
// fall outside every branch of its theorem.
inline double predicted_rate(const CaseSpec& c) {
  const double r = detail::branch_rate(c);
  if (!(r > 0.0)) {
    throw InvalidParametersError("case " + c.id + ": parameters satisfy no rate branch (" + c.validity + ")");
  }
  return r;
}

// v for B cases, w for C cases, 0 otherwise.
inline double scaling_constraint(const CaseSpec& c) {
  if (is_b_theorem(c.theorem)) return detail::v_exponent(c.gamma, c.delta2());
  if (is_c_theorem(c.theorem)) return detail::w_exponent(c.gamma, c.delta1(), c.delta2());
  return 0.0;
}

namespace detail {

inline std::vector<long> ladder(int lo, int hi) {
  std::vector<long> out;
  for (int e = lo; e <= hi; ++e) out.push_back(1L << e);
  return out;
}

inline CaseSpec fixed_case(std::string id, Theorem t, double gamma, ModelParams p, std::array<bool, 3> pattern,
                           std::string validity) {
  CaseSpec c;
  c.id = std::move(id);
  c.theorem = t;
  c.subcase = "fixed";
  c.gamma = gamma;
  c.params = p;
  c.pattern = pattern;
  c.validity = std::move(validity);
  return c;
}

inline CaseSpec path_case(std::string id, Theorem t, std::string subcase, double gamma, ScheduleMode mode,
                          double d1, double d2, double b, double k, std::array<bool, 3> pattern,
                          std::string validity) {
  CaseSpec c;
  c.id = std::move(id);
  c.theorem = t;
  c.subcase = std::move(subcase);
  c.gamma = gamma;
  c.schedule.mode = mode;
  c.schedule.beta_fixed = 1.0;
  c.schedule.delta1 = d1;
  c.schedule.delta2 = d2;
  c.schedule.b = b;
  c.schedule.k = k;
  c.pattern = pattern;
  c.validity = std::move(validity);
  return c;
}

}  // namespace detail

// All 42 entries. Sign variants of b and k count as separate entries.
inline std::vector<CaseSpec> case_catalog() {
  using detail::fixed_case;
  using detail::path_case;
  constexpr std::array<bool, 3> P1{true, false, false}, P2{false, true, false}, P3{false, false, true};
  constexpr std::array<bool, 3> P12{true, true, false}, P13{true, false, true}, P23{false, true, true};
  constexpr std::array<bool, 3> P123{true, true, true};
  const auto FB = ScheduleMode::FixedBeta;
  const auto MB = ScheduleMode::MovingBeta;
  const double t = 1.0 / 3.0, s6 = 1.0 / 6.0;

  std::vector<CaseSpec> v;
  v.push_back(fixed_case("fixed-A", Theorem::FixedA, 0.5, {1.0, 0.6}, P1, "(beta, K) in A, gamma = 1/2"));
  v.push_back(fixed_case("fixed-B", Theorem::FixedB, 0.25, {1.0, critical_K(1.0)}, P2,
                         "beta < beta_c, K = K_c(beta), gamma = 1/4"));
  v.push_back(fixed_case("fixed-C", Theorem::FixedC, s6, {kBetaCritical, critical_K(kBetaCritical)}, P3,
                         "tricritical point, gamma = 1/6"));
  {
    CaseSpec c = path_case("seq-A", Theorem::SeqA, "approach (1, 0.6)", 0.5, ScheduleMode::ApproachPoint, 0.5, 0.5,
                           0.2, 0.1, P1, "(beta_n, K_n) -> (beta, K) in A, gamma = 1/2");
    c.schedule.beta_fixed = 1.0;
    c.schedule.K_target = 0.6;
    v.push_back(c);
  }

  const std::string bpre = "beta < beta_c fixed, v = 0; ";
  v.push_back(path_case("B1.k+", Theorem::B1, "k > 0", 0.25, FB, 1.0, 0.5, 1.0, 1.0, P12,
                        bpre + "gamma = 1/4, delta2 = 1/2"));
  v.push_back(path_case("B1.k-", Theorem::B1, "k < 0", 0.25, FB, 1.0, 0.5, 1.0, -1.0, P12,
                        bpre + "gamma = 1/4, delta2 = 1/2"));
  v.push_back(path_case("B2.a", Theorem::B2, "gamma in (1/4, 1/3]", 0.3, FB, 1.0, 0.4, 1.0, 1.0, P1,
                        bpre + "2 gamma = 1 - delta2, gamma in (1/4, 1/3]"));
  v.push_back(path_case("B2.b", Theorem::B2, "gamma in [1/3, 1/2)", 0.4, FB, 1.0, 0.2, 1.0, 1.0, P1,
                        bpre + "2 gamma = 1 - delta2, gamma in [1/3, 1/2)"));
  v.push_back(path_case("B3.a", Theorem::B3, "delta2 in (1/2, 3/4)", 0.25, FB, 1.0, 0.6, 1.0, 1.0, P2,
                        bpre + "gamma = 1/4, delta2 in (1/2, 3/4)"));
  v.push_back(path_case("B3.b", Theorem::B3, "delta2 >= 3/4", 0.25, FB, 1.0, 0.8, 1.0, 1.0, P2,
                        bpre + "gamma = 1/4, delta2 >= 3/4"));

  const std::string cpre = "moving beta, w = 0; ";
  for (double k : {1.0, -1.0}) {
    for (double b : {1.0, -1.0}) {
      const std::string tag = std::string(k > 0 ? "k+" : "k-") + (b > 0 ? "b+" : "b-");
      v.push_back(path_case("C1." + tag, Theorem::C1, tag, s6, MB, t, 2.0 * t, b, k, P123,
                            cpre + "gamma = 1/6, delta1 = 1/3, delta2 = 2/3"));
    }
  }
  const std::string c2pre = cpre + "2 gamma = 1 - delta2, delta1 > 0, ";
  v.push_back(path_case("C2.a", Theorem::C2, "gamma in (1/4, 1/3], delta1 < 1 - 3 gamma", 0.3, MB, 0.05, 0.4, 1.0,
                        1.0, P1, c2pre + "gamma in (1/4, 1/3], delta1 in (0, 1 - 3 gamma)"));
  v.push_back(path_case("C2.b", Theorem::C2, "gamma in (1/4, 1/3], delta1 >= 1 - 3 gamma", 0.3, MB, 0.3, 0.4, 1.0,
                        1.0, P1, c2pre + "gamma in (1/4, 1/3], delta1 >= 1 - 3 gamma"));
  v.push_back(path_case("C2.c", Theorem::C2, "gamma in [1/3, 1/2)", 0.4, MB, 0.3, 0.2, 1.0, 1.0, P1,
                        c2pre + "gamma in [1/3, 1/2)"));
  const std::string c3pre = cpre + "2 gamma = 1 - delta2, delta1 > 2 delta2 - 1, ";
  v.push_back(path_case("C3.a", Theorem::C3, "gamma in (1/6, 1/5], delta1 < 2 gamma", 0.18, MB, 0.32, 0.64, 1.0, 1.0,
                        P1, c3pre + "gamma in (1/6, 1/5], 1 - 4 gamma < delta1 < 2 gamma"));
  v.push_back(path_case("C3.b", Theorem::C3, "gamma in (1/6, 1/5], delta1 >= 2 gamma", 0.18, MB, 0.5, 0.64, 1.0, 1.0,
                        P1, c3pre + "gamma in (1/6, 1/5], delta1 >= 2 gamma"));
  v.push_back(path_case("C3.c", Theorem::C3, "gamma in [1/5, 1/4], delta1 < 1 - 3 gamma", 0.23, MB, 0.2, 0.54, 1.0,
                        1.0, P1, c3pre + "gamma in [1/5, 1/4], 1 - 4 gamma < delta1 < 1 - 3 gamma"));
  v.push_back(path_case("C3.d", Theorem::C3, "gamma in [1/5, 1/4], delta1 >= 1 - 3 gamma", 0.23, MB, 0.5, 0.54, 1.0,
                        1.0, P1, c3pre + "gamma in [1/5, 1/4], delta1 >= 1 - 3 gamma"));
  const std::string c4pre = cpre + "gamma = 1/6, delta1 > 1/3, delta2 > 2/3, ";
  v.push_back(path_case("C4.a", Theorem::C4, "delta1 <= delta2 - 1/3", s6, MB, 0.4, 0.78, 1.0, 1.0, P3,
                        c4pre + "delta1 in (1/3, 1/2), delta2 in (2/3, 5/6), delta1 <= delta2 - 1/3"));
  v.push_back(path_case("C4.b", Theorem::C4, "delta1 > delta2 - 1/3", s6, MB, 0.45, 0.72, 1.0, 1.0, P3,
                        c4pre + "delta1 in (1/3, 1/2), delta2 in (2/3, 5/6), delta1 > delta2 - 1/3"));
  v.push_back(path_case("C4.c", Theorem::C4, "delta1 < 1/2, delta2 >= 5/6", s6, MB, 0.4, 0.9, 1.0, 1.0, P3,
                        c4pre + "delta1 in (1/3, 1/2), delta2 >= 5/6"));
  v.push_back(path_case("C4.d", Theorem::C4, "delta1 >= 1/2, delta2 < 5/6", s6, MB, 0.6, 0.75, 1.0, 1.0, P3,
                        c4pre + "delta1 >= 1/2, delta2 in (2/3, 5/6)"));
  v.push_back(path_case("C4.e", Theorem::C4, "delta1 >= 1/2, delta2 >= 5/6", s6, MB, 0.6, 0.9, 1.0, 1.0, P3,
                        c4pre + "delta1 >= 1/2, delta2 >= 5/6"));
  const std::string c5pre = cpre + "4 gamma = 1 - delta1, 2 delta2 > delta1 + 1, ";
  v.push_back(path_case("C5.a", Theorem::C5, "gamma in (1/6, 1/5), delta2 < 4 gamma", 0.18, MB, 0.28, 0.68, 1.0, 1.0,
                        P2, c5pre + "gamma in (1/6, 1/5), delta2 < 4 gamma"));
  v.push_back(path_case("C5.b", Theorem::C5, "gamma in (1/6, 1/5), delta2 >= 4 gamma", 0.18, MB, 0.28, 0.9, 1.0, 1.0,
                        P2, c5pre + "gamma in (1/6, 1/5), delta2 >= 4 gamma"));
  v.push_back(path_case("C5.c", Theorem::C5, "gamma in [1/5, 1/4), delta2 < 1 - gamma", 0.22, MB, 0.12, 0.65, 1.0,
                        1.0, P2, c5pre + "gamma in [1/5, 1/4), delta2 < 1 - gamma"));
  v.push_back(path_case("C5.d", Theorem::C5, "gamma in [1/5, 1/4), delta2 >= 1 - gamma", 0.22, MB, 0.12, 0.9, 1.0,
                        1.0, P2, c5pre + "gamma in [1/5, 1/4), delta2 >= 1 - gamma"));
  for (double d2 : {0.75, 0.9}) {
    for (double b : {1.0, -1.0}) {
      const std::string br = d2 < 5.0 / 6.0 ? "a" : "b";
      const std::string sg = b > 0 ? "b+" : "b-";
      v.push_back(path_case("C6." + br + "." + sg, Theorem::C6,
                            (d2 < 5.0 / 6.0 ? "delta2 < 5/6, " : "delta2 >= 5/6, ") + sg, s6, MB, t, d2, b, 1.0, P23,
                            cpre + "gamma = 1/6, delta1 = 1/3, delta2 > 2/3"));
    }
  }
  for (double d1 : {0.42, 0.6}) {
    for (double k : {1.0, -1.0}) {
      const std::string br = d1 < 0.5 ? "a" : "b";
      const std::string sg = k > 0 ? "k+" : "k-";
      v.push_back(path_case("C7." + br + "." + sg, Theorem::C7,
                            (d1 < 0.5 ? "delta1 < 1/2, " : "delta1 >= 1/2, ") + sg, s6, MB, d1, 2.0 * t, 1.0, k, P13,
                            cpre + "gamma = 1/6, delta2 = 2/3, delta1 > 1/3"));
    }
  }
  // b > 0 keeps the quartic coefficient positive; with k = -1 the sextic term
  // still dominates the well at n = 2^13 and -E[W psi(W)] comes out negative.
  for (double g : {0.185, 0.22}) {
    for (double k : {0.25, -0.25}) {
      const std::string br = g <= 0.2 ? "a" : "b";
      const std::string sg = k > 0 ? "k+" : "k-";
      const double d1 = 1.0 - 4.0 * g;
      v.push_back(path_case("C8." + br + "." + sg, Theorem::C8,
                            (g <= 0.2 ? "gamma in (1/6, 1/5], " : "gamma in [1/5, 1/4), ") + sg, g, MB, d1,
                            0.5 * (d1 + 1.0), 3.0, k, P12,
                            cpre + "4 gamma = 1 - delta1, 2 delta2 = delta1 + 1"));
    }
  }

  for (CaseSpec& c : v) {
    c.ladder = is_c_theorem(c.theorem) || c.theorem == Theorem::FixedC ? detail::ladder(6, 13) : detail::ladder(6, 12);
    c.predicted_exponent = predicted_rate(c);
  }
  return v;
}

inline const CaseSpec& find_case(const std::vector<CaseSpec>& catalog, std::string_view id) {
  for (const CaseSpec& c : catalog) {
    if (c.id == id) return c;
  }
  throw ValidationError("unknown case id: " + std::string(id));
}

// lambda = n^{-(1 + 2 gamma (j - 1) + speed_j)} for the highest active
// monomial j; psi keeps the Taylor drift terms selected by the pattern.
inline RegressionSpec regression_spec(const CaseSpec& c, const ModelParams& p, long n) {
  const DriftCoefficients a = drift_coefficients(p, n, c.gamma);
  const int top = c.pattern[2] ? 3 : (c.pattern[1] ? 2 : 1);
  double speed = 0.0;
  if (!c.fixed() && c.theorem != Theorem::SeqA) {
    if (top == 1) speed = c.delta2();
    if (top == 2 && c.schedule.mode == ScheduleMode::MovingBeta) speed = c.delta1();
  }
  RegressionSpec spec;
  spec.lambda = std::pow(static_cast<double>(n), -(1.0 + 2.0 * c.gamma * (top - 1) + speed));
  if (c.pattern[0]) spec.q1 = a.a1 / spec.lambda;
  if (c.pattern[1]) spec.q3 = a.a3 / spec.lambda;
  if (c.pattern[2]) spec.q5 = a.a5 / spec.lambda;
  return spec;
}

struct DensityCoefficients {
  double b1 = 0.0, b2 = 0.0, b3 = 0.0;
  double kappa = 0.0;  // -E[W psi(W)]
};

// b_j = q_{2j-1} / (2 j kappa), so that p'/p = psi / kappa. With a single
// active monomial this is b_j = 1 / (2 j E[W^{2j}]).
inline DensityCoefficients comparison_coefficients(const CaseSpec& c, const RegressionSpec& spec,
                                                   const MomentSet& m) {
  DensityCoefficients out;
  out.kappa = spec.q1 * m[2] + spec.q3 * m[4] + spec.q5 * m[6];
  const int active = c.pattern[0] + c.pattern[1] + c.pattern[2];
  if (active == 1) {
    if (c.pattern[0]) out.b1 = 1.0 / (2.0 * m[2]);
    if (c.pattern[1]) out.b2 = 1.0 / (4.0 * m[4]);
    if (c.pattern[2]) out.b3 = 1.0 / (6.0 * m[6]);
    return out;
  }
  if (!(out.kappa > 0.0)) throw ComputationError("case " + c.id + ": -E[W psi(W)] is not positive");
  out.b1 = spec.q1 / (2.0 * out.kappa);
  out.b2 = spec.q3 / (4.0 * out.kappa);
  out.b3 = spec.q5 / (6.0 * out.kappa);
  return out;
}

inline PolyDensity build_comparison_density(const CaseSpec& c, const RegressionSpec& spec, const MomentSet& m) {
  const DensityCoefficients b = comparison_coefficients(c, spec, m);
  return normalize_density(b.b1, b.b2, b.b3);
}

}  // namespace beg

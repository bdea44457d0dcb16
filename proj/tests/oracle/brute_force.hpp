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

// Test oracle: exhaustive enumeration of all 3^n configurations straight
// from the Hamiltonian H = sum w_i^2 - (K/n)(sum w_i)^2. Shares no code with
// the library beyond the plain parameter values.

#include <cmath>
#include <map>
#include <utility>
#include <vector>

namespace oracle {

struct ClassStats {
  double prob = 0.0;
  double step1 = 0.0;  // E[W - W' | class]
  double step2 = 0.0;  // E[(W - W')^2 | class]
};

struct BruteForce {
  int n = 0;
  std::map<std::pair<int, int>, ClassStats> classes;  // key (s, M)
  double log_partition = 0.0;                         // log of sum exp(-beta H) 3^{-n}
};

inline double hamiltonian(const std::vector<int>& w, double K) {
  double sq = 0.0, sum = 0.0;
  for (int x : w) {
    sq += x * x;
    sum += x;
  }
  return sq - K * sum * sum / static_cast<double>(w.size());
}

inline BruteForce enumerate(double beta, double K, int n, double gamma = 0.5) {
  BruteForce out;
  out.n = n;
  long total = 1;
  for (int i = 0; i < n; ++i) total *= 3;
  const double scale = std::pow(static_cast<double>(n), gamma - 1.0);
  std::vector<int> w(n);
  std::vector<double> weight(static_cast<std::size_t>(total));
  double z = 0.0;
  struct Acc {
    double p = 0.0, a1 = 0.0, a2 = 0.0;
  };
  std::map<std::pair<int, int>, Acc> acc;
  for (long c = 0; c < total; ++c) {
    long v = c;
    int s = 0, M = 0;
    for (int i = 0; i < n; ++i) {
      w[i] = static_cast<int>(v % 3) - 1;
      v /= 3;
      s += w[i];
      M += w[i] != 0;
    }
    const double wt = std::exp(-beta * hamiltonian(w, K));
    z += wt;
    // Resample a uniformly chosen site from its exact conditional law.
    double e1 = 0.0, e2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const int keep = w[i];
      double q[3], qs = 0.0;
      for (int t = -1; t <= 1; ++t) {
        w[i] = t;
        q[t + 1] = std::exp(-beta * hamiltonian(w, K));
        qs += q[t + 1];
      }
      w[i] = keep;
      for (int t = -1; t <= 1; ++t) {
        const double pr = q[t + 1] / qs;
        const double d = (keep - t) * scale;
        e1 += pr * d / n;
        e2 += pr * d * d / n;
      }
    }
    Acc& a = acc[{s, M}];
    a.p += wt;
    a.a1 += wt * e1;
    a.a2 += wt * e2;
  }
  for (auto& [key, a] : acc) {
    ClassStats cs;
    cs.prob = a.p / z;
    cs.step1 = a.a1 / a.p;
    cs.step2 = a.a2 / a.p;
    out.classes[key] = cs;
  }
  out.log_partition = std::log(z) - n * std::log(3.0);
  return out;
}

// Var(E[(W - W')^2 | W]) from the exhaustive table.
inline double variance_term(const BruteForce& bf) {
  std::map<int, std::pair<double, double>> by_s;  // s -> (p, p * step2)
  for (const auto& [key, cs] : bf.classes) {
    auto& e = by_s[key.first];
    e.first += cs.prob;
    e.second += cs.prob * cs.step2;
  }
  double m1 = 0.0, m2 = 0.0;
  for (const auto& [s, e] : by_s) {
    const double c = e.second / e.first;
    m1 += e.first * c;
    m2 += e.first * c * c;
  }
  return m2 - m1 * m1;
}

}  // namespace oracle

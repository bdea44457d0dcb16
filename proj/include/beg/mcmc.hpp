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

// Random-site heat-bath sampler. Each update redraws one spin from its exact
// conditional law given S^i, so the work per update is O(1) with the running
// (s, M) counts.
//
// Seeds: chain i of a run with master seed m is seeded with
// splitmix64(m + i * 0x9e3779b97f4a7c15); the engine is std::mt19937_64.
// Sites and uniforms are drawn from raw 64-bit outputs (multiply-high and the
// top 53 bits), so streams do not depend on the standard library's
// distribution implementations.

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <tuple>
#include <vector>

#include "beg/errors.hpp"
#include "beg/exact_law.hpp"
#include "beg/model.hpp"
#include "beg/numerics.hpp"
#include "beg/stein.hpp"

namespace beg {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master + index * 0x9e3779b97f4a7c15ULL);
}

struct ChainState {
  std::vector<int> spins;
  long s = 0;
  long M = 0;
  std::uint64_t rng_seed = 0;
  long sweep_count = 0;
};

struct ChainOptions {
  long sweeps = 100000;
  long burn_in = -1;  // negative: 10% of sweeps
  std::uint64_t seed = 1;
  double gamma = 0.5;
  bool record_pmf = false;
  long trace_every = 0;  // keep one trace row every this many sweeps; 0 = none
  static constexpr int kBatches = 32;
  static constexpr long kCheckEvery = 1024;
};

struct TraceRow {
  long sweep = 0;
  long s = 0;
  long M = 0;
  double w = 0.0;
};

struct ChainResult {
  ModelParams params;
  long n = 0;
  double gamma = 0.5;
  std::uint64_t seed = 0;
  long sweeps = 0;
  long burn_in = 0;
  std::array<double, 9> moment{};     // E[W^k] estimates, one measurement per sweep
  std::array<double, 9> moment_se{};  // batch-means standard errors
  double m_density = 0.0;             // E[M / n]
  double m_density_se = 0.0;
  std::vector<double> pmf;            // P(s), index s + n; empty unless requested
  std::vector<TraceRow> trace;
  long consistency_checks = 0;
};

namespace detail {

inline double unit_uniform(std::uint64_t r) { return static_cast<double>(r >> 11) * 0x1.0p-53; }

inline std::size_t pick_site(std::uint64_t r, std::size_t n) {
  return static_cast<std::size_t>((static_cast<unsigned __int128>(r) * n) >> 64);
}

struct BatchMeans {
  std::vector<double> sums;
  std::vector<long> counts;
  explicit BatchMeans(int batches) : sums(batches, 0.0), counts(batches, 0) {}

  void add(int b, double v) {
    sums[b] += v;
    ++counts[b];
  }
  // grand mean and its batch-means standard error
  std::pair<double, double> estimate() const {
    const int k = static_cast<int>(sums.size());
    double total = 0.0;
    long cnt = 0;
    for (int b = 0; b < k; ++b) {
      total += sums[b];
      cnt += counts[b];
    }
    const double mean = total / static_cast<double>(cnt);
    double ss = 0.0;
    for (int b = 0; b < k; ++b) {
      const double d = sums[b] / static_cast<double>(counts[b]) - mean;
      ss += d * d;
    }
    return {mean, std::sqrt(ss / (k - 1.0) / k)};
  }
};

}  // namespace detail

inline ChainResult run_chain(const ModelParams& params, long n, const ChainOptions& opt) {
  params.validate();
  require_gamma(opt.gamma);
  if (n < 1) throw ValidationError("n must be >= 1");
  const long burn = opt.burn_in < 0 ? opt.sweeps / 10 : opt.burn_in;
  if (!(opt.sweeps > burn)) throw ValidationError("sweeps must exceed burn-in");
  if (opt.sweeps - burn < ChainOptions::kBatches) {
    throw ValidationError("need at least 32 measured sweeps for batch means");
  }

  const SpinConditional cond(params, n);
  std::mt19937_64 rng(opt.seed);
  ChainState st;
  st.rng_seed = opt.seed;
  st.spins.resize(static_cast<std::size_t>(n));
  for (int& w : st.spins) {
    w = static_cast<int>(detail::pick_site(rng(), 3)) - 1;
    st.s += w;
    st.M += w != 0;
  }

  ChainResult res;
  res.params = params;
  res.n = n;
  res.gamma = opt.gamma;
  res.seed = opt.seed;
  res.sweeps = opt.sweeps;
  res.burn_in = burn;
  if (opt.record_pmf) res.pmf.assign(2 * static_cast<std::size_t>(n) + 1, 0.0);

  const double scale = w_scale(n, opt.gamma);
  const long measured = opt.sweeps - burn;
  std::vector<detail::BatchMeans> mom(9, detail::BatchMeans(ChainOptions::kBatches));
  detail::BatchMeans dens(ChainOptions::kBatches);
  const auto ns = static_cast<std::size_t>(n);

  for (long sweep = 0; sweep < opt.sweeps; ++sweep) {
    for (long u = 0; u < n; ++u) {
      const std::size_t i = detail::pick_site(rng(), ns);
      const int old = st.spins[i];
      const long S = st.s - old;
      const double x = detail::unit_uniform(rng());
      const double pm = cond.minus(S);
      const int t = x < pm ? -1 : (x < pm + cond.zero(S) ? 0 : 1);
      st.spins[i] = t;
      st.s += t - old;
      st.M += (t != 0) - (old != 0);
    }
    ++st.sweep_count;
    if (st.sweep_count % ChainOptions::kCheckEvery == 0) {
      long s = 0, M = 0;
      for (int w : st.spins) {
        s += w;
        M += w != 0;
      }
      if (s != st.s || M != st.M) throw ComputationError("running (s, M) drifted from the configuration");
      ++res.consistency_checks;
    }
    if (opt.trace_every > 0 && sweep % opt.trace_every == 0) {
      res.trace.push_back({sweep, st.s, st.M, static_cast<double>(st.s) * scale});
    }
    if (sweep < burn) continue;
    const auto b = static_cast<int>((sweep - burn) * ChainOptions::kBatches / measured);
    const double w = static_cast<double>(st.s) * scale;
    double p = 1.0;
    for (int k = 1; k <= 8; ++k) {
      p *= w;
      mom[static_cast<std::size_t>(k)].add(b, p);
    }
    dens.add(b, static_cast<double>(st.M) / static_cast<double>(n));
    if (opt.record_pmf) res.pmf[static_cast<std::size_t>(st.s + n)] += 1.0;
  }

  res.moment[0] = 1.0;
  for (int k = 1; k <= 8; ++k) {
    const auto [m, se] = mom[static_cast<std::size_t>(k)].estimate();
    res.moment[static_cast<std::size_t>(k)] = m;
    res.moment_se[static_cast<std::size_t>(k)] = se;
  }
  std::tie(res.m_density, res.m_density_se) = dens.estimate();
  for (double& v : res.pmf) v /= static_cast<double>(measured);
  return res;
}

// Independent chains with seeds derived from one master seed; results are
// returned in chain-index order regardless of scheduling.
inline std::vector<ChainResult> run_chains(const ModelParams& params, long n, const ChainOptions& opt, int chains,
                                           unsigned threads = 1) {
  if (chains < 1) throw ValidationError("need at least one chain");
  std::vector<ChainResult> out(static_cast<std::size_t>(chains));
  numerics::parallel_for(out.size(), threads, [&](std::size_t i) {
    ChainOptions o = opt;
    o.seed = derive_seed(opt.seed, i);
    out[i] = run_chain(params, n, o);
  });
  return out;
}

}  // namespace beg

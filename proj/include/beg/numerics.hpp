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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <limits>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace beg::numerics {

// Neumaier compensated summation.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) noexcept {
    add(x);
    return *this;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Running log-sum-exp accumulator; merging two accumulators is exact up to
// rounding, which lets independent slices be reduced in any fixed order.
class LogSumExp {
 public:
  void add(double log_x) noexcept {
    if (log_x == -std::numeric_limits<double>::infinity()) return;
    if (log_x <= max_) {
      sum_ += std::exp(log_x - max_);
    } else {
      sum_ = sum_ * std::exp(max_ - log_x) + 1.0;
      max_ = log_x;
    }
  }
  void merge(const LogSumExp& other) noexcept {
    if (other.sum_ == 0.0) return;
    if (other.max_ <= max_) {
      sum_ += other.sum_ * std::exp(other.max_ - max_);
    } else {
      sum_ = sum_ * std::exp(max_ - other.max_) + other.sum_;
      max_ = other.max_;
    }
  }
  double value() const noexcept {
    if (sum_ == 0.0) return -std::numeric_limits<double>::infinity();
    return max_ + std::log(sum_);
  }

 private:
  double max_ = -std::numeric_limits<double>::infinity();
  double sum_ = 0.0;
};

inline double log_sum_exp(std::span<const double> xs) noexcept {
  LogSumExp acc;
  for (double x : xs) acc.add(x);
  return acc.value();
}

inline double normal_cdf(double x) noexcept {
  return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

// Adaptive bisection driven by the 31-point Gauss-Kronrod / 15-point Gauss
// pair. The tolerance is relative to the magnitude of the whole integral, so
// regions where the integrand underflows do not trigger refinement.
template <class F>
double integrate(F&& f, double a, double b, double tol = 1e-12, unsigned max_depth = 15,
                 double abs_floor = 1e-300) {
  if (a == b) return 0.0;
  using Kronrod = boost::math::quadrature::gauss_kronrod<double, 31>;
  using Gauss = boost::math::quadrature::gauss<double, 15>;
  auto rule = [&](double lo, double hi, double& err) {
    const double k = Kronrod::integrate(f, lo, hi, 0, 0.0);
    err = std::abs(k - Gauss::integrate(f, lo, hi));
    return k;
  };
  double err = 0.0;
  const double whole = rule(a, b, err);
  const double abs_tol = std::max(tol * std::abs(whole), abs_floor);
  auto refine = [&](auto&& self, double lo, double hi, double est, double e, unsigned depth) -> double {
    if (depth == 0 || e <= abs_tol * (hi - lo) / (b - a)) return est;
    const double mid = 0.5 * (lo + hi);
    double el = 0.0, er = 0.0;
    const double l = rule(lo, mid, el);
    const double r = rule(mid, hi, er);
    return self(self, lo, mid, l, el, depth - 1) + self(self, mid, hi, r, er, depth - 1);
  };
  return refine(refine, a, b, whole, err, max_depth);
}

// Fixed 20-point Gauss-Legendre; for short panels of smooth integrands.
template <class F>
double integrate_panel(F&& f, double a, double b) {
  if (a == b) return 0.0;
  return boost::math::quadrature::gauss<double, 20>::integrate(std::forward<F>(f), a, b);
}

// Bisection on a sign change of f over [lo, hi]. Returns the midpoint of the
// final bracket; exact zeros short-circuit.
template <class F>
double bisect(F&& f, double lo, double hi, int iterations = 200) {
  double flo = f(lo);
  if (flo == 0.0) return lo;
  for (int it = 0; it < iterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

inline unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

// Runs body(i) for i in [0, count) on up to `threads` workers. Work items are
// claimed dynamically; results must be written to per-index slots by the
// caller so the outcome does not depend on scheduling. The first exception
// thrown by any worker is rethrown on the calling thread.
template <class Body>
void parallel_for(std::size_t count, unsigned threads, Body&& body) {
  threads = std::min<unsigned>(resolve_threads(threads), static_cast<unsigned>(std::max<std::size_t>(count, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace beg::numerics

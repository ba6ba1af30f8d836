// Copyright 2026 The edubo Authors
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

#ifndef EDUBO_DUAL_HPP
#define EDUBO_DUAL_HPP

#include "edubo/core.hpp"

#include <array>
#include <cmath>

namespace edubo {

/// Forward-mode dual number carrying N partial derivatives.
template <int N>
struct Dual {
  double v = 0.0;
  std::array<double, N> d{};

  Dual() = default;
  Dual(double value) : v(value) {}  // NOLINT: implicit lift of constants
  static Dual variable(double value, int index) {
    Dual x(value);
    x.d[static_cast<std::size_t>(index)] = 1.0;
    return x;
  }

  friend Dual operator+(const Dual& a, const Dual& b) {
    Dual r(a.v + b.v);
    for (int i = 0; i < N; ++i) r.d[i] = a.d[i] + b.d[i];
    return r;
  }
  friend Dual operator-(const Dual& a, const Dual& b) {
    Dual r(a.v - b.v);
    for (int i = 0; i < N; ++i) r.d[i] = a.d[i] - b.d[i];
    return r;
  }
  friend Dual operator-(const Dual& a) {
    Dual r(-a.v);
    for (int i = 0; i < N; ++i) r.d[i] = -a.d[i];
    return r;
  }
  friend Dual operator*(const Dual& a, const Dual& b) {
    Dual r(a.v * b.v);
    for (int i = 0; i < N; ++i) r.d[i] = a.d[i] * b.v + a.v * b.d[i];
    return r;
  }
  friend Dual operator/(const Dual& a, const Dual& b) {
    Dual r(a.v / b.v);
    for (int i = 0; i < N; ++i) r.d[i] = (a.d[i] * b.v - a.v * b.d[i]) / (b.v * b.v);
    return r;
  }
  friend bool operator<(const Dual& a, const Dual& b) { return a.v < b.v; }
};

inline double value_of(double x) { return x; }
template <int N>
double value_of(const Dual<N>& x) {
  return x.v;
}

inline double pdf(double z) { return norm_pdf(z); }
inline double cdf(double z) { return norm_cdf(z); }

template <int N>
Dual<N> pdf(const Dual<N>& z) {
  const double p = norm_pdf(z.v);
  Dual<N> r(p);
  for (int i = 0; i < N; ++i) r.d[i] = -z.v * p * z.d[i];
  return r;
}

template <int N>
Dual<N> cdf(const Dual<N>& z) {
  const double p = norm_pdf(z.v);
  Dual<N> r(norm_cdf(z.v));
  for (int i = 0; i < N; ++i) r.d[i] = p * z.d[i];
  return r;
}

}  // namespace edubo

#endif  // EDUBO_DUAL_HPP

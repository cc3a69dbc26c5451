#pragma once

// Second-order forward-mode differentiation over a fixed number of local
// variables. Every term of the resistance functional depends on at most
// three points, so N <= 9 throughout the library.

#include <array>
#include <cmath>

namespace newton {

template <int N>
struct Jet {
  double v = 0.0;
  std::array<double, N> g{};
  std::array<double, N * N> h{};

  Jet() = default;
  Jet(double value) : v(value) {}  // NOLINT: implicit constants are convenient

  static Jet variable(double value, int index) {
    Jet j(value);
    j.g[index] = 1.0;
    return j;
  }

  double hess(int a, int b) const { return h[a * N + b]; }

  Jet& operator+=(const Jet& o) {
    v += o.v;
    for (int i = 0; i < N; ++i) g[i] += o.g[i];
    for (int i = 0; i < N * N; ++i) h[i] += o.h[i];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    v -= o.v;
    for (int i = 0; i < N; ++i) g[i] -= o.g[i];
    for (int i = 0; i < N * N; ++i) h[i] -= o.h[i];
    return *this;
  }
  Jet& operator*=(double s) {
    v *= s;
    for (auto& x : g) x *= s;
    for (auto& x : h) x *= s;
    return *this;
  }
};

template <int N>
Jet<N> operator+(Jet<N> a, const Jet<N>& b) { return a += b; }
template <int N>
Jet<N> operator-(Jet<N> a, const Jet<N>& b) { return a -= b; }
template <int N>
Jet<N> operator-(Jet<N> a) { return a *= -1.0; }
template <int N>
Jet<N> operator+(Jet<N> a, double s) { a.v += s; return a; }
template <int N>
Jet<N> operator+(double s, Jet<N> a) { a.v += s; return a; }
template <int N>
Jet<N> operator-(Jet<N> a, double s) { a.v -= s; return a; }
template <int N>
Jet<N> operator-(double s, const Jet<N>& a) { Jet<N> r = -a; r.v += s; return r; }
template <int N>
Jet<N> operator*(Jet<N> a, double s) { return a *= s; }
template <int N>
Jet<N> operator*(double s, Jet<N> a) { return a *= s; }

template <int N>
Jet<N> operator*(const Jet<N>& a, const Jet<N>& b) {
  Jet<N> r(a.v * b.v);
  for (int i = 0; i < N; ++i) r.g[i] = a.g[i] * b.v + a.v * b.g[i];
  for (int i = 0; i < N; ++i)
    for (int k = 0; k < N; ++k)
      r.h[i * N + k] = a.h[i * N + k] * b.v + a.v * b.h[i * N + k] +
                       a.g[i] * b.g[k] + b.g[i] * a.g[k];
  return r;
}

// r = f(a) given f, f', f'' at a.v
template <int N>
Jet<N> chain(const Jet<N>& a, double f0, double f1, double f2) {
  Jet<N> r(f0);
  for (int i = 0; i < N; ++i) r.g[i] = f1 * a.g[i];
  for (int i = 0; i < N; ++i)
    for (int k = 0; k < N; ++k)
      r.h[i * N + k] = f1 * a.h[i * N + k] + f2 * a.g[i] * a.g[k];
  return r;
}

// r = f(a, b) given the value, gradient and Hessian of f at (a.v, b.v)
template <int N>
Jet<N> chain2(const Jet<N>& a, const Jet<N>& b, double f0, double fa, double fb,
              double faa, double fab, double fbb) {
  Jet<N> r(f0);
  for (int i = 0; i < N; ++i) r.g[i] = fa * a.g[i] + fb * b.g[i];
  for (int i = 0; i < N; ++i)
    for (int k = 0; k < N; ++k)
      r.h[i * N + k] = fa * a.h[i * N + k] + fb * b.h[i * N + k] +
                       faa * a.g[i] * a.g[k] +
                       fab * (a.g[i] * b.g[k] + b.g[i] * a.g[k]) +
                       fbb * b.g[i] * b.g[k];
  return r;
}

template <int N>
Jet<N> inverse(const Jet<N>& a) {
  const double iv = 1.0 / a.v;
  return chain(a, iv, -iv * iv, 2.0 * iv * iv * iv);
}

template <int N>
Jet<N> operator/(const Jet<N>& a, const Jet<N>& b) { return a * inverse(b); }
template <int N>
Jet<N> operator/(Jet<N> a, double s) { return a *= (1.0 / s); }
template <int N>
Jet<N> operator/(double s, const Jet<N>& a) { return inverse(a) * s; }

template <int N>
Jet<N> sqrt(const Jet<N>& a) {
  const double s = std::sqrt(a.v);
  return chain(a, s, 0.5 / s, -0.25 / (s * a.v));
}

template <int N>
Jet<N> sin(const Jet<N>& a) {
  const double s = std::sin(a.v), c = std::cos(a.v);
  return chain(a, s, c, -s);
}

template <int N>
Jet<N> cos(const Jet<N>& a) {
  const double s = std::sin(a.v), c = std::cos(a.v);
  return chain(a, c, -s, -c);
}

template <int N>
Jet<N> acos(const Jet<N>& a) {
  const double x = a.v;
  const double w = 1.0 - x * x;
  const double rs = 1.0 / std::sqrt(w);
  return chain(a, std::acos(x), -rs, -x * rs / w);
}

template <int N>
Jet<N> atan2(const Jet<N>& y, const Jet<N>& x) {
  const double r2 = x.v * x.v + y.v * y.v;
  const double r4 = r2 * r2;
  // f = atan2(y, x): f_y = x/r2, f_x = -y/r2
  return chain2(y, x, std::atan2(y.v, x.v), x.v / r2, -y.v / r2,
                -2.0 * x.v * y.v / r4, (y.v * y.v - x.v * x.v) / r4,
                2.0 * x.v * y.v / r4);
}

inline double value_of(double x) { return x; }
template <int N>
double value_of(const Jet<N>& x) { return x.v; }

}  // namespace newton

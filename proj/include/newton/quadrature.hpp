#pragma once

#include <array>
#include <cmath>
#include <vector>

namespace newton::quad {

/// 15-point Kronrod nodes on [-1, 1] (non-negative half) and weights, with
/// the embedded 7-point Gauss weights.
inline constexpr std::array<double, 8> kKronrodNodes{
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights{
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights{
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b;
};

/// Kronrod and embedded Gauss estimates of the integral of f over [a, b].
/// V must support V + V, V - V and double * V.
template <class V, class F>
std::pair<V, V> gauss_kronrod(const F& f, double a, double b) {
  const double c = 0.5 * (a + b), hw = 0.5 * (b - a);
  const V fc = f(c);
  V kron = kKronrodWeights[7] * fc;
  V gauss = kGaussWeights[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double dx = hw * kKronrodNodes[i];
    const V f1 = f(c - dx), f2 = f(c + dx);
    kron = kron + kKronrodWeights[i] * (f1 + f2);
    if (i % 2 == 1) gauss = gauss + kGaussWeights[i / 2] * (f1 + f2);
  }
  return {hw * kron, hw * gauss};
}

struct AdaptiveResult {
  double value = 0.0;
  double error = 0.0;
  std::vector<Panel> panels;
};

/// Adaptive Gauss–Kronrod by recursive bisection until each panel's
/// |K15 - G7| estimate is below its share of `tol` (absolute).
template <class F>
AdaptiveResult integrate(const F& f, double a, double b, double tol, int max_depth = 40) {
  AdaptiveResult out;
  if (!(b > a)) return out;
  const double total = b - a;
  struct Item {
    Panel p;
    int depth;
  };
  std::vector<Item> work;
  const int initial = std::max(1, static_cast<int>(std::ceil(total / 0.5)));
  for (int i = initial - 1; i >= 0; --i) {
    const double lo = a + total * i / initial;
    const double hi = (i + 1 == initial) ? b : a + total * (i + 1) / initial;
    work.push_back({{lo, hi}, 0});
  }
  while (!work.empty()) {
    const Item it = work.back();
    work.pop_back();
    const auto [k, g] = gauss_kronrod<double>(f, it.p.a, it.p.b);
    const double err = std::fabs(k - g);
    const double share = tol * (it.p.b - it.p.a) / total;
    if (err <= share || it.depth >= max_depth) {
      out.value += k;
      out.error += err;
      out.panels.push_back(it.p);
    } else {
      const double mid = 0.5 * (it.p.a + it.p.b);
      work.push_back({{mid, it.p.b}, it.depth + 1});
      work.push_back({{it.p.a, mid}, it.depth + 1});
    }
  }
  return out;
}

/// Kronrod sum of a vector-valued integrand over a fixed panel partition.
template <class V, class F>
V integrate_on(const F& f, const std::vector<Panel>& panels) {
  V acc{};
  for (const Panel& p : panels) acc = acc + gauss_kronrod<V>(f, p.a, p.b).first;
  return acc;
}

}  // namespace newton::quad

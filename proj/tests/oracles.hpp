#pragma once

// Independent reference computations used by unit and acceptance tests.
// None of these call into the separation or calibration code.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include "geosep/core.hpp"

namespace oracle {

using Vec = std::vector<double>;

inline double norm(std::span<const double> v, geosep::MetricKind m) {
  double acc = 0.0;
  for (double x : v) {
    if (m == geosep::MetricKind::L1) acc += std::abs(x);
    else if (m == geosep::MetricKind::Linf) acc = std::max(acc, std::abs(x));
    else acc += x * x;
  }
  return m == geosep::MetricKind::L2 ? std::sqrt(acc) : acc;
}

inline double dist(std::span<const double> a, std::span<const double> b, geosep::MetricKind m) {
  Vec d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return norm(d, m);
}

inline Vec row(const geosep::Dataset& ds, std::size_t r) {
  const auto s = ds.row(r);
  return Vec(s.begin(), s.end());
}

// Signed distance from x to the perpendicular bisector of (near, far),
// positive on near's side: project x - midpoint onto the unit normal.
inline double bisector_projection(std::span<const double> x, std::span<const double> near,
                                  std::span<const double> far) {
  const std::size_t d = x.size();
  Vec n(d), mid(d);
  double len = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    n[i] = far[i] - near[i];
    mid[i] = 0.5 * (near[i] + far[i]);
    len += n[i] * n[i];
  }
  len = std::sqrt(len);
  double s = 0.0;
  for (std::size_t i = 0; i < d; ++i) s += (mid[i] - x[i]) * n[i] / len;
  return s;
}

// Nearest-set distances of y to the rows with label == lbl and label != lbl.
struct SetDists {
  double same;
  double other;
};

inline SetDists set_dists(std::span<const double> y, const geosep::Dataset& ds, geosep::Label lbl,
                          geosep::MetricKind m) {
  SetDists s{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  for (std::size_t r = 0; r < ds.rows(); ++r) {
    const auto rr = ds.row(r);
    double acc = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double v = std::abs(y[i] - static_cast<double>(rr[i]));
      if (m == geosep::MetricKind::Linf) acc = std::max(acc, v);
      else acc += m == geosep::MetricKind::L1 ? v : v * v;
    }
    const double dd = m == geosep::MetricKind::L2 ? std::sqrt(acc) : acc;
    if (ds.label(r) == lbl) s.same = std::min(s.same, dd);
    else s.other = std::min(s.other, dd);
  }
  return s;
}

// Random point at metric distance radius * s from x, s in (0,1]; half the
// probes sit on the sphere (s = 1) where violations would show first.
inline Vec probe(std::mt19937_64& gen, std::span<const double> x, double radius, geosep::MetricKind m, bool on_sphere) {
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vec dir(x.size());
  for (auto& v : dir) v = m == geosep::MetricKind::L2 ? nd(gen) : (u(gen) * 2.0 - 1.0);
  if (m == geosep::MetricKind::Linf) {
    // Push one coordinate onto the face so surface points cover the cube faces.
    std::uniform_int_distribution<std::size_t> pick(0, x.size() - 1);
    dir[pick(gen)] = u(gen) < 0.5 ? -1.0 : 1.0;
  }
  const double n = norm(dir, m);
  const double s = on_sphere ? 1.0 : std::pow(u(gen), 1.0 / static_cast<double>(x.size()));
  Vec y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + dir[i] / n * radius * s;
  return y;
}

// ----- 2-D geometry -------------------------------------------------------

using P2 = std::array<double, 2>;

// Clips a convex polygon to {y : a . y <= b}.
inline std::vector<P2> clip(const std::vector<P2>& poly, const P2& a, double b) {
  std::vector<P2> out;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const P2& p = poly[i];
    const P2& q = poly[(i + 1) % n];
    const double fp = a[0] * p[0] + a[1] * p[1] - b;
    const double fq = a[0] * q[0] + a[1] * q[1] - b;
    if (fp <= 0) out.push_back(p);
    if ((fp < 0 && fq > 0) || (fp > 0 && fq < 0)) {
      const double t = fp / (fp - fq);
      out.push_back({p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])});
    }
  }
  return out;
}

inline double point_segment(const P2& x, const P2& a, const P2& b) {
  const double vx = b[0] - a[0], vy = b[1] - a[1];
  const double len2 = vx * vx + vy * vy;
  double t = len2 > 0 ? ((x[0] - a[0]) * vx + (x[1] - a[1]) * vy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(x[0] - (a[0] + t * vx), x[1] - (a[1] + t * vy));
}

// Distance from x to a convex polygon (0 when inside).
inline double point_polygon(const P2& x, const std::vector<P2>& poly) {
  if (poly.empty()) return std::numeric_limits<double>::infinity();
  bool inside = poly.size() >= 3;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const P2& a = poly[i];
    const P2& b = poly[(i + 1) % poly.size()];
    const double cross = (b[0] - a[0]) * (x[1] - a[1]) - (b[1] - a[1]) * (x[0] - a[0]);
    if (cross < 0) inside = false;
    best = std::min(best, point_segment(x, a, b));
  }
  return inside ? 0.0 : best;
}

// Maximal L2 zone radius in 2-D by explicit Voronoi-cell polygons: the
// distance from x to the nearest cell, among the `outer` rows, of the
// diagram restricted to `inner` plus that outer row.
inline double polygon_zone_2d(const P2& x, const std::vector<P2>& inner, const std::vector<P2>& outer) {
  const double big = 1e4;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& f : outer) {
    std::vector<P2> cell = {{-big, -big}, {big, -big}, {big, big}, {-big, big}};
    for (const auto& s : inner) {
      // d(y,f) <= d(y,s)  <=>  2 (s - f) . y <= |s|^2 - |f|^2
      const P2 a{2 * (s[0] - f[0]), 2 * (s[1] - f[1])};
      const double b = s[0] * s[0] + s[1] * s[1] - f[0] * f[0] - f[1] * f[1];
      if (a[0] == 0 && a[1] == 0) continue;
      cell = clip(cell, a, b);
      if (cell.empty()) break;
    }
    best = std::min(best, point_polygon(x, cell));
  }
  return best;
}

// Signed maximal zone in 2-D by ray marching: along each direction find the
// first point where the nearest-set ordering of x flips. g(y) = D(y,A) - D(y,B)
// is 2-Lipschitz, so a step of |g|/2 never jumps over a crossing. The minimum
// over directions is refined by golden-section search in angle.
class RayMarcher {
 public:
  RayMarcher(const geosep::Dataset& ds, geosep::Label lbl) : ds_(ds), lbl_(lbl) {}

  // Distance along direction theta to the first y where safe-ness of x is lost.
  double crossing(const P2& x, double theta, bool safe, double limit) const {
    const P2 u{std::cos(theta), std::sin(theta)};
    auto g = [&](double t) {
      const Vec y{x[0] + t * u[0], x[1] + t * u[1]};
      const auto s = set_dists(y, ds_, lbl_, geosep::MetricKind::L2);
      // Positive while the ordering of x is preserved.
      return safe ? s.other - s.same : s.same - s.other;
    };
    double t = 0.0;
    for (int it = 0; it < 1000000 && t < limit; ++it) {
      const double step = g(t) / 2.0;
      if (step < 1e-7) break;
      t += step;
    }
    if (t >= limit) return limit;
    // Bracket the crossing with growing steps, then bisect.
    double lo = t, width = 1e-9, hi = lo + width;
    while (g(hi) > 0.0 && hi < limit) {
      lo = hi;
      width *= 2.0;
      hi = lo + width;
    }
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (lo + hi);
      (g(mid) > 0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }

  // Unsigned maximal zone radius for x (assumed not tied).
  double radius(const P2& x, bool safe, std::size_t n_angles = 20000) const {
    const auto d0 = set_dists(Vec{x[0], x[1]}, ds_, lbl_, geosep::MetricKind::L2);
    const double limit = 4.0 * std::max(d0.same, d0.other) + 1.0;
    double best = std::numeric_limits<double>::infinity();
    double best_theta = 0.0;
    const double step = 2.0 * std::numbers::pi / static_cast<double>(n_angles);
    for (std::size_t k = 0; k < n_angles; ++k) {
      const double th = step * static_cast<double>(k);
      const double c = crossing(x, th, safe, limit);
      if (c < best) {
        best = c;
        best_theta = th;
      }
    }
    // Golden-section refinement around the best coarse angle.
    double a = best_theta - step, b = best_theta + step;
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int it = 0; it < 60; ++it) {
      const double c1 = b - phi * (b - a), c2 = a + phi * (b - a);
      const double f1 = crossing(x, c1, safe, limit), f2 = crossing(x, c2, safe, limit);
      best = std::min(best, std::min(f1, f2));
      if (f1 < f2) b = c2;
      else a = c1;
    }
    return best;
  }

 private:
  const geosep::Dataset& ds_;
  geosep::Label lbl_;
};

// ----- isotonic regression -------------------------------------------------

// Best weighted least-squares non-decreasing fit by enumerating every split of
// the sequence into contiguous blocks (2^(n-1) partitions); each block takes
// its weighted mean and the partition must have non-decreasing block means.
inline std::vector<double> brute_isotonic(const std::vector<double>& y, const std::vector<double>& w) {
  const std::size_t n = y.size();
  std::vector<double> best_fit;
  double best_cost = std::numeric_limits<double>::infinity();
  for (std::size_t mask = 0; mask < (std::size_t{1} << (n - 1)); ++mask) {
    std::vector<double> fit(n);
    std::size_t start = 0;
    double prev = -std::numeric_limits<double>::infinity();
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      const bool cut = i == n - 1 || (mask & (std::size_t{1} << i));
      if (!cut) continue;
      double sw = 0, sy = 0;
      for (std::size_t k = start; k <= i; ++k) {
        sw += w[k];
        sy += w[k] * y[k];
      }
      const double mean = sy / sw;
      if (mean < prev - 1e-15) ok = false;
      prev = mean;
      for (std::size_t k = start; k <= i; ++k) fit[k] = mean;
      start = i + 1;
    }
    if (!ok) continue;
    double cost = 0;
    for (std::size_t k = 0; k < n; ++k) cost += w[k] * (y[k] - fit[k]) * (y[k] - fit[k]);
    if (cost < best_cost) {
      best_cost = cost;
      best_fit = fit;
    }
  }
  return best_fit;
}

}  // namespace oracle

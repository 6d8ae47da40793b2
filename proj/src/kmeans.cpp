#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "geosep/error.hpp"
#include "geosep/reduction.hpp"
#include "geosep/rng.hpp"

namespace geosep {
namespace {

double sq_dist(const double* a, const double* b, std::size_t d) {
  double s = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    const double t = a[j] - b[j];
    s += t * t;
  }
  return s;
}

std::vector<double> seed_plus_plus(std::span<const double> pts, std::size_t n, std::size_t d, std::size_t k,
                                   Rng& rng) {
  std::vector<double> centroids;
  centroids.reserve(k * d);
  std::vector<bool> chosen(n, false);
  auto take = [&](std::size_t i) {
    chosen[i] = true;
    centroids.insert(centroids.end(), pts.begin() + static_cast<std::ptrdiff_t>(i * d),
                     pts.begin() + static_cast<std::ptrdiff_t>((i + 1) * d));
  };
  take(rng.below(n));
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  while (centroids.size() < k * d) {
    const double* last = centroids.data() + centroids.size() - d;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      best[i] = std::min(best[i], sq_dist(&pts[i * d], last, d));
      total += best[i];
    }
    std::size_t pick = n;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (best[i] <= 0.0) continue;
        acc += best[i];
        pick = i;
        if (acc > target) break;
      }
    }
    if (pick == n) {
      // Every remaining point coincides with a centroid.
      pick = static_cast<std::size_t>(std::find(chosen.begin(), chosen.end(), false) - chosen.begin());
    }
    take(pick);
  }
  return centroids;
}

}  // namespace

KMeansResult kmeans(std::span<const double> points, std::size_t n, std::size_t d, std::size_t k, std::uint64_t seed,
                    KMeansOptions opts) {
  if (points.size() != n * d) throw Error(ErrorCode::DimensionError, "point buffer does not match n x d");
  if (k < 1 || k > n) {
    throw Error(ErrorCode::ParameterError, "k-means needs 1 <= k <= n, got k=" + std::to_string(k) +
                                               ", n=" + std::to_string(n));
  }
  Rng rng(seed);
  KMeansResult res;
  res.centroids = seed_plus_plus(points, n, d, k, rng);
  res.assignment.assign(n, 0);
  double previous = std::numeric_limits<double>::infinity();
  std::vector<double> sums(k * d);
  std::vector<std::size_t> counts(k);
  for (int iter = 1; iter <= opts.max_iterations; ++iter) {
    res.iterations = iter;
    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t arg = 0;
      double bestd = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        const double dist = sq_dist(&points[i * d], &res.centroids[c * d], d);
        if (dist < bestd) {
          bestd = dist;
          arg = c;
        }
      }
      res.assignment[i] = arg;
      inertia += bestd;
    }
    res.inertia = inertia;
    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t c = res.assignment[i];
      ++counts[c];
      for (std::size_t j = 0; j < d; ++j) sums[c * d + j] += points[i * d + j];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;  // empty cluster keeps its centroid
      for (std::size_t j = 0; j < d; ++j) res.centroids[c * d + j] = sums[c * d + j] / static_cast<double>(counts[c]);
    }
    const bool settled = std::isfinite(previous) && previous - inertia <= opts.relative_tolerance * previous;
    previous = inertia;
    if (settled) break;
  }
  return res;
}

ReducedSpace kmeans_reduce(const Dataset& train, std::size_t t, std::uint64_t seed, KMeansOptions opts) {
  if (t < 1) throw Error(ErrorCode::ParameterError, "reduction parameter t must be >= 1");
  if (train.rows() == 0) throw Error(ErrorCode::EmptyInput, "k-means reduction needs training rows");
  const std::size_t t2 = t * t;
  if (train.rows() / t2 < 1) {
    throw Error(ErrorCode::ReductionTooAggressive,
                "t^2 = " + std::to_string(t2) + " exceeds the row count " + std::to_string(train.rows()));
  }
  std::map<Label, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < train.rows(); ++i) by_class[train.label(i)].push_back(i);

  const std::size_t d = train.cols();
  Rng seeds(seed);
  std::vector<float> feats;
  std::vector<Label> labels;
  for (const auto& [label, rows] : by_class) {
    const std::size_t k = std::max<std::size_t>(1, rows.size() / t2);
    std::vector<double> pts;
    pts.reserve(rows.size() * d);
    for (auto r : rows) {
      const auto row = train.row(r);
      pts.insert(pts.end(), row.begin(), row.end());
    }
    const auto res = kmeans(pts, rows.size(), d, k, seeds.next(), opts);
    for (double v : res.centroids) feats.push_back(static_cast<float>(v));
    labels.insert(labels.end(), k, label);
  }
  ReducedSpace space;
  space.config = {ReductionMethod::KMeans, t, seed};
  space.input_dim = d;
  space.input_shape = train.shape();
  space.reduced_set = Dataset(d, std::move(feats), std::move(labels), train.shape());
  return space;
}

}  // namespace geosep

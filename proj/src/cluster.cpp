#include "dynsel/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dynsel/kernels.hpp"
#include "dynsel/rng.hpp"

namespace dynsel {

std::vector<std::vector<int>> DiversityClasses::members() const {
  std::vector<std::vector<int>> m(static_cast<std::size_t>(C));
  for (const auto& [id, cls] : assignment) m[static_cast<std::size_t>(cls)].push_back(id);
  return m;
}

namespace {

double point_dist2(const std::vector<double>& a, const std::vector<double>& b) {
  return kernels::active().sqdist(a.data(), b.data(), a.size());
}

}  // namespace

DiversityClasses kmeans(const ClusterPoints& points, int C, std::uint64_t seed,
                        int max_iters, double tol,
                        std::vector<double>* objective_trace) {
  const int n = static_cast<int>(points.size());
  if (C < 1) throw std::invalid_argument("kmeans: C must be >= 1");
  if (C > n) throw std::invalid_argument("kmeans: C exceeds the number of points");
  if (max_iters < 1) throw std::invalid_argument("kmeans: max_iters must be >= 1");
  if (tol < 0.0) throw std::invalid_argument("kmeans: tol must be >= 0");
  const std::size_t dim = points[0].second.size();
  if (dim == 0) throw std::invalid_argument("kmeans: zero-length vectors");
  for (const auto& [id, v] : points) {
    (void)id;
    if (v.size() != dim) throw std::invalid_argument("kmeans: inconsistent vector lengths");
  }

  // k-means++ seeding: next center drawn proportional to squared distance
  // from the nearest already-chosen center.
  Rng rng(mix_seed(seed, 11));
  std::vector<std::vector<double>> centroids;
  centroids.reserve(static_cast<std::size_t>(C));
  centroids.push_back(points[rng.uniform_int(static_cast<std::uint64_t>(n))].second);
  std::vector<double> d2(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    d2[static_cast<std::size_t>(i)] = point_dist2(points[static_cast<std::size_t>(i)].second, centroids[0]);
  while (static_cast<int>(centroids.size()) < C) {
    double total = 0.0;
    for (double d : d2) total += d;
    int pick;
    if (total > 0.0) {
      const double u = rng.uniform() * total;
      double run = 0.0;
      pick = n - 1;
      for (int i = 0; i < n; ++i) {
        run += d2[static_cast<std::size_t>(i)];
        if (u < run) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n)));
    }
    centroids.push_back(points[static_cast<std::size_t>(pick)].second);
    for (int i = 0; i < n; ++i) {
      const double d = point_dist2(points[static_cast<std::size_t>(i)].second, centroids.back());
      if (d < d2[static_cast<std::size_t>(i)]) d2[static_cast<std::size_t>(i)] = d;
    }
  }

  std::vector<int> assign(static_cast<std::size_t>(n), 0);
  std::vector<double> dist_assigned(static_cast<std::size_t>(n), 0.0);
  std::vector<int> count(static_cast<std::size_t>(C), 0);

  // Assignment to the nearest centroid (ties to the lowest class index),
  // then repair: every empty class takes the farthest point of the largest.
  const auto assign_and_repair = [&] {
    std::fill(count.begin(), count.end(), 0);
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double best_d = point_dist2(points[static_cast<std::size_t>(i)].second, centroids[0]);
      for (int c = 1; c < C; ++c) {
        const double d = point_dist2(points[static_cast<std::size_t>(i)].second,
                                     centroids[static_cast<std::size_t>(c)]);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      assign[static_cast<std::size_t>(i)] = best;
      dist_assigned[static_cast<std::size_t>(i)] = best_d;
      ++count[static_cast<std::size_t>(best)];
    }
    for (;;) {
      int empty = -1;
      for (int c = 0; c < C; ++c)
        if (count[static_cast<std::size_t>(c)] == 0) {
          empty = c;
          break;
        }
      if (empty < 0) break;
      int largest = 0;
      for (int c = 1; c < C; ++c)
        if (count[static_cast<std::size_t>(c)] > count[static_cast<std::size_t>(largest)]) largest = c;
      int far = -1;
      double far_d = -1.0;
      for (int i = 0; i < n; ++i) {
        if (assign[static_cast<std::size_t>(i)] != largest) continue;
        if (dist_assigned[static_cast<std::size_t>(i)] > far_d) {
          far_d = dist_assigned[static_cast<std::size_t>(i)];
          far = i;
        }
      }
      assign[static_cast<std::size_t>(far)] = empty;
      dist_assigned[static_cast<std::size_t>(far)] = 0.0;
      --count[static_cast<std::size_t>(largest)];
      ++count[static_cast<std::size_t>(empty)];
    }
  };

  for (int iter = 0; iter < max_iters; ++iter) {
    assign_and_repair();

    // Centroid update: per-class mean, accumulated in point order.
    std::vector<std::vector<double>> next(static_cast<std::size_t>(C),
                                          std::vector<double>(dim, 0.0));
    for (int i = 0; i < n; ++i) {
      auto& acc = next[static_cast<std::size_t>(assign[static_cast<std::size_t>(i)])];
      const auto& v = points[static_cast<std::size_t>(i)].second;
      for (std::size_t j = 0; j < dim; ++j) acc[j] += v[j];
    }
    for (int c = 0; c < C; ++c)
      for (std::size_t j = 0; j < dim; ++j)
        next[static_cast<std::size_t>(c)][j] /= count[static_cast<std::size_t>(c)];

    double max_shift = 0.0;
    for (int c = 0; c < C; ++c) {
      const double s = std::sqrt(point_dist2(centroids[static_cast<std::size_t>(c)],
                                             next[static_cast<std::size_t>(c)]));
      if (s > max_shift) max_shift = s;
    }
    centroids = std::move(next);

    if (objective_trace) {
      double obj = 0.0;
      for (int i = 0; i < n; ++i)
        obj += point_dist2(points[static_cast<std::size_t>(i)].second,
                           centroids[static_cast<std::size_t>(assign[static_cast<std::size_t>(i)])]);
      objective_trace->push_back(obj);
    }
    if (max_shift < tol) break;
  }

  // Final pass so the returned assignment is nearest-centroid with respect
  // to the final centroids (repair may still override for empty classes).
  assign_and_repair();

  DiversityClasses out;
  out.C = C;
  out.centroids = std::move(centroids);
  for (int i = 0; i < n; ++i)
    out.assignment[points[static_cast<std::size_t>(i)].first] = assign[static_cast<std::size_t>(i)];
  return out;
}

DiversityClasses kmeans_multi(const ClusterPoints& points, int C, std::uint64_t seed,
                              int max_iters, double tol, int restarts) {
  if (restarts < 1) throw std::invalid_argument("kmeans_multi: restarts must be >= 1");
  DiversityClasses best;
  double best_obj = 0.0;
  for (int r = 0; r < restarts; ++r) {
    DiversityClasses cand = kmeans(points, C, mix_seed(seed, static_cast<std::uint64_t>(r)),
                                   max_iters, tol);
    const double obj = objective(points, cand);
    if (r == 0 || obj < best_obj) {
      best_obj = obj;
      best = std::move(cand);
    }
  }
  return best;
}

double objective(const ClusterPoints& points, const DiversityClasses& classes) {
  double obj = 0.0;
  for (const auto& [id, v] : points)
    obj += point_dist2(v, classes.centroids[static_cast<std::size_t>(classes.assignment.at(id))]);
  return obj;
}

std::string assignment_csv(const DiversityClasses& classes) {
  std::string out = "id,class\n";
  for (const auto& [id, cls] : classes.assignment) {
    out += std::to_string(id);
    out += ',';
    out += std::to_string(cls);
    out += '\n';
  }
  return out;
}

}  // namespace dynsel

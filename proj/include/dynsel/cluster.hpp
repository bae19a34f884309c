#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace dynsel {

// K-means partition of the corpus embeddings; the diversity constraint the
// selector draws class quotas from.
struct DiversityClasses {
  std::map<int, int> assignment;              // id -> class index
  std::vector<std::vector<double>> centroids;  // C vectors
  int C = 1;

  // Member ids per class, each list ascending.
  std::vector<std::vector<int>> members() const;
};

using ClusterPoints = std::vector<std::pair<int, std::vector<double>>>;

// Lloyd's algorithm with seeded k-means++ initialization. Empty clusters are
// repaired by stealing the farthest point from the largest cluster. When
// objective_trace is given it receives the objective after every iteration
// (non-increasing by construction).
DiversityClasses kmeans(const ClusterPoints& points, int C, std::uint64_t seed,
                        int max_iters, double tol,
                        std::vector<double>* objective_trace = nullptr);

// Within-cluster sum of squared distances to the assigned centroid.
double objective(const ClusterPoints& points, const DiversityClasses& classes);

// Best of `restarts` seeded kmeans runs by objective; Lloyd's converges to
// local optima, so experiments cluster through this instead of a single run.
DiversityClasses kmeans_multi(const ClusterPoints& points, int C, std::uint64_t seed,
                              int max_iters, double tol, int restarts = 10);

// "id,class" rows for the report pipeline.
std::string assignment_csv(const DiversityClasses& classes);

}  // namespace dynsel

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hydap/dataset.hpp"
#include "hydap/dissimilarity.hpp"

namespace hydap {

struct ClusterResult {
  Index k = 0;
  std::vector<Index> assign;
  double objective = 0;
  std::vector<double> centers;  // k x h row-major (empty for PAM)
  std::vector<Index> medoids;   // PAM only
  std::vector<double> weights;  // sparse K-means only, length h
  Index iterations = 0;
  bool converged = false;
};

struct SparsityChoice {
  double s = 0;
  std::vector<double> candidates;
  std::vector<double> gap_scores;
  std::vector<double> gap_se;
};

struct KmeansOptions {
  double tol = 1e-8;
  Index max_iters = 300;
};

ClusterResult kmeans(const StandardizedView& view, Index k, std::uint64_t seed,
                     Index restarts = 10, const KmeansOptions& opts = {});

ClusterResult sparse_kmeans(const StandardizedView& view, Index k, double s,
                            std::uint64_t seed, Index restarts = 5);

SparsityChoice choose_sparsity(const StandardizedView& view, Index k,
                               const std::vector<double>& grid,
                               Index permutations, std::uint64_t seed);

// Default log-spaced sparsity grid over [1.1, sqrt(h)].
std::vector<double> default_sparsity_grid(Index h, Index size = 10);

ClusterResult pam(const DissimMatrix& dm, Index k, std::uint64_t seed = 0);

double default_gamma(const MixedDataset& ds);

ClusterResult kprototypes(const MixedDataset& ds, Index k, double gamma,
                          std::uint64_t seed, Index restarts = 1);

std::string cluster_result_json(const ClusterResult& res);

}  // namespace hydap

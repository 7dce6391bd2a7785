#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "hydap/partition.hpp"

namespace hydap {

// Pairwise co-clustering frequencies from resampled inner runs. Stored as
// condensed upper triangles; the diagonal is 1 by definition.
struct ConsensusMatrix {
  Index n = 0;
  std::vector<double> values;
  std::vector<std::uint16_t> together;
  std::vector<std::uint16_t> same;
  Index unsampled_pairs = 0;

  static Index condensed_index(Index n, Index i, Index j) {
    if (i > j) std::swap(i, j);
    return i * n - i * (i + 1) / 2 + (j - i - 1);
  }
  double at(Index i, Index j) const {
    return i == j ? 1.0 : values[condensed_index(n, i, j)];
  }
};

struct ConsensusKSummary {
  Index k = 0;
  std::vector<double> cluster_consensus;
  double mean_cc = 0;
  double min_cc = 0;
  Index unsampled_pairs = 0;
};

struct ConsensusReport {
  std::vector<ConsensusKSummary> per_k;
  Index chosen_k = 1;
  bool homogeneous = false;
  ClusterResult final;  // assignment for chosen_k (empty when homogeneous)
};

struct ConsensusParams {
  Index h_iters = 100;
  double frac = 0.8;
  Index k_max = 6;
  double stability_threshold = 0.8;
};

// Labels from average-linkage agglomeration over a condensed dissimilarity
// triangle, cut at k clusters. Consumes the triangle.
std::vector<Index> average_linkage_cut(std::vector<double> condensed, Index n, Index k);

std::pair<ConsensusMatrix, ClusterResult> consensus_run(const StandardizedView& view,
                                                        Index k, Index h_iters,
                                                        double frac,
                                                        std::uint64_t seed);

std::vector<double> cluster_consensus(const ConsensusMatrix& cm,
                                      const std::vector<Index>& assign);

ConsensusReport select_k(const StandardizedView& view, Index k_max, Index h_iters,
                         double frac, std::uint64_t seed, double stability_threshold);

}  // namespace hydap

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hydap/consensus.hpp"
#include "hydap/dataset.hpp"
#include "hydap/density.hpp"
#include "hydap/metrics.hpp"
#include "hydap/partition.hpp"

namespace hydap {

struct PipelineConfig {
  std::uint64_t seed = 0;
  // structure identification
  double xi = 0.05;
  double min_cluster_frac = 0.05;
  Index min_pts = 0;  // 0 = max(5, ceil(ln n))
  Index consensus_h_iters = 100;
  double consensus_frac = 0.8;
  Index k_max = 6;
  double stability_threshold = 0.8;
  // variable selection
  double weight_threshold = 0.05;
  double v_cutoff = 0.3;
  Index bootstrap_reps = 25;  // 0 disables the BCSS screen
  Index gap_permutations = 25;
  // correlation caution for two-way consensus splits
  double corr_threshold = 0.3;
  double corr_frac = 0.5;
  // After a caution demotion, revisit the homogeneous call when the continuous
  // block explains at least this share of its variance across the clusters
  // found on the categorical variables.
  double upgrade_bcss = 0.1;
};

struct DroppedVar {
  std::string name;
  std::string reason;
};

struct StructureReport {
  int structure = 3;  // 1 natural, 2 partitioned, 3 homogeneous
  Index trough_count = 0;
  Index consensus_k = 0;  // structures 2/3 only
  Index k = 0;            // step-2 cluster count (0 = elbow decides)
  std::vector<std::string> kept_continuous;
  std::vector<double> kept_weights;  // parallel to kept_continuous (structure 1)
  std::vector<std::string> kept_categorical;
  std::vector<double> kept_v;  // parallel to kept_categorical
  std::vector<DroppedVar> dropped;
  // Selection evidence for every variable, kept or not (block order).
  std::vector<double> all_weights;  // structure 1: sparse weight per continuous
  std::vector<double> screen_v;     // Cramer's V per categorical (-1 = degenerate)
  std::vector<std::string> warnings;
  TroughReport troughs;
  ConsensusReport consensus;
  bool consensus_ran = false;
  BcssScreen bcss;
  bool bcss_ran = false;
};

struct HydapResult {
  StructureReport report;
  Index k = 0;
  std::vector<Index> assign;
  std::string method_used;  // sparse-kmeans | consensus-kmeans | pam-hydap
  ClusterResult clustering;
  std::vector<Index> elbow_ks;
  std::vector<double> elbow_objective;
};

StructureReport identify_structure(const MixedDataset& ds, const PipelineConfig& cfg);
void select_variables(const MixedDataset& ds, StructureReport& report,
                      const PipelineConfig& cfg);
HydapResult cluster_step2(const MixedDataset& ds, const StructureReport& report,
                          const PipelineConfig& cfg);
HydapResult run_hydap(const MixedDataset& ds, const PipelineConfig& cfg);

std::string hydap_result_json(const HydapResult& res);
void write_assignments_csv(const std::vector<Index>& assign, const std::string& path);

}  // namespace hydap

#pragma once

#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "hydap/dataset.hpp"

namespace hydap {

struct OpticsParams {
  Index min_pts = 5;
  double eps = std::numeric_limits<double>::infinity();

  static OpticsParams defaults(Index n);
};

// Undefined reachability (first point of an expansion, unreached points)
// is stored as +infinity.
struct ReachabilityProfile {
  std::vector<Index> order;   // processing order, a permutation of 0..n-1
  std::vector<double> reach;  // reach[pos] for order[pos]
  std::vector<double> core;   // core[i] for subject i
  Index min_pts = 0;

  Index n() const { return order.size(); }
};

struct TroughReport {
  Index trough_count = 0;
  std::vector<std::pair<Index, Index>> boundaries;  // inclusive positions
  double xi = 0;
};

ReachabilityProfile optics(const StandardizedView& view, const OpticsParams& params);

TroughReport detect_troughs(const ReachabilityProfile& profile, double xi,
                            double min_cluster_frac);

void export_reachability(const ReachabilityProfile& profile, const std::string& path);
ReachabilityProfile import_reachability(const std::string& path);

std::string trough_report_json(const TroughReport& report);

}  // namespace hydap

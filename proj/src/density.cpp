#include "hydap/density.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace hydap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double dist(const StandardizedView& v, Index a, Index b) {
  double acc = 0;
  for (Index c = 0; c < v.h; ++c) {
    double d = v.at(a, c) - v.at(b, c);
    acc += d * d;
  }
  return std::sqrt(acc);
}

}  // namespace

OpticsParams OpticsParams::defaults(Index n) {
  OpticsParams p;
  p.min_pts = std::max<Index>(5, static_cast<Index>(
                                     std::ceil(std::log(static_cast<double>(n)))));
  p.eps = kInf;
  return p;
}

ReachabilityProfile optics(const StandardizedView& view, const OpticsParams& params) {
  const Index n = view.n;
  if (params.min_pts < 2) throw Error("optics: min_pts must be >= 2");
  if (n < params.min_pts)
    throw TooFewSubjectsError("optics: n < min_pts");

  ReachabilityProfile prof;
  prof.min_pts = params.min_pts;
  prof.core.assign(n, kInf);
  std::vector<bool> processed(n, false);
  // Tentative reachability per subject; candidates are unprocessed subjects
  // with a finite tentative value.
  std::vector<double> tentative(n, kInf);
  std::vector<double> drow(n);

  auto process = [&](Index p, double reach_val) {
    processed[p] = true;
    prof.order.push_back(p);
    prof.reach.push_back(reach_val);
    Index within = 0;
    for (Index o = 0; o < n; ++o) {
      drow[o] = dist(view, p, o);
      if (drow[o] <= params.eps) ++within;
    }
    // Core distance: distance to the min_pts-th nearest subject, the point
    // itself counted as its own first neighbor.
    if (within >= params.min_pts) {
      std::vector<double> ds(drow);
      std::nth_element(ds.begin(), ds.begin() + (params.min_pts - 1), ds.end());
      prof.core[p] = ds[params.min_pts - 1];
      for (Index o = 0; o < n; ++o) {
        if (processed[o] || drow[o] > params.eps) continue;
        double r = std::max(prof.core[p], drow[o]);
        if (r < tentative[o]) tentative[o] = r;
      }
    }
  };

  for (Index start = 0; start < n; ++start) {
    if (processed[start]) continue;
    process(start, kInf);
    for (;;) {
      // Deterministic pop: minimum tentative reachability, lowest index on ties.
      Index best = n;
      for (Index o = 0; o < n; ++o)
        if (!processed[o] && tentative[o] < kInf &&
            (best == n || tentative[o] < tentative[best]))
          best = o;
      if (best == n) break;
      double r = tentative[best];
      tentative[best] = kInf;
      process(best, r);
    }
  }
  return prof;
}

TroughReport detect_troughs(const ReachabilityProfile& profile, double xi,
                            double min_cluster_frac) {
  if (!(xi > 0.0 && xi < 1.0)) throw Error("detect_troughs: xi must be in (0,1)");
  const Index n = profile.n();
  TroughReport report;
  report.xi = xi;
  if (n < 2) return report;

  const Index min_pts = std::max<Index>(2, profile.min_pts);
  const Index min_cluster = std::max<Index>(
      min_pts, static_cast<Index>(std::ceil(min_cluster_frac * static_cast<double>(n))));

  // A trough is a long run of low reachability fenced off by separator
  // positions. Separators must rise close to the profile's highest
  // reachability: the level S discounted by 2*min_pts xi-sized steps.
  // Anchoring the threshold at the global scale keeps small relative
  // fluctuations inside a dense region from splitting it, no matter how
  // tight the region is in absolute terms.
  double top = 0.0;
  bool any_finite = false;
  for (Index i = 0; i < n; ++i)
    if (std::isfinite(profile.reach[i])) {
      top = std::max(top, profile.reach[i]);
      any_finite = true;
    }
  if (!any_finite) return report;
  const double threshold =
      top * std::pow(1.0 - xi, 2.0 * static_cast<double>(min_pts));
  // Floor for the secondary split below, and the factor by which both halves
  // of a candidate split must undercut the dividing peak.
  const double rescue_floor =
      top * std::pow(1.0 - xi, 6.0 * static_cast<double>(min_pts));
  const double kRelativeDepth = 0.7;

  const auto reach_at = [&](Index i) {
    return std::isfinite(profile.reach[i]) ? profile.reach[i]
                                           : std::numeric_limits<double>::max();
  };

  std::vector<std::pair<Index, Index>> runs;

  // A separator between troughs can also sit below the global threshold when
  // both flanks dip well beneath it: split a run at its highest interior
  // position whenever each side keeps min_cluster points and reaches down to
  // kRelativeDepth of the dividing peak.
  const std::function<void(Index, Index)> split_run = [&](Index a, Index b) {
    Index peak = n;
    double peak_val = 0.0;
    for (Index p = a + min_cluster; p + min_cluster <= b + 1; ++p)
      if (p > a && reach_at(p) > peak_val) {
        peak_val = reach_at(p);
        peak = p;
      }
    if (peak < n && peak_val >= rescue_floor) {
      double left_min = std::numeric_limits<double>::max();
      double right_min = left_min;
      for (Index i = std::max<Index>(a, 1); i < peak; ++i)
        left_min = std::min(left_min, reach_at(i));
      for (Index i = peak + 1; i <= b; ++i)
        right_min = std::min(right_min, reach_at(i));
      if (left_min <= kRelativeDepth * peak_val &&
          right_min <= kRelativeDepth * peak_val) {
        split_run(a, peak - 1);
        split_run(peak + 1, b);
        return;
      }
    }
    runs.emplace_back(a, b);
  };

  // Position 0 has undefined reachability and belongs to whatever trough
  // follows it; other undefined positions mark unreachable jumps and act as
  // separators.
  Index start = 0;
  for (Index i = 1; i <= n; ++i) {
    bool low = i < n && std::isfinite(profile.reach[i]) &&
               profile.reach[i] < threshold;
    if (low) continue;
    if (i - start >= min_cluster) split_run(start, i - 1);
    start = i + 1;
  }
  report.boundaries = std::move(runs);
  report.trough_count = report.boundaries.size();
  return report;
}

void export_reachability(const ReachabilityProfile& profile, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << "position,subject_id,reachability\n";
  char buf[64];
  for (Index pos = 0; pos < profile.n(); ++pos) {
    out << pos << "," << profile.order[pos] << ",";
    if (std::isfinite(profile.reach[pos])) {
      std::snprintf(buf, sizeof buf, "%.17g", profile.reach[pos]);
      out << buf;
    }
    out << "\n";
  }
}

ReachabilityProfile import_reachability(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path + ": empty file");
  ReachabilityProfile prof;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string pos, id, reach;
    std::getline(ss, pos, ',');
    std::getline(ss, id, ',');
    std::getline(ss, reach, ',');
    prof.order.push_back(std::stoull(id));
    prof.reach.push_back(reach.empty() ? kInf : std::stod(reach));
  }
  return prof;
}

std::string trough_report_json(const TroughReport& report) {
  nlohmann::json j;
  j["trough_count"] = report.trough_count;
  auto arr = nlohmann::json::array();
  for (const auto& b : report.boundaries)
    arr.push_back({{"start", b.first}, {"end", b.second}});
  j["boundaries"] = arr;
  j["xi"] = report.xi;
  return j.dump(2);
}

}  // namespace hydap

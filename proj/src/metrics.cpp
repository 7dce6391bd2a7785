#include "hydap/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "hydap/parallel.hpp"
#include "hydap/partition.hpp"
#include "hydap/rng.hpp"

namespace hydap {

Contingency Contingency::from(const std::vector<Index>& a,
                              const std::vector<Index>& b) {
  if (a.size() != b.size()) throw LengthMismatchError("contingency: length mismatch");
  Contingency t;
  t.rows = a.empty() ? 0 : *std::max_element(a.begin(), a.end()) + 1;
  t.cols = b.empty() ? 0 : *std::max_element(b.begin(), b.end()) + 1;
  t.cells.assign(t.rows * t.cols, 0.0);
  for (Index i = 0; i < a.size(); ++i) t.cells[a[i] * t.cols + b[i]] += 1.0;
  t.row_sums.assign(t.rows, 0.0);
  t.col_sums.assign(t.cols, 0.0);
  for (Index r = 0; r < t.rows; ++r)
    for (Index c = 0; c < t.cols; ++c) {
      t.row_sums[r] += t.at(r, c);
      t.col_sums[c] += t.at(r, c);
      t.n += t.at(r, c);
    }
  return t;
}

namespace {
double choose2(double x) { return x * (x - 1.0) / 2.0; }
}

double ari(const std::vector<Index>& a, const std::vector<Index>& b) {
  if (a.size() != b.size()) throw LengthMismatchError("ari: length mismatch");
  if (a.size() < 2) throw LengthMismatchError("ari: need n >= 2");
  Contingency t = Contingency::from(a, b);
  double sum_ij = 0;
  for (double c : t.cells) sum_ij += choose2(c);
  double sum_a = 0, sum_b = 0;
  for (double c : t.row_sums) sum_a += choose2(c);
  for (double c : t.col_sums) sum_b += choose2(c);
  double expected = sum_a * sum_b / choose2(t.n);
  double max_index = 0.5 * (sum_a + sum_b);
  double denom = max_index - expected;
  if (denom == 0.0) return 1.0;  // both partitions degenerate and identical
  return (sum_ij - expected) / denom;
}

double cramers_v(const std::vector<Index>& a, const std::vector<Index>& b) {
  Contingency t = Contingency::from(a, b);
  Index obs_rows = 0, obs_cols = 0;
  for (double s : t.row_sums) obs_rows += s > 0 ? 1 : 0;
  for (double s : t.col_sums) obs_cols += s > 0 ? 1 : 0;
  if (obs_rows < 2 || obs_cols < 2)
    throw DegenerateTableError("cramers_v: a variable is constant");
  double chi2 = 0;
  for (Index r = 0; r < t.rows; ++r) {
    if (t.row_sums[r] == 0) continue;
    for (Index c = 0; c < t.cols; ++c) {
      if (t.col_sums[c] == 0) continue;
      double expected = t.row_sums[r] * t.col_sums[c] / t.n;
      double d = t.at(r, c) - expected;
      chi2 += d * d / expected;
    }
  }
  double v2 = chi2 / (t.n * static_cast<double>(std::min(obs_rows, obs_cols) - 1));
  return std::sqrt(std::max(0.0, v2));
}

SumOfSquares wcss_bcss(const StandardizedView& view, const std::vector<Index>& assign) {
  if (assign.size() != view.n) throw LengthMismatchError("wcss_bcss: length mismatch");
  Index k = assign.empty() ? 0 : *std::max_element(assign.begin(), assign.end()) + 1;
  SumOfSquares out;
  out.wcss.assign(view.h, 0.0);
  out.bcss.assign(view.h, 0.0);
  std::vector<double> counts(k, 0.0);
  for (Index i = 0; i < view.n; ++i) counts[assign[i]] += 1.0;
  for (Index c = 0; c < view.h; ++c) {
    double grand = 0;
    for (Index i = 0; i < view.n; ++i) grand += view.at(i, c);
    grand /= static_cast<double>(view.n);
    std::vector<double> means(k, 0.0);
    for (Index i = 0; i < view.n; ++i) means[assign[i]] += view.at(i, c);
    for (Index g = 0; g < k; ++g)
      if (counts[g] > 0) means[g] /= counts[g];
    for (Index i = 0; i < view.n; ++i) {
      double d = view.at(i, c) - means[assign[i]];
      out.wcss[c] += d * d;
    }
    for (Index g = 0; g < k; ++g) {
      double d = means[g] - grand;
      out.bcss[c] += counts[g] * d * d;
    }
    out.total_wcss += out.wcss[c];
    out.total_bcss += out.bcss[c];
  }
  return out;
}

BcssScreen bootstrap_bcss_screen(const StandardizedView& view, Index k,
                                 Index boots, std::uint64_t seed) {
  if (boots < 10) throw Error("bootstrap_bcss_screen: boots must be >= 10");
  const Index n = view.n, h = view.h;
  // Per-replicate per-variable BCSS; slots indexed by replicate so parallel
  // execution is deterministic.
  std::vector<std::vector<double>> bcss(boots);
  double s = std::sqrt(static_cast<double>(h));  // no thresholding: screen on raw BCSS
  parallel_for(boots, [&](Index b) {
    Rng rng = task_rng(seed, b);
    std::uniform_int_distribution<Index> pick(0, n - 1);
    StandardizedView boot;
    boot.n = n;
    boot.h = h;
    boot.matrix.resize(n * h);
    for (Index i = 0; i < n; ++i) {
      Index src = pick(rng);
      std::copy_n(&view.matrix[src * h], h, &boot.matrix[i * h]);
    }
    ClusterResult res = sparse_kmeans(boot, k, s, seed * 2654435761u + b);
    bcss[b] = wcss_bcss(boot, res.assign).bcss;
  });

  std::vector<std::vector<double>> per_var(h);
  for (Index c = 0; c < h; ++c) {
    per_var[c].reserve(boots);
    for (Index b = 0; b < boots; ++b) per_var[c].push_back(bcss[b][c]);
    std::sort(per_var[c].begin(), per_var[c].end());
  }
  auto quantile = [&](const std::vector<double>& v, double q) {
    double pos = q * static_cast<double>(v.size() - 1);
    Index lo = static_cast<Index>(pos);
    Index hi = std::min<Index>(lo + 1, v.size() - 1);
    double frac = pos - static_cast<double>(lo);
    return v[lo] * (1 - frac) + v[hi] * frac;
  };

  std::vector<Index> order(h);
  for (Index c = 0; c < h; ++c) order[c] = c;
  std::vector<double> med(h);
  for (Index c = 0; c < h; ++c) med[c] = quantile(per_var[c], 0.5);
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    if (med[a] != med[b]) return med[a] < med[b];
    return a < b;
  });

  BcssScreen screen;
  for (Index r = 0; r < h; ++r) {
    Index c = order[r];
    screen.names.push_back(c < view.names.size() ? view.names[c]
                                                 : "v" + std::to_string(c));
    screen.median.push_back(med[c]);
    screen.lo.push_back(quantile(per_var[c], 0.025));
    screen.hi.push_back(quantile(per_var[c], 0.975));
  }
  // Keep/drop rule: split at the largest gap in the ordered medians, unless
  // no gap stands out (largest gap < 2x the median gap), in which case all
  // variables are kept.
  screen.kept.assign(h, true);
  if (h >= 2) {
    std::vector<double> gaps;
    for (Index r = 0; r + 1 < h; ++r)
      gaps.push_back(screen.median[r + 1] - screen.median[r]);
    std::vector<double> sorted_gaps(gaps);
    std::sort(sorted_gaps.begin(), sorted_gaps.end());
    double med_gap = sorted_gaps[sorted_gaps.size() / 2];
    Index arg = 0;
    for (Index g = 1; g < gaps.size(); ++g)
      if (gaps[g] > gaps[arg]) arg = g;
    if (gaps[arg] >= 2.0 * med_gap && gaps[arg] > 0.0)
      for (Index r = 0; r <= arg; ++r) screen.kept[r] = false;
  }
  return screen;
}

void write_bcss_screen_csv(const BcssScreen& screen, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << "variable,median_bcss,p2.5,p97.5,kept\n";
  char buf[160];
  for (Index r = 0; r < screen.names.size(); ++r) {
    std::snprintf(buf, sizeof buf, "%s,%.10g,%.10g,%.10g,%d",
                  screen.names[r].c_str(), screen.median[r], screen.lo[r],
                  screen.hi[r], screen.kept[r] ? 1 : 0);
    out << buf << "\n";
  }
}

Index elbow(const std::vector<Index>& ks, const std::vector<double>& objective) {
  if (ks.size() != objective.size()) throw LengthMismatchError("elbow: length mismatch");
  if (ks.size() < 3) throw TooShortError("elbow: need at least 3 points");
  for (Index i = 1; i < ks.size(); ++i)
    if (ks[i] <= ks[i - 1]) throw Error("elbow: ks must be ascending");
  Index best = 1;
  double best_curv = -std::numeric_limits<double>::infinity();
  for (Index i = 1; i + 1 < ks.size(); ++i) {
    double curv = objective[i - 1] - 2.0 * objective[i] + objective[i + 1];
    if (curv > best_curv) {
      best_curv = curv;
      best = i;
    }
  }
  return ks[best];
}

}  // namespace hydap

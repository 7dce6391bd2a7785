#include "hydap/partition.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "hydap/metrics.hpp"
#include "hydap/parallel.hpp"
#include "hydap/rng.hpp"

namespace hydap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sq_dist(const double* a, const double* b, Index h) {
  double acc = 0;
  for (Index c = 0; c < h; ++c) {
    double d = a[c] - b[c];
    acc += d * d;
  }
  return acc;
}

// K-means++ seeding over a row-major n x h matrix.
std::vector<double> kmeanspp_init(const std::vector<double>& data, Index n,
                                  Index h, Index k, Rng& rng) {
  std::vector<double> centers(k * h);
  std::uniform_int_distribution<Index> first(0, n - 1);
  Index c0 = first(rng);
  std::copy_n(&data[c0 * h], h, centers.begin());
  std::vector<double> d2(n);
  for (Index i = 0; i < n; ++i) d2[i] = sq_dist(&data[i * h], &centers[0], h);
  for (Index c = 1; c < k; ++c) {
    double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    Index pick = 0;
    if (total > 0) {
      std::uniform_real_distribution<double> u(0.0, total);
      double target = u(rng);
      double acc = 0;
      for (Index i = 0; i < n; ++i) {
        acc += d2[i];
        if (acc >= target) { pick = i; break; }
      }
    } else {
      pick = first(rng);
    }
    std::copy_n(&data[pick * h], h, &centers[c * h]);
    for (Index i = 0; i < n; ++i)
      d2[i] = std::min(d2[i], sq_dist(&data[i * h], &centers[c * h], h));
  }
  return centers;
}

void assign_points(const std::vector<double>& data, Index n, Index h,
                   const std::vector<double>& centers, Index k,
                   std::vector<Index>& assign, double& objective) {
  objective = 0;
  for (Index i = 0; i < n; ++i) {
    Index best = 0;
    double best_d = sq_dist(&data[i * h], &centers[0], h);
    for (Index c = 1; c < k; ++c) {
      double d = sq_dist(&data[i * h], &centers[c * h], h);
      if (d < best_d) { best_d = d; best = c; }
    }
    assign[i] = best;
    objective += best_d;
  }
}

void update_centers(const std::vector<double>& data, Index n, Index h,
                    const std::vector<Index>& assign, Index k,
                    std::vector<double>& centers) {
  std::vector<double> counts(k, 0.0);
  std::fill(centers.begin(), centers.end(), 0.0);
  for (Index i = 0; i < n; ++i) {
    counts[assign[i]] += 1.0;
    for (Index c = 0; c < h; ++c) centers[assign[i] * h + c] += data[i * h + c];
  }
  for (Index g = 0; g < k; ++g)
    if (counts[g] > 0)
      for (Index c = 0; c < h; ++c) centers[g * h + c] /= counts[g];
}

// Moves the point farthest from its center into each empty cluster.
void repair_empty(const std::vector<double>& data, Index n, Index h, Index k,
                  std::vector<Index>& assign, std::vector<double>& centers) {
  for (;;) {
    std::vector<Index> counts(k, 0);
    for (Index a : assign) ++counts[a];
    Index empty = k;
    for (Index g = 0; g < k; ++g)
      if (counts[g] == 0) { empty = g; break; }
    if (empty == k) return;
    Index worst = 0;
    double worst_d = -1;
    for (Index i = 0; i < n; ++i) {
      if (counts[assign[i]] <= 1) continue;
      double d = sq_dist(&data[i * h], &centers[assign[i] * h], h);
      if (d > worst_d) { worst_d = d; worst = i; }
    }
    assign[worst] = empty;
    update_centers(data, n, h, assign, k, centers);
  }
}

ClusterResult lloyd(const std::vector<double>& data, Index n, Index h, Index k,
                    std::vector<double> centers, const KmeansOptions& opts) {
  ClusterResult res;
  res.k = k;
  res.assign.assign(n, 0);
  double prev = kInf;
  for (Index it = 0; it < opts.max_iters; ++it) {
    assign_points(data, n, h, centers, k, res.assign, res.objective);
    update_centers(data, n, h, res.assign, k, centers);
    repair_empty(data, n, h, k, res.assign, centers);
    res.iterations = it + 1;
    assert(res.objective <= prev * (1.0 + 1e-12) + 1e-12);
    if (prev < kInf && prev - res.objective <= opts.tol * std::max(prev, 1e-30)) {
      res.converged = true;
      break;
    }
    prev = res.objective;
  }
  // Final assignment against the final centers.
  assign_points(data, n, h, centers, k, res.assign, res.objective);
  res.centers = std::move(centers);
  return res;
}

ClusterResult kmeans_matrix(const std::vector<double>& data, Index n, Index h,
                            Index k, std::uint64_t seed, Index restarts,
                            const KmeansOptions& opts) {
  restarts = std::max<Index>(1, restarts);
  std::vector<ClusterResult> runs(restarts);
  parallel_for(restarts, [&](Index r) {
    Rng rng = task_rng(seed, r);
    runs[r] = lloyd(data, n, h, k, kmeanspp_init(data, n, h, k, rng), opts);
  });
  Index best = 0;
  for (Index r = 1; r < restarts; ++r)
    if (runs[r].objective < runs[best].objective) best = r;
  return runs[best];
}

}  // namespace

ClusterResult kmeans(const StandardizedView& view, Index k, std::uint64_t seed,
                     Index restarts, const KmeansOptions& opts) {
  if (k < 1 || k > view.n) throw InvalidKError("kmeans: k must be in [1, n]");
  return kmeans_matrix(view.matrix, view.n, view.h, k, seed, restarts, opts);
}

namespace {

// Weight update of the sparse framework: soft-threshold the per-variable
// between-cluster sums of squares and renormalize to unit L2 norm, with the
// threshold chosen so the L1 norm meets the budget s.
std::vector<double> sparse_weights(const std::vector<double>& bcss, double s) {
  const Index h = bcss.size();
  auto weights_for = [&](double delta) {
    std::vector<double> w(h);
    double norm2 = 0;
    for (Index j = 0; j < h; ++j) {
      w[j] = std::max(bcss[j] - delta, 0.0);
      norm2 += w[j] * w[j];
    }
    if (norm2 > 0) {
      double inv = 1.0 / std::sqrt(norm2);
      for (double& x : w) x *= inv;
    } else {
      for (double& x : w) x = 1.0 / std::sqrt(static_cast<double>(h));
    }
    return w;
  };
  auto l1 = [](const std::vector<double>& w) {
    return std::accumulate(w.begin(), w.end(), 0.0);
  };
  std::vector<double> w = weights_for(0.0);
  if (l1(w) <= s) return w;
  double lo = 0, hi = *std::max_element(bcss.begin(), bcss.end());
  for (int it = 0; it < 60; ++it) {
    double mid = 0.5 * (lo + hi);
    if (l1(weights_for(mid)) > s) lo = mid;
    else hi = mid;
  }
  return weights_for(hi);
}

}  // namespace

ClusterResult sparse_kmeans(const StandardizedView& view, Index k, double s,
                            std::uint64_t seed, Index restarts) {
  const Index n = view.n, h = view.h;
  if (k < 2) throw InvalidKError("sparse_kmeans: k must be >= 2");
  double max_s = std::sqrt(static_cast<double>(h));
  if (s < 1.0 || s > max_s * (1.0 + 1e-9))
    throw InvalidSparsityError("sparse_kmeans: s must be in [1, sqrt(h)]");
  s = std::min(s, max_s);

  std::vector<double> w(h, 1.0 / max_s);
  std::vector<double> scaled(n * h);
  ClusterResult inner;
  double prev_obj = kInf;
  KmeansOptions opts;
  for (Index outer = 0; outer < 15; ++outer) {
    for (Index j = 0; j < h; ++j) {
      double f = std::sqrt(w[j]);
      for (Index i = 0; i < n; ++i) scaled[i * h + j] = view.matrix[i * h + j] * f;
    }
    if (outer == 0) {
      inner = kmeans_matrix(scaled, n, h, k, seed, restarts, opts);
    } else {
      // Warm start from the previous assignment on the rescaled data.
      std::vector<double> centers(k * h, 0.0);
      update_centers(scaled, n, h, inner.assign, k, centers);
      inner = lloyd(scaled, n, h, k, std::move(centers), opts);
    }
    std::vector<double> bcss = wcss_bcss(view, inner.assign).bcss;
    w = sparse_weights(bcss, s);
    double obj = 0;
    for (Index j = 0; j < h; ++j) obj += w[j] * bcss[j];
    if (prev_obj < kInf &&
        std::abs(obj - prev_obj) <= 1e-4 * std::max(std::abs(prev_obj), 1e-30)) {
      inner.converged = true;
      inner.iterations = outer + 1;
      prev_obj = obj;
      break;
    }
    prev_obj = obj;
    inner.iterations = outer + 1;
  }
  ClusterResult res = inner;
  res.k = k;
  res.weights = w;
  res.objective = prev_obj;  // weighted between-cluster sum of squares
  return res;
}

std::vector<double> default_sparsity_grid(Index h, Index size) {
  double lo = 1.1, hi = std::sqrt(static_cast<double>(h));
  std::vector<double> grid;
  if (hi <= lo) {
    grid.push_back(hi);
    return grid;
  }
  for (Index i = 0; i < size; ++i) {
    double t = static_cast<double>(i) / static_cast<double>(size - 1);
    grid.push_back(lo * std::pow(hi / lo, t));
  }
  return grid;
}

SparsityChoice choose_sparsity(const StandardizedView& view, Index k,
                               const std::vector<double>& grid,
                               Index permutations, std::uint64_t seed) {
  if (permutations < 2) throw Error("choose_sparsity: permutations must be >= 2");
  const Index n = view.n, h = view.h;
  SparsityChoice choice;
  choice.candidates = grid;
  if (grid.size() == 1) {
    choice.s = grid[0];
    choice.gap_scores.assign(1, 0.0);
    choice.gap_se.assign(1, 0.0);
    return choice;
  }

  // Permuted datasets are shared across the grid; each permutes every
  // column independently.
  std::vector<StandardizedView> perms(permutations);
  for (Index b = 0; b < permutations; ++b) {
    Rng rng = task_rng(seed ^ 0x9e3779b97f4a7c15ull, b);
    StandardizedView pv;
    pv.n = n;
    pv.h = h;
    pv.matrix.resize(n * h);
    std::vector<Index> idx(n);
    for (Index j = 0; j < h; ++j) {
      std::iota(idx.begin(), idx.end(), Index{0});
      std::shuffle(idx.begin(), idx.end(), rng);
      for (Index i = 0; i < n; ++i) pv.matrix[i * h + j] = view.at(idx[i], j);
    }
    perms[b] = std::move(pv);
  }

  const Index g = grid.size();
  std::vector<double> data_obj(g);
  std::vector<std::vector<double>> perm_obj(g, std::vector<double>(permutations));
  auto log_obj = [](double v) { return std::log(std::max(v, 1e-12)); };
  parallel_for(g * (permutations + 1), [&](Index t) {
    Index gi = t / (permutations + 1);
    Index b = t % (permutations + 1);
    if (b == 0) {
      data_obj[gi] = sparse_kmeans(view, k, grid[gi], seed, 5).objective;
    } else {
      perm_obj[gi][b - 1] =
          sparse_kmeans(perms[b - 1], k, grid[gi], seed + 17 * b, 2).objective;
    }
  });

  choice.gap_scores.resize(g);
  choice.gap_se.resize(g);
  for (Index gi = 0; gi < g; ++gi) {
    double mean = 0;
    for (double v : perm_obj[gi]) mean += log_obj(v);
    mean /= static_cast<double>(permutations);
    double var = 0;
    for (double v : perm_obj[gi]) {
      double d = log_obj(v) - mean;
      var += d * d;
    }
    var /= static_cast<double>(permutations - 1);
    choice.gap_scores[gi] = log_obj(data_obj[gi]) - mean;
    choice.gap_se[gi] = std::sqrt(var * (1.0 + 1.0 / static_cast<double>(permutations)));
  }
  Index arg = 0;
  for (Index gi = 1; gi < g; ++gi)
    if (choice.gap_scores[gi] > choice.gap_scores[arg]) arg = gi;
  // Largest gap wins; ties resolve to the smallest (sparsest) candidate.
  choice.s = grid[arg];
  return choice;
}

namespace {

// Exact medoid search by enumerating all k-subsets in lexicographic order;
// strict improvement keeps the lowest-index set on ties.
std::vector<Index> pam_exact(const DissimMatrix& dm, Index k) {
  const Index n = dm.n;
  std::vector<Index> idx(k), best_set;
  std::iota(idx.begin(), idx.end(), Index{0});
  double best = kInf;
  for (;;) {
    double total = 0;
    for (Index i = 0; i < n; ++i) {
      double d = kInf;
      for (Index m : idx) d = std::min(d, dm.at(i, m));
      total += d;
    }
    if (total < best) {
      best = total;
      best_set = idx;
    }
    // advance to the next combination
    Index pos = k;
    while (pos > 0 && idx[pos - 1] == n - k + pos - 1) --pos;
    if (pos == 0) break;
    ++idx[pos - 1];
    for (Index j = pos; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  return best_set;
}

}  // namespace

ClusterResult pam(const DissimMatrix& dm, Index k, std::uint64_t) {
  const Index n = dm.n;
  if (k < 2 || k >= n) throw InvalidKError("pam: k must be in [2, n)");

  std::vector<Index> medoids;
  std::vector<double> nearest(n, kInf);

  // Tiny instances are solved exactly; greedy build plus swap local search
  // can stall in a local optimum that a brute-force sweep avoids.
  if (n <= 12) {
    medoids = pam_exact(dm, k);
    ClusterResult res;
    res.k = k;
    res.medoids = medoids;
    res.assign.assign(n, 0);
    res.objective = 0;
    for (Index i = 0; i < n; ++i) {
      Index best = 0;
      double best_d = dm.at(i, medoids[0]);
      for (Index m = 1; m < k; ++m) {
        double d = dm.at(i, medoids[m]);
        if (d < best_d) { best_d = d; best = m; }
      }
      res.assign[i] = best;
      res.objective += best_d;
    }
    res.converged = true;
    return res;
  }

  // BUILD: greedy seeding, each new medoid maximizes the objective decrease.
  {
    Index best = 0;
    double best_total = kInf;
    for (Index c = 0; c < n; ++c) {
      double total = 0;
      for (Index i = 0; i < n; ++i) total += dm.at(i, c);
      if (total < best_total) { best_total = total; best = c; }
    }
    medoids.push_back(best);
    for (Index i = 0; i < n; ++i) nearest[i] = dm.at(i, best);
  }
  while (medoids.size() < k) {
    Index best = n;
    double best_gain = -kInf;
    for (Index c = 0; c < n; ++c) {
      if (std::find(medoids.begin(), medoids.end(), c) != medoids.end()) continue;
      double gain = 0;
      for (Index i = 0; i < n; ++i)
        gain += std::max(0.0, nearest[i] - dm.at(i, c));
      if (gain > best_gain) { best_gain = gain; best = c; }
    }
    medoids.push_back(best);
    for (Index i = 0; i < n; ++i) nearest[i] = std::min(nearest[i], dm.at(i, best));
  }

  auto objective_for = [&](const std::vector<Index>& meds) {
    double total = 0;
    for (Index i = 0; i < n; ++i) {
      double d = kInf;
      for (Index m : meds) d = std::min(d, dm.at(i, m));
      total += d;
    }
    return total;
  };

  // SWAP: apply the best improving single swap per pass.
  double objective = objective_for(medoids);
  for (;;) {
    double best_obj = objective;
    Index best_m = n, best_c = n;
    for (Index mi = 0; mi < medoids.size(); ++mi) {
      for (Index c = 0; c < n; ++c) {
        if (std::find(medoids.begin(), medoids.end(), c) != medoids.end()) continue;
        std::vector<Index> trial = medoids;
        trial[mi] = c;
        double obj = objective_for(trial);
        if (obj < best_obj) { best_obj = obj; best_m = mi; best_c = c; }
      }
    }
    if (best_m == n) break;
    medoids[best_m] = best_c;
    objective = best_obj;
  }

  std::sort(medoids.begin(), medoids.end());
  ClusterResult res;
  res.k = k;
  res.medoids = medoids;
  res.objective = objective;
  res.assign.assign(n, 0);
  for (Index i = 0; i < n; ++i) {
    Index best = 0;
    double best_d = dm.at(i, medoids[0]);
    for (Index m = 1; m < k; ++m) {
      double d = dm.at(i, medoids[m]);
      if (d < best_d) { best_d = d; best = m; }
    }
    res.assign[i] = best;
  }
  res.converged = true;
  return res;
}

double default_gamma(const MixedDataset& ds) {
  // Balance the two halves of the objective: mean sample variance of the
  // continuous columns over the mean spread of the categorical columns,
  // where spread is one minus the modal level proportion.
  if (ds.h == 0) return 1.0;
  double vnum = 0;
  for (Index c = 0; c < ds.h; ++c) {
    double mean = 0;
    for (Index i = 0; i < ds.n; ++i) mean += ds.cont(i, c);
    mean /= static_cast<double>(ds.n);
    double ss = 0;
    for (Index i = 0; i < ds.n; ++i) {
      double d = ds.cont(i, c) - mean;
      ss += d * d;
    }
    vnum += ds.n > 1 ? ss / static_cast<double>(ds.n - 1) : 0.0;
  }
  vnum /= static_cast<double>(ds.h);
  const Index q = ds.n_categorical();
  if (q == 0) return vnum;
  double vcat = 0;
  Index cat_i = 0;
  for (const auto& m : ds.meta) {
    if (!m.is_categorical()) continue;
    std::vector<Index> counts(m.levels.size(), 0);
    for (Index i = 0; i < ds.n; ++i) ++counts[ds.cat(i, cat_i)];
    Index modal = 0;
    for (Index c : counts) modal = std::max(modal, c);
    vcat += 1.0 - static_cast<double>(modal) / static_cast<double>(ds.n);
    ++cat_i;
  }
  vcat /= static_cast<double>(q);
  return vcat > 0 ? vnum / vcat : vnum;
}

namespace {

struct Prototypes {
  std::vector<double> cont;         // k x h
  std::vector<Index> modes;         // k x q
};

double proto_dist(const MixedDataset& ds, Index i, const Prototypes& proto,
                  Index g, double gamma) {
  const Index h = ds.h, q = ds.n_categorical();
  double acc = 0;
  for (Index c = 0; c < h; ++c) {
    double d = ds.cont(i, c) - proto.cont[g * h + c];
    acc += d * d;
  }
  for (Index c = 0; c < q; ++c)
    if (ds.cat(i, c) != proto.modes[g * q + c]) acc += gamma;
  return acc;
}

ClusterResult kproto_run(const MixedDataset& ds, Index k, double gamma, Rng& rng) {
  const Index n = ds.n, h = ds.h, q = ds.n_categorical();
  Prototypes proto;
  proto.cont.assign(k * h, 0.0);
  proto.modes.assign(k * q, 0);

  // Seeding: k-means++ style under the prototype distance.
  std::vector<Index> seeds;
  std::uniform_int_distribution<Index> first(0, n - 1);
  seeds.push_back(first(rng));
  std::vector<double> d2(n);
  auto point_dist = [&](Index a, Index b) { return kprototypes_dissim(ds, a, b, gamma); };
  for (Index i = 0; i < n; ++i) d2[i] = point_dist(i, seeds[0]);
  while (seeds.size() < k) {
    double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    Index pick = first(rng);
    if (total > 0) {
      std::uniform_real_distribution<double> u(0.0, total);
      double target = u(rng);
      double acc = 0;
      for (Index i = 0; i < n; ++i) {
        acc += d2[i];
        if (acc >= target) { pick = i; break; }
      }
    }
    seeds.push_back(pick);
    for (Index i = 0; i < n; ++i) d2[i] = std::min(d2[i], point_dist(i, pick));
  }
  for (Index g = 0; g < k; ++g) {
    for (Index c = 0; c < h; ++c) proto.cont[g * h + c] = ds.cont(seeds[g], c);
    for (Index c = 0; c < q; ++c) proto.modes[g * q + c] = ds.cat(seeds[g], c);
  }

  ClusterResult res;
  res.k = k;
  res.assign.assign(n, 0);
  double prev = kInf;
  for (Index it = 0; it < 100; ++it) {
    res.objective = 0;
    for (Index i = 0; i < n; ++i) {
      Index best = 0;
      double best_d = proto_dist(ds, i, proto, 0, gamma);
      for (Index g = 1; g < k; ++g) {
        double d = proto_dist(ds, i, proto, g, gamma);
        if (d < best_d) { best_d = d; best = g; }
      }
      res.assign[i] = best;
      res.objective += best_d;
    }
    // Update: means for continuous, modes for categorical (ties to the
    // lowest level index). Empty clusters take over the worst-fit point.
    std::vector<Index> counts(k, 0);
    for (Index a : res.assign) ++counts[a];
    for (Index g = 0; g < k; ++g) {
      if (counts[g] == 0) {
        Index worst = 0;
        double worst_d = -1;
        for (Index i = 0; i < n; ++i) {
          if (counts[res.assign[i]] <= 1) continue;
          double d = proto_dist(ds, i, proto, res.assign[i], gamma);
          if (d > worst_d) { worst_d = d; worst = i; }
        }
        --counts[res.assign[worst]];
        res.assign[worst] = g;
        counts[g] = 1;
      }
    }
    std::fill(proto.cont.begin(), proto.cont.end(), 0.0);
    for (Index i = 0; i < n; ++i)
      for (Index c = 0; c < h; ++c)
        proto.cont[res.assign[i] * h + c] += ds.cont(i, c);
    for (Index g = 0; g < k; ++g)
      for (Index c = 0; c < h; ++c)
        proto.cont[g * h + c] /= static_cast<double>(counts[g]);
    Index cat_var = 0;
    for (Index j = 0; j < ds.p(); ++j) {
      if (!ds.meta[j].is_categorical()) continue;
      Index nl = ds.meta[j].levels.size();
      std::vector<Index> tally(k * nl, 0);
      for (Index i = 0; i < n; ++i)
        ++tally[res.assign[i] * nl + ds.cat(i, cat_var)];
      for (Index g = 0; g < k; ++g) {
        Index mode = 0;
        for (Index l = 1; l < nl; ++l)
          if (tally[g * nl + l] > tally[g * nl + mode]) mode = l;
        proto.modes[g * q + cat_var] = mode;
      }
      ++cat_var;
    }
    res.iterations = it + 1;
    if (prev < kInf && prev - res.objective <= 1e-8 * std::max(prev, 1e-30)) {
      res.converged = true;
      break;
    }
    prev = res.objective;
  }
  res.centers = proto.cont;
  return res;
}

}  // namespace

ClusterResult kprototypes(const MixedDataset& ds, Index k, double gamma,
                          std::uint64_t seed, Index restarts) {
  if (k < 2 || k > ds.n) throw InvalidKError("kprototypes: k must be in [2, n]");
  if (gamma < 0) throw Error("kprototypes: gamma must be >= 0");
  restarts = std::max<Index>(1, restarts);
  std::vector<ClusterResult> runs(restarts);
  parallel_for(restarts, [&](Index r) {
    Rng rng = task_rng(seed, r);
    runs[r] = kproto_run(ds, k, gamma, rng);
  });
  Index best = 0;
  for (Index r = 1; r < restarts; ++r)
    if (runs[r].objective < runs[best].objective) best = r;
  return runs[best];
}

std::string cluster_result_json(const ClusterResult& res) {
  nlohmann::json j;
  j["k"] = res.k;
  j["assign"] = res.assign;
  j["objective"] = res.objective;
  if (!res.centers.empty()) j["centers"] = res.centers;
  if (!res.medoids.empty()) j["medoids"] = res.medoids;
  if (!res.weights.empty()) j["weights"] = res.weights;
  j["iterations"] = res.iterations;
  j["converged"] = res.converged;
  return j.dump(2);
}

}  // namespace hydap

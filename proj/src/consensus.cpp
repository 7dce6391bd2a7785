#include "hydap/consensus.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "hydap/parallel.hpp"
#include "hydap/rng.hpp"

namespace hydap {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::vector<Index> average_linkage_cut(std::vector<double> condensed, Index n, Index k) {
  if (k < 1 || k > n) throw InvalidKError("average_linkage_cut: bad k");
  if (k == n) {
    std::vector<Index> assign(n);
    std::iota(assign.begin(), assign.end(), Index{0});
    return assign;
  }
  auto idx = [n](Index i, Index j) { return ConsensusMatrix::condensed_index(n, i, j); };

  std::vector<bool> active(n, true);
  std::vector<double> size(n, 1.0);
  struct Merge { Index a, b; double height; };
  std::vector<Merge> merges;
  merges.reserve(n - 1);
  std::vector<Index> chain;
  chain.reserve(n);
  Index remaining = n;

  while (remaining > 1) {
    if (chain.empty()) {
      for (Index i = 0; i < n; ++i)
        if (active[i]) { chain.push_back(i); break; }
    }
    for (;;) {
      Index top = chain.back();
      // Nearest active neighbor, lowest index on ties.
      Index nearest = n;
      double best = kInf;
      for (Index o = 0; o < n; ++o) {
        if (!active[o] || o == top) continue;
        double d = condensed[idx(top, o)];
        if (d < best) { best = d; nearest = o; }
      }
      if (chain.size() >= 2 && nearest != n &&
          (chain[chain.size() - 2] == nearest ||
           condensed[idx(top, chain[chain.size() - 2])] <= best)) {
        // Reciprocal pair found: merge top with the previous chain element.
        Index a = chain[chain.size() - 2], b = top;
        double height = condensed[idx(a, b)];
        chain.pop_back();
        chain.pop_back();
        if (a > b) std::swap(a, b);
        merges.push_back({a, b, height});
        // Lance-Williams average-linkage update into slot a.
        double sa = size[a], sb = size[b];
        for (Index o = 0; o < n; ++o) {
          if (!active[o] || o == a || o == b) continue;
          condensed[idx(a, o)] =
              (sa * condensed[idx(a, o)] + sb * condensed[idx(b, o)]) / (sa + sb);
        }
        size[a] = sa + sb;
        active[b] = false;
        --remaining;
        break;
      }
      chain.push_back(nearest);
    }
  }

  // Average linkage is reducible, so sorting merges by height yields a valid
  // dendrogram; applying the first n-k merges gives the k-cluster cut.
  std::stable_sort(merges.begin(), merges.end(),
                   [](const Merge& x, const Merge& y) { return x.height < y.height; });
  std::vector<Index> parent(n);
  std::iota(parent.begin(), parent.end(), Index{0});
  std::function<Index(Index)> find = [&](Index x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (Index m = 0; m + k < n + 0; ++m) {
    if (m >= merges.size()) break;
    Index ra = find(merges[m].a), rb = find(merges[m].b);
    if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
  }
  std::vector<Index> label(n, n);
  std::vector<Index> assign(n);
  Index next = 0;
  for (Index i = 0; i < n; ++i) {
    Index r = find(i);
    if (label[r] == n) label[r] = next++;
    assign[i] = label[r];
  }
  return assign;
}

std::pair<ConsensusMatrix, ClusterResult> consensus_run(const StandardizedView& view,
                                                        Index k, Index h_iters,
                                                        double frac,
                                                        std::uint64_t seed) {
  const Index n = view.n, h = view.h;
  if (k < 2) throw InvalidKError("consensus_run: k must be >= 2");
  if (!(frac > 0.0 && frac <= 1.0))
    throw InvalidFractionError("consensus_run: frac must be in (0, 1]");
  if (h_iters < 2) throw Error("consensus_run: h_iters must be >= 2");
  if (h_iters > 65535) throw Error("consensus_run: h_iters exceeds counter range");
  const Index m = std::min<Index>(n, static_cast<Index>(
                                         std::ceil(frac * static_cast<double>(n))));

  struct Run {
    std::vector<Index> subjects;
    std::vector<Index> labels;
  };
  std::vector<Run> runs(h_iters);
  parallel_for(h_iters, [&](Index it) {
    Rng rng = task_rng(seed, it);
    // Subsample without replacement via partial Fisher-Yates.
    std::vector<Index> pool(n);
    std::iota(pool.begin(), pool.end(), Index{0});
    for (Index i = 0; i < m; ++i) {
      std::uniform_int_distribution<Index> pick(i, n - 1);
      std::swap(pool[i], pool[pick(rng)]);
    }
    Run run;
    run.subjects.assign(pool.begin(), pool.begin() + m);
    std::sort(run.subjects.begin(), run.subjects.end());
    StandardizedView sub;
    sub.n = m;
    sub.h = h;
    sub.matrix.resize(m * h);
    for (Index i = 0; i < m; ++i)
      std::copy_n(&view.matrix[run.subjects[i] * h], h, &sub.matrix[i * h]);
    std::uniform_int_distribution<std::uint64_t> reseed;
    run.labels = kmeans(sub, k, reseed(rng), 2).assign;
    runs[it] = std::move(run);
  });

  ConsensusMatrix cm;
  cm.n = n;
  const Index pairs = n * (n - 1) / 2;
  cm.together.assign(pairs, 0);
  cm.same.assign(pairs, 0);
  for (const Run& run : runs) {
    for (Index a = 0; a < run.subjects.size(); ++a)
      for (Index b = a + 1; b < run.subjects.size(); ++b) {
        Index pi = ConsensusMatrix::condensed_index(n, run.subjects[a], run.subjects[b]);
        ++cm.together[pi];
        if (run.labels[a] == run.labels[b]) ++cm.same[pi];
      }
  }
  cm.values.resize(pairs);
  for (Index pi = 0; pi < pairs; ++pi) {
    if (cm.together[pi] == 0) {
      cm.values[pi] = 0.0;
      ++cm.unsampled_pairs;
    } else {
      cm.values[pi] = static_cast<double>(cm.same[pi]) /
                      static_cast<double>(cm.together[pi]);
    }
  }

  std::vector<double> dissim(pairs);
  for (Index pi = 0; pi < pairs; ++pi) dissim[pi] = 1.0 - cm.values[pi];
  ClusterResult final;
  final.k = k;
  final.assign = average_linkage_cut(std::move(dissim), n, k);
  final.converged = true;
  double obj = 0;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      if (final.assign[i] == final.assign[j]) obj += 1.0 - cm.at(i, j);
  final.objective = obj;
  return {std::move(cm), std::move(final)};
}

std::vector<double> cluster_consensus(const ConsensusMatrix& cm,
                                      const std::vector<Index>& assign) {
  if (assign.size() != cm.n) throw LengthMismatchError("cluster_consensus: length mismatch");
  Index k = assign.empty() ? 0 : *std::max_element(assign.begin(), assign.end()) + 1;
  std::vector<double> sum(k, 0.0), count(k, 0.0);
  for (Index i = 0; i < cm.n; ++i)
    for (Index j = i + 1; j < cm.n; ++j)
      if (assign[i] == assign[j]) {
        sum[assign[i]] += cm.at(i, j);
        count[assign[i]] += 1.0;
      }
  std::vector<double> out(k, 1.0);  // singleton clusters score 1
  for (Index g = 0; g < k; ++g)
    if (count[g] > 0) out[g] = sum[g] / count[g];
  return out;
}

ConsensusReport select_k(const StandardizedView& view, Index k_max, Index h_iters,
                         double frac, std::uint64_t seed, double stability_threshold) {
  if (k_max < 2) throw InvalidKError("select_k: k_max must be >= 2");
  ConsensusReport report;
  std::vector<ClusterResult> finals;
  for (Index k = 2; k <= k_max; ++k) {
    auto [cm, final] = consensus_run(view, k, h_iters, frac, seed + k);
    ConsensusKSummary s;
    s.k = k;
    s.cluster_consensus = cluster_consensus(cm, final.assign);
    s.mean_cc = std::accumulate(s.cluster_consensus.begin(),
                                s.cluster_consensus.end(), 0.0) /
                static_cast<double>(s.cluster_consensus.size());
    s.min_cc = *std::min_element(s.cluster_consensus.begin(),
                                 s.cluster_consensus.end());
    s.unsampled_pairs = cm.unsampled_pairs;
    report.per_k.push_back(std::move(s));
    finals.push_back(std::move(final));
  }
  Index best = report.per_k.size();
  for (Index i = 0; i < report.per_k.size(); ++i) {
    if (report.per_k[i].min_cc < stability_threshold) continue;
    if (best == report.per_k.size() ||
        report.per_k[i].mean_cc > report.per_k[best].mean_cc)
      best = i;
  }
  if (best == report.per_k.size()) {
    report.chosen_k = 1;
    report.homogeneous = true;
  } else {
    report.chosen_k = report.per_k[best].k;
    report.final = finals[best];
  }
  return report;
}

}  // namespace hydap

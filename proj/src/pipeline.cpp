#include "hydap/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace hydap {

namespace {

// Fraction of continuous variable pairs whose Pearson correlation exceeds
// `threshold` in absolute value. A 2-way split of a single elongated blob
// leaves no correlation trace within the halves, so the check has to look
// at the marginal correlations.
double correlated_pair_fraction(const MixedDataset& ds, double threshold) {
  const Index h = ds.h, n = ds.n;
  if (h < 2 || n < 3) return 0.0;
  std::vector<double> mean(h, 0.0);
  for (Index i = 0; i < n; ++i)
    for (Index c = 0; c < h; ++c) mean[c] += ds.cont(i, c);
  for (Index c = 0; c < h; ++c) mean[c] /= static_cast<double>(n);
  std::vector<double> cov(h * h, 0.0);
  for (Index i = 0; i < n; ++i) {
    for (Index a = 0; a < h; ++a) {
      double da = ds.cont(i, a) - mean[a];
      for (Index b = a; b < h; ++b)
        cov[a * h + b] += da * (ds.cont(i, b) - mean[b]);
    }
  }
  Index pairs = 0, strong = 0;
  for (Index a = 0; a < h; ++a) {
    for (Index b = a + 1; b < h; ++b) {
      double va = cov[a * h + a], vb = cov[b * h + b];
      if (va <= 0 || vb <= 0) continue;
      ++pairs;
      double r = cov[a * h + b] / std::sqrt(va * vb);
      if (std::abs(r) > threshold) ++strong;
    }
  }
  if (pairs == 0) return 0.0;
  return static_cast<double>(strong) / static_cast<double>(pairs);
}

double safe_cramers_v(const std::vector<Index>& a, const std::vector<Index>& b,
                      bool& degenerate) {
  degenerate = false;
  try {
    return cramers_v(a, b);
  } catch (const DegenerateTableError&) {
    degenerate = true;
    return 0.0;
  }
}

std::vector<Index> cat_column(const MixedDataset& ds, Index col) {
  std::vector<Index> out(ds.n);
  for (Index i = 0; i < ds.n; ++i) out[i] = ds.cat(i, col);
  return out;
}

// Weights + labels of the sparse K-means fit used for variable selection.
ClusterResult weighted_fit(const StandardizedView& view, Index k,
                           const PipelineConfig& cfg, std::uint64_t seed) {
  if (view.h == 1) {
    ClusterResult res = kmeans(view, k, seed);
    res.weights = {1.0};
    return res;
  }
  SparsityChoice sc = choose_sparsity(view, k, default_sparsity_grid(view.h),
                                      cfg.gap_permutations, seed);
  return sparse_kmeans(view, k, sc.s, seed + 1);
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(3);
  os << x;
  return os.str();
}

void screen_categorical(const MixedDataset& ds, const std::vector<Index>& labels,
                        StructureReport& report, const PipelineConfig& cfg) {
  Index col = 0;
  for (const auto& m : ds.meta) {
    if (!m.is_categorical()) continue;
    bool degenerate = false;
    double v = safe_cramers_v(labels, cat_column(ds, col), degenerate);
    report.screen_v.push_back(degenerate ? -1.0 : v);
    if (!degenerate && v >= cfg.v_cutoff) {
      report.kept_categorical.push_back(m.name);
      report.kept_v.push_back(v);
    } else if (degenerate) {
      report.dropped.push_back({m.name, "constant variable"});
    } else {
      report.dropped.push_back({m.name, "Cramer's V " + fmt(v) + " below cutoff"});
    }
    ++col;
  }
}

}  // namespace

StructureReport identify_structure(const MixedDataset& ds, const PipelineConfig& cfg) {
  ds.validate();
  StructureReport report;
  if (ds.h == 0) {
    report.structure = 3;
    return report;
  }
  StandardizedView view = standardize(ds);
  OpticsParams params = OpticsParams::defaults(ds.n);
  if (cfg.min_pts > 0) params.min_pts = cfg.min_pts;
  ReachabilityProfile profile = optics(view, params);
  report.troughs = detect_troughs(profile, cfg.xi, cfg.min_cluster_frac);
  report.trough_count = report.troughs.trough_count;
  if (report.trough_count >= 2) {
    report.structure = 1;
    report.k = report.trough_count;
    return report;
  }
  report.consensus = select_k(view, cfg.k_max, cfg.consensus_h_iters,
                              cfg.consensus_frac, cfg.seed + 11,
                              cfg.stability_threshold);
  report.consensus_ran = true;
  report.consensus_k = report.consensus.chosen_k;
  if (report.consensus.homogeneous) {
    report.structure = 3;
    return report;
  }
  report.structure = 2;
  report.k = report.consensus_k;
  if (report.consensus_k == 2) {
    double frac = correlated_pair_fraction(ds, cfg.corr_threshold);
    if (frac > cfg.corr_frac) {
      report.warnings.push_back(
          "two-cluster split with " + fmt(100 * frac) +
          "% of continuous pairs correlated above " + fmt(cfg.corr_threshold) +
          "; split is likely a correlation artifact, treating as homogeneous");
      report.structure = 3;
      report.k = 0;
    }
  }
  return report;
}

void select_variables(const MixedDataset& ds, StructureReport& report,
                      const PipelineConfig& cfg) {
  report.kept_continuous.clear();
  report.kept_weights.clear();
  report.kept_categorical.clear();
  report.kept_v.clear();
  report.dropped.clear();
  report.all_weights.clear();
  report.screen_v.clear();

  std::vector<std::string> cont_names;
  for (const auto& m : ds.meta)
    if (!m.is_categorical()) cont_names.push_back(m.name);

  if (report.structure == 1) {
    StandardizedView view = standardize(ds);
    ClusterResult fit = weighted_fit(view, report.k, cfg, cfg.seed + 13);
    report.all_weights = fit.weights;
    for (Index c = 0; c < ds.h; ++c) {
      if (fit.weights[c] >= cfg.weight_threshold) {
        report.kept_continuous.push_back(cont_names[c]);
        report.kept_weights.push_back(fit.weights[c]);
      } else {
        report.dropped.push_back(
            {cont_names[c], "sparse weight " + fmt(fit.weights[c]) + " below threshold"});
      }
    }
    if (cfg.bootstrap_reps > 0 && ds.h >= 2) {
      report.bcss = bootstrap_bcss_screen(view, report.k, cfg.bootstrap_reps,
                                          cfg.seed + 17);
      report.bcss_ran = true;
      for (Index j = 0; j < report.bcss.names.size(); ++j) {
        const std::string& name = report.bcss.names[j];
        bool kept_by_weight =
            std::find(report.kept_continuous.begin(), report.kept_continuous.end(),
                      name) != report.kept_continuous.end();
        if (kept_by_weight != report.bcss.kept[j])
          report.warnings.push_back(
              "bootstrap BCSS screen disagrees with sparse weights on " + name +
              " (screen says " + (report.bcss.kept[j] ? "keep" : "drop") + ")");
      }
    }
    screen_categorical(ds, fit.assign, report, cfg);
  } else if (report.structure == 2) {
    for (Index c = 0; c < ds.h; ++c)
      report.kept_continuous.push_back(cont_names[c]);
    screen_categorical(ds, report.consensus.final.assign, report, cfg);
  } else {
    for (Index c = 0; c < ds.h; ++c)
      report.dropped.push_back({cont_names[c], "continuous block is homogeneous"});
    // pairwise association among categoricals; keep anything in a strong pair
    std::vector<std::string> cat_names;
    std::vector<std::vector<Index>> cols;
    Index col = 0;
    for (const auto& m : ds.meta) {
      if (!m.is_categorical()) continue;
      cat_names.push_back(m.name);
      cols.push_back(cat_column(ds, col));
      ++col;
    }
    const Index q = cat_names.size();
    std::vector<double> best(q, 0.0);
    for (Index a = 0; a < q; ++a) {
      for (Index b = a + 1; b < q; ++b) {
        bool degenerate = false;
        double v = safe_cramers_v(cols[a], cols[b], degenerate);
        if (degenerate) continue;
        best[a] = std::max(best[a], v);
        best[b] = std::max(best[b], v);
      }
    }
    for (Index a = 0; a < q; ++a) {
      report.screen_v.push_back(best[a]);
      if (best[a] >= cfg.v_cutoff) {
        report.kept_categorical.push_back(cat_names[a]);
        report.kept_v.push_back(best[a]);
      } else {
        report.dropped.push_back(
            {cat_names[a], "no pairwise Cramer's V above cutoff (best " +
                               fmt(best[a]) + ")"});
      }
    }
  }
  if (report.kept_continuous.empty() && report.kept_categorical.empty())
    throw NothingSelectedError("select_variables: every variable was dropped");
}

HydapResult cluster_step2(const MixedDataset& ds, const StructureReport& report,
                          const PipelineConfig& cfg) {
  HydapResult res;
  res.report = report;
  std::vector<std::string> keep = report.kept_continuous;
  keep.insert(keep.end(), report.kept_categorical.begin(),
              report.kept_categorical.end());
  if (keep.empty())
    throw NothingSelectedError("cluster_step2: empty selection");
  MixedDataset sub = split_by_selection(ds, keep);

  const bool has_cont = !report.kept_continuous.empty();
  const bool has_cat = !report.kept_categorical.empty();

  if (has_cont && !has_cat && report.structure == 2) {
    // selection equals the continuous block the consensus run already labeled
    res.clustering = report.consensus.final;
    res.method_used = "consensus-kmeans";
  } else if (has_cont && !has_cat) {
    StandardizedView view = standardize(sub);
    res.clustering = weighted_fit(view, report.k, cfg, cfg.seed + 19);
    res.method_used = "sparse-kmeans";
  } else {
    DissimMatrix dm = hydap_dissim_matrix(sub);
    Index k = report.k;
    if (k == 0) {
      Index hi = std::min<Index>(cfg.k_max, ds.n - 1);
      if (hi < 2) throw InvalidKError("cluster_step2: too few subjects for elbow");
      std::vector<ClusterResult> fits;
      for (Index kk = 2; kk <= hi; ++kk) {
        fits.push_back(pam(dm, kk));
        res.elbow_ks.push_back(kk);
        res.elbow_objective.push_back(fits.back().objective);
      }
      k = elbow(res.elbow_ks, res.elbow_objective);
      res.clustering = fits[k - 2];
    } else {
      res.clustering = pam(dm, k);
    }
    res.method_used = "pam-hydap";
  }
  res.k = res.clustering.k;
  res.assign = res.clustering.assign;
  return res;
}

HydapResult run_hydap(const MixedDataset& ds, const PipelineConfig& cfg) {
  StructureReport report = identify_structure(ds, cfg);
  const bool cautioned =
      report.structure == 3 && report.consensus_k == 2 && !report.warnings.empty();
  select_variables(ds, report, cfg);
  HydapResult res = cluster_step2(ds, report, cfg);
  if (cautioned && ds.h > 0 && res.k >= 2) {
    // The caution demoted a suspicious two-way split, so the clusters above
    // come from the categorical variables alone. If the continuous block
    // separates cleanly across those clusters it was never homogeneous;
    // redo the run as partitioned at the cluster count found here.
    StandardizedView view = standardize(ds);
    SumOfSquares ss = wcss_bcss(view, res.assign);
    double ratio = ss.total_bcss / (ss.total_bcss + ss.total_wcss);
    if (ratio >= cfg.upgrade_bcss) {
      StructureReport second = res.report;
      second.structure = 2;
      second.k = res.k;
      second.consensus.final = res.clustering;  // labels drive the cat screen
      second.warnings.push_back(
          "continuous variables explain " + fmt(100 * ratio) +
          "% of their variance across the clusters found on categorical "
          "variables; treating the data as partitioned with k=" +
          std::to_string(res.k));
      select_variables(ds, second, cfg);
      res = cluster_step2(ds, second, cfg);
    }
  }
  return res;
}

std::string hydap_result_json(const HydapResult& res) {
  nlohmann::json j;
  const StructureReport& r = res.report;
  j["structure"] = r.structure;
  j["trough_count"] = r.trough_count;
  j["consensus_k"] = r.consensus_k;
  j["k"] = res.k;
  j["method_used"] = res.method_used;
  j["kept_continuous"] = r.kept_continuous;
  j["kept_weights"] = r.kept_weights;
  j["kept_categorical"] = r.kept_categorical;
  j["kept_cramers_v"] = r.kept_v;
  nlohmann::json dropped = nlohmann::json::array();
  for (const auto& d : r.dropped)
    dropped.push_back({{"name", d.name}, {"reason", d.reason}});
  j["dropped"] = dropped;
  j["warnings"] = r.warnings;
  j["assign"] = res.assign;
  j["objective"] = res.clustering.objective;
  if (!res.elbow_ks.empty()) {
    j["elbow"]["k"] = res.elbow_ks;
    j["elbow"]["objective"] = res.elbow_objective;
  }
  if (r.consensus_ran) {
    nlohmann::json per_k = nlohmann::json::array();
    for (const auto& s : r.consensus.per_k)
      per_k.push_back({{"k", s.k},
                       {"cluster_consensus", s.cluster_consensus},
                       {"mean", s.mean_cc},
                       {"min", s.min_cc}});
    j["consensus"]["per_k"] = per_k;
    j["consensus"]["chosen_k"] = r.consensus.chosen_k;
    j["consensus"]["homogeneous"] = r.consensus.homogeneous;
  }
  return j.dump(2);
}

void write_assignments_csv(const std::vector<Index>& assign,
                           const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << "subject_id,cluster\n";
  for (Index i = 0; i < assign.size(); ++i)
    out << i << "," << assign[i] + 1 << "\n";
}

}  // namespace hydap

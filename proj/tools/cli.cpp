#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hydap/dataset.hpp"
#include "hydap/density.hpp"
#include "hydap/dissimilarity.hpp"
#include "hydap/methods.hpp"
#include "hydap/metrics.hpp"
#include "hydap/mixture.hpp"
#include "hydap/parallel.hpp"
#include "hydap/partition.hpp"
#include "hydap/pipeline.hpp"
#include "hydap/simgen.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Global {
  std::uint64_t seed = 0;
  int threads = 0;
  std::string out = ".";
};

std::string out_path(const Global& g, const std::string& name) {
  return (fs::path(g.out) / name).string();
}

void ensure_outdir(const Global& g) {
  std::error_code ec;
  fs::create_directories(g.out, ec);
  if (ec) throw hydap::IoError("cannot create output directory " + g.out);
}

void require_file(const std::string& path, const std::string& what) {
  if (path.empty()) throw hydap::UsageError("missing " + what + " path");
  if (!fs::exists(path)) throw hydap::UsageError(what + " file not found: " + path);
}

hydap::MixedDataset load_input(const std::string& input, const std::string& schema) {
  require_file(schema, "schema");
  require_file(input, "input");
  return hydap::load_csv(input, hydap::load_schema(schema));
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw hydap::IoError("cannot write " + path);
  out << text;
}

// Minimal static SVG bar plot (values in drawing order; infinite values are
// drawn at 1.05x the finite maximum).
std::string svg_bars(const std::vector<double>& values, const std::string& title) {
  const double w = 900, h = 300, pad = 30;
  double mx = 0;
  for (double v : values)
    if (std::isfinite(v)) mx = std::max(mx, v);
  if (mx <= 0) mx = 1;
  double cap = mx * 1.05;
  std::ostringstream os;
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='"
     << h << "'>\n<text x='10' y='18'>" << title << "</text>\n";
  double bw = (w - 2 * pad) / std::max<std::size_t>(1, values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    double v = std::isfinite(values[i]) ? values[i] : cap;
    double bh = (h - 2 * pad) * v / cap;
    os << "<rect x='" << pad + bw * i << "' y='" << h - pad - bh << "' width='"
       << std::max(0.5, bw - 0.5) << "' height='" << bh << "' fill='"
       << (std::isfinite(values[i]) ? "#4878a8" : "#c04040") << "'/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string svg_line(const std::vector<hydap::Index>& xs,
                     const std::vector<double>& ys, const std::string& title) {
  const double w = 600, h = 300, pad = 40;
  double ymin = ys.empty() ? 0 : ys[0], ymax = ymin;
  for (double y : ys) {
    ymin = std::min(ymin, y);
    ymax = std::max(ymax, y);
  }
  if (ymax <= ymin) ymax = ymin + 1;
  std::ostringstream os;
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='"
     << h << "'>\n<text x='10' y='18'>" << title << "</text>\n<polyline fill='none' "
     << "stroke='#4878a8' stroke-width='2' points='";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double px = pad + (w - 2 * pad) * static_cast<double>(i) /
                          std::max<std::size_t>(1, xs.size() - 1);
    double py = h - pad - (h - 2 * pad) * (ys[i] - ymin) / (ymax - ymin);
    os << px << "," << py << " ";
  }
  os << "'/>\n";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double px = pad + (w - 2 * pad) * static_cast<double>(i) /
                          std::max<std::size_t>(1, xs.size() - 1);
    os << "<text x='" << px - 4 << "' y='" << h - pad + 16 << "'>" << xs[i]
       << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void write_consensus_csv(const hydap::ConsensusReport& rep, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw hydap::IoError("cannot write " + path);
  out << "k,mean_cluster_consensus,min_cluster_consensus\n";
  for (const auto& s : rep.per_k)
    out << s.k << "," << s.mean_cc << "," << s.min_cc << "\n";
}

int cmd_simulate(const Global& g, const std::string& setting_name,
                 hydap::Index replicates, bool correlated, double rho) {
  ensure_outdir(g);
  hydap::SimSetting setting = hydap::sim_setting_from_string(setting_name);
  hydap::write_schema(hydap::sim_schema(setting), out_path(g, "schema.json"));
  for (hydap::Index r = 0; r < replicates; ++r) {
    hydap::SimSpec spec;
    spec.setting = setting;
    spec.correlated = correlated;
    spec.rho = rho;
    spec.seed = hydap::mix_seed(g.seed, r);
    hydap::LabeledDataset data = hydap::generate(spec);
    std::string tag = setting_name + "_rep" + std::to_string(r);
    hydap::write_csv(data.dataset, out_path(g, tag + ".csv"));
    hydap::write_truth_csv(data.truth, out_path(g, tag + "_truth.csv"));
  }
  json meta;
  meta["setting"] = setting_name;
  meta["replicates"] = replicates;
  meta["correlated"] = correlated;
  meta["rho"] = correlated ? rho : 0.0;
  meta["seed"] = g.seed;
  meta["informative"] = hydap::sim_informative(setting);
  write_text(out_path(g, "metadata.json"), meta.dump(2) + "\n");
  return 0;
}

int cmd_cluster(const Global& g, const std::string& input, const std::string& schema,
                const std::string& algorithm, hydap::Index k,
                const hydap::PipelineConfig& cfg_in, double gamma) {
  ensure_outdir(g);
  hydap::MixedDataset ds = load_input(input, schema);
  hydap::PipelineConfig cfg = cfg_in;
  cfg.seed = g.seed;
  hydap::Method method = hydap::method_from_string(algorithm);

  if (method == hydap::Method::hydap) {
    hydap::HydapResult res = hydap::run_hydap(ds, cfg);
    write_text(out_path(g, "report.json"), hydap::hydap_result_json(res) + "\n");
    hydap::write_assignments_csv(res.assign, out_path(g, "assignments.csv"));
    if (ds.h > 0) {
      hydap::OpticsParams params = hydap::OpticsParams::defaults(ds.n);
      if (cfg.min_pts > 0) params.min_pts = cfg.min_pts;
      hydap::ReachabilityProfile prof = hydap::optics(hydap::standardize(ds), params);
      hydap::export_reachability(prof, out_path(g, "reachability.csv"));
      write_text(out_path(g, "reachability.svg"),
                 svg_bars(prof.reach, "reachability (processing order)"));
    }
    if (res.report.consensus_ran)
      write_consensus_csv(res.report.consensus, out_path(g, "consensus.csv"));
    if (res.report.bcss_ran)
      hydap::write_bcss_screen_csv(res.report.bcss, out_path(g, "bcss.csv"));
    if (!res.elbow_ks.empty())
      write_text(out_path(g, "elbow.svg"),
                 svg_line(res.elbow_ks, res.elbow_objective,
                          "within-cluster dissimilarity vs k"));
    return 0;
  }

  // comparator path
  std::vector<hydap::Index> assign;
  json rep;
  rep["method"] = algorithm;
  rep["k"] = k;
  switch (method) {
    case hydap::Method::pam_gower:
    case hydap::Method::pam_famd: {
      hydap::Measure ms = method == hydap::Method::pam_gower
                              ? hydap::Measure::gower
                              : hydap::Measure::famd;
      const hydap::MixedDataset& base = method == hydap::Method::pam_famd
                                            ? hydap::standardized_copy(ds)
                                            : ds;
      hydap::ClusterResult res = hydap::pam(hydap::pairwise_matrix(base, ms), k, g.seed);
      assign = res.assign;
      rep["objective"] = res.objective;
      rep["medoids"] = res.medoids;
      break;
    }
    case hydap::Method::kproto: {
      double gm = gamma > 0 ? gamma : hydap::default_gamma(ds);
      hydap::ClusterResult res = hydap::kprototypes(ds, k, gm, g.seed);
      assign = res.assign;
      rep["objective"] = res.objective;
      rep["gamma"] = gm;
      break;
    }
    default: {
      hydap::FmmModel model = hydap::fmm_fit(ds, k, g.seed);
      assign = hydap::fmm_posterior(model, ds).hard;
      rep["loglik"] = model.loglik;
      rep["bic"] = model.bic;
      break;
    }
  }
  rep["assign"] = assign;
  write_text(out_path(g, "report.json"), rep.dump(2) + "\n");
  hydap::write_assignments_csv(assign, out_path(g, "assignments.csv"));
  return 0;
}

int cmd_structure(const Global& g, const std::string& input,
                  const std::string& schema, const hydap::PipelineConfig& cfg_in) {
  ensure_outdir(g);
  hydap::MixedDataset ds = load_input(input, schema);
  hydap::PipelineConfig cfg = cfg_in;
  cfg.seed = g.seed;
  hydap::StructureReport rep = hydap::identify_structure(ds, cfg);
  hydap::select_variables(ds, rep, cfg);
  json j;
  j["structure"] = rep.structure;
  j["trough_count"] = rep.trough_count;
  j["consensus_k"] = rep.consensus_k;
  j["k"] = rep.k;
  j["kept_continuous"] = rep.kept_continuous;
  j["kept_weights"] = rep.kept_weights;
  j["kept_categorical"] = rep.kept_categorical;
  j["kept_cramers_v"] = rep.kept_v;
  json dropped = json::array();
  for (const auto& d : rep.dropped)
    dropped.push_back({{"name", d.name}, {"reason", d.reason}});
  j["dropped"] = dropped;
  j["warnings"] = rep.warnings;
  write_text(out_path(g, "structure.json"), j.dump(2) + "\n");
  return 0;
}

int cmd_optics(const Global& g, const std::string& input, const std::string& schema,
               hydap::Index min_pts, double xi, double min_cluster_frac) {
  ensure_outdir(g);
  hydap::MixedDataset ds = load_input(input, schema);
  if (ds.h == 0)
    throw hydap::NoContinuousError("optics: dataset has no continuous variables");
  hydap::OpticsParams params = hydap::OpticsParams::defaults(ds.n);
  if (min_pts > 0) params.min_pts = min_pts;
  hydap::ReachabilityProfile prof = hydap::optics(hydap::standardize(ds), params);
  hydap::export_reachability(prof, out_path(g, "reachability.csv"));
  write_text(out_path(g, "reachability.svg"),
             svg_bars(prof.reach, "reachability (processing order)"));
  hydap::TroughReport troughs = hydap::detect_troughs(prof, xi, min_cluster_frac);
  write_text(out_path(g, "troughs.json"), hydap::trough_report_json(troughs) + "\n");
  return 0;
}

int cmd_dissim(const Global& g, const std::string& input, const std::string& schema,
               const std::string& measure, const std::string& format) {
  ensure_outdir(g);
  hydap::MixedDataset ds = load_input(input, schema);
  hydap::DissimMatrix dm =
      hydap::pairwise_matrix(ds, hydap::measure_from_string(measure));
  if (format == "csv")
    hydap::write_dissim_csv(dm, out_path(g, "dissim.csv"));
  else if (format == "bin")
    hydap::write_dissim_binary(dm, out_path(g, "dissim.bin"));
  else
    throw hydap::UsageError("unknown format '" + format + "' (csv|bin)");
  return 0;
}

int cmd_benchmark(const Global& g, std::vector<std::string> settings,
                  std::vector<std::string> methods, hydap::Index replicates,
                  bool correlated, double rho) {
  ensure_outdir(g);
  if (settings.empty())
    settings = {"sim1a", "sim1b", "sim2a", "sim2b", "sim3"};
  if (methods.empty())
    for (hydap::Method m : hydap::all_methods())
      methods.push_back(hydap::method_to_string(m));

  json table = json::array();
  std::ostringstream txt;
  txt << "setting";
  for (const auto& m : methods) txt << "\t" << m;
  txt << "\n";
  for (std::size_t si = 0; si < settings.size(); ++si) {
    hydap::SimSetting setting = hydap::sim_setting_from_string(settings[si]);
    std::vector<std::vector<double>> aris(methods.size());
    for (hydap::Index r = 0; r < replicates; ++r) {
      hydap::SimSpec spec;
      spec.setting = setting;
      spec.correlated = correlated;
      spec.rho = rho;
      spec.seed = hydap::mix_seed(g.seed, si * 100003 + r);
      hydap::LabeledDataset data = hydap::generate(spec);
      for (std::size_t mi = 0; mi < methods.size(); ++mi) {
        std::vector<hydap::Index> assign =
            hydap::fit_method(data.dataset, hydap::method_from_string(methods[mi]),
                              3, spec.seed + 1, nullptr);
        aris[mi].push_back(hydap::ari(data.truth, assign));
      }
    }
    txt << settings[si];
    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
      double med = hydap::median_of(aris[mi]);
      double lo = hydap::percentile(aris[mi], 2.5);
      double hi = hydap::percentile(aris[mi], 97.5);
      json cell;
      cell["setting"] = settings[si];
      cell["method"] = methods[mi];
      cell["median"] = med;
      cell["p2.5"] = lo;
      cell["p97.5"] = hi;
      cell["ari"] = aris[mi];
      table.push_back(cell);
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.2f (%.2f, %.2f)", med, lo, hi);
      txt << "\t" << buf;
    }
    txt << "\n";
  }
  json out;
  out["replicates"] = replicates;
  out["correlated"] = correlated;
  out["rho"] = correlated ? rho : 0.0;
  out["seed"] = g.seed;
  out["cells"] = table;
  write_text(out_path(g, "benchmark.json"), out.dump(2) + "\n");
  write_text(out_path(g, "benchmark.txt"), txt.str());
  std::cout << txt.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-step mixed-type clustering toolkit"};
  app.set_config("--config", "", "Read options from an INI file");

  Global g;
  app.add_option("--seed", g.seed, "Master RNG seed")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads (0 = runtime default)")
      ->capture_default_str();
  app.add_option("--out", g.out, "Output directory")->capture_default_str();

  hydap::PipelineConfig cfg;
  std::string input, schema;
  std::string algorithm = "hydap", measure = "hydap", format = "csv";
  std::string setting = "sim1a";
  hydap::Index k = 3, replicates = 1, min_pts = 0;
  bool correlated = false;
  double rho = 0.4, gamma = 0;
  std::vector<std::string> settings, methods;
  bool print_config = false;
  app.add_flag("--print-config", print_config, "Print effective defaults and exit");

  auto add_pipeline_opts = [&](CLI::App* c) {
    c->add_option("--xi", cfg.xi, "Steepness for trough detection")
        ->capture_default_str();
    c->add_option("--min-cluster-frac", cfg.min_cluster_frac,
                  "Minimum trough size as a fraction of n")
        ->capture_default_str();
    c->add_option("--min-pts", cfg.min_pts, "Density neighborhood size (0 = auto)")
        ->capture_default_str();
    c->add_option("--k-max", cfg.k_max, "Largest cluster count considered")
        ->capture_default_str();
    c->add_option("--h-iters", cfg.consensus_h_iters, "Consensus resampling runs")
        ->capture_default_str();
    c->add_option("--consensus-frac", cfg.consensus_frac,
                  "Consensus subsample fraction")
        ->capture_default_str();
    c->add_option("--stability-threshold", cfg.stability_threshold,
                  "Minimum per-cluster consensus")
        ->capture_default_str();
    c->add_option("--weight-threshold", cfg.weight_threshold,
                  "Sparse weight cutoff for keeping a continuous variable")
        ->capture_default_str();
    c->add_option("--v-cutoff", cfg.v_cutoff, "Cramer's V cutoff")
        ->capture_default_str();
    c->add_option("--bootstrap-reps", cfg.bootstrap_reps,
                  "Bootstrap replicates for the BCSS screen (0 = off)")
        ->capture_default_str();
  };

  CLI::App* c_cluster = app.add_subcommand("cluster", "Cluster a dataset")->fallthrough();
  c_cluster->add_option("--input", input, "Data CSV");
  c_cluster->add_option("--schema", schema, "Schema JSON");
  c_cluster->add_option("--algorithm", algorithm,
                        "hydap|pam-gower|pam-famd|kproto|fmm")
      ->capture_default_str();
  c_cluster->add_option("--k", k, "Cluster count for comparator algorithms")
      ->capture_default_str();
  c_cluster->add_option("--gamma", gamma, "kproto mixing weight (0 = auto)")
      ->capture_default_str();
  add_pipeline_opts(c_cluster);

  CLI::App* c_sim = app.add_subcommand("simulate", "Generate benchmark datasets")->fallthrough();
  c_sim->add_option("--setting", setting, "sim1a|sim1b|sim2a|sim2b|sim3")
      ->capture_default_str();
  c_sim->add_option("--replicates", replicates, "Replicate count")
      ->capture_default_str();
  c_sim->add_flag("--correlated", correlated,
                  "Correlate continuous variables within clusters");
  c_sim->add_option("--rho", rho, "Within-cluster correlation")
      ->capture_default_str();

  CLI::App* c_bench = app.add_subcommand("benchmark", "Score methods on settings")->fallthrough();
  c_bench->add_option("--settings", settings, "Settings (default: all)");
  c_bench->add_option("--methods", methods, "Methods (default: all)");
  c_bench->add_option("--replicates", replicates, "Replicates per setting")
      ->capture_default_str();
  c_bench->add_flag("--correlated", correlated, "Correlated variant");
  c_bench->add_option("--rho", rho, "Within-cluster correlation")
      ->capture_default_str();

  CLI::App* c_optics = app.add_subcommand("optics", "Reachability analysis")->fallthrough();
  c_optics->add_option("--input", input, "Data CSV");
  c_optics->add_option("--schema", schema, "Schema JSON");
  c_optics->add_option("--min-pts", min_pts, "Neighborhood size (0 = auto)")
      ->capture_default_str();
  c_optics->add_option("--xi", cfg.xi, "Steepness")->capture_default_str();
  c_optics->add_option("--min-cluster-frac", cfg.min_cluster_frac,
                       "Minimum trough size fraction")
      ->capture_default_str();

  CLI::App* c_dissim = app.add_subcommand("dissim", "Pairwise dissimilarity matrix")->fallthrough();
  c_dissim->add_option("--input", input, "Data CSV");
  c_dissim->add_option("--schema", schema, "Schema JSON");
  c_dissim->add_option("--measure", measure,
                       "hydap|gower|famd|euclidean|manhattan")
      ->capture_default_str();
  c_dissim->add_option("--format", format, "csv|bin")->capture_default_str();

  CLI::App* c_struct = app.add_subcommand("structure", "Structure identification only")->fallthrough();
  c_struct->add_option("--input", input, "Data CSV");
  c_struct->add_option("--schema", schema, "Schema JSON");
  add_pipeline_opts(c_struct);

  CLI11_PARSE(app, argc, argv);

  if (print_config) {
    std::cout << app.config_to_str(true, true);
    return 0;
  }

  try {
    hydap::set_thread_count(g.threads);
    if (c_cluster->parsed())
      return cmd_cluster(g, input, schema, algorithm, k, cfg, gamma);
    if (c_sim->parsed())
      return cmd_simulate(g, setting, replicates, correlated, rho);
    if (c_bench->parsed())
      return cmd_benchmark(g, settings, methods, replicates, correlated, rho);
    if (c_optics->parsed())
      return cmd_optics(g, input, schema, min_pts, cfg.xi, cfg.min_cluster_frac);
    if (c_dissim->parsed())
      return cmd_dissim(g, input, schema, measure, format);
    if (c_struct->parsed())
      return cmd_structure(g, input, schema, cfg);
    std::cerr << app.help();
    return 2;
  } catch (const hydap::UsageError& e) {
    json err;
    err["error"]["type"] = "UsageError";
    err["error"]["message"] = e.what();
    std::cerr << err.dump(2) << "\n";
    return 2;
  } catch (const hydap::Error& e) {
    json err;
    err["error"]["type"] = "Error";
    err["error"]["message"] = e.what();
    std::cerr << err.dump(2) << "\n";
    return 1;
  } catch (const std::exception& e) {
    json err;
    err["error"]["type"] = "InternalError";
    err["error"]["message"] = e.what();
    std::cerr << err.dump(2) << "\n";
    return 1;
  }
}

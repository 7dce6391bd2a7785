#include "hydap/dissimilarity.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "hydap/parallel.hpp"

namespace hydap {

void DissimMatrix::validate() const {
  for (Index i = 0; i < n; ++i) {
    if (at(i, i) != 0.0) throw Error("nonzero diagonal in dissimilarity matrix");
    for (Index j = 0; j < n; ++j) {
      double v = at(i, j);
      if (!std::isfinite(v) || v < 0.0) throw Error("invalid dissimilarity entry");
      if (v != at(j, i)) throw Error("asymmetric dissimilarity matrix");
    }
  }
}

GowerConfig GowerConfig::from(const MixedDataset& ds) {
  GowerConfig cfg;
  for (Index c = 0; c < ds.h; ++c) {
    double lo = ds.cont(0, c), hi = lo;
    for (Index i = 1; i < ds.n; ++i) {
      double v = ds.cont(i, c);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    cfg.ranges.push_back(hi - lo);
  }
  return cfg;
}

double minkowski(std::span<const double> a, std::span<const double> b, double m) {
  if (a.size() != b.size())
    throw DimensionMismatchError("minkowski: length mismatch");
  if (m < 1.0) throw InvalidOrderError("minkowski: order must be >= 1");
  double acc = 0;
  for (Index j = 0; j < a.size(); ++j) acc += std::pow(std::abs(a[j] - b[j]), m);
  return std::pow(acc, 1.0 / m);
}

double simple_matching(std::span<const Index> a, std::span<const Index> b) {
  if (a.size() != b.size())
    throw DimensionMismatchError("simple_matching: length mismatch");
  double count = 0;
  for (Index j = 0; j < a.size(); ++j) count += a[j] != b[j] ? 1.0 : 0.0;
  return count;
}

namespace {

std::vector<Index> block_cols(const MixedDataset& ds) {
  std::vector<Index> cols(ds.p());
  Index cont_i = 0, cat_i = 0;
  for (Index j = 0; j < ds.p(); ++j)
    cols[j] = ds.meta[j].is_categorical() ? cat_i++ : cont_i++;
  return cols;
}

// Gower term of one variable; index j runs over all p variables.
double gower_term(const MixedDataset& ds, Index i, Index ip, Index j, Index bc,
                  const GowerConfig& cfg) {
  const VariableMeta& m = ds.meta[j];
  if (!m.is_categorical()) {
    double range = cfg.ranges[bc];
    if (range == 0.0) return 0.0;  // constant column carries no information
    return std::abs(ds.cont(i, bc) - ds.cont(ip, bc)) / range;
  }
  Index a = ds.cat(i, bc), b = ds.cat(ip, bc);
  if (m.kind == VarKind::asymmetric_binary) {
    Index pos = m.positive_index();
    return (a == pos && b == pos) ? 0.0 : 1.0;
  }
  return a != b ? 1.0 : 0.0;
}

}  // namespace

double gower(const MixedDataset& ds, Index i, Index j, const GowerConfig& cfg) {
  auto cols = block_cols(ds);
  double acc = 0;
  for (Index v = 0; v < ds.p(); ++v) acc += gower_term(ds, i, j, v, cols[v], cfg);
  return acc;
}

FamdContext FamdContext::from(const MixedDataset& ds) {
  FamdContext ctx;
  Index cat_i = 0;
  for (const auto& m : ds.meta) {
    if (!m.is_categorical()) continue;
    std::vector<Index> counts(m.levels.size(), 0);
    for (Index i = 0; i < ds.n; ++i) ++counts[ds.cat(i, cat_i)];
    std::vector<double> props;
    std::vector<Index> map(m.levels.size(), static_cast<Index>(-1));
    for (Index l = 0; l < counts.size(); ++l) {
      if (counts[l] == 0) continue;  // unobserved level dropped
      map[l] = props.size();
      props.push_back(static_cast<double>(counts[l]) / static_cast<double>(ds.n));
    }
    ctx.proportions.push_back(std::move(props));
    ctx.level_map.push_back(std::move(map));
    ++cat_i;
  }
  return ctx;
}

double famd_dissim(const MixedDataset& ds, Index i, Index j,
                   const FamdContext& ctx) {
  double acc = 0;
  for (Index c = 0; c < ds.h; ++c) {
    double d = ds.cont(i, c) - ds.cont(j, c);
    acc += d * d;
  }
  for (Index c = 0; c < ds.n_categorical(); ++c) {
    Index li = ctx.level_map[c][ds.cat(i, c)];
    Index lj = ctx.level_map[c][ds.cat(j, c)];
    if (li == lj) continue;
    // Indicator profiles differ only at the two occupied levels; each level
    // contributes its chi-square weight 1/p, so rare levels count more.
    acc += 1.0 / ctx.proportions[c][li] + 1.0 / ctx.proportions[c][lj];
  }
  return std::sqrt(acc);
}

double kprototypes_dissim(const MixedDataset& ds, Index i, Index j, double gamma) {
  if (gamma < 0) throw Error("kprototypes: gamma must be >= 0");
  double acc = 0;
  for (Index c = 0; c < ds.h; ++c) {
    double d = ds.cont(i, c) - ds.cont(j, c);
    acc += d * d;
  }
  double mism = 0;
  for (Index c = 0; c < ds.n_categorical(); ++c)
    mism += ds.cat(i, c) != ds.cat(j, c) ? 1.0 : 0.0;
  return acc + gamma * mism;
}

namespace {

// Per-variable totals over unordered pairs; zero-total variables are skipped
// in the standardized sum.
std::vector<double> hydap_denominators(const MixedDataset& ds,
                                       const GowerConfig& cfg,
                                       const std::vector<Index>& cols,
                                       bool parallel) {
  std::vector<double> denom(ds.p(), 0.0);
  auto body = [&](Index j) {
    double acc = 0;
    for (Index i = 0; i < ds.n; ++i)
      for (Index ip = i + 1; ip < ds.n; ++ip)
        acc += gower_term(ds, i, ip, j, cols[j], cfg);
    denom[j] = acc;
  };
  if (parallel) parallel_for(ds.p(), body);
  else for (Index j = 0; j < ds.p(); ++j) body(j);
  return denom;
}

double hydap_entry(const MixedDataset& ds, Index i, Index ip,
                   const GowerConfig& cfg, const std::vector<Index>& cols,
                   const std::vector<double>& denom) {
  double acc = 0;
  for (Index j = 0; j < ds.p(); ++j) {
    if (denom[j] == 0.0) continue;
    acc += gower_term(ds, i, ip, j, cols[j], cfg) / denom[j];
  }
  return acc;
}

DissimMatrix hydap_matrix_impl(const MixedDataset& ds, bool parallel) {
  if (ds.n < 2) throw TooFewSubjectsError("hydap dissimilarity needs n >= 2");
  GowerConfig cfg = GowerConfig::from(ds);
  auto cols = block_cols(ds);
  std::vector<double> denom = hydap_denominators(ds, cfg, cols, parallel);
  bool any = false;
  for (double d : denom) any = any || d > 0.0;
  if (!any) throw Error("hydap: every variable has zero total pairwise dissimilarity");

  DissimMatrix dm;
  dm.n = ds.n;
  dm.measure = "hydap";
  dm.values.assign(ds.n * ds.n, 0.0);
  auto fill_row = [&](Index i) {
    for (Index ip = i + 1; ip < ds.n; ++ip)
      dm.at(i, ip) = hydap_entry(ds, i, ip, cfg, cols, denom);
  };
  if (parallel) parallel_for(ds.n, fill_row);
  else for (Index i = 0; i < ds.n; ++i) fill_row(i);
  for (Index i = 0; i < ds.n; ++i)
    for (Index ip = i + 1; ip < ds.n; ++ip) dm.at(ip, i) = dm.at(i, ip);
  return dm;
}

}  // namespace

DissimMatrix hydap_dissim_matrix(const MixedDataset& ds) {
  return hydap_matrix_impl(ds, true);
}

DissimMatrix hydap_dissim_matrix_serial(const MixedDataset& ds) {
  return hydap_matrix_impl(ds, false);
}

Measure measure_from_string(const std::string& s) {
  if (s == "gower") return Measure::gower;
  if (s == "hydap") return Measure::hydap;
  if (s == "famd") return Measure::famd;
  if (s == "euclidean") return Measure::euclidean;
  if (s == "manhattan") return Measure::manhattan;
  throw UsageError("unknown measure '" + s + "'");
}

std::string measure_to_string(Measure m) {
  switch (m) {
    case Measure::gower: return "gower";
    case Measure::hydap: return "hydap";
    case Measure::famd: return "famd";
    case Measure::euclidean: return "euclidean";
    default: return "manhattan";
  }
}

namespace {

DissimMatrix pairwise_impl(const MixedDataset& ds, Measure measure, bool parallel) {
  if (measure == Measure::hydap) return hydap_matrix_impl(ds, parallel);
  DissimMatrix dm;
  dm.n = ds.n;
  dm.measure = measure_to_string(measure);
  dm.values.assign(ds.n * ds.n, 0.0);

  GowerConfig gcfg;
  FamdContext fctx;
  if (measure == Measure::gower) gcfg = GowerConfig::from(ds);
  if (measure == Measure::famd) fctx = FamdContext::from(ds);

  auto entry = [&](Index i, Index j) -> double {
    switch (measure) {
      case Measure::gower:
        return gower(ds, i, j, gcfg);
      case Measure::famd:
        return famd_dissim(ds, i, j, fctx);
      case Measure::euclidean:
      case Measure::manhattan: {
        std::span<const double> a(&ds.continuous[i * ds.h], ds.h);
        std::span<const double> b(&ds.continuous[j * ds.h], ds.h);
        return minkowski(a, b, measure == Measure::euclidean ? 2.0 : 1.0);
      }
      default:
        return 0.0;
    }
  };
  auto fill_row = [&](Index i) {
    for (Index j = i + 1; j < ds.n; ++j) dm.at(i, j) = entry(i, j);
  };
  if (parallel) parallel_for(ds.n, fill_row);
  else for (Index i = 0; i < ds.n; ++i) fill_row(i);
  for (Index i = 0; i < ds.n; ++i)
    for (Index j = i + 1; j < ds.n; ++j) dm.at(j, i) = dm.at(i, j);
  return dm;
}

}  // namespace

DissimMatrix pairwise_matrix(const MixedDataset& ds, Measure measure) {
  return pairwise_impl(ds, measure, true);
}

DissimMatrix pairwise_matrix_serial(const MixedDataset& ds, Measure measure) {
  return pairwise_impl(ds, measure, false);
}

void write_dissim_csv(const DissimMatrix& dm, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  char buf[64];
  for (Index i = 0; i < dm.n; ++i) {
    for (Index j = 0; j < dm.n; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", dm.at(i, j));
      out << (j ? "," : "") << buf;
    }
    out << "\n";
  }
}

void write_dissim_binary(const DissimMatrix& dm, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out.write("HDM1", 4);
  std::uint64_t n = dm.n;
  out.write(reinterpret_cast<const char*>(&n), 8);
  for (Index i = 0; i < dm.n; ++i)
    for (Index j = i + 1; j < dm.n; ++j) {
      double v = dm.at(i, j);
      out.write(reinterpret_cast<const char*>(&v), 8);
    }
}

DissimMatrix read_dissim_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "HDM1", 4) != 0)
    throw ParseError(path + ": bad magic");
  std::uint64_t n = 0;
  in.read(reinterpret_cast<char*>(&n), 8);
  DissimMatrix dm;
  dm.n = n;
  dm.measure = "binary";
  dm.values.assign(dm.n * dm.n, 0.0);
  for (Index i = 0; i < dm.n; ++i)
    for (Index j = i + 1; j < dm.n; ++j) {
      double v;
      in.read(reinterpret_cast<char*>(&v), 8);
      if (!in) throw ParseError(path + ": truncated");
      dm.at(i, j) = dm.at(j, i) = v;
    }
  return dm;
}

}  // namespace hydap

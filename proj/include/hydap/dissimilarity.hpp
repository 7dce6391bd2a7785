#pragma once

#include <span>
#include <string>
#include <vector>

#include "hydap/dataset.hpp"

namespace hydap {

struct DissimMatrix {
  Index n = 0;
  std::vector<double> values;  // dense n x n, symmetric, zero diagonal
  std::string measure;

  double at(Index i, Index j) const { return values[i * n + j]; }
  double& at(Index i, Index j) { return values[i * n + j]; }
  void validate() const;
};

// Per-variable Gower setup: observed ranges of continuous variables.
// Zero-range variables contribute 0.
struct GowerConfig {
  std::vector<double> ranges;  // one per continuous variable, block order
  static GowerConfig from(const MixedDataset& ds);
};

double minkowski(std::span<const double> a, std::span<const double> b, double m);
double simple_matching(std::span<const Index> a, std::span<const Index> b);

double gower(const MixedDataset& ds, Index i, Index j, const GowerConfig& cfg);

// Category proportions etc. precomputed over the full dataset. FAMD weights
// explode as levels empty out, so unobserved levels are dropped here.
struct FamdContext {
  std::vector<std::vector<double>> proportions;  // per categorical var, per kept level
  std::vector<std::vector<Index>> level_map;     // original level -> kept slot (or npos)
  static FamdContext from(const MixedDataset& ds);
};

double famd_dissim(const MixedDataset& ds, Index i, Index j,
                   const FamdContext& ctx);

double kprototypes_dissim(const MixedDataset& ds, Index i, Index j, double gamma);

DissimMatrix hydap_dissim_matrix(const MixedDataset& ds);
// Serial reference for the same computation; results are bit-identical.
DissimMatrix hydap_dissim_matrix_serial(const MixedDataset& ds);

enum class Measure { gower, hydap, famd, euclidean, manhattan };
Measure measure_from_string(const std::string& s);
std::string measure_to_string(Measure m);

DissimMatrix pairwise_matrix(const MixedDataset& ds, Measure measure);
DissimMatrix pairwise_matrix_serial(const MixedDataset& ds, Measure measure);

void write_dissim_csv(const DissimMatrix& dm, const std::string& path);
// Binary layout: magic "HDM1", little-endian u64 n, then the n(n-1)/2
// upper-triangle f64 values row-major.
void write_dissim_binary(const DissimMatrix& dm, const std::string& path);
DissimMatrix read_dissim_binary(const std::string& path);

}  // namespace hydap

#pragma once

#include <string>
#include <vector>

#include "hydap/dataset.hpp"

namespace hydap {

struct Contingency {
  Index rows = 0, cols = 0;
  std::vector<double> cells;  // row-major
  std::vector<double> row_sums, col_sums;
  double n = 0;

  double at(Index r, Index c) const { return cells[r * cols + c]; }
  static Contingency from(const std::vector<Index>& a, const std::vector<Index>& b);
};

double ari(const std::vector<Index>& a, const std::vector<Index>& b);
double cramers_v(const std::vector<Index>& a, const std::vector<Index>& b);

struct SumOfSquares {
  std::vector<double> wcss;  // per variable
  std::vector<double> bcss;
  double total_wcss = 0;
  double total_bcss = 0;
};

SumOfSquares wcss_bcss(const StandardizedView& view, const std::vector<Index>& assign);

struct BcssScreen {
  std::vector<std::string> names;   // ordered ascending by median BCSS
  std::vector<double> median;
  std::vector<double> lo;           // 2.5th percentile
  std::vector<double> hi;           // 97.5th percentile
  std::vector<bool> kept;
};

BcssScreen bootstrap_bcss_screen(const StandardizedView& view, Index k,
                                 Index boots, std::uint64_t seed);

void write_bcss_screen_csv(const BcssScreen& screen, const std::string& path);

// K maximizing the second difference of the objective over interior points,
// smaller K on ties.
Index elbow(const std::vector<Index>& ks, const std::vector<double>& objective);

}  // namespace hydap

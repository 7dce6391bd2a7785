#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hydap/dataset.hpp"

namespace hydap {

// Mixture of conditionally independent components: diagonal Gaussians over
// continuous variables, multinomials over categorical ones.
struct FmmModel {
  Index k = 0;
  Index h = 0;
  std::vector<double> pi;
  std::vector<double> means;      // k x h
  std::vector<double> variances;  // k x h
  // Per component, per categorical variable: probability vector over levels.
  std::vector<std::vector<std::vector<double>>> multinomials;
  double loglik = 0;
  double bic = 0;
  Index iterations = 0;
  bool converged = false;
};

struct PosteriorMatrix {
  Index n = 0, k = 0;
  std::vector<double> resp;  // n x k, rows sum to 1
  std::vector<Index> hard;   // argmax per row, ties to the lowest index

  double at(Index i, Index g) const { return resp[i * k + g]; }
};

FmmModel fmm_fit(const MixedDataset& ds, Index k, std::uint64_t seed,
                 Index restarts = 5);

PosteriorMatrix fmm_posterior(const FmmModel& model, const MixedDataset& ds);

FmmModel fmm_select_k(const MixedDataset& ds, Index k_max, std::uint64_t seed);

std::string fmm_model_json(const FmmModel& model);

}  // namespace hydap

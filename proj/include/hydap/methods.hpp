#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hydap/dataset.hpp"
#include "hydap/pipeline.hpp"

namespace hydap {

// The five clustering methods the benchmark compares.
enum class Method { hydap, pam_gower, pam_famd, kproto, fmm };

Method method_from_string(const std::string& s);
std::string method_to_string(Method m);
std::vector<Method> all_methods();

// Labels from one method. Comparators use the fixed k; hydap chooses its own
// and ignores it. `result` (optional) receives the full pipeline output when
// the method is hydap.
std::vector<Index> fit_method(const MixedDataset& ds, Method m, Index k,
                              std::uint64_t seed, HydapResult* result = nullptr);

// Copy with each continuous column replaced by its z-scores.
MixedDataset standardized_copy(const MixedDataset& ds);

// Interpolated percentile in [0, 100]; copies and sorts.
double percentile(std::vector<double> values, double p);
inline double median_of(std::vector<double> values) {
  return percentile(std::move(values), 50.0);
}

// Stream-splitting helper for per-replicate seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t task);

}  // namespace hydap

#include "hydap/methods.hpp"

#include <algorithm>
#include <cmath>

#include "hydap/dissimilarity.hpp"
#include "hydap/mixture.hpp"
#include "hydap/partition.hpp"

namespace hydap {

Method method_from_string(const std::string& s) {
  if (s == "hydap") return Method::hydap;
  if (s == "pam-gower") return Method::pam_gower;
  if (s == "pam-famd") return Method::pam_famd;
  if (s == "kproto") return Method::kproto;
  if (s == "fmm") return Method::fmm;
  throw UsageError("unknown method '" + s + "'");
}

std::string method_to_string(Method m) {
  switch (m) {
    case Method::hydap: return "hydap";
    case Method::pam_gower: return "pam-gower";
    case Method::pam_famd: return "pam-famd";
    case Method::kproto: return "kproto";
    default: return "fmm";
  }
}

std::vector<Method> all_methods() {
  return {Method::hydap, Method::pam_gower, Method::pam_famd, Method::kproto,
          Method::fmm};
}

MixedDataset standardized_copy(const MixedDataset& ds) {
  MixedDataset out = ds;
  if (ds.h == 0) return out;
  StandardizedView view = standardize(ds);
  out.continuous = view.matrix;
  return out;
}

std::vector<Index> fit_method(const MixedDataset& ds, Method m, Index k,
                              std::uint64_t seed, HydapResult* result) {
  switch (m) {
    case Method::hydap: {
      PipelineConfig cfg;
      cfg.seed = seed;
      HydapResult res = run_hydap(ds, cfg);
      std::vector<Index> assign = res.assign;
      if (result) *result = std::move(res);
      return assign;
    }
    case Method::pam_gower:
      return pam(pairwise_matrix(ds, Measure::gower), k, seed).assign;
    case Method::pam_famd:
      return pam(pairwise_matrix(standardized_copy(ds), Measure::famd), k, seed)
          .assign;
    case Method::kproto:
      return kprototypes(ds, k, default_gamma(ds), seed).assign;
    case Method::fmm:
    default:
      return fmm_posterior(fmm_fit(ds, k, seed), ds).hard;
  }
}

double percentile(std::vector<double> values, double p) {
  if (values.empty()) throw TooShortError("percentile: empty input");
  std::sort(values.begin(), values.end());
  double pos = p / 100.0 * static_cast<double>(values.size() - 1);
  Index lo = static_cast<Index>(std::floor(pos));
  Index hi = static_cast<Index>(std::ceil(pos));
  double frac = pos - static_cast<double>(lo);
  return values[lo] * (1.0 - frac) + values[hi] * frac;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t task) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (task + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace hydap

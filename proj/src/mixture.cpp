#include "hydap/mixture.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "hydap/parallel.hpp"
#include "hydap/partition.hpp"
#include "hydap/rng.hpp"

namespace hydap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kVarianceFloor = 1e-6;
constexpr double kSmoothing = 1e-6;
constexpr double kLogTwoPi = 1.8378770664093453;

struct FitFailure {};

double log_component_density(const FmmModel& m, const MixedDataset& ds,
                             Index i, Index g) {
  double acc = 0;
  for (Index c = 0; c < ds.h; ++c) {
    double var = m.variances[g * ds.h + c];
    double d = ds.cont(i, c) - m.means[g * ds.h + c];
    acc += -0.5 * (kLogTwoPi + std::log(var) + d * d / var);
  }
  for (Index c = 0; c < ds.n_categorical(); ++c)
    acc += std::log(m.multinomials[g][c][ds.cat(i, c)]);
  return acc;
}

// E-step responsibilities via log-sum-exp; returns the log-likelihood.
double e_step(const FmmModel& m, const MixedDataset& ds, std::vector<double>& resp) {
  const Index n = ds.n, k = m.k;
  double loglik = 0;
  std::vector<double> logp(k);
  for (Index i = 0; i < n; ++i) {
    double mx = -kInf;
    for (Index g = 0; g < k; ++g) {
      logp[g] = std::log(m.pi[g]) + log_component_density(m, ds, i, g);
      mx = std::max(mx, logp[g]);
    }
    double sum = 0;
    for (Index g = 0; g < k; ++g) sum += std::exp(logp[g] - mx);
    loglik += mx + std::log(sum);
    for (Index g = 0; g < k; ++g) resp[i * k + g] = std::exp(logp[g] - mx) / sum;
  }
  return loglik;
}

void m_step(FmmModel& m, const MixedDataset& ds, const std::vector<double>& resp) {
  const Index n = ds.n, k = m.k, h = ds.h;
  std::vector<double> weight(k, 0.0);
  for (Index i = 0; i < n; ++i)
    for (Index g = 0; g < k; ++g) weight[g] += resp[i * k + g];
  for (Index g = 0; g < k; ++g) {
    if (weight[g] < 1e-8) throw FitFailure{};
    m.pi[g] = weight[g] / static_cast<double>(n);
  }
  std::fill(m.means.begin(), m.means.end(), 0.0);
  for (Index i = 0; i < n; ++i)
    for (Index g = 0; g < k; ++g)
      for (Index c = 0; c < h; ++c)
        m.means[g * h + c] += resp[i * k + g] * ds.cont(i, c);
  for (Index g = 0; g < k; ++g)
    for (Index c = 0; c < h; ++c) m.means[g * h + c] /= weight[g];
  std::fill(m.variances.begin(), m.variances.end(), 0.0);
  for (Index i = 0; i < n; ++i)
    for (Index g = 0; g < k; ++g)
      for (Index c = 0; c < h; ++c) {
        double d = ds.cont(i, c) - m.means[g * h + c];
        m.variances[g * h + c] += resp[i * k + g] * d * d;
      }
  for (Index g = 0; g < k; ++g)
    for (Index c = 0; c < h; ++c)
      m.variances[g * h + c] =
          std::max(m.variances[g * h + c] / weight[g], kVarianceFloor);
  for (Index g = 0; g < k; ++g) {
    for (Index c = 0; c < ds.n_categorical(); ++c) {
      auto& probs = m.multinomials[g][c];
      std::fill(probs.begin(), probs.end(), kSmoothing);
      for (Index i = 0; i < ds.n; ++i)
        probs[ds.cat(i, c)] += resp[i * k + g];
      double total = std::accumulate(probs.begin(), probs.end(), 0.0);
      for (double& p : probs) p /= total;
    }
  }
}

FmmModel fmm_single(const MixedDataset& ds, Index k, std::uint64_t seed,
                    Index restart) {
  const Index n = ds.n, h = ds.h;
  FmmModel m;
  m.k = k;
  m.h = h;
  m.pi.assign(k, 1.0 / static_cast<double>(k));
  m.means.assign(k * h, 0.0);
  m.variances.assign(k * h, 1.0);
  m.multinomials.resize(k);
  for (Index g = 0; g < k; ++g)
    for (const auto& meta : ds.meta)
      if (meta.is_categorical())
        m.multinomials[g].emplace_back(meta.levels.size(), 0.0);

  // Initial responsibilities from hard labels: K-means on the standardized
  // continuous block when available, otherwise random.
  std::vector<Index> labels(n, 0);
  if (k > 1) {
    if (h > 0) {
      labels = kmeans(standardize(ds), k, seed * 1315423911u + restart, 2).assign;
    } else {
      Rng rng = task_rng(seed, restart);
      std::uniform_int_distribution<Index> pick(0, k - 1);
      for (Index i = 0; i < n; ++i) labels[i] = pick(rng);
    }
  }
  std::vector<double> resp(n * k, 0.0);
  for (Index i = 0; i < n; ++i) resp[i * k + labels[i]] = 1.0;
  m_step(m, ds, resp);

  double prev = -kInf;
  for (Index it = 0; it < 500; ++it) {
    double loglik = e_step(m, ds, resp);
    assert(loglik >= prev - 1e-8 * std::max(1.0, std::abs(prev)));
    m.iterations = it + 1;
    if (prev > -kInf && loglik - prev < 1e-6) {
      m.loglik = loglik;
      m.converged = true;
      break;
    }
    prev = loglik;
    m.loglik = loglik;
    m_step(m, ds, resp);
  }
  if (!m.converged) m.loglik = e_step(m, ds, resp);

  Index cat_params = 0;
  for (const auto& meta : ds.meta)
    if (meta.is_categorical()) cat_params += meta.levels.size() - 1;
  double params = static_cast<double>((k - 1) + k * (2 * h + cat_params));
  m.bic = -2.0 * m.loglik + params * std::log(static_cast<double>(n));
  return m;
}

}  // namespace

FmmModel fmm_fit(const MixedDataset& ds, Index k, std::uint64_t seed,
                 Index restarts) {
  if (k < 1) throw InvalidKError("fmm_fit: k must be >= 1");
  if (ds.n <= k) throw InvalidKError("fmm_fit: need n > k");
  restarts = std::max<Index>(1, restarts);
  if (k == 1) restarts = 1;  // closed-form fixed point, no restart variance

  std::vector<FmmModel> fits(restarts);
  std::vector<char> ok(restarts, 0);
  parallel_for(restarts, [&](Index r) {
    try {
      fits[r] = fmm_single(ds, k, seed, r);
      ok[r] = 1;
    } catch (const FitFailure&) {
      ok[r] = 0;
    }
  });
  Index best = restarts;
  for (Index r = 0; r < restarts; ++r) {
    if (!ok[r]) continue;
    if (best == restarts || fits[r].loglik > fits[best].loglik) best = r;
  }
  if (best == restarts)
    throw DegenerateComponentError("fmm_fit: all restarts degenerated");
  return fits[best];
}

PosteriorMatrix fmm_posterior(const FmmModel& model, const MixedDataset& ds) {
  if (model.h != ds.h) throw DimensionMismatchError("fmm_posterior: dimension mismatch");
  PosteriorMatrix post;
  post.n = ds.n;
  post.k = model.k;
  post.resp.assign(ds.n * model.k, 0.0);
  e_step(model, ds, post.resp);
  post.hard.assign(ds.n, 0);
  for (Index i = 0; i < ds.n; ++i) {
    Index arg = 0;
    for (Index g = 1; g < model.k; ++g)
      if (post.at(i, g) > post.at(i, arg)) arg = g;
    post.hard[i] = arg;
  }
  return post;
}

FmmModel fmm_select_k(const MixedDataset& ds, Index k_max, std::uint64_t seed) {
  if (k_max < 1) throw InvalidKError("fmm_select_k: k_max must be >= 1");
  FmmModel best;
  bool have = false;
  for (Index k = 1; k <= k_max && k < ds.n; ++k) {
    FmmModel m = fmm_fit(ds, k, seed + k);
    if (!have || m.bic < best.bic) {
      best = std::move(m);
      have = true;
    }
  }
  if (!have) throw InvalidKError("fmm_select_k: no feasible k");
  return best;
}

std::string fmm_model_json(const FmmModel& model) {
  nlohmann::json j;
  j["k"] = model.k;
  j["pi"] = model.pi;
  j["means"] = model.means;
  j["variances"] = model.variances;
  j["multinomials"] = model.multinomials;
  j["loglik"] = model.loglik;
  j["bic"] = model.bic;
  j["iterations"] = model.iterations;
  j["converged"] = model.converged;
  return j.dump(2);
}

}  // namespace hydap

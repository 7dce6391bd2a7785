#include "hydap/simgen.hpp"

#include <cmath>
#include <fstream>

#include "hydap/rng.hpp"
#include "hydap/special.hpp"

namespace hydap {

namespace {

enum class VarType { normal, beta, multinomial };

// One simulated variable: per-cluster parameters. Normal rows are (mu, sd),
// Beta rows (a, b, shift), multinomial rows (p1, p2, p3) over levels L1..L3.
struct VarSim {
  const char* name;
  VarType type;
  bool informative;
  double par[3][3];
};

using Setting = std::vector<VarSim>;

Setting sim_table(SimSetting s) {
  switch (s) {
    case SimSetting::sim1a:
      return {
          {"x1", VarType::normal, true, {{-2, 2}, {2, 2}, {6, 2}}},
          {"x2", VarType::normal, true, {{20, 1}, {25, 1}, {18, 1}}},
          {"x3", VarType::normal, true, {{0, 1}, {-7, 1}, {4, 1}}},
          {"x4", VarType::normal, false, {{0, 1}, {0, 1}, {0, 1}}},
          {"x5", VarType::multinomial, true,
           {{0.1, 0.1, 0.8}, {0.1, 0.8, 0.1}, {0.8, 0.1, 0.1}}},
      };
    case SimSetting::sim1b:
      return {
          {"x1", VarType::normal, true, {{-2, 2}, {-1, 2}, {0, 2}}},
          {"x2", VarType::normal, true, {{20, 1}, {24, 1}, {21, 1}}},
          {"x3", VarType::normal, true, {{5, 1}, {8, 1}, {7, 1}}},
          {"x4", VarType::normal, false, {{0, 1}, {0, 1}, {0, 1}}},
          {"x5", VarType::normal, false, {{40, 1}, {40, 1}, {40, 1}}},
          {"x6", VarType::normal, true, {{-1, 1}, {1, 1}, {-2, 1}}},
          {"x7", VarType::normal, true, {{0, 1}, {-1, 1}, {2, 1}}},
          {"x8", VarType::normal, true, {{2, 1}, {1, 1}, {0, 1}}},
          {"x9", VarType::normal, false, {{0, 1}, {0, 1}, {0, 1}}},
          {"x10", VarType::normal, false, {{0, 1}, {0, 1}, {0, 1}}},
          {"x11", VarType::normal, false, {{0, 1}, {0, 1}, {0, 1}}},
          {"x12", VarType::multinomial, false,
           {{0.3, 0.3, 0.4}, {0.4, 0.3, 0.3}, {0.3, 0.4, 0.3}}},
          {"x13", VarType::multinomial, true,
           {{0.9, 0.05, 0.05}, {0.05, 0.9, 0.05}, {0.05, 0.05, 0.9}}},
          {"x14", VarType::multinomial, true,
           {{0.05, 0.05, 0.9}, {0.05, 0.9, 0.05}, {0.9, 0.05, 0.05}}},
      };
    case SimSetting::sim2a:
      return {
          {"x1", VarType::normal, true, {{-2, 2}, {2, 2}, {6, 2}}},
          {"x2", VarType::normal, true, {{20, 1}, {25, 1}, {18, 1}}},
          {"x3", VarType::normal, true, {{0, 1}, {-7, 1}, {4, 1}}},
          {"x4", VarType::normal, false, {{0, 1}, {0, 1}, {0, 1}}},
          {"x5", VarType::multinomial, false,
           {{0.3, 0.3, 0.4}, {0.3, 0.3, 0.4}, {0.4, 0.3, 0.3}}},
      };
    case SimSetting::sim2b:
      return {
          {"x1", VarType::beta, true, {{0.1, 5, 0}, {0.1, 5, 0.3}, {0.1, 5, 0.5}}},
          {"x2", VarType::beta, true, {{0.2, 5, 0}, {0.1, 5, 0.3}, {0.1, 5, 0.5}}},
          {"x3", VarType::beta, true, {{0.2, 3, 0}, {0.2, 3, 0.3}, {0.2, 3, 0.5}}},
          {"x4", VarType::beta, true, {{0.1, 3, 0}, {0.1, 3, 0.3}, {0.2, 3, 0.5}}},
          {"x5", VarType::normal, false, {{0, 0.01}, {0, 0.01}, {0, 0.01}}},
          {"x6", VarType::multinomial, false,
           {{0.3, 0.3, 0.4}, {0.4, 0.3, 0.3}, {0.3, 0.4, 0.3}}},
          {"x7", VarType::multinomial, false,
           {{0.3, 0.3, 0.4}, {0.3, 0.3, 0.4}, {0.3, 0.3, 0.4}}},
          {"x8", VarType::multinomial, false,
           {{0.3, 0.3, 0.4}, {0.3, 0.3, 0.4}, {0.3, 0.3, 0.4}}},
      };
    case SimSetting::sim3:
    default:
      return {
          {"x1", VarType::normal, false, {{0, 0.5}, {0, 0.5}, {0, 0.5}}},
          {"x2", VarType::normal, false, {{-3, 1}, {-3, 1}, {-3, 1}}},
          {"x3", VarType::normal, false, {{4, 2}, {4, 2}, {4, 2}}},
          {"x4", VarType::normal, false, {{0, 1}, {0, 1}, {0, 1}}},
          {"x5", VarType::multinomial, true,
           {{0.05, 0.05, 0.9}, {0.05, 0.9, 0.05}, {0.9, 0.05, 0.05}}},
          {"x6", VarType::multinomial, false,
           {{0.3, 0.3, 0.4}, {0.4, 0.3, 0.3}, {0.3, 0.4, 0.3}}},
          {"x7", VarType::multinomial, true,
           {{0.9, 0.05, 0.05}, {0.05, 0.9, 0.05}, {0.05, 0.05, 0.9}}},
      };
  }
}

}  // namespace

SimSetting sim_setting_from_string(const std::string& s) {
  if (s == "sim1a") return SimSetting::sim1a;
  if (s == "sim1b") return SimSetting::sim1b;
  if (s == "sim2a") return SimSetting::sim2a;
  if (s == "sim2b") return SimSetting::sim2b;
  if (s == "sim3") return SimSetting::sim3;
  throw UsageError("unknown simulation setting '" + s + "'");
}

std::string sim_setting_to_string(SimSetting s) {
  switch (s) {
    case SimSetting::sim1a: return "sim1a";
    case SimSetting::sim1b: return "sim1b";
    case SimSetting::sim2a: return "sim2a";
    case SimSetting::sim2b: return "sim2b";
    default: return "sim3";
  }
}

std::vector<VariableMeta> sim_schema(SimSetting setting) {
  std::vector<VariableMeta> schema;
  for (const auto& v : sim_table(setting)) {
    VariableMeta m;
    m.name = v.name;
    if (v.type == VarType::multinomial) {
      m.kind = VarKind::categorical;
      m.levels = {"L1", "L2", "L3"};
    } else {
      m.kind = VarKind::continuous;
    }
    schema.push_back(std::move(m));
  }
  return schema;
}

std::vector<std::string> sim_informative(SimSetting setting) {
  std::vector<std::string> names;
  for (const auto& v : sim_table(setting))
    if (v.informative) names.emplace_back(v.name);
  return names;
}

LabeledDataset generate(const SimSpec& spec) {
  if (!(spec.rho >= 0.0 && spec.rho < 1.0))
    throw InvalidRhoError("generate: rho must be in [0, 1)");
  const Setting table = sim_table(spec.setting);
  const double rho = spec.correlated ? spec.rho : 0.0;
  const double w_shared = std::sqrt(rho);
  const double w_own = std::sqrt(1.0 - rho);

  LabeledDataset out;
  out.informative = sim_informative(spec.setting);
  MixedDataset& ds = out.dataset;
  ds.meta = sim_schema(spec.setting);
  for (const auto& m : ds.meta)
    if (!m.is_categorical()) ++ds.h;

  Rng rng = task_rng(spec.seed, 0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  for (Index cluster = 0; cluster < 3; ++cluster) {
    for (Index rep = 0; rep < spec.sizes[cluster]; ++rep) {
      out.truth.push_back(cluster);
      // Continuous variables share a Gaussian copula factor within each
      // subject (exchangeable correlation rho conditional on the cluster).
      double shared = gauss(rng);
      for (const auto& v : table) {
        const double* par = v.par[cluster];
        switch (v.type) {
          case VarType::normal: {
            double z = w_shared * shared + w_own * gauss(rng);
            ds.continuous.push_back(par[0] + par[1] * z);
            break;
          }
          case VarType::beta: {
            double z = w_shared * shared + w_own * gauss(rng);
            double u = normal_cdf(z);
            ds.continuous.push_back(beta_quantile(par[0], par[1], u) + par[2]);
            break;
          }
          case VarType::multinomial: {
            double u = unif(rng);
            Index level = u < par[0] ? 0 : (u < par[0] + par[1] ? 1 : 2);
            ds.categorical.push_back(level);
            break;
          }
        }
      }
    }
  }
  ds.n = out.truth.size();
  ds.validate();
  return out;
}

void write_truth_csv(const std::vector<Index>& truth, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << "subject_id,cluster\n";
  for (Index i = 0; i < truth.size(); ++i)
    out << i << "," << truth[i] + 1 << "\n";
}

}  // namespace hydap

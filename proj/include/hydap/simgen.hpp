#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "hydap/dataset.hpp"

namespace hydap {

enum class SimSetting { sim1a, sim1b, sim2a, sim2b, sim3 };

SimSetting sim_setting_from_string(const std::string& s);
std::string sim_setting_to_string(SimSetting s);

struct SimSpec {
  SimSetting setting = SimSetting::sim1a;
  std::array<Index, 3> sizes = {40, 40, 120};
  bool correlated = false;
  double rho = 0.4;
  std::uint64_t seed = 0;
};

struct LabeledDataset {
  MixedDataset dataset;
  std::vector<Index> truth;
  std::vector<std::string> informative;
};

LabeledDataset generate(const SimSpec& spec);

// Schema of a setting, without generating data.
std::vector<VariableMeta> sim_schema(SimSetting setting);
std::vector<std::string> sim_informative(SimSetting setting);

void write_truth_csv(const std::vector<Index>& truth, const std::string& path);

}  // namespace hydap

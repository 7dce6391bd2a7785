#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "hydap/dataset.hpp"

namespace testutil {

inline std::string temp_path(const std::string& name) {
  static int counter = 0;
  auto dir = std::filesystem::temp_directory_path() / "hydap-tests";
  std::filesystem::create_directories(dir);
  return (dir / (std::to_string(++counter) + "_" + name)).string();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Random mixed dataset: h continuous standard-normal columns, q categorical
// columns with 2-4 levels.
inline hydap::MixedDataset random_dataset(std::mt19937_64& rng, hydap::Index n,
                                          hydap::Index h, hydap::Index q) {
  hydap::MixedDataset ds;
  ds.n = n;
  ds.h = h;
  std::normal_distribution<double> gauss;
  for (hydap::Index c = 0; c < h; ++c) {
    hydap::VariableMeta m;
    m.name = "c" + std::to_string(c);
    ds.meta.push_back(m);
  }
  std::uniform_int_distribution<int> nlev(2, 4);
  std::vector<hydap::Index> levels;
  for (hydap::Index c = 0; c < q; ++c) {
    hydap::VariableMeta m;
    m.name = "g" + std::to_string(c);
    m.kind = hydap::VarKind::categorical;
    int L = nlev(rng);
    for (int l = 0; l < L; ++l) m.levels.push_back("L" + std::to_string(l));
    levels.push_back(L);
    ds.meta.push_back(m);
  }
  for (hydap::Index i = 0; i < n; ++i) {
    for (hydap::Index c = 0; c < h; ++c) ds.continuous.push_back(gauss(rng));
    for (hydap::Index c = 0; c < q; ++c) {
      std::uniform_int_distribution<hydap::Index> pick(0, levels[c] - 1);
      ds.categorical.push_back(pick(rng));
    }
  }
  return ds;
}

}  // namespace testutil

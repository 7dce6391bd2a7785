#pragma once

#include <string>
#include <vector>

#include "hydap/types.hpp"

namespace hydap {

enum class VarKind { continuous, categorical, asymmetric_binary };

struct VariableMeta {
  std::string name;
  VarKind kind = VarKind::continuous;
  std::vector<std::string> levels;  // categorical kinds only, schema order
  std::string positive_level;      // asymmetric_binary only

  bool is_categorical() const { return kind != VarKind::continuous; }
  Index positive_index() const;
  void validate() const;
};

// n x p mixed table. Continuous cells in `continuous` (row-major n x h),
// categorical cells as level indices in `categorical` (row-major n x (p-h)).
// Column order of each block follows the order of its variables in `meta`.
// Immutable after construction; safe to share across threads.
struct MixedDataset {
  Index n = 0;
  Index h = 0;  // continuous variable count
  std::vector<double> continuous;
  std::vector<Index> categorical;
  std::vector<VariableMeta> meta;

  Index p() const { return meta.size(); }
  Index n_categorical() const { return meta.size() - h; }

  double cont(Index row, Index col) const { return continuous[row * h + col]; }
  Index cat(Index row, Index col) const {
    return categorical[row * n_categorical() + col];
  }
  // Position of variable j (over all p) within its block.
  Index block_col(Index j) const;

  void validate() const;
};

struct StandardizedView {
  Index n = 0;
  Index h = 0;
  std::vector<double> matrix;  // row-major n x h, z-scores
  std::vector<double> centers;
  std::vector<double> scales;
  std::vector<bool> constant;  // per-column constant flag
  std::vector<std::string> names;

  double at(Index row, Index col) const { return matrix[row * h + col]; }
};

// Schema file: JSON array of {name, kind, levels?, positive_level?}.
std::vector<VariableMeta> load_schema(const std::string& path);
void write_schema(const std::vector<VariableMeta>& schema,
                  const std::string& path);

MixedDataset load_csv(const std::string& path,
                      const std::vector<VariableMeta>& schema);
void write_csv(const MixedDataset& ds, const std::string& path);

StandardizedView standardize(const MixedDataset& ds);

MixedDataset split_by_selection(const MixedDataset& ds,
                                const std::vector<std::string>& keep);

}  // namespace hydap

#include "hydap/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

namespace hydap {

Index VariableMeta::positive_index() const {
  for (Index l = 0; l < levels.size(); ++l)
    if (levels[l] == positive_level) return l;
  throw Error("positive_level '" + positive_level + "' not in levels of " + name);
}

void VariableMeta::validate() const {
  if (kind == VarKind::continuous) {
    if (!levels.empty())
      throw Error("continuous variable " + name + " must have no levels");
  } else {
    if (levels.size() < 2)
      throw Error("categorical variable " + name + " needs >= 2 levels");
    if (kind == VarKind::asymmetric_binary) {
      if (levels.size() != 2)
        throw Error("asymmetric binary variable " + name + " needs exactly 2 levels");
      (void)positive_index();
    }
  }
}

Index MixedDataset::block_col(Index j) const {
  Index cont_i = 0, cat_i = 0;
  for (Index v = 0; v < j; ++v) {
    if (meta[v].is_categorical()) ++cat_i; else ++cont_i;
  }
  return meta[j].is_categorical() ? cat_i : cont_i;
}

void MixedDataset::validate() const {
  if (meta.empty()) throw Error("dataset needs at least one variable");
  for (const auto& m : meta) m.validate();
  Index hc = 0;
  for (const auto& m : meta)
    if (!m.is_categorical()) ++hc;
  if (hc != h) throw Error("continuous count mismatch");
  if (continuous.size() != n * h) throw Error("continuous block size mismatch");
  if (categorical.size() != n * (p() - h)) throw Error("categorical block size mismatch");
  Index cat_i = 0;
  for (const auto& m : meta) {
    if (!m.is_categorical()) continue;
    for (Index i = 0; i < n; ++i)
      if (cat(i, cat_i) >= m.levels.size())
        throw Error("level index out of range for " + m.name);
    ++cat_i;
  }
  for (double v : continuous)
    if (!std::isfinite(v)) throw Error("non-finite continuous cell");
}

namespace {

VarKind kind_from_string(const std::string& s) {
  if (s == "continuous") return VarKind::continuous;
  if (s == "categorical") return VarKind::categorical;
  if (s == "asymmetric_binary") return VarKind::asymmetric_binary;
  throw ParseError("unknown variable kind '" + s + "'");
}

const char* kind_to_string(VarKind k) {
  switch (k) {
    case VarKind::continuous: return "continuous";
    case VarKind::categorical: return "categorical";
    default: return "asymmetric_binary";
  }
}

// One CSV record, honoring double quotes. Returns false at end of stream.
bool read_record(std::istream& in, std::vector<std::string>& fields) {
  fields.clear();
  std::string field;
  bool in_quotes = false, any = false;
  int c;
  while ((c = in.get()) != EOF) {
    any = true;
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') { field.push_back('"'); in.get(); }
        else in_quotes = false;
      } else field.push_back(static_cast<char>(c));
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      fields.push_back(field);
      field.clear();
    } else if (c == '\n') {
      break;
    } else if (c != '\r') {
      field.push_back(static_cast<char>(c));
    }
  }
  if (!any) return false;
  fields.push_back(field);
  return true;
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += "\"";
  return out;
}

bool is_missing(const std::string& tok) { return tok.empty() || tok == "NA"; }

}  // namespace

std::vector<VariableMeta> load_schema(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open schema file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("schema " + path + ": " + e.what());
  }
  if (!j.is_array()) throw ParseError("schema must be a JSON array");
  std::vector<VariableMeta> schema;
  for (const auto& item : j) {
    VariableMeta m;
    m.name = item.at("name").get<std::string>();
    m.kind = kind_from_string(item.at("kind").get<std::string>());
    if (item.contains("levels"))
      m.levels = item["levels"].get<std::vector<std::string>>();
    if (item.contains("positive_level"))
      m.positive_level = item["positive_level"].get<std::string>();
    m.validate();
    schema.push_back(std::move(m));
  }
  if (schema.empty()) throw ParseError("schema is empty");
  return schema;
}

void write_schema(const std::vector<VariableMeta>& schema,
                  const std::string& path) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& m : schema) {
    nlohmann::json item;
    item["name"] = m.name;
    item["kind"] = kind_to_string(m.kind);
    if (m.is_categorical()) item["levels"] = m.levels;
    if (m.kind == VarKind::asymmetric_binary)
      item["positive_level"] = m.positive_level;
    j.push_back(item);
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump(2) << "\n";
}

MixedDataset load_csv(const std::string& path,
                      const std::vector<VariableMeta>& schema) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<std::string> fields;
  if (!read_record(in, fields)) throw ParseError(path + ": empty file");
  if (fields.size() != schema.size())
    throw ParseError(path + ": header has " + std::to_string(fields.size()) +
                     " columns, schema has " + std::to_string(schema.size()));
  for (Index j = 0; j < schema.size(); ++j)
    if (fields[j] != schema[j].name)
      throw ParseError(path + ": header column " + std::to_string(j) + " is '" +
                       fields[j] + "', expected '" + schema[j].name + "'");

  MixedDataset ds;
  ds.meta = schema;
  for (const auto& m : schema)
    if (!m.is_categorical()) ++ds.h;

  Index row = 0;
  while (read_record(in, fields)) {
    if (fields.size() == 1 && fields[0].empty()) continue;  // trailing newline
    if (fields.size() != schema.size())
      throw ParseError(path + ": row " + std::to_string(row) + " has " +
                       std::to_string(fields.size()) + " columns");
    for (Index j = 0; j < schema.size(); ++j) {
      const std::string& tok = fields[j];
      if (is_missing(tok)) throw MissingValueError(row, j);
      const VariableMeta& m = schema[j];
      if (m.is_categorical()) {
        auto it = std::find(m.levels.begin(), m.levels.end(), tok);
        if (it == m.levels.end()) throw UnknownLevelError(row, j, tok);
        ds.categorical.push_back(static_cast<Index>(it - m.levels.begin()));
      } else {
        char* end = nullptr;
        double v = std::strtod(tok.c_str(), &end);
        if (end == tok.c_str() || *end != '\0' || !std::isfinite(v))
          throw ParseError(path + ": non-numeric value '" + tok + "' at row " +
                           std::to_string(row) + ", column " + std::to_string(j));
        ds.continuous.push_back(v);
      }
    }
    ++row;
  }
  ds.n = row;
  ds.validate();
  return ds;
}

void write_csv(const MixedDataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  for (Index j = 0; j < ds.p(); ++j)
    out << (j ? "," : "") << csv_quote(ds.meta[j].name);
  out << "\n";
  char buf[64];
  for (Index i = 0; i < ds.n; ++i) {
    Index cont_i = 0, cat_i = 0;
    for (Index j = 0; j < ds.p(); ++j) {
      if (j) out << ",";
      if (ds.meta[j].is_categorical()) {
        out << csv_quote(ds.meta[j].levels[ds.cat(i, cat_i++)]);
      } else {
        std::snprintf(buf, sizeof buf, "%.17g", ds.cont(i, cont_i++));
        out << buf;
      }
    }
    out << "\n";
  }
}

StandardizedView standardize(const MixedDataset& ds) {
  if (ds.h == 0) throw NoContinuousError("dataset has no continuous variables");
  StandardizedView v;
  v.n = ds.n;
  v.h = ds.h;
  v.matrix.resize(ds.n * ds.h);
  v.centers.resize(ds.h);
  v.scales.resize(ds.h);
  v.constant.resize(ds.h, false);
  for (const auto& m : ds.meta)
    if (!m.is_categorical()) v.names.push_back(m.name);
  for (Index c = 0; c < ds.h; ++c) {
    double mean = 0;
    for (Index i = 0; i < ds.n; ++i) mean += ds.cont(i, c);
    mean /= static_cast<double>(ds.n);
    double ss = 0;
    for (Index i = 0; i < ds.n; ++i) {
      double d = ds.cont(i, c) - mean;
      ss += d * d;
    }
    double sd = ds.n > 1 ? std::sqrt(ss / static_cast<double>(ds.n - 1)) : 0.0;
    v.centers[c] = mean;
    if (sd == 0.0) {
      v.constant[c] = true;
      v.scales[c] = 1.0;  // centered pass-through, all zeros
    } else {
      v.scales[c] = sd;
    }
    for (Index i = 0; i < ds.n; ++i)
      v.matrix[i * ds.h + c] = (ds.cont(i, c) - mean) / v.scales[c];
  }
  return v;
}

MixedDataset split_by_selection(const MixedDataset& ds,
                                const std::vector<std::string>& keep) {
  if (keep.empty()) throw EmptySelectionError("empty variable selection");
  std::unordered_set<std::string> want(keep.begin(), keep.end());
  for (const auto& name : want) {
    bool found = false;
    for (const auto& m : ds.meta)
      if (m.name == name) { found = true; break; }
    if (!found) throw UnknownVariableError("unknown variable '" + name + "'");
  }
  MixedDataset out;
  out.n = ds.n;
  std::vector<Index> keep_idx;
  for (Index j = 0; j < ds.p(); ++j) {
    if (!want.count(ds.meta[j].name)) continue;
    keep_idx.push_back(j);
    out.meta.push_back(ds.meta[j]);
    if (!ds.meta[j].is_categorical()) ++out.h;
  }
  for (Index i = 0; i < ds.n; ++i) {
    for (Index j : keep_idx) {
      Index bc = ds.block_col(j);
      if (ds.meta[j].is_categorical()) out.categorical.push_back(ds.cat(i, bc));
      else out.continuous.push_back(ds.cont(i, bc));
    }
  }
  out.validate();
  return out;
}

}  // namespace hydap

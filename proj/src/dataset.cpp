#include "affect/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "affect/error.hpp"

namespace affect {

std::optional<double> FeatureVector::get(const std::string& name) const {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) return std::nullopt;
  return values[static_cast<std::size_t>(it - names.begin())];
}

std::vector<int> FeatureMatrix::labels() const {
  std::vector<int> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.label);
  return out;
}

std::vector<double> FeatureMatrix::column(std::size_t j) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.values[j]);
  return out;
}

std::size_t FeatureMatrix::count_label(int label) const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [&](const FeatureRow& r) { return r.label == label; }));
}

std::optional<std::size_t> FeatureMatrix::index_of(const std::string& name) const {
  auto it = std::find(feature_names.begin(), feature_names.end(), name);
  if (it == feature_names.end()) return std::nullopt;
  return static_cast<std::size_t>(it - feature_names.begin());
}

FeatureMatrix FeatureMatrix::subset(std::span<const std::size_t> row_indices) const {
  FeatureMatrix out;
  out.feature_names = feature_names;
  out.rows.reserve(row_indices.size());
  for (std::size_t i : row_indices) out.rows.push_back(rows.at(i));
  return out;
}

FeatureMatrix FeatureMatrix::select_columns(std::span<const std::string> names) const {
  std::vector<std::size_t> cols;
  cols.reserve(names.size());
  for (const auto& name : names) {
    auto j = index_of(name);
    if (!j) throw Error(ErrorCode::FeatureMismatch, "feature '" + name + "' not in matrix");
    cols.push_back(*j);
  }
  FeatureMatrix out;
  out.feature_names.assign(names.begin(), names.end());
  out.rows.reserve(rows.size());
  for (const auto& r : rows) {
    FeatureRow row{r.event_id, r.label, {}};
    row.values.reserve(cols.size());
    for (std::size_t j : cols) row.values.push_back(r.values[j]);
    out.rows.push_back(std::move(row));
  }
  return out;
}

FeatureVector FeatureMatrix::vector(std::size_t i) const {
  const auto& r = rows.at(i);
  return FeatureVector{r.event_id, r.label, feature_names, r.values};
}

void FeatureMatrix::validate() const {
  for (const auto& r : rows) {
    if (r.values.size() != feature_names.size()) {
      throw Error(ErrorCode::LengthMismatch, "row " + r.event_id + " is ragged");
    }
    if (r.label != 0 && r.label != 1) {
      throw Error(ErrorCode::MalformedRow, "row " + r.event_id + " has a non-binary label");
    }
  }
}

FeatureMatrix FeatureMatrix::from_vectors(std::span<const FeatureVector> vectors) {
  FeatureMatrix out;
  if (vectors.empty()) return out;
  out.feature_names = vectors.front().names;
  for (const auto& v : vectors) {
    if (v.names != out.feature_names) {
      throw Error(ErrorCode::FeatureMismatch, "vector " + v.event_id + " has a different catalog");
    }
    out.rows.push_back(FeatureRow{v.event_id, v.label, v.values});
  }
  out.validate();
  return out;
}

void write_feature_csv(std::ostream& out, const FeatureMatrix& matrix,
                       const std::optional<ArtifactStamp>& stamp) {
  if (stamp) {
    out << "# config_hash=" << stamp->config_hash << '\n';
    out << "# seed=" << stamp->seed << '\n';
  }
  out << "event_id,label";
  for (const auto& name : matrix.feature_names) out << ',' << name;
  out << '\n';
  for (const auto& r : matrix.rows) {
    out << r.event_id << ',' << r.label;
    for (double v : r.values) out << ',' << (std::isnan(v) ? std::string("NA") : format_double(v));
    out << '\n';
  }
}

FeatureMatrix read_feature_csv(std::istream& in, const std::string& source) {
  FeatureMatrix m;
  std::string line;
  std::size_t line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || line.starts_with('#')) continue;
    const auto fields = split(line, ',');
    const std::string where = source + ": line " + std::to_string(line_no);
    if (!saw_header) {
      if (fields.size() < 2 || trim(fields[0]) != "event_id" || trim(fields[1]) != "label") {
        throw Error(ErrorCode::MalformedHeader, where + ": expected event_id,label,...");
      }
      for (std::size_t j = 2; j < fields.size(); ++j) m.feature_names.emplace_back(trim(fields[j]));
      saw_header = true;
      continue;
    }
    if (fields.size() != m.feature_names.size() + 2) {
      throw Error(ErrorCode::MalformedRow, where + ": wrong column count");
    }
    FeatureRow row;
    row.event_id = std::string(trim(fields[0]));
    const auto label = trim(fields[1]);
    if (label == "0") {
      row.label = 0;
    } else if (label == "1") {
      row.label = 1;
    } else {
      throw Error(ErrorCode::MalformedRow, where + ": label must be 0 or 1");
    }
    row.values.reserve(m.feature_names.size());
    for (std::size_t j = 2; j < fields.size(); ++j) {
      if (trim(fields[j]) == "NA") {
        row.values.push_back(kMissing);
        continue;
      }
      double v = 0.0;
      if (!parse_double(fields[j], v)) throw Error(ErrorCode::MalformedRow, where + ": bad number");
      if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteValue, where);
      row.values.push_back(v);
    }
    m.rows.push_back(std::move(row));
  }
  if (!saw_header) throw Error(ErrorCode::MalformedHeader, source + ": no header");
  return m;
}

}  // namespace affect

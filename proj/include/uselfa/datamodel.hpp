#pragma once

// Region-by-attribute tables: CSV ingestion with a missing-value policy,
// descriptive statistics, and row-wise z-score standardization.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <Eigen/Dense>

#include "uselfa/errors.hpp"

namespace uselfa {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class MissingPolicy { Reject, DropRegion, ImputeMedian };

inline std::string to_string(MissingPolicy p) {
  switch (p) {
    case MissingPolicy::Reject: return "reject";
    case MissingPolicy::DropRegion: return "drop-region";
    case MissingPolicy::ImputeMedian: return "impute-median";
  }
  return "reject";
}

inline MissingPolicy parse_missing_policy(std::string_view s) {
  if (s == "reject") return MissingPolicy::Reject;
  if (s == "drop-region") return MissingPolicy::DropRegion;
  if (s == "impute-median") return MissingPolicy::ImputeMedian;
  throw ConfigError("unknown missing-value policy '" + std::string(s) +
                    "' (expected reject | drop-region | impute-median)");
}

struct IngestConfig {
  MissingPolicy missing = MissingPolicy::Reject;
};

// One missing-value intervention, written as `<region_id>,<attribute>,<action>`.
struct ProvenanceEntry {
  std::string region_id;
  std::string attribute;
  std::string action;
};

// values(i, j) is attribute i observed in region j.
struct AttributeTable {
  std::vector<std::string> attribute_names;
  std::vector<std::string> region_ids;
  Matrix values;
  std::vector<std::string> units;
  std::vector<ProvenanceEntry> provenance;

  std::size_t num_attributes() const { return attribute_names.size(); }
  std::size_t num_regions() const { return region_ids.size(); }
};

struct AttributeStats {
  std::string attribute;
  std::size_t count = 0;
  double mean = 0, std = 0, min = 0, median = 0, max = 0;
  double skewness = 0, kurtosis = 0;
};

struct DescriptiveStats {
  std::vector<AttributeStats> rows;
  std::vector<std::string> warnings;
};

struct StandardizedMatrix {
  Matrix values;
  std::vector<std::string> attribute_names;
  std::vector<std::string> region_ids;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (quoted) throw ParseError("unterminated quoted field");
  fields.emplace_back(trim(cur));
  return fields;
}

// Returns nullopt for anything that is not a finite decimal number.
inline std::optional<double> parse_number(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

inline double median_of(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

template <typename Row>
double row_mean(const Row& row) {
  double s = 0;
  for (Eigen::Index j = 0; j < row.size(); ++j) s += row(j);
  return s / static_cast<double>(row.size());
}

// Sample standard deviation (denominator n - 1).
template <typename Row>
double row_sample_std(const Row& row, double mean) {
  if (row.size() < 2) return 0.0;
  double ss = 0;
  for (Eigen::Index j = 0; j < row.size(); ++j) {
    const double d = row(j) - mean;
    ss += d * d;
  }
  return std::sqrt(ss / static_cast<double>(row.size() - 1));
}

}  // namespace detail

// Checks every AttributeTable invariant; throws SchemaError or DegenerateDataError.
inline void validate(const AttributeTable& t) {
  const auto n = t.attribute_names.size();
  const auto r = t.region_ids.size();
  if (static_cast<std::size_t>(t.values.rows()) != n || static_cast<std::size_t>(t.values.cols()) != r)
    throw SchemaError("value matrix shape does not match attribute/region lists");
  if (!t.units.empty() && t.units.size() != n) throw SchemaError("units list length differs from attribute count");
  std::unordered_set<std::string> seen;
  for (const auto& a : t.attribute_names) {
    if (a.empty()) throw SchemaError("empty attribute name");
    if (!seen.insert(a).second) throw SchemaError("duplicate attribute column '" + a + "'");
  }
  seen.clear();
  for (const auto& id : t.region_ids) {
    if (id.empty()) throw SchemaError("empty region_id");
    if (!seen.insert(id).second) throw SchemaError("duplicate region_id '" + id + "'");
  }
  if (!t.values.allFinite()) throw SchemaError("table contains non-finite values");
  if (n < 2) throw DegenerateDataError("need at least 2 attributes, got " + std::to_string(n));
  if (r < n + 1)
    throw DegenerateDataError("need at least N+1 = " + std::to_string(n + 1) + " regions, got " +
                              std::to_string(r));
}

// Parses the documented layout: header `region_id,<attr>,...`, one row per
// region. Blank lines and lines starting with '#' are skipped. Empty, NA,
// NaN, null, non-numeric and non-finite cells count as missing.
inline AttributeTable parse_table(std::istream& in, const IngestConfig& config = {}) {
  std::string line;
  std::vector<std::string> header;
  std::size_t line_no = 0;
  bool first_content = true;
  std::vector<std::string> ids;
  std::vector<std::vector<std::optional<double>>> cells;  // per region
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (first_content && view.substr(0, 3) == "\xEF\xBB\xBF") view.remove_prefix(3);
    const auto trimmed = detail::trim(view);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    auto fields = detail::split_csv_line(view);
    if (first_content) {
      first_content = false;
      header = std::move(fields);
      if (header.front() != "region_id")
        throw SchemaError("first header column must be 'region_id', found '" + header.front() + "'");
      if (header.size() < 2) throw SchemaError("no attribute columns in header");
      continue;
    }
    if (fields.size() != header.size())
      throw ParseError("line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                       " fields, found " + std::to_string(fields.size()));
    ids.push_back(fields.front());
    std::vector<std::optional<double>> row;
    row.reserve(fields.size() - 1);
    for (std::size_t c = 1; c < fields.size(); ++c) {
      auto v = detail::parse_number(fields[c]);
      if (!v && config.missing == MissingPolicy::Reject)
        throw SchemaError("line " + std::to_string(line_no) + ", column '" + header[c] +
                          "': non-numeric or missing value '" + fields[c] + "'");
      row.push_back(v);
    }
    cells.push_back(std::move(row));
  }
  if (first_content) throw ParseError("empty input: no header row");
  if (ids.empty()) throw ParseError("no data rows");

  AttributeTable t;
  t.attribute_names.assign(header.begin() + 1, header.end());
  {
    std::unordered_set<std::string> seen;
    for (const auto& a : t.attribute_names)
      if (!seen.insert(a).second) throw SchemaError("duplicate attribute column '" + a + "'");
  }
  const std::size_t n = t.attribute_names.size();

  if (config.missing == MissingPolicy::DropRegion) {
    std::vector<std::string> kept_ids;
    std::vector<std::vector<std::optional<double>>> kept;
    for (std::size_t j = 0; j < ids.size(); ++j) {
      bool complete = true;
      for (std::size_t i = 0; i < n; ++i) {
        if (!cells[j][i]) {
          complete = false;
          t.provenance.push_back({ids[j], t.attribute_names[i], "drop-region"});
        }
      }
      if (complete) {
        kept_ids.push_back(ids[j]);
        kept.push_back(std::move(cells[j]));
      }
    }
    ids = std::move(kept_ids);
    cells = std::move(kept);
  } else if (config.missing == MissingPolicy::ImputeMedian) {
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> present;
      for (const auto& row : cells)
        if (row[i]) present.push_back(*row[i]);
      if (present.size() == cells.size()) continue;
      if (present.empty()) throw SchemaError("attribute '" + t.attribute_names[i] + "' has no observed values");
      const double med = detail::median_of(std::move(present));
      for (std::size_t j = 0; j < cells.size(); ++j) {
        if (!cells[j][i]) {
          cells[j][i] = med;
          t.provenance.push_back({ids[j], t.attribute_names[i], "impute-median"});
        }
      }
    }
  }

  t.region_ids = std::move(ids);
  t.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(t.region_ids.size()));
  for (std::size_t j = 0; j < t.region_ids.size(); ++j)
    for (std::size_t i = 0; i < n; ++i)
      t.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = *cells[j][i];
  validate(t);
  return t;
}

inline AttributeTable load_table(const std::string& path, const IngestConfig& config = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open input file '" + path + "'");
  return parse_table(in, config);
}

// Moments per attribute. Skewness is the adjusted Fisher-Pearson G1 and
// kurtosis the adjusted excess G2; both are NaN (with a warning) when the
// row is constant or too short.
inline DescriptiveStats describe(const AttributeTable& table) {
  DescriptiveStats out;
  const auto n_regions = table.values.cols();
  const double n = static_cast<double>(n_regions);
  for (Eigen::Index i = 0; i < table.values.rows(); ++i) {
    const auto row = table.values.row(i);
    AttributeStats s;
    s.attribute = table.attribute_names[static_cast<std::size_t>(i)];
    s.count = static_cast<std::size_t>(n_regions);
    s.mean = detail::row_mean(row);
    s.std = detail::row_sample_std(row, s.mean);
    s.min = row.minCoeff();
    s.max = row.maxCoeff();
    s.median = detail::median_of(std::vector<double>(row.begin(), row.end()));

    double m2 = 0, m3 = 0, m4 = 0;
    for (Eigen::Index j = 0; j < n_regions; ++j) {
      const double d = row(j) - s.mean;
      const double d2 = d * d;
      m2 += d2;
      m3 += d2 * d;
      m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    if (m2 <= 0.0) {
      s.skewness = nan;
      s.kurtosis = nan;
      out.warnings.push_back("attribute '" + s.attribute + "' is constant; skewness and kurtosis undefined");
    } else {
      const double g1 = m3 / std::pow(m2, 1.5);
      const double g2 = m4 / (m2 * m2) - 3.0;
      s.skewness = n > 2 ? g1 * std::sqrt(n * (n - 1.0)) / (n - 2.0) : nan;
      s.kurtosis = n > 3 ? ((n + 1.0) * g2 + 6.0) * (n - 1.0) / ((n - 2.0) * (n - 3.0)) : nan;
      if (n <= 3)
        out.warnings.push_back("attribute '" + s.attribute + "' has too few observations for skewness/kurtosis");
    }
    out.rows.push_back(std::move(s));
  }
  return out;
}

// Row-wise z-scores with the sample (n - 1) standard deviation.
inline StandardizedMatrix standardize(const Matrix& values, const std::vector<std::string>& attribute_names,
                                      const std::vector<std::string>& region_ids) {
  StandardizedMatrix out;
  out.values.resize(values.rows(), values.cols());
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    const auto row = values.row(i);
    const double mean = detail::row_mean(row);
    const double sd = detail::row_sample_std(row, mean);
    // Relative floor catches rows that are constant up to rounding.
    const double scale = std::max(std::abs(mean), row.cwiseAbs().maxCoeff());
    if (!(sd > 0.0) || sd <= 1e-14 * scale)
      throw ZeroVarianceError(attribute_names.at(static_cast<std::size_t>(i)));
    for (Eigen::Index j = 0; j < values.cols(); ++j) out.values(i, j) = (row(j) - mean) / sd;
  }
  out.attribute_names = attribute_names;
  out.region_ids = region_ids;
  return out;
}

inline StandardizedMatrix standardize(const AttributeTable& table) {
  return standardize(table.values, table.attribute_names, table.region_ids);
}

inline StandardizedMatrix standardize(const StandardizedMatrix& m) {
  return standardize(m.values, m.attribute_names, m.region_ids);
}

}  // namespace uselfa

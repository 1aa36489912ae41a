#pragma once

// Synthetic region-by-attribute data with a planted simple-structure factor
// model, used for demos and recovery tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "uselfa/datamodel.hpp"
#include "uselfa/errors.hpp"
#include "uselfa/format.hpp"

namespace uselfa {

struct PlantedAttribute {
  std::string name;
  double mean = 0;  // raw-unit location
  double std = 1;   // raw-unit scale
  int factor = 0;   // zero-based planted factor
  int sign = 1;
};

// The 25-attribute urban schema with raw-unit scales and the six-group
// planted structure. CMM_POP_RATIO joins the mobility group.
inline std::vector<PlantedAttribute> seoul_schema() {
  return {
      {"HOUS_DEN", 7109.123, 3811.969, 1, 1},       {"FL_POP_DEN", 23216.819, 12506.621, 1, 1},
      {"FOR_POP_DEN", 347.584, 1061.019, 4, 1},     {"CMM_POP_RATIO", 4445.137, 2485.035, 5, 1},
      {"I_POP_RATIO", 0.970, 0.833, 4, 1},          {"DIS_POP_P", 0.041, 0.017, 2, 1},
      {"BEN_POP_P", 0.040, 0.031, 2, 1},            {"SEN_POP_P", 0.182, 0.040, 2, 1},
      {"AVG_INC", 3.308, 1.099, 2, -1},             {"SPEND_P", 2128.242, 10895.023, 0, 1},
      {"TR_EXP_P", 0.067, 0.107, 5, -1},            {"BUS_ST_DEN", 24.289, 12.967, 1, 1},
      {"METRO_COV_P", 0.662, 0.319, 1, 1},          {"METRO_USR_DEN", 5538.780, 11683.466, 0, 1},
      {"BUS_USR_DEN", 465.426, 268.217, 5, 1},      {"PS_DEN", 9794.966, 5851.015, 1, 1},
      {"TOUR_DEN", 1.620, 2.489, 4, 1},             {"CULT_DEN", 4.636, 13.141, 4, 1},
      {"EN_USE_INT", 1.000, 1.001, 0, 1},           {"EMPL_DEN", 11269.860, 12975.330, 0, 1},
      {"LAND_PR", 4.663, 3.092, 0, 1},              {"HELI_DIST", 1.946, 1.486, 3, 1},
      {"HOSP_DIST", 3.421, 2.073, 3, 1},            {"VFR_DIST", 3.103, 2.169, 3, 1},
      {"FS_DIST", 2.037, 1.143, 3, 1},
  };
}

struct SynthConfig {
  std::uint64_t seed = 42;
  std::size_t regions = 426;
  double loading = 0.8;    // planted raw loading magnitude
  double noise_std = 0.3;  // unique-noise standard deviation
  std::size_t decimals = 6;
};

struct SyntheticDataset {
  AttributeTable table;
  // Planted loadings on the raw scale and the correlation-scale loadings the
  // extraction should recover: raw / sqrt(sum of squared raw + noise^2).
  Matrix planted_loadings;
  Matrix expected_loadings;
  std::vector<std::string> header_comments;
};

// x_ij = sum_m l_im f_mj + noise_std * e_ij with e iid standard normal and f
// normal draws made exactly orthonormal over the regions, then mapped to raw
// units as mean + std * x.
inline SyntheticDataset generate_planted(const std::vector<PlantedAttribute>& schema, int num_factors,
                                         const SynthConfig& config) {
  if (schema.empty() || num_factors < 1) throw ConfigError("synthetic schema needs attributes and factors");
  if (config.regions < 1) throw ConfigError("synthetic dataset needs at least one region");
  if (!(config.noise_std >= 0)) throw ConfigError("noise_std must be non-negative");
  const auto n = static_cast<Eigen::Index>(schema.size());
  const auto r = static_cast<Eigen::Index>(config.regions);
  const auto k = static_cast<Eigen::Index>(num_factors);

  SyntheticDataset out;
  out.planted_loadings = Matrix::Zero(n, k);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& a = schema[static_cast<std::size_t>(i)];
    if (a.factor < 0 || a.factor >= num_factors) throw ConfigError("planted factor index out of range");
    out.planted_loadings(i, a.factor) = a.sign * config.loading;
  }
  out.expected_loadings = out.planted_loadings;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double var = out.planted_loadings.row(i).squaredNorm() + config.noise_std * config.noise_std;
    if (var > 0) out.expected_loadings.row(i) /= std::sqrt(var);
  }

  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix factors(k, r);
  for (Eigen::Index j = 0; j < r; ++j)
    for (Eigen::Index m = 0; m < k; ++m) factors(m, j) = normal(rng);
  // Centre and orthonormalize the factor draws so they are exactly
  // uncorrelated with unit variance in the sample; chance correlation
  // between factors is not representable by an orthogonal rotation.
  if (r > k) {
    factors.colwise() -= factors.rowwise().mean();
    Eigen::HouseholderQR<Matrix> qr(factors.transpose());
    Matrix q = qr.householderQ() * Matrix::Identity(r, k);
    const Vector diag = qr.matrixQR().diagonal().head(k);
    for (Eigen::Index m = 0; m < k; ++m)
      if (diag(m) < 0) q.col(m) *= -1.0;  // keep each factor pointing the way it was drawn
    factors = q.transpose() * std::sqrt(static_cast<double>(r - 1));
  }
  Matrix latent = out.planted_loadings * factors;
  for (Eigen::Index j = 0; j < r; ++j)
    for (Eigen::Index i = 0; i < n; ++i) latent(i, j) += config.noise_std * normal(rng);

  auto& t = out.table;
  for (const auto& a : schema) t.attribute_names.push_back(a.name);
  const int width = static_cast<int>(std::to_string(config.regions).size());
  for (Eigen::Index j = 0; j < r; ++j) {
    std::string id = std::to_string(j + 1);
    t.region_ids.push_back("R" + std::string(static_cast<std::size_t>(std::max(0, width - static_cast<int>(id.size()))), '0') + id);
  }
  t.values.resize(n, r);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& a = schema[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < r; ++j) {
      // Round through the text representation so the table equals what the
      // CSV file will contain.
      const auto text = fixed(a.mean + a.std * latent(i, j), config.decimals);
      t.values(i, j) = *detail::parse_number(text);
    }
  }

  out.header_comments.push_back("synthetic planted-factor dataset: seed=" + std::to_string(config.seed) +
                                " regions=" + std::to_string(config.regions) + " factors=" + std::to_string(num_factors) +
                                " loading=" + fixed(config.loading, 6) +
                                " noise_std=" + fixed(config.noise_std, 6));
  out.header_comments.push_back("model: z = L f + noise_std * e (f sample-orthonormal, e iid N(0,1)); value = mean + std * z");
  for (int m = 0; m < num_factors; ++m) {
    std::string line = "planted factor " + std::to_string(m + 1) + ":";
    for (const auto& a : schema)
      if (a.factor == m) line += " " + a.name + "(" + (a.sign > 0 ? "+" : "-") + ")";
    out.header_comments.push_back(line);
  }
  return out;
}

inline SyntheticDataset generate_seoul_like(const SynthConfig& config = {}) {
  return generate_planted(seoul_schema(), 6, config);
}

// N attributes split into k contiguous groups with standardized scales.
inline SyntheticDataset generate_simple_structure(std::size_t num_attributes, int num_factors, const SynthConfig& config) {
  std::vector<PlantedAttribute> schema;
  for (std::size_t i = 0; i < num_attributes; ++i) {
    const int f = static_cast<int>(i * static_cast<std::size_t>(num_factors) / num_attributes);
    schema.push_back({"X" + std::to_string(i + 1), 0.0, 1.0, f, 1});
  }
  return generate_planted(schema, num_factors, config);
}

inline void write_table_csv(std::ostream& os, const AttributeTable& t, std::size_t decimals = 6,
                            const std::vector<std::string>& comments = {}) {
  for (const auto& c : comments) os << "# " << c << '\n';
  os << "region_id";
  for (const auto& a : t.attribute_names) os << ',' << a;
  os << '\n';
  for (Eigen::Index j = 0; j < t.values.cols(); ++j) {
    os << t.region_ids[static_cast<std::size_t>(j)];
    for (Eigen::Index i = 0; i < t.values.rows(); ++i) os << ',' << fixed(t.values(i, j), decimals);
    os << '\n';
  }
}

}  // namespace uselfa

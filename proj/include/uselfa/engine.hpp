#pragma once

// Latent-factor extraction: correlation, squared-multiple-correlation
// communalities, iterative principal-axis factoring, Kaiser retention,
// varimax rotation and regression-method factor scores.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "uselfa/datamodel.hpp"
#include "uselfa/errors.hpp"
#include "uselfa/linalg.hpp"

namespace uselfa {

struct EngineConfig {
  double epsilon = 1e-5;
  int max_iterations = 200;
  double kaiser_threshold = 1.0;
  bool ridge_fallback = false;
  double ridge_delta = 1e-8;
  double condition_limit = 1e12;
  double varimax_tolerance = 1e-8;
  int varimax_max_sweeps = 100;
  bool kaiser_normalization = true;
  // Keep every PAF iteration's eigenvalues, loadings and communalities.
  bool record_history = false;

  InverseOptions inverse_options() const { return {condition_limit, ridge_fallback, ridge_delta}; }
};

struct CorrelationMatrix {
  Matrix values;
  std::vector<std::string> attribute_names;
};

struct CommunalityVector {
  Vector values;
  int iteration_index = 0;
  bool ridge_applied = false;
};

struct PafIteration {
  int index = 0;
  Vector eigenvalues;    // all N eigenvalues of the adjusted matrix, descending
  Matrix loadings;       // N x M, after the Heywood clamp
  Vector communalities;  // the updated estimates produced by this iteration
  double change = 0;     // sum_i |c_new - c_old|
};

struct FactorModel {
  std::vector<std::string> attribute_names;
  std::vector<std::string> labels;  // one per factor; reports and composites key on these

  Matrix unrotated_loadings;  // N x M
  Matrix rotated_loadings;    // N x M
  Matrix rotation;            // M x M, rotated = unrotated * rotation
  Vector eigenvalues;         // retained eigenvalues at selection time (first iteration)
  Vector final_eigenvalues;   // same factors at the last iteration
  CommunalityVector communalities;
  Matrix scoring_weights;  // M x N, empty until computed
  int iterations_used = 0;
  bool converged = false;
  int varimax_sweeps = 0;
  Vector variance_percent;
  Vector cumulative_variance_percent;
  std::vector<std::string> warnings;
  std::vector<PafIteration> history;

  Eigen::Index num_factors() const { return unrotated_loadings.cols(); }
  Eigen::Index num_attributes() const { return unrotated_loadings.rows(); }
};

struct FactorScores {
  Matrix values;  // M x R
  std::vector<std::string> labels;
  std::vector<std::string> region_ids;
};

struct AttributeAssignment {
  std::string attribute;
  Eigen::Index factor = 0;  // zero-based column index
  double loading = 0;
};

struct DominantAttributeMap {
  std::vector<AttributeAssignment> by_attribute;
  std::vector<std::vector<std::size_t>> by_factor;  // attribute indices, descending |loading|
  std::vector<std::string> ties;
};

inline std::vector<std::string> default_factor_labels(Eigen::Index m) {
  std::vector<std::string> labels;
  for (Eigen::Index k = 0; k < m; ++k) labels.push_back(std::to_string(k + 1));
  return labels;
}

// Percent of total standardized variance per factor and its running sum.
inline std::pair<Vector, Vector> variance_accounting(std::span<const double> eigenvalues, std::size_t num_attributes) {
  const auto m = static_cast<Eigen::Index>(eigenvalues.size());
  Vector pct(m), cum(m);
  double running = 0;
  for (Eigen::Index k = 0; k < m; ++k) {
    pct(k) = eigenvalues[static_cast<std::size_t>(k)] / static_cast<double>(num_attributes) * 100.0;
    running += pct(k);
    cum(k) = running;
  }
  return {pct, cum};
}

inline CorrelationMatrix correlation(const StandardizedMatrix& a) {
  const auto r = a.values.cols();
  if (r < 2) throw DegenerateDataError("correlation needs at least two regions");
  CorrelationMatrix out;
  out.values = (a.values * a.values.transpose()) / static_cast<double>(r - 1);
  out.values = (0.5 * (out.values + out.values.transpose())).eval();
  out.values.diagonal().setOnes();
  out.attribute_names = a.attribute_names;
  return out;
}

// c_i = 1 - 1 / (R^-1)_ii
inline CommunalityVector initial_communalities(const CorrelationMatrix& rm, const EngineConfig& config = {}) {
  const auto inv = spd_inverse(rm.values, config.inverse_options(), "correlation matrix");
  CommunalityVector c;
  c.values.resize(rm.values.rows());
  for (Eigen::Index i = 0; i < rm.values.rows(); ++i)
    c.values(i) = std::clamp(1.0 - 1.0 / inv.inverse(i, i), 0.0, 1.0);
  c.iteration_index = 0;
  c.ridge_applied = inv.ridge_applied;
  return c;
}

// Iterative principal-axis factoring. The factor count is fixed from the
// first adjusted matrix and held for every later iteration. Returns a model
// whose rotated part is the unrotated loadings with an identity rotation.
inline FactorModel paf_iterate(const CorrelationMatrix& rm, const CommunalityVector& c0, const EngineConfig& config = {}) {
  const Eigen::Index n = rm.values.rows();
  if (rm.values.cols() != n || c0.values.size() != n)
    throw DimensionMismatchError("paf_iterate: correlation and communality sizes differ");
  if (!(config.epsilon > 0)) throw ConfigError("epsilon must be positive");
  if (config.max_iterations < 1) throw ConfigError("max_iterations must be at least 1");

  FactorModel model;
  model.attribute_names = rm.attribute_names;
  if (c0.ridge_applied) model.warnings.push_back("ridge regularization applied to the correlation matrix for SMC");

  Vector current = c0.values;
  Eigen::Index m = -1;
  Matrix loadings;
  Vector retained_now;
  std::vector<bool> heywood_reported(static_cast<std::size_t>(n), false);

  for (int k = 0; k < config.max_iterations; ++k) {
    Matrix adjusted = rm.values;
    adjusted.diagonal() = current;
    const auto eig = symmetric_eigen(adjusted);

    if (m < 0) {
      m = 0;
      while (m < n && eig.values(m) >= config.kaiser_threshold) ++m;
      if (m == 0)
        throw NoFactorRetainedError("no eigenvalue of the adjusted correlation matrix reaches the Kaiser threshold " +
                                    std::to_string(config.kaiser_threshold) + " (largest " +
                                    std::to_string(n ? eig.values(0) : 0.0) + ")");
      model.eigenvalues = eig.values.head(m);
    }

    Matrix vectors = eig.vectors.leftCols(m);
    const auto signs = canonical_column_signs(vectors);
    loadings.resize(n, m);
    for (Eigen::Index f = 0; f < m; ++f) {
      const double root = std::sqrt(std::max(eig.values(f), 0.0));
      loadings.col(f) = vectors.col(f) * (root * signs[static_cast<std::size_t>(f)]);
    }
    retained_now = eig.values.head(m);

    Vector updated = loadings.rowwise().squaredNorm();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (updated(i) > 1.0) {
        // Heywood case: pull the row back onto the unit sphere so the
        // communality stays the row sum of squared loadings.
        loadings.row(i) /= std::sqrt(updated(i));
        updated(i) = 1.0;
        if (!heywood_reported[static_cast<std::size_t>(i)]) {
          heywood_reported[static_cast<std::size_t>(i)] = true;
          model.warnings.push_back("Heywood case: communality of '" +
                                   (i < static_cast<Eigen::Index>(rm.attribute_names.size())
                                        ? rm.attribute_names[static_cast<std::size_t>(i)]
                                        : std::to_string(i + 1)) +
                                   "' exceeded 1 at iteration " + std::to_string(k + 1) + " and was clamped");
        }
      }
    }
    const double change = (updated - current).cwiseAbs().sum();
    if (config.record_history) model.history.push_back({k + 1, eig.values, loadings, updated, change});
    current = updated;
    model.iterations_used = k + 1;
    if (change < config.epsilon) {
      model.converged = true;
      break;
    }
  }
  if (!model.converged)
    model.warnings.push_back("principal-axis factoring did not converge within " +
                             std::to_string(config.max_iterations) + " iterations");

  model.labels = default_factor_labels(m);
  model.unrotated_loadings = loadings;
  model.rotated_loadings = loadings;
  model.rotation = Matrix::Identity(m, m);
  model.final_eigenvalues = retained_now;
  model.communalities.values = current;
  model.communalities.iteration_index = model.iterations_used;
  std::tie(model.variance_percent, model.cumulative_variance_percent) = variance_accounting(
      std::span<const double>(model.eigenvalues.data(), static_cast<std::size_t>(model.eigenvalues.size())),
      static_cast<std::size_t>(n));
  return model;
}

// Rows scaled to unit length; zero rows are left untouched.
inline Matrix kaiser_normalize(const Matrix& loadings, Vector* row_norms = nullptr) {
  Vector h = loadings.rowwise().norm();
  Matrix out = loadings;
  for (Eigen::Index i = 0; i < out.rows(); ++i)
    if (h(i) > 0) out.row(i) /= h(i);
  if (row_norms) *row_norms = h;
  return out;
}

// Sum over factors of the variance of squared loadings.
inline double varimax_criterion(const Matrix& loadings) {
  const double n = static_cast<double>(loadings.rows());
  if (n == 0) return 0;
  double total = 0;
  for (Eigen::Index m = 0; m < loadings.cols(); ++m) {
    const auto sq = loadings.col(m).array().square();
    const double s2 = sq.sum();
    const double s4 = sq.square().sum();
    total += (n * s4 - s2 * s2) / (n * n);
  }
  return total;
}

struct VarimaxResult {
  Matrix rotated;
  Matrix rotation;
  int sweeps = 0;
  // Criterion (on the normalized loadings when normalization is on) before
  // the first sweep and after each sweep.
  std::vector<double> criterion_trace;
};

struct VarimaxOptions {
  double tolerance = 1e-8;
  int max_sweeps = 100;
  bool kaiser_normalization = true;
};

// Pairwise planar rotations; each pair angle maximizes the criterion in
// closed form. Stops once a full sweep improves the criterion by less than
// the tolerance.
inline VarimaxResult varimax(const Matrix& loadings, const VarimaxOptions& opt = {}) {
  const Eigen::Index n = loadings.rows();
  const Eigen::Index m = loadings.cols();
  if (m < 1) throw DimensionMismatchError("varimax: no factors");
  VarimaxResult out;
  out.rotation = Matrix::Identity(m, m);
  Matrix x = opt.kaiser_normalization ? kaiser_normalize(loadings) : loadings;
  double crit = varimax_criterion(x);
  out.criterion_trace.push_back(crit);
  if (m == 1) {
    out.rotated = loadings;
    return out;
  }
  const double nd = static_cast<double>(n);
  for (int sweep = 0; sweep < opt.max_sweeps; ++sweep) {
    for (Eigen::Index p = 0; p < m - 1; ++p) {
      for (Eigen::Index q = p + 1; q < m; ++q) {
        double a = 0, b = 0, c = 0, d = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
          const double xi = x(i, p), yi = x(i, q);
          const double u = xi * xi - yi * yi;
          const double v = 2.0 * xi * yi;
          a += u;
          b += v;
          c += u * u - v * v;
          d += 2.0 * u * v;
        }
        const double num = d - 2.0 * a * b / nd;
        const double den = c - (a * a - b * b) / nd;
        const double phi = 0.25 * std::atan2(num, den);
        if (std::abs(phi) < 1e-15) continue;
        const double cs = std::cos(phi), sn = std::sin(phi);
        for (Eigen::Index i = 0; i < n; ++i) {
          const double xi = x(i, p), yi = x(i, q);
          x(i, p) = cs * xi + sn * yi;
          x(i, q) = -sn * xi + cs * yi;
        }
        for (Eigen::Index i = 0; i < m; ++i) {
          const double vp = out.rotation(i, p), vq = out.rotation(i, q);
          out.rotation(i, p) = cs * vp + sn * vq;
          out.rotation(i, q) = -sn * vp + cs * vq;
        }
      }
    }
    out.sweeps = sweep + 1;
    const double next = varimax_criterion(x);
    out.criterion_trace.push_back(next);
    const double gain = next - crit;
    crit = next;
    if (gain < opt.tolerance) break;
  }
  out.rotated = loadings * out.rotation;
  return out;
}

inline FactorModel rotate(FactorModel model, const EngineConfig& config = {}) {
  const auto vr = varimax(model.unrotated_loadings,
                          {config.varimax_tolerance, config.varimax_max_sweeps, config.kaiser_normalization});
  model.rotated_loadings = vr.rotated;
  model.rotation = vr.rotation;
  model.varimax_sweeps = vr.sweeps;
  if (model.num_factors() > 1 && vr.sweeps >= config.varimax_max_sweeps)
    model.warnings.push_back("varimax reached the sweep cap of " + std::to_string(config.varimax_max_sweeps));
  return model;
}

// Makes the largest-magnitude rotated loading of every factor positive,
// flipping the matching rotation column and scoring-weight row with it.
inline FactorModel sign_canonicalize(FactorModel model) {
  const auto signs = canonical_column_signs(model.rotated_loadings);
  for (std::size_t f = 0; f < signs.size(); ++f) {
    if (signs[f] > 0) continue;
    const auto col = static_cast<Eigen::Index>(f);
    model.rotated_loadings.col(col) *= -1.0;
    model.rotation.col(col) *= -1.0;
    if (model.scoring_weights.rows() == model.num_factors()) model.scoring_weights.row(col) *= -1.0;
  }
  return model;
}

struct ScoringWeights {
  Matrix weights;  // M x N
  bool ridge_applied = false;
};

// B = (L' R^-1 L)^-1 L' R^-1
inline ScoringWeights scoring_weights(const CorrelationMatrix& rm, const Matrix& loadings, const EngineConfig& config = {}) {
  if (loadings.rows() != rm.values.rows())
    throw DimensionMismatchError("scoring_weights: loadings have " + std::to_string(loadings.rows()) +
                                 " rows, correlation matrix has " + std::to_string(rm.values.rows()));
  const auto inv = spd_inverse(rm.values, config.inverse_options(), "correlation matrix");
  const Matrix lt_rinv = loadings.transpose() * inv.inverse;
  const Matrix gram = lt_rinv * loadings;
  Eigen::FullPivLU<Matrix> lu(gram);
  if (!lu.isInvertible()) throw SingularCorrelationError("L' R^-1 L is singular");
  ScoringWeights out;
  out.weights = lu.solve(lt_rinv);
  out.ridge_applied = inv.ridge_applied;
  return out;
}

// F = B A
inline FactorScores factor_scores(const Matrix& weights, const StandardizedMatrix& a,
                                  std::vector<std::string> labels = {}) {
  if (weights.cols() != a.values.rows())
    throw DimensionMismatchError("factor_scores: weights have " + std::to_string(weights.cols()) +
                                 " columns, data has " + std::to_string(a.values.rows()) + " attributes");
  FactorScores out;
  out.values = weights * a.values;
  out.labels = labels.empty() ? default_factor_labels(weights.rows()) : std::move(labels);
  out.region_ids = a.region_ids;
  return out;
}

// Assigns every attribute to the factor with the largest |loading|; exact
// ties go to the lowest factor index and are reported.
inline DominantAttributeMap dominant_attributes(const Matrix& loadings, const std::vector<std::string>& names = {}) {
  DominantAttributeMap out;
  out.by_factor.resize(static_cast<std::size_t>(loadings.cols()));
  for (Eigen::Index i = 0; i < loadings.rows(); ++i) {
    const std::string name =
        i < static_cast<Eigen::Index>(names.size()) ? names[static_cast<std::size_t>(i)] : std::to_string(i + 1);
    Eigen::Index best = 0;
    for (Eigen::Index f = 1; f < loadings.cols(); ++f)
      if (std::abs(loadings(i, f)) > std::abs(loadings(i, best))) best = f;
    for (Eigen::Index f = best + 1; f < loadings.cols(); ++f) {
      if (std::abs(loadings(i, f)) == std::abs(loadings(i, best))) {
        out.ties.push_back("attribute '" + name + "' ties between factors " + std::to_string(best + 1) + " and " +
                           std::to_string(f + 1) + "; assigned to " + std::to_string(best + 1));
      }
    }
    out.by_attribute.push_back({name, best, loadings(i, best)});
    out.by_factor[static_cast<std::size_t>(best)].push_back(static_cast<std::size_t>(i));
  }
  for (auto& list : out.by_factor) {
    std::stable_sort(list.begin(), list.end(), [&](std::size_t x, std::size_t y) {
      return std::abs(out.by_attribute[x].loading) > std::abs(out.by_attribute[y].loading);
    });
  }
  return out;
}

struct FitResult {
  CorrelationMatrix correlation;
  FactorModel model;
  FactorScores scores;
  DominantAttributeMap dominant;
};

// standardize -> correlation -> SMC -> PAF -> varimax -> sign canonicalization
// -> scoring weights -> scores.
inline FitResult fit(const StandardizedMatrix& a, const EngineConfig& config = {}) {
  FitResult out;
  out.correlation = correlation(a);
  const auto c0 = initial_communalities(out.correlation, config);
  auto model = sign_canonicalize(rotate(paf_iterate(out.correlation, c0, config), config));
  const auto weights = scoring_weights(out.correlation, model.rotated_loadings, config);
  if (weights.ridge_applied)
    model.warnings.push_back("ridge regularization applied to the correlation matrix for scoring weights");
  model.scoring_weights = weights.weights;
  out.dominant = dominant_attributes(model.rotated_loadings, model.attribute_names);
  for (const auto& t : out.dominant.ties) model.warnings.push_back("dominant-attribute tie: " + t);
  out.scores = factor_scores(model.scoring_weights, a, model.labels);
  out.model = std::move(model);
  return out;
}

inline FitResult fit(const AttributeTable& table, const EngineConfig& config = {}) {
  return fit(standardize(table), config);
}

}  // namespace uselfa

#pragma once

// Suitability / attractiveness composites, v-scores, quadrant typology,
// rankings, per-factor contribution shares and (alpha, theta) sweeps.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "uselfa/engine.hpp"
#include "uselfa/errors.hpp"

namespace uselfa {

enum class Dimension { Suitability, Attractiveness };

inline std::string to_string(Dimension d) { return d == Dimension::Suitability ? "suitability" : "attractiveness"; }

inline Dimension parse_dimension(const std::string& s) {
  if (s == "suitability" || s == "S") return Dimension::Suitability;
  if (s == "attractiveness" || s == "A") return Dimension::Attractiveness;
  throw IncompleteDefinitionError("unknown composite dimension '" + s + "'");
}

struct CompositeEntry {
  std::string label;
  Dimension dimension = Dimension::Suitability;
  int sign = 1;
  std::string note;
};

struct CompositeDefinition {
  std::vector<CompositeEntry> entries;
};

// Factor split and impact directions of the six-factor urban model:
// 1 economic dynamism (A, +), 2 community preparedness (S, -),
// 3 societal equity (S, +), 4 operation preparedness (S, -),
// 5 urban vibrancy (A, +), 6 mobility patterns (A, +).
inline CompositeDefinition default_composite_definition() {
  using D = Dimension;
  return {{{"1", D::Attractiveness, +1, "economic dynamism"},
           {"2", D::Suitability, -1, "community preparedness"},
           {"3", D::Suitability, +1, "societal equity"},
           {"4", D::Suitability, -1, "operation preparedness"},
           {"5", D::Attractiveness, +1, "urban vibrancy"},
           {"6", D::Attractiveness, +1, "mobility patterns"}}};
}

// Drops the impact signs, giving the plain {0, 1} assignment matrix.
inline CompositeDefinition binary(CompositeDefinition def) {
  for (auto& e : def.entries) e.sign = 1;
  return def;
}

struct ResolvedComposite {
  std::vector<Dimension> dimension;  // per factor row of F
  std::vector<int> sign;
};

// Orders the definition by the factor labels and checks it is a complete,
// disjoint assignment of exactly those factors.
inline ResolvedComposite resolve(const CompositeDefinition& def, const std::vector<std::string>& labels) {
  std::unordered_map<std::string, const CompositeEntry*> by_label;
  for (const auto& e : def.entries) {
    if (e.sign != 1 && e.sign != -1)
      throw IncompleteDefinitionError("factor '" + e.label + "' has sign " + std::to_string(e.sign) + "; expected +1 or -1");
    if (!by_label.emplace(e.label, &e).second)
      throw IncompleteDefinitionError("factor '" + e.label + "' assigned more than once");
  }
  ResolvedComposite out;
  for (const auto& l : labels) {
    auto it = by_label.find(l);
    if (it == by_label.end()) throw IncompleteDefinitionError("factor '" + l + "' missing from composite definition");
    out.dimension.push_back(it->second->dimension);
    out.sign.push_back(it->second->sign);
  }
  if (def.entries.size() != labels.size())
    throw IncompleteDefinitionError("composite definition covers " + std::to_string(def.entries.size()) +
                                    " factors but the model has " + std::to_string(labels.size()));
  return out;
}

struct CompositeScores {
  std::vector<std::string> region_ids;
  Vector suitability;
  Vector attractiveness;

  std::size_t size() const { return region_ids.size(); }
};

inline CompositeScores composite_scores(const FactorScores& f, const CompositeDefinition& def) {
  const auto labels = f.labels.empty() ? default_factor_labels(f.values.rows()) : f.labels;
  if (static_cast<Eigen::Index>(labels.size()) != f.values.rows())
    throw DimensionMismatchError("factor score labels do not match factor count");
  const auto rc = resolve(def, labels);
  CompositeScores out;
  out.region_ids = f.region_ids;
  out.suitability = Vector::Zero(f.values.cols());
  out.attractiveness = Vector::Zero(f.values.cols());
  for (Eigen::Index m = 0; m < f.values.rows(); ++m) {
    const double s = rc.sign[static_cast<std::size_t>(m)];
    auto& target = rc.dimension[static_cast<std::size_t>(m)] == Dimension::Suitability ? out.suitability
                                                                                        : out.attractiveness;
    target += s * f.values.row(m).transpose();
  }
  return out;
}

inline void check_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw AlphaRangeError("alpha must lie in [0, 1], got " + std::to_string(alpha));
}

inline double v_score(double suitability, double attractiveness, double alpha) {
  check_alpha(alpha);
  return alpha * suitability + (1.0 - alpha) * attractiveness;
}

inline Vector v_scores(const CompositeScores& cs, double alpha) {
  check_alpha(alpha);
  Vector v(cs.suitability.size());
  for (Eigen::Index j = 0; j < v.size(); ++j) v(j) = alpha * cs.suitability(j) + (1.0 - alpha) * cs.attractiveness(j);
  return v;
}

enum class Quadrant { BothHigh, SuitabilityBiased, AttractivenessBiased, BothLow };
enum class Typology { Balanced, SuitabilityBiased, AttractivenessBiased, None };

inline std::string to_string(Quadrant q) {
  switch (q) {
    case Quadrant::BothHigh: return "both_high";
    case Quadrant::SuitabilityBiased: return "suitability_biased";
    case Quadrant::AttractivenessBiased: return "attractiveness_biased";
    case Quadrant::BothLow: return "both_low";
  }
  return "both_low";
}

inline std::string to_string(Typology t) {
  switch (t) {
    case Typology::Balanced: return "balanced";
    case Typology::SuitabilityBiased: return "suitability_biased";
    case Typology::AttractivenessBiased: return "attractiveness_biased";
    case Typology::None: return "none";
  }
  return "none";
}

struct TypologyConfig {
  double balance_band = 0.1;
  double bias_band = 0.5;
};

struct QuadrantResult {
  double median_suitability = 0;
  double median_attractiveness = 0;
  Vector suitability_rank;  // rank-normalized into (0, 1)
  Vector attractiveness_rank;
  std::vector<Quadrant> quadrant;
  std::vector<Typology> typology;
};

// Mid-ranks (ties share their average rank) mapped to (rank - 0.5) / n.
inline Vector rank_normalize(const Vector& x) {
  const auto n = x.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return x(a) < x(b); });
  Vector out(n);
  for (Eigen::Index i = 0; i < n;) {
    Eigen::Index j = i;
    while (j + 1 < n && x(order[static_cast<std::size_t>(j + 1)]) == x(order[static_cast<std::size_t>(i)])) ++j;
    const double mid_rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (Eigen::Index k = i; k <= j; ++k) out(order[static_cast<std::size_t>(k)]) = (mid_rank - 0.5) / static_cast<double>(n);
    i = j + 1;
  }
  return out;
}

inline double median(const Vector& x) { return detail::median_of(std::vector<double>(x.begin(), x.end())); }

// Quadrants split at the medians; a score equal to its median counts as high.
// Balanced requires the high/high quadrant and a rank gap within
// balance_band; the biased typologies need a rank gap above bias_band.
inline QuadrantResult quadrant_classify(const CompositeScores& cs, const TypologyConfig& config = {}) {
  const auto r = cs.suitability.size();
  if (r < 1) throw DegenerateDataError("quadrant_classify needs at least one region");
  QuadrantResult out;
  out.median_suitability = median(cs.suitability);
  out.median_attractiveness = median(cs.attractiveness);
  out.suitability_rank = rank_normalize(cs.suitability);
  out.attractiveness_rank = rank_normalize(cs.attractiveness);
  for (Eigen::Index j = 0; j < r; ++j) {
    const bool s_high = cs.suitability(j) >= out.median_suitability;
    const bool a_high = cs.attractiveness(j) >= out.median_attractiveness;
    Quadrant q = s_high ? (a_high ? Quadrant::BothHigh : Quadrant::SuitabilityBiased)
                        : (a_high ? Quadrant::AttractivenessBiased : Quadrant::BothLow);
    const double gap = out.suitability_rank(j) - out.attractiveness_rank(j);
    Typology t = Typology::None;
    if (q == Quadrant::BothHigh && std::abs(gap) <= config.balance_band) t = Typology::Balanced;
    else if (gap > config.bias_band) t = Typology::SuitabilityBiased;
    else if (-gap > config.bias_band) t = Typology::AttractivenessBiased;
    out.quadrant.push_back(q);
    out.typology.push_back(t);
  }
  return out;
}

struct SweepGrid {
  std::vector<double> alphas;
  std::vector<double> thetas;
  std::vector<std::vector<std::size_t>> counts;  // [theta][alpha]
  std::vector<std::vector<double>> percentages;
  std::size_t regions = 0;
};

// counts[t][k] = #{ j : v_j(alpha_k) > theta_t }
inline SweepGrid sweep(const CompositeScores& cs, std::span<const double> alphas, std::span<const double> thetas) {
  if (alphas.empty() || thetas.empty()) throw GridError("sweep needs non-empty alpha and theta grids");
  for (double a : alphas) check_alpha(a);
  SweepGrid g;
  g.alphas.assign(alphas.begin(), alphas.end());
  g.thetas.assign(thetas.begin(), thetas.end());
  g.regions = cs.size();
  g.counts.assign(thetas.size(), std::vector<std::size_t>(alphas.size(), 0));
  g.percentages.assign(thetas.size(), std::vector<double>(alphas.size(), 0.0));
  for (std::size_t k = 0; k < alphas.size(); ++k) {
    const Vector v = v_scores(cs, alphas[k]);
    for (std::size_t t = 0; t < thetas.size(); ++t) {
      std::size_t c = 0;
      for (Eigen::Index j = 0; j < v.size(); ++j)
        if (v(j) > thetas[t]) ++c;
      g.counts[t][k] = c;
      g.percentages[t][k] = g.regions ? static_cast<double>(c) / static_cast<double>(g.regions) * 100.0 : 0.0;
    }
  }
  return g;
}

struct RankedRegion {
  std::string region_id;
  double value = 0;
  std::size_t index = 0;
};

// Descending by value; equal values ordered by region_id.
inline std::vector<RankedRegion> top_k(const std::vector<std::string>& region_ids, const Vector& values, std::size_t k) {
  if (static_cast<Eigen::Index>(region_ids.size()) != values.size())
    throw DimensionMismatchError("top_k: region and value counts differ");
  if (k < 1 || k > region_ids.size())
    throw KRangeError("k must lie in [1, " + std::to_string(region_ids.size()) + "], got " + std::to_string(k));
  std::vector<std::size_t> order(region_ids.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double va = values(static_cast<Eigen::Index>(a)), vb = values(static_cast<Eigen::Index>(b));
    if (va != vb) return va > vb;
    return region_ids[a] < region_ids[b];
  });
  std::vector<RankedRegion> out;
  for (std::size_t r = 0; r < k; ++r)
    out.push_back({region_ids[order[r]], values(static_cast<Eigen::Index>(order[r])), order[r]});
  return out;
}

enum class RankKey { Suitability, Attractiveness, VScore };

inline std::vector<RankedRegion> top_k(const CompositeScores& cs, std::size_t k, RankKey key, double alpha = 0.5) {
  switch (key) {
    case RankKey::Suitability: return top_k(cs.region_ids, cs.suitability, k);
    case RankKey::Attractiveness: return top_k(cs.region_ids, cs.attractiveness, k);
    case RankKey::VScore: return top_k(cs.region_ids, v_scores(cs, alpha), k);
  }
  return {};
}

struct Contribution {
  std::string region_id;
  std::vector<double> percent;  // per factor, sums to 100
};

// Share of each factor in a region's total absolute signed factor score.
inline std::vector<Contribution> factor_contributions(const FactorScores& f, const CompositeDefinition& def,
                                                      const std::vector<std::string>& regions) {
  const auto labels = f.labels.empty() ? default_factor_labels(f.values.rows()) : f.labels;
  const auto rc = resolve(def, labels);
  std::unordered_map<std::string, Eigen::Index> column;
  for (std::size_t j = 0; j < f.region_ids.size(); ++j) column.emplace(f.region_ids[j], static_cast<Eigen::Index>(j));
  std::vector<Contribution> out;
  for (const auto& id : regions) {
    auto it = column.find(id);
    if (it == column.end()) throw LookupError("unknown region '" + id + "'");
    Contribution c{id, {}};
    double total = 0;
    for (Eigen::Index m = 0; m < f.values.rows(); ++m) {
      const double part = std::abs(rc.sign[static_cast<std::size_t>(m)] * f.values(m, it->second));
      c.percent.push_back(part);
      total += part;
    }
    if (!(total > 0)) throw ZeroDenominatorError("all factor scores of region '" + id + "' are zero");
    for (auto& p : c.percent) p = p / total * 100.0;
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace uselfa

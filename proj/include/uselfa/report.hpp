#pragma once

// CSV writers for every run artifact. Numbers use 6 decimals unless noted.

#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include "uselfa/composite.hpp"
#include "uselfa/datamodel.hpp"
#include "uselfa/engine.hpp"
#include "uselfa/format.hpp"

namespace uselfa {

inline void write_stats_csv(std::ostream& os, const DescriptiveStats& stats) {
  os << "attribute,count,mean,std,min,median,max,skewness,kurtosis\n";
  for (const auto& s : stats.rows) {
    os << s.attribute << ',' << s.count << ',' << fixed(s.mean) << ',' << fixed(s.std) << ',' << fixed(s.min) << ','
       << fixed(s.median) << ',' << fixed(s.max) << ',' << fixed(s.skewness) << ',' << fixed(s.kurtosis) << '\n';
  }
}

inline void write_provenance(std::ostream& os, const AttributeTable& t) {
  for (const auto& p : t.provenance) os << p.region_id << ',' << p.attribute << ',' << p.action << '\n';
}

inline void write_loadings_csv(std::ostream& os, const FactorModel& model, const DominantAttributeMap& dominant) {
  os << "attribute";
  for (const auto& l : model.labels) os << ",factor_" << l;
  os << ",communality,dominant_factor\n";
  for (Eigen::Index i = 0; i < model.rotated_loadings.rows(); ++i) {
    os << model.attribute_names[static_cast<std::size_t>(i)];
    for (Eigen::Index m = 0; m < model.rotated_loadings.cols(); ++m) os << ',' << fixed(model.rotated_loadings(i, m));
    const auto f = dominant.by_attribute[static_cast<std::size_t>(i)].factor;
    os << ',' << fixed(model.communalities.values(i)) << ',' << model.labels[static_cast<std::size_t>(f)] << '\n';
  }
}

inline void write_eigenvalues_csv(std::ostream& os, const FactorModel& model) {
  os << "factor,eigenvalue,pct_variance,cumulative_pct\n";
  for (Eigen::Index m = 0; m < model.eigenvalues.size(); ++m) {
    os << model.labels[static_cast<std::size_t>(m)] << ',' << fixed(model.eigenvalues(m)) << ','
       << fixed(model.variance_percent(m)) << ',' << fixed(model.cumulative_variance_percent(m)) << '\n';
  }
}

inline void write_weights_csv(std::ostream& os, const FactorModel& model) {
  os << "factor";
  for (const auto& a : model.attribute_names) os << ',' << a;
  os << '\n';
  for (Eigen::Index m = 0; m < model.scoring_weights.rows(); ++m) {
    os << model.labels[static_cast<std::size_t>(m)];
    for (Eigen::Index i = 0; i < model.scoring_weights.cols(); ++i) os << ',' << fixed(model.scoring_weights(m, i));
    os << '\n';
  }
}

inline void write_scores_csv(std::ostream& os, const FactorScores& f, const CompositeScores& cs, const Vector& v,
                             const QuadrantResult& q) {
  os << "region_id";
  for (const auto& l : f.labels) os << ",f_" << l;
  os << ",suitability,attractiveness,v_score,quadrant,typology\n";
  for (std::size_t j = 0; j < cs.region_ids.size(); ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    os << cs.region_ids[j];
    for (Eigen::Index m = 0; m < f.values.rows(); ++m) os << ',' << fixed(f.values(m, jj));
    os << ',' << fixed(cs.suitability(jj)) << ',' << fixed(cs.attractiveness(jj)) << ',' << fixed(v(jj)) << ','
       << to_string(q.quadrant[j]) << ',' << to_string(q.typology[j]) << '\n';
  }
}

// Rows are thetas, columns alphas, cells `count (pct%)` with one decimal.
inline void write_sweep_wide_csv(std::ostream& os, const SweepGrid& g) {
  os << "theta";
  for (double a : g.alphas) os << ',' << grid_label(a);
  os << '\n';
  for (std::size_t t = 0; t < g.thetas.size(); ++t) {
    os << grid_label(g.thetas[t]);
    for (std::size_t k = 0; k < g.alphas.size(); ++k)
      os << ',' << g.counts[t][k] << " (" << fixed(g.percentages[t][k], 1) << "%)";
    os << '\n';
  }
}

inline void write_sweep_long_csv(std::ostream& os, const SweepGrid& g) {
  os << "theta,alpha,count,pct\n";
  for (std::size_t t = 0; t < g.thetas.size(); ++t)
    for (std::size_t k = 0; k < g.alphas.size(); ++k)
      os << grid_label(g.thetas[t]) << ',' << grid_label(g.alphas[k]) << ',' << g.counts[t][k] << ','
         << fixed(g.percentages[t][k]) << '\n';
}

struct RankingBlock {
  std::string key;  // e.g. "suitability" or "v_score@0.4"
  std::vector<RankedRegion> regions;
};

inline void write_ranking_csv(std::ostream& os, const std::vector<RankingBlock>& blocks) {
  os << "key,rank,region_id,value\n";
  for (const auto& b : blocks)
    for (std::size_t r = 0; r < b.regions.size(); ++r)
      os << b.key << ',' << r + 1 << ',' << b.regions[r].region_id << ',' << fixed(b.regions[r].value) << '\n';
}

inline void write_contributions_csv(std::ostream& os, const std::vector<std::string>& labels,
                                    const std::vector<Contribution>& rows) {
  os << "region_id";
  for (const auto& l : labels) os << ",pct_f_" << l;
  os << '\n';
  for (const auto& c : rows) {
    os << c.region_id;
    for (double p : c.percent) os << ',' << fixed(p);
    os << '\n';
  }
}

}  // namespace uselfa

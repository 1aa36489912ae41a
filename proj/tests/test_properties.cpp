// Randomized invariant checks. Every property runs on kInstances independent
// random inputs drawn from a fixed seed.

#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "test_support.hpp"
#include "uselfa/composite.hpp"
#include "uselfa/synth.hpp"

using namespace uselfa;

namespace {

constexpr int kInstances = 100;

Matrix random_loadings(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> rows(4, 15), cols(2, 5);
  std::uniform_real_distribution<double> u(-0.95, 0.95);
  const int m = cols(rng);
  Matrix l(std::max(rows(rng), m + 1), m);
  for (Eigen::Index i = 0; i < l.size(); ++i) l.data()[i] = u(rng);
  return l;
}

// A planted simple-structure table that the engine can always factor.
AttributeTable random_table(std::mt19937_64& rng, int* factors = nullptr) {
  std::uniform_int_distribution<int> k_dist(1, 3), per(3, 5), regions(60, 160);
  const int k = k_dist(rng);
  const auto n = static_cast<std::size_t>(k * per(rng));
  SynthConfig cfg;
  cfg.seed = rng();
  cfg.regions = static_cast<std::size_t>(regions(rng));
  cfg.loading = 0.8;
  cfg.noise_std = 0.6;
  if (factors) *factors = k;
  return generate_simple_structure(n, k, cfg).table;
}

CompositeScores random_scores(std::mt19937_64& rng, bool with_ties = false) {
  std::uniform_int_distribution<int> size(1, 80);
  std::normal_distribution<double> n(0.0, 1.5);
  std::uniform_int_distribution<int> coarse(-3, 3);
  CompositeScores cs;
  const int r = size(rng);
  cs.suitability.resize(r);
  cs.attractiveness.resize(r);
  for (int j = 0; j < r; ++j) {
    cs.region_ids.push_back("g" + std::to_string(rng() % 1000) + "_" + std::to_string(j));
    cs.suitability(j) = with_ties ? coarse(rng) : n(rng);
    cs.attractiveness(j) = with_ties ? coarse(rng) : n(rng);
  }
  return cs;
}

class Properties : public ::testing::Test {
 protected:
  std::mt19937_64 rng{20240611};
};

}  // namespace

TEST_F(Properties, RotationIsOrthogonal) {
  for (int t = 0; t < kInstances; ++t) {
    const auto v = varimax(random_loadings(rng));
    const Matrix vtv = v.rotation.transpose() * v.rotation;
    EXPECT_LT((vtv - Matrix::Identity(vtv.rows(), vtv.cols())).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST_F(Properties, RotationPreservesCommunalities) {
  for (int t = 0; t < kInstances; ++t) {
    const Matrix l = random_loadings(rng);
    const auto v = varimax(l);
    EXPECT_LT((l.rowwise().squaredNorm() - v.rotated.rowwise().squaredNorm()).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST_F(Properties, VarimaxCriterionNonDecreasing) {
  for (int t = 0; t < kInstances; ++t) {
    const auto v = varimax(random_loadings(rng));
    for (std::size_t k = 1; k < v.criterion_trace.size(); ++k)
      EXPECT_GE(v.criterion_trace[k], v.criterion_trace[k - 1] - 1e-14);
  }
}

TEST_F(Properties, EigenpairResiduals) {
  std::uniform_real_distribution<double> u(-1, 1);
  for (int t = 0; t < kInstances; ++t) {
    const auto n = static_cast<Eigen::Index>(2 + t % 24);
    Matrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j <= i; ++j) m(i, j) = m(j, i) = u(rng);
    const auto e = symmetric_eigen(m);
    for (Eigen::Index k = 0; k < n; ++k)
      EXPECT_LT((m * e.vectors.col(k) - e.values(k) * e.vectors.col(k)).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST_F(Properties, FittedModelInvariants) {
  EngineConfig cfg;
  cfg.record_history = true;
  for (int t = 0; t < kInstances; ++t) {
    const auto table = random_table(rng);
    const auto fr = fit(table, cfg);
    const auto& m = fr.model;

    // Retained eigenpairs of the first adjusted matrix.
    Matrix adjusted = fr.correlation.values;
    adjusted.diagonal() = initial_communalities(fr.correlation).values;
    const auto& first = m.history.front();
    bool clamped = first.communalities.maxCoeff() >= 1.0;
    for (Eigen::Index f = 0; f < m.num_factors() && !clamped; ++f) {
      const Vector l = first.loadings.col(f);
      EXPECT_LT((adjusted * l - first.eigenvalues(f) * l).cwiseAbs().maxCoeff(), 1e-8);
    }

    for (const auto& it : m.history) {
      EXPECT_GE(it.communalities.minCoeff(), 0.0);
      EXPECT_LE(it.communalities.maxCoeff(), 1.0);
    }

    const Matrix bl = m.scoring_weights * m.rotated_loadings;
    EXPECT_LT((bl - Matrix::Identity(bl.rows(), bl.cols())).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LT(fr.scores.values.rowwise().mean().cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LT((m.unrotated_loadings.rowwise().squaredNorm() - m.rotated_loadings.rowwise().squaredNorm())
                  .cwiseAbs()
                  .maxCoeff(),
              1e-10);
  }
}

TEST_F(Properties, FitIsBitDeterministic) {
  for (int t = 0; t < kInstances; ++t) {
    const auto table = random_table(rng);
    const auto a = fit(table);
    const auto b = fit(table);
    EXPECT_EQ(a.model.rotated_loadings, b.model.rotated_loadings);
    EXPECT_EQ(a.model.scoring_weights, b.model.scoring_weights);
    EXPECT_EQ(a.scores.values, b.scores.values);
    EXPECT_EQ(a.model.communalities.values, b.model.communalities.values);
  }
}

TEST_F(Properties, SyntheticRecovery) {
  for (int t = 0; t < kInstances; ++t) {
    std::uniform_int_distribution<int> k_dist(2, 4), per(3, 5);
    const int k = k_dist(rng);
    SynthConfig cfg;
    cfg.seed = rng();
    cfg.regions = 300;
    cfg.noise_std = 0.05;
    const auto data = generate_simple_structure(static_cast<std::size_t>(k * per(rng)), k, cfg);
    const auto fr = fit(data.table);
    ASSERT_EQ(fr.model.num_factors(), k);
    EXPECT_LT(testing_support::max_abs_diff_up_to_permutation(fr.model.rotated_loadings, data.expected_loadings), 0.1);
  }
}

TEST_F(Properties, StandardizeIsIdempotent) {
  for (int t = 0; t < kInstances; ++t) {
    const auto z = standardize(random_table(rng));
    EXPECT_LT(testing_support::max_abs_diff(standardize(z).values, z.values), 1e-12);
  }
}

TEST_F(Properties, VScoreIsLinearInAlpha) {
  std::uniform_real_distribution<double> u(0, 1), s(-5, 5);
  for (int t = 0; t < kInstances; ++t) {
    const double sv = s(rng), av = s(rng), a1 = u(rng), a2 = u(rng), w = u(rng);
    const double lhs = v_score(sv, av, w * a1 + (1 - w) * a2);
    const double rhs = w * v_score(sv, av, a1) + (1 - w) * v_score(sv, av, a2);
    EXPECT_NEAR(lhs, rhs, 1e-12);
  }
}

TEST_F(Properties, SweepMonotoneInTheta) {
  const double alphas[] = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  for (int t = 0; t < kInstances; ++t) {
    const auto cs = random_scores(rng, t % 2 == 0);
    std::vector<double> thetas;
    for (double th = -4; th <= 4; th += 0.25) thetas.push_back(th);
    const auto g = sweep(cs, alphas, thetas);
    for (std::size_t k = 0; k < 6; ++k)
      for (std::size_t i = 0; i < thetas.size(); ++i) {
        EXPECT_LE(g.counts[i][k], cs.size());
        if (i > 0) {
          EXPECT_LE(g.counts[i][k], g.counts[i - 1][k]);
        }
      }
  }
}

TEST_F(Properties, QuadrantsPartitionRegions) {
  for (int t = 0; t < kInstances; ++t) {
    const auto cs = random_scores(rng, t % 2 == 0);
    const auto q = quadrant_classify(cs);
    std::size_t counts[4] = {0, 0, 0, 0};
    for (auto x : q.quadrant) ++counts[static_cast<int>(x)];
    EXPECT_EQ(counts[0] + counts[1] + counts[2] + counts[3], cs.size());
    EXPECT_EQ(q.typology.size(), cs.size());
  }
}

TEST_F(Properties, EndpointRankingEquivalence) {
  for (int t = 0; t < kInstances; ++t) {
    const auto cs = random_scores(rng, t % 2 == 0);
    const std::size_t k = 1 + rng() % cs.size();
    const auto ids = [](const std::vector<RankedRegion>& r) {
      std::vector<std::string> out;
      for (const auto& x : r) out.push_back(x.region_id);
      return out;
    };
    EXPECT_EQ(ids(top_k(cs, k, RankKey::VScore, 1.0)), ids(top_k(cs, k, RankKey::Suitability)));
    EXPECT_EQ(ids(top_k(cs, k, RankKey::VScore, 0.0)), ids(top_k(cs, k, RankKey::Attractiveness)));
  }
}

// Reference values for the 4x6 fixture computed once with numpy/scipy
// (tests/oracle/fixture_oracle.py) and frozen here.

#include <gtest/gtest.h>

#include "test_support.hpp"
#include "uselfa/composite.hpp"

using namespace uselfa;

namespace {

Matrix mat(Eigen::Index r, Eigen::Index c, std::initializer_list<double> v) {
  Matrix m(r, c);
  auto it = v.begin();
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = *it++;
  return m;
}

const FitResult& fitted() {
  static const FitResult fr = [] {
    EngineConfig cfg;
    cfg.record_history = true;
    return fit(testing_support::fixture(), cfg);
  }();
  return fr;
}

}  // namespace

TEST(FixtureValues, DescriptiveStatistics) {
  const auto s = describe(testing_support::fixture());
  const double mean[] = {49.53333333333333, 52.583333333333336, 49.73333333333333, 54.46666666666667};
  const double sd[] = {6.958352295383344, 6.463255113846789, 7.360615916257734, 4.627598369204771};
  const double skew[] = {-1.595594254741341, 0.009929608349571878, -1.4042512976538866, -0.44509799617221246};
  const double kurt[] = {2.768469478786166, -1.1818591420099747, 1.8038523148922225, -1.8949013734027624};
  const double med[] = {51.85, 52.25, 51.95, 55.5};
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_NEAR(s.rows[i].mean, mean[i], 1e-12);
    EXPECT_NEAR(s.rows[i].std, sd[i], 1e-12);
    EXPECT_NEAR(s.rows[i].skewness, skew[i], 1e-12);
    EXPECT_NEAR(s.rows[i].kurtosis, kurt[i], 1e-12);
    EXPECT_NEAR(s.rows[i].median, med[i], 1e-12);
  }
}

TEST(FixtureValues, CorrelationAndSmc) {
  const auto& r = fitted().correlation.values;
  EXPECT_NEAR(r(0, 1), 0.47051300800313667, 1e-12);
  EXPECT_NEAR(r(0, 2), -0.19757470062746008, 1e-12);
  EXPECT_NEAR(r(0, 3), -0.49933034494708195, 1e-12);
  EXPECT_NEAR(r(1, 2), 0.5277864014008598, 1e-12);
  EXPECT_NEAR(r(1, 3), -0.016070783402393738, 1e-12);
  EXPECT_NEAR(r(2, 3), 0.45638380316133276, 1e-12);
  const auto c = initial_communalities(fitted().correlation);
  const double smc[] = {0.5566802511366091, 0.6226043814856115, 0.5826432769763465, 0.3828937038959086};
  for (Eigen::Index i = 0; i < 4; ++i) EXPECT_NEAR(c.values(i), smc[i], 1e-10);
}

TEST(FixtureValues, Extraction) {
  const auto& m = fitted().model;
  ASSERT_EQ(m.num_factors(), 2);
  EXPECT_TRUE(m.converged);
  EXPECT_EQ(m.iterations_used, 35);
  EXPECT_NEAR(m.eigenvalues(0), 1.2802643196174994, 1e-10);
  EXPECT_NEAR(m.eigenvalues(1), 1.2137425901758467, 1e-10);
  const Vector first = m.history.front().communalities;
  const double c1[] = {0.6450314272933575, 0.7134219619231116, 0.6704433558120324, 0.46511016476484596};
  for (Eigen::Index i = 0; i < 4; ++i) EXPECT_NEAR(first(i), c1[i], 1e-10);
  const Matrix lu = mat(4, 2, {-0.10657306379166812, 0.8678937530884281, 0.6887715616713708, 0.626706387874364,
                               0.8755792453308539, -0.12013029202937689, 0.44988463077843893, -0.5200885621099173});
  EXPECT_LT(testing_support::max_abs_diff(m.unrotated_loadings, lu), 1e-8);
  const double comm[] = {0.7645973845758604, 0.8671671607697516, 0.7810703019172109, 0.4728882934482136};
  for (Eigen::Index i = 0; i < 4; ++i) EXPECT_NEAR(m.communalities.values(i), comm[i], 1e-8);
}

TEST(FixtureValues, RotationWeightsAndScores) {
  const auto& fr = fitted();
  const Matrix v = mat(2, 2, {0.8892233259502712, -0.4574733616134799, 0.4574733616134799, 0.8892233259502712});
  EXPECT_LT(testing_support::max_abs_diff(fr.model.rotation, v), 1e-7);
  const Matrix lr = mat(4, 2, {0.30227101850716515, 0.8205057074429777, 0.8991732168949054, 0.24218729691835436,
                               0.7236290801398423, -0.5073768385462394, 0.16212124482956822, -0.6682851153685265});
  EXPECT_LT(testing_support::max_abs_diff(fr.model.rotated_loadings, lr), 1e-7);
  EXPECT_NEAR(varimax_criterion(kaiser_normalize(fr.model.rotated_loadings)), 0.27296455957458765, 1e-10);
  const Matrix b = mat(2, 4, {0.08569521854735238, 0.7382683184338047, 0.41601140878537124, 0.056918925915255526,
                              0.6415647897704516, 0.23005352705887452, -0.49856635119494247, -0.24677396453488487});
  EXPECT_LT(testing_support::max_abs_diff(fr.model.scoring_weights, b), 1e-6);
  const Matrix f = mat(2, 6, {1.1555916571237888, -1.7794450538270297, -0.48622678179702605, 0.03197010297310565,
                              0.8913378675477649, 0.18677220797939625, 1.0280472257336373, 1.210861944261233,
                              -1.558447904088616, -0.9777613375236686, 0.13922414670495434, 0.15807592491245837});
  EXPECT_LT(testing_support::max_abs_diff(fr.scores.values, f), 1e-6);
}

TEST(FixtureValues, SweepGrid) {
  const CompositeDefinition def{{{"1", Dimension::Suitability, 1, ""}, {"2", Dimension::Attractiveness, 1, ""}}};
  const auto cs = composite_scores(fitted().scores, def);
  const double alphas[] = {0.0, 0.5, 1.0};
  const double thetas[] = {0.0, 1.0};
  const auto g = sweep(cs, alphas, thetas);
  EXPECT_EQ(g.counts[0], (std::vector<std::size_t>{4, 3, 4}));
  EXPECT_EQ(g.counts[1], (std::vector<std::size_t>{2, 1, 1}));
}

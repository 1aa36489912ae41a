#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "test_support.hpp"
#include "uselfa/datamodel.hpp"
#include "uselfa/synth.hpp"

using namespace uselfa;
using testing_support::fixture;

namespace {

AttributeTable parse(const std::string& text, MissingPolicy policy = MissingPolicy::Reject) {
  std::istringstream in(text);
  return parse_table(in, {policy});
}

}  // namespace

TEST(LoadTable, FixtureShape) {
  const auto t = fixture();
  EXPECT_EQ(t.num_attributes(), 4u);
  EXPECT_EQ(t.num_regions(), 6u);
  EXPECT_EQ(t.attribute_names.front(), "HOUS_DEN");
  EXPECT_EQ(t.region_ids.back(), "R6");
  EXPECT_DOUBLE_EQ(t.values(1, 0), 61.3);
}

TEST(LoadTable, SeoulScaleSchema) {
  const auto data = generate_seoul_like();
  std::ostringstream os;
  write_table_csv(os, data.table, 6, data.header_comments);
  const auto t = parse(os.str());
  EXPECT_EQ(t.num_attributes(), 25u);
  EXPECT_EQ(t.num_regions(), 426u);
  EXPECT_EQ(t.values, data.table.values);
}

TEST(LoadTable, DuplicateAttributeIsSchemaError) {
  EXPECT_THROW(parse("region_id,a,a\nr1,1,2\nr2,2,3\nr3,3,1\n"), SchemaError);
}

TEST(LoadTable, DuplicateRegionIsSchemaError) {
  EXPECT_THROW(parse("region_id,a,b\nr1,1,2\nr1,2,3\nr3,3,1\n"), SchemaError);
}

TEST(LoadTable, FirstColumnMustBeRegionId) {
  EXPECT_THROW(parse("id,a,b\nr1,1,2\nr2,2,3\nr3,3,1\n"), SchemaError);
}

TEST(LoadTable, EmptyInputIsParseError) {
  EXPECT_THROW(parse(""), ParseError);
  EXPECT_THROW(parse("# only a comment\n\n"), ParseError);
  EXPECT_THROW(parse("region_id,a,b\n"), ParseError);
}

TEST(LoadTable, RaggedRowIsParseError) { EXPECT_THROW(parse("region_id,a,b\nr1,1\nr2,2,3\nr3,3,1\n"), ParseError); }

TEST(LoadTable, NonNumericRejectedByDefault) {
  EXPECT_THROW(parse("region_id,a,b\nr1,1,x\nr2,2,3\nr3,3,1\nr4,4,4\n"), SchemaError);
  EXPECT_THROW(parse("region_id,a,b\nr1,1,\nr2,2,3\nr3,3,1\nr4,4,4\n"), SchemaError);
}

TEST(LoadTable, TooFewRegionsIsDegenerate) {
  EXPECT_THROW(parse("region_id,a,b\nr1,1,2\nr2,2,3\n"), DegenerateDataError);
  EXPECT_THROW(parse("region_id,a\nr1,1\nr2,2\nr3,4\n"), DegenerateDataError);  // N < 2
}

TEST(LoadTable, DropRegionPolicyRecordsProvenance) {
  const auto t = parse(
      "region_id,a,b\nr1,1,10\nr2,NA,9\nr3,3,7\nr4,5,8\nr5,6,1\n", MissingPolicy::DropRegion);
  EXPECT_EQ(t.num_regions(), 4u);
  EXPECT_EQ(t.region_ids, (std::vector<std::string>{"r1", "r3", "r4", "r5"}));
  ASSERT_EQ(t.provenance.size(), 1u);
  EXPECT_EQ(t.provenance[0].region_id, "r2");
  EXPECT_EQ(t.provenance[0].attribute, "a");
  EXPECT_EQ(t.provenance[0].action, "drop-region");
}

TEST(LoadTable, DropRegionBelowMinimumIsDegenerate) {
  EXPECT_THROW(parse("region_id,a,b\nr1,1,10\nr2,,9\nr3,3,7\nr4,5,\n", MissingPolicy::DropRegion),
               DegenerateDataError);
}

TEST(LoadTable, ImputeMedianPolicy) {
  const auto t = parse("region_id,a,b\nr1,1,10\nr2,,9\nr3,3,7\nr4,5,8\n", MissingPolicy::ImputeMedian);
  EXPECT_DOUBLE_EQ(t.values(0, 1), 3.0);  // median of {1, 3, 5}
  ASSERT_EQ(t.provenance.size(), 1u);
  EXPECT_EQ(t.provenance[0].action, "impute-median");
}

TEST(LoadTable, CommentsBomAndCrlf) {
  const auto t = parse("\xEF\xBB\xBF# header note\r\nregion_id,a,b\r\nr1,1,10\r\n\r\nr2,2,9\r\nr3,3,7\r\n");
  EXPECT_EQ(t.num_regions(), 3u);
  EXPECT_DOUBLE_EQ(t.values(1, 2), 7.0);
}

TEST(Describe, ConstantRowFlagsUndefinedMoments) {
  AttributeTable t;
  t.attribute_names = {"c", "x"};
  t.region_ids = {"1", "2", "3", "4"};
  t.values.resize(2, 4);
  t.values << 5, 5, 5, 5, 1, 2, 3, 4;
  const auto s = describe(t);
  EXPECT_DOUBLE_EQ(s.rows[0].mean, 5.0);
  EXPECT_DOUBLE_EQ(s.rows[0].std, 0.0);
  EXPECT_TRUE(std::isnan(s.rows[0].skewness));
  EXPECT_TRUE(std::isnan(s.rows[0].kurtosis));
  ASSERT_FALSE(s.warnings.empty());
  EXPECT_NE(s.warnings[0].find("'c'"), std::string::npos);
}

TEST(Describe, SymmetricTwoPointHasZeroSkew) {
  AttributeTable t;
  t.attribute_names = {"x", "y"};
  t.region_ids = {"1", "2", "3", "4"};
  t.values.resize(2, 4);
  t.values << -1, -1, 1, 1, 0, 1, 2, 3;
  const auto s = describe(t);
  EXPECT_NEAR(s.rows[0].skewness, 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(s.rows[0].median, 0.0);
}

TEST(Describe, FixtureMatchesBruteForceMoments) {
  const auto t = fixture();
  const auto s = describe(t);
  const auto raw = testing_support::to_nested(t.values);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const auto m = oracle::moments(raw[i]);
    const auto& r = s.rows[i];
    EXPECT_EQ(r.count, 6u);
    EXPECT_NEAR(r.mean, m.mean, 1e-12);
    EXPECT_NEAR(r.std, m.std, 1e-12);
    EXPECT_NEAR(r.min, m.min, 1e-12);
    EXPECT_NEAR(r.median, m.median, 1e-12);
    EXPECT_NEAR(r.max, m.max, 1e-12);
    EXPECT_NEAR(r.skewness, m.skewness, 1e-12);
    EXPECT_NEAR(r.kurtosis, m.kurtosis, 1e-12);
    EXPECT_LE(r.min, r.median);
    EXPECT_LE(r.median, r.max);
  }
}

TEST(Standardize, SimpleRow) {
  Matrix x(2, 3);
  x << 1, 2, 3, 4, 0, 5;
  const auto z = standardize(x, {"a", "b"}, {"1", "2", "3"});
  EXPECT_NEAR(z.values(0, 0), -1.0, 1e-15);
  EXPECT_NEAR(z.values(0, 1), 0.0, 1e-15);
  EXPECT_NEAR(z.values(0, 2), 1.0, 1e-15);
}

TEST(Standardize, Idempotent) {
  const auto z = standardize(fixture());
  const auto zz = standardize(z);
  EXPECT_LT(testing_support::max_abs_diff(z.values, zz.values), 1e-12);
}

TEST(Standardize, FixtureMatchesOracle) {
  const auto t = fixture();
  const auto z = standardize(t);
  const auto expected = testing_support::from_nested(oracle::standardize(testing_support::to_nested(t.values)));
  EXPECT_LT(testing_support::max_abs_diff(z.values, expected), 1e-12);
  EXPECT_EQ(z.region_ids, t.region_ids);
  EXPECT_EQ(z.attribute_names, t.attribute_names);
}

TEST(Standardize, ZeroVarianceNamesAttribute) {
  Matrix x(2, 3);
  x << 1, 2, 3, 4, 4, 4;
  try {
    standardize(x, {"a", "flat"}, {"1", "2", "3"});
    FAIL() << "expected ZeroVarianceError";
  } catch (const ZeroVarianceError& e) {
    EXPECT_EQ(e.attribute(), "flat");
  }
}

TEST(Standardize, RowsHaveUnitMomentsAndStdOfStandardizedIsOne) {
  const auto z = standardize(fixture());
  for (Eigen::Index i = 0; i < z.values.rows(); ++i) {
    const double mean = z.values.row(i).mean();
    const double var = (z.values.row(i).array() - mean).square().sum() / static_cast<double>(z.values.cols() - 1);
    EXPECT_NEAR(mean, 0.0, 1e-10);
    EXPECT_NEAR(std::sqrt(var), 1.0, 1e-10);
  }
  AttributeTable again;
  again.attribute_names = z.attribute_names;
  again.region_ids = z.region_ids;
  again.values = z.values;
  for (const auto& r : describe(again).rows) EXPECT_NEAR(r.std, 1.0, 1e-10);
}

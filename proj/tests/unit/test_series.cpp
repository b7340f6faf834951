#include <gtest/gtest.h>

#include "metamorph/error.hpp"
#include "metamorph/faults.hpp"
#include "metamorph/series.hpp"
#include "oracles.hpp"

using namespace metamorph;

namespace {

CsvConfig sales() { return {"date", "sales"}; }

}  // namespace

TEST(Csv, SortsRowsByTimestamp) {
    const auto t = parse_csv("date,sales\n3,30\n1,10\n2,20\n", sales());
    ASSERT_EQ(t.rows(), 3u);
    EXPECT_EQ(t.timestamps()[0], 1);
    EXPECT_EQ(t.column("sales").values[2], 30.0);
}

TEST(Csv, RejectsDuplicateTimestamps) {
    EXPECT_THROW(parse_csv("date,sales\n1,10\n1,11\n", sales()), DuplicateTimestamp);
}

TEST(Csv, BlankCellIsMissingAndRowKept) {
    const auto t = parse_csv("date,sales,promo\n1,10,\n2,20,5\n", sales());
    ASSERT_EQ(t.rows(), 2u);
    EXPECT_TRUE(is_missing(t.column("promo").values[0]));
    EXPECT_THROW(t.series("promo"), MissingValue);
}

TEST(Csv, ParsesIsoDates) {
    const auto t = parse_csv("date,sales\n2020-01-02,2\n2020-01-01,1\n", sales());
    EXPECT_EQ(t.timestamps()[1] - t.timestamps()[0], 86400);
    EXPECT_EQ(parse_iso8601("1970-01-01T00:01"), 60);
    EXPECT_FALSE(parse_iso8601("2020-13-01").has_value());
}

TEST(Csv, MalformedInputs) {
    EXPECT_THROW(parse_csv("date,sales\n1,abc\n", sales()), MalformedCsv);
    EXPECT_THROW(parse_csv("date,sales\n1,2,3\n", sales()), MalformedCsv);
    EXPECT_THROW(parse_csv("date,other\n1,2\n", sales()), UnknownColumn);
}

TEST(Csv, LoaderSortFaultKeepsFileOrder) {
    faults::ScopedFault guard(faults::FaultId::loader_skips_sort);
    const auto t = parse_csv("date,sales\n3,30\n1,10\n", sales());
    EXPECT_EQ(t.column("sales").values[0], 30.0);
}

TEST(Windows, CountMatchesEnumerationOracle) {
    for (std::size_t L = 0; L <= 50; ++L) {
        for (std::size_t t = 1; t <= 20; ++t) {
            for (std::size_t h = 1; h <= 5; ++h) {
                ASSERT_EQ(sequence_count(L, t, h), oracle::enumerate_windows(L, t, h))
                    << "L=" << L << " t=" << t << " h=" << h;
            }
        }
    }
}

TEST(Windows, ContentsAreStrideOneSlices) {
    std::vector<double> v(15);
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = static_cast<double>(i);
    }
    const auto d = make_sequences(v, 4, 2);
    ASSERT_EQ(d.size(), 10u);
    EXPECT_EQ(d.inputs[3], (std::vector<double>{3, 4, 5, 6}));
    EXPECT_EQ(d.targets[3], (std::vector<double>{7, 8}));
    EXPECT_THROW(make_sequences(std::vector<double>(5, 1.0), 4, 2), InsufficientData);
}

TEST(Normalizer, RoundTripAndNoClipping) {
    const Normalizer n(10.0, 20.0);
    EXPECT_DOUBLE_EQ(n.normalize(15.0), 0.5);
    EXPECT_DOUBLE_EQ(n.normalize(30.0), 2.0);
    EXPECT_DOUBLE_EQ(n.normalize(0.0), -1.0);
    EXPECT_DOUBLE_EQ(n.denormalize(n.normalize(17.3)), 17.3);
    EXPECT_THROW(Normalizer(3.0, 3.0), ZeroRange);
}

TEST(Normalizer, FitUsesTrainingExtremes) {
    const auto n = fit_normalizer(std::vector<double>{4, -2, 9, 1});
    EXPECT_EQ(n.min(), -2.0);
    EXPECT_EQ(n.max(), 9.0);
    EXPECT_THROW(fit_normalizer(std::vector<double>{7, 7, 7}), ZeroRange);
    EXPECT_THROW(fit_normalizer(std::vector<double>{}), InsufficientData);
}

TEST(Synthetic, DefaultSplitShapeAndDeterminism) {
    const auto a = default_split(3);
    EXPECT_EQ(a.train.size(), 750u);
    EXPECT_EQ(a.val.size(), 187u);
    EXPECT_EQ(a.train.timestamps().back() + 1, a.val.timestamps().front());
    EXPECT_EQ(default_split(3).val, a.val);
    EXPECT_NE(default_split(4).val, a.val);
}

TEST(Series, AffineMapKeepsTimestamps) {
    const auto s = TimeSeries::from_values({1, 2, 3});
    const auto t = s.affine(2.0, 1.0);
    EXPECT_EQ(t.values()[2], 7.0);
    EXPECT_EQ(t.timestamps()[2], 2);
}

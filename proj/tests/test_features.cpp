#include "nids/features.hpp"
#include "nids/errors.hpp"

#include "testutil.hpp"

#include <doctest.h>

#include <algorithm>

using namespace nids;

namespace {

LabeledDataset dataset_from_rows(const std::vector<std::array<double, 3>>& rows) {
    LabeledDataset ds;
    for (const auto& row : rows) {
        RawRecord rec;
        rec.numeric[0] = row[0];
        rec.numeric[1] = row[1];
        rec.numeric[2] = row[2];
        rec.protocol = "tcp";
        rec.service = "http";
        rec.flag = "SF";
        ds.records.push_back(rec);
        ds.categories.push_back(AttackCategory::Normal);
    }
    return ds;
}

} // namespace

TEST_CASE("compute_zero_ratios") {
    SUBCASE("all-zero feature -> 1.0; [0,1,0,2] -> 0.5") {
        const auto ds = dataset_from_rows({{0, 0, 1}, {1, 0, 2}, {0, 0, 3}, {2, 0, 4}});
        const auto ratios = compute_zero_ratios(ds);
        CHECK(ratios[0] == doctest::Approx(0.5));
        CHECK(ratios[1] == doctest::Approx(1.0));
        CHECK(ratios[2] == doctest::Approx(0.0));
        for (double r : ratios) {
            CHECK(r >= 0.0);
            CHECK(r <= 1.0);
        }
    }
    SUBCASE("empty dataset -> error") {
        CHECK_THROWS_AS(compute_zero_ratios(LabeledDataset{}), DataError);
    }
}

TEST_CASE("select_features") {
    SUBCASE("[0.9, 0.5, 0.81] at 0.8 keeps only index 1") {
        CHECK(select_features({0.9, 0.5, 0.81}, 0.8) == std::vector<int>{1});
    }
    SUBCASE("ratio exactly at the threshold is kept") {
        CHECK(select_features({0.8, 0.9}, 0.8) == std::vector<int>{0});
    }
    SUBCASE("all ratios 0 -> everything kept") {
        const std::vector<double> ratios(kNumericFeatureCount, 0.0);
        CHECK(select_features(ratios, 0.8).size() == kNumericFeatureCount);
    }
    SUBCASE("all features discarded -> error") {
        CHECK_THROWS_AS(select_features({0.9, 0.95}, 0.8), DataError);
    }
    SUBCASE("kept set is monotone in the threshold") {
        const std::vector<double> ratios = {0.1, 0.35, 0.5, 0.62, 0.81, 0.93, 0.99};
        for (double lo : {0.2, 0.4, 0.6, 0.8}) {
            const auto kept_lo = select_features(ratios, lo);
            const auto kept_hi = select_features(ratios, lo + 0.15);
            for (int idx : kept_lo)
                CHECK(std::find(kept_hi.begin(), kept_hi.end(), idx) != kept_hi.end());
        }
    }
}

TEST_CASE("fit_scaling") {
    const auto ds = dataset_from_rows({{2, 0, 5}, {4, 10, 5}, {6, 5, 5}});

    SUBCASE("[2,4,6] -> (2,6)") {
        const auto scaling = fit_scaling(ds, {0});
        CHECK(scaling[0].first == 2.0);
        CHECK(scaling[0].second == 6.0);
    }
    SUBCASE("two features [(0,10),(5,5)]") {
        const auto scaling = fit_scaling(ds, {1, 2});
        CHECK(scaling[0] == std::pair<double, double>{0.0, 10.0});
        CHECK(scaling[1] == std::pair<double, double>{5.0, 5.0});
    }
}

TEST_CASE("encode") {
    // features 0 and 1 vary, feature 2 constant; rest all-zero and discarded
    const auto ds = dataset_from_rows({{2, 0, 5}, {4, 10, 5}, {6, 5, 5}});
    const auto vocab = fit_vocabulary(ds);
    const auto schema = fit_schema(ds, vocab, 0.8);
    REQUIRE(schema.kept_numeric == std::vector<int>{0, 1, 2});
    REQUIRE(schema.input_dim == 3 + 3);

    SUBCASE("record at train minima -> zeros; one-hot block leads with 1") {
        const auto v = encode(schema, ds.records[0]);
        CHECK(v[0] == 0.0);
        CHECK(v[1] == 0.0);
        CHECK(v[2] == 0.0); // constant feature scales to 0
        CHECK(v[3] == 1.0);
    }
    SUBCASE("record at train maxima -> ones (constant feature still 0)") {
        RawRecord rec = ds.records[1];
        rec.numeric[0] = 6;
        rec.numeric[1] = 10;
        const auto v = encode(schema, rec);
        CHECK(v[0] == 1.0);
        CHECK(v[1] == 1.0);
        CHECK(v[2] == 0.0);
    }
    SUBCASE("values beyond the train range clamp") {
        RawRecord rec = ds.records[0];
        rec.numeric[0] = 100.0;
        rec.numeric[1] = -5.0;
        const auto v = encode(schema, rec);
        CHECK(v[0] == 1.0);
        CHECK(v[1] == 0.0);
    }
    SUBCASE("deterministic") {
        CHECK(encode(schema, ds.records[2]) == encode(schema, ds.records[2]));
    }
}

TEST_CASE("encoded synthetic dataset lies in [0,1]^input_dim") {
    testutil::SyntheticSpec spec;
    spec.seed = 11;
    testutil::TempDir dir("encode");
    testutil::write_file(dir.path() / "train.txt", testutil::synthetic_text(spec));
    const auto ds = parse_split((dir.path() / "train.txt").string(), Split::Train);
    const auto vocab = fit_vocabulary(ds);
    const auto schema = fit_schema(ds, vocab, 0.8);

    const auto encoded = encode_dataset(schema, ds);
    CHECK(encoded.rows() == static_cast<Eigen::Index>(ds.size()));
    CHECK(encoded.cols() == schema.input_dim);
    CHECK(encoded.minCoeff() >= 0.0);
    CHECK(encoded.maxCoeff() <= 1.0);
}

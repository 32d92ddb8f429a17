#include <catch_amalgamated.hpp>

#include <cmath>

#include "sigverify/features.hpp"
#include "sigverify/signature.hpp"

using namespace sigverify;
using Catch::Matchers::WithinAbs;

TEST_CASE("derivative of a constant is zero") {
    const auto d = derivative({5, 5, 5, 5}, {0, 1, 2, 3});
    for (double v : d) CHECK(v == 0.0);
}

TEST_CASE("derivative of a linear ramp is constant") {
    const auto d = derivative({0, 1, 2, 3}, {0, 1, 2, 3});
    for (double v : d) CHECK_THAT(v, WithinAbs(1.0, 1e-12));
}

TEST_CASE("derivative stencil: central interior, one-sided endpoints") {
    const auto d = derivative({0, 1, 4, 9}, {0, 1, 2, 3});
    REQUIRE(d.size() == 4);
    CHECK_THAT(d[0], WithinAbs(1.0, 1e-12));
    CHECK_THAT(d[1], WithinAbs(2.0, 1e-12));  // (4-0)/2
    CHECK_THAT(d[2], WithinAbs(4.0, 1e-12));  // (9-1)/2
    CHECK_THAT(d[3], WithinAbs(5.0, 1e-12));
}

TEST_CASE("derivative preconditions") {
    CHECK_THROWS(derivative({1, 2}, {0, 1, 2}));
    CHECK_THROWS(derivative({1}, {0}));
}

TEST_CASE("feature sets have the documented arities") {
    const int expected[15] = {8, 6, 6, 6, 6, 4, 4, 4, 4, 4, 4, 2, 2, 2, 2};
    const auto sig = synth_signature(5, 3, 0.2);
    for (int i = 0; i < 15; ++i) {
        const auto fs = static_cast<FeatureSetId>(i);
        CHECK(feature_columns(fs).size() == static_cast<std::size_t>(expected[i]));
        const auto fm = build_features(sig, fs);
        CHECK(fm.cols == static_cast<std::size_t>(expected[i]));
        CHECK(fm.point_count == sig.samples.size());
    }
}

TEST_CASE("non-constant columns are z-scored") {
    const auto sig = synth_signature(9, 4, 0.3);
    const auto fm = build_features(sig, FeatureSetId::F1);
    for (std::size_t c = 0; c < fm.cols; ++c) {
        double mean = 0.0, var = 0.0;
        for (std::size_t r = 0; r < fm.point_count; ++r) mean += fm.at(r, c);
        mean /= static_cast<double>(fm.point_count);
        for (std::size_t r = 0; r < fm.point_count; ++r)
            var += (fm.at(r, c) - mean) * (fm.at(r, c) - mean);
        const double sd = std::sqrt(var / static_cast<double>(fm.point_count));
        CHECK_THAT(mean, WithinAbs(0.0, 1e-9));
        CHECK_THAT(sd, WithinAbs(1.0, 1e-9));
    }
}

TEST_CASE("constant pressure yields an all-zero pressure column") {
    Signature sig;
    sig.writer_id = "w";
    sig.specimen_id = "s";
    for (int i = 0; i < 10; ++i)
        sig.samples.push_back({static_cast<double>(i), std::sin(i * 0.7), std::cos(i * 0.3), 512.0});
    const auto fm = build_features(sig, FeatureSetId::F13);  // (p, p')
    for (std::size_t r = 0; r < fm.point_count; ++r) {
        CHECK(fm.at(r, 0) == 0.0);  // constant p
        CHECK(fm.at(r, 1) == 0.0);  // p' is constant zero too
    }
}

TEST_CASE("z-score is idempotent on non-constant columns") {
    const auto sig = synth_signature(11, 3, 0.4);
    auto fm = build_features(sig, FeatureSetId::F12);
    for (std::size_t c = 0; c < fm.cols; ++c) {
        std::vector<double> col;
        for (std::size_t r = 0; r < fm.point_count; ++r) col.push_back(fm.at(r, c));
        auto again = col;
        detail::zscore(again);
        for (std::size_t r = 0; r < col.size(); ++r) CHECK_THAT(again[r], WithinAbs(col[r], 1e-9));
    }
}

TEST_CASE("derivative columns are translation invariant") {
    auto sig = synth_signature(13, 3, 0.2);
    auto shifted = sig;
    for (auto& s : shifted.samples) {
        s.x += 1234.5;
        s.y -= 987.0;
    }
    const auto a = build_features(sig, FeatureSetId::F10);     // velocities + accelerations
    const auto b = build_features(shifted, FeatureSetId::F10);
    for (std::size_t i = 0; i < a.data.size(); ++i) CHECK_THAT(a.data[i], WithinAbs(b.data[i], 1e-9));
}

#include <catch_amalgamated.hpp>

#include <cmath>

#include "sigverify/segmentation.hpp"
#include "sigverify/signature.hpp"

using namespace sigverify;

namespace {

Signature polyline_signature(const std::vector<std::pair<double, double>>& pts,
                             double pressure = 500.0) {
    Signature sig;
    sig.writer_id = "w";
    sig.specimen_id = "s";
    for (std::size_t i = 0; i < pts.size(); ++i)
        sig.samples.push_back({static_cast<double>(i) * 10.0, pts[i].first, pts[i].second,
                               pressure});
    return sig;
}

// Oracle for the "V" fixture: the interior sample with the largest turning
// angle, found by exhaustive scan over the original polyline.
std::size_t max_turning_index(const Signature& sig) {
    std::size_t best = 1;
    double best_angle = -1.0;
    for (std::size_t i = 1; i + 1 < sig.samples.size(); ++i) {
        const double ux = sig.samples[i].x - sig.samples[i - 1].x;
        const double uy = sig.samples[i].y - sig.samples[i - 1].y;
        const double vx = sig.samples[i + 1].x - sig.samples[i].x;
        const double vy = sig.samples[i + 1].y - sig.samples[i].y;
        const double ang = std::fabs(std::atan2(ux * vy - uy * vx, ux * vx + uy * vy));
        if (ang > best_angle) {
            best_angle = ang;
            best = i;
        }
    }
    return best;
}

}  // namespace

TEST_CASE("a straight line is a single stroke") {
    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i < 50; ++i) pts.emplace_back(3.0 * i, 2.0 * i);
    const auto seg = segment(polyline_signature(pts));
    CHECK(seg.stroke_count() == 1);
    CHECK(seg.boundaries.front() == 0);
    CHECK(seg.boundaries.back() == 49);
}

TEST_CASE("a V polyline splits at the corner vertex") {
    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i <= 24; ++i) pts.emplace_back(4.0 * i, 4.0 * i);          // up limb
    for (int i = 1; i <= 25; ++i) pts.emplace_back(96.0 + 4.0 * i, 96.0 - 4.0 * i);  // down limb
    const auto sig = polyline_signature(pts);
    const auto seg = segment(sig);
    REQUIRE(seg.stroke_count() == 2);
    CHECK(seg.boundaries[1] == max_turning_index(sig));
    CHECK(seg.boundaries[1] == 24);
}

TEST_CASE("segmentation is deterministic") {
    const auto sig = synth_signature(21, 5, 0.3);
    CHECK(segment(sig) == segment(sig));
}

TEST_CASE("boundary indices are invariant under uniform scaling and translation") {
    const auto sig = synth_signature(22, 5, 0.2);
    const auto base = segment(sig);
    for (double s : {0.5, 2.0, 4.0, 8.0}) {
        auto scaled = sig;
        for (auto& p : scaled.samples) {
            p.x *= s;
            p.y *= s;
        }
        CHECK(segment(scaled) == base);
    }
    auto shifted = sig;
    for (auto& p : shifted.samples) {
        p.x += 512.0;
        p.y -= 256.0;
    }
    CHECK(segment(shifted) == base);
}

TEST_CASE("pen-up runs induce boundaries at their ends") {
    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i < 30; ++i) pts.emplace_back(2.0 * i, 0.0);
    auto sig = polyline_signature(pts);
    for (int i = 12; i <= 15; ++i) sig.samples[static_cast<std::size_t>(i)].p = 0.0;
    const auto seg = segment(sig);
    CHECK(std::count(seg.boundaries.begin(), seg.boundaries.end(), 12u) == 1);
    CHECK(std::count(seg.boundaries.begin(), seg.boundaries.end(), 15u) == 1);
    CHECK(seg.stroke_count() == 3);
}

TEST_CASE("every stroke has at least 3 samples after merging") {
    for (std::uint64_t seed : {1ull, 5ull, 9ull, 13ull}) {
        const auto sig = synth_signature(seed, 6, 0.5);
        const auto seg = segment(sig);
        for (std::size_t k = 0; k < seg.stroke_count(); ++k) {
            const auto [a, b] = seg.stroke_range(k);
            CHECK(b - a + 1 >= 3);
        }
    }
}

TEST_CASE("strokes cover all samples and share boundary points") {
    const auto sig = synth_signature(31, 5, 0.2);
    const auto seg = segment(sig);
    CHECK(seg.boundaries.front() == 0);
    CHECK(seg.boundaries.back() == sig.samples.size() - 1);
    for (std::size_t k = 0; k + 1 < seg.stroke_count(); ++k) {
        const auto cur = stroke_points(sig, seg, k);
        const auto nxt = stroke_points(sig, seg, k + 1);
        CHECK(cur.back() == nxt.front());
    }
}

TEST_CASE("stroke_points validates the index") {
    const auto sig = synth_signature(1, 2, 0.0);
    const auto seg = segment(sig);
    CHECK(stroke_points(sig, seg, 0).size() >= 3);
    CHECK_THROWS_AS(stroke_points(sig, seg, seg.stroke_count()), std::out_of_range);
}

TEST_CASE("single-stroke signature returns all samples for k=0") {
    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i < 20; ++i) pts.emplace_back(5.0 * i, 1.0 * i);
    const auto sig = polyline_signature(pts);
    const auto seg = segment(sig);
    REQUIRE(seg.stroke_count() == 1);
    CHECK(stroke_points(sig, seg, 0).size() == sig.samples.size());
}

TEST_CASE("boundary samples belong to the earlier stroke") {
    Segmentation seg;
    seg.boundaries = {0, 10, 20};
    CHECK(seg.stroke_of_sample(0) == 0);
    CHECK(seg.stroke_of_sample(5) == 0);
    CHECK(seg.stroke_of_sample(10) == 0);
    CHECK(seg.stroke_of_sample(11) == 1);
    CHECK(seg.stroke_of_sample(20) == 1);
}

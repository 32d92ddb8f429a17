#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "sigverify/verifier.hpp"

using namespace sigverify;
using Catch::Matchers::WithinAbs;

namespace {

std::vector<Signature> jittered_refs(std::uint64_t seed, int count, double sigma) {
    const auto base = synth_signature(seed, 5, 0.0);
    std::vector<Signature> refs;
    for (int i = 0; i < count; ++i) {
        auto s = perturb(base, sigma, seed * 100 + static_cast<std::uint64_t>(i));
        s.specimen_id = "r" + std::to_string(i);
        refs.push_back(std::move(s));
    }
    return refs;
}

}  // namespace

TEST_CASE("enrolling two identical references yields zero statistics") {
    auto a = synth_signature(1, 5, 0.2);
    auto b = a;
    b.specimen_id = "copy";
    const auto rs = enroll({a, b}, VerifierConfig{});
    CHECK(rs.s_min_bl == 0.0);
    CHECK(rs.s_min_sm == 0.0);
    CHECK(rs.mu_bl == 0.0);
    CHECK(rs.mu_sm == 0.0);

    const auto rep = score(a, rs, Method::smdtw, Normalization::s2);
    CHECK_THAT(rep.score, WithinAbs(0.0, 1e-12));
}

TEST_CASE("enrollment validates its input") {
    auto a = synth_signature(2, 5, 0.2);
    CHECK_THROWS_AS(enroll({a}, VerifierConfig{}), std::invalid_argument);
    auto b = perturb(a, 0.1, 7);
    b.writer_id = "someone-else";
    CHECK_THROWS_AS(enroll({a, b}, VerifierConfig{}), std::invalid_argument);
}

TEST_CASE("an outlier reference inflates the mean intra-reference distance") {
    auto close_refs = jittered_refs(3, 5, 0.1);
    const auto tight = enroll(close_refs, VerifierConfig{});

    auto outlier = perturb(synth_signature(999, 5, 0.0), 0.1, 1);
    outlier.writer_id = close_refs.front().writer_id;
    outlier.specimen_id = "outlier";
    close_refs.back() = outlier;
    const auto loose = enroll(close_refs, VerifierConfig{});

    CHECK(loose.mu_bl > tight.mu_bl);
    CHECK(loose.mu_sm > tight.mu_sm);
}

TEST_CASE("the feature set choice changes the enrolled statistics") {
    const auto refs = jittered_refs(4, 5, 0.2);
    VerifierConfig pos;
    pos.feature_set = FeatureSetId::F13;
    VerifierConfig vel;
    vel.feature_set = FeatureSetId::F5;
    const auto a = enroll(refs, pos);
    const auto b = enroll(refs, vel);
    CHECK(a.mu_bl != b.mu_bl);
    CHECK(a.config.feature_set == FeatureSetId::F13);
}

TEST_CASE("scores reassemble from their reported raw distances") {
    const auto refs = jittered_refs(5, 5, 0.15);
    const auto rs = enroll(refs, VerifierConfig{});
    const auto q = perturb(synth_signature(5, 5, 0.0), 0.15, 77);

    SECTION("s2 is the mean length-normalized distance minus mu") {
        const auto rep = score(q, rs, Method::dtw, Normalization::s2);
        REQUIRE(rep.raw_distances.size() == 5);
        double acc = 0.0;
        for (std::size_t i = 0; i < 5; ++i)
            acc += rep.raw_distances[i] / static_cast<double>(rs.references[i].samples.size());
        CHECK_THAT(rep.score, WithinAbs(acc / 5.0 - rs.mu_bl, 1e-12));
    }

    SECTION("s1 is the path-normalized minimum distance minus s_min") {
        const auto rep = score(q, rs, Method::dtw, Normalization::s1);
        const std::size_t best = static_cast<std::size_t>(
            std::min_element(rep.raw_distances.begin(), rep.raw_distances.end()) -
            rep.raw_distances.begin());
        const auto align = dtw(build_features(q, rs.config.feature_set), rs.features[best]);
        CHECK_THAT(rep.score,
                   WithinAbs(align.distance / static_cast<double>(align.path.length()) -
                                 rs.s_min_bl,
                             1e-12));
    }

    SECTION("mu matches the pairwise grid") {
        double acc = 0.0;
        for (std::size_t j = 0; j < 5; ++j)
            for (std::size_t i = 0; i < 5; ++i)
                if (i != j)
                    acc += rs.pair_bl.at(j, i) /
                           static_cast<double>(rs.references[i].samples.size());
        CHECK_THAT(rs.mu_bl, WithinAbs(acc / 20.0, 1e-12));
    }
}

TEST_CASE("s2 scoring is invariant under reference reordering") {
    auto refs = jittered_refs(6, 5, 0.15);
    const auto q = perturb(synth_signature(6, 5, 0.0), 0.15, 88);
    const auto a = enroll(refs, VerifierConfig{});
    std::rotate(refs.begin(), refs.begin() + 2, refs.end());
    const auto b = enroll(refs, VerifierConfig{});
    for (Method m : {Method::dtw, Method::smdtw}) {
        const auto ra = score(q, a, m, Normalization::s2);
        const auto rb = score(q, b, m, Normalization::s2);
        CHECK_THAT(ra.score, WithinAbs(rb.score, 1e-9));
    }
}

TEST_CASE("the unit weight hook makes both methods agree") {
    const auto refs = jittered_refs(7, 5, 0.15);
    VerifierConfig config;
    config.unit_weight = true;
    const auto rs = enroll(refs, config);
    const auto q = perturb(synth_signature(7, 5, 0.0), 0.15, 99);
    for (Normalization norm : {Normalization::s1, Normalization::s2}) {
        const auto bl = score(q, rs, Method::dtw, norm);
        const auto sm = score(q, rs, Method::smdtw, norm);
        CHECK_THAT(sm.score, WithinAbs(bl.score, 1e-9));
    }
}

TEST_CASE("genuine specimens score below heavy forgeries") {
    const auto refs = jittered_refs(8, 5, 0.1);
    const auto rs = enroll(refs, VerifierConfig{});
    const auto genuine = perturb(synth_signature(8, 5, 0.0), 0.1, 123);
    auto forgery = perturb(synth_signature(8, 5, 0.0), 2.0, 456);
    for (Method m : {Method::dtw, Method::smdtw}) {
        const auto g = score(genuine, rs, m, Normalization::s2);
        const auto f = score(forgery, rs, m, Normalization::s2);
        CHECK(g.score < f.score);
    }
}

TEST_CASE("the decision threshold is inclusive") {
    ScoreReport rep;
    rep.score = 1.25;
    CHECK(decide(rep, 1.25));
    CHECK(decide(rep, 1.26));
    CHECK_FALSE(decide(rep, 1.24));
    const auto row = csv_row(rep, 1.25);
    CHECK(row.find("accept") != std::string::npos);
}

TEST_CASE("reference sets survive a save/load round trip") {
    const auto refs = jittered_refs(9, 5, 0.15);
    VerifierConfig config;
    config.feature_set = FeatureSetId::F10;
    config.thresholds.th_gs = 85.0;
    config.weights.b0 = 8.5;
    const auto rs = enroll(refs, config);

    std::stringstream buf;
    save_reference_set(rs, buf);
    const auto back = load_reference_set(buf);

    CHECK(back.writer_id == rs.writer_id);
    CHECK(back.references.size() == rs.references.size());
    CHECK(back.config.feature_set == FeatureSetId::F10);
    CHECK(back.config.thresholds.th_gs == 85.0);
    CHECK(back.config.weights.b0 == 8.5);
    CHECK_THAT(back.mu_bl, WithinAbs(rs.mu_bl, 1e-12));
    CHECK_THAT(back.mu_sm, WithinAbs(rs.mu_sm, 1e-12));
    CHECK_THAT(back.s_min_bl, WithinAbs(rs.s_min_bl, 1e-12));
}

TEST_CASE("loading rejects foreign or damaged files") {
    std::stringstream notours("just some text\n");
    CHECK_THROWS_AS(load_reference_set(notours), std::runtime_error);
    std::stringstream badkey("sigverify-refset v1\nnope=1\nsignatures:\n");
    CHECK_THROWS_AS(load_reference_set(badkey), std::runtime_error);
}

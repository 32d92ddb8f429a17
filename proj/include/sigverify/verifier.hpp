#pragma once

#include <algorithm>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sigverify/dtw.hpp"
#include "sigverify/features.hpp"
#include "sigverify/segmentation.hpp"
#include "sigverify/stability.hpp"

namespace sigverify {

enum class Method { dtw, smdtw };
enum class Normalization { s1, s2 };

inline std::string to_string(Method m) { return m == Method::dtw ? "dtw" : "smdtw"; }
inline std::string to_string(Normalization n) { return n == Normalization::s1 ? "s1" : "s2"; }

struct VerifierConfig {
    FeatureSetId feature_set = FeatureSetId::F5;
    StabilityThresholds thresholds;
    WeightParams weights;
    int n_references = 5;
    bool unit_weight = false;  // test hook: weight identically 1

    WeightFn weight_fn() const { return unit_weight ? WeightFn(unit_weight_fn) : WeightFn{}; }
};

/// Normalized dissimilarity of one questioned signature, plus the raw
/// per-reference distances it was assembled from.
struct ScoreReport {
    std::string writer_id;
    std::string specimen_id;
    Method method = Method::dtw;
    Normalization normalization = Normalization::s2;
    double score = 0.0;
    std::vector<double> raw_distances;  // one per reference, enrollment order
};

/// Accept iff the score is at or below the threshold (scores are
/// dissimilarities, smaller is more genuine).
inline bool decide(const ScoreReport& report, double threshold) {
    return report.score <= threshold;
}

inline std::string csv_row(const ScoreReport& r, double threshold) {
    std::ostringstream oss;
    oss.precision(12);
    oss << r.writer_id << "," << r.specimen_id << "," << to_string(r.method) << ","
        << to_string(r.normalization) << "," << r.score << ","
        << (decide(r, threshold) ? "accept" : "reject");
    return oss.str();
}

/// An enrolled writer: cached segmentations and feature matrices of the
/// references plus the intra-reference normalization statistics.
struct ReferenceSet {
    std::string writer_id;
    std::vector<Signature> references;
    std::vector<Segmentation> segmentations;
    std::vector<FeatureMatrix> features;
    VerifierConfig config;

    double s_min_bl = 0.0;  // min intra pair distance / its path length
    double s_min_sm = 0.0;
    double mu_bl = 0.0;  // mean of d(R_i, R_j) / |R_j| over ordered pairs
    double mu_sm = 0.0;

    // pairwise intra-reference distances, row = questioned index
    Grid pair_bl, pair_sm;
};

/// Computes the intra-reference statistics of Eqs. s_min and mu for both the
/// baseline and the stability-modulated distance. Reference-vs-reference
/// relevance is computed leave-one-out against the other N-1 references.
inline ReferenceSet enroll(const std::vector<Signature>& refs, const VerifierConfig& config) {
    const std::size_t N = refs.size();
    if (N < 2) throw std::invalid_argument("enrollment needs at least 2 references");
    for (const auto& r : refs)
        if (r.writer_id != refs.front().writer_id)
            throw std::invalid_argument("mixed writers in reference set");

    ReferenceSet rs;
    rs.writer_id = refs.front().writer_id;
    rs.references = refs;
    rs.config = config;
    for (const auto& r : refs) {
        rs.segmentations.push_back(segment(r));
        rs.features.push_back(build_features(r, config.feature_set));
    }

    // leave-one-out relevance of each reference against the others
    std::vector<RelevanceProfile> loo(N);
    for (std::size_t j = 0; j < N; ++j) {
        std::vector<Signature> others;
        for (std::size_t i = 0; i < N; ++i)
            if (i != j) others.push_back(refs[i]);
        loo[j] = relevance_profile(refs[j], rs.segmentations[j], others, config.thresholds);
    }

    rs.pair_bl = Grid(N, N);
    rs.pair_sm = Grid(N, N);
    double best_bl = std::numeric_limits<double>::infinity();
    double best_sm = std::numeric_limits<double>::infinity();
    double mu_bl = 0.0, mu_sm = 0.0;
    const auto wfn = config.weight_fn();
    for (std::size_t j = 0; j < N; ++j) {  // questioned side
        for (std::size_t i = 0; i < N; ++i) {  // reference side
            if (i == j) continue;
            const auto bl = dtw(rs.features[j], rs.features[i]);
            const auto sm = smdtw(rs.features[j], rs.features[i], loo[j], rs.segmentations[j],
                                  config.weights, wfn);
            rs.pair_bl.at(j, i) = bl.distance;
            rs.pair_sm.at(j, i) = sm.distance;
            const auto ref_len = static_cast<double>(refs[i].samples.size());
            mu_bl += bl.distance / ref_len;
            mu_sm += sm.distance / ref_len;
            if (bl.distance < best_bl) {
                best_bl = bl.distance;
                rs.s_min_bl = bl.distance / static_cast<double>(bl.path.length());
            }
            if (sm.distance < best_sm) {
                best_sm = sm.distance;
                rs.s_min_sm = sm.distance / static_cast<double>(sm.path.length());
            }
        }
    }
    const auto pairs = static_cast<double>(N * (N - 1));
    rs.mu_bl = mu_bl / pairs;
    rs.mu_sm = mu_sm / pairs;
    return rs;
}

namespace detail {

inline std::vector<AlignmentResult> align_against_references(const Signature& q,
                                                             const ReferenceSet& rs,
                                                             Method method) {
    const auto qf = build_features(q, rs.config.feature_set);
    std::vector<AlignmentResult> out;
    out.reserve(rs.references.size());
    if (method == Method::dtw) {
        for (const auto& rf : rs.features) out.push_back(dtw(qf, rf));
    } else {
        const auto q_seg = segment(q);
        const auto rel = relevance_profile(q, q_seg, rs.references, rs.config.thresholds);
        const auto wfn = rs.config.weight_fn();
        for (const auto& rf : rs.features)
            out.push_back(smdtw(qf, rf, rel, q_seg, rs.config.weights, wfn));
    }
    return out;
}

}  // namespace detail

/// Minimum reference distance normalized by its own warping-path length,
/// shifted by the enrolled s_min.
inline ScoreReport score_s1(const Signature& q, const ReferenceSet& rs, Method method) {
    const auto aligns = detail::align_against_references(q, rs, method);
    ScoreReport rep;
    rep.writer_id = rs.writer_id;
    rep.specimen_id = q.specimen_id;
    rep.method = method;
    rep.normalization = Normalization::s1;
    std::size_t best = 0;
    for (std::size_t i = 0; i < aligns.size(); ++i) {
        rep.raw_distances.push_back(aligns[i].distance);
        if (aligns[i].distance < aligns[best].distance) best = i;
    }
    const double s_min = method == Method::dtw ? rs.s_min_bl : rs.s_min_sm;
    rep.score =
        aligns[best].distance / static_cast<double>(aligns[best].path.length()) - s_min;
    return rep;
}

/// Mean reference distance, each normalized by the reference's sample count,
/// shifted by the enrolled mean intra-reference dissimilarity.
inline ScoreReport score_s2(const Signature& q, const ReferenceSet& rs, Method method) {
    const auto aligns = detail::align_against_references(q, rs, method);
    ScoreReport rep;
    rep.writer_id = rs.writer_id;
    rep.specimen_id = q.specimen_id;
    rep.method = method;
    rep.normalization = Normalization::s2;
    double acc = 0.0;
    for (std::size_t i = 0; i < aligns.size(); ++i) {
        rep.raw_distances.push_back(aligns[i].distance);
        acc += aligns[i].distance / static_cast<double>(rs.references[i].samples.size());
    }
    const double mu = method == Method::dtw ? rs.mu_bl : rs.mu_sm;
    rep.score = acc / static_cast<double>(aligns.size()) - mu;
    return rep;
}

inline ScoreReport score(const Signature& q, const ReferenceSet& rs, Method method,
                         Normalization norm) {
    return norm == Normalization::s1 ? score_s1(q, rs, method) : score_s2(q, rs, method);
}

/// Text persistence: config header, then the references as canonical blocks.
/// Statistics are recomputed on load so the file cannot go stale.
inline void save_reference_set(const ReferenceSet& rs, std::ostream& out) {
    out << "sigverify-refset v1\n";
    out << "writer=" << rs.writer_id << "\n";
    out << "references=" << rs.references.size() << "\n";
    out << "feature_set=" << to_string(rs.config.feature_set) << "\n";
    out.precision(17);
    out << "th_lcs=" << rs.config.thresholds.th_lcs << "\n";
    out << "th_len=" << rs.config.thresholds.th_len << "\n";
    out << "th_gs=" << rs.config.thresholds.th_gs << "\n";
    out << "b0=" << rs.config.weights.b0 << "\n";
    out << "b_min=" << rs.config.weights.b_min << "\n";
    out << "b_max=" << rs.config.weights.b_max << "\n";
    out << "c0=" << rs.config.weights.c0 << "\n";
    out << "c_min=" << rs.config.weights.c_min << "\n";
    out << "c_max=" << rs.config.weights.c_max << "\n";
    out << "unit_weight=" << (rs.config.unit_weight ? 1 : 0) << "\n";
    out << "signatures:\n";
    for (const auto& r : rs.references) serialize_canonical(r, out);
}

inline ReferenceSet load_reference_set(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "sigverify-refset v1")
        throw std::runtime_error("not a sigverify reference set");
    VerifierConfig config;
    std::size_t count = 0;
    while (std::getline(in, line)) {
        if (line == "signatures:") break;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw std::runtime_error("malformed refset line: " + line);
        const std::string key = line.substr(0, eq), val = line.substr(eq + 1);
        if (key == "writer") {
            // informational; re-derived from the signatures
        } else if (key == "references") {
            count = static_cast<std::size_t>(std::stoul(val));
        } else if (key == "feature_set") {
            const auto fs = feature_set_from_string(val);
            if (!fs) throw std::runtime_error("unknown feature set " + val);
            config.feature_set = *fs;
        } else if (key == "th_lcs") {
            config.thresholds.th_lcs = std::stod(val);
        } else if (key == "th_len") {
            config.thresholds.th_len = std::stoi(val);
        } else if (key == "th_gs") {
            config.thresholds.th_gs = std::stod(val);
        } else if (key == "b0") {
            config.weights.b0 = std::stod(val);
        } else if (key == "b_min") {
            config.weights.b_min = std::stod(val);
        } else if (key == "b_max") {
            config.weights.b_max = std::stod(val);
        } else if (key == "c0") {
            config.weights.c0 = std::stod(val);
        } else if (key == "c_min") {
            config.weights.c_min = std::stod(val);
        } else if (key == "c_max") {
            config.weights.c_max = std::stod(val);
        } else if (key == "unit_weight") {
            config.unit_weight = val == "1";
        } else {
            throw std::runtime_error("unknown refset key " + key);
        }
    }
    if (count < 2) throw std::runtime_error("refset declares fewer than 2 references");
    std::vector<Signature> refs;
    for (std::size_t i = 0; i < count; ++i) refs.push_back(parse_canonical(in));
    config.n_references = static_cast<int>(count);
    return enroll(refs, config);
}

}  // namespace sigverify

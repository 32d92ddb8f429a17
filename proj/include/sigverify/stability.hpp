#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "sigverify/segmentation.hpp"
#include "sigverify/shapesim.hpp"
#include "sigverify/signature.hpp"

namespace sigverify {

/// Small row-major matrix used for similarity maps and cost matrices.
struct Grid {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Grid() = default;
    Grid(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

struct StabilityThresholds {
    double th_lcs = 75.0;
    int th_len = 3;
    double th_gs = 90.0;
};

/// Windowed mean similarities at scales h = 1..H, thresholded at th_lcs.
struct SimilarityPyramid {
    std::vector<Grid> scales;  // scales[h-1] is ref-strokes x q-strokes
};

using SaliencyMap = Grid;

/// A diagonal run of matching stroke pairs (ref index, questioned index).
struct MatchSequence {
    std::size_t r_start = 0;
    std::size_t q_start = 0;
    std::size_t ns = 0;
    double gs = 0.0;

    std::pair<std::size_t, std::size_t> pair(std::size_t k) const {
        return {r_start + k, q_start + k};
    }
    bool contains_q_stroke(std::size_t j) const { return j >= q_start && j < q_start + ns; }
};

/// Per-stroke counters of membership in stability regions, each in 0..n_refs.
struct RelevanceProfile {
    std::vector<int> counters;  // one per stroke of Q
    int n_refs = 0;
};

/// Builds SD^1 from pairwise stroke similarities, extends it to windowed
/// means at every scale, then zeroes every entry below th_lcs.
inline SimilarityPyramid similarity_pyramid(const std::vector<DigitalStroke>& ref_strokes,
                                            const std::vector<DigitalStroke>& q_strokes,
                                            double th_lcs) {
    if (ref_strokes.empty() || q_strokes.empty())
        throw std::invalid_argument("empty stroke list");
    const std::size_t c = ref_strokes.size(), z = q_strokes.size();
    const std::size_t H = std::min(c, z);

    Grid sd1(c, z);
    for (std::size_t y = 0; y < c; ++y)
        for (std::size_t l = 0; l < z; ++l)
            sd1.at(y, l) = stroke_similarity(ref_strokes[y], q_strokes[l]);

    SimilarityPyramid pyr;
    pyr.scales.reserve(H);
    for (std::size_t h = 1; h <= H; ++h) {
        Grid sdh(c, z);
        for (std::size_t y = 0; y < c; ++y) {
            for (std::size_t l = 0; l < z; ++l) {
                if (y + h - 1 < c && l + h - 1 < z) {
                    double acc = 0.0;
                    for (std::size_t p = 0; p < h; ++p) acc += sd1.at(y + p, l + p);
                    sdh.at(y, l) = acc / static_cast<double>(h);
                }
            }
        }
        pyr.scales.push_back(std::move(sdh));
    }
    for (auto& g : pyr.scales)
        for (auto& v : g.data)
            if (v < th_lcs) v = 0.0;
    return pyr;
}

/// Elementwise maximum across scales.
inline SaliencyMap saliency_map(const SimilarityPyramid& pyr) {
    if (pyr.scales.empty()) throw std::invalid_argument("empty pyramid");
    SaliencyMap sam = pyr.scales.front();
    for (std::size_t h = 1; h < pyr.scales.size(); ++h)
        for (std::size_t i = 0; i < sam.data.size(); ++i)
            sam.data[i] = std::max(sam.data[i], pyr.scales[h].data[i]);
    return sam;
}

/// All maximal diagonal runs of strictly positive saliency entries.
inline std::vector<MatchSequence> extract_lsss(const SaliencyMap& sam) {
    std::vector<MatchSequence> out;
    const auto rows = static_cast<std::ptrdiff_t>(sam.rows);
    const auto cols = static_cast<std::ptrdiff_t>(sam.cols);
    for (std::ptrdiff_t off = -(rows - 1); off <= cols - 1; ++off) {
        std::ptrdiff_t y = std::max<std::ptrdiff_t>(0, -off);
        std::ptrdiff_t l = y + off;
        MatchSequence run;
        bool in_run = false;
        for (; y < rows && l < cols; ++y, ++l) {
            if (sam.at(static_cast<std::size_t>(y), static_cast<std::size_t>(l)) > 0.0) {
                if (!in_run) {
                    run = MatchSequence{static_cast<std::size_t>(y), static_cast<std::size_t>(l),
                                        0, 0.0};
                    in_run = true;
                }
                ++run.ns;
            } else if (in_run) {
                out.push_back(run);
                in_run = false;
            }
        }
        if (in_run) out.push_back(run);
    }
    return out;
}

namespace detail {

// Signed angle of the chord joining a stroke's first and last point.
inline double chord_angle(const std::vector<SamplePoint>& stroke) {
    const auto& a = stroke.front();
    const auto& b = stroke.back();
    return std::atan2(b.y - a.y, b.x - a.x);
}

// Signed angle between successive chords, in (-pi, pi].
inline double wrap_angle(double a) {
    while (a <= -M_PI) a += 2.0 * M_PI;
    while (a > M_PI) a -= 2.0 * M_PI;
    return a;
}

}  // namespace detail

/// Target-point similarity vector of two matched stroke sequences:
/// [cos(2*dg_1), ..., cos(2*dg_{ns-1}), 1] where dg_k is the difference of
/// the turn angles between successive stroke chords.
inline std::vector<double> target_similarity(
    const std::vector<std::vector<SamplePoint>>& ref_strokes,
    const std::vector<std::vector<SamplePoint>>& q_strokes) {
    if (ref_strokes.size() != q_strokes.size())
        throw std::invalid_argument("sequence length mismatch");
    const std::size_t ns = ref_strokes.size();
    if (ns < 2) return {1.0};

    auto turns = [](const std::vector<std::vector<SamplePoint>>& strokes) {
        std::vector<double> out;
        for (std::size_t k = 0; k + 1 < strokes.size(); ++k)
            out.push_back(detail::wrap_angle(detail::chord_angle(strokes[k + 1]) -
                                             detail::chord_angle(strokes[k])));
        return out;
    };
    const auto alpha = turns(ref_strokes);
    const auto beta = turns(q_strokes);

    std::vector<double> t(ns);
    for (std::size_t k = 0; k + 1 < ns; ++k) t[k] = std::cos(2.0 * (alpha[k] - beta[k]));
    t[ns - 1] = 1.0;
    return t;
}

/// Mean of SAM(pair_k) * t_k over the sequence; 100 means a perfect match.
inline double global_similarity(const SaliencyMap& sam, const MatchSequence& seq,
                                const std::vector<double>& t) {
    if (t.size() != seq.ns) throw std::invalid_argument("target vector length mismatch");
    double acc = 0.0;
    for (std::size_t k = 0; k < seq.ns; ++k) {
        const auto [y, l] = seq.pair(k);
        acc += sam.at(y, l) * t[k];
    }
    return acc / static_cast<double>(seq.ns);
}

namespace detail {

inline std::vector<DigitalStroke> rasterize_strokes(const Signature& sig,
                                                    const Segmentation& seg) {
    std::vector<DigitalStroke> out;
    out.reserve(seg.stroke_count());
    for (std::size_t k = 0; k < seg.stroke_count(); ++k)
        out.push_back(rasterize(stroke_points(sig, seg, k)));
    return out;
}

}  // namespace detail

/// Full pipeline against a pre-segmented questioned signature: keeps the
/// LSSS runs with ns > th_len and global similarity > th_gs.
inline std::vector<MatchSequence> stability_regions(const Signature& ref, const Signature& q,
                                                    const Segmentation& q_seg,
                                                    const StabilityThresholds& th) {
    const Segmentation ref_seg = segment(ref);
    const auto ref_strokes = detail::rasterize_strokes(ref, ref_seg);
    const auto q_strokes = detail::rasterize_strokes(q, q_seg);

    const auto pyr = similarity_pyramid(ref_strokes, q_strokes, th.th_lcs);
    const auto sam = saliency_map(pyr);

    std::vector<MatchSequence> kept;
    for (auto seq : extract_lsss(sam)) {
        std::vector<std::vector<SamplePoint>> rs, qs;
        for (std::size_t k = 0; k < seq.ns; ++k) {
            const auto [y, l] = seq.pair(k);
            rs.push_back(stroke_points(ref, ref_seg, y));
            qs.push_back(stroke_points(q, q_seg, l));
        }
        seq.gs = global_similarity(sam, seq, target_similarity(rs, qs));
        if (static_cast<int>(seq.ns) > th.th_len && seq.gs > th.th_gs) kept.push_back(seq);
    }
    return kept;
}

inline std::vector<MatchSequence> stability_regions(const Signature& ref, const Signature& q,
                                                    const StabilityThresholds& th = {}) {
    return stability_regions(ref, q, segment(q), th);
}

/// How many references share a stability region containing each stroke of Q.
/// A stroke counts at most once per reference.
inline RelevanceProfile relevance_profile(const Signature& q, const Segmentation& q_seg,
                                          const std::vector<Signature>& refs,
                                          const StabilityThresholds& th = {}) {
    if (refs.empty()) throw std::invalid_argument("empty reference set");
    RelevanceProfile rel;
    rel.n_refs = static_cast<int>(refs.size());
    rel.counters.assign(q_seg.stroke_count(), 0);
    for (const auto& ref : refs) {
        const auto regions = stability_regions(ref, q, q_seg, th);
        for (std::size_t j = 0; j < rel.counters.size(); ++j) {
            const bool covered = std::any_of(regions.begin(), regions.end(),
                                             [&](const auto& r) { return r.contains_q_stroke(j); });
            if (covered) ++rel.counters[j];
        }
    }
    return rel;
}

inline RelevanceProfile relevance_profile(const Signature& q, const std::vector<Signature>& refs,
                                          const StabilityThresholds& th = {}) {
    return relevance_profile(q, segment(q), refs, th);
}

}  // namespace sigverify

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sigverify/features.hpp"
#include "sigverify/segmentation.hpp"
#include "sigverify/stability.hpp"

namespace sigverify {

/// Monotone alignment path; pairs are 0-based (reference row, questioned row)
/// from (0,0) to (m-1,n-1), each step advancing one or both indices.
struct WarpPath {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    std::size_t length() const { return pairs.size(); }
};

struct AlignmentResult {
    double distance = 0.0;
    WarpPath path;
    std::optional<Grid> cost_matrix;  // retained for debug dumps only
};

/// Sigmoid weight parameters and their relevance-driven schedules.
struct WeightParams {
    double b0 = 9.0;
    double b_min = 4.0;
    double b_max = 6.0;
    double c0 = -2.0;
    double c_min = 1.5;
    double c_max = 2.0;
};

inline double point_distance(const double* a, const double* b, std::size_t dim) {
    double acc = 0.0;
    for (std::size_t i = 0; i < dim; ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(acc);
}

inline double point_distance(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("dimension mismatch");
    return point_distance(a.data(), b.data(), a.size());
}

namespace detail {

// b/c schedule over a relevance pool of the given size. relevance = 1 maps
// to (b_max, c_min), relevance = pool to (b_min, c_max); a pool of one maps
// straight to (b_min, c_max).
inline std::pair<double, double> weight_schedule(int relevance, int pool,
                                                 const WeightParams& wp) {
    if (relevance == 0) return {wp.b0, wp.c0};
    if (pool <= 1) return {wp.b_min, wp.c_max};
    const double f = static_cast<double>(relevance - 1) / static_cast<double>(pool - 1);
    return {wp.b_max + (wp.b_min - wp.b_max) * f, wp.c_min + (wp.c_max - wp.c_min) * f};
}

inline double sigm(double d, double b, double c) {
    return 1.0 + 1.0 / (1.0 + std::exp(-c * (d - b)));
}

// Runs the three-predecessor recursion on a prepared cost grid and recovers
// one optimal path. Ties prefer diagonal, then (k-1, j), then (k, j-1).
inline AlignmentResult run_dtw(const Grid& cost, bool keep_matrix) {
    const std::size_t m = cost.rows, n = cost.cols;
    Grid psi(m, n, std::numeric_limits<double>::infinity());
    // step: 0 = diagonal, 1 = from (k-1, j), 2 = from (k, j-1)
    std::vector<std::uint8_t> step(m * n, 0);

    psi.at(0, 0) = cost.at(0, 0);
    for (std::size_t k = 0; k < m; ++k) {
        for (std::size_t j = 0; j < n; ++j) {
            if (k == 0 && j == 0) continue;
            double best = std::numeric_limits<double>::infinity();
            std::uint8_t from = 0;
            if (k > 0 && j > 0 && psi.at(k - 1, j - 1) < best) {
                best = psi.at(k - 1, j - 1);
                from = 0;
            }
            if (k > 0 && psi.at(k - 1, j) < best) {
                best = psi.at(k - 1, j);
                from = 1;
            }
            if (j > 0 && psi.at(k, j - 1) < best) {
                best = psi.at(k, j - 1);
                from = 2;
            }
            psi.at(k, j) = cost.at(k, j) + best;
            step[k * n + j] = from;
        }
    }

    AlignmentResult res;
    res.distance = psi.at(m - 1, n - 1);
    std::size_t k = m - 1, j = n - 1;
    std::vector<std::pair<std::size_t, std::size_t>> rev{{k, j}};
    while (k != 0 || j != 0) {
        switch (step[k * n + j]) {
            case 0: --k; --j; break;
            case 1: --k; break;
            default: --j; break;
        }
        rev.emplace_back(k, j);
    }
    res.path.pairs.assign(rev.rbegin(), rev.rend());
    if (keep_matrix) res.cost_matrix = cost;
    return res;
}

inline Grid raw_cost_grid(const FeatureMatrix& q, const FeatureMatrix& r) {
    Grid cost(r.point_count, q.point_count);
    for (std::size_t k = 0; k < r.point_count; ++k)
        for (std::size_t j = 0; j < q.point_count; ++j)
            cost.at(k, j) = point_distance(r.row(k), q.row(j), r.cols);
    return cost;
}

}  // namespace detail

/// Classical DTW between a questioned and a reference feature matrix.
inline AlignmentResult dtw(const FeatureMatrix& q, const FeatureMatrix& r,
                           bool keep_matrix = false) {
    if (q.feature_set != r.feature_set) throw std::invalid_argument("feature-set mismatch");
    if (q.point_count == 0 || r.point_count == 0) throw std::invalid_argument("empty matrix");
    return detail::run_dtw(detail::raw_cost_grid(q, r), keep_matrix);
}

/// Sigmoid weight for a point pair: parameters b, c follow the relevance of
/// the questioned point's stroke. Output lies in (1, 2) for finite d.
inline double weight(double d, int relevance, int n_refs, const WeightParams& params = {}) {
    if (relevance < 0) throw std::invalid_argument("negative relevance");
    if (relevance > 0 && n_refs < 2)
        throw std::invalid_argument("relevance schedule needs at least 2 references");
    const auto [b, c] = detail::weight_schedule(relevance, n_refs, params);
    return detail::sigm(d, b, c);
}

/// Replaceable weighting stage; the default applies the sigmoid schedule,
/// unit_weight_fn turns SM-DTW back into classical DTW.
using WeightFn = std::function<double(double d, int relevance, int n_refs)>;

inline double unit_weight_fn(double, int, int) { return 1.0; }

/// Stability-modulated DTW. Each questioned point inherits the relevance of
/// its containing stroke (boundary samples belong to the earlier stroke).
/// Raw zero distances at relevance-0 questioned points are replaced by the
/// minimum strictly positive raw distance before weighting.
inline AlignmentResult smdtw(const FeatureMatrix& q, const FeatureMatrix& r,
                             const RelevanceProfile& rel, const Segmentation& q_seg,
                             const WeightParams& params = {}, const WeightFn& weight_fn = {},
                             bool keep_matrix = false) {
    if (q.feature_set != r.feature_set) throw std::invalid_argument("feature-set mismatch");
    if (q.point_count == 0 || r.point_count == 0) throw std::invalid_argument("empty matrix");
    if (rel.counters.size() != q_seg.stroke_count())
        throw std::invalid_argument("relevance profile does not match segmentation");
    if (q_seg.boundaries.back() != q.point_count - 1)
        throw std::invalid_argument("segmentation does not match questioned matrix");

    std::vector<int> point_relevance(q.point_count);
    for (std::size_t j = 0; j < q.point_count; ++j)
        point_relevance[j] = rel.counters[q_seg.stroke_of_sample(j)];

    Grid cost = detail::raw_cost_grid(q, r);

    double min_pos = std::numeric_limits<double>::infinity();
    for (double v : cost.data)
        if (v > 0.0) min_pos = std::min(min_pos, v);

    for (std::size_t k = 0; k < cost.rows; ++k) {
        for (std::size_t j = 0; j < cost.cols; ++j) {
            double d = cost.at(k, j);
            if (d == 0.0 && point_relevance[j] == 0 && std::isfinite(min_pos)) d = min_pos;
            double w;
            if (weight_fn) {
                w = weight_fn(d, point_relevance[j], rel.n_refs);
            } else {
                const auto [b, c] =
                    detail::weight_schedule(point_relevance[j], rel.n_refs, params);
                w = detail::sigm(d, b, c);
            }
            cost.at(k, j) = w * d;
        }
    }
    return detail::run_dtw(cost, keep_matrix);
}

}  // namespace sigverify

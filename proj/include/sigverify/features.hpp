#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sigverify/signature.hpp"

namespace sigverify {

/// The fifteen per-point feature selections. Columns are drawn from
/// x, y, x', y', x'', y'', p, p' (primes are time derivatives).
enum class FeatureSetId {
    F1, F2, F3, F4, F5, F6, F7, F8, F9, F10, F11, F12, F13, F14, F15
};

enum class FeatureCol { x, y, vx, vy, ax, ay, p, vp };

inline const std::vector<FeatureCol>& feature_columns(FeatureSetId fs) {
    using C = FeatureCol;
    static const std::array<std::vector<C>, 15> table = {{
        {C::x, C::y, C::vx, C::vy, C::ax, C::ay, C::p, C::vp},  // F1
        {C::x, C::y, C::ax, C::ay, C::p, C::vp},                // F2
        {C::x, C::y, C::vx, C::vy, C::p, C::vp},                // F3
        {C::x, C::y, C::vx, C::vy, C::ax, C::ay},               // F4
        {C::vx, C::vy, C::ax, C::ay, C::p, C::vp},              // F5
        {C::x, C::y, C::p, C::vp},                              // F6
        {C::x, C::y, C::ax, C::ay},                             // F7
        {C::x, C::y, C::vx, C::vy},                             // F8
        {C::ax, C::ay, C::p, C::vp},                            // F9
        {C::vx, C::vy, C::ax, C::ay},                           // F10
        {C::vx, C::vy, C::p, C::vp},                            // F11
        {C::x, C::y},                                           // F12
        {C::p, C::vp},                                          // F13
        {C::ax, C::ay},                                         // F14
        {C::vx, C::vy},                                         // F15
    }};
    return table[static_cast<std::size_t>(fs)];
}

inline std::string to_string(FeatureSetId fs) {
    return "F" + std::to_string(static_cast<int>(fs) + 1);
}

inline std::optional<FeatureSetId> feature_set_from_string(const std::string& s) {
    for (int i = 0; i < 15; ++i) {
        auto fs = static_cast<FeatureSetId>(i);
        if (to_string(fs) == s) return fs;
    }
    return std::nullopt;
}

/// Row-major matrix of z-scored feature values, one row per sample point.
struct FeatureMatrix {
    FeatureSetId feature_set = FeatureSetId::F5;
    std::size_t point_count = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    double at(std::size_t row, std::size_t col) const { return data[row * cols + col]; }
    const double* row(std::size_t r) const { return data.data() + r * cols; }
};

/// Central differences at interior points, one-sided at the endpoints.
inline std::vector<double> derivative(const std::vector<double>& values,
                                      const std::vector<double>& timestamps) {
    if (values.size() != timestamps.size()) throw std::invalid_argument("length mismatch");
    const std::size_t n = values.size();
    if (n < 2) throw std::invalid_argument("need at least 2 values");
    std::vector<double> out(n);
    out[0] = (values[1] - values[0]) / (timestamps[1] - timestamps[0]);
    for (std::size_t i = 1; i + 1 < n; ++i)
        out[i] = (values[i + 1] - values[i - 1]) / (timestamps[i + 1] - timestamps[i - 1]);
    out[n - 1] = (values[n - 1] - values[n - 2]) / (timestamps[n - 1] - timestamps[n - 2]);
    return out;
}

namespace detail {

// In-place z-score; a constant column becomes all zeros.
inline void zscore(std::vector<double>& col) {
    const std::size_t n = col.size();
    double mean = 0.0;
    for (double v : col) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : col) var += (v - mean) * (v - mean);
    const double sd = std::sqrt(var / static_cast<double>(n));
    if (sd == 0.0) {
        for (double& v : col) v = 0.0;
    } else {
        for (double& v : col) v = (v - mean) / sd;
    }
}

}  // namespace detail

/// Extracts the columns of the given feature set, differentiating on the raw
/// series with real timestamps, then z-scores each column over the whole
/// signature.
inline FeatureMatrix build_features(const Signature& sig, FeatureSetId fs) {
    const std::size_t n = sig.samples.size();
    std::vector<double> t(n), x(n), y(n), p(n);
    for (std::size_t i = 0; i < n; ++i) {
        t[i] = sig.samples[i].t;
        x[i] = sig.samples[i].x;
        y[i] = sig.samples[i].y;
        p[i] = sig.samples[i].p;
    }
    const auto& cols = feature_columns(fs);
    bool need_v = false, need_a = false, need_vp = false;
    for (auto c : cols) {
        if (c == FeatureCol::vx || c == FeatureCol::vy) need_v = true;
        if (c == FeatureCol::ax || c == FeatureCol::ay) need_v = need_a = true;
        if (c == FeatureCol::vp) need_vp = true;
    }
    std::vector<double> vx, vy, ax, ay, vp;
    if (need_v) {
        vx = derivative(x, t);
        vy = derivative(y, t);
    }
    if (need_a) {
        ax = derivative(vx, t);
        ay = derivative(vy, t);
    }
    if (need_vp) vp = derivative(p, t);

    auto series = [&](FeatureCol c) -> const std::vector<double>& {
        switch (c) {
            case FeatureCol::x: return x;
            case FeatureCol::y: return y;
            case FeatureCol::vx: return vx;
            case FeatureCol::vy: return vy;
            case FeatureCol::ax: return ax;
            case FeatureCol::ay: return ay;
            case FeatureCol::p: return p;
            default: return vp;
        }
    };

    FeatureMatrix fm;
    fm.feature_set = fs;
    fm.point_count = n;
    fm.cols = cols.size();
    fm.data.resize(n * cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c) {
        std::vector<double> col = series(cols[c]);
        detail::zscore(col);
        for (std::size_t r = 0; r < n; ++r) fm.data[r * fm.cols + c] = col[r];
    }
    return fm;
}

}  // namespace sigverify

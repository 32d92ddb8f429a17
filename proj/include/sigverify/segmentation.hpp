#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <vector>

#include "sigverify/shapesim.hpp"
#include "sigverify/signature.hpp"

namespace sigverify {

/// Partition of a signature into strokes. Boundaries are strictly increasing
/// sample indices; consecutive strokes share exactly their boundary sample.
struct Segmentation {
    std::vector<std::size_t> boundaries;  // first = 0, last = last sample index

    std::size_t stroke_count() const { return boundaries.size() - 1; }

    /// Inclusive sample range [first, last] of stroke k.
    std::pair<std::size_t, std::size_t> stroke_range(std::size_t k) const {
        if (k >= stroke_count()) throw std::out_of_range("stroke index out of range");
        return {boundaries[k], boundaries[k + 1]};
    }

    /// Stroke containing sample j; a sample on a boundary belongs to the
    /// earlier stroke.
    std::size_t stroke_of_sample(std::size_t j) const {
        auto it = std::lower_bound(boundaries.begin(), boundaries.end(), j);
        if (it == boundaries.end()) throw std::out_of_range("sample index out of range");
        const auto idx = static_cast<std::size_t>(it - boundaries.begin());
        return idx == 0 ? 0 : idx - 1;
    }

    bool operator==(const Segmentation&) const = default;
};

namespace detail {

struct ResampledSpan {
    std::vector<double> xs, ys;   // unit-step positions along the cell polyline
    std::vector<double> turning;  // signed turning angle at interior points
};

// Arc-length resampling (step 1) of the Bresenham polyline of a point span.
inline ResampledSpan resample_span(const std::vector<double>& nx, const std::vector<double>& ny) {
    ResampledSpan out;
    std::vector<Cell> cells;
    for (std::size_t i = 0; i + 1 < nx.size(); ++i) {
        const Cell a{static_cast<int>(std::lround(nx[i])), static_cast<int>(std::lround(ny[i]))};
        const Cell b{static_cast<int>(std::lround(nx[i + 1])),
                     static_cast<int>(std::lround(ny[i + 1]))};
        for (const auto& c : bresenham(a, b))
            if (cells.empty() || !(c == cells.back())) cells.push_back(c);
    }
    if (cells.size() < 3) return out;

    std::vector<double> arc(cells.size(), 0.0);
    for (std::size_t i = 1; i < cells.size(); ++i)
        arc[i] = arc[i - 1] + std::hypot(static_cast<double>(cells[i].x - cells[i - 1].x),
                                         static_cast<double>(cells[i].y - cells[i - 1].y));
    const double total = arc.back();
    const auto m = static_cast<std::size_t>(std::floor(total)) + 1;
    if (m < 3) return out;

    std::size_t seg = 0;
    for (std::size_t k = 0; k < m; ++k) {
        const double s = std::min(static_cast<double>(k), total);
        while (seg + 2 < cells.size() && arc[seg + 1] <= s) ++seg;
        const double len = arc[seg + 1] - arc[seg];
        const double f = len > 0.0 ? (s - arc[seg]) / len : 0.0;
        out.xs.push_back(cells[seg].x + f * (cells[seg + 1].x - cells[seg].x));
        out.ys.push_back(cells[seg].y + f * (cells[seg + 1].y - cells[seg].y));
    }

    out.turning.assign(m, 0.0);
    for (std::size_t k = 1; k + 1 < m; ++k) {
        const double ux = out.xs[k] - out.xs[k - 1], uy = out.ys[k] - out.ys[k - 1];
        const double vx = out.xs[k + 1] - out.xs[k], vy = out.ys[k + 1] - out.ys[k];
        if ((ux == 0.0 && uy == 0.0) || (vx == 0.0 && vy == 0.0)) continue;
        out.turning[k] = std::atan2(ux * vy - uy * vx, ux * vx + uy * vy);
    }
    return out;
}

// Convolution with an unnormalized Gaussian, i.e. locally accumulated
// turning over a window of width ~sigma.
inline std::vector<double> accumulate_turning(const std::vector<double>& theta, double sigma) {
    const int radius = static_cast<int>(std::ceil(4.0 * sigma));
    const auto n = static_cast<int>(theta.size());
    std::vector<double> kernel(2 * radius + 1);
    for (int j = -radius; j <= radius; ++j)
        kernel[j + radius] = std::exp(-(j * j) / (2.0 * sigma * sigma));
    std::vector<double> out(theta.size(), 0.0);
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int j = std::max(0, i - radius); j <= std::min(n - 1, i + radius); ++j)
            acc += theta[j] * kernel[j - i + radius];
        out[i] = acc;
    }
    return out;
}

inline std::vector<std::size_t> local_maxima(const std::vector<double>& mag, double threshold) {
    std::vector<std::size_t> out;
    for (std::size_t k = 1; k + 1 < mag.size(); ++k)
        if (mag[k] > threshold && mag[k] > mag[k - 1] && mag[k] >= mag[k + 1]) out.push_back(k);
    return out;
}

}  // namespace detail

/// Splits a signature into strokes at pen-up runs and salient curvature
/// extrema of the arc-length-resampled trajectory.
///
/// Coordinates are normalized to a fixed bounding-box size before
/// rasterization, so boundary indices are invariant under uniform scaling
/// and translation. Candidate extrema must persist across at least two
/// consecutive Gaussian scales; non-maximum suppression keeps the strongest
/// candidate per window; strokes shorter than 3 samples are merged.
inline Segmentation segment(const Signature& sig) {
    detail::check_invariants(sig);
    const std::size_t n = sig.samples.size();

    std::vector<std::size_t> boundaries{0, n - 1};

    // pen-up runs induce boundaries at both ends
    std::size_t i = 0;
    while (i < n) {
        if (sig.samples[i].p == 0.0) {
            std::size_t j = i;
            while (j + 1 < n && sig.samples[j + 1].p == 0.0) ++j;
            boundaries.push_back(i);
            boundaries.push_back(j);
            i = j + 1;
        } else {
            ++i;
        }
    }

    // normalize to a 256-unit bounding box (scale/translation invariance)
    double minx = sig.samples[0].x, maxx = minx, miny = sig.samples[0].y, maxy = miny;
    for (const auto& s : sig.samples) {
        minx = std::min(minx, s.x);
        maxx = std::max(maxx, s.x);
        miny = std::min(miny, s.y);
        maxy = std::max(maxy, s.y);
    }
    const double dim = std::max(maxx - minx, maxy - miny);

    if (dim > 0.0) {
        const double scale = 256.0 / dim;
        static constexpr double kScales[] = {2.0, 4.0, 8.0, 16.0};
        static constexpr double kAngleThreshold = 15.0 * M_PI / 180.0;
        static constexpr int kPersistRadius = 3;
        static constexpr int kNmsWindow = 5;

        // pen-down spans
        std::size_t s0 = 0;
        while (s0 < n) {
            if (sig.samples[s0].p == 0.0) {
                ++s0;
                continue;
            }
            std::size_t s1 = s0;
            while (s1 + 1 < n && sig.samples[s1 + 1].p > 0.0) ++s1;

            if (s1 - s0 + 1 >= 3) {
                std::vector<double> nx, ny;
                for (std::size_t k = s0; k <= s1; ++k) {
                    nx.push_back((sig.samples[k].x - minx) * scale);
                    ny.push_back((sig.samples[k].y - miny) * scale);
                }
                const auto span = detail::resample_span(nx, ny);
                if (!span.turning.empty()) {
                    std::vector<std::vector<std::size_t>> maxima;
                    std::vector<std::vector<double>> mags;
                    for (double sigma : kScales) {
                        auto acc = detail::accumulate_turning(span.turning, sigma);
                        for (double& v : acc) v = std::fabs(v);
                        maxima.push_back(detail::local_maxima(acc, kAngleThreshold));
                        mags.push_back(std::move(acc));
                    }

                    // keep maxima that persist at the next coarser scale
                    struct Candidate {
                        std::size_t pos;
                        double strength;
                    };
                    std::vector<Candidate> cands;
                    for (std::size_t sc = 0; sc + 1 < maxima.size(); ++sc) {
                        for (auto pos : maxima[sc]) {
                            const bool persists = std::any_of(
                                maxima[sc + 1].begin(), maxima[sc + 1].end(), [&](std::size_t q) {
                                    return std::llabs(static_cast<long long>(q) -
                                                      static_cast<long long>(pos)) <=
                                           kPersistRadius;
                                });
                            if (persists) cands.push_back({pos, mags[sc][pos]});
                        }
                    }
                    std::sort(cands.begin(), cands.end(), [](const auto& a, const auto& b) {
                        if (a.strength != b.strength) return a.strength > b.strength;
                        return a.pos < b.pos;
                    });
                    std::vector<std::size_t> accepted;
                    for (const auto& c : cands) {
                        const bool clash =
                            std::any_of(accepted.begin(), accepted.end(), [&](std::size_t q) {
                                return std::llabs(static_cast<long long>(q) -
                                                  static_cast<long long>(c.pos)) < kNmsWindow;
                            });
                        if (!clash) accepted.push_back(c.pos);
                    }

                    // map back to the nearest original sample of the span
                    for (auto pos : accepted) {
                        const double cx = span.xs[pos], cy = span.ys[pos];
                        std::size_t best = s0;
                        double best_d = std::numeric_limits<double>::infinity();
                        for (std::size_t k = s0; k <= s1; ++k) {
                            const double d = std::hypot(nx[k - s0] - cx, ny[k - s0] - cy);
                            if (d < best_d) {
                                best_d = d;
                                best = k;
                            }
                        }
                        if (best > s0 && best < s1) boundaries.push_back(best);
                    }
                }
            }
            s0 = s1 + 1;
        }
    }

    std::sort(boundaries.begin(), boundaries.end());
    boundaries.erase(std::unique(boundaries.begin(), boundaries.end()), boundaries.end());

    // merge strokes shorter than 3 samples into the preceding stroke
    // (or the following one, if first)
    bool merged = true;
    while (merged && boundaries.size() > 2) {
        merged = false;
        for (std::size_t k = 0; k + 1 < boundaries.size(); ++k) {
            if (boundaries[k + 1] - boundaries[k] + 1 < 3) {
                boundaries.erase(boundaries.begin() +
                                 static_cast<std::ptrdiff_t>(k == 0 ? 1 : k));
                merged = true;
                break;
            }
        }
    }

    Segmentation seg;
    seg.boundaries = std::move(boundaries);
    return seg;
}

/// The inclusive sample range of stroke k.
inline std::vector<SamplePoint> stroke_points(const Signature& sig, const Segmentation& seg,
                                              std::size_t k) {
    const auto [first, last] = seg.stroke_range(k);
    return {sig.samples.begin() + static_cast<std::ptrdiff_t>(first),
            sig.samples.begin() + static_cast<std::ptrdiff_t>(last) + 1};
}

}  // namespace sigverify

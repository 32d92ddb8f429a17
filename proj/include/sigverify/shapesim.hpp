#pragma once

#include <cmath>
#include <cstdlib>
#include <span>
#include <stdexcept>
#include <vector>

#include "sigverify/signature.hpp"

namespace sigverify {

struct Cell {
    int x = 0;
    int y = 0;
    bool operator==(const Cell&) const = default;
};

/// An 8-connected digital line plus its direction profile: kProfileLength
/// chord angles obtained by uniform arc-length sampling of the cell polyline.
struct DigitalStroke {
    static constexpr std::size_t kProfileLength = 32;

    std::vector<Cell> cells;
    std::vector<double> tangent_profile;
};

/// Integer Bresenham line from a to b inclusive.
inline std::vector<Cell> bresenham(Cell a, Cell b) {
    std::vector<Cell> out;
    int x = a.x, y = a.y;
    const int dx = std::abs(b.x - a.x), dy = -std::abs(b.y - a.y);
    const int sx = a.x < b.x ? 1 : -1, sy = a.y < b.y ? 1 : -1;
    int err = dx + dy;
    while (true) {
        out.push_back({x, y});
        if (x == b.x && y == b.y) break;
        const int e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            x += sx;
        }
        if (e2 <= dx) {
            err += dx;
            y += sy;
        }
    }
    return out;
}

namespace detail {

inline std::vector<double> profile_from_cells(const std::vector<Cell>& cells, std::size_t L) {
    // cumulative arc length along the cell polyline
    std::vector<double> arc(cells.size(), 0.0);
    for (std::size_t i = 1; i < cells.size(); ++i) {
        const double dx = cells[i].x - cells[i - 1].x;
        const double dy = cells[i].y - cells[i - 1].y;
        arc[i] = arc[i - 1] + std::hypot(dx, dy);
    }
    const double total = arc.back();

    auto point_at = [&](double s) {
        std::size_t lo = 0, hi = cells.size() - 1;
        while (lo + 1 < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (arc[mid] <= s)
                lo = mid;
            else
                hi = mid;
        }
        const double seg = arc[hi] - arc[lo];
        const double f = seg > 0.0 ? (s - arc[lo]) / seg : 0.0;
        return std::pair<double, double>{cells[lo].x + f * (cells[hi].x - cells[lo].x),
                                         cells[lo].y + f * (cells[hi].y - cells[lo].y)};
    };

    std::vector<double> profile(L);
    for (std::size_t k = 0; k < L; ++k) {
        const auto a = point_at(total * static_cast<double>(k) / static_cast<double>(L));
        const auto b = point_at(total * static_cast<double>(k + 1) / static_cast<double>(L));
        profile[k] = std::atan2(b.second - a.second, b.first - a.first);
    }
    return profile;
}

}  // namespace detail

/// Rasterizes a point sequence: Bresenham segments between consecutive
/// rounded positions, with duplicate cells at the joints removed.
inline DigitalStroke rasterize(std::span<const SamplePoint> points,
                               std::size_t profile_length = DigitalStroke::kProfileLength) {
    if (points.size() < 2) throw std::invalid_argument("need at least 2 points");
    DigitalStroke out;
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        const Cell a{static_cast<int>(std::lround(points[i].x)),
                     static_cast<int>(std::lround(points[i].y))};
        const Cell b{static_cast<int>(std::lround(points[i + 1].x)),
                     static_cast<int>(std::lround(points[i + 1].y))};
        for (const auto& c : bresenham(a, b))
            if (out.cells.empty() || !(c == out.cells.back())) out.cells.push_back(c);
    }
    if (out.cells.size() < 2) throw std::invalid_argument("degenerate stroke");
    out.tangent_profile = detail::profile_from_cells(out.cells, profile_length);
    return out;
}

inline DigitalStroke rasterize(const std::vector<SamplePoint>& points,
                               std::size_t profile_length = DigitalStroke::kProfileLength) {
    return rasterize(std::span<const SamplePoint>(points), profile_length);
}

/// The same digital line traversed in the opposite direction: every tangent
/// rotates by pi, so similarity against the original is exactly 0.
inline DigitalStroke reverse(const DigitalStroke& s) {
    DigitalStroke out;
    out.cells.assign(s.cells.rbegin(), s.cells.rend());
    out.tangent_profile.reserve(s.tangent_profile.size());
    for (double a : s.tangent_profile) out.tangent_profile.push_back(a + M_PI);
    return out;
}

/// Shape similarity in [0, 100]: 100 for identical direction profiles, 0 for
/// everywhere-opposed ones.
inline double stroke_similarity(const DigitalStroke& a, const DigitalStroke& b) {
    if (a.tangent_profile.size() != b.tangent_profile.size())
        throw std::invalid_argument("profile length mismatch");
    const std::size_t L = a.tangent_profile.size();
    double acc = 0.0;
    for (std::size_t i = 0; i < L; ++i)
        acc += std::cos(a.tangent_profile[i] - b.tangent_profile[i]);
    return 100.0 * (1.0 + acc / static_cast<double>(L)) / 2.0;
}

}  // namespace sigverify

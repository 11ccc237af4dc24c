#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace metriclab {

// Points are plain coordinate vectors; all geometry helpers work on spans so
// hot loops can run over flat buffers without allocating.
using Point = std::vector<double>;

struct Box {
    Point lo;
    Point hi;

    int dimension() const { return static_cast<int>(lo.size()); }

    double extent(int axis) const { return hi[static_cast<size_t>(axis)] - lo[static_cast<size_t>(axis)]; }

    double max_extent() const {
        double m = 0.0;
        for (size_t i = 0; i < lo.size(); ++i) m = std::max(m, hi[i] - lo[i]);
        return m;
    }

    double diameter() const {
        double s = 0.0;
        for (size_t i = 0; i < lo.size(); ++i) s += (hi[i] - lo[i]) * (hi[i] - lo[i]);
        return std::sqrt(s);
    }

    bool contains(std::span<const double> x) const {
        for (size_t i = 0; i < lo.size(); ++i)
            if (x[i] < lo[i] || x[i] > hi[i]) return false;
        return true;
    }
};

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(std::span<const double> a) { return dot(a, a); }

inline double norm(std::span<const double> a) { return std::sqrt(norm2(a)); }

inline double dist2(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

inline double dist(std::span<const double> a, std::span<const double> b) {
    return std::sqrt(dist2(a, b));
}

// Distance from p to the closed segment [a, b] in any dimension.
inline double dist_to_segment(std::span<const double> p, std::span<const double> a,
                              std::span<const double> b) {
    double ab2 = 0.0, apab = 0.0;
    for (size_t i = 0; i < p.size(); ++i) {
        const double d = b[i] - a[i];
        ab2 += d * d;
        apab += (p[i] - a[i]) * d;
    }
    double t = ab2 > 0.0 ? apab / ab2 : 0.0;
    t = std::min(1.0, std::max(0.0, t));
    double s = 0.0;
    for (size_t i = 0; i < p.size(); ++i) {
        const double c = a[i] + t * (b[i] - a[i]) - p[i];
        s += c * c;
    }
    return std::sqrt(s);
}

inline Point lerp(std::span<const double> a, std::span<const double> b, double t) {
    Point r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + t * (b[i] - a[i]);
    return r;
}

} // namespace metriclab

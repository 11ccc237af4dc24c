#include "metriclab/closed_form.hpp"

#include <algorithm>
#include <cmath>

#include "metriclab/errors.hpp"

namespace metriclab {
namespace {

constexpr double kCollinearTol = 1e-9;

MetricResult closed(double value) {
    return MetricResult{value, Method::closed_form, 1e-14 * (1.0 + std::abs(value)), true};
}

// Norm of the component of v orthogonal to u (0 if u = 0).
double perp_component(std::span<const double> u, std::span<const double> v) {
    const double u2 = norm2(u);
    if (u2 == 0.0) return 0.0;
    const double t = dot(u, v) / u2;
    double s = 0.0;
    for (size_t i = 0; i < u.size(); ++i) {
        const double c = v[i] - t * u[i];
        s += c * c;
    }
    return std::sqrt(s);
}

} // namespace

MetricResult j_metric(const DomainOracle& domain, std::span<const double> x,
                      std::span<const double> y) {
    const double dx = domain.delta(x), dy = domain.delta(y);
    if (dx <= 0.0 || dy <= 0.0)
        throw PointOutsideDomain("j_metric: both points must lie inside the domain");
    const double r = dist(x, y) / std::min(dx, dy);
    // log1p protects small ratios from cancellation; for r >= 1 the sum 1 + r
    // is exact whenever r is (e.g. integer ratios from symmetric pairs) and
    // the plain log route is correctly rounded where common log1p
    // implementations allow a final-digit slip.
    return closed(r >= 1.0 ? std::log(1.0 + r) : std::log1p(r));
}

MetricResult rho_ball(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DimensionMismatch("rho_ball: point dimensions differ");
    const double ax = 1.0 - norm2(x), ay = 1.0 - norm2(y);
    if (ax <= 0.0 || ay <= 0.0)
        throw PointOutsideDomain("rho_ball: points must lie inside the unit ball");
    return closed(2.0 * std::asinh(dist(x, y) / std::sqrt(ax * ay)));
}

MetricResult k_halfspace(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DimensionMismatch("k_halfspace: point dimensions differ");
    const double xn = x[x.size() - 1], yn = y[y.size() - 1];
    if (xn <= 0.0 || yn <= 0.0)
        throw PointOutsideDomain("k_halfspace: points must lie in the upper half-space");
    return closed(2.0 * std::asinh(dist(x, y) / (2.0 * std::sqrt(xn * yn))));
}

MetricResult chordal(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DimensionMismatch("chordal: point dimensions differ");
    // One square root of the product: exact for symmetric antipodal pairs,
    // never less accurate than two roots multiplied.
    return closed(dist(x, y) / std::sqrt((1.0 + norm2(x)) * (1.0 + norm2(y))));
}

double chordal_to_infinity(std::span<const double> x) { return 1.0 / std::sqrt(1.0 + norm2(x)); }

MetricResult k_radial_ball(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DimensionMismatch("k_radial_ball: point dimensions differ");
    const double nx = norm(x), ny = norm(y);
    if (nx >= 1.0 || ny >= 1.0)
        throw PointOutsideDomain("k_radial_ball: points must lie inside the unit ball");
    const double scale = std::max(nx, ny);
    if (scale > 0.0 && perp_component(nx >= ny ? x : y, nx >= ny ? y : x) > kCollinearTol * scale)
        throw NotRadialConfiguration("k_radial_ball: x, y and the origin are not collinear");
    if (nx > 0.0 && ny > 0.0 && dot(x, y) < 0.0) {
        // the origin separates the points: k is additive through 0
        return closed(-std::log1p(-nx) - std::log1p(-ny));
    }
    return closed(std::abs(std::log1p(-nx) - std::log1p(-ny)));
}

MetricResult k_segment_to_boundary(const DomainOracle& domain, std::span<const double> z0,
                                   std::span<const double> u, std::span<const double> v) {
    const double d0 = domain.delta(z0);
    if (d0 <= 0.0) throw PointOutsideDomain("k_segment_to_boundary: base point outside domain");
    const double du = domain.delta(u), dv = domain.delta(v);
    if (du <= 0.0 || dv <= 0.0)
        throw PointOutsideDomain("k_segment_to_boundary: segment points outside domain");

    const double tol = kCollinearTol * std::max(1.0, d0);
    // Rate characterization: delta decreases at unit speed exactly along the
    // segment from z0 to a nearest boundary point.
    if (std::abs(d0 - dist(z0, u) - du) > tol || std::abs(d0 - dist(z0, v) - dv) > tol)
        throw NotOnNearestBoundarySegment(
            "k_segment_to_boundary: points are not on a nearest-boundary segment of the base point");

    const size_t n = z0.size();
    Point ru(n), rv(n);
    for (size_t i = 0; i < n; ++i) {
        ru[i] = u[i] - z0[i];
        rv[i] = v[i] - z0[i];
    }
    const double lu = norm(ru), lv = norm(rv);
    if (lu > tol && lv > tol) {
        if (perp_component(ru, rv) > kCollinearTol * std::max(lu, lv) ||
            dot(ru, rv) < 0.0)
            throw NotOnNearestBoundarySegment(
                "k_segment_to_boundary: points head toward different boundary points");
    }
    return closed(std::abs(std::log(du / dv)));
}

Point inversion_map(std::span<const double> a, double r, std::span<const double> x) {
    if (a.size() != x.size()) throw DimensionMismatch("inversion_map: point dimensions differ");
    if (r <= 0.0) throw OutOfRange("inversion_map: radius must be positive");
    const double d2 = dist2(x, a);
    if (d2 == 0.0) throw CenterSingularity("inversion_map: x coincides with the center");
    const double f = r * r / d2;
    Point h(a.size());
    for (size_t i = 0; i < a.size(); ++i) h[i] = a[i] + f * (x[i] - a[i]);
    return h;
}

double modulus_bound(ModulusKind kind, double t, double r) {
    if (t < 0.0) throw OutOfRange("modulus_bound: argument must be >= 0");
    switch (kind) {
        case ModulusKind::euclid_from_k:
            if (r <= 0.0) throw OutOfRange("modulus_bound: radius must be positive");
            return 2.0 * r * -std::expm1(-0.5 * t);
        case ModulusKind::euclid_from_j:
            if (r <= 0.0) throw OutOfRange("modulus_bound: radius must be positive");
            return 2.0 * r * std::tanh(0.5 * t);
        case ModulusKind::chordal_from_euclid:
            if (t >= 2.0)
                throw OutOfRange("modulus_bound: chordal form requires t < 2");
            return t / (1.0 + 0.25 * t * t);
    }
    throw OutOfRange("modulus_bound: unknown kind");
}

} // namespace metriclab

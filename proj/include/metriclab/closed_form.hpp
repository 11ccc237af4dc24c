#pragma once

#include <span>

#include "metriclab/domain.hpp"
#include "metriclab/point.hpp"

namespace metriclab {

enum class Method { closed_form, numeric };

struct MetricResult {
    double value = 0.0;
    Method method = Method::closed_form;
    double error_bound = 0.0;
    bool converged = true;
};

// Distance-ratio metric on an arbitrary domain:
//   j(x, y) = log(1 + |x - y| / min{delta(x), delta(y)}).
// Throws PointOutsideDomain if either point is not interior.
MetricResult j_metric(const DomainOracle& domain, std::span<const double> x,
                      std::span<const double> y);

// Hyperbolic metric of the unit ball B^n (density 2 / (1 - |z|^2)):
//   sinh(rho / 2) = |x - y| / sqrt((1 - |x|^2)(1 - |y|^2)).
MetricResult rho_ball(std::span<const double> x, std::span<const double> y);

// Hyperbolic = quasihyperbolic metric of the upper half-space {x_n > 0}:
//   cosh(rho) = 1 + |x - y|^2 / (2 x_n y_n),
// evaluated in the stable form rho = 2 asinh(|x - y| / (2 sqrt(x_n y_n))).
MetricResult k_halfspace(std::span<const double> x, std::span<const double> y);

// Chordal metric q(x, y) = |x - y| / (sqrt(1 + |x|^2) sqrt(1 + |y|^2)).
MetricResult chordal(std::span<const double> x, std::span<const double> y);

// Flagged special case: q(x, infinity) = 1 / sqrt(1 + |x|^2).
double chordal_to_infinity(std::span<const double> x);

// Quasihyperbolic distance in the unit ball for radial configurations
// (x, y, 0 collinear: origin between the points, or both on one radius):
//   k(0, x) = log(1 / (1 - |x|)),  k(b r, b s) = log((1 - r) / (1 - s)).
// Throws NotRadialConfiguration otherwise (collinearity tolerance 1e-9).
MetricResult k_radial_ball(std::span<const double> x, std::span<const double> y);

// Quasihyperbolic distance along a segment from z0 toward one of its nearest
// boundary points: for u, v on that segment, k(u, v) = |log(delta(u)/delta(v))|.
// The configuration is verified through the rate characterization
// delta(p) = delta(z0) - |z0 - p| (tolerance 1e-9), plus a common direction.
MetricResult k_segment_to_boundary(const DomainOracle& domain, std::span<const double> z0,
                                   std::span<const double> u, std::span<const double> v);

// Inversion in the sphere S(a, r): h(x) = a + r^2 (x - a) / |x - a|^2.
Point inversion_map(std::span<const double> a, double r, std::span<const double> x);

enum class ModulusKind {
    euclid_from_k,      // |x - y| <= 2 r (1 - exp(-k/2))
    euclid_from_j,      // |x - y| <= 2 r tanh(j/2)
    chordal_from_euclid // q <= t / (1 + (t/2)^2), t in [0, 2)
};

// Sharp modulus bounds relating the metrics; r scales the Euclidean variants
// (chordal_from_euclid is scale-free and ignores r). Throws OutOfRange.
double modulus_bound(ModulusKind kind, double t, double r);

} // namespace metriclab

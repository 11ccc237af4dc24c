#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "metriclab/closed_form.hpp"
#include "metriclab/domain.hpp"
#include "metriclab/errors.hpp"
#include "metriclab/rng.hpp"

using namespace metriclab;

namespace {

// Reference values computed once with 50-digit arithmetic and frozen here.
constexpr double kLog2 = 0.69314718055994530942;
constexpr double kLog3 = 1.0986122886681096914;
constexpr double kTwoLog3 = 2.1972245773362193828;
constexpr double kTwoLogTenSevenths = 0.71334988787746475783;
constexpr double kLog5 = 1.6094379124341003746;
constexpr double kAcosh15 = 0.962423650119206895;

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

Domain unit_disk() {
    DomainSpec s;
    s.kind = "ball";
    s.center = {0.0, 0.0};
    s.radius = 1.0;
    return make_domain(s);
}

Domain unit_square() {
    DomainSpec s;
    s.kind = "rectangle";
    s.lo = {0.0, 0.0};
    s.hi = {1.0, 1.0};
    return make_domain(s);
}

Point disk_point(Rng& rng) {
    for (;;) {
        Point p{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        if (norm2(p) < 1.0) return p;
    }
}

} // namespace

TEST_CASE("j on the disk: frozen values") {
    auto d = unit_disk();
    CHECK(near(j_metric(*d, Point{0.0, 0.0}, Point{0.5, 0.0}).value, kLog2, 4e-16));
    CHECK(near(j_metric(*d, Point{-0.5, 0.0}, Point{0.5, 0.0}).value, kLog3, 4e-16));
    CHECK(j_metric(*d, Point{0.3, 0.2}, Point{0.3, 0.2}).value == 0.0);

    const auto r = j_metric(*d, Point{0.0, 0.0}, Point{0.5, 0.0});
    CHECK(r.method == Method::closed_form);
    CHECK(r.converged);
    CHECK(r.error_bound <= 1e-13);
}

TEST_CASE("j is a metric (sampled axioms) and strictly subadditive through 0") {
    auto d = unit_disk();
    Rng rng(101);
    for (int i = 0; i < 5000; ++i) {
        const Point x = disk_point(rng), y = disk_point(rng), z = disk_point(rng);
        const double jxy = j_metric(*d, x, y).value;
        const double jyx = j_metric(*d, y, x).value;
        CHECK(jxy == jyx);
        CHECK(jxy >= 0.0);
        const double jxz = j_metric(*d, x, z).value;
        const double jzy = j_metric(*d, z, y).value;
        CHECK(jxy <= jxz + jzy + 1e-12);
    }
    // Going through the center is strictly cheaper than one j step: j is not
    // geodesic, which is why k dominates it.
    const Point a{-0.5, 0.0}, b{0.5, 0.0}, o{0.0, 0.0};
    CHECK(j_metric(*d, a, b).value <
          j_metric(*d, a, o).value + j_metric(*d, o, b).value - 0.1);
}

TEST_CASE("j rejects points outside the domain") {
    auto d = unit_disk();
    CHECK_THROWS_AS(j_metric(*d, Point{2.0, 0.0}, Point{0.0, 0.0}), PointOutsideDomain);
    CHECK_THROWS_AS(j_metric(*d, Point{0.0, 0.0}, Point{1.0, 0.0}), PointOutsideDomain);
}

TEST_CASE("rho on the ball: radial closed forms") {
    // rho(0, r e1) = log((1+r)/(1-r)).
    for (double r : {0.1, 0.5, 0.9, 0.99}) {
        const double got = rho_ball(Point{r, 0.0}, Point{0.0, 0.0}).value;
        CHECK(near(got, std::log((1.0 + r) / (1.0 - r)), 1e-13));
    }
    CHECK(near(rho_ball(Point{0.5, 0.0}, Point{0.0, 0.0}).value, kLog3, 1e-15));
    // Antipodal pair: additive through the origin.
    CHECK(near(rho_ball(Point{-0.5, 0.0}, Point{0.5, 0.0}).value, kTwoLog3, 4e-15));
    const double one_sided = rho_ball(Point{0.0, 0.0}, Point{0.0, 0.62}).value;
    const double both = rho_ball(Point{0.0, -0.62}, Point{0.0, 0.62}).value;
    CHECK(near(both, 2.0 * one_sided, 1e-13));
}

TEST_CASE("rho identities: tanh half/quarter angle forms") {
    Rng rng(202);
    for (int i = 0; i < 20000; ++i) {
        const Point x = disk_point(rng), y = disk_point(rng);
        const double rho = rho_ball(x, y).value;
        const double d = dist(x, y);
        const double t = std::sqrt((1.0 - norm2(x)) * (1.0 - norm2(y)));
        const double th = std::tanh(0.5 * rho);
        CHECK(near(th * th, d * d / (d * d + t * t), 1e-12));
        CHECK(near(2.0 * std::tanh(0.25 * rho),
                   2.0 * d / (std::sqrt(d * d + t * t) + t), 1e-12));
    }
}

TEST_CASE("j <= rho <= 2 j on the disk (sampled)") {
    auto dom = unit_disk();
    Rng rng(303);
    for (int i = 0; i < 20000; ++i) {
        const Point x = disk_point(rng), y = disk_point(rng);
        const double j = j_metric(*dom, x, y).value;
        const double rho = rho_ball(x, y).value;
        CHECK(j <= rho + 1e-12);
        CHECK(rho <= 2.0 * j + 1e-12);
    }
}

TEST_CASE("rho rejects outside points and mismatched dimensions") {
    CHECK_THROWS_AS(rho_ball(Point{1.0, 0.0}, Point{0.0, 0.0}), PointOutsideDomain);
    CHECK_THROWS_AS(rho_ball(Point{0.0, 0.0}, Point{0.0, 0.0, 0.0}), DimensionMismatch);
}

TEST_CASE("half-space metric: frozen and radial values") {
    // cosh(rho) = 1 + |x-y|^2/(2 x_n y_n); for d = 1, x_n = y_n = 1 this is 3/2.
    CHECK(near(k_halfspace(Point{0.0, 1.0}, Point{1.0, 1.0}).value, kAcosh15, 4e-16));
    // Vertical pairs: rho = |log(a/b)|.
    CHECK(near(k_halfspace(Point{0.0, 2.0}, Point{0.0, 0.5}).value, std::log(4.0), 1e-14));
    CHECK(near(k_halfspace(Point{3.0, 7.0}, Point{3.0, 7.0}).value, 0.0, 0.0));
    CHECK_THROWS_AS(k_halfspace(Point{0.0, 0.0}, Point{0.0, 1.0}), PointOutsideDomain);
    CHECK_THROWS_AS(k_halfspace(Point{0.0, -1.0}, Point{0.0, 1.0}), PointOutsideDomain);
}

TEST_CASE("chordal metric: values, symmetry, bound by 1, triangle") {
    CHECK(chordal(Point{1.0, 0.0}, Point{-1.0, 0.0}).value == 1.0);
    CHECK(near(chordal(Point{1.0, 0.0}, Point{0.0, 0.0}).value, 1.0 / std::sqrt(2.0), 1e-15));
    CHECK(chordal(Point{0.3, -0.4}, Point{0.3, -0.4}).value == 0.0);
    CHECK(chordal_to_infinity(Point{0.0, 0.0}) == 1.0);
    CHECK(near(chordal_to_infinity(Point{3.0, 4.0}), 1.0 / std::sqrt(26.0), 1e-15));

    Rng rng(404);
    for (int i = 0; i < 20000; ++i) {
        Point x{rng.uniform(-20.0, 20.0), rng.uniform(-20.0, 20.0)};
        Point y{rng.uniform(-20.0, 20.0), rng.uniform(-20.0, 20.0)};
        Point z{rng.uniform(-20.0, 20.0), rng.uniform(-20.0, 20.0)};
        const double qxy = chordal(x, y).value;
        CHECK(qxy <= 1.0 + 1e-15);
        CHECK(qxy == chordal(y, x).value);
        CHECK(qxy <= chordal(x, z).value + chordal(z, y).value + 1e-12);
        // q(x, y) -> q(x, infinity) as y runs off to infinity along a ray.
    }
    const Point far{1e9, 0.0};
    CHECK(near(chordal(Point{3.0, 4.0}, far).value, chordal_to_infinity(Point{3.0, 4.0}), 1e-8));
}

TEST_CASE("radial quasihyperbolic distance in the ball") {
    // From the center: k(0, x) = -log(1 - |x|).
    CHECK(near(k_radial_ball(Point{0.0, 0.0}, Point{0.5, 0.0}).value, kLog2, 4e-16));
    CHECK(near(k_radial_ball(Point{0.0, 0.0}, Point{0.0, -0.9}).value, -std::log(0.1), 1e-14));
    // Through the origin: sum of the two center distances.
    CHECK(near(k_radial_ball(Point{-0.3, 0.0}, Point{0.3, 0.0}).value, kTwoLogTenSevenths, 4e-16));
    // Same ray: difference of the radial potentials.
    CHECK(near(k_radial_ball(Point{0.0, 0.2}, Point{0.0, 0.8}).value, std::log(4.0), 1e-15));
    CHECK(k_radial_ball(Point{0.4, 0.3}, Point{0.4, 0.3}).value == 0.0);
    // Slightly off axis within the documented 1e-9 relative tolerance.
    CHECK(near(k_radial_ball(Point{0.3, 0.0}, Point{0.6, 1e-12}).value,
               std::log(0.7 / 0.4), 1e-9));

    CHECK_THROWS_AS(k_radial_ball(Point{0.3, 0.0}, Point{0.0, 0.3}), NotRadialConfiguration);
    CHECK_THROWS_AS(k_radial_ball(Point{0.3, 0.1}, Point{0.6, 0.1}), NotRadialConfiguration);
    CHECK_THROWS_AS(k_radial_ball(Point{1.0, 0.0}, Point{0.5, 0.0}), PointOutsideDomain);
}

TEST_CASE("distance along a nearest-boundary segment") {
    auto sq = unit_square();
    // From the square's center straight up: delta drops from 0.5 to 0.1.
    const auto r =
        k_segment_to_boundary(*sq, Point{0.5, 0.5}, Point{0.5, 0.5}, Point{0.5, 0.9});
    CHECK(near(r.value, kLog5, 4e-16));

    // The same configuration in the disk agrees with the radial formula.
    auto disk = unit_disk();
    const double seg =
        k_segment_to_boundary(*disk, Point{0.0, 0.0}, Point{0.0, 0.2}, Point{0.0, 0.9}).value;
    const double rad = k_radial_ball(Point{0.0, 0.2}, Point{0.0, 0.9}).value;
    CHECK(near(seg, rad, 1e-14));

    // Points off the nearest-boundary segment are rejected.
    CHECK_THROWS_AS(
        k_segment_to_boundary(*sq, Point{0.5, 0.5}, Point{0.5, 0.6}, Point{0.6, 0.9}),
        NotOnNearestBoundarySegment);
    // Two different nearest-boundary directions are rejected.
    CHECK_THROWS_AS(
        k_segment_to_boundary(*sq, Point{0.5, 0.5}, Point{0.5, 0.7}, Point{0.5, 0.3}),
        NotOnNearestBoundarySegment);
    CHECK_THROWS_AS(
        k_segment_to_boundary(*sq, Point{1.5, 0.5}, Point{0.5, 0.5}, Point{0.5, 0.6}),
        PointOutsideDomain);
}

TEST_CASE("inversion map: involution, fixed sphere, distance identity") {
    const Point a{0.0, 0.0};
    const Point h = inversion_map(a, 1.0, Point{2.0, 0.0});
    CHECK(near(h[0], 0.5, 1e-15));
    CHECK(h[1] == 0.0);

    Rng rng(505);
    for (int i = 0; i < 10000; ++i) {
        Point c{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        const double r = rng.uniform(0.5, 2.0);
        Point x{rng.uniform(-4.0, 4.0), rng.uniform(-4.0, 4.0)};
        Point y{rng.uniform(-4.0, 4.0), rng.uniform(-4.0, 4.0)};
        if (dist(x, c) < 1e-3 || dist(y, c) < 1e-3) continue;

        // Involution.
        const Point back = inversion_map(c, r, inversion_map(c, r, x));
        CHECK(near(dist(back, x), 0.0, 1e-10));

        // |h(x) - h(y)| = r^2 |x - y| / (|x - c| |y - c|).
        const double lhs = dist(inversion_map(c, r, x), inversion_map(c, r, y));
        const double rhs = r * r * dist(x, y) / (dist(x, c) * dist(y, c));
        CHECK(near(lhs, rhs, 1e-9 * (1.0 + rhs)));
    }

    // Points on the inversion sphere stay put.
    const Point fixed = inversion_map(Point{1.0, 1.0}, 2.0, Point{3.0, 1.0});
    CHECK(near(fixed[0], 3.0, 1e-15));
    CHECK(near(fixed[1], 1.0, 1e-15));

    CHECK_THROWS_AS(inversion_map(a, 1.0, Point{0.0, 0.0}), CenterSingularity);
    CHECK_THROWS_AS(inversion_map(a, 0.0, Point{1.0, 0.0}), OutOfRange);
    CHECK_THROWS_AS(inversion_map(a, 1.0, Point{1.0, 0.0, 0.0}), DimensionMismatch);
}

TEST_CASE("modulus bounds: values and argument validation") {
    // 2 r (1 - exp(-k/2)) at k = 2 log(10/7) is 2 r (1 - 7/10).
    CHECK(near(modulus_bound(ModulusKind::euclid_from_k, kTwoLogTenSevenths, 1.0), 0.6, 1e-15));
    // 2 r tanh(j/2) at j = log 9 is 2 r * 0.8.
    CHECK(near(modulus_bound(ModulusKind::euclid_from_j, std::log(9.0), 1.0), 1.6, 1e-15));
    CHECK(near(modulus_bound(ModulusKind::chordal_from_euclid, 1.0, 0.0), 0.8, 1e-15));
    CHECK(modulus_bound(ModulusKind::euclid_from_k, 0.0, 3.0) == 0.0);

    CHECK_THROWS_AS(modulus_bound(ModulusKind::euclid_from_k, -1.0, 1.0), OutOfRange);
    CHECK_THROWS_AS(modulus_bound(ModulusKind::euclid_from_k, 1.0, 0.0), OutOfRange);
    CHECK_THROWS_AS(modulus_bound(ModulusKind::euclid_from_j, 1.0, -2.0), OutOfRange);
    CHECK_THROWS_AS(modulus_bound(ModulusKind::chordal_from_euclid, 2.0, 1.0), OutOfRange);
    CHECK(modulus_bound(ModulusKind::chordal_from_euclid, 1.999, 1.0) > 0.0);
}

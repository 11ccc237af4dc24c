#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <future>
#include <vector>

#include "metriclab/closed_form.hpp"
#include "metriclab/domain.hpp"
#include "metriclab/errors.hpp"
#include "metriclab/qh_solver.hpp"
#include "metriclab/rng.hpp"

using namespace metriclab;

namespace {

constexpr double kLog2 = 0.69314718055994530942;
constexpr double kLog5 = 1.6094379124341003746;
constexpr double kAcosh15 = 0.962423650119206895;

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

Domain disk(double r = 1.0, Point c = {0.0, 0.0}) {
    DomainSpec s;
    s.kind = "ball";
    s.center = std::move(c);
    s.radius = r;
    return make_domain(s);
}

Domain square01() {
    DomainSpec s;
    s.kind = "rectangle";
    s.lo = {0.0, 0.0};
    s.hi = {1.0, 1.0};
    return make_domain(s);
}

Domain half_plane() {
    DomainSpec s;
    s.kind = "half_space";
    s.dim = 2;
    return make_domain(s);
}

// Composite-midpoint reference for the segment integral: independent of the
// adaptive quadrature in the library (same integrand, different rule).
double midpoint_segment(const DomainOracle& dom, const Point& a, const Point& b, int n) {
    const double len = dist(a, b);
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        const Point m = lerp(a, b, (i + 0.5) / n);
        s += 1.0 / dom.delta(m);
    }
    return s * len / n;
}

Point disk_point(Rng& rng, double rmax = 0.95) {
    for (;;) {
        Point p{rng.uniform(-rmax, rmax), rng.uniform(-rmax, rmax)};
        if (norm(p) < rmax) return p;
    }
}

} // namespace

TEST_CASE("segment quadrature matches closed forms and a midpoint reference") {
    auto sq = square01();
    CHECK(near(segment_k_length(*sq, Point{0.5, 0.5}, Point{0.5, 0.9}), kLog5, 1e-8));

    auto d = disk();
    CHECK(near(segment_k_length(*d, Point{0.0, 0.0}, Point{0.5, 0.0}), kLog2, 1e-8));

    // A non-radial chord has no closed form; check against a 10^6-interval
    // composite midpoint rule.
    const Point a{-0.3, 0.1}, b{0.4, 0.2};
    const double ref = midpoint_segment(*d, a, b, 1'000'000);
    CHECK(near(segment_k_length(*d, a, b), ref, 1e-7 * (1.0 + ref)));

    // Degenerate segment.
    CHECK(segment_k_length(*d, a, a) == 0.0);
}

TEST_CASE("segment quadrature refuses segments that leave the domain") {
    // Chord passing exactly through a removed point.
    DomainSpec s;
    s.kind = "remove_points";
    {
        DomainSpec base;
        base.kind = "ball";
        base.center = {0.0, 0.0};
        base.radius = 1.0;
        s.base = std::make_shared<DomainSpec>(base);
    }
    s.removed_points = {{0.0, 0.0}};
    auto punct = make_domain(s);
    CHECK_THROWS_AS(segment_k_length(*punct, Point{-0.5, 0.0}, Point{0.5, 0.0}),
                    SegmentExitsDomain);

    // Chord cutting across the removed half-strip.
    DomainSpec hs;
    hs.kind = "half_strip";
    hs.complement = true;
    auto comp = make_domain(hs);
    CHECK_THROWS_AS(segment_k_length(*comp, Point{-1.0, 0.0}, Point{5.0, 2.0}),
                    SegmentExitsDomain);

    // Endpoint outside.
    auto d = disk();
    CHECK_THROWS_AS(segment_k_length(*d, Point{0.0, 0.0}, Point{2.0, 0.0}),
                    PointOutsideDomain);
}

TEST_CASE("k_distance routes radial, half-space and boundary-segment configurations "
          "to closed forms") {
    auto d = disk();
    Rng rng(42);
    for (int i = 0; i < 60; ++i) {
        const double r = rng.uniform(0.05, 0.9);
        const double s = rng.uniform(0.05, 0.9);
        const double ang = rng.uniform(0.0, 6.283185307179586);
        const Point dir{std::cos(ang), std::sin(ang)};

        // Through the origin.
        const Point x{r * dir[0], r * dir[1]}, y{-s * dir[0], -s * dir[1]};
        const auto through = k_distance(*d, x, y, 1e-3);
        CHECK(through.method == Method::closed_form);
        CHECK(near(through.value, k_radial_ball(x, y).value, 1e-14));

        // Same ray.
        const Point z{s * dir[0], s * dir[1]};
        const auto ray = k_distance(*d, x, z, 1e-3);
        CHECK(ray.method == Method::closed_form);
        CHECK(near(ray.value, std::abs(std::log((1.0 - r) / (1.0 - s))), 1e-12));
    }

    // Scaled/translated ball reduces to the unit-ball radial form.
    auto big = disk(2.0, {1.0, -1.0});
    const auto scaled = k_distance(*big, Point{1.0, -1.0}, Point{2.0, -1.0}, 1e-3);
    CHECK(scaled.method == Method::closed_form);
    CHECK(near(scaled.value, kLog2, 1e-14));

    auto hp = half_plane();
    for (int i = 0; i < 20; ++i) {
        const Point x{rng.uniform(-3.0, 3.0), rng.uniform(0.1, 3.0)};
        const Point y{rng.uniform(-3.0, 3.0), rng.uniform(0.1, 3.0)};
        const auto r = k_distance(*hp, x, y, 1e-3);
        CHECK(r.method == Method::closed_form);
        CHECK(near(r.value, k_halfspace(x, y).value, 1e-14));
    }

    // Nearest-boundary segment in the square.
    auto sq = square01();
    const auto seg = k_distance(*sq, Point{0.5, 0.5}, Point{0.5, 0.9}, 1e-3);
    CHECK(seg.method == Method::closed_form);
    CHECK(near(seg.value, kLog5, 1e-12));
}

TEST_CASE("numeric solver approaches known closed-form distances") {
    auto d = disk();

    const auto center = k_distance_numeric(*d, Point{0.0, 0.0}, Point{0.5, 0.0}, 1e-3);
    CHECK(center.method == Method::numeric);
    CHECK(center.converged);
    CHECK(center.value >= kLog2 - 1e-12); // upper-bound solver
    CHECK(near(center.value, kLog2, 1e-3));

    const auto anti = k_distance_numeric(*d, Point{-0.3, 0.0}, Point{0.3, 0.0}, 1e-3);
    CHECK(near(anti.value, 2.0 * std::log(10.0 / 7.0), 1e-3));

    // Vertical pair in the square: the boundary-segment value log 5.
    auto sq = square01();
    const auto seg = k_distance_numeric(*sq, Point{0.5, 0.5}, Point{0.5, 0.9}, 1e-3);
    CHECK(near(seg.value, kLog5, 1e-3));

    // Half-plane pair: unbounded domain goes through region doubling.
    auto hp = half_plane();
    const auto hs = k_distance_numeric(*hp, Point{0.0, 1.0}, Point{1.0, 1.0}, 1e-3);
    CHECK(near(hs.value, kAcosh15, 1e-3));
    CHECK(hs.value >= kAcosh15 - 1e-12);
}

TEST_CASE("sandwich: j <= k_hat <= straight-segment length in convex domains") {
    auto d = disk();
    Rng rng(7);
    for (int i = 0; i < 12; ++i) {
        const Point x = disk_point(rng), y = disk_point(rng);
        const double k = k_distance_numeric(*d, x, y, 1e-2).value;
        const double j = j_metric(*d, x, y).value;
        const double seg = segment_k_length(*d, x, y);
        CHECK(j <= k + 1e-12);
        CHECK(k <= seg + 1e-12);
    }
}

TEST_CASE("tightening the tolerance cannot worsen the estimate beyond its own tolerance") {
    // Both runs return upper estimates; the smoothing schedule depends on the
    // tolerance, so exact monotonicity is not guaranteed, but the tight run
    // may exceed the loose one by at most its own error allowance.
    auto d = disk();
    KSolver solver(d, *d->bounding_box());
    const Point x{-0.31, 0.07}, y{0.42, 0.11};
    const double loose = solver.k_upper(x, y, 1e-1).value;
    const double tight = solver.k_upper(x, y, 1e-3).value;
    CHECK(tight <= loose + 1e-3);
    // Both must still dominate j.
    const double j = j_metric(*d, x, y).value;
    CHECK(tight >= j - 1e-12);
}

TEST_CASE("distance is additive along a geodesic") {
    // A pair off the diameter, so the geodesic is genuinely curved and the
    // polyline needs interior vertices.
    auto d = disk();
    const auto path = geodesic_numeric(*d, Point{-0.5, 0.6}, Point{0.5, 0.6}, 1e-3);
    REQUIRE(path.vertices.size() >= 3);
    CHECK(path.vertices.front() == Point{-0.5, 0.6});
    CHECK(path.vertices.back() == Point{0.5, 0.6});
    const double defect = additivity_check(*d, path, path.vertices.size() / 2);
    CHECK(defect <= 3e-3);
}

TEST_CASE("geodesic vertices hug the known geodesic for an antipodal pair") {
    auto d = disk();
    const Point x{-0.3, 0.0}, y{0.3, 0.0};
    const auto path = geodesic_numeric(*d, x, y, 1e-3);
    // The true geodesic is the diameter segment itself, so the solver may
    // return it directly as a two-vertex path; either way every vertex must
    // stay within twice the final spacing of the segment.
    const double slack = 2.0 * path.final_spacing + 1e-12;
    for (const auto& v : path.vertices) CHECK(dist_to_segment(v, x, y) <= slack);
    CHECK(near(path.k_length, 2.0 * std::log(10.0 / 7.0), 1e-3));
    CHECK(path.final_spacing >= 0.0);
}

TEST_CASE("geodesic of a coincident pair is a single vertex") {
    auto d = disk();
    const auto p = geodesic(*d, Point{0.2, 0.1}, Point{0.2, 0.1}, 1e-3);
    CHECK(p.vertices.size() == 1);
    CHECK(p.k_length == 0.0);
    const auto r = k_distance(*d, Point{0.2, 0.1}, Point{0.2, 0.1}, 1e-3);
    CHECK(r.value == 0.0);
}

TEST_CASE("additivity_check validates the split index") {
    auto d = disk();
    const auto path = geodesic_numeric(*d, Point{-0.3, 0.0}, Point{0.3, 0.0}, 1e-2);
    CHECK_THROWS_AS(additivity_check(*d, path, 0), IndexOutOfRange);
    CHECK_THROWS_AS(additivity_check(*d, path, path.vertices.size() - 1), IndexOutOfRange);
    CHECK_THROWS_AS(additivity_check(*d, path, path.vertices.size()), IndexOutOfRange);
}

TEST_CASE("enlarging the domain can only shrink the distance") {
    auto small = disk(1.0);
    auto big = disk(1.5);
    Rng rng(11);
    for (int i = 0; i < 8; ++i) {
        const Point x = disk_point(rng, 0.9), y = disk_point(rng, 0.9);
        const double ks = k_distance_numeric(*small, x, y, 1e-2).value;
        const double kb = k_distance_numeric(*big, x, y, 1e-2).value;
        CHECK(kb <= ks + 2e-2);
    }

    // Unit square inside the disk around its center.
    auto sq = square01();
    DomainSpec ds;
    ds.kind = "ball";
    ds.center = {0.5, 0.5};
    ds.radius = 0.8;
    auto cover = make_domain(ds);
    for (int i = 0; i < 6; ++i) {
        Point x{rng.uniform(0.15, 0.85), rng.uniform(0.15, 0.85)};
        Point y{rng.uniform(0.15, 0.85), rng.uniform(0.15, 0.85)};
        const double ks = k_distance_numeric(*sq, x, y, 1e-2).value;
        const double kc = k_distance_numeric(*cover, x, y, 1e-2).value;
        CHECK(kc <= ks + 2e-2);
    }
}

TEST_CASE("solver rejects invalid construction") {
    auto d = disk();
    const Box region = *d->bounding_box();
    CHECK_THROWS_AS(KSolver(nullptr, region), InvalidSpec);

    const Box bad{{-1.0, -1.0, -1.0}, {1.0, 1.0, 1.0}};
    CHECK_THROWS_AS(KSolver(d, bad), DimensionMismatch);

    SolverOptions opt;
    opt.max_levels = 0;
    CHECK_THROWS_AS(KSolver(d, region, opt), OutOfRange);

    SolverOptions graded;
    graded.dedicated = true;
    graded.grade_x = {0.0};
    graded.grade_y = {0.0, 0.0};
    CHECK_THROWS_AS(KSolver(d, region, graded), DimensionMismatch);
}

TEST_CASE("concurrent queries on one solver give the sequential answers") {
    auto d = disk();
    KSolver solver(d, *d->bounding_box());
    std::vector<std::pair<Point, Point>> pairs;
    Rng rng(13);
    for (int i = 0; i < 8; ++i) pairs.emplace_back(disk_point(rng), disk_point(rng));

    std::vector<double> sequential;
    for (const auto& [x, y] : pairs) sequential.push_back(solver.k_upper(x, y, 1e-2).value);

    std::vector<std::future<double>> futs;
    for (const auto& [x, y] : pairs)
        futs.push_back(std::async(std::launch::async, [&solver, x = x, y = y] {
            return solver.k_upper(x, y, 1e-2).value;
        }));
    for (size_t i = 0; i < pairs.size(); ++i) CHECK(futs[i].get() == sequential[i]);
}

TEST_CASE("error bound and convergence reporting") {
    auto d = disk();
    const auto r = k_distance_numeric(*d, Point{-0.2, 0.3}, Point{0.4, -0.1}, 1e-3);
    CHECK(r.converged);
    CHECK(r.error_bound >= 0.0);
    const double j = j_metric(*d, Point{-0.2, 0.3}, Point{0.4, -0.1}).value;
    CHECK(r.error_bound >= r.value - j - 1e-12); // never understates the j gap
}

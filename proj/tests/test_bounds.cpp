#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "metriclab/bounds.hpp"
#include "metriclab/errors.hpp"

using namespace metriclab;

namespace {

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

// 50-digit reference evaluations, frozen.
constexpr double kAThetaGrid[9] = {
    54.766031789909874864, 29.052769432462930216, 20.478792081484853482,
    16.19000583425993,     13.615527173070851605, 11.898355160829684061,
    10.671178068339487027, 9.7503229024285980447, 9.033737300495290485};

struct AAlphaRef {
    double alpha, theta, value;
};
constexpr AAlphaRef kAAlphaGrid[9] = {
    {0.1, 0.1, 67.276482123918549415}, {0.2, 0.3, 32.52277406310200836},
    {0.3, 0.5, 29.339942795778985013}, {0.4, 0.7, 32.865768502413543384},
    {0.5, 0.9, 42.350792443062213415}, {0.6, 0.2, 203.46121609086150993},
    {0.7, 0.4, 216.34835608623072679}, {0.8, 0.6, 384.13676701022657798},
    {0.9, 0.8, 1351.210297403284448}};

} // namespace

TEST_CASE("a_theta matches the 50-digit references to 1e-12") {
    for (int i = 0; i < 9; ++i) {
        const double theta = 0.1 * (i + 1);
        CHECK(near(a_theta(theta), kAThetaGrid[i], 1e-12));
    }
    CHECK(near(a_theta(1.0), 8.4601814892660073792, 1e-12));
    CHECK(near(a_theta(0.25), 23.908775996278222917, 1e-12));
}

TEST_CASE("a_alpha_theta matches the 50-digit references to 1e-12") {
    for (const auto& r : kAAlphaGrid)
        CHECK(near(a_alpha_theta(r.alpha, r.theta), r.value, 1e-12));
    CHECK(near(a_alpha_theta(0.2, 0.25), 37.84129717179365756, 1e-12));
    CHECK(near(a_alpha_theta(1e-8, 0.5), 13.615527449890544565, 1e-12));
}

TEST_CASE("a_alpha_theta reduces to a_theta as alpha -> 0") {
    // alpha = 0 collapses to the one-parameter constant up to 1 ulp.
    for (int i = 1; i <= 100; ++i) {
        const double theta = i / 100.0;
        const double one = a_theta(theta);
        CHECK(near(a_alpha_theta(0.0, theta), one, 4e-16 * one));
    }
    // alpha = 1e-8 stays within 1e-4 (and above, by monotonicity in alpha).
    for (int i = 0; i < 9; ++i) {
        const double theta = 0.1 * (i + 1);
        const double diff = a_alpha_theta(1e-8, theta) - a_theta(theta);
        CHECK(diff >= 0.0);
        CHECK(diff < 1e-4);
    }
}

TEST_CASE("a_theta decreases over the grid; arguments are validated") {
    for (int i = 0; i + 1 < 9; ++i)
        CHECK(a_theta(0.1 * (i + 1)) > a_theta(0.1 * (i + 2)));

    CHECK_THROWS_AS(a_theta(0.0), OutOfRange);
    CHECK_THROWS_AS(a_theta(-0.5), OutOfRange);
    CHECK_THROWS_AS(a_theta(1.0001), OutOfRange);
    CHECK_THROWS_AS(a_theta(std::nan("")), OutOfRange);

    CHECK_THROWS_AS(a_alpha_theta(-0.1, 0.5), OutOfRange);
    CHECK_THROWS_AS(a_alpha_theta(1.0, 0.5), OutOfRange);
    CHECK_THROWS_AS(a_alpha_theta(0.5, 0.0), OutOfRange);
    CHECK_THROWS_AS(a_alpha_theta(0.5, 1.1), OutOfRange);
}

TEST_CASE("jung_radius: values, monotonicity, limit") {
    CHECK(jung_radius(1, 2.0) == 1.0);
    CHECK(near(jung_radius(2, 2.0), 2.0 / std::sqrt(3.0), 1e-15));
    CHECK(near(jung_radius(2, 2.0), 1.1547005383792515290, 1e-15));
    CHECK(near(jung_radius(3, 1.0), 0.5 * 1.2247448713915890491, 1e-15));
    CHECK(jung_radius(5, 0.0) == 0.0);

    for (int n = 1; n < 50; ++n) CHECK(jung_radius(n, 1.0) < jung_radius(n + 1, 1.0));
    CHECK(near(jung_radius(1000000, 1.0), 1.0 / std::sqrt(2.0), 1e-6));
    // Always below the circumscribed bound and above the half-diameter lower limit.
    for (int n = 1; n < 20; ++n) {
        CHECK(jung_radius(n, 1.0) < 1.0 / std::sqrt(2.0));
        CHECK(jung_radius(n, 1.0) >= 0.5);
    }

    CHECK_THROWS_AS(jung_radius(0, 1.0), OutOfRange);
    CHECK_THROWS_AS(jung_radius(2, -1.0), OutOfRange);
    CHECK_THROWS_AS(jung_radius(2, std::numeric_limits<double>::infinity()), OutOfRange);
}

TEST_CASE("the catalog is fixed: order, names, and backend split") {
    const std::vector<std::string> expected = {
        "k_ge_j",
        "near_point_growth_ball",
        "near_boundary_ray_growth",
        "punctured_near_growth",
        "ball_radial_k_lower",
        "two_log_vs_t_scalar",
        "jung_ratio_k_lower",
        "j_chord_lower",
        "artanh_identity",
        "k_exp_modulus",
        "j_tanh_modulus",
        "jung_ratio_j_chain",
        "rho_j_sandwich",
        "rho_k_sandwich_radial",
        "rho_identity",
        "rho_chord_bound",
        "chordal_euclid_bound",
        "bernoulli_log",
        "inversion_distance_identity",
        "exterior_ball_arc_bound",
        "puncture_removal_factor",
        "ball_removal_factor",
        "convex_segment_modulus_square",
        "convex_segment_modulus_disk",
    };
    const auto& cat = bound_catalog();
    REQUIRE(cat.size() == expected.size());
    size_t closed_count = 0;
    for (size_t i = 0; i < cat.size(); ++i) {
        CHECK(cat[i].name == expected[i]);
        CHECK(!cat[i].statement.empty());
        CHECK(!cat[i].sampling.empty());
        CHECK(static_cast<bool>(cat[i].prepare));
        CHECK(static_cast<bool>(cat[i].run));
        if (!cat[i].needs_numeric) ++closed_count;
        if (cat[i].needs_numeric) CHECK(cat[i].numeric_sample_cap > 0);
    }
    CHECK(closed_count == 15);

    CHECK(find_bound("artanh_identity").name == "artanh_identity");
    CHECK_THROWS_AS(find_bound("no_such_bound"), OutOfRange);
}

TEST_CASE("every closed-form bound passes a seeded run with zero violations") {
    for (const auto& spec : bound_catalog()) {
        if (spec.needs_numeric) continue;
        INFO("bound: " << spec.name);
        const auto report = check_bound(spec, 2000, 1, Backend::closed_only, 1e-2);
        CHECK(report.passed());
        CHECK(report.violations.empty());
        CHECK(report.samples == 2000);
        CHECK(report.hits >= 1);
        CHECK(report.hits <= report.samples);
        CHECK(report.max_sharpness_defect <= 1e-12);
        CHECK(report.name == spec.name);
    }
}

TEST_CASE("closed-only backend rejects numeric-backed bounds") {
    const auto& spec = find_bound("k_ge_j");
    CHECK_THROWS_AS(check_bound(spec, 10, 1, Backend::closed_only, 1e-2), InvalidSpec);
}

TEST_CASE("check_bound validates the tolerance and reports zero-hit runs") {
    const auto& spec = find_bound("artanh_identity");
    CHECK_THROWS_AS(check_bound(spec, 10, 1, Backend::closed_only, 0.0), OutOfRange);
    CHECK_THROWS_AS(check_bound(spec, 10, 1, Backend::closed_only, -1.0), OutOfRange);

    BoundSpec never;
    never.name = "never_hits";
    never.statement = "no configuration meets the hypothesis";
    never.sampling = "none";
    never.prepare = [](int, double tol, Backend backend) {
        BoundContext ctx;
        ctx.tol = tol;
        ctx.backend = backend;
        return ctx;
    };
    never.run = [](Rng&, BoundContext&) { return std::optional<BoundOutcome>{}; };
    never.witnesses = [](BoundContext&) { return std::vector<BoundOutcome>{}; };
    CHECK_THROWS_AS(check_bound(never, 100, 1, Backend::closed_only, 1e-2), NoHypothesisHits);
}

TEST_CASE("violations are detected, sorted, and carry the defect") {
    // A deliberately false inequality: lhs = t, rhs = t/2 for t ~ U(0, 1).
    BoundSpec fake;
    fake.name = "always_fails";
    fake.statement = "t <= t/2 (false for every positive t)";
    fake.sampling = "t ~ U(0, 1)";
    fake.prepare = [](int, double tol, Backend backend) {
        BoundContext ctx;
        ctx.tol = tol;
        ctx.backend = backend;
        return ctx;
    };
    fake.run = [](Rng& rng, BoundContext&) -> std::optional<BoundOutcome> {
        const double t = rng.uniform(0.1, 1.0);
        BoundOutcome o;
        o.params = {t};
        o.lhs = t;
        o.rhs = 0.5 * t;
        o.slack = 0.0;
        return o;
    };
    const auto report = check_bound(fake, 50, 3, Backend::closed_only, 1e-2);
    CHECK(!report.passed());
    CHECK(report.violations.size() == 50);
    for (size_t i = 0; i < report.violations.size(); ++i) {
        CHECK(report.violations[i].sample == i);
        CHECK(report.violations[i].defect > 0.0);
        CHECK(near(report.violations[i].defect,
                   report.violations[i].lhs - report.violations[i].rhs, 1e-15));
    }
}

TEST_CASE("closed-form runs are deterministic across thread counts") {
    const auto& spec = find_bound("rho_identity");
    const auto a = check_bound(spec, 100000, 7, Backend::closed_only, 1e-2, 1);
    const auto b = check_bound(spec, 100000, 7, Backend::closed_only, 1e-2, 8);
    CHECK(a.samples == b.samples);
    CHECK(a.hits == b.hits);
    CHECK(a.violations.size() == b.violations.size());
    CHECK(a.min_margin == b.min_margin);
    CHECK(a.max_sharpness_defect == b.max_sharpness_defect);
}

TEST_CASE("numeric-backed bound: deterministic across thread counts and capped") {
    const auto& spec = find_bound("exterior_ball_arc_bound");
    REQUIRE(spec.needs_numeric);
    const auto a = check_bound(spec, 1000000, 5, Backend::with_numeric, 1e-2, 1);
    CHECK(a.samples == spec.numeric_sample_cap); // request clamped to the documented cap
    CHECK(a.passed());

    const auto b = check_bound(spec, 1000000, 5, Backend::with_numeric, 1e-2, 4);
    CHECK(a.hits == b.hits);
    CHECK(a.min_margin == b.min_margin);
    CHECK(a.violations.size() == b.violations.size());
}

TEST_CASE("sharpness witnesses sit on the equality cases (closed forms, 1e-12)") {
    for (const char* name :
         {"rho_chord_bound", "k_exp_modulus", "j_tanh_modulus", "chordal_euclid_bound",
          "ball_radial_k_lower", "j_chord_lower", "bernoulli_log"}) {
        const auto& spec = find_bound(name);
        INFO("bound: " << name);
        auto ctx = spec.prepare(1, 1e-2, Backend::closed_only);
        const auto ws = spec.witnesses(ctx);
        CHECK(!ws.empty());
        for (const auto& w : ws) CHECK(std::abs(w.lhs - w.rhs) <= 1e-12);
    }
}

TEST_CASE("phi_transfer: frozen puncture-chain values") {
    PhiTransferInputs in;
    in.theta = 0.5;
    in.phi = [](double t) { return 2.0 * std::log1p(t); };
    const Modulus phi4 = phi_transfer(PhiTransferKind::puncture, in);

    // Components at t = 1: (pi/log 3) log(1+3t) and a(1/4) * 2 log(1+3t).
    const double pi_term = 3.964248557502618595;
    const double a_term = 66.289202689838190732;
    CHECK(near(phi4(1.0), 132.57840537967638146, 1e-10));
    CHECK(near(phi4(1.0), 2.0 * std::max(pi_term, a_term), 1e-10));
    CHECK(phi4(0.0) == 0.0);
    // Strictly increasing on a few probes.
    CHECK(phi4(0.5) < phi4(1.0));
    CHECK(phi4(1.0) < phi4(2.0));
}

TEST_CASE("phi_transfer: scaling kinds act as advertised") {
    PhiTransferInputs lin;
    lin.phi = [](double t) { return t; };

    PhiTransferInputs bi = lin;
    bi.L = 2.0;
    const Modulus b = phi_transfer(PhiTransferKind::bilipschitz, bi);
    CHECK(near(b(3.0), 4.0 * (4.0 * 3.0), 1e-12)); // L^2 phi(L^2 t)

    PhiTransferInputs inv = lin;
    inv.m_inner = 1.0;
    inv.M_outer = 2.0;
    const Modulus h = phi_transfer(PhiTransferKind::inversion, inv);
    CHECK(near(h(3.0), 4.0 * (4.0 * 3.0), 1e-12)); // (M/m)^2 phi(M^2 t / m^2)

    PhiTransferInputs uni = lin;
    uni.theta = 0.5;
    uni.m_points = 1;
    uni.c = 2.0;
    const Modulus u = phi_transfer(PhiTransferKind::uniform_removal, uni);
    CHECK(near(u(1.0), 286.905311955338675, 1e-10)); // 6 a(1/4) c

    // multi_puncture with one point is exactly the one-point rule.
    PhiTransferInputs multi;
    multi.theta = 0.5;
    multi.m_points = 1;
    multi.phi = [](double t) { return 2.0 * std::log1p(t); };
    const Modulus m1 = phi_transfer(PhiTransferKind::multi_puncture, multi);
    const Modulus p1 = phi_transfer(PhiTransferKind::puncture, multi);
    for (double t : {0.1, 1.0, 7.5}) CHECK(near(m1(t), p1(t), 1e-12 * (1.0 + p1(t))));

    // Two points pick up the documented 2 a(theta/2) factor.
    multi.m_points = 2;
    const Modulus m2 = phi_transfer(PhiTransferKind::multi_puncture, multi);
    const double factor = 2.0 * a_theta(0.25);
    for (double t : {0.1, 1.0, 7.5}) CHECK(near(m2(t), factor * p1(t), 1e-9 * factor * p1(t)));

    PhiTransferInputs set;
    set.theta = 0.75;
    set.phi = [](double t) { return t; };
    set.phi2 = [](double t) { return 2.0 * t; };
    const Modulus s = phi_transfer(PhiTransferKind::set_removal, set);
    CHECK(near(s(1.0), 4.0 * a_alpha_theta(0.25, 0.25) * 60.0, 1e-9 * s(1.0)));
}

TEST_CASE("phi_transfer validates parameters and moduli") {
    PhiTransferInputs ok;
    ok.phi = [](double t) { return t; };

    PhiTransferInputs no_phi;
    CHECK_THROWS_AS(phi_transfer(PhiTransferKind::bilipschitz, no_phi), OutOfRange);

    PhiTransferInputs bad_zero = ok;
    bad_zero.phi = [](double t) { return t + 1.0; }; // phi(0) != 0
    CHECK_THROWS_AS(phi_transfer(PhiTransferKind::bilipschitz, bad_zero), OutOfRange);

    PhiTransferInputs flat = ok;
    flat.phi = [](double) { return 0.0; }; // not strictly increasing
    CHECK_THROWS_AS(phi_transfer(PhiTransferKind::bilipschitz, flat), OutOfRange);

    PhiTransferInputs nan_phi = ok;
    nan_phi.phi = [](double t) { return std::sqrt(t - 5.0); }; // NaN on the grid
    CHECK_THROWS_AS(phi_transfer(PhiTransferKind::bilipschitz, nan_phi), OutOfRange);

    PhiTransferInputs small_l = ok;
    small_l.L = 0.5;
    CHECK_THROWS_AS(phi_transfer(PhiTransferKind::bilipschitz, small_l), OutOfRange);

    PhiTransferInputs bad_ann = ok;
    bad_ann.m_inner = 2.0;
    bad_ann.M_outer = 1.0;
    CHECK_THROWS_AS(phi_transfer(PhiTransferKind::inversion, bad_ann), OutOfRange);

    PhiTransferInputs bad_theta = ok;
    bad_theta.theta = 1.0;
    CHECK_THROWS_AS(phi_transfer(PhiTransferKind::puncture, bad_theta), OutOfRange);
    bad_theta.theta = 0.0;
    CHECK_THROWS_AS(phi_transfer(PhiTransferKind::puncture, bad_theta), OutOfRange);

    PhiTransferInputs bad_m = ok;
    bad_m.m_points = 0;
    CHECK_THROWS_AS(phi_transfer(PhiTransferKind::multi_puncture, bad_m), OutOfRange);

    PhiTransferInputs bad_c = ok;
    bad_c.c = 0.5;
    CHECK_THROWS_AS(phi_transfer(PhiTransferKind::uniform_removal, bad_c), OutOfRange);

    PhiTransferInputs no_phi2 = ok;
    CHECK_THROWS_AS(phi_transfer(PhiTransferKind::set_removal, no_phi2), OutOfRange);
}

#include "metriclab/bounds.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <initializer_list>
#include <limits>
#include <mutex>
#include <thread>
#include <utility>

#include "metriclab/closed_form.hpp"
#include "metriclab/errors.hpp"

namespace metriclab {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kLog3 = 1.0986122886681096914;

} // namespace

double a_theta(double theta) {
    if (!(theta > 0.0) || !(theta <= 1.0))
        throw OutOfRange("a_theta: theta must be in (0, 1]");
    // log((2+2t)/(2+t)) = log1p(t/(2+t)), stable when the ratio is near 1.
    return 1.0 + 2.0 / theta + kPi / (2.0 * std::log1p(theta / (2.0 + theta)));
}

double a_alpha_theta(double alpha, double theta) {
    if (!(alpha >= 0.0) || !(alpha < 1.0))
        throw OutOfRange("a_alpha_theta: alpha must be in [0, 1)");
    if (!(theta > 0.0) || !(theta <= 1.0))
        throw OutOfRange("a_alpha_theta: theta must be in (0, 1]");
    const double num = 2.0 + theta + alpha * theta;
    const double one_minus = 1.0 - alpha; // exact for alpha in [0.5, 1), tiny error below
    // log((2+2t)/num) = log1p(t(1-a)/num), stable as alpha -> 1.
    const double lg = std::log1p(theta * one_minus / num);
    return num / (theta * one_minus * (1.0 + alpha)) +
           (1.0 + alpha) * kPi / (2.0 * one_minus * lg);
}

double jung_radius(int n, double diam) {
    if (n < 1) throw OutOfRange("jung_radius: dimension must be >= 1");
    if (!(diam >= 0.0) || !std::isfinite(diam))
        throw OutOfRange("jung_radius: diameter must be finite and >= 0");
    return std::sqrt(n / (2.0 * n + 2.0)) * diam;
}

namespace {

// ---- sampling helpers ------------------------------------------------------

Point unit_vector(Rng& rng, int dim) {
    for (;;) {
        Point p(static_cast<size_t>(dim));
        for (auto& c : p) c = rng.uniform(-1.0, 1.0);
        const double n2 = norm2(p);
        if (n2 > 1e-12 && n2 <= 1.0) {
            const double inv = 1.0 / std::sqrt(n2);
            for (auto& c : p) c *= inv;
            return p;
        }
    }
}

// Uniform in the open unit ball (strict inequality keeps every sample interior).
Point unit_ball_point(Rng& rng, int dim) {
    for (;;) {
        Point p(static_cast<size_t>(dim));
        for (auto& c : p) c = rng.uniform(-1.0, 1.0);
        if (norm2(p) < 1.0) return p;
    }
}

Point scaled(std::span<const double> u, double c) {
    Point p(u.begin(), u.end());
    for (auto& v : p) v *= c;
    return p;
}

Point offset_ball_point(Rng& rng, std::span<const double> center, double radius) {
    Point p = unit_ball_point(rng, static_cast<int>(center.size()));
    for (size_t i = 0; i < p.size(); ++i) p[i] = center[i] + radius * p[i];
    return p;
}

double closed_slack(std::initializer_list<double> vals) {
    double scale = 1.0;
    for (double v : vals) scale = std::max(scale, std::abs(v));
    return 1e-12 * scale;
}

BoundOutcome make_outcome(Point x, Point y, std::vector<double> params, double lhs, double rhs,
                          double slack) {
    BoundOutcome o;
    o.x = std::move(x);
    o.y = std::move(y);
    o.params = std::move(params);
    o.lhs = lhs;
    o.rhs = rhs;
    o.slack = slack;
    return o;
}

// Chained inequality l1 <= r1 and l2 <= r2 under one slack: report the link
// with the smaller margin so a violation always shows the failing pair.
BoundOutcome chain2(Point x, Point y, std::vector<double> params, double l1, double r1, double l2,
                    double r2, double slack) {
    if (r1 - l1 <= r2 - l2) return make_outcome(std::move(x), std::move(y), std::move(params), l1, r1, slack);
    return make_outcome(std::move(x), std::move(y), std::move(params), l2, r2, slack);
}

// ---- shared domain builders ------------------------------------------------

DomainSpec disk_spec() {
    DomainSpec s;
    s.kind = "ball";
    s.center = {0.0, 0.0};
    s.radius = 1.0;
    s.dim = 2;
    return s;
}

DomainSpec punctured_plane_spec() {
    DomainSpec s;
    s.kind = "punctured_space";
    s.center = {0.0, 0.0};
    s.dim = 2;
    return s;
}

DomainSpec punctured_disk_spec() {
    DomainSpec s;
    s.kind = "remove_points";
    s.base = std::make_shared<DomainSpec>(disk_spec());
    s.removed_points = {{0.0, 0.0}};
    return s;
}

DomainSpec disk_minus_ball_spec(double r) {
    DomainSpec s;
    s.kind = "remove_closed_ball";
    s.base = std::make_shared<DomainSpec>(disk_spec());
    s.center = {0.0, 0.0};
    s.radius = r;
    return s;
}

DomainSpec exterior_ball_spec() {
    DomainSpec s;
    s.kind = "complement_closed_ball";
    s.center = {0.0, 0.0};
    s.radius = 1.0;
    s.dim = 2;
    return s;
}

DomainSpec unit_square_spec() {
    DomainSpec s;
    s.kind = "rectangle";
    s.lo = {0.0, 0.0};
    s.hi = {1.0, 1.0};
    return s;
}

Box square_box(double lo, double hi) { return Box{{lo, lo}, {hi, hi}}; }

BoundContext solver_ctx(std::initializer_list<std::pair<DomainSpec, Box>> entries, int threads) {
    BoundContext ctx;
    for (const auto& [spec, region] : entries) {
        Domain d = make_domain(spec);
        SolverOptions opt;
        opt.threads = threads;
        ctx.solvers.push_back(std::make_shared<KSolver>(d, region, opt));
        ctx.domains.push_back(std::move(d));
    }
    return ctx;
}

BoundContext domain_only_ctx(const DomainSpec& spec) {
    BoundContext ctx;
    ctx.domains.push_back(make_domain(spec));
    return ctx;
}

double k_hat(BoundContext& ctx, size_t solver, std::span<const double> x,
             std::span<const double> y) {
    return ctx.solvers[solver]->k_upper(x, y, ctx.tol).value;
}

// Upper estimates carry the query tolerance plus the relative quadrature
// error of the underlying path integrals.
double numeric_slack(const BoundContext& ctx, double lhs) {
    return ctx.tol * (1.0 + std::abs(lhs));
}

// ---- the catalog -----------------------------------------------------------

std::vector<BoundSpec> build_catalog() {
    std::vector<BoundSpec> cat;

    {
        BoundSpec b;
        b.name = "k_ge_j";
        b.statement =
            "j(x,y) <= k(x,y) for all x, y in a domain G, where "
            "j(x,y) = log(1 + |x-y|/min(d(x),d(y))) and k is the quasihyperbolic distance; "
            "checked as j <= k_hat, which k_hat >= k implies.";
        b.sampling =
            "G = unit disk; x, y uniform in G; pairs with min(d(x),d(y)) < 2e-6 or x = y "
            "are hypothesis misses.";
        b.needs_numeric = true;
        b.numeric_sample_cap = 4000;
        b.prepare = [](int threads, double, Backend) {
            return solver_ctx({{disk_spec(), square_box(-1.0, 1.0)}}, threads);
        };
        b.run = [](Rng& rng, BoundContext& ctx) -> std::optional<BoundOutcome> {
            Point x = unit_ball_point(rng, 2), y = unit_ball_point(rng, 2);
            const auto& dom = *ctx.domains[0];
            if (dom.delta(x) < 2e-6 || dom.delta(y) < 2e-6 || dist(x, y) == 0.0)
                return std::nullopt;
            const double jv = j_metric(dom, x, y).value;
            const double kh = k_hat(ctx, 0, x, y);
            return make_outcome(std::move(x), std::move(y), {}, jv, kh,
                                2e-6 * (1.0 + std::abs(kh)));
        };
        cat.push_back(std::move(b));
    }

    {
        BoundSpec b;
        b.name = "near_point_growth_ball";
        b.statement =
            "k(x,y) <= (1+s) j(x,y) for x, y in the sub-ball B(0,s) of the unit ball, "
            "0 < s < 1; checked with s = 0.9 via the upper estimate k_hat.";
        b.sampling = "x, y uniform in B(0, 0.9) inside the unit disk.";
        b.needs_numeric = true;
        b.numeric_sample_cap = 10000;
        b.prepare = [](int threads, double, Backend) {
            return solver_ctx({{disk_spec(), square_box(-1.0, 1.0)}}, threads);
        };
        b.run = [](Rng& rng, BoundContext& ctx) -> std::optional<BoundOutcome> {
            const double s = 0.9;
            Point x = scaled(unit_ball_point(rng, 2), s);
            Point y = scaled(unit_ball_point(rng, 2), s);
            if (dist(x, y) == 0.0) return std::nullopt;
            const double jv = j_metric(*ctx.domains[0], x, y).value;
            const double kh = k_hat(ctx, 0, x, y);
            return make_outcome(std::move(x), std::move(y), {s}, kh, (1.0 + s) * jv,
                                numeric_slack(ctx, kh));
        };
        cat.push_back(std::move(b));
    }

    {
        BoundSpec b;
        b.name = "near_boundary_ray_growth";
        b.statement =
            "k(x,y) <= (1+s) j(x,y) when w in G, w0 is a nearest boundary point of w, "
            "x lies on the segment [w, w0] (so d(x) = |x - w0|), x, y in B(w, s d(w)) "
            "and d(x) <= d(y), for 0 < s < 1.";
        b.sampling =
            "G = unit disk; w = rw u with rw uniform in (0.15, 0.85) and u a random unit "
            "vector; s uniform in (0.25, 0.9); x = w + s v (w0 - w) with v uniform in "
            "(0.05, 0.95) and w0 = u; y uniform in B(w, s d(w)) redrawn until d(y) >= d(x) "
            "(200 tries, else a miss).";
        b.needs_numeric = true;
        b.numeric_sample_cap = 4000;
        b.prepare = [](int threads, double, Backend) {
            return solver_ctx({{disk_spec(), square_box(-1.0, 1.0)}}, threads);
        };
        b.run = [](Rng& rng, BoundContext& ctx) -> std::optional<BoundOutcome> {
            const Point u = unit_vector(rng, 2);
            const double rw = rng.uniform(0.15, 0.85);
            const Point w = scaled(u, rw);
            const double dw = 1.0 - rw;
            const double s = rng.uniform(0.25, 0.9);
            const double v = rng.uniform(0.05, 0.95);
            const Point x = lerp(w, u, s * v);
            const double dx = 1.0 - norm(x);
            Point y;
            bool found = false;
            for (int t = 0; t < 200 && !found; ++t) {
                y = offset_ball_point(rng, w, s * dw);
                found = 1.0 - norm(y) >= dx && dist(x, y) > 0.0;
            }
            if (!found) return std::nullopt;
            const double jv = j_metric(*ctx.domains[0], x, y).value;
            const double kh = k_hat(ctx, 0, x, y);
            return make_outcome(x, std::move(y), {s, v, rw}, kh, (1.0 + s) * jv,
                                numeric_slack(ctx, kh));
        };
        cat.push_back(std::move(b));
    }

    {
        BoundSpec b;
        b.name = "punctured_near_growth";
        b.statement =
            "k(x,y) <= (1+s) j(x,y) in G = R^2 minus the origin when |x-w| < s d(w), "
            "|y-w| < s d(w) for some w in G and |x| <= |y|, for 0 < s < 1.";
        b.sampling =
            "|w| uniform in (0.7, 1.6) with a random direction; s uniform in (0.25, 0.9); "
            "x, y uniform in B(w, s|w|), swapped so |x| <= |y|.";
        b.needs_numeric = true;
        b.numeric_sample_cap = 3000;
        b.prepare = [](int threads, double, Backend) {
            return solver_ctx({{punctured_plane_spec(), square_box(-4.0, 4.0)}}, threads);
        };
        b.run = [](Rng& rng, BoundContext& ctx) -> std::optional<BoundOutcome> {
            const Point u = unit_vector(rng, 2);
            const double rw = rng.uniform(0.7, 1.6);
            const Point w = scaled(u, rw);
            const double s = rng.uniform(0.25, 0.9);
            Point x = offset_ball_point(rng, w, s * rw);
            Point y = offset_ball_point(rng, w, s * rw);
            if (norm(x) > norm(y)) std::swap(x, y);
            if (dist(x, y) == 0.0) return std::nullopt;
            const double jv = j_metric(*ctx.domains[0], x, y).value;
            const double kh = k_hat(ctx, 0, x, y);
            return make_outcome(std::move(x), std::move(y), {s, rw}, kh, (1.0 + s) * jv,
                                numeric_slack(ctx, kh));
        };
        cat.push_back(std::move(b));
    }

    {
        BoundSpec b;
        b.name = "ball_radial_k_lower";
        b.statement =
            "k(x,y) >= 2 log(2/(2-|x-y|)) >= |x-y| in the unit ball, with equality in the "
            "first step when y = -x; checked on diametral configurations where k is "
            "closed-form.";
        b.sampling = "x = r u, y = -q u for a random unit vector u, r, q uniform in (0, 0.975).";
        b.run = [](Rng& rng, BoundContext&) -> std::optional<BoundOutcome> {
            const Point u = unit_vector(rng, 2);
            const double r = rng.uniform(0.0, 0.975), q = rng.uniform(0.0, 0.975);
            Point x = scaled(u, r), y = scaled(u, -q);
            const double d = r + q;
            const double k = k_radial_ball(x, y).value;
            const double bnd = 2.0 * std::log(2.0 / (2.0 - d));
            return chain2(std::move(x), std::move(y), {r, q}, bnd, k, d, bnd,
                          closed_slack({k, bnd, d}));
        };
        b.witnesses = [](BoundContext&) {
            std::vector<BoundOutcome> w;
            for (double r : {0.1, 0.5, 0.9, 0.99}) {
                Point x = {r, 0.0}, y = {-r, 0.0};
                const double k = k_radial_ball(x, y).value;
                const double bnd = 2.0 * std::log(2.0 / (2.0 - 2.0 * r));
                w.push_back(make_outcome(std::move(x), std::move(y), {r}, bnd, k, 0.0));
            }
            return w;
        };
        cat.push_back(std::move(b));
    }

    {
        BoundSpec b;
        b.name = "two_log_vs_t_scalar";
        b.statement = "2 log(2/(2-t)) >= t for t in [0, 2), with equality at t = 0.";
        b.sampling = "t uniform in (0, 2).";
        b.run = [](Rng& rng, BoundContext&) -> std::optional<BoundOutcome> {
            const double t = rng.uniform(0.0, 2.0);
            const double bnd = 2.0 * std::log(2.0 / (2.0 - t));
            return make_outcome({}, {}, {t}, t, bnd, closed_slack({t, bnd}));
        };
        b.witnesses = [](BoundContext&) {
            return std::vector<BoundOutcome>{make_outcome({}, {}, {0.0}, 0.0, 0.0, 0.0)};
        };
        cat.push_back(std::move(b));
    }

    {
        BoundSpec b;
        b.name = "jung_ratio_k_lower";
        b.statement =
            "k(x,y) >= 2 log(2/(2-t)) with t = |x-y|/r and r = sqrt(n/(2n+2)) diam(G), for "
            "any bounded G; here G = unit disk, r = 2/sqrt(3). For a ball B(z,rho) with x, y "
            "symmetric about z, k(x,y) = 2 log(2/(2-|x-y|/rho)) exactly; t matches |x-y|/rho "
            "only when |x-y| = diam G, so the witness uses the ball-radius form.";
        b.sampling = "x = r u, y = -q u for a random unit vector u, r, q uniform in (0, 0.975).";
        b.run = [](Rng& rng, BoundContext&) -> std::optional<BoundOutcome> {
            const Point u = unit_vector(rng, 2);
            const double r = rng.uniform(0.0, 0.975), q = rng.uniform(0.0, 0.975);
            Point x = scaled(u, r), y = scaled(u, -q);
            const double rj = jung_radius(2, 2.0);
            const double t = (r + q) / rj;
            const double k = k_radial_ball(x, y).value;
            const double bnd = 2.0 * std::log(2.0 / (2.0 - t));
            return make_outcome(std::move(x), std::move(y), {r, q, rj}, bnd, k,
                                closed_slack({k, bnd}));
        };
        b.witnesses = [](BoundContext&) {
            std::vector<BoundOutcome> w;
            for (double r : {0.3, 0.7}) {
                Point x = {r, 0.0}, y = {-r, 0.0};
                const double k = k_radial_ball(x, y).value;
                const double bnd = 2.0 * std::log(2.0 / (2.0 - 2.0 * r));
                w.push_back(make_outcome(std::move(x), std::move(y), {r}, bnd, k, 0.0));
            }
            return w;
        };
        cat.push_back(std::move(b));
    }

    {
        BoundSpec b;
        b.name = "j_chord_lower";
        b.statement =
            "j(x,y) >= log((2+t)/(2-t)) with t = |x-y|, for arbitrary x, y in the unit "
            "ball, with equality when y = -x.";
        b.sampling = "x, y uniform in the unit disk; x = y rejected.";
        b.prepare = [](int, double, Backend) { return domain_only_ctx(disk_spec()); };
        b.run = [](Rng& rng, BoundContext& ctx) -> std::optional<BoundOutcome> {
            Point x = unit_ball_point(rng, 2), y = unit_ball_point(rng, 2);
            const double d = dist(x, y);
            if (d == 0.0) return std::nullopt;
            const double jv = j_metric(*ctx.domains[0], x, y).value;
            const double bnd = std::log((2.0 + d) / (2.0 - d));
            return make_outcome(std::move(x), std::move(y), {d}, bnd, jv,
                                closed_slack({jv, bnd}));
        };
        b.witnesses = [](BoundContext& ctx) {
            std::vector<BoundOutcome> w;
            for (double r : {0.3, 0.7, 0.95}) {
                Point x = {r, 0.0}, y = {-r, 0.0};
                const double jv = j_metric(*ctx.domains[0], x, y).value;
                const double bnd = std::log((2.0 + 2.0 * r) / (2.0 - 2.0 * r));
                w.push_back(make_outcome(std::move(x), std::move(y), {r}, bnd, jv, 0.0));
            }
            return w;
        };
        cat.push_back(std::move(b));
    }

    {
        BoundSpec b;
        b.name = "artanh_identity";
        b.statement = "log((2+t)/(2-t)) = 2 artanh(t/2) for t in [0, 2).";
        b.sampling = "t uniform in (0, 1.99).";
        b.run = [](Rng& rng, BoundContext&) -> std::optional<BoundOutcome> {
            const double t = rng.uniform(0.0, 1.99);
            const double lhs = std::log((2.0 + t) / (2.0 - t));
            const double rhs = 2.0 * std::atanh(t / 2.0);
            return make_outcome({}, {}, {t}, std::abs(lhs - rhs), 0.0,
                                closed_slack({lhs, rhs}));
        };
        cat.push_back(std::move(b));
    }

    {
        BoundSpec b;
        b.name = "k_exp_modulus";
        b.statement =
            "|x-y| <= 2(1 - exp(-k(x,y)/2)) <= k(x,y) in the unit ball, with equality in "
            "the first step when y = -x; checked on radial configurations where k is "
            "closed-form.";
        b.sampling =
            "x = r u and y = +-q u (both orientations, chosen by a coin flip) for a random "
            "unit vector u, r, q uniform in (0, 0.975).";
        b.run = [](Rng& rng, BoundContext&) -> std::optional<BoundOutcome> {
            const Point u = unit_vector(rng, 2);
            const double r = rng.uniform(0.0, 0.975), q = rng.uniform(0.0, 0.975);
            const bool through_origin = rng.next_double() < 0.5;
            Point x = scaled(u, r), y = scaled(u, through_origin ? -q : q);
            const double d = dist(x, y);
            const double k = k_radial_ball(x, y).value;
            const double mid = -2.0 * std::expm1(-k / 2.0);
            return chain2(std::move(x), std::move(y), {r, q}, d, mid, mid, k,
                          closed_slack({d, mid, k}));
        };
        b.witnesses = [](BoundContext&) {
            std::vector<BoundOutcome> w;
            for (double r : {0.2, 0.6, 0.9}) {
                Point x = {r, 0.0}, y = {-r, 0.0};
                const double k = k_radial_ball(x, y).value;
                const double mid = -2.0 * std::expm1(-k / 2.0);
                w.push_back(make_outcome(std::move(x), std::move(y), {r}, 2.0 * r, mid, 0.0));
            }
            return w;
        };
        cat.push_back(std::move(b));
    }

    {
        BoundSpec b;
        b.name = "j_tanh_modulus";
        b.statement =
            "|x-y| <= 2 tanh(j(x,y)/2) <= j(x,y) for arbitrary x, y in the unit ball, with "
            "equality in the first step when y = -x.";
        b.sampling = "x, y uniform in the unit disk; x = y rejected.";
        b.prepare = [](int, double, Backend) { return domain_only_ctx(disk_spec()); };
        b.run = [](Rng& rng, BoundContext& ctx) -> std::optional<BoundOutcome> {
            Point x = unit_ball_point(rng, 2), y = unit_ball_point(rng, 2);
            const double d = dist(x, y);
            if (d == 0.0) return std::nullopt;
            const double jv = j_metric(*ctx.domains[0], x, y).value;
            const double mid = 2.0 * std::tanh(jv / 2.0);
            return chain2(std::move(x), std::move(y), {d}, d, mid, mid, jv,
                          closed_slack({d, mid, jv}));
        };
        b.witnesses = [](BoundContext& ctx) {
            std::vector<BoundOutcome> w;
            for (double r : {0.25, 0.8}) {
                Point x = {r, 0.0}, y = {-r, 0.0};
                const double jv = j_metric(*ctx.domains[0], x, y).value;
                const double mid = 2.0 * std::tanh(jv / 2.0);
                w.push_back(make_outcome(std::move(x), std::move(y), {r}, 2.0 * r, mid, 0.0));
            }
            return w;
        };
        cat.push_back(std::move(b));
    }

    {
        BoundSpec b;
        b.name = "jung_ratio_j_chain";
        b.statement =
            "With t = |x-y|/r and r = sqrt(n/(2n+2)) diam(G) for bounded G: "
            "t <= 2 tanh(j(x,y)/2) and j(x,y) >= log((2+t)/(2-t)); here G = unit disk, "
            "r = 2/sqrt(3). For a ball B(z,rho) with y symmetric to x about z, "
            "2 tanh(j/2) = |x-y|/rho exactly; t = |x-y|/r < |x-y|/rho, so the bound holds "
            "with room unless |x-y| = diam G.";
        b.sampling = "x, y uniform in the unit disk; x = y rejected.";
        b.prepare = [](int, double, Backend) { return domain_only_ctx(disk_spec()); };
        b.run = [](Rng& rng, BoundContext& ctx) -> std::optional<BoundOutcome> {
            Point x = unit_ball_point(rng, 2), y = unit_ball_point(rng, 2);
            const double d = dist(x, y);
            if (d == 0.0) return std::nullopt;
            const double rj = jung_radius(2, 2.0);
            const double t = d / rj;
            const double jv = j_metric(*ctx.domains[0], x, y).value;
            const double mid = 2.0 * std::tanh(jv / 2.0);
            const double bnd = std::log((2.0 + t) / (2.0 - t));
            return chain2(std::move(x), std::move(y), {t, rj}, t, mid, bnd, jv,
                          closed_slack({t, mid, bnd, jv}));
        };
        cat.push_back(std::move(b));
    }

    {
        BoundSpec b;
        b.name = "rho_j_sandwich";
        b.statement =
            "j(x,y) <= rho(x,y) <= 2 j(x,y) in the unit ball, where rho is the hyperbolic "
            "metric; the right inequality is an equality when y = -x.";
        b.sampling = "x, y uniform in the unit disk; x = y allowed (all terms vanish).";
        b.prepare = [](int, double, Backend) { return domain_only_ctx(disk_spec()); };
        b.run = [](Rng& rng, BoundContext& ctx) -> std::optional<BoundOutcome> {
            Point x = unit_ball_point(rng, 2), y = unit_ball_point(rng, 2);
            const double jv = j_metric(*ctx.domains[0], x, y).value;
            const double rho = rho_ball(x, y).value;
            return chain2(std::move(x), std::move(y), {}, jv, rho, rho, 2.0 * jv,
                          closed_slack({jv, rho}));
        };
        b.witnesses = [](BoundContext& ctx) {
            std::vector<BoundOutcome> w;
            for (double r : {0.3, 0.9}) {
                Point x = {r, 0.0}, y = {-r, 0.0};
                const double jv = j_metric(*ctx.domains[0], x, y).value;
                const double rho = rho_ball(x, y).value;
                w.push_back(make_outcome(std::move(x), std::move(y), {r}, rho, 2.0 * jv, 0.0));
            }
            return w;
        };
        cat.push_back(std::move(b));
    }

    {
        BoundSpec b;
        b.name = "rho_k_sandwich_radial";
        b.statement =
            "rho(x,y)/2 <= k(x,y) <= rho(x,y) in the unit ball; checked on radial "
            "configurations where k is closed-form.";
        b.sampling =
            "x = r u and y = +-q u (both orientations) for a random unit vector u, "
            "r, q uniform in (0, 0.975).";
        b.run = [](Rng& rng, BoundContext&) -> std::optional<BoundOutcome> {
            const Point u = unit_vector(rng, 2);
            const double r = rng.uniform(0.0, 0.975), q = rng.uniform(0.0, 0.975);
            const bool through_origin = rng.next_double() < 0.5;
            Point x = scaled(u, r), y = scaled(u, through_origin ? -q : q);
            const double k = k_radial_ball(x, y).value;
            const double rho = rho_ball(x, y).value;
            return chain2(std::move(x), std::move(y), {r, q}, rho / 2.0, k, k, rho,
                          closed_slack({rho, k}));
        };
        cat.push_back(std::move(b));
    }

    {
        BoundSpec b;
        b.name = "rho_identity";
        b.statement =
            "In the unit ball with t^2 = (1-|x|^2)(1-|y|^2): "
            "tanh^2(rho/2) = |x-y|^2/(|x-y|^2 + t^2) and "
            "2 tanh(rho/4) = 2|x-y|/(sqrt(|x-y|^2 + t^2) + t).";
        b.sampling = "x, y uniform in the unit disk.";
        b.run = [](Rng& rng, BoundContext&) -> std::optional<BoundOutcome> {
            Point x = unit_ball_point(rng, 2), y = unit_ball_point(rng, 2);
            const double d2 = dist2(x, y);
            const double t2 = (1.0 - norm2(x)) * (1.0 - norm2(y));
            const double rho = rho_ball(x, y).value;
            const double th = std::tanh(rho / 2.0);
            const double id1 = std::abs(th * th - d2 / (d2 + t2));
            const double q = 2.0 * std::sqrt(d2) / (std::sqrt(d2 + t2) + std::sqrt(t2));
            const double id2 = std::abs(2.0 * std::tanh(rho / 4.0) - q);
            return make_outcome(std::move(x), std::move(y), {}, std::max(id1, id2), 0.0,
                                closed_slack({q}));
        };
        cat.push_back(std::move(b));
    }

    {
        BoundSpec b;
        b.name = "rho_chord_bound";
        b.statement =
            "|x-y| <= 2 tanh(rho(x,y)/4) in the unit ball, with equality when y = -x.";
        b.sampling = "x, y uniform in the unit disk.";
        b.run = [](Rng& rng, BoundContext&) -> std::optional<BoundOutcome> {
            Point x = unit_ball_point(rng, 2), y = unit_ball_point(rng, 2);
            const double d = dist(x, y);
            const double rho = rho_ball(x, y).value;
            const double mid = 2.0 * std::tanh(rho / 4.0);
            return make_outcome(std::move(x), std::move(y), {}, d, mid, closed_slack({d, mid}));
        };
        b.witnesses = [](BoundContext&) {
            std::vector<BoundOutcome> w;
            for (double r : {0.35, 0.85}) {
                Point x = {r, 0.0}, y = {-r, 0.0};
                const double rho = rho_ball(x, y).value;
                const double mid = 2.0 * std::tanh(rho / 4.0);
                w.push_back(make_outcome(std::move(x), std::move(y), {r}, 2.0 * r, mid, 0.0));
            }
            return w;
        };
        cat.push_back(std::move(b));
    }

    {
        BoundSpec b;
        b.name = "chordal_euclid_bound";
        b.statement =
            "q(x,y) <= |x-y|/(1 + (|x-y|/2)^2) for |x-y| <= 2, where q is the chordal "
            "metric; equality when y = -x. (The bound is the inversion of the sharp "
            "estimate |x-y| >= 2 q/(1 + sqrt(1-q^2)), valid while |x-y| <= 2.)";
        b.sampling =
            "x, y with coordinates uniform in (-1.2, 1.2); pairs with |x-y| > 2 are "
            "hypothesis misses.";
        b.run = [](Rng& rng, BoundContext&) -> std::optional<BoundOutcome> {
            Point x(2), y(2);
            for (auto& c : x) c = rng.uniform(-1.2, 1.2);
            for (auto& c : y) c = rng.uniform(-1.2, 1.2);
            const double d = dist(x, y);
            if (d > 2.0) return std::nullopt;
            const double q = chordal(x, y).value;
            const double bnd = d / (1.0 + (d / 2.0) * (d / 2.0));
            return make_outcome(std::move(x), std::move(y), {d}, q, bnd, closed_slack({q, bnd}));
        };
        b.witnesses = [](BoundContext&) {
            std::vector<BoundOutcome> w;
            for (double r : {0.2, 0.7, 1.0}) {
                Point x = {r, 0.0}, y = {-r, 0.0};
                const double d = 2.0 * r;
                const double q = chordal(x, y).value;
                const double bnd = d / (1.0 + (d / 2.0) * (d / 2.0));
                w.push_back(make_outcome(std::move(x), std::move(y), {r}, q, bnd, 0.0));
            }
            return w;
        };
        cat.push_back(std::move(b));
    }

    {
        BoundSpec b;
        b.name = "bernoulli_log";
        b.statement = "log(1 + a t) <= a log(1 + t) for a >= 1 and t >= 0; equality at a = 1.";
        b.sampling = "a uniform in (1, 20), t uniform in (0, 100).";
        b.run = [](Rng& rng, BoundContext&) -> std::optional<BoundOutcome> {
            const double a = rng.uniform(1.0, 20.0);
            const double t = rng.uniform(0.0, 100.0);
            const double lhs = std::log1p(a * t);
            const double rhs = a * std::log1p(t);
            return make_outcome({}, {}, {a, t}, lhs, rhs, closed_slack({lhs, rhs}));
        };
        b.witnesses = [](BoundContext&) {
            std::vector<BoundOutcome> w;
            for (double t : {0.5, 3.0}) {
                w.push_back(make_outcome({}, {}, {1.0, t}, std::log1p(t), std::log1p(t), 0.0));
            }
            return w;
        };
        cat.push_back(std::move(b));
    }

    {
        BoundSpec b;
        b.name = "inversion_distance_identity";
        b.statement =
            "For the inversion h in the sphere S(a, r): "
            "|h(x) - h(y)| |x-a| |y-a| = r^2 |x-y| for x, y distinct from a.";
        b.sampling =
            "a with coordinates uniform in (-2, 2); r uniform in (0.5, 3); x, y with "
            "coordinates uniform in (-5, 5), redrawn while within 0.1 of a.";
        b.run = [](Rng& rng, BoundContext&) -> std::optional<BoundOutcome> {
            Point a(2);
            for (auto& c : a) c = rng.uniform(-2.0, 2.0);
            const double r = rng.uniform(0.5, 3.0);
            auto draw = [&](Point& p) {
                for (int t = 0; t < 100; ++t) {
                    for (auto& c : p) c = rng.uniform(-5.0, 5.0);
                    if (dist(p, a) >= 0.1) return true;
                }
                return false;
            };
            Point x(2), y(2);
            if (!draw(x) || !draw(y)) return std::nullopt;
            const double d = dist(x, y);
            if (d == 0.0) return std::nullopt;
            const Point hx = inversion_map(a, r, x), hy = inversion_map(a, r, y);
            const double lhs = dist(hx, hy) * dist(x, a) * dist(y, a);
            const double rhs = r * r * d;
            const double rel = std::abs(lhs - rhs) / std::max({lhs, rhs, 1e-300});
            return make_outcome(std::move(x), std::move(y), {a[0], a[1], r}, rel, 0.0, 1e-12);
        };
        cat.push_back(std::move(b));
    }

    {
        BoundSpec b;
        b.name = "exterior_ball_arc_bound";
        b.statement =
            "k(x,y) <= pi |x-y| / (2 (|x| - r)) in G = R^n minus the closed ball B(0,r), "
            "for |x| = |y| > r (via a circular-arc competitor and the bound "
            "k(x,y) <= (|x|/(|x|-r)) k'(x,y), k' the quasihyperbolic metric of R^n minus "
            "the origin); checked with r = 1, |x| = |y| = 2 via k_hat.";
        b.sampling = "x = 2(cos p1, sin p1), y = 2(cos p2, sin p2), p1, p2 uniform in (0, 2 pi).";
        b.needs_numeric = true;
        b.numeric_sample_cap = 100;
        b.prepare = [](int threads, double, Backend) {
            return solver_ctx({{exterior_ball_spec(), square_box(-6.0, 6.0)}}, threads);
        };
        b.run = [](Rng& rng, BoundContext& ctx) -> std::optional<BoundOutcome> {
            const double p1 = rng.uniform(0.0, 2.0 * kPi), p2 = rng.uniform(0.0, 2.0 * kPi);
            Point x = {2.0 * std::cos(p1), 2.0 * std::sin(p1)};
            Point y = {2.0 * std::cos(p2), 2.0 * std::sin(p2)};
            const double d = dist(x, y);
            if (d < 1e-9) return std::nullopt;
            const double kh = k_hat(ctx, 0, x, y);
            const double bnd = kPi * d / (2.0 * (2.0 - 1.0));
            return make_outcome(std::move(x), std::move(y), {p1, p2}, kh, bnd,
                                numeric_slack(ctx, kh));
        };
        cat.push_back(std::move(b));
    }

    {
        BoundSpec b;
        b.name = "puncture_removal_factor";
        b.statement =
            "k_{G minus {z}}(x,y) <= a(theta) k_G(x,y) when x, y lie outside "
            "B(z, theta d(z)), theta in (0,1), with "
            "a(theta) = 1 + 2/theta + pi/(2 log((2+2 theta)/(2+theta))); checked with "
            "G = unit disk, z = 0, theta = 1/2, comparing upper estimates on both sides "
            "(the right side only grows).";
        b.sampling =
            "x = r1 u1, y = r2 u2 with r1, r2 uniform in (0.52, 0.97) and u1, u2 random "
            "unit vectors.";
        b.needs_numeric = true;
        b.numeric_sample_cap = 1000;
        b.prepare = [](int threads, double, Backend) {
            return solver_ctx({{disk_spec(), square_box(-1.0, 1.0)},
                               {punctured_disk_spec(), square_box(-1.0, 1.0)}},
                              threads);
        };
        b.run = [](Rng& rng, BoundContext& ctx) -> std::optional<BoundOutcome> {
            const double theta = 0.5;
            Point x = scaled(unit_vector(rng, 2), rng.uniform(0.52, 0.97));
            Point y = scaled(unit_vector(rng, 2), rng.uniform(0.52, 0.97));
            if (dist(x, y) == 0.0) return std::nullopt;
            const double kg = k_hat(ctx, 0, x, y);
            const double kp = k_hat(ctx, 1, x, y);
            return make_outcome(std::move(x), std::move(y), {theta}, kp, a_theta(theta) * kg,
                                numeric_slack(ctx, kp));
        };
        cat.push_back(std::move(b));
    }

    {
        BoundSpec b;
        b.name = "ball_removal_factor";
        b.statement =
            "k_{G'}(x,y) <= a(alpha, theta) k_G(x,y) for "
            "G' = G minus closed B(z, alpha theta d(z)) when x, y lie outside "
            "B(z, theta d(z)), alpha, theta in (0,1); checked with G = unit disk, z = 0, "
            "alpha = 1/4, theta = 1/2, comparing upper estimates on both sides.";
        b.sampling =
            "x = r1 u1, y = r2 u2 with r1, r2 uniform in (0.52, 0.97) and u1, u2 random "
            "unit vectors.";
        b.needs_numeric = true;
        b.numeric_sample_cap = 1000;
        b.prepare = [](int threads, double, Backend) {
            return solver_ctx({{disk_spec(), square_box(-1.0, 1.0)},
                               {disk_minus_ball_spec(0.125), square_box(-1.0, 1.0)}},
                              threads);
        };
        b.run = [](Rng& rng, BoundContext& ctx) -> std::optional<BoundOutcome> {
            const double alpha = 0.25, theta = 0.5;
            Point x = scaled(unit_vector(rng, 2), rng.uniform(0.52, 0.97));
            Point y = scaled(unit_vector(rng, 2), rng.uniform(0.52, 0.97));
            if (dist(x, y) == 0.0) return std::nullopt;
            const double kg = k_hat(ctx, 0, x, y);
            const double kp = k_hat(ctx, 1, x, y);
            return make_outcome(std::move(x), std::move(y), {alpha, theta}, kp,
                                a_alpha_theta(alpha, theta) * kg, numeric_slack(ctx, kp));
        };
        cat.push_back(std::move(b));
    }

    {
        BoundSpec b;
        b.name = "convex_segment_modulus_square";
        b.statement =
            "k(x,y) <= t with t = |x-y|/min(d(x),d(y)) in a convex domain (the straight "
            "segment is admissible and d is concave along it); checked as "
            "k_hat <= 1.05 t on the unit square.";
        b.sampling =
            "x, y uniform in (0,1)^2; pairs with min(d(x),d(y)) < 1e-6 sqrt(2) or x = y "
            "are hypothesis misses.";
        b.needs_numeric = true;
        b.numeric_sample_cap = 10000;
        b.prepare = [](int threads, double, Backend) {
            return solver_ctx({{unit_square_spec(), square_box(0.0, 1.0)}}, threads);
        };
        b.run = [](Rng& rng, BoundContext& ctx) -> std::optional<BoundOutcome> {
            Point x(2), y(2);
            for (auto& c : x) c = rng.uniform(0.0, 1.0);
            for (auto& c : y) c = rng.uniform(0.0, 1.0);
            const auto& dom = *ctx.domains[0];
            const double dmin = std::min(dom.delta(x), dom.delta(y));
            const double d = dist(x, y);
            if (dmin < 1e-6 * std::sqrt(2.0) || d == 0.0) return std::nullopt;
            const double t = d / dmin;
            const double kh = k_hat(ctx, 0, x, y);
            return make_outcome(std::move(x), std::move(y), {t}, kh, 1.05 * t,
                                1e-9 * (1.0 + 1.05 * t));
        };
        cat.push_back(std::move(b));
    }

    {
        BoundSpec b;
        b.name = "convex_segment_modulus_disk";
        b.statement =
            "k(x,y) <= t with t = |x-y|/min(d(x),d(y)) in a convex domain; checked as "
            "k_hat <= 1.05 t on the unit disk.";
        b.sampling =
            "x, y uniform in the unit disk; pairs with min(d(x),d(y)) < 2e-6 or x = y are "
            "hypothesis misses.";
        b.needs_numeric = true;
        b.numeric_sample_cap = 10000;
        b.prepare = [](int threads, double, Backend) {
            return solver_ctx({{disk_spec(), square_box(-1.0, 1.0)}}, threads);
        };
        b.run = [](Rng& rng, BoundContext& ctx) -> std::optional<BoundOutcome> {
            Point x = unit_ball_point(rng, 2), y = unit_ball_point(rng, 2);
            const auto& dom = *ctx.domains[0];
            const double dmin = std::min(dom.delta(x), dom.delta(y));
            const double d = dist(x, y);
            if (dmin < 2e-6 || d == 0.0) return std::nullopt;
            const double t = d / dmin;
            const double kh = k_hat(ctx, 0, x, y);
            return make_outcome(std::move(x), std::move(y), {t}, kh, 1.05 * t,
                                1e-9 * (1.0 + 1.05 * t));
        };
        cat.push_back(std::move(b));
    }

    // Purely scalar bounds need no domains or solvers, but callers may still
    // invoke prepare() directly (e.g. to evaluate witnesses), so give every
    // entry a callable one.
    for (auto& b : cat) {
        if (!b.prepare) {
            b.prepare = [](int, double tol, Backend backend) {
                BoundContext ctx;
                ctx.tol = tol;
                ctx.backend = backend;
                return ctx;
            };
        }
    }

    return cat;
}

} // namespace

const std::vector<BoundSpec>& bound_catalog() {
    static const std::vector<BoundSpec> catalog = build_catalog();
    return catalog;
}

const BoundSpec& find_bound(const std::string& name) {
    for (const auto& b : bound_catalog())
        if (b.name == name) return b;
    throw OutOfRange("unknown bound name: " + name);
}

ViolationReport check_bound(const BoundSpec& spec, std::size_t samples, std::uint64_t seed,
                            Backend backend, double tol, int threads) {
    if (!(tol > 0.0) || !std::isfinite(tol)) throw OutOfRange("check_bound: tol must be positive");
    if (spec.needs_numeric && backend == Backend::closed_only)
        throw InvalidSpec("bound '" + spec.name + "' requires the numeric backend");
    if (!spec.run) throw InvalidSpec("bound '" + spec.name + "' has no evaluator");

    std::size_t n = samples;
    if (spec.needs_numeric && spec.numeric_sample_cap > 0)
        n = std::min(n, spec.numeric_sample_cap);

    int nthreads = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    if (nthreads < 1) nthreads = 1;

    BoundContext ctx;
    if (spec.prepare) ctx = spec.prepare(nthreads, tol, backend);
    ctx.tol = tol;
    ctx.backend = backend;

    ViolationReport rep;
    rep.name = spec.name;
    rep.statement = spec.statement;
    rep.samples = n;

    struct Partial {
        std::size_t hits = 0;
        std::vector<BoundViolation> violations;
        double min_margin = std::numeric_limits<double>::infinity();
    };
    const int workers =
        static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(nthreads),
                                               std::max<std::size_t>(n / 8, 1)));
    std::vector<Partial> parts(static_cast<size_t>(workers));
    std::atomic<std::size_t> cursor{0};
    std::exception_ptr first_error;
    std::mutex error_mu;

    auto work = [&](int w) {
        try {
            constexpr std::size_t kChunk = 8;
            for (;;) {
                const std::size_t lo = cursor.fetch_add(kChunk);
                if (lo >= n) break;
                const std::size_t hi = std::min(n, lo + kChunk);
                for (std::size_t i = lo; i < hi; ++i) {
                    Rng rng = Rng::stream(seed, i);
                    auto out = spec.run(rng, ctx);
                    if (!out) continue;
                    Partial& p = parts[static_cast<size_t>(w)];
                    p.hits++;
                    const double allowed = out->rhs + out->slack;
                    if (!(out->lhs <= allowed)) {
                        p.violations.push_back({i, std::move(out->x), std::move(out->y),
                                                std::move(out->params), out->lhs, out->rhs,
                                                out->lhs - allowed});
                    } else {
                        p.min_margin = std::min(p.min_margin, allowed - out->lhs);
                    }
                }
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mu);
            if (!first_error) first_error = std::current_exception();
        }
    };

    if (workers <= 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    for (auto& p : parts) {
        rep.hits += p.hits;
        rep.min_margin = std::min(rep.min_margin, p.min_margin);
        for (auto& v : p.violations) rep.violations.push_back(std::move(v));
    }
    std::sort(rep.violations.begin(), rep.violations.end(),
              [](const BoundViolation& a, const BoundViolation& b) { return a.sample < b.sample; });

    if (rep.hits == 0)
        throw NoHypothesisHits("bound '" + spec.name + "': no sample satisfied the hypothesis");

    if (spec.witnesses) {
        for (const auto& w : spec.witnesses(ctx))
            rep.max_sharpness_defect = std::max(rep.max_sharpness_defect, std::abs(w.lhs - w.rhs));
    }
    return rep;
}

// ---- modulus transfer -------------------------------------------------------

namespace {

const std::vector<double>& modulus_grid() {
    static const std::vector<double> grid = [] {
        std::vector<double> g;
        g.reserve(100);
        g.push_back(0.0);
        for (int i = 0; i < 99; ++i) g.push_back(1e-6 * std::pow(10.0, 9.0 * i / 98.0));
        return g;
    }();
    return grid;
}

void validate_modulus(const Modulus& phi, const std::string& what) {
    if (!phi) throw OutOfRange(what + ": modulus function is required");
    const auto& g = modulus_grid();
    double prev = phi(0.0);
    if (!(std::abs(prev) <= 1e-15))
        throw OutOfRange(what + ": modulus must vanish at 0");
    for (size_t i = 1; i < g.size(); ++i) {
        const double cur = phi(g[i]);
        if (!std::isfinite(cur) || !(cur > prev))
            throw OutOfRange(what + ": modulus must be finite and strictly increasing");
        prev = cur;
    }
}

void require_range(bool ok, const std::string& msg) {
    if (!ok) throw OutOfRange(msg);
}

} // namespace

Modulus phi_transfer(PhiTransferKind kind, const PhiTransferInputs& in) {
    Modulus out;
    switch (kind) {
    case PhiTransferKind::bilipschitz: {
        require_range(std::isfinite(in.L) && in.L >= 1.0, "phi_transfer(bilipschitz): L must be >= 1");
        validate_modulus(in.phi, "phi_transfer(bilipschitz)");
        const double L2 = in.L * in.L;
        const Modulus phi = in.phi;
        out = [L2, phi](double t) { return L2 * phi(L2 * t); };
        break;
    }
    case PhiTransferKind::inversion: {
        require_range(std::isfinite(in.m_inner) && std::isfinite(in.M_outer) && in.m_inner > 0.0 &&
                          in.M_outer > in.m_inner,
                      "phi_transfer(inversion): need 0 < m_inner < M_outer");
        validate_modulus(in.phi, "phi_transfer(inversion)");
        const double ratio2 = (in.M_outer / in.m_inner) * (in.M_outer / in.m_inner);
        const double arg2 = (in.M_outer * in.M_outer) / (in.m_inner * in.m_inner);
        const Modulus phi = in.phi;
        out = [ratio2, arg2, phi](double t) { return ratio2 * phi(arg2 * t); };
        break;
    }
    case PhiTransferKind::puncture: {
        require_range(in.theta > 0.0 && in.theta < 1.0,
                      "phi_transfer(puncture): theta must be in (0, 1)");
        validate_modulus(in.phi, "phi_transfer(puncture)");
        const double A = a_theta(in.theta / 2.0);
        const Modulus phi = in.phi;
        out = [A, phi](double t) {
            return 2.0 * std::max(kPi / kLog3 * std::log1p(3.0 * t), A * phi(3.0 * t));
        };
        break;
    }
    case PhiTransferKind::multi_puncture: {
        require_range(in.m_points >= 1, "phi_transfer(multi_puncture): m_points must be >= 1");
        require_range(in.theta > 0.0 && in.theta < 1.0,
                      "phi_transfer(multi_puncture): theta must be in (0, 1)");
        validate_modulus(in.phi, "phi_transfer(multi_puncture)");
        const double A = a_theta(in.theta / 2.0);
        const double lead =
            std::pow(2.0, in.m_points) * std::pow(A, static_cast<double>(in.m_points - 1));
        require_range(std::isfinite(lead), "phi_transfer(multi_puncture): factor overflows");
        const Modulus phi = in.phi;
        out = [lead, A, phi](double t) {
            return lead * std::max(kPi / kLog3 * std::log1p(3.0 * t), A * phi(3.0 * t));
        };
        break;
    }
    case PhiTransferKind::uniform_removal: {
        require_range(in.m_points >= 1, "phi_transfer(uniform_removal): m_points must be >= 1");
        require_range(in.theta > 0.0 && in.theta < 1.0,
                      "phi_transfer(uniform_removal): theta must be in (0, 1)");
        require_range(std::isfinite(in.c) && in.c >= 1.0,
                      "phi_transfer(uniform_removal): c must be >= 1");
        const double factor = std::pow(6.0, in.m_points) *
                              std::pow(a_theta(in.theta / 2.0), static_cast<double>(in.m_points)) *
                              in.c;
        require_range(std::isfinite(factor), "phi_transfer(uniform_removal): factor overflows");
        out = [factor](double t) { return factor * t; };
        break;
    }
    case PhiTransferKind::set_removal: {
        require_range(in.theta > 0.0 && in.theta < 1.0,
                      "phi_transfer(set_removal): theta must be in (0, 1)");
        validate_modulus(in.phi, "phi_transfer(set_removal) phi");
        validate_modulus(in.phi2, "phi_transfer(set_removal) phi2");
        const double A = a_alpha_theta(0.25, in.theta / 3.0);
        const Modulus phi = in.phi, phi2 = in.phi2;
        out = [A, phi, phi2](double t) {
            return 4.0 * A * std::max(phi(30.0 * t), phi2(30.0 * t));
        };
        break;
    }
    }
    if (!out) throw OutOfRange("phi_transfer: unknown transfer kind");
    validate_modulus(out, "phi_transfer output");
    return out;
}

} // namespace metriclab

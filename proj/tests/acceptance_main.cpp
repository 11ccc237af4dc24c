// Acceptance gate: one [PASS]/[FAIL] line per shipped guarantee, exit 1 if
// any fails. Tolerances are pinned here, not configurable.
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "metriclab/bounds.hpp"
#include "metriclab/cli.hpp"
#include "metriclab/closed_form.hpp"
#include "metriclab/domain.hpp"
#include "metriclab/profiler.hpp"
#include "metriclab/qh_solver.hpp"

namespace {

using namespace metriclab;
using Clock = std::chrono::steady_clock;

int g_failures = 0;

void report(int id, const char* what, bool ok, const std::string& detail) {
    std::printf("[%s] %2d: %s (%s)\n", ok ? "PASS" : "FAIL", id, what, detail.c_str());
    if (!ok) ++g_failures;
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

Domain unit_disk() {
    DomainSpec s;
    s.kind = "ball";
    s.center = {0.0, 0.0};
    s.radius = 1.0;
    return make_domain(s);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

constexpr double kLog2 = 0.69314718055994530942;
constexpr double kTwoLogTenSevenths = 0.71334988787746475783;

// --- 1: radial quasihyperbolic distance in the unit disk ---------------------
void criterion_1() {
    const auto t0 = Clock::now();
    const Domain disk = unit_disk();
    const Point o{0.0, 0.0}, x{0.5, 0.0};
    const double va = k_distance(*disk, o, x, 1e-3).value;
    const double vn = k_distance_numeric(*disk, o, x, 1e-3).value;
    const double secs = seconds_since(t0);
    const bool ok = std::abs(va - kLog2) < 1e-3 && std::abs(vn - kLog2) < 1e-3 && secs < 30.0;
    report(1, "center-to-0.5e1 distance in the unit disk is log 2", ok,
           fmt("auto %.12f, numeric %.12f, want %.12f +- 1e-3, %.1fs < 30s", va, vn, kLog2,
               secs));
}

// --- 2: antipodal pair, geodesic through the center ---------------------------
void criterion_2() {
    const Domain disk = unit_disk();
    const Point a{-0.3, 0.0}, b{0.3, 0.0};
    const double va = k_distance(*disk, a, b, 1e-3).value;
    const double vn = k_distance_numeric(*disk, a, b, 1e-3).value;
    const GeodesicPath gp = geodesic_numeric(*disk, a, b, 1e-3);
    double dmin = std::numeric_limits<double>::infinity();
    for (const Point& v : gp.vertices) dmin = std::min(dmin, norm(v));
    const bool ok = std::abs(va - kTwoLogTenSevenths) < 1e-3 &&
                    std::abs(vn - kTwoLogTenSevenths) < 1e-3 && gp.final_spacing > 0.0 &&
                    dmin <= 2.0 * gp.final_spacing;
    report(2, "(-0.3e1, 0.3e1) distance is 2 log(10/7); geodesic passes the center", ok,
           fmt("auto %.12f, numeric %.12f, want %.12f +- 1e-3; min|v| %.2e <= 2h %.2e", va, vn,
               kTwoLogTenSevenths, dmin, 2.0 * gp.final_spacing));
}

// --- 3: every closed-form inequality, 1e5 samples each ------------------------
void criterion_3() {
    const auto t0 = Clock::now();
    size_t entries = 0, violations = 0, samples_short = 0;
    for (const BoundSpec& spec : bound_catalog()) {
        if (spec.needs_numeric) continue;
        const ViolationReport rep = check_bound(spec, 100000, 42, Backend::closed_only, 1e-12);
        ++entries;
        violations += rep.violations.size();
        if (rep.samples != 100000) ++samples_short;
    }
    const double secs = seconds_since(t0);
    const bool ok = entries == 15 && violations == 0 && samples_short == 0 && secs < 60.0;
    report(3, "all 15 closed-form inequalities: 0 violations over 1e5 samples each", ok,
           fmt("%zu entries, %zu violations, %.1fs < 60s", entries, violations, secs));
}

// --- 4: sharpness witnesses hit equality --------------------------------------
void criterion_4() {
    const char* names[] = {"rho_chord_bound", "k_exp_modulus", "j_tanh_modulus",
                           "chordal_euclid_bound"};
    bool ok = true;
    double worst = 0.0;
    for (const char* name : names) {
        const BoundSpec& spec = find_bound(name);
        BoundContext ctx = spec.prepare(1, 1e-12, Backend::closed_only);
        const auto ws = spec.witnesses(ctx);
        if (ws.empty()) ok = false;
        for (const BoundOutcome& w : ws) {
            const double defect = std::abs(w.lhs - w.rhs);
            worst = std::max(worst, defect);
            if (defect > 1e-12) ok = false;
        }
    }
    report(4, "antipodal witnesses reach equality in all four sharp bounds", ok,
           fmt("worst |lhs - rhs| = %.3e <= 1e-12", worst));
}

// --- 5: numeric-backed bounds at full sample budget ----------------------------
void criterion_5() {
    const ViolationReport near =
        check_bound(find_bound("near_point_growth_ball"), 10000, 42, Backend::with_numeric, 1e-2);
    const ViolationReport arc =
        check_bound(find_bound("exterior_ball_arc_bound"), 100, 42, Backend::with_numeric, 1e-2);
    const bool ok = near.passed() && near.hits > 0 && arc.passed() && arc.hits > 0;
    report(5, "near-point growth (1e4 pairs) and exterior arc bound (100 pairs): 0 violations",
           ok,
           fmt("growth: %zu hits, %zu violations; arc: %zu hits, %zu violations", near.hits,
               near.violations.size(), arc.hits, arc.violations.size()));
}

// --- 6: removal-modulus constants vs 50-digit references ----------------------
void criterion_6() {
    const double thetas[9] = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    const double a_ref[9] = {54.766031789909874864, 29.052769432462930216, 20.478792081484853482,
                             16.19000583425993,     13.615527173070851605, 11.898355160829684061,
                             10.671178068339487027, 9.7503229024285980447, 9.033737300495290485};
    const double pairs[9][2] = {{0.1, 0.1}, {0.2, 0.3}, {0.3, 0.5}, {0.4, 0.7}, {0.5, 0.9},
                                {0.6, 0.2}, {0.7, 0.4}, {0.8, 0.6}, {0.9, 0.8}};
    const double aa_ref[9] = {67.276482123918549415, 32.52277406310200836,  29.339942795778985013,
                              32.865768502413543384, 42.350792443062213415, 203.46121609086150993,
                              216.34835608623072679, 384.13676701022657798, 1351.210297403284448};
    bool ok = true;
    double worst = 0.0, worst_gap = 0.0;
    for (int i = 0; i < 9; ++i) {
        const double e1 = std::abs(a_theta(thetas[i]) - a_ref[i]);
        const double e2 = std::abs(a_alpha_theta(pairs[i][0], pairs[i][1]) - aa_ref[i]);
        worst = std::max({worst, e1, e2});
        if (e1 > 1e-12 || e2 > 1e-12) ok = false;
        const double gap = a_alpha_theta(1e-8, thetas[i]) - a_theta(thetas[i]);
        worst_gap = std::max(worst_gap, std::abs(gap));
        if (!(gap < 1e-4) || gap < 0.0) ok = false;
    }
    report(6, "a(theta) and a(alpha, theta) match references; alpha -> 0 recovers a(theta)", ok,
           fmt("worst |err| = %.3e <= 1e-12; worst a(1e-8,t) - a(t) = %.3e < 1e-4", worst,
               worst_gap));
}

// --- 7: divergence sequences defeat every fixed modulus ------------------------
void criterion_7() {
    const SequenceReport hs = divergence_sequence(SequenceExample::half_strip, 20, 1e-2);
    const double j5 = std::log1p(4.0);
    bool ok = hs.rows.size() == 20;
    for (const SequenceRow& r : hs.rows)
        if (r.j_exact != j5) ok = false;
    const SequenceRow& last = hs.rows.back();
    const double ratio = last.k_hat / last.j_exact;
    if (!(std::isfinite(last.k_hat) && ratio > 2.0)) ok = false;

    const SequenceReport ec = divergence_sequence(SequenceExample::exp_cusp, 8, 1e-2);
    const double j3 = std::log1p(2.0);
    double min_excess = std::numeric_limits<double>::infinity();
    if (ec.rows.size() != 8) ok = false;
    for (const SequenceRow& r : ec.rows) {
        if (r.j_exact != j3) ok = false;
        if (!std::isfinite(r.k_hat) || !(r.k_hat > r.n)) ok = false;
        min_excess = std::min(min_excess, r.k_hat - r.n);
    }
    report(7, "half-strip: j = log 5, k/j > 2 at n = 20; thin cusp: j = log 3, k > n to n = 8",
           ok,
           fmt("strip k/j = %.3f > 2; cusp min(k - n) = %.3f > 0", ratio, min_excess));
}

// --- 8: convex domains have linear growth envelopes ----------------------------
void criterion_8() {
    DomainSpec sq;
    sq.kind = "rectangle";
    sq.lo = {0.0, 0.0};
    sq.hi = {1.0, 1.0};
    const Domain domains[2] = {make_domain(sq), unit_disk()};
    const char* labels[2] = {"square", "disk"};
    bool ok = true;
    double worst = 0.0;
    std::string detail;
    for (int d = 0; d < 2; ++d) {
        const Box region = domains[d]->bounding_box().value();
        const PhiProfile prof =
            phi_envelope(domains[d], 10000, 40, 42, ProfileAxis::ratio, region, 1e-2);
        size_t nonempty = 0;
        double w = 0.0;
        for (size_t i = 0; i < prof.counts.size(); ++i) {
            if (prof.counts[i] == 0) continue;
            ++nonempty;
            w = std::max(w, prof.sup_k[i] / prof.bin_hi[i]);
            if (!(prof.sup_k[i] <= 1.05 * prof.bin_hi[i])) ok = false;
        }
        if (nonempty == 0) ok = false;
        worst = std::max(worst, w);
        detail += fmt("%s%s sup k / t <= %.4f", d ? "; " : "", labels[d], w);
    }
    report(8, "unit square and unit disk: envelope(t) <= 1.05 t on every nonempty bin", ok,
           detail + " (allowed 1.05)");
}

// --- 9: punctured disk stays below the transferred modulus --------------------
void criterion_9() {
    DomainSpec spec;
    spec.kind = "remove_points";
    spec.removed_points = {{0.0, 0.0}};
    spec.base = std::make_shared<DomainSpec>();
    spec.base->kind = "ball";
    spec.base->center = {0.0, 0.0};
    spec.base->radius = 1.0;
    const Domain punctured = make_domain(spec);
    const Box region = punctured->bounding_box().value();
    const PhiProfile prof = phi_envelope(punctured, 10000, 40, 42, ProfileAxis::ratio, region, 1e-2);

    PhiTransferInputs in;
    in.theta = 0.5;
    in.phi = [](double t) { return 2.0 * std::log1p(t); };
    const Modulus phi4 = phi_transfer(PhiTransferKind::puncture, in);
    const EnvelopeComparison cmp = envelope_vs_theorem(prof, phi4);
    const bool ok = !cmp.bins.empty() && cmp.min_margin > 0.0;
    report(9, "punctured disk envelope lies below the transferred modulus on every bin", ok,
           fmt("%zu nonempty bins, min margin %.3f > 0", cmp.bins.size(), cmp.min_margin));
}

// --- 10: byte-identical verification reports ----------------------------------
void criterion_10() {
    char tmpl[] = "/tmp/ml_accept_XXXXXX";
    const char* dir = mkdtemp(tmpl);
    bool ok = dir != nullptr;
    std::string detail = "mkdtemp failed";
    if (ok) {
        const std::vector<std::string> base = {"verify",  "--suite", "all",  "--samples", "500",
                                               "--seed",  "42",      "--tol", "1e-2",
                                               "--format", "json"};
        auto run = [&](const std::string& name,
                       std::vector<std::string> extra) -> std::string {
            const std::string path = std::string(dir) + "/" + name + ".json";
            std::vector<std::string> args = base;
            args.insert(args.end(), {"--out", path});
            args.insert(args.end(), extra.begin(), extra.end());
            if (run_cli(args) != 0) ok = false;
            return slurp(path);
        };
        const std::string a = run("a", {});
        const std::string b = run("b", {});
        const std::string t1 = run("t1", {"--threads", "1"});
        const std::string t4 = run("t4", {"--threads", "4"});
        if (a.empty() || a != b || a != t1 || a != t4) ok = false;
        detail = fmt("%zu bytes; repeat %s, 1 vs 4 threads %s", a.size(),
                     a == b ? "identical" : "DIFFER",
                     (a == t1 && a == t4) ? "identical" : "DIFFER");
    }
    report(10, "verify --seed 42: byte-identical JSON across runs and thread counts", ok, detail);
}

} // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    if (g_failures) {
        std::printf("%d of 10 criteria FAILED\n", g_failures);
        return 1;
    }
    std::printf("all 10 criteria passed\n");
    return 0;
}

#include "metriclab/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "metriclab/bounds.hpp"
#include "metriclab/closed_form.hpp"
#include "metriclab/errors.hpp"
#include "metriclab/jsonio.hpp"
#include "metriclab/profiler.hpp"
#include "metriclab/qh_solver.hpp"
#include "metriclab/version.hpp"

namespace metriclab {

namespace {

using nlohmann::ordered_json;

double parse_double(const std::string& s) {
    const char* begin = s.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0' || !std::isfinite(v))
        throw InvalidSpec("not a finite number: '" + s + "'");
    return v;
}

Point parse_point(const std::string& s) {
    Point p;
    std::string cur;
    for (size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == ',') {
            if (cur.empty()) throw InvalidSpec("empty coordinate in '" + s + "'");
            p.push_back(parse_double(cur));
            cur.clear();
        } else if (!std::isspace(static_cast<unsigned char>(s[i]))) {
            cur += s[i];
        }
    }
    if (p.empty()) throw InvalidSpec("empty point");
    return p;
}

std::pair<Point, Point> parse_two(const std::string& text, const char* what) {
    const auto semi = text.find(';');
    if (semi == std::string::npos || text.find(';', semi + 1) != std::string::npos)
        throw InvalidSpec(std::string(what) + " must be two ';'-separated coordinate lists");
    Point a = parse_point(text.substr(0, semi));
    Point b = parse_point(text.substr(semi + 1));
    if (a.size() != b.size())
        throw InvalidSpec(std::string(what) + ": the two coordinate lists differ in dimension");
    return {std::move(a), std::move(b)};
}

} // namespace

std::pair<Point, Point> parse_points(const std::string& text) {
    return parse_two(text, "--points");
}

Box parse_region(const std::string& text) {
    auto [lo, hi] = parse_two(text, "--region");
    for (size_t i = 0; i < lo.size(); ++i)
        if (!(hi[i] > lo[i]))
            throw InvalidSpec("--region: hi must exceed lo on every axis");
    return Box{std::move(lo), std::move(hi)};
}

namespace {

// ---- shared CLI state --------------------------------------------------------

struct CliConfig {
    std::string domain_inline, domain_file, points, region, out, format;
    std::string metric = "k", method = "auto", suite = "all", example, axis = "ratio";
    double tol = 0.0; // per-command default applied at option registration
    std::size_t samples = 10000;
    std::uint64_t seed = 0;
    int bins = 40;
    int n_max = 8;
    int threads = 0;
};

void add_domain_flags(CLI::App* cmd, CliConfig& cfg) {
    cmd->add_option("--domain", cfg.domain_inline, "domain spec as inline JSON");
    cmd->add_option("--domain-file", cfg.domain_file, "path to a JSON domain spec file");
}

void add_output_flags(CLI::App* cmd, CliConfig& cfg, const std::string& default_format) {
    cfg.format = default_format;
    cmd->add_option("--out", cfg.out, "output file (stdout when omitted)");
    cmd->add_option("--format", cfg.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
}

std::optional<DomainSpec> maybe_domain_spec(const CliConfig& cfg) {
    if (!cfg.domain_inline.empty() && !cfg.domain_file.empty())
        throw InvalidSpec("give either --domain or --domain-file, not both");
    if (!cfg.domain_inline.empty()) return DomainSpec::from_json_text(cfg.domain_inline);
    if (!cfg.domain_file.empty()) return DomainSpec::from_json_file(cfg.domain_file);
    return std::nullopt;
}

void emit_text(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw IoFailure("cannot open output file: " + out_path);
    f << text;
    f.flush();
    if (!f.good()) throw IoFailure("failed writing output file: " + out_path);
}

std::string preamble(const std::string& fields) {
    return std::string("# metriclab ") + kVersion + " " + fields + "\n";
}

ordered_json domain_json(const std::optional<DomainSpec>& spec) {
    if (!spec) return nullptr;
    return ordered_json::parse(spec->to_json_text());
}

std::string method_name(Method m) {
    return m == Method::closed_form ? "closed_form" : "numeric";
}

ordered_json json_array(std::span<const double> v) {
    ordered_json a = ordered_json::array();
    for (double c : v) a.push_back(c);
    return a;
}

// ---- dist --------------------------------------------------------------------

int cmd_dist(const CliConfig& cfg) {
    auto [x, y] = parse_points(cfg.points);
    const auto spec = maybe_domain_spec(cfg);

    MetricResult r;
    if (cfg.metric == "q") {
        if (cfg.method == "numeric")
            throw InvalidSpec("metric q has no numeric method");
        r = chordal(x, y);
    } else {
        if (!spec) throw InvalidSpec("metric " + cfg.metric + " requires a domain");
        const Domain dom = make_domain(*spec);
        if (cfg.metric == "j") {
            if (cfg.method == "numeric")
                throw InvalidSpec("metric j has no numeric method");
            r = j_metric(*dom, x, y);
        } else if (cfg.metric == "rho") {
            if (cfg.method == "numeric")
                throw InvalidSpec("metric rho has no numeric method");
            const DomainSpec& ds = dom->spec();
            if (ds.kind == "ball") {
                Point xs(x.size()), ys(y.size());
                for (size_t i = 0; i < x.size(); ++i) {
                    xs[i] = (x[i] - ds.center[i]) / ds.radius;
                    ys[i] = (y[i] - ds.center[i]) / ds.radius;
                }
                r = rho_ball(xs, ys);
            } else if (ds.kind == "half_space") {
                r = k_halfspace(x, y);
            } else {
                throw InvalidSpec("metric rho is defined on ball and half_space domains");
            }
        } else if (cfg.metric == "k") {
            if (cfg.method == "numeric") {
                r = k_distance_numeric(*dom, x, y, cfg.tol);
            } else {
                r = k_distance(*dom, x, y, cfg.tol);
                if (cfg.method == "closed" && r.method != Method::closed_form)
                    throw InvalidSpec(
                        "no closed form applies to this configuration; use --method auto or "
                        "numeric");
            }
        } else {
            throw InvalidSpec("unknown metric: " + cfg.metric);
        }
    }

    if (cfg.format == "csv") {
        std::string out =
            preamble("command=dist metric=" + cfg.metric + " method=" + cfg.method +
                     " points=" + cfg.points + " tol=" + fmt17(cfg.tol));
        out += "value,method,error_bound,converged\n";
        out += fmt17(r.value) + "," + method_name(r.method) + "," + fmt17(r.error_bound) + "," +
               (r.converged ? "1" : "0") + "\n";
        emit_text(out, cfg.out);
    } else {
        ordered_json doc;
        doc["command"] = "dist";
        doc["version"] = kVersion;
        doc["config"] = {{"domain", domain_json(spec)},
                         {"points", cfg.points},
                         {"metric", cfg.metric},
                         {"method", cfg.method},
                         {"tol", cfg.tol}};
        doc["value"] = r.value;
        doc["method"] = method_name(r.method);
        doc["error_bound"] = r.error_bound;
        doc["converged"] = r.converged;
        emit_text(dump_json_17(doc) + "\n", cfg.out);
    }
    return 0;
}

// ---- geodesic ------------------------------------------------------------------

int cmd_geodesic(const CliConfig& cfg) {
    auto [x, y] = parse_points(cfg.points);
    const auto spec = maybe_domain_spec(cfg);
    if (!spec) throw InvalidSpec("a domain is required (--domain or --domain-file)");
    const Domain dom = make_domain(*spec);

    const GeodesicPath path = geodesic(*dom, x, y, cfg.tol);
    std::vector<double> cumulative(path.vertices.size(), 0.0);
    for (size_t i = 1; i < path.vertices.size(); ++i)
        cumulative[i] =
            cumulative[i - 1] + segment_k_length(*dom, path.vertices[i - 1], path.vertices[i]);

    if (cfg.format == "csv") {
        std::string out = preamble("command=geodesic points=" + cfg.points +
                                   " tol=" + fmt17(cfg.tol) + " domain=" + spec->kind);
        const size_t dim = path.vertices.empty() ? x.size() : path.vertices.front().size();
        for (size_t i = 0; i < dim; ++i) out += "x" + std::to_string(i + 1) + ",";
        out += "cumulative_k\n";
        for (size_t i = 0; i < path.vertices.size(); ++i) {
            for (double c : path.vertices[i]) out += fmt17(c) + ",";
            out += fmt17(cumulative[i]) + "\n";
        }
        emit_text(out, cfg.out);
    } else {
        ordered_json verts = ordered_json::array();
        for (const auto& v : path.vertices) verts.push_back(json_array(v));
        ordered_json doc;
        doc["command"] = "geodesic";
        doc["version"] = kVersion;
        doc["config"] = {{"domain", domain_json(spec)}, {"points", cfg.points}, {"tol", cfg.tol}};
        doc["k_length"] = path.k_length;
        doc["refinement_level"] = path.refinement_level;
        doc["final_spacing"] = path.final_spacing;
        doc["vertices"] = verts;
        doc["cumulative_k"] = json_array(cumulative);
        emit_text(dump_json_17(doc) + "\n", cfg.out);
    }
    return 0;
}

// ---- verify --------------------------------------------------------------------

ordered_json violation_json(const BoundViolation& v) {
    return {{"sample", v.sample}, {"x", json_array(v.x)},      {"y", json_array(v.y)},
            {"params", json_array(v.params)}, {"lhs", v.lhs}, {"rhs", v.rhs},
            {"defect", v.defect}};
}

ordered_json report_json(const ViolationReport& r) {
    ordered_json violations = ordered_json::array();
    for (const auto& v : r.violations) violations.push_back(violation_json(v));
    return {{"name", r.name},           {"citation", r.statement},
            {"samples", r.samples},     {"hits", r.hits},
            {"violations", violations}, {"max_sharpness_defect", r.max_sharpness_defect}};
}

int cmd_verify(const CliConfig& cfg) {
    const Backend backend =
        cfg.method == "closed" ? Backend::closed_only : Backend::with_numeric;

    std::vector<const BoundSpec*> selected;
    if (cfg.suite == "all") {
        for (const auto& b : bound_catalog()) {
            if (backend == Backend::closed_only && b.needs_numeric) continue;
            selected.push_back(&b);
        }
    } else {
        selected.push_back(&find_bound(cfg.suite));
    }

    std::size_t total_violations = 0;
    ordered_json results = ordered_json::array();
    std::string csv_rows;
    for (const BoundSpec* b : selected) {
        const ViolationReport rep =
            check_bound(*b, cfg.samples, cfg.seed, backend, cfg.tol, cfg.threads);
        total_violations += rep.violations.size();
        results.push_back(report_json(rep));
        csv_rows += rep.name + "," + std::to_string(rep.samples) + "," + std::to_string(rep.hits) +
                    "," + std::to_string(rep.violations.size()) + "," +
                    fmt17(rep.max_sharpness_defect) + "\n";
    }

    if (cfg.format == "csv") {
        std::string out = preamble(
            "command=verify suite=" + cfg.suite + " samples=" + std::to_string(cfg.samples) +
            " seed=" + std::to_string(cfg.seed) + " tol=" + fmt17(cfg.tol) + " backend=" +
            (backend == Backend::closed_only ? "closed_only" : "with_numeric"));
        out += "name,samples,hits,violations,max_sharpness_defect\n";
        out += csv_rows;
        emit_text(out, cfg.out);
    } else {
        ordered_json doc;
        doc["command"] = "verify";
        doc["version"] = kVersion;
        doc["config"] = {
            {"suite", cfg.suite},
            {"samples", cfg.samples},
            {"seed", cfg.seed},
            {"tol", cfg.tol},
            {"backend", backend == Backend::closed_only ? "closed_only" : "with_numeric"}};
        doc["results"] = results;
        doc["violations_total"] = total_violations;
        doc["passed"] = total_violations == 0;
        emit_text(dump_json_17(doc) + "\n", cfg.out);
    }
    return total_violations == 0 ? 0 : 2;
}

// ---- profile -------------------------------------------------------------------

int cmd_profile(const CliConfig& cfg) {
    const auto spec = maybe_domain_spec(cfg);
    if (!spec) throw InvalidSpec("a domain is required (--domain or --domain-file)");
    const Domain dom = make_domain(*spec);

    Box region;
    if (!cfg.region.empty()) {
        region = parse_region(cfg.region);
    } else if (auto b = dom->bounding_box()) {
        region = *b;
    } else {
        throw InvalidSpec("unbounded domain requires --region");
    }

    const ProfileAxis axis = cfg.axis == "ratio" ? ProfileAxis::ratio : ProfileAxis::j_value;
    const PhiProfile p =
        phi_envelope(dom, cfg.samples, cfg.bins, cfg.seed, axis, region, cfg.tol, cfg.threads);

    if (cfg.format == "csv") {
        std::string out = preamble(
            "command=profile domain=" + spec->kind + " samples=" + std::to_string(cfg.samples) +
            " bins=" + std::to_string(cfg.bins) + " seed=" + std::to_string(cfg.seed) +
            " axis=" + cfg.axis + " tol=" + fmt17(cfg.tol));
        out += profile_to_csv(p);
        emit_text(out, cfg.out);
    } else {
        ordered_json bins = ordered_json::array();
        for (size_t i = 0; i < p.counts.size(); ++i)
            bins.push_back({{"bin_lo", p.bin_lo[i]},
                            {"bin_hi", p.bin_hi[i]},
                            {"count", p.counts[i]},
                            {"sup_k", p.sup_k[i]},
                            {"rectified_sup", p.rectified[i]}});
        ordered_json doc;
        doc["command"] = "profile";
        doc["version"] = kVersion;
        doc["config"] = {{"domain", domain_json(spec)},
                         {"samples", cfg.samples},
                         {"bins", cfg.bins},
                         {"seed", cfg.seed},
                         {"axis", cfg.axis},
                         {"region", {{"lo", json_array(region.lo)}, {"hi", json_array(region.hi)}}},
                         {"tol", cfg.tol}};
        doc["accepted"] = p.accepted;
        doc["rejected"] = p.rejected;
        doc["bins"] = bins;
        emit_text(dump_json_17(doc) + "\n", cfg.out);
    }
    return 0;
}

// ---- sequence ------------------------------------------------------------------

int cmd_sequence(const CliConfig& cfg) {
    if (cfg.example == "comb") {
        const auto rows = comb_growth(cfg.n_max, cfg.samples, cfg.seed, cfg.tol, cfg.threads);
        if (cfg.format == "csv") {
            std::string out = preamble(
                "command=sequence example=comb k_max=" + std::to_string(cfg.n_max) +
                " samples=" + std::to_string(cfg.samples) + " seed=" + std::to_string(cfg.seed) +
                " tol=" + fmt17(cfg.tol));
            out += "k,c_hat\n";
            for (const auto& r : rows) out += std::to_string(r.k) + "," + fmt17(r.c_hat) + "\n";
            emit_text(out, cfg.out);
        } else {
            ordered_json jrows = ordered_json::array();
            for (const auto& r : rows) jrows.push_back({{"k", r.k}, {"c_hat", r.c_hat}});
            ordered_json doc;
            doc["command"] = "sequence";
            doc["version"] = kVersion;
            doc["config"] = {{"example", "comb"},
                             {"k_max", cfg.n_max},
                             {"samples", cfg.samples},
                             {"seed", cfg.seed},
                             {"tol", cfg.tol}};
            doc["rows"] = jrows;
            emit_text(dump_json_17(doc) + "\n", cfg.out);
        }
        return 0;
    }

    SequenceExample example;
    if (cfg.example == "half_strip") {
        example = SequenceExample::half_strip;
    } else if (cfg.example == "exp_cusp") {
        example = SequenceExample::exp_cusp;
    } else if (cfg.example == "revolution") {
        example = SequenceExample::revolution;
    } else {
        throw InvalidSpec("unknown --example: " + cfg.example);
    }

    const SequenceReport rep = divergence_sequence(example, cfg.n_max, cfg.tol);
    if (cfg.format == "csv") {
        std::string out =
            preamble("command=sequence example=" + rep.name + " n_max=" +
                     std::to_string(cfg.n_max) + " tol=" + fmt17(cfg.tol));
        out += sequence_to_csv(rep);
        emit_text(out, cfg.out);
    } else {
        ordered_json jrows = ordered_json::array();
        for (const auto& r : rep.rows)
            jrows.push_back({{"n", r.n},
                             {"j_exact", r.j_exact},
                             {"k_hat", r.k_hat},
                             {"k_err", r.k_err},
                             {"predicted_lower_bound", r.predicted_lower_bound},
                             {"budget_exceeded", r.budget_exceeded}});
        ordered_json doc;
        doc["command"] = "sequence";
        doc["version"] = kVersion;
        doc["config"] = {{"example", rep.name}, {"n_max", cfg.n_max}, {"tol", cfg.tol}};
        doc["rows"] = jrows;
        emit_text(dump_json_17(doc) + "\n", cfg.out);
    }
    return 0;
}

// ---- constants -----------------------------------------------------------------

int cmd_constants(const CliConfig& cfg) {
    const double theta_grid[] = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    const std::pair<double, double> alpha_theta_grid[] = {
        {0.1, 0.1}, {0.2, 0.3}, {0.3, 0.5}, {0.4, 0.7}, {0.5, 0.9},
        {0.6, 0.2}, {0.7, 0.4}, {0.8, 0.6}, {0.9, 0.8}};
    const std::pair<int, double> jung_grid[] = {{1, 1.0}, {2, 1.0}, {3, 1.0},
                                                {4, 1.0}, {5, 1.0}, {2, 2.0}};

    if (cfg.format == "csv") {
        std::string out = preamble("command=constants");
        out += "name,arg1,arg2,value\n";
        for (double t : theta_grid)
            out += "a_theta," + fmt17(t) + ",," + fmt17(a_theta(t)) + "\n";
        for (const auto& [a, t] : alpha_theta_grid)
            out += "a_alpha_theta," + fmt17(a) + "," + fmt17(t) + "," +
                   fmt17(a_alpha_theta(a, t)) + "\n";
        for (const auto& [n, d] : jung_grid)
            out += "jung_radius," + std::to_string(n) + "," + fmt17(d) + "," +
                   fmt17(jung_radius(n, d)) + "\n";
        emit_text(out, cfg.out);
    } else {
        ordered_json ja = ordered_json::array(), jat = ordered_json::array(),
                     jj = ordered_json::array();
        for (double t : theta_grid) ja.push_back({{"theta", t}, {"value", a_theta(t)}});
        for (const auto& [a, t] : alpha_theta_grid)
            jat.push_back({{"alpha", a}, {"theta", t}, {"value", a_alpha_theta(a, t)}});
        for (const auto& [n, d] : jung_grid)
            jj.push_back({{"n", n}, {"diam", d}, {"value", jung_radius(n, d)}});
        ordered_json doc;
        doc["command"] = "constants";
        doc["version"] = kVersion;
        doc["config"] = ordered_json::object();
        doc["a_theta"] = ja;
        doc["a_alpha_theta"] = jat;
        doc["jung_radius"] = jj;
        emit_text(dump_json_17(doc) + "\n", cfg.out);
    }
    return 0;
}

} // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"metric geometry laboratory: quasihyperbolic, distance-ratio, hyperbolic and "
                 "chordal metrics on Euclidean domains"};
    app.name("metriclab");
    app.require_subcommand(1);

    CliConfig dist_cfg, geo_cfg, verify_cfg, profile_cfg, seq_cfg, const_cfg;

    auto* dist = app.add_subcommand("dist", "distance between two points in one metric");
    add_domain_flags(dist, dist_cfg);
    dist->add_option("--points", dist_cfg.points, "pair as \"x1,..;y1,..\"")->required();
    dist->add_option("--metric", dist_cfg.metric, "metric to evaluate")
        ->check(CLI::IsMember({"j", "k", "rho", "q"}));
    dist->add_option("--method", dist_cfg.method, "evaluation method")
        ->check(CLI::IsMember({"auto", "closed", "numeric"}));
    dist_cfg.tol = 1e-3;
    dist->add_option("--tol", dist_cfg.tol, "numeric tolerance");
    add_output_flags(dist, dist_cfg, "json");

    auto* geo = app.add_subcommand("geodesic", "quasihyperbolic geodesic polyline");
    add_domain_flags(geo, geo_cfg);
    geo->add_option("--points", geo_cfg.points, "pair as \"x1,..;y1,..\"")->required();
    geo_cfg.tol = 1e-3;
    geo->add_option("--tol", geo_cfg.tol, "numeric tolerance");
    add_output_flags(geo, geo_cfg, "csv");

    auto* verify = app.add_subcommand("verify", "property-test the inequality catalog");
    verify->add_option("--suite", verify_cfg.suite, "'all' or one bound name");
    verify->add_option("--samples", verify_cfg.samples, "samples per bound");
    verify->add_option("--seed", verify_cfg.seed, "random seed");
    verify_cfg.tol = 1e-2;
    verify->add_option("--tol", verify_cfg.tol, "numeric tolerance");
    verify->add_option("--method", verify_cfg.method, "closed = closed-form bounds only")
        ->check(CLI::IsMember({"auto", "closed", "numeric"}));
    verify->add_option("--threads", verify_cfg.threads, "worker threads (0 = auto)");
    add_output_flags(verify, verify_cfg, "json");

    auto* profile = app.add_subcommand("profile", "empirical growth envelope of k");
    add_domain_flags(profile, profile_cfg);
    profile->add_option("--samples", profile_cfg.samples, "pair count");
    profile->add_option("--bins", profile_cfg.bins, "bin count");
    profile->add_option("--seed", profile_cfg.seed, "random seed");
    profile->add_option("--axis", profile_cfg.axis, "binning axis")
        ->check(CLI::IsMember({"ratio", "j"}));
    profile->add_option("--region", profile_cfg.region, "sampling box \"lo1,..;hi1,..\"");
    profile_cfg.tol = 1e-2;
    profile->add_option("--tol", profile_cfg.tol, "numeric tolerance");
    profile->add_option("--threads", profile_cfg.threads, "worker threads (0 = auto)");
    add_output_flags(profile, profile_cfg, "csv");

    auto* seq = app.add_subcommand("sequence", "divergence sequences and comb growth");
    seq->add_option("--example", seq_cfg.example, "example family")
        ->check(CLI::IsMember({"half_strip", "exp_cusp", "revolution", "comb"}))
        ->required();
    seq->add_option("--n-max", seq_cfg.n_max, "last index (cluster depth for comb)");
    seq_cfg.tol = 1e-2;
    seq->add_option("--tol", seq_cfg.tol, "numeric tolerance");
    seq->add_option("--samples", seq_cfg.samples, "pairs per comb depth (comb only)");
    seq->add_option("--seed", seq_cfg.seed, "random seed (comb only)");
    seq->add_option("--threads", seq_cfg.threads, "worker threads (comb only, 0 = auto)");
    add_output_flags(seq, seq_cfg, "csv");

    auto* consts = app.add_subcommand("constants", "removal-factor and radius constant tables");
    add_output_flags(consts, const_cfg, "csv");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*dist) return cmd_dist(dist_cfg);
        if (*geo) return cmd_geodesic(geo_cfg);
        if (*verify) return cmd_verify(verify_cfg);
        if (*profile) return cmd_profile(profile_cfg);
        if (*seq) return cmd_sequence(seq_cfg);
        if (*consts) return cmd_constants(const_cfg);
        std::cerr << "error: no command given\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

int run_cli(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.push_back("metriclab");
    for (const auto& a : args) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

} // namespace metriclab

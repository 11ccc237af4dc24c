#include "metriclab/domain.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "metriclab/jsonio.hpp"
#include "metriclab/rng.hpp"

namespace metriclab {
namespace {

using nlohmann::ordered_json;

constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------- primitives

// Even-odd ray casting; boundary points may land on either side, which is
// harmless because callers treat edge distance 0 as "not interior".
bool poly_contains(const std::vector<Point>& v, double px, double py) {
    bool in = false;
    const size_t n = v.size();
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        const double yi = v[i][1], yj = v[j][1];
        if ((yi > py) != (yj > py)) {
            const double xint = v[i][0] + (py - yi) * (v[j][0] - v[i][0]) / (yj - yi);
            if (px < xint) in = !in;
        }
    }
    return in;
}

double poly_edge_dist(const std::vector<Point>& v, double px, double py) {
    const Point p{px, py};
    double best = kInf;
    const size_t n = v.size();
    for (size_t i = 0, j = n - 1; i < n; j = i++)
        best = std::min(best, dist_to_segment(p, v[j], v[i]));
    return best;
}

double poly_signed_area(const std::vector<Point>& v) {
    double a = 0.0;
    const size_t n = v.size();
    for (size_t i = 0, j = n - 1; i < n; j = i++)
        a += v[j][0] * v[i][1] - v[i][0] * v[j][1];
    return 0.5 * a;
}

// Strict interior test for a (possibly clockwise) triangle.
bool tri_contains_strict(const Point& a, const Point& b, const Point& c, double px, double py) {
    auto cross = [&](const Point& u, const Point& w) {
        return (w[0] - u[0]) * (py - u[1]) - (w[1] - u[1]) * (px - u[0]);
    };
    const double d1 = cross(a, b), d2 = cross(b, c), d3 = cross(c, a);
    return (d1 > 0 && d2 > 0 && d3 > 0) || (d1 < 0 && d2 < 0 && d3 < 0);
}

// ------------------------------------------------------------------- oracles

class BallDomain final : public DomainOracle {
public:
    BallDomain(DomainSpec s, Point c, double r)
        : DomainOracle(std::move(s), static_cast<int>(c.size())), c_(std::move(c)), r_(r) {}

    std::optional<Box> bounding_box() const override {
        Box b{c_, c_};
        for (size_t i = 0; i < c_.size(); ++i) {
            b.lo[i] -= r_;
            b.hi[i] += r_;
        }
        return b;
    }
    std::optional<double> diameter() const override { return 2.0 * r_; }

protected:
    double delta_impl(std::span<const double> x) const override {
        return std::max(0.0, r_ - dist(x, c_));
    }

private:
    Point c_;
    double r_;
};

class HalfSpaceDomain final : public DomainOracle {
public:
    HalfSpaceDomain(DomainSpec s, int dim) : DomainOracle(std::move(s), dim) {}

protected:
    double delta_impl(std::span<const double> x) const override {
        return std::max(0.0, x[x.size() - 1]);
    }
};

class PuncturedSpaceDomain final : public DomainOracle {
public:
    PuncturedSpaceDomain(DomainSpec s, Point c)
        : DomainOracle(std::move(s), static_cast<int>(c.size())), c_(std::move(c)) {}

protected:
    double delta_impl(std::span<const double> x) const override { return dist(x, c_); }

private:
    Point c_;
};

class ComplementClosedBallDomain final : public DomainOracle {
public:
    ComplementClosedBallDomain(DomainSpec s, Point c, double r)
        : DomainOracle(std::move(s), static_cast<int>(c.size())), c_(std::move(c)), r_(r) {}

protected:
    double delta_impl(std::span<const double> x) const override {
        return std::max(0.0, dist(x, c_) - r_);
    }

private:
    Point c_;
    double r_;
};

// S = {x1 > 0, |x2| < w}; complement form is R^2 minus the closure of S.
class HalfStripDomain final : public DomainOracle {
public:
    HalfStripDomain(DomainSpec s, double w, bool complement)
        : DomainOracle(std::move(s), 2), w_(w), comp_(complement) {}

protected:
    double delta_impl(std::span<const double> x) const override {
        if (!comp_) {
            if (x[0] <= 0.0 || std::abs(x[1]) >= w_) return 0.0;
            return std::min(x[0], w_ - std::abs(x[1]));
        }
        const double dx = std::max(0.0, -x[0]);
        const double dy = std::max(0.0, std::abs(x[1]) - w_);
        return std::hypot(dx, dy);
    }

private:
    double w_;
    bool comp_;
};

// Distance from p to the curve s -> (s, sign * a * exp(-1-s)), s >= 0.
// Coarse scan plus golden-section polish; the objective is smooth with at
// most a couple of local minima on the bracketed window.
double cusp_curve_dist(double a, int sign, double px, double py) {
    auto f = [&](double s) {
        const double dy = py - sign * a * std::exp(-1.0 - s);
        const double dx = s - px;
        return dx * dx + dy * dy;
    };
    const double hi = std::max(1.0, px + std::abs(py) + a) + 2.0;
    const int n = 600;
    double best_s = 0.0, best_f = f(0.0);
    for (int i = 1; i <= n; ++i) {
        const double s = hi * i / n;
        const double fs = f(s);
        if (fs < best_f) {
            best_f = fs;
            best_s = s;
        }
    }
    double lo_b = std::max(0.0, best_s - hi / n), hi_b = std::min(hi, best_s + hi / n);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = hi_b - gr * (hi_b - lo_b), d = lo_b + gr * (hi_b - lo_b);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 140 && hi_b - lo_b > 1e-15 * (1.0 + hi_b); ++it) {
        if (fc < fd) {
            hi_b = d;
            d = c;
            fd = fc;
            c = hi_b - gr * (hi_b - lo_b);
            fc = f(c);
        } else {
            lo_b = c;
            c = d;
            fc = fd;
            d = lo_b + gr * (hi_b - lo_b);
            fd = f(d);
        }
    }
    return std::sqrt(std::min(fc, fd));
}

// D = {x1 > 0, |x2| < a*exp(-1-x1)}, a > 0.
class ExpCuspDomain final : public DomainOracle {
public:
    ExpCuspDomain(DomainSpec s, double a) : DomainOracle(std::move(s), 2), a_(a) {}

protected:
    double delta_impl(std::span<const double> x) const override {
        if (x[0] <= 0.0 || std::abs(x[1]) >= a_ * std::exp(-1.0 - x[0])) return 0.0;
        const double up = cusp_curve_dist(a_, +1, x[0], x[1]);
        const double dn = cusp_curve_dist(a_, -1, x[0], x[1]);
        return std::min({x[0], up, dn});
    }

private:
    double a_;
};

// Complement of the closed cusp. scale = 0 degenerates D-bar to the closed
// ray {(u, 0): u >= 0}; this is the realization on which the divergence
// example's constants are exact (see README).
class ExpCuspComplementDomain final : public DomainOracle {
public:
    ExpCuspComplementDomain(DomainSpec s, double a) : DomainOracle(std::move(s), 2), a_(a) {}

protected:
    double delta_impl(std::span<const double> x) const override {
        if (a_ == 0.0) {
            if (x[0] >= 0.0) return std::abs(x[1]);
            return std::hypot(x[0], x[1]);
        }
        if (x[0] >= 0.0 && std::abs(x[1]) <= a_ * std::exp(-1.0 - x[0])) return 0.0;
        const double up = cusp_curve_dist(a_, +1, x[0], x[1]);
        const double dn = cusp_curve_dist(a_, -1, x[0], x[1]);
        const double e = a_ * std::exp(-1.0);
        const Point p{x[0], x[1]}, s0{0.0, -e}, s1{0.0, e};
        return std::min({up, dn, dist_to_segment(p, s0, s1)});
    }

private:
    double a_;
};

class RectangleDomain final : public DomainOracle {
public:
    RectangleDomain(DomainSpec s, Point lo, Point hi)
        : DomainOracle(std::move(s), static_cast<int>(lo.size())), lo_(std::move(lo)), hi_(std::move(hi)) {}

    std::optional<Box> bounding_box() const override { return Box{lo_, hi_}; }
    std::optional<double> diameter() const override { return dist(lo_, hi_); }

protected:
    double delta_impl(std::span<const double> x) const override {
        double d = kInf;
        for (size_t i = 0; i < lo_.size(); ++i) {
            d = std::min(d, std::min(x[i] - lo_[i], hi_[i] - x[i]));
            if (d <= 0.0) return 0.0;
        }
        return d;
    }

private:
    Point lo_, hi_;
};

class PolygonDomain final : public DomainOracle {
public:
    PolygonDomain(DomainSpec s, std::vector<Point> v)
        : DomainOracle(std::move(s), 2), v_(std::move(v)) {}

    std::optional<Box> bounding_box() const override {
        Box b{v_[0], v_[0]};
        for (const auto& p : v_)
            for (int i = 0; i < 2; ++i) {
                b.lo[static_cast<size_t>(i)] = std::min(b.lo[static_cast<size_t>(i)], p[static_cast<size_t>(i)]);
                b.hi[static_cast<size_t>(i)] = std::max(b.hi[static_cast<size_t>(i)], p[static_cast<size_t>(i)]);
            }
        return b;
    }
    std::optional<double> diameter() const override {
        double d = 0.0;
        for (size_t i = 0; i < v_.size(); ++i)
            for (size_t j = i + 1; j < v_.size(); ++j) d = std::max(d, dist(v_[i], v_[j]));
        return d;
    }

protected:
    double delta_impl(std::span<const double> x) const override {
        if (!poly_contains(v_, x[0], x[1])) return 0.0;
        return poly_edge_dist(v_, x[0], x[1]);
    }

private:
    std::vector<Point> v_;
};

// Staircase tower: union over m = 1..M of {|x| < 1/(1+log m), 0 < y < m*e/10},
// materialized as one explicit polygon.
std::vector<Point> staircase_polygon(int m_max) {
    auto w = [](int m) { return 1.0 / (1.0 + std::log(static_cast<double>(m))); };
    auto h = [](int m) { return static_cast<double>(m) * std::exp(1.0) / 10.0; };
    std::vector<Point> v;
    v.push_back({w(1), 0.0});
    for (int m = 1; m < m_max; ++m) {
        v.push_back({w(m), h(m)});
        v.push_back({w(m + 1), h(m)});
    }
    v.push_back({w(m_max), h(m_max)});
    v.push_back({-w(m_max), h(m_max)});
    for (int m = m_max - 1; m >= 1; --m) {
        v.push_back({-w(m + 1), h(m)});
        v.push_back({-w(m), h(m)});
    }
    v.push_back({-w(1), 0.0});
    return v;
}

class AnnulusDomain final : public DomainOracle {
public:
    AnnulusDomain(DomainSpec s, Point c, double rin, double rout)
        : DomainOracle(std::move(s), static_cast<int>(c.size())), c_(std::move(c)), rin_(rin), rout_(rout) {}

    std::optional<Box> bounding_box() const override {
        Box b{c_, c_};
        for (size_t i = 0; i < c_.size(); ++i) {
            b.lo[i] -= rout_;
            b.hi[i] += rout_;
        }
        return b;
    }
    std::optional<double> diameter() const override { return 2.0 * rout_; }

protected:
    double delta_impl(std::span<const double> x) const override {
        const double r = dist(x, c_);
        return std::max(0.0, std::min(r - rin_, rout_ - r));
    }

private:
    Point c_;
    double rin_, rout_;
};

// Solid of revolution of a cross-section triangle (first coordinate radial
// distance >= 0, second coordinate height) about the last axis of R^3.
// delta reduces exactly to 2D point-triangle distance in the cross-section.
class RevolvedTriangleDomain final : public DomainOracle {
public:
    RevolvedTriangleDomain(DomainSpec s, std::vector<Point> tri, bool complement)
        : DomainOracle(std::move(s), 3), tri_(std::move(tri)), comp_(complement) {}

    std::optional<Box> bounding_box() const override {
        if (comp_) return std::nullopt;
        double rmax = 0.0, hlo = kInf, hhi = -kInf;
        for (const auto& p : tri_) {
            rmax = std::max(rmax, p[0]);
            hlo = std::min(hlo, p[1]);
            hhi = std::max(hhi, p[1]);
        }
        return Box{{-rmax, -rmax, hlo}, {rmax, rmax, hhi}};
    }

protected:
    double delta_impl(std::span<const double> x) const override {
        const double rho = std::hypot(x[0], x[1]);
        const double h = x[2];
        const bool inside = tri_contains_strict(tri_[0], tri_[1], tri_[2], rho, h);
        if (comp_ ? inside : !inside) return 0.0;
        const double d = poly_edge_dist(tri_, rho, h);
        return comp_ ? d : d; // both sides measure distance to the revolved surface
    }

private:
    std::vector<Point> tri_;
    bool comp_;
};

class RemovePointsDomain final : public DomainOracle {
public:
    RemovePointsDomain(DomainSpec s, Domain base, std::vector<Point> pts)
        : DomainOracle(std::move(s), base->dimension()), base_(std::move(base)), pts_(std::move(pts)) {}

    std::optional<Box> bounding_box() const override { return base_->bounding_box(); }
    std::optional<double> diameter() const override { return base_->diameter(); }

protected:
    double delta_impl(std::span<const double> x) const override {
        double d = base_->delta(x);
        for (const auto& p : pts_) {
            if (d <= 0.0) return 0.0;
            d = std::min(d, dist(x, p));
        }
        return d;
    }

private:
    Domain base_;
    std::vector<Point> pts_;
};

class RemoveClosedBallDomain final : public DomainOracle {
public:
    RemoveClosedBallDomain(DomainSpec s, Domain base, Point c, double r)
        : DomainOracle(std::move(s), base->dimension()), base_(std::move(base)), c_(std::move(c)), r_(r) {}

    std::optional<Box> bounding_box() const override { return base_->bounding_box(); }
    std::optional<double> diameter() const override { return base_->diameter(); }

protected:
    double delta_impl(std::span<const double> x) const override {
        const double db = base_->delta(x);
        if (db <= 0.0) return 0.0;
        return std::max(0.0, std::min(db, dist(x, c_) - r_));
    }

private:
    Domain base_;
    Point c_;
    double r_;
};

class RemovePolygonSetDomain final : public DomainOracle {
public:
    RemovePolygonSetDomain(DomainSpec s, Domain base, std::vector<Point> v)
        : DomainOracle(std::move(s), 2), base_(std::move(base)), v_(std::move(v)) {}

    std::optional<Box> bounding_box() const override { return base_->bounding_box(); }
    std::optional<double> diameter() const override { return base_->diameter(); }

protected:
    double delta_impl(std::span<const double> x) const override {
        const double db = base_->delta(x);
        if (db <= 0.0) return 0.0;
        const double de = poly_contains(v_, x[0], x[1]) ? 0.0 : poly_edge_dist(v_, x[0], x[1]);
        return std::min(db, de);
    }

private:
    Domain base_;
    std::vector<Point> v_;
};

// Unit-side square (-1,1)^2 with 4-point clusters removed along the diagonal:
// cluster m = 0..k sits at (c_m, c_m), c_m = 1 - 2^-m, with axis-aligned
// offsets 2^-(m + n_offset).
std::vector<Point> comb_points(int k, int n_offset) {
    std::vector<Point> pts;
    for (int m = 0; m <= k; ++m) {
        const double c = 1.0 - std::ldexp(1.0, -m);
        const double o = std::ldexp(1.0, -(m + n_offset));
        pts.push_back({c + o, c});
        pts.push_back({c - o, c});
        pts.push_back({c, c + o});
        pts.push_back({c, c - o});
    }
    return pts;
}

// ----------------------------------------------------------- JSON conversion

Point parse_point(const ordered_json& j, const char* what) {
    if (!j.is_array() || j.empty()) throw InvalidSpec(std::string(what) + " must be a nonempty array");
    Point p;
    for (const auto& c : j) {
        if (!c.is_number()) throw InvalidSpec(std::string(what) + " must contain numbers");
        p.push_back(c.get<double>());
    }
    return p;
}

std::vector<Point> parse_points(const ordered_json& j, const char* what) {
    if (!j.is_array()) throw InvalidSpec(std::string(what) + " must be an array of points");
    std::vector<Point> v;
    for (const auto& e : j) v.push_back(parse_point(e, what));
    return v;
}

DomainSpec spec_from_json(const ordered_json& j) {
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
        throw InvalidSpec("domain spec must be an object with a \"kind\" string");
    DomainSpec s;
    s.kind = j["kind"].get<std::string>();
    ordered_json p = j.contains("params") ? j["params"] : ordered_json::object();
    if (!p.is_object()) throw InvalidSpec("\"params\" must be an object");

    auto num = [&](const char* k, double dflt) {
        return p.contains(k) ? p[k].get<double>() : dflt;
    };
    auto integer = [&](const char* k, int dflt) {
        return p.contains(k) ? p[k].get<int>() : dflt;
    };

    if (p.contains("center")) s.center = parse_point(p["center"], "center");
    s.radius = num("radius", 0.0);
    s.r_inner = num("r_inner", 0.0);
    s.r_outer = num("r_outer", 0.0);
    s.dim = integer("dim", s.center.empty() ? 2 : static_cast<int>(s.center.size()));
    s.half_width = num("half_width", 1.0);
    if (p.contains("complement")) s.complement = p["complement"].get<bool>();
    s.scale = num("scale", s.kind == "exp_cusp_complement" ? 0.0 : 1.0);
    if (p.contains("lo")) s.lo = parse_point(p["lo"], "lo");
    if (p.contains("hi")) s.hi = parse_point(p["hi"], "hi");
    if (p.contains("vertices")) s.vertices = parse_points(p["vertices"], "vertices");
    s.m_max = integer("m_max", 8);
    s.comb_k = integer("k", 6);
    s.comb_n_offset = integer("n_offset", 2);
    if (p.contains("points")) s.removed_points = parse_points(p["points"], "points");
    if (j.contains("base")) s.base = std::make_shared<DomainSpec>(spec_from_json(j["base"]));
    return s;
}

ordered_json spec_to_json(const DomainSpec& s) {
    ordered_json p = ordered_json::object();
    const std::string& k = s.kind;
    auto points_json = [](const std::vector<Point>& pts) {
        ordered_json a = ordered_json::array();
        for (const auto& q : pts) a.push_back(q);
        return a;
    };
    if (k == "ball" || k == "complement_closed_ball") {
        p["center"] = s.center;
        p["radius"] = s.radius;
    } else if (k == "half_space") {
        p["dim"] = s.dim;
    } else if (k == "punctured_space") {
        p["center"] = s.center;
    } else if (k == "half_strip") {
        p["half_width"] = s.half_width;
        p["complement"] = s.complement;
    } else if (k == "exp_cusp" || k == "exp_cusp_complement") {
        p["scale"] = s.scale;
    } else if (k == "rectangle") {
        p["lo"] = s.lo;
        p["hi"] = s.hi;
    } else if (k == "polygon" || k == "remove_polygon_set") {
        p["vertices"] = points_json(s.vertices);
    } else if (k == "polygon_union") {
        p["m_max"] = s.m_max;
    } else if (k == "annulus") {
        p["center"] = s.center;
        p["r_inner"] = s.r_inner;
        p["r_outer"] = s.r_outer;
    } else if (k == "revolved_triangle") {
        p["vertices"] = points_json(s.vertices);
        p["complement"] = s.complement;
    } else if (k == "comb_square") {
        p["k"] = s.comb_k;
        p["n_offset"] = s.comb_n_offset;
    } else if (k == "remove_points") {
        p["points"] = points_json(s.removed_points);
    } else if (k == "remove_closed_ball") {
        p["center"] = s.center;
        p["radius"] = s.radius;
    }
    ordered_json j;
    j["kind"] = k;
    j["params"] = p;
    if (s.base) j["base"] = spec_to_json(*s.base);
    return j;
}

void require(bool ok, const std::string& msg) {
    if (!ok) throw InvalidSpec(msg);
}

} // namespace

DomainSpec DomainSpec::from_json_text(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const std::exception& e) {
        throw InvalidSpec(std::string("domain spec is not valid JSON: ") + e.what());
    }
    try {
        return spec_from_json(j);
    } catch (const InvalidSpec&) {
        throw;
    } catch (const std::exception& e) {
        throw InvalidSpec(std::string("domain spec malformed: ") + e.what());
    }
}

DomainSpec DomainSpec::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open domain spec file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

std::string DomainSpec::to_json_text() const { return dump_json_17(spec_to_json(*this), 0); }

Domain make_domain(const DomainSpec& spec) {
    const std::string& k = spec.kind;

    if (k == "ball") {
        require(!spec.center.empty(), "ball: center required");
        require(spec.radius > 0.0, "ball: radius must be positive");
        return std::make_shared<BallDomain>(spec, spec.center, spec.radius);
    }
    if (k == "half_space") {
        require(spec.dim >= 1, "half_space: dim must be >= 1");
        return std::make_shared<HalfSpaceDomain>(spec, spec.dim);
    }
    if (k == "punctured_space") {
        Point c = spec.center;
        if (c.empty()) {
            require(spec.dim >= 1, "punctured_space: dim must be >= 1");
            c.assign(static_cast<size_t>(spec.dim), 0.0);
        }
        DomainSpec s = spec;
        s.center = c;
        return std::make_shared<PuncturedSpaceDomain>(s, c);
    }
    if (k == "complement_closed_ball") {
        require(!spec.center.empty(), "complement_closed_ball: center required");
        require(spec.radius > 0.0, "complement_closed_ball: radius must be positive");
        return std::make_shared<ComplementClosedBallDomain>(spec, spec.center, spec.radius);
    }
    if (k == "half_strip") {
        require(spec.half_width > 0.0, "half_strip: half_width must be positive");
        return std::make_shared<HalfStripDomain>(spec, spec.half_width, spec.complement);
    }
    if (k == "exp_cusp") {
        require(spec.scale > 0.0, "exp_cusp: scale must be positive (the set is empty otherwise)");
        return std::make_shared<ExpCuspDomain>(spec, spec.scale);
    }
    if (k == "exp_cusp_complement") {
        require(spec.scale >= 0.0, "exp_cusp_complement: scale must be >= 0");
        return std::make_shared<ExpCuspComplementDomain>(spec, spec.scale);
    }
    if (k == "rectangle") {
        require(!spec.lo.empty() && spec.lo.size() == spec.hi.size(), "rectangle: lo/hi must match");
        for (size_t i = 0; i < spec.lo.size(); ++i)
            require(spec.hi[i] > spec.lo[i], "rectangle: hi must exceed lo on every axis");
        return std::make_shared<RectangleDomain>(spec, spec.lo, spec.hi);
    }
    if (k == "polygon") {
        require(spec.vertices.size() >= 3, "polygon: at least 3 vertices");
        for (const auto& v : spec.vertices) require(v.size() == 2, "polygon: vertices must be 2D");
        require(std::abs(poly_signed_area(spec.vertices)) > 0.0, "polygon: degenerate (zero area)");
        return std::make_shared<PolygonDomain>(spec, spec.vertices);
    }
    if (k == "polygon_union") {
        require(spec.m_max >= 1 && spec.m_max <= 64, "polygon_union: m_max must be in [1, 64]");
        DomainSpec s = spec;
        return std::make_shared<PolygonDomain>(s, staircase_polygon(spec.m_max));
    }
    if (k == "annulus") {
        require(!spec.center.empty(), "annulus: center required");
        require(spec.r_inner > 0.0 && spec.r_outer > spec.r_inner,
                "annulus: need 0 < r_inner < r_outer");
        return std::make_shared<AnnulusDomain>(spec, spec.center, spec.r_inner, spec.r_outer);
    }
    if (k == "revolved_triangle") {
        std::vector<Point> tri = spec.vertices;
        if (tri.empty()) tri = {{1.0, -1.0}, {0.0, 0.0}, {1.0, 1.0}};
        require(tri.size() == 3, "revolved_triangle: exactly 3 cross-section vertices");
        for (const auto& v : tri) {
            require(v.size() == 2, "revolved_triangle: vertices must be 2D (radial, height)");
            require(v[0] >= 0.0, "revolved_triangle: radial coordinates must be >= 0");
        }
        require(std::abs(poly_signed_area(tri)) > 0.0, "revolved_triangle: degenerate triangle");
        DomainSpec s = spec;
        s.vertices = tri;
        return std::make_shared<RevolvedTriangleDomain>(s, tri, spec.complement);
    }
    if (k == "comb_square") {
        require(spec.comb_k >= 0, "comb_square: k must be >= 0");
        require(spec.comb_n_offset >= 1, "comb_square: n_offset must be >= 1");
        DomainSpec base;
        base.kind = "rectangle";
        base.lo = {-1.0, -1.0};
        base.hi = {1.0, 1.0};
        Domain sq = make_domain(base);
        return std::make_shared<RemovePointsDomain>(spec, sq, comb_points(spec.comb_k, spec.comb_n_offset));
    }
    if (k == "remove_points") {
        require(spec.base != nullptr, "remove_points: base domain required");
        Domain base = make_domain(*spec.base);
        require(!spec.removed_points.empty(), "remove_points: at least one point");
        for (const auto& pt : spec.removed_points) {
            require(static_cast<int>(pt.size()) == base->dimension(),
                    "remove_points: point dimension must match base");
            require(base->delta(pt) > 0.0, "remove_points: removed point must lie strictly inside the base");
        }
        return std::make_shared<RemovePointsDomain>(spec, base, spec.removed_points);
    }
    if (k == "remove_closed_ball") {
        require(spec.base != nullptr, "remove_closed_ball: base domain required");
        require(spec.radius > 0.0, "remove_closed_ball: radius must be positive");
        Domain base = make_domain(*spec.base);
        require(static_cast<int>(spec.center.size()) == base->dimension(),
                "remove_closed_ball: center dimension must match base");
        require(base->delta(spec.center) > spec.radius,
                "remove_closed_ball: closed ball must lie strictly inside the base");
        return std::make_shared<RemoveClosedBallDomain>(spec, base, spec.center, spec.radius);
    }
    if (k == "remove_polygon_set") {
        require(spec.base != nullptr, "remove_polygon_set: base domain required");
        Domain base = make_domain(*spec.base);
        require(base->dimension() == 2, "remove_polygon_set: base must be 2D");
        require(spec.vertices.size() >= 3, "remove_polygon_set: at least 3 vertices");
        for (const auto& v : spec.vertices) require(v.size() == 2, "remove_polygon_set: 2D vertices");
        require(std::abs(poly_signed_area(spec.vertices)) > 0.0, "remove_polygon_set: degenerate polygon");
        const size_t n = spec.vertices.size();
        for (size_t i = 0, j = n - 1; i < n; j = i++) {
            // vertices plus a dense edge sampling must stay strictly inside the base
            for (int t = 0; t <= 256; ++t) {
                const Point q = lerp(spec.vertices[j], spec.vertices[i], t / 256.0);
                require(base->delta(q) > 0.0,
                        "remove_polygon_set: removed polygon must lie strictly inside the base");
            }
        }
        return std::make_shared<RemovePolygonSetDomain>(spec, base, spec.vertices);
    }
    throw InvalidSpec("unknown domain kind: " + k);
}

Box default_region(const DomainOracle& domain, std::span<const double> x,
                   std::span<const double> y, double inflate) {
    if (auto b = domain.bounding_box()) return *b;
    const size_t n = x.size();
    Point clo(n), chi(n);
    for (size_t i = 0; i < n; ++i) {
        clo[i] = std::min(x[i], y[i]);
        chi[i] = std::max(x[i], y[i]);
    }
    double m = 0.0;
    for (size_t i = 0; i < n; ++i) m = std::max(m, chi[i] - clo[i]);
    if (m == 0.0) m = std::max(1.0, norm(x));
    const double half = 0.5 * m * inflate;
    Box b{Point(n), Point(n)};
    for (size_t i = 0; i < n; ++i) {
        const double c = 0.5 * (clo[i] + chi[i]);
        b.lo[i] = c - half;
        b.hi[i] = c + half;
    }
    return b;
}

Point sample_point(const DomainOracle& domain, uint64_t seed, uint64_t stream, const Box& region) {
    Rng rng = Rng::stream(seed, stream);
    const size_t n = region.lo.size();
    Point p(n);
    for (int tries = 0; tries < 1'000'000; ++tries) {
        for (size_t i = 0; i < n; ++i) p[i] = rng.uniform(region.lo[i], region.hi[i]);
        if (domain.delta(p) > 0.0) return p;
    }
    throw SamplingExhausted("acceptance rate below 1e-6 sampling domain '" + domain.spec().kind +
                            "' in the given region");
}

std::vector<std::pair<Point, Point>> sample_pairs(const DomainOracle& domain, size_t count,
                                                  uint64_t seed, const Box& region) {
    if (static_cast<int>(region.lo.size()) != domain.dimension())
        throw DimensionMismatch("sampling region dimension does not match domain");
    std::vector<std::pair<Point, Point>> out;
    out.reserve(count);
    for (size_t i = 0; i < count; ++i)
        out.emplace_back(sample_point(domain, seed, 2 * i, region),
                         sample_point(domain, seed, 2 * i + 1, region));
    return out;
}

} // namespace metriclab

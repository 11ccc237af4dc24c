#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "metriclab/errors.hpp"
#include "metriclab/point.hpp"

namespace metriclab {

// ----------------------------------------------------------------------------
// Domain specification: a serializable description of one domain from the
// catalog. `params` are kind-specific; removal kinds carry a `base` spec.
//
// JSON form: {"kind": "<kind>", "params": {...}, "base": {...}}   (base only
// for remove_* kinds). One worked example per kind lives in the README.
// ----------------------------------------------------------------------------
struct DomainSpec {
    std::string kind;

    // Kind-specific numeric parameters (flattened; vectors of points are kept
    // as vectors of Points).
    Point center;                      // ball, complement_closed_ball, punctured_space, annulus, remove_closed_ball
    double radius = 0.0;               // ball, complement_closed_ball, remove_closed_ball
    double r_inner = 0.0;              // annulus
    double r_outer = 0.0;              // annulus
    int dim = 2;                       // half_space, punctured_space (when no center given)
    double half_width = 1.0;           // half_strip
    bool complement = false;           // half_strip, revolved_triangle
    double scale = 1.0;                // exp_cusp (>0); exp_cusp_complement (>=0, 0 = degenerate slit)
    Point lo, hi;                      // rectangle
    std::vector<Point> vertices;       // polygon, remove_polygon_set, revolved_triangle (3 cross-section vertices)
    int m_max = 8;                     // polygon_union
    int comb_k = 6;                    // comb_square: clusters m = 0..comb_k
    int comb_n_offset = 2;             // comb_square: cluster m uses offset 2^-(m + comb_n_offset)
    std::vector<Point> removed_points; // remove_points
    std::shared_ptr<DomainSpec> base;  // remove_* kinds

    static DomainSpec from_json_text(const std::string& text);
    static DomainSpec from_json_file(const std::string& path);
    std::string to_json_text() const;
};

// ----------------------------------------------------------------------------
// Domain oracle: immutable, thread-safe evaluator for one domain.
//  - delta(x): exact Euclidean distance from x to the boundary, 0 if x is not
//    in the open set. Always 1-Lipschitz.
//  - contains(x) <=> delta(x) > 0.
// ----------------------------------------------------------------------------
class DomainOracle {
public:
    virtual ~DomainOracle() = default;

    int dimension() const { return dim_; }

    double delta(std::span<const double> x) const {
        check_dim(x);
        return delta_impl(x);
    }

    bool contains(std::span<const double> x) const {
        check_dim(x);
        return delta_impl(x) > 0.0;
    }

    // Tight axis-aligned bounding box for bounded domains; nullopt otherwise.
    virtual std::optional<Box> bounding_box() const { return std::nullopt; }

    // Euclidean diameter for bounded domains; nullopt otherwise.
    virtual std::optional<double> diameter() const {
        if (auto b = bounding_box()) return b->diameter();
        return std::nullopt;
    }

    const DomainSpec& spec() const { return spec_; }

protected:
    DomainOracle(DomainSpec spec, int dim) : spec_(std::move(spec)), dim_(dim) {}

    virtual double delta_impl(std::span<const double> x) const = 0;

    void check_dim(std::span<const double> x) const {
        if (static_cast<int>(x.size()) != dim_)
            throw DimensionMismatch("point has dimension " + std::to_string(x.size()) +
                                    ", domain expects " + std::to_string(dim_));
    }

private:
    DomainSpec spec_;
    int dim_;
};

using Domain = std::shared_ptr<const DomainOracle>;

// Build an oracle from a validated spec. Throws InvalidSpec / DimensionMismatch.
Domain make_domain(const DomainSpec& spec);

// Finite query region that is guaranteed to contain all activity for a pair
// of points: bounded domains use their bounding box; unbounded domains use
// the bounding box of {x, y} inflated by `inflate` (degenerate boxes are
// padded to a positive size).
Box default_region(const DomainOracle& domain, std::span<const double> x,
                   std::span<const double> y, double inflate = 4.0);

// Deterministic rejection sampler: `count` pairs of interior points inside
// region ∩ domain. Pair i depends only on (seed, i), never on thread count or
// evaluation order. Throws SamplingExhausted if the acceptance rate falls
// below 1e-6 (budget: 1e6 tries per point).
std::vector<std::pair<Point, Point>> sample_pairs(const DomainOracle& domain, size_t count,
                                                  uint64_t seed, const Box& region);

// Single interior point for stream k (used by samplers that need extra draws).
Point sample_point(const DomainOracle& domain, uint64_t seed, uint64_t stream, const Box& region);

} // namespace metriclab

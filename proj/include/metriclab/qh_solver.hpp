#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

#include "metriclab/closed_form.hpp"
#include "metriclab/domain.hpp"

namespace metriclab {

// Polyline approximation of a quasihyperbolic geodesic.
struct GeodesicPath {
    std::vector<Point> vertices;
    double k_length = 0.0;     // sum of per-segment quadratures along the polyline
    int refinement_level = 0;  // finest mesh level used
    double final_spacing = 0.0; // target spacing h at that level (0 for closed forms)
    double tol = 0.0;          // tolerance the path was computed at
};

struct SolverOptions {
    int max_levels = 6;            // refinement halves h up to this many times
    size_t max_nodes = 5'000'000;  // per-level node budget
    double quad_rel_tol = 1e-9;    // final path quadrature tolerance
    double edge_quad_rel_tol = 1e-6; // edge-weight quadrature tolerance
    int threads = 0;               // 0 = hardware concurrency (edge weights only)
    int initial_cells = 8;         // level-0 spacing = region extent / initial_cells
    // Dedicated solvers grade refinement toward the query endpoints; shared
    // solvers (one mesh reused for many pairs) use a per-level depth floor.
    bool dedicated = false;
    Point grade_x, grade_y;        // endpoints for dedicated grading
};

// Certified quasihyperbolic length of the straight segment [a, b]: the
// segment is proven to stay inside the domain by a chain of inscribed balls,
// then integrated with adaptive Simpson quadrature (relative tolerance
// rel_tol, subdivision at integrand kinks via recursion).
// Throws SegmentExitsDomain if the segment leaves (or grazes) the boundary.
double segment_k_length(const DomainOracle& domain, std::span<const double> a,
                        std::span<const double> b, double rel_tol = 1e-9);

// Mesh-based upper-bound solver on a fixed region. Immutable after
// construction; safe for concurrent k_upper calls (meshes are built lazily
// under a mutex, queries use private buffers).
class KSolver {
public:
    KSolver(Domain domain, Box region, SolverOptions opt = {});
    ~KSolver();

    // Upper bound on k(x, y) with refinement until |k(h) - k(h/2)| < tol or
    // the level/node budget is reached (flagged via converged = false).
    // error_bound = max(last refinement change, k - j).
    MetricResult k_upper(std::span<const double> x, std::span<const double> y, double tol) const;

    GeodesicPath geodesic(std::span<const double> x, std::span<const double> y, double tol) const;

    const Box& region() const { return region_; }
    const Domain& domain() const { return domain_; }

    struct Impl; // opaque; defined in the implementation file

private:
    std::unique_ptr<Impl> impl_;
    Domain domain_;
    Box region_;
};

// Quasihyperbolic distance with automatic method selection: exact closed
// forms when the configuration matches (radial in a ball, half-space,
// nearest-boundary segment), otherwise the mesh solver with automatic region
// selection (bounded: the domain's bounding box; unbounded: the pair's
// bounding box inflated 4x, doubled until the estimate is stable within tol).
MetricResult k_distance(const DomainOracle& domain, std::span<const double> x,
                        std::span<const double> y, double tol);

// Same selection logic, returning the realizing polyline.
GeodesicPath geodesic(const DomainOracle& domain, std::span<const double> x,
                      std::span<const double> y, double tol);

// Force the numeric backend (used by validation tests).
MetricResult k_distance_numeric(const DomainOracle& domain, std::span<const double> x,
                                std::span<const double> y, double tol);
GeodesicPath geodesic_numeric(const DomainOracle& domain, std::span<const double> x,
                              std::span<const double> y, double tol);

// |k(x, z) + k(z, y) - k(x, y)| for z = path.vertices[z_index]; expected to be
// at most a few tolerances when z lies on a geodesic (k is additive there).
double additivity_check(const DomainOracle& domain, const GeodesicPath& path, size_t z_index);

} // namespace metriclab

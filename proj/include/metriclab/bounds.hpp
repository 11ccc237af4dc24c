#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "metriclab/domain.hpp"
#include "metriclab/point.hpp"
#include "metriclab/qh_solver.hpp"
#include "metriclab/rng.hpp"

namespace metriclab {

// Removal-modulus constants and the Jung circumradius bound.
//
//   a_theta(t)        = 1 + 2/t + pi / (2 log((2+2t)/(2+t))),            t in (0, 1]
//   a_alpha_theta(a,t) = (2+t+a*t)/(t(1-a^2))
//                        + (1+a) pi / (2(1-a) log((2+2t)/(2+t+a*t))),    a in [0,1), t in (0,1]
//   jung_radius(n, d) = sqrt(n/(2n+2)) * d                               n >= 1, d >= 0
//
// a_alpha_theta(0, t) == a_theta(t). All three throw OutOfRange on arguments
// outside the stated ranges.
double a_theta(double theta);
double a_alpha_theta(double alpha, double theta);
double jung_radius(int n, double diam);

// Which metric evaluations a bound check may use.
enum class Backend {
    closed_only,   // exact formulas only; numeric-backed bounds are rejected
    with_numeric,  // mesh-solver upper estimates of k are allowed
};

// Shared per-check resources: domains and mesh solvers built once in
// BoundSpec::prepare and then queried concurrently by worker threads.
// Index assignment is private to each catalog entry.
struct BoundContext {
    std::vector<Domain> domains;
    std::vector<std::shared_ptr<KSolver>> solvers;
    double tol = 1e-2;
    Backend backend = Backend::with_numeric;
};

// One evaluated configuration of a bound. The assertion is
//     lhs <= rhs + slack.
// `params` records the auxiliary sampled scalars (radii, ratios, angles) so a
// violating configuration can be reproduced from the report alone; for purely
// scalar inequalities `x`/`y` stay empty.
struct BoundOutcome {
    Point x;
    Point y;
    std::vector<double> params;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;
};

struct BoundSpec {
    std::string name;
    // The inequality checked, stated with its hypothesis in plain ASCII math.
    // Serialized under the report key "citation".
    std::string statement;
    // How configurations are drawn (documentation; the code is the contract).
    std::string sampling;
    bool needs_numeric = false;
    // Hard cap on evaluated samples for numeric-backed entries (0 = uncapped).
    std::size_t numeric_sample_cap = 0;
    // Builds shared resources once per check_bound call.
    std::function<BoundContext(int threads, double tol, Backend backend)> prepare;
    // Draws one configuration from `rng` and evaluates the assertion; nullopt
    // means the hypothesis was not met (neither a hit nor a violation).
    std::function<std::optional<BoundOutcome>(Rng& rng, BoundContext& ctx)> run;
    // Configurations where the inequality is claimed sharp; |lhs - rhs| at
    // each is that witness's sharpness defect. May be empty.
    std::function<std::vector<BoundOutcome>(BoundContext& ctx)> witnesses;
};

struct BoundViolation {
    std::size_t sample = 0;  // index of the offending sample stream
    Point x;
    Point y;
    std::vector<double> params;
    double lhs = 0.0;
    double rhs = 0.0;
    double defect = 0.0;  // lhs - (rhs + slack), positive by construction
};

struct ViolationReport {
    std::string name;
    std::string statement;
    std::size_t samples = 0;  // configurations evaluated (after any cap)
    std::size_t hits = 0;     // configurations that met the hypothesis
    std::vector<BoundViolation> violations;  // sorted by sample index
    // Minimum over hits of rhs + slack - lhs (how close any sample came).
    double min_margin = std::numeric_limits<double>::infinity();
    // Maximum |lhs - rhs| over the witness configurations (0 when none).
    double max_sharpness_defect = 0.0;
    bool passed() const { return violations.empty(); }
};

// The full catalog in fixed order; every entry is self-describing through
// `statement` and `sampling`.
const std::vector<BoundSpec>& bound_catalog();

// Looks up a catalog entry by name; throws OutOfRange for unknown names.
const BoundSpec& find_bound(const std::string& name);

// Draws `samples` configurations (sample i uses the RNG stream derived from
// (seed, i)), evaluates the bound, and aggregates. The result is identical
// for a fixed (spec, samples, seed, backend, tol) regardless of `threads`
// (0 = hardware concurrency). Throws InvalidSpec when a numeric-backed bound
// is requested with Backend::closed_only and NoHypothesisHits when not a
// single sample met the hypothesis.
ViolationReport check_bound(const BoundSpec& spec, std::size_t samples, std::uint64_t seed,
                            Backend backend, double tol, int threads = 0);

// --- Uniformity-modulus transfer rules -------------------------------------

using Modulus = std::function<double(double)>;

enum class PhiTransferKind {
    bilipschitz,      // L-bilipschitz image:      t -> L^2 phi(L^2 t)
    inversion,        // sphere inversion, image in annulus m <= |x-a| <= M:
                      //                           t -> (M/m)^2 phi(M^2 t / m^2)
    puncture,         // one point removed:        t -> 2 max((pi/log 3) log(1+3t), a(theta/2) phi(3t))
    multi_puncture,   // m separated points:       t -> 2^m a(theta/2)^(m-1)
                      //                                max((pi/log 3) log(1+3t), a(theta/2) phi(3t))
    uniform_removal,  // linear modulus c*t, m separated points removed:
                      //                           t -> 6^m a(theta/2)^m c t
    set_removal,      // compact set inside a theta-ball removed:
                      //                           t -> 4 a(1/4, theta/3) max(phi(30t), phi2(30t))
};

struct PhiTransferInputs {
    double L = 1.0;        // bilipschitz: L >= 1
    double m_inner = 0.0;  // inversion: 0 < m_inner < M_outer
    double M_outer = 0.0;
    double theta = 0.5;    // relative separation, in (0, 1)
    int m_points = 1;      // multi_puncture / uniform_removal: removed points, >= 1
    double c = 1.0;        // uniform_removal: linear coefficient, >= 1
    Modulus phi;           // base modulus: phi(0) = 0, strictly increasing
    Modulus phi2;          // set_removal only: second base modulus
};

// Returns the transferred modulus for `kind`. Parameter ranges are validated
// (OutOfRange on failure) and both the base moduli and the returned function
// are required to vanish at 0 and increase strictly on a fixed 100-point
// grid spanning [0, 10^3].
Modulus phi_transfer(PhiTransferKind kind, const PhiTransferInputs& in);

} // namespace metriclab

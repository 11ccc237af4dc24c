#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "metriclab/domain.hpp"
#include "metriclab/point.hpp"

namespace metriclab {

// ----------------------------------------------------------------------------
// Empirical growth profiling: how fast does the quasihyperbolic distance k
// grow as a function of the normalized separation of a pair?
//
// The profile bins sampled pairs by an axis value t — either the distance
// ratio |x-y|/min(d(x), d(y)) or the value j(x,y) = log(1 + ratio) — and
// records the per-bin supremum of the numeric upper estimate k_hat. Finite
// sampling can only underestimate a supremum, so an empirical envelope that
// stays below a theoretical upper modulus is evidence in the sound direction;
// it can never manufacture a pass for a lower bound.
// ----------------------------------------------------------------------------

enum class ProfileAxis { ratio, j_value };

struct PhiProfile {
    ProfileAxis axis = ProfileAxis::ratio;

    // Log-spaced bin edges spanning the observed axis range; bin i covers
    // [bin_lo[i], bin_hi[i]) except the last, which is closed above.
    std::vector<double> bin_lo;
    std::vector<double> bin_hi;

    std::vector<std::size_t> counts; // per-bin accepted sample counts
    std::vector<double> sup_k;       // raw per-bin sup of k_hat (0 for empty bins)
    std::vector<double> rectified;   // cumulative max of sup_k; nondecreasing

    std::size_t pairs_requested = 0;
    std::size_t accepted = 0; // == sum of counts
    std::size_t rejected = 0; // coincident pairs or min(d) below the floor

    double tol = 0.0;
    std::uint64_t seed = 0;
};

// Rectified envelope evaluated at axis value t: the value of the last bin
// whose lower edge is <= t (0 below the first bin).
double envelope_at(const PhiProfile& profile, double t);

// Samples `pairs` point pairs in region ∩ domain, computes the axis value and
// the numeric upper estimate k_hat for each (one shared solver, queries at
// tolerance tol), and bins the suprema. Deterministic given seed, independent
// of threads. Pairs with min(d) < 1e-6 * diam(region) or x = y are rejected
// and counted. Throws OutOfRange (pairs or bins = 0), SamplingExhausted.
PhiProfile phi_envelope(const Domain& domain, std::size_t pairs, int bins, std::uint64_t seed,
                        ProfileAxis axis, const Box& region, double tol, int threads = 0);

// Max over sampled pairs of k_hat / j — a lower estimate of the uniformity
// constant C in k <= C j (finite sampling; flagged as a lower estimate in all
// reports). Pairs with j = 0 are skipped. The region defaults to the domain's
// bounding box; unbounded domains require an explicit region (OutOfRange).
double uniformity_constant(const Domain& domain, std::size_t pairs, std::uint64_t seed, double tol,
                           const std::optional<Box>& region = std::nullopt, int threads = 0);

// ----------------------------------------------------------------------------
// Divergence sequences: families of pairs with constant j whose k blows up,
// certifying that no modulus phi can dominate k over these domains.
//   half_strip: G = R^2 minus the closed half-strip {x1 > 0, |x2| < 1},
//               z_n = (n, -2), w_n = (n, 2); j = log 5, k >= log(1 + n).
//   exp_cusp:   G = R^2 minus the ray {(s, 0): s >= 0} (the zero-width limit
//               of an exponentially thin cusp), z_n = (n, -e^-n),
//               w_n = (n, e^-n); j = log 3, k >= log(1 + n e^n) > n.
//   revolution: G = R^3 minus the solid of revolution of the triangle
//               (1,-1), (0,0), (1,1) about the last axis, z_t = t e_3 and
//               its mirror -z_t with t = 2^-n; j = log(1 + 2 sqrt(2)),
//               k >= log(1 + sqrt(2)/t).
// ----------------------------------------------------------------------------

enum class SequenceExample { half_strip, exp_cusp, revolution };

struct SequenceRow {
    int n = 0;
    double j_exact = 0.0;
    double k_hat = std::numeric_limits<double>::quiet_NaN();
    double k_err = std::numeric_limits<double>::quiet_NaN();
    double predicted_lower_bound = 0.0;
    bool budget_exceeded = false; // refinement budget hit before tol; row kept
};

struct SequenceReport {
    SequenceExample example = SequenceExample::half_strip;
    std::string name;
    double tol = 0.0;
    std::vector<SequenceRow> rows;
};

// Evaluates the sequence up to index n_max (n_max >= 2; OutOfRange otherwise).
// Budget failures are recorded per row, never thrown.
SequenceReport divergence_sequence(SequenceExample example, int n_max, double tol);

// ----------------------------------------------------------------------------
// Comb growth: the unit square with nested point clusters removed stays
// quasiconvex but its uniformity-constant estimate grows with the cluster
// depth k. Reported as evidence (one row per depth), no threshold asserted.
// ----------------------------------------------------------------------------

struct CombGrowthRow {
    int k = 0;
    double c_hat = 0.0;
};

std::vector<CombGrowthRow> comb_growth(int k_max, std::size_t pairs, std::uint64_t seed, double tol,
                                       int threads = 0);

// ----------------------------------------------------------------------------
// Envelope vs predicted modulus: per-bin margins predicted(t) - envelope(t),
// with the predicted modulus evaluated at the bin's lower edge (conservative
// for increasing moduli) and the envelope taken as the rectified value. Empty
// bins are skipped and counted, never failed. Requires a ratio-axis profile
// (AxisMismatch otherwise) and a callable modulus (OutOfRange).
// ----------------------------------------------------------------------------

struct EnvelopeComparison {
    std::vector<int> bins;       // indices of the nonempty bins compared
    std::vector<double> t;       // evaluation points (bin lower edges)
    std::vector<double> margins; // predicted(t) - rectified envelope
    std::size_t skipped_empty = 0;
    double min_margin = std::numeric_limits<double>::infinity();

    bool pass(double tol) const { return min_margin >= -tol; }
};

EnvelopeComparison envelope_vs_theorem(const PhiProfile& profile,
                                       const std::function<double(double)>& predicted);

// ----------------------------------------------------------------------------
// CSV emitters. Fixed dialect: comma separator, header row, LF line endings,
// '.' decimal separator, floats with 17 significant digits.
// ----------------------------------------------------------------------------

std::string profile_to_csv(const PhiProfile& profile,
                           const std::function<double(double)>& predicted = {});
std::string sequence_to_csv(const SequenceReport& report);

} // namespace metriclab

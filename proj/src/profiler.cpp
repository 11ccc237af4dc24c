#include "metriclab/profiler.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "metriclab/closed_form.hpp"
#include "metriclab/errors.hpp"
#include "metriclab/jsonio.hpp"
#include "metriclab/qh_solver.hpp"

namespace metriclab {

namespace {

// Chunked parallel loop over [0, n); deterministic as long as the body writes
// only to its own index. Exceptions from workers are rethrown once.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body) {
    int nthreads = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    if (nthreads < 1) nthreads = 1;
    const int workers = static_cast<int>(
        std::min<std::size_t>(static_cast<std::size_t>(nthreads), std::max<std::size_t>(n / 4, 1)));

    std::atomic<std::size_t> cursor{0};
    std::exception_ptr first_error;
    std::mutex error_mu;
    auto work = [&] {
        try {
            constexpr std::size_t kChunk = 4;
            for (;;) {
                const std::size_t lo = cursor.fetch_add(kChunk);
                if (lo >= n) break;
                const std::size_t hi = std::min(n, lo + kChunk);
                for (std::size_t i = lo; i < hi; ++i) body(i);
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mu);
            if (!first_error) first_error = std::current_exception();
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);
}

struct PairEval {
    double t = 0.0;   // axis value
    double j = 0.0;   // j(x, y)
    double k = 0.0;   // k_hat
    bool accepted = false;
};

// Shared evaluation pass: sample pairs, compute (axis value, j, k_hat) per
// accepted pair. The min-delta floor keeps refinement budgets bounded.
std::vector<PairEval> evaluate_pairs(const Domain& domain, std::size_t pairs, std::uint64_t seed,
                                     ProfileAxis axis, const Box& region, double tol,
                                     int threads) {
    if (pairs == 0) throw OutOfRange("profiler: pairs must be > 0");
    if (!(tol > 0.0) || !std::isfinite(tol)) throw OutOfRange("profiler: tol must be positive");

    const auto sampled = sample_pairs(*domain, pairs, seed, region);
    const double floor = 1e-6 * region.diameter();

    SolverOptions opt;
    opt.threads = threads;
    KSolver solver(domain, region, opt);

    std::vector<PairEval> evals(sampled.size());
    parallel_for(sampled.size(), threads, [&](std::size_t i) {
        const auto& [x, y] = sampled[i];
        const double dx = domain->delta(x), dy = domain->delta(y);
        const double d = dist(x, y);
        const double dmin = std::min(dx, dy);
        if (d == 0.0 || dmin < floor) return;
        PairEval e;
        e.j = std::log1p(d / dmin);
        e.t = axis == ProfileAxis::ratio ? d / dmin : e.j;
        e.k = solver.k_upper(x, y, tol).value;
        e.accepted = true;
        evals[i] = e;
    });
    return evals;
}

std::string example_name(SequenceExample example) {
    switch (example) {
    case SequenceExample::half_strip: return "half_strip";
    case SequenceExample::exp_cusp: return "exp_cusp";
    case SequenceExample::revolution: return "revolution";
    }
    return "unknown";
}

} // namespace

double envelope_at(const PhiProfile& profile, double t) {
    if (profile.bin_lo.empty() || t < profile.bin_lo.front()) return 0.0;
    const auto it = std::upper_bound(profile.bin_lo.begin(), profile.bin_lo.end(), t);
    const auto idx = static_cast<size_t>(it - profile.bin_lo.begin()) - 1;
    return profile.rectified[idx];
}

PhiProfile phi_envelope(const Domain& domain, std::size_t pairs, int bins, std::uint64_t seed,
                        ProfileAxis axis, const Box& region, double tol, int threads) {
    if (bins <= 0) throw OutOfRange("phi_envelope: bins must be > 0");
    const auto evals = evaluate_pairs(domain, pairs, seed, axis, region, tol, threads);

    PhiProfile p;
    p.axis = axis;
    p.pairs_requested = pairs;
    p.tol = tol;
    p.seed = seed;

    double t_min = std::numeric_limits<double>::infinity();
    double t_max = 0.0;
    for (const auto& e : evals) {
        if (!e.accepted) continue;
        p.accepted++;
        t_min = std::min(t_min, e.t);
        t_max = std::max(t_max, e.t);
    }
    p.rejected = evals.size() - p.accepted;
    if (p.accepted == 0)
        throw SamplingExhausted("phi_envelope: every sampled pair was rejected");
    if (!(t_max > t_min)) t_max = t_min * (1.0 + 1e-9) + 1e-300;

    const double log_lo = std::log(t_min), log_hi = std::log(t_max);
    const size_t nb = static_cast<size_t>(bins);
    p.bin_lo.resize(nb);
    p.bin_hi.resize(nb);
    for (size_t i = 0; i < nb; ++i) {
        p.bin_lo[i] = std::exp(log_lo + (log_hi - log_lo) * static_cast<double>(i) / bins);
        p.bin_hi[i] =
            std::exp(log_lo + (log_hi - log_lo) * static_cast<double>(i + 1) / bins);
    }
    p.bin_lo.front() = t_min;
    p.bin_hi.back() = t_max;

    p.counts.assign(nb, 0);
    p.sup_k.assign(nb, 0.0);
    for (const auto& e : evals) {
        if (!e.accepted) continue;
        auto idx = static_cast<std::ptrdiff_t>(
            std::floor(bins * (std::log(e.t) - log_lo) / (log_hi - log_lo)));
        idx = std::clamp<std::ptrdiff_t>(idx, 0, static_cast<std::ptrdiff_t>(nb) - 1);
        p.counts[static_cast<size_t>(idx)]++;
        p.sup_k[static_cast<size_t>(idx)] = std::max(p.sup_k[static_cast<size_t>(idx)], e.k);
    }
    p.rectified.assign(nb, 0.0);
    double run = 0.0;
    for (size_t i = 0; i < nb; ++i) {
        run = std::max(run, p.sup_k[i]);
        p.rectified[i] = run;
    }
    return p;
}

double uniformity_constant(const Domain& domain, std::size_t pairs, std::uint64_t seed, double tol,
                           const std::optional<Box>& region, int threads) {
    Box box;
    if (region) {
        box = *region;
    } else if (auto b = domain->bounding_box()) {
        box = *b;
    } else {
        throw OutOfRange("uniformity_constant: unbounded domain requires an explicit region");
    }
    const auto evals = evaluate_pairs(domain, pairs, seed, ProfileAxis::ratio, box, tol, threads);
    double c_hat = 0.0;
    std::size_t used = 0;
    for (const auto& e : evals) {
        if (!e.accepted || e.j == 0.0) continue;
        used++;
        c_hat = std::max(c_hat, e.k / e.j);
    }
    if (used == 0)
        throw SamplingExhausted("uniformity_constant: every sampled pair was rejected");
    return c_hat;
}

SequenceReport divergence_sequence(SequenceExample example, int n_max, double tol) {
    if (n_max < 2) throw OutOfRange("divergence_sequence: n_max must be >= 2");
    if (!(tol > 0.0) || !std::isfinite(tol))
        throw OutOfRange("divergence_sequence: tol must be positive");

    DomainSpec spec;
    switch (example) {
    case SequenceExample::half_strip:
        spec.kind = "half_strip";
        spec.half_width = 1.0;
        spec.complement = true;
        break;
    case SequenceExample::exp_cusp:
        spec.kind = "exp_cusp_complement";
        spec.scale = 0.0;
        break;
    case SequenceExample::revolution:
        spec.kind = "revolved_triangle";
        spec.complement = true;
        break;
    }
    const Domain domain = make_domain(spec);

    SequenceReport rep;
    rep.example = example;
    rep.name = example_name(example);
    rep.tol = tol;

    for (int n = 1; n <= n_max; ++n) {
        Point z, w;
        double predicted = 0.0;
        switch (example) {
        case SequenceExample::half_strip: {
            z = {static_cast<double>(n), -2.0};
            w = {static_cast<double>(n), 2.0};
            predicted = std::log1p(static_cast<double>(n));
            break;
        }
        case SequenceExample::exp_cusp: {
            const double h = std::exp(-static_cast<double>(n));
            z = {static_cast<double>(n), -h};
            w = {static_cast<double>(n), h};
            predicted = std::log1p(static_cast<double>(n) * std::exp(static_cast<double>(n)));
            break;
        }
        case SequenceExample::revolution: {
            const double t = std::ldexp(1.0, -n);
            z = {0.0, 0.0, t};
            w = {0.0, 0.0, -t};
            predicted = std::log1p(std::sqrt(2.0) / t);
            break;
        }
        }
        SequenceRow row;
        row.n = n;
        row.j_exact = j_metric(*domain, z, w).value;
        row.predicted_lower_bound = predicted;
        const MetricResult k = k_distance_numeric(*domain, z, w, tol);
        row.k_hat = k.value;
        row.k_err = k.error_bound;
        row.budget_exceeded = !k.converged;
        rep.rows.push_back(row);
    }
    return rep;
}

std::vector<CombGrowthRow> comb_growth(int k_max, std::size_t pairs, std::uint64_t seed, double tol,
                                       int threads) {
    if (k_max < 0) throw OutOfRange("comb_growth: k_max must be >= 0");
    std::vector<CombGrowthRow> rows;
    for (int k = 0; k <= k_max; ++k) {
        DomainSpec spec;
        spec.kind = "comb_square";
        spec.comb_k = k;
        spec.comb_n_offset = 2;
        const Domain domain = make_domain(spec);
        rows.push_back({k, uniformity_constant(domain, pairs, seed, tol, std::nullopt, threads)});
    }
    return rows;
}

EnvelopeComparison envelope_vs_theorem(const PhiProfile& profile,
                                       const std::function<double(double)>& predicted) {
    if (profile.axis != ProfileAxis::ratio)
        throw AxisMismatch("envelope_vs_theorem: profile must be on the ratio axis");
    if (!predicted) throw OutOfRange("envelope_vs_theorem: predicted modulus is required");

    EnvelopeComparison cmp;
    for (size_t i = 0; i < profile.counts.size(); ++i) {
        if (profile.counts[i] == 0) {
            cmp.skipped_empty++;
            continue;
        }
        const double t = profile.bin_lo[i];
        const double margin = predicted(t) - profile.rectified[i];
        cmp.bins.push_back(static_cast<int>(i));
        cmp.t.push_back(t);
        cmp.margins.push_back(margin);
        cmp.min_margin = std::min(cmp.min_margin, margin);
    }
    return cmp;
}

std::string profile_to_csv(const PhiProfile& profile,
                           const std::function<double(double)>& predicted) {
    std::string out = "bin_lo,bin_hi,count,sup_k,rectified_sup";
    if (predicted) out += ",predicted";
    out += "\n";
    for (size_t i = 0; i < profile.counts.size(); ++i) {
        out += fmt17(profile.bin_lo[i]);
        out += ",";
        out += fmt17(profile.bin_hi[i]);
        out += ",";
        out += std::to_string(profile.counts[i]);
        out += ",";
        out += fmt17(profile.sup_k[i]);
        out += ",";
        out += fmt17(profile.rectified[i]);
        if (predicted) {
            out += ",";
            out += fmt17(predicted(profile.bin_lo[i]));
        }
        out += "\n";
    }
    return out;
}

std::string sequence_to_csv(const SequenceReport& report) {
    std::string out = "n,j_exact,k_hat,k_err,predicted_lower_bound\n";
    for (const auto& r : report.rows) {
        out += std::to_string(r.n);
        out += ",";
        out += fmt17(r.j_exact);
        out += ",";
        out += fmt17(r.k_hat);
        out += ",";
        out += fmt17(r.k_err);
        out += ",";
        out += fmt17(r.predicted_lower_bound);
        out += "\n";
    }
    return out;
}

} // namespace metriclab

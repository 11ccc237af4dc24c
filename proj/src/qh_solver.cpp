#include "metriclab/qh_solver.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstring>
#include <limits>
#include <queue>
#include <thread>
#include <unordered_map>

namespace metriclab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// ----------------------------------------------------------------------------
// Certified segment integration.
//
// A straight segment [a, b] is proven to lie inside the domain by walking a
// chain of inscribed balls: from the point at arclength t with distance
// delta_t to the boundary, everything within delta_t is interior, so the walk
// may advance by a fixed fraction of delta_t; the segment is certified once
// delta_t exceeds the remaining length. The chain aborts (and the segment is
// rejected) if delta hits zero or the step budget runs out, so a segment that
// merely grazes the boundary is never accepted.
// ----------------------------------------------------------------------------

// Fast combined certification + Simpson integration of 1/delta along [a, b].
// Uses chain steps of 0.45 * delta so each chunk is integrated once with a
// three-point Simpson rule (relative accuracy ~1e-3, plenty for greedy
// smoothing decisions). Returns nullopt when certification fails.
std::optional<double> quick_k(const DomainOracle& dom, std::span<const double> a,
                              std::span<const double> b, int max_steps = 4096,
                              double step_factor = 0.45) {
    const double len = dist(a, b);
    if (len == 0.0) return 0.0;
    double t = 0.0;
    double da = dom.delta(a);
    if (da <= 0.0) return std::nullopt;
    double total = 0.0;
    for (int iter = 0; iter < max_steps; ++iter) {
        if (da > len - t) {
            const Point pm = lerp(a, b, (t + len) / (2.0 * len));
            const double dm = dom.delta(pm);
            const double db = dom.delta(b);
            if (dm <= 0.0 || db <= 0.0) return std::nullopt;
            total += (len - t) / 6.0 * (1.0 / da + 4.0 / dm + 1.0 / db);
            return total;
        }
        const double s = step_factor * da;
        const Point pm = lerp(a, b, (t + 0.5 * s) / len);
        const Point pn = lerp(a, b, (t + s) / len);
        const double dm = dom.delta(pm);
        const double dn = dom.delta(pn);
        if (dm <= 0.0 || dn <= 0.0) return std::nullopt;
        total += s / 6.0 * (1.0 / da + 4.0 / dm + 1.0 / dn);
        t += s;
        da = dn;
    }
    return std::nullopt;
}

double adaptive_simpson_rec(const DomainOracle& dom, std::span<const double> a,
                            std::span<const double> b, double len, double t0, double t1,
                            double f0, double fm, double f1, double whole, double tol_abs,
                            int depth) {
    const double tm = 0.5 * (t0 + t1);
    const double tl = 0.5 * (t0 + tm), tr = 0.5 * (tm + t1);
    const Point pl = lerp(a, b, tl / len), pr = lerp(a, b, tr / len);
    const double dl = dom.delta(pl), dr = dom.delta(pr);
    if (dl <= 0.0 || dr <= 0.0) return kInf;
    const double fl = 1.0 / dl, fr = 1.0 / dr;
    const double sl = (tm - t0) / 6.0 * (f0 + 4.0 * fl + fm);
    const double sr = (t1 - tm) / 6.0 * (fm + 4.0 * fr + f1);
    const double s2 = sl + sr;
    if (depth <= 0) return s2;
    if (std::abs(s2 - whole) <= 15.0 * tol_abs) return s2 + (s2 - whole) / 15.0;
    return adaptive_simpson_rec(dom, a, b, len, t0, tm, f0, fl, fm, sl, 0.5 * tol_abs, depth - 1) +
           adaptive_simpson_rec(dom, a, b, len, tm, t1, fm, fr, f1, sr, 0.5 * tol_abs, depth - 1);
}

// Certified adaptive-Simpson integral of 1/delta along [a, b]. The inscribed
// ball chain (advance factor 0.95) both certifies the segment and provides
// the initial subdivision, which caps the integrand variation per chunk.
std::optional<double> segment_quad(const DomainOracle& dom, std::span<const double> a,
                                   std::span<const double> b, double rel_tol,
                                   int max_steps = 20000) {
    const double len = dist(a, b);
    if (len == 0.0) return 0.0;
    std::vector<double> ts;
    std::vector<double> fs;
    ts.reserve(16);
    fs.reserve(16);
    double t = 0.0;
    double d = dom.delta(a);
    if (d <= 0.0) return std::nullopt;
    ts.push_back(0.0);
    fs.push_back(1.0 / d);
    bool certified = false;
    for (int iter = 0; iter < max_steps; ++iter) {
        if (d > len - t) {
            certified = true;
            break;
        }
        t += 0.95 * d;
        const Point p = lerp(a, b, t / len);
        d = dom.delta(p);
        if (d <= 0.0) return std::nullopt;
        ts.push_back(t);
        fs.push_back(1.0 / d);
    }
    if (!certified) return std::nullopt;
    const double db = dom.delta(b);
    if (db <= 0.0) return std::nullopt;
    ts.push_back(len);
    fs.push_back(1.0 / db);

    double total = 0.0;
    for (size_t i = 0; i + 1 < ts.size(); ++i) {
        const double t0 = ts[i], t1 = ts[i + 1];
        if (t1 <= t0) continue;
        const double tm = 0.5 * (t0 + t1);
        const Point pm = lerp(a, b, tm / len);
        const double dm = dom.delta(pm);
        if (dm <= 0.0) return std::nullopt;
        const double fm = 1.0 / dm;
        const double s0 = (t1 - t0) / 6.0 * (fs[i] + 4.0 * fm + fs[i + 1]);
        const double tol_abs = rel_tol * std::max(std::abs(s0), 1e-300);
        const double v = adaptive_simpson_rec(dom, a, b, len, t0, t1, fs[i], fm, fs[i + 1], s0,
                                              tol_abs, 48);
        if (!std::isfinite(v)) return std::nullopt;
        total += v;
    }
    return total;
}

// ----------------------------------------------------------------------------
// Boundary-adapted corner mesh.
//
// The query region's bounding cube is split by a quadtree/octree; a cell of
// size s splits while s exceeds its local target. Interior cells target
// min(h, delta/4) (h = the level's uniform spacing), so spacing shrinks
// linearly toward the boundary; exterior cells stop at h. Dedicated solvers
// additionally relax the target away from the query endpoints (cells at
// distance d from both endpoints may have size ~d/4), which keeps single-pair
// meshes small on large regions. Graph nodes are the leaf CORNERS with
// delta > 0: corners are nested across levels, so refining the mesh never
// removes a node and the shortest-path value can only improve.
// ----------------------------------------------------------------------------

struct Mesh {
    int dim = 2;
    int D = 0;              // corner resolution: integer coords in [0, 2^D]
    double h = 0.0;         // level target spacing
    Point root_lo;          // bounding cube low corner
    double unit = 0.0;      // world size of one integer unit (= side / 2^D)
    std::vector<double> coords;   // n * dim
    std::vector<double> delta;    // n
    std::vector<double> nsize;    // n, min incident leaf size (world units)
    std::vector<uint32_t> adj_off;
    std::vector<uint32_t> adj_to;
    std::vector<double> adj_w;
    double bucket = 0.0;
    std::unordered_map<uint64_t, std::vector<uint32_t>> buckets;

    size_t n_nodes() const { return delta.size(); }

    std::span<const double> node(uint32_t i) const {
        return {coords.data() + static_cast<size_t>(i) * dim, static_cast<size_t>(dim)};
    }

    uint64_t bucket_key(std::span<const double> p) const {
        uint64_t k = 0;
        for (int ax = 0; ax < dim; ++ax) {
            double v = (p[static_cast<size_t>(ax)] - root_lo[static_cast<size_t>(ax)]) / bucket;
            int64_t c = static_cast<int64_t>(std::floor(v));
            c = std::clamp<int64_t>(c, 0, (1 << 20) - 1);
            k = (k << 21) | static_cast<uint64_t>(c);
        }
        return k;
    }
};

uint64_t pack_key(int dim, int D, const uint32_t* c) {
    if (dim == 2) return (static_cast<uint64_t>(c[0]) << 32) | c[1];
    (void)D;
    return (static_cast<uint64_t>(c[0]) << 40) | (static_cast<uint64_t>(c[1]) << 20) | c[2];
}

void unpack_key(int dim, uint64_t k, uint32_t* c) {
    if (dim == 2) {
        c[0] = static_cast<uint32_t>(k >> 32);
        c[1] = static_cast<uint32_t>(k & 0xFFFFFFFFu);
    } else {
        c[0] = static_cast<uint32_t>(k >> 40);
        c[1] = static_cast<uint32_t>((k >> 20) & 0xFFFFFu);
        c[2] = static_cast<uint32_t>(k & 0xFFFFFu);
    }
}

const std::vector<std::array<int, 3>>& stencil_offsets(int dim) {
    static const std::vector<std::array<int, 3>> off2 = [] {
        std::vector<std::array<int, 3>> v;
        for (int dx = -2; dx <= 2; ++dx)
            for (int dy = -2; dy <= 2; ++dy)
                if (dx != 0 || dy != 0) v.push_back({dx, dy, 0});
        return v;
    }();
    static const std::vector<std::array<int, 3>> off3 = [] {
        std::vector<std::array<int, 3>> v;
        for (int dx = -2; dx <= 2; ++dx)
            for (int dy = -2; dy <= 2; ++dy)
                for (int dz = -2; dz <= 2; ++dz)
                    if (dx != 0 || dy != 0 || dz != 0) v.push_back({dx, dy, dz});
        return v;
    }();
    return dim == 2 ? off2 : off3;
}

struct BuildParams {
    double h = 0.0;
    double floor_lvl = 0.0;  // shared-mesh depth floor
    bool dedicated = false;
    Point gx, gy;            // grading endpoints (dedicated only)
    size_t max_nodes = 0;
    int threads = 1;
    double edge_rel_tol = 1e-6;
};

// Returns nullptr when the node budget is exceeded.
std::unique_ptr<Mesh> build_mesh(const DomainOracle& dom, const Point& root_lo, double side,
                                 const BuildParams& bp) {
    const int dim = dom.dimension();
    const int D = dim == 2 ? 28 : 19;
    auto mesh = std::make_unique<Mesh>();
    mesh->dim = dim;
    mesh->D = D;
    mesh->h = bp.h;
    mesh->root_lo = root_lo;
    mesh->unit = side / std::ldexp(1.0, D);
    mesh->bucket = bp.h;

    struct Cell {
        int depth;
        uint32_t ix[3];
    };
    std::vector<Cell> stack;
    stack.push_back({0, {0, 0, 0}});

    struct CornerRec {
        double delta;
        uint64_t min_size;  // integer units
    };
    std::unordered_map<uint64_t, CornerRec> corners;
    corners.reserve(1 << 12);

    Point center(static_cast<size_t>(dim));
    Point cpos(static_cast<size_t>(dim));
    const double dgx = bp.dedicated ? dom.delta(bp.gx) : 0.0;
    const double dgy = bp.dedicated ? dom.delta(bp.gy) : 0.0;

    while (!stack.empty()) {
        const Cell cell = stack.back();
        stack.pop_back();
        const double s = side / std::ldexp(1.0, cell.depth);
        for (int ax = 0; ax < dim; ++ax)
            center[static_cast<size_t>(ax)] =
                root_lo[static_cast<size_t>(ax)] + (cell.ix[ax] + 0.5) * s;
        const double dc = dom.delta(center);

        double target;
        if (dc > 0.0)
            target = std::min(bp.h, dc / 4.0);
        else
            target = bp.h;
        if (bp.dedicated) {
            // Cells far from both query endpoints may stay coarse: any detour
            // out there has scale proportional to its distance from the pair.
            const double g = 0.25 * std::min(dgx + dist(center, bp.gx),
                                             dgy + dist(center, bp.gy));
            target = std::max(target, g);
        } else {
            target = std::max(target, bp.floor_lvl);
        }

        if (s > target * (1.0 + 1e-12) && cell.depth < D) {
            const int nchild = 1 << dim;
            for (int c = 0; c < nchild; ++c) {
                Cell ch;
                ch.depth = cell.depth + 1;
                for (int ax = 0; ax < dim; ++ax)
                    ch.ix[ax] = 2 * cell.ix[ax] + ((c >> ax) & 1);
                ch.ix[2] = dim == 3 ? ch.ix[2] : 0;
                stack.push_back(ch);
            }
            continue;
        }

        // Leaf: record its corners.
        const uint64_t s_int = 1ull << (D - cell.depth);
        const int ncorner = 1 << dim;
        for (int c = 0; c < ncorner; ++c) {
            uint32_t kc[3] = {0, 0, 0};
            for (int ax = 0; ax < dim; ++ax)
                kc[ax] = static_cast<uint32_t>(
                    (static_cast<uint64_t>(cell.ix[ax]) << (D - cell.depth)) +
                    (((c >> ax) & 1) ? s_int : 0));
            const uint64_t key = pack_key(dim, D, kc);
            auto it = corners.find(key);
            if (it == corners.end()) {
                for (int ax = 0; ax < dim; ++ax)
                    cpos[static_cast<size_t>(ax)] =
                        root_lo[static_cast<size_t>(ax)] + kc[ax] * mesh->unit;
                corners.emplace(key, CornerRec{dom.delta(cpos), s_int});
            } else if (s_int < it->second.min_size) {
                it->second.min_size = s_int;
            }
        }
        if (corners.size() > 8 * bp.max_nodes) return nullptr;
    }

    // Nodes: interior corners, ids in sorted key order (deterministic).
    std::vector<std::pair<uint64_t, CornerRec>> interior;
    interior.reserve(corners.size() / 2);
    for (const auto& [key, rec] : corners)
        if (rec.delta > 0.0) interior.push_back({key, rec});
    std::sort(interior.begin(), interior.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    if (interior.size() > bp.max_nodes) return nullptr;

    const size_t n = interior.size();
    mesh->coords.resize(n * static_cast<size_t>(dim));
    mesh->delta.resize(n);
    mesh->nsize.resize(n);
    std::unordered_map<uint64_t, uint32_t> id_of;
    id_of.reserve(2 * n);
    for (size_t i = 0; i < n; ++i) {
        uint32_t kc[3];
        unpack_key(dim, interior[i].first, kc);
        for (int ax = 0; ax < dim; ++ax)
            mesh->coords[i * static_cast<size_t>(dim) + static_cast<size_t>(ax)] =
                root_lo[static_cast<size_t>(ax)] + kc[ax] * mesh->unit;
        mesh->delta[i] = interior[i].second.delta;
        mesh->nsize[i] = static_cast<double>(interior[i].second.min_size) * mesh->unit;
        id_of.emplace(interior[i].first, static_cast<uint32_t>(i));
    }

    // Candidate edges: probe the [-2,2]^dim stencil at the node's own integer
    // scale and the two adjacent scales, which bridges 2:1 refinement
    // interfaces. Pairs are kept once (smaller id first).
    const auto& offs = stencil_offsets(dim);
    std::vector<std::pair<uint32_t, uint32_t>> cand;
    cand.reserve(n * 12);
    const uint64_t maxc = 1ull << D;
    for (size_t i = 0; i < n; ++i) {
        uint32_t kc[3];
        unpack_key(dim, interior[i].first, kc);
        const uint64_t s0 = interior[i].second.min_size;
        for (int sc = 0; sc < 3; ++sc) {
            const uint64_t t = sc == 0 ? s0 / 2 : (sc == 1 ? s0 : s0 * 2);
            if (t == 0 || t > maxc / 2) continue;
            for (const auto& off : offs) {
                uint32_t kc2[3] = {0, 0, 0};
                bool ok = true;
                for (int ax = 0; ax < dim; ++ax) {
                    const int64_t v = static_cast<int64_t>(kc[ax]) +
                                      static_cast<int64_t>(off[static_cast<size_t>(ax)]) *
                                          static_cast<int64_t>(t);
                    if (v < 0 || v > static_cast<int64_t>(maxc)) {
                        ok = false;
                        break;
                    }
                    kc2[ax] = static_cast<uint32_t>(v);
                }
                if (!ok) continue;
                const auto it = id_of.find(pack_key(dim, D, kc2));
                if (it == id_of.end() || it->second <= i) continue;
                cand.push_back({static_cast<uint32_t>(i), it->second});
            }
        }
    }
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());

    // Edge weights in parallel (values independent of schedule).
    std::vector<double> w(cand.size(), kInf);
    auto weigh = [&](size_t lo_i, size_t hi_i) {
        for (size_t e = lo_i; e < hi_i; ++e) {
            const auto [ia, ib] = cand[e];
            const auto a = mesh->node(ia);
            const auto b = mesh->node(ib);
            // Skip stencil pairs much longer than the local spacing; they are
            // covered by shorter hops.
            const double d = dist(a, b);
            const double sz = std::max(mesh->nsize[ia], mesh->nsize[ib]);
            if (d > 2.49 * 2.0 * sz) continue;
            auto q = segment_quad(dom, a, b, bp.edge_rel_tol, 2000);
            if (!q) continue;
            // Any path between two points has quasihyperbolic length at least
            // their distance-ratio value; clamp guards quadrature round-off.
            const double jlow =
                std::log1p(d / std::min(mesh->delta[ia], mesh->delta[ib]));
            w[e] = std::max(*q, jlow);
        }
    };
    const size_t nth = std::max<size_t>(
        1, bp.threads > 0 ? static_cast<size_t>(bp.threads)
                          : std::thread::hardware_concurrency());
    if (nth <= 1 || cand.size() < 1024) {
        weigh(0, cand.size());
    } else {
        std::vector<std::thread> pool;
        std::atomic<size_t> next{0};
        const size_t chunk = 512;
        for (size_t tix = 0; tix < nth; ++tix)
            pool.emplace_back([&] {
                for (;;) {
                    const size_t lo_i = next.fetch_add(chunk);
                    if (lo_i >= cand.size()) return;
                    weigh(lo_i, std::min(cand.size(), lo_i + chunk));
                }
            });
        for (auto& th : pool) th.join();
    }

    // CSR (both directions).
    std::vector<uint32_t> deg(n, 0);
    for (size_t e = 0; e < cand.size(); ++e)
        if (std::isfinite(w[e])) {
            ++deg[cand[e].first];
            ++deg[cand[e].second];
        }
    mesh->adj_off.assign(n + 1, 0);
    for (size_t i = 0; i < n; ++i) mesh->adj_off[i + 1] = mesh->adj_off[i] + deg[i];
    mesh->adj_to.resize(mesh->adj_off[n]);
    mesh->adj_w.resize(mesh->adj_off[n]);
    std::vector<uint32_t> fill(n, 0);
    for (size_t e = 0; e < cand.size(); ++e) {
        if (!std::isfinite(w[e])) continue;
        const auto [ia, ib] = cand[e];
        const uint32_t pa = mesh->adj_off[ia] + fill[ia]++;
        const uint32_t pb = mesh->adj_off[ib] + fill[ib]++;
        mesh->adj_to[pa] = ib;
        mesh->adj_w[pa] = w[e];
        mesh->adj_to[pb] = ia;
        mesh->adj_w[pb] = w[e];
    }

    for (uint32_t i = 0; i < n; ++i) mesh->buckets[mesh->bucket_key(mesh->node(i))].push_back(i);
    return mesh;
}

// ----------------------------------------------------------------------------
// Endpoint connectors and Dijkstra.
// ----------------------------------------------------------------------------

struct Connector {
    uint32_t node;
    double w;
};

std::vector<Connector> connect_point(const DomainOracle& dom, const Mesh& mesh,
                                     std::span<const double> x, double edge_rel_tol) {
    const int dim = mesh.dim;
    // Shell scan over the bucket grid for the nearest node.
    int64_t bc[3] = {0, 0, 0};
    for (int ax = 0; ax < dim; ++ax)
        bc[ax] = static_cast<int64_t>(
            std::floor((x[static_cast<size_t>(ax)] - mesh.root_lo[static_cast<size_t>(ax)]) /
                       mesh.bucket));
    auto scan_shell = [&](int64_t r, std::vector<uint32_t>& out) {
        int64_t lo[3] = {0, 0, 0}, hi[3] = {0, 0, 0};
        for (int ax = 0; ax < dim; ++ax) {
            lo[ax] = bc[ax] - r;
            hi[ax] = bc[ax] + r;
        }
        auto visit = [&](int64_t cx, int64_t cy, int64_t cz) {
            if (cx < 0 || cy < 0 || cz < 0) return;
            uint64_t k = 0;
            const int64_t cs[3] = {cx, cy, cz};
            for (int ax = 0; ax < dim; ++ax) {
                if (cs[ax] >= (1 << 20)) return;
                k = (k << 21) | static_cast<uint64_t>(cs[ax]);
            }
            const auto it = mesh.buckets.find(k);
            if (it == mesh.buckets.end()) return;
            out.insert(out.end(), it->second.begin(), it->second.end());
        };
        if (dim == 2) {
            for (int64_t cx = lo[0]; cx <= hi[0]; ++cx)
                for (int64_t cy = lo[1]; cy <= hi[1]; ++cy)
                    if (r == 0 || cx == lo[0] || cx == hi[0] || cy == lo[1] || cy == hi[1])
                        visit(cx, cy, 0);
        } else {
            for (int64_t cx = lo[0]; cx <= hi[0]; ++cx)
                for (int64_t cy = lo[1]; cy <= hi[1]; ++cy)
                    for (int64_t cz = lo[2]; cz <= hi[2]; ++cz)
                        if (r == 0 || cx == lo[0] || cx == hi[0] || cy == lo[1] || cy == hi[1] ||
                            cz == lo[2] || cz == hi[2])
                            visit(cx, cy, cz);
        }
    };

    if (mesh.n_nodes() == 0) return {};
    const double side = mesh.unit * std::ldexp(1.0, mesh.D);
    const int64_t r_cap = static_cast<int64_t>(std::ceil(side / mesh.bucket)) + 2;
    std::vector<uint32_t> found;
    int extra = -1;
    for (int64_t r = 0; r <= r_cap; ++r) {
        scan_shell(r, found);
        if (!found.empty() && extra < 0) extra = 2;  // two more shells to be safe
        if (extra == 0) break;
        if (extra > 0) --extra;
    }
    if (found.empty()) return {};

    uint32_t nearest = found[0];
    double dbest = kInf;
    for (uint32_t i : found) {
        const double d = dist(x, mesh.node(i));
        if (d < dbest || (d == dbest && i < nearest)) {
            dbest = d;
            nearest = i;
        }
    }
    const double s_loc = std::max(mesh.nsize[nearest], dbest);

    // Candidates within 3x the local spacing (their own or the endpoint's).
    std::vector<Connector> out;
    for (double radius = 3.0 * s_loc;; radius *= 2.0) {
        // Collect buckets covering `radius`, then filter.
        std::vector<uint32_t> cands;
        const int64_t rs = std::min(
            r_cap, static_cast<int64_t>(std::ceil(radius / mesh.bucket)) + 1);
        for (int64_t rr = 0; rr <= rs; ++rr) scan_shell(rr, cands);
        std::sort(cands.begin(), cands.end());
        cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
        std::vector<std::pair<double, uint32_t>> close;
        for (uint32_t i : cands) {
            const double d = dist(x, mesh.node(i));
            if (d <= 3.0 * std::max(s_loc, mesh.nsize[i]) || d <= radius * 0.34)
                close.push_back({d, i});
        }
        std::sort(close.begin(), close.end());
        if (close.size() > 64) close.resize(64);
        for (const auto& [d, i] : close) {
            auto q = segment_quad(dom, x, mesh.node(i), edge_rel_tol, 20000);
            if (q) out.push_back({i, *q});
        }
        if (!out.empty() || radius > 64.0 * s_loc) break;
    }
    return out;
}

struct DijkstraResult {
    double value = kInf;
    std::vector<uint32_t> path;  // mesh node ids, source side first (may be empty)
};

DijkstraResult dijkstra(const Mesh& mesh, const std::vector<Connector>& src,
                        const std::vector<Connector>& dst) {
    DijkstraResult res;
    if (src.empty() || dst.empty() || mesh.n_nodes() == 0) return res;
    const size_t n = mesh.n_nodes();
    constexpr uint32_t kNone = std::numeric_limits<uint32_t>::max();
    constexpr uint32_t kSrc = kNone - 1;
    std::vector<double> distv(n, kInf);
    std::vector<uint32_t> pred(n, kNone);
    std::unordered_map<uint32_t, double> dmap;
    dmap.reserve(dst.size() * 2);
    for (const auto& c : dst) {
        auto it = dmap.find(c.node);
        if (it == dmap.end() || c.w < it->second) dmap[c.node] = c.w;
    }
    using QE = std::pair<double, uint32_t>;
    std::priority_queue<QE, std::vector<QE>, std::greater<>> heap;
    for (const auto& c : src) {
        if (c.w < distv[c.node]) {
            distv[c.node] = c.w;
            pred[c.node] = kSrc;
            heap.push({c.w, c.node});
        }
    }
    double best = kInf;
    uint32_t best_node = kNone;
    while (!heap.empty()) {
        const auto [d, u] = heap.top();
        heap.pop();
        if (d > distv[u]) continue;
        if (d >= best) break;
        const auto it = dmap.find(u);
        if (it != dmap.end()) {
            const double c = d + it->second;
            if (c < best) {
                best = c;
                best_node = u;
            }
        }
        for (uint32_t e = mesh.adj_off[u]; e < mesh.adj_off[u + 1]; ++e) {
            const uint32_t v = mesh.adj_to[e];
            const double nd = d + mesh.adj_w[e];
            if (nd < distv[v]) {
                distv[v] = nd;
                pred[v] = u;
                heap.push({nd, v});
            }
        }
    }
    if (best_node == kNone) return res;
    res.value = best;
    for (uint32_t u = best_node; u != kSrc; u = pred[u]) res.path.push_back(u);
    std::reverse(res.path.begin(), res.path.end());
    return res;
}

// ----------------------------------------------------------------------------
// Polyline smoothing: greedy vertex adjustments that never accept a move
// whose (certified) quasihyperbolic length is worse, so the final value stays
// a valid upper bound and typically drops well below the graph value.
// ----------------------------------------------------------------------------

struct SmoothCfg {
    int passes = 8;
    size_t max_verts = 129;
    bool wide_moves = false;  // axis moves at two step sizes (dedicated solvers)
    // Segments longer than this (in quasihyperbolic length) are subdivided so
    // the polyline can follow a curved geodesic. The chord-vs-arc excess per
    // segment scales with the cube of its length, so the threshold must
    // shrink with the requested tolerance or refinement stalls on a plateau
    // set by the polyline resolution instead of the mesh.
    double split_len = 0.6;
    double min_gain = 1e-6;  // stop passes once a full sweep improves less
    // Chain-step factor for the greedy evaluator; its quadrature error is
    // O(step^4) and must sit well below the requested tolerance or the
    // optimizer cannot tell an improving move from noise.
    double quick_step = 0.45;
    // Per-axis golden-section line search instead of fixed-step probes.
    // Fixed steps relax the shape diffusively (hundreds of sweeps for a
    // curved path); the line search converges in a handful of passes.
    // Costs ~4x per pass, so only dedicated solvers enable it.
    bool line_search = false;
};

void dedup_polyline(std::vector<Point>& v) {
    std::vector<Point> out;
    out.reserve(v.size());
    for (auto& p : v)
        if (out.empty() || dist2(out.back(), p) > 0.0) out.push_back(std::move(p));
    v = std::move(out);
}

std::optional<double> smooth_polyline(const DomainOracle& dom, std::vector<Point>& verts,
                                      const SmoothCfg& cfg, double final_rel_tol) {
    dedup_polyline(verts);
    if (verts.size() < 2) return 0.0;
    const int dim = dom.dimension();

    auto qk = [&](const Point& a, const Point& b) {
        return quick_k(dom, a, b, 4096, cfg.quick_step);
    };

    // Coarse-to-fine: bend the path globally with few vertices and large
    // steps first, then halve the subdivision threshold and polish. Jumping
    // straight to the finest subdivision stalls — per-vertex moves scale with
    // the local edge length, too small to correct the global shape.
    std::vector<double> stages{0.6};
    while (stages.back() > cfg.split_len)
        stages.push_back(std::max(0.5 * stages.back(), cfg.split_len));

    for (double stage_len : stages)
    for (int pass = 0; pass < cfg.passes; ++pass) {
        // Subdivide segments that carry a lot of length so vertices have room
        // to bend the path.
        bool split_any = true;
        while (split_any && verts.size() < cfg.max_verts) {
            split_any = false;
            for (size_t i = 0; i + 1 < verts.size() && verts.size() < cfg.max_verts; ++i) {
                const auto q = qk(verts[i], verts[i + 1]);
                if (q && *q > stage_len) {
                    verts.insert(verts.begin() + static_cast<std::ptrdiff_t>(i) + 1,
                                 lerp(verts[i], verts[i + 1], 0.5));
                    split_any = true;
                    ++i;
                }
            }
        }

        double improved = 0.0;
        for (size_t i = 1; i + 1 < verts.size(); ++i) {
            const Point& prev = verts[i - 1];
            const Point& next = verts[i + 1];
            const auto c0 = qk(prev, verts[i]);
            const auto c1 = qk(verts[i], next);
            if (!c0 || !c1) continue;
            double base = *c0 + *c1;

            std::vector<Point> props;
            Point pull(static_cast<size_t>(dim));
            for (int ax = 0; ax < dim; ++ax)
                pull[static_cast<size_t>(ax)] =
                    0.5 * (prev[static_cast<size_t>(ax)] + next[static_cast<size_t>(ax)]);
            for (double alpha : {1.0, 0.5, 0.25}) {
                Point p(static_cast<size_t>(dim));
                for (int ax = 0; ax < dim; ++ax)
                    p[static_cast<size_t>(ax)] =
                        verts[i][static_cast<size_t>(ax)] +
                        alpha * (pull[static_cast<size_t>(ax)] -
                                 verts[i][static_cast<size_t>(ax)]);
                props.push_back(std::move(p));
            }
            const double scale =
                std::min(dist(prev, verts[i]), dist(verts[i], next));
            if (!cfg.line_search) {
                const std::array<double, 2> steps = cfg.wide_moves
                                                        ? std::array<double, 2>{0.35, 0.12}
                                                        : std::array<double, 2>{0.3, 0.0};
                for (double st : steps) {
                    if (st <= 0.0) continue;
                    for (int ax = 0; ax < dim; ++ax)
                        for (double sgn : {1.0, -1.0}) {
                            Point p = verts[i];
                            p[static_cast<size_t>(ax)] += sgn * st * scale;
                            props.push_back(std::move(p));
                        }
                }
            }

            double best = base;
            int best_ix = -1;
            for (size_t pi = 0; pi < props.size(); ++pi) {
                const auto q0 = qk(prev, props[pi]);
                if (!q0) continue;
                const auto q1 = qk(props[pi], next);
                if (!q1) continue;
                const double v = *q0 + *q1;
                if (v < best - 1e-14) {
                    best = v;
                    best_ix = static_cast<int>(pi);
                }
            }
            if (best_ix >= 0) {
                verts[i] = props[static_cast<size_t>(best_ix)];
                improved += base - best;
            }

            if (cfg.line_search) {
                // Coordinate descent with a golden-section search per axis.
                auto eval_at = [&](Point p) -> double {
                    const auto q0 = qk(prev, p);
                    if (!q0) return kInf;
                    const auto q1 = qk(p, next);
                    if (!q1) return kInf;
                    return *q0 + *q1;
                };
                double cur = best_ix >= 0 ? best : base;
                for (int ax = 0; ax < dim; ++ax) {
                    constexpr double kGolden = 0.6180339887498949;
                    double a = -0.6 * scale, b = 0.6 * scale;
                    auto at = [&](double off) {
                        Point p = verts[i];
                        p[static_cast<size_t>(ax)] += off;
                        return eval_at(std::move(p));
                    };
                    double c = b - kGolden * (b - a), d2 = a + kGolden * (b - a);
                    double fc = at(c), fd = at(d2);
                    for (int it = 0; it < 16; ++it) {
                        if (fc < fd) {
                            b = d2;
                            d2 = c;
                            fd = fc;
                            c = b - kGolden * (b - a);
                            fc = at(c);
                        } else {
                            a = c;
                            c = d2;
                            fc = fd;
                            d2 = a + kGolden * (b - a);
                            fd = at(d2);
                        }
                    }
                    const double off = fc < fd ? c : d2;
                    const double f = std::min(fc, fd);
                    if (f < cur - 1e-14) {
                        verts[i][static_cast<size_t>(ax)] += off;
                        improved += cur - f;
                        cur = f;
                    }
                }
            }
        }

        // Drop vertices that no longer help (straightens the polyline).
        for (size_t i = 1; i + 1 < verts.size() && verts.size() > 2;) {
            const auto through = qk(verts[i - 1], verts[i + 1]);
            const auto c0 = qk(verts[i - 1], verts[i]);
            const auto c1 = qk(verts[i], verts[i + 1]);
            if (through && c0 && c1 && *through <= *c0 + *c1 + 1e-12)
                verts.erase(verts.begin() + static_cast<std::ptrdiff_t>(i));
            else
                ++i;
        }
        if (improved < cfg.min_gain) break;
    }

    double total = 0.0;
    for (size_t i = 0; i + 1 < verts.size(); ++i) {
        const auto q = segment_quad(dom, verts[i], verts[i + 1], final_rel_tol);
        if (!q) return std::nullopt;
        total += *q;
    }
    return total;
}

Box bounding_cube(const Box& region) {
    Box cube = region;
    const int dim = region.dimension();
    double side = std::max(region.max_extent(), 1e-9);
    for (int ax = 0; ax < dim; ++ax) {
        const double c =
            0.5 * (region.lo[static_cast<size_t>(ax)] + region.hi[static_cast<size_t>(ax)]);
        cube.lo[static_cast<size_t>(ax)] = c - 0.5 * side;
        cube.hi[static_cast<size_t>(ax)] = c + 0.5 * side;
    }
    return cube;
}

Box doubled(const Box& region) {
    Box out = region;
    for (size_t ax = 0; ax < region.lo.size(); ++ax) {
        const double c = 0.5 * (region.lo[ax] + region.hi[ax]);
        const double half = (region.hi[ax] - region.lo[ax]);
        out.lo[ax] = c - half;
        out.hi[ax] = c + half;
    }
    return out;
}

Domain borrow(const DomainOracle& dom) {
    return Domain(std::shared_ptr<const DomainOracle>(), &dom);
}

} // namespace

// ----------------------------------------------------------------------------
// segment_k_length
// ----------------------------------------------------------------------------

double segment_k_length(const DomainOracle& domain, std::span<const double> a,
                        std::span<const double> b, double rel_tol) {
    if (domain.delta(a) <= 0.0 || domain.delta(b) <= 0.0)
        throw PointOutsideDomain("segment endpoint is not interior");
    const auto q = segment_quad(domain, a, b, rel_tol);
    if (!q) throw SegmentExitsDomain("segment could not be certified inside the domain");
    return *q;
}

// ----------------------------------------------------------------------------
// KSolver
// ----------------------------------------------------------------------------

struct KSolver::Impl {
    Domain domain;
    Box region;
    SolverOptions opt;
    Point root_lo;
    double side = 0.0;

    mutable std::mutex build_mu;
    mutable std::vector<std::unique_ptr<Mesh>> meshes;
    mutable std::vector<char> attempted;
    mutable std::atomic<int> built{0};

    const Mesh* mesh(int level) const {
        if (level >= opt.max_levels) return nullptr;
        if (level < built.load(std::memory_order_acquire))
            return meshes[static_cast<size_t>(level)].get();
        std::lock_guard<std::mutex> lock(build_mu);
        while (built.load(std::memory_order_relaxed) <= level) {
            const int lv = built.load(std::memory_order_relaxed);
            BuildParams bp;
            bp.h = side / opt.initial_cells / std::ldexp(1.0, lv);
            bp.floor_lvl = std::max(bp.h / 64.0, side * 2e-8);
            bp.dedicated = opt.dedicated;
            if (opt.dedicated) {
                bp.gx = opt.grade_x;
                bp.gy = opt.grade_y;
            }
            bp.max_nodes = opt.max_nodes;
            bp.threads = opt.threads;
            bp.edge_rel_tol = opt.edge_quad_rel_tol;
            meshes[static_cast<size_t>(lv)] = build_mesh(*domain, root_lo, side, bp);
            attempted[static_cast<size_t>(lv)] = 1;
            built.store(lv + 1, std::memory_order_release);
        }
        return meshes[static_cast<size_t>(level)].get();
    }
};

KSolver::KSolver(Domain domain, Box region, SolverOptions opt) {
    if (!domain) throw InvalidSpec("null domain");
    if (region.dimension() != domain->dimension())
        throw DimensionMismatch("region dimension does not match domain");
    if (opt.max_levels < 1) throw OutOfRange("max_levels must be at least 1");
    if (opt.dedicated &&
        (opt.grade_x.size() != static_cast<size_t>(domain->dimension()) ||
         opt.grade_y.size() != static_cast<size_t>(domain->dimension())))
        throw DimensionMismatch("dedicated solver grading endpoints have wrong dimension");
    domain_ = domain;
    region_ = region;
    impl_ = std::make_unique<Impl>();
    impl_->domain = std::move(domain);
    impl_->opt = opt;
    const Box cube = bounding_cube(region);
    impl_->region = cube;
    region_ = cube;
    impl_->root_lo = cube.lo;
    impl_->side = cube.max_extent();
    impl_->meshes.resize(static_cast<size_t>(opt.max_levels));
    impl_->attempted.assign(static_cast<size_t>(opt.max_levels), 0);
}

KSolver::~KSolver() = default;

namespace {

struct LevelOutcome {
    double value = kInf;
    std::vector<Point> path;
};

LevelOutcome solve_level(const DomainOracle& dom, const Mesh& mesh, std::span<const double> x,
                         std::span<const double> y, const SolverOptions& opt, double tol) {
    LevelOutcome out;
    const auto cs = connect_point(dom, mesh, x, opt.edge_quad_rel_tol);
    if (cs.empty()) return out;
    const auto cd = connect_point(dom, mesh, y, opt.edge_quad_rel_tol);
    if (cd.empty()) return out;
    auto res = dijkstra(mesh, cs, cd);
    if (!std::isfinite(res.value)) return out;
    out.value = res.value;
    out.path.reserve(res.path.size() + 2);
    out.path.push_back(Point(x.begin(), x.end()));
    for (uint32_t u : res.path) {
        const auto p = mesh.node(u);
        out.path.push_back(Point(p.begin(), p.end()));
    }
    out.path.push_back(Point(y.begin(), y.end()));

    SmoothCfg cfg;
    cfg.passes = opt.dedicated ? 24 : 4;
    cfg.max_verts = opt.dedicated ? 321 : 97;
    cfg.wide_moves = opt.dedicated;
    cfg.split_len = std::clamp(std::sqrt(8.0 * tol), 0.05, 0.6);
    cfg.min_gain = std::max(1e-3 * tol, 1e-9);
    cfg.quick_step = std::clamp(0.45 * std::pow(tol / 1e-2, 0.25), 0.1, 0.45);
    cfg.line_search = opt.dedicated;
    auto sm = smooth_polyline(dom, out.path, cfg, opt.quad_rel_tol);
    if (sm && *sm < out.value) out.value = *sm;
    return out;
}

struct QueryOutcome {
    MetricResult res;
    GeodesicPath path;
};

QueryOutcome run_query(const KSolver::Impl& impl, std::span<const double> x,
                       std::span<const double> y, double tol) {
    const DomainOracle& dom = *impl.domain;
    if (tol <= 0.0) throw OutOfRange("tolerance must be positive");
    if (dom.delta(x) <= 0.0 || dom.delta(y) <= 0.0)
        throw PointOutsideDomain("quasihyperbolic query endpoint is not interior");

    QueryOutcome out;
    out.path.tol = tol;
    const double j = j_metric(dom, x, y).value;

    double best = kInf;
    std::vector<Point> best_path;
    int best_level = 0;

    // Straight-segment competitor: exact whenever the segment stays inside,
    // and immediately sufficient when its value already meets j within tol
    // (j is a lower bound for the true distance).
    if (auto seg = segment_quad(dom, x, y, impl.opt.quad_rel_tol)) {
        best = *seg;
        best_path = {Point(x.begin(), x.end()), Point(y.begin(), y.end())};
        if (best - j <= tol) {
            out.res = MetricResult{best, Method::numeric, std::max(best - j, 0.0), true};
            out.path.vertices = std::move(best_path);
            out.path.k_length = best;
            out.path.final_spacing = 0.0;
            return out;
        }
    }

    double prev_level_value = kInf;
    double last_change = kInf;
    bool converged = false;
    int level = 0;
    for (; level < impl.opt.max_levels; ++level) {
        const Mesh* mesh = impl.mesh(level);
        if (!mesh) break;  // node budget exhausted
        auto lo = solve_level(dom, *mesh, x, y, impl.opt, tol);
        if (lo.value < best) {
            best = lo.value;
            best_path = std::move(lo.path);
            best_level = level;
        }
        if (std::isfinite(lo.value) && std::isfinite(prev_level_value)) {
            last_change = std::abs(lo.value - prev_level_value);
            if (last_change <= tol) {
                converged = true;
                ++level;
                break;
            }
        }
        prev_level_value = lo.value;
    }

    const double err = std::isfinite(best)
                           ? std::max(std::isfinite(last_change) ? last_change : best - j,
                                      best - j)
                           : kInf;
    out.res = MetricResult{best, Method::numeric, err, converged && std::isfinite(best)};
    out.path.vertices = std::move(best_path);
    out.path.k_length = best;
    out.path.refinement_level = best_level;
    out.path.final_spacing =
        impl.side / impl.opt.initial_cells / std::ldexp(1.0, best_level);
    return out;
}

} // namespace

MetricResult KSolver::k_upper(std::span<const double> x, std::span<const double> y,
                              double tol) const {
    return run_query(*impl_, x, y, tol).res;
}

GeodesicPath KSolver::geodesic(std::span<const double> x, std::span<const double> y,
                               double tol) const {
    return run_query(*impl_, x, y, tol).path;
}

// ----------------------------------------------------------------------------
// Free functions: closed-form dispatch + automatic region handling.
// ----------------------------------------------------------------------------

namespace {

// Closed forms are exact for: radial configurations in balls, half-spaces,
// and pairs where one point lies on the other's nearest-boundary segment
// (recognized by the defect rate delta(y) = delta(x) - |x - y|, which forces
// the segment [x, y] to run straight toward the nearest boundary point).
std::optional<MetricResult> try_closed_k(const DomainOracle& dom, std::span<const double> x,
                                         std::span<const double> y, double dx, double dy) {
    const auto& spec = dom.spec();
    const double d = dist(x, y);
    if (d == 0.0) return MetricResult{0.0, Method::closed_form, 0.0, true};

    if (spec.kind == "ball") {
        const double r = spec.radius;
        Point u(x.size()), v(y.size());
        for (size_t i = 0; i < x.size(); ++i) {
            const double c = i < spec.center.size() ? spec.center[i] : 0.0;
            u[i] = (x[i] - c) / r;
            v[i] = (y[i] - c) / r;
        }
        try {
            return k_radial_ball(u, v);
        } catch (const NotRadialConfiguration&) {
        }
    }
    if (spec.kind == "half_space") return k_halfspace(x, y);

    const double hi = std::max(dx, dy), lo = std::min(dx, dy);
    if (std::abs((hi - lo) - d) <= 1e-12 * std::max(1.0, hi)) {
        const Point mid = lerp(x, y, 0.5);
        const double dmid = dom.delta(mid);
        if (std::abs(dmid - 0.5 * (dx + dy)) <= 1e-9 * std::max(1.0, hi)) {
            const double v = std::log(hi / lo);
            return MetricResult{v, Method::closed_form, 1e-14 * (1.0 + v), true};
        }
    }
    return std::nullopt;
}

std::optional<GeodesicPath> try_closed_geodesic(const DomainOracle& dom,
                                                std::span<const double> x,
                                                std::span<const double> y, double dx, double dy,
                                                double tol) {
    const auto& spec = dom.spec();
    const double d = dist(x, y);
    GeodesicPath gp;
    gp.tol = tol;
    if (d == 0.0) {
        gp.vertices = {Point(x.begin(), x.end())};
        gp.k_length = 0.0;
        return gp;
    }

    auto finish = [&](std::vector<Point> verts) -> std::optional<GeodesicPath> {
        double total = 0.0;
        for (size_t i = 0; i + 1 < verts.size(); ++i) {
            auto q = segment_quad(dom, verts[i], verts[i + 1], 1e-9);
            if (!q) return std::nullopt;
            total += *q;
        }
        gp.vertices = std::move(verts);
        gp.k_length = total;
        return gp;
    };

    if (spec.kind == "ball") {
        const double r = spec.radius;
        Point c(x.size(), 0.0);
        for (size_t i = 0; i < x.size() && i < spec.center.size(); ++i) c[i] = spec.center[i];
        Point u(x.size()), v(y.size());
        for (size_t i = 0; i < x.size(); ++i) {
            u[i] = (x[i] - c[i]) / r;
            v[i] = (y[i] - c[i]) / r;
        }
        bool radial = true;
        try {
            k_radial_ball(u, v);
        } catch (const NotRadialConfiguration&) {
            radial = false;
        }
        if (radial) {
            if (dot(u, v) < 0.0)
                return finish({Point(x.begin(), x.end()), c, Point(y.begin(), y.end())});
            return finish({Point(x.begin(), x.end()), Point(y.begin(), y.end())});
        }
    }

    if (spec.kind == "half_space") {
        const size_t nlast = x.size() - 1;
        double horiz2 = 0.0;
        for (size_t i = 0; i < nlast; ++i) {
            const double c = y[i] - x[i];
            horiz2 += c * c;
        }
        const double hd = std::sqrt(horiz2);
        if (hd <= 1e-14 * std::max(1.0, d))
            return finish({Point(x.begin(), x.end()), Point(y.begin(), y.end())});
        // Geodesics are circular arcs centered on the boundary hyperplane.
        const double pn = x[nlast], qn = y[nlast];
        const double s0 = (hd * hd + pn * pn - qn * qn) / (2.0 * hd);
        const double R = std::hypot(s0, pn);
        const double th_p = std::atan2(pn, -s0);
        const double th_q = std::atan2(qn, hd - s0);
        const int K = 128;
        std::vector<Point> verts;
        verts.reserve(static_cast<size_t>(K) + 1);
        for (int i = 0; i <= K; ++i) {
            const double th = th_p + (th_q - th_p) * i / K;
            const double s = s0 + R * std::cos(th);
            const double z = R * std::sin(th);
            Point p(x.size());
            for (size_t ax = 0; ax < nlast; ++ax) p[ax] = x[ax] + (s / hd) * (y[ax] - x[ax]);
            p[nlast] = z;
            verts.push_back(std::move(p));
        }
        verts.front() = Point(x.begin(), x.end());
        verts.back() = Point(y.begin(), y.end());
        return finish(std::move(verts));
    }

    const double hi = std::max(dx, dy), lo = std::min(dx, dy);
    if (std::abs((hi - lo) - d) <= 1e-12 * std::max(1.0, hi)) {
        const Point mid = lerp(x, y, 0.5);
        if (std::abs(dom.delta(mid) - 0.5 * (dx + dy)) <= 1e-9 * std::max(1.0, hi))
            return finish({Point(x.begin(), x.end()), Point(y.begin(), y.end())});
    }
    return std::nullopt;
}

SolverOptions dedicated_options(std::span<const double> x, std::span<const double> y) {
    SolverOptions opt;
    opt.dedicated = true;
    opt.grade_x = Point(x.begin(), x.end());
    opt.grade_y = Point(y.begin(), y.end());
    return opt;
}

bool path_connects(const GeodesicPath& p) {
    return p.vertices.size() >= 2 && std::isfinite(p.k_length);
}

// Cheap connectivity check: the first two mesh levels (identical to the full
// solver's levels 0-1) already connect the pair whenever region ∩ domain
// admits any coarse detour. A failed probe means the region is too small for
// an admissible path, so the full refinement budget would be wasted on it.
bool coarse_connects(const Domain& domain, const Box& region, std::span<const double> x,
                     std::span<const double> y) {
    SolverOptions probe = dedicated_options(x, y);
    probe.max_levels = 2;
    KSolver solver(domain, region, probe);
    return std::isfinite(solver.k_upper(x, y, kInf).value);
}

QueryOutcome numeric_query(const DomainOracle& domain, std::span<const double> x,
                           std::span<const double> y, double tol, bool want_path) {
    const Domain dptr = borrow(domain);
    auto solve_in = [&](const Box& region) -> QueryOutcome {
        KSolver solver(dptr, region, dedicated_options(x, y));
        QueryOutcome qo;
        if (want_path) {
            qo.path = solver.geodesic(x, y, tol);
            const bool ok = path_connects(qo.path);
            qo.res = MetricResult{ok ? qo.path.k_length : kInf, Method::numeric, 0.0, ok};
        } else {
            qo.res = solver.k_upper(x, y, tol);
        }
        return qo;
    };
    if (auto bbox = domain.bounding_box()) return solve_in(*bbox);
    // Unbounded domain: grow the region until the estimate stabilizes. The
    // initial region is the pair's bounding box inflated 4x; a region too
    // small to contain any admissible path yields an infinite estimate and
    // forces further doubling. Thin obstacles can require many doublings
    // before the detour around them fits (the pair's own bounding box may be
    // orders of magnitude smaller than the detour), so disconnected regions
    // are skipped with a coarse probe instead of a full-budget solve.
    Box region = default_region(domain, x, y, 4.0);
    std::optional<QueryOutcome> prev;
    int full_solves = 0;
    for (int round = 0; round < 48 && full_solves < 7; ++round) {
        if (!coarse_connects(dptr, region, x, y)) {
            region = doubled(region);
            continue;
        }
        QueryOutcome cur = solve_in(region);
        ++full_solves;
        if (!std::isfinite(cur.res.value)) {
            region = doubled(region);
            continue;
        }
        if (prev && std::isfinite(prev->res.value) &&
            std::abs(cur.res.value - prev->res.value) <= tol) {
            const double change = std::abs(cur.res.value - prev->res.value);
            QueryOutcome out = cur.res.value <= prev->res.value ? std::move(cur)
                                                                : std::move(*prev);
            out.res.error_bound = std::max(out.res.error_bound, change);
            return out;
        }
        prev = std::move(cur);
        region = doubled(region);
    }
    if (prev) {
        prev->res.converged = false;
        return std::move(*prev);
    }
    QueryOutcome none;
    none.res = MetricResult{kInf, Method::numeric, kInf, false};
    none.path.tol = tol;
    return none;
}

} // namespace

MetricResult k_distance(const DomainOracle& domain, std::span<const double> x,
                        std::span<const double> y, double tol) {
    const double dx = domain.delta(x), dy = domain.delta(y);
    if (dx <= 0.0 || dy <= 0.0)
        throw PointOutsideDomain("quasihyperbolic query endpoint is not interior");
    if (auto closed = try_closed_k(domain, x, y, dx, dy)) return *closed;
    return k_distance_numeric(domain, x, y, tol);
}

GeodesicPath geodesic(const DomainOracle& domain, std::span<const double> x,
                      std::span<const double> y, double tol) {
    const double dx = domain.delta(x), dy = domain.delta(y);
    if (dx <= 0.0 || dy <= 0.0)
        throw PointOutsideDomain("quasihyperbolic query endpoint is not interior");
    if (auto closed = try_closed_geodesic(domain, x, y, dx, dy, tol)) return *closed;
    return geodesic_numeric(domain, x, y, tol);
}

MetricResult k_distance_numeric(const DomainOracle& domain, std::span<const double> x,
                                std::span<const double> y, double tol) {
    return numeric_query(domain, x, y, tol, false).res;
}

GeodesicPath geodesic_numeric(const DomainOracle& domain, std::span<const double> x,
                              std::span<const double> y, double tol) {
    return numeric_query(domain, x, y, tol, true).path;
}

double additivity_check(const DomainOracle& domain, const GeodesicPath& path, size_t z_index) {
    // The split vertex must be interior to the polyline; endpoints would make
    // one leg degenerate.
    if (z_index == 0 || z_index + 1 >= path.vertices.size())
        throw IndexOutOfRange("vertex index " + std::to_string(z_index) +
                              " is not an interior vertex of the path");
    const double tol = path.tol > 0.0 ? path.tol : 1e-3;
    const Point& x = path.vertices.front();
    const Point& y = path.vertices.back();
    const Point& z = path.vertices[z_index];
    const double a = k_distance(domain, x, z, tol).value;
    const double b = k_distance(domain, z, y, tol).value;
    const double c = k_distance(domain, x, y, tol).value;
    return std::abs(a + b - c);
}

} // namespace metriclab

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "errors.hpp"
#include "measure.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace cwot {

struct MaxSlicedConfig {
    std::size_t restarts = 0;      // 0 -> 16 + 8 * dim
    std::size_t max_iterations = 200;
    double improve_tol = 1e-10;
    std::size_t patience = 5;      // stop after this many non-improving steps
    std::uint64_t seed = 0;
    bool warm_starts = true;       // seed a few directions from atom differences
    int threads = 1;
};

struct RestartRecord {
    std::vector<double> initial;
    double value = 0.0;
};

struct MaxSlicedResult {
    double value = 0.0;
    std::vector<double> direction;
    std::size_t restarts_used = 0;
    std::vector<RestartRecord> trace;
};

namespace detail {

// Sorted views of both projected supports. Ties in projected value break by
// atom index, which pins one optimal monotone coupling and keeps the
// supergradient reproducible.
struct slice_workspace {
    std::vector<int> order_a, order_b;
    std::vector<double> proj_a, proj_b;

    void resize(int n, int m) {
        order_a.resize(static_cast<std::size_t>(n));
        order_b.resize(static_cast<std::size_t>(m));
        proj_a.resize(static_cast<std::size_t>(n));
        proj_b.resize(static_cast<std::size_t>(m));
    }
};

// Projects both measures on theta, couples the sorted lists monotonically and
// accumulates the coupling into a value and (optionally) a supergradient
//   g = sum_ij pi_ij sign(<x_i - y_j, theta>) (x_i - y_j),
// which satisfies <g, theta> = value. Returns the distance along theta.
inline double sliced_coupling(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                              const std::vector<double>& theta, slice_workspace& ws,
                              std::vector<double>* grad) {
    const int n = mu.size(), m = nu.size(), d = mu.dim();
    ws.resize(n, m);
    for (int i = 0; i < n; ++i)
        ws.proj_a[static_cast<std::size_t>(i)] = dot(mu.point(i), theta);
    for (int j = 0; j < m; ++j)
        ws.proj_b[static_cast<std::size_t>(j)] = dot(nu.point(j), theta);
    std::iota(ws.order_a.begin(), ws.order_a.end(), 0);
    std::iota(ws.order_b.begin(), ws.order_b.end(), 0);
    auto by_proj = [](const std::vector<double>& v) {
        return [&v](int a, int b) {
            const double va = v[static_cast<std::size_t>(a)];
            const double vb = v[static_cast<std::size_t>(b)];
            return va != vb ? va < vb : a < b;
        };
    };
    std::sort(ws.order_a.begin(), ws.order_a.end(), by_proj(ws.proj_a));
    std::sort(ws.order_b.begin(), ws.order_b.end(), by_proj(ws.proj_b));

    if (grad) grad->assign(static_cast<std::size_t>(d), 0.0);
    double value = 0.0;
    std::size_t ia = 0, ib = 0;
    double rem_a = mu.weight(ws.order_a[0]);
    double rem_b = nu.weight(ws.order_b[0]);
    while (true) {
        const int i = ws.order_a[ia], j = ws.order_b[ib];
        const double mass = std::min(rem_a, rem_b);
        const double diff = ws.proj_a[static_cast<std::size_t>(i)] -
                            ws.proj_b[static_cast<std::size_t>(j)];
        value += mass * std::abs(diff);
        if (grad && diff != 0.0) {
            const double s = mass * (diff > 0.0 ? 1.0 : -1.0);
            const double* xi = mu.point(i);
            const double* yj = nu.point(j);
            for (int k = 0; k < d; ++k)
                (*grad)[static_cast<std::size_t>(k)] += s * (xi[k] - yj[k]);
        }
        rem_a -= mass;
        rem_b -= mass;
        const bool adv_a = rem_a <= rem_b;
        const bool adv_b = rem_b <= rem_a;
        if (adv_a) {
            if (++ia == ws.order_a.size()) break;
            rem_a = mu.weight(ws.order_a[ia]);
        }
        if (adv_b) {
            if (++ib == ws.order_b.size()) break;
            rem_b = nu.weight(ws.order_b[ib]);
        }
    }
    return value;
}

inline bool normalize_in_place(std::vector<double>& v) {
    double s = 0.0;
    for (double c : v) s += c * c;
    if (s <= 1e-24) return false;
    const double inv = 1.0 / std::sqrt(s);
    for (double& c : v) c *= inv;
    return true;
}

// lexicographic order on coordinate vectors, for deterministic tie-breaks
inline bool lex_less(const std::vector<double>& a, const std::vector<double>& b) {
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (a[k] < b[k]) return true;
        if (a[k] > b[k]) return false;
    }
    return false;
}

inline void check_pair(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                       const char* who) {
    if (mu.dim() != nu.dim())
        throw input_error(std::string(who) + ": dimension mismatch");
}

inline DiscreteMeasure scaled_copy(const DiscreteMeasure& m, double factor) {
    std::vector<double> pts = m.flat_points();
    for (double& c : pts) c *= factor;
    return DiscreteMeasure(m.dim(), std::move(pts), m.weights());
}

} // namespace detail

// One supergradient of theta -> W1(theta#mu, theta#nu) at theta, read off the
// monotone coupling of the projections (index tie-break).
inline std::vector<double> sliced_subgradient(const DiscreteMeasure& mu,
                                              const DiscreteMeasure& nu,
                                              const Direction& theta) {
    detail::check_pair(mu, nu, "sliced_subgradient");
    if (theta.dim() != mu.dim())
        throw input_error("sliced_subgradient: direction dimension mismatch");
    detail::slice_workspace ws;
    std::vector<double> grad;
    detail::sliced_coupling(mu, nu, theta.components(), ws, &grad);
    return grad;
}

// Distance between the projections of both measures along theta.
inline double sliced_value(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                           const Direction& theta) {
    detail::check_pair(mu, nu, "sliced_value");
    if (theta.dim() != mu.dim())
        throw input_error("sliced_value: direction dimension mismatch");
    detail::slice_workspace ws;
    return detail::sliced_coupling(mu, nu, theta.components(), ws, nullptr);
}

namespace detail {

// Multi-start ascent on supports already rescaled into the unit ball.
inline MaxSlicedResult maxsliced_core(const DiscreteMeasure& mu,
                                      const DiscreteMeasure& nu,
                                      const MaxSlicedConfig& cfg) {
    const int d = mu.dim();
    MaxSlicedResult out;
    const std::size_t R =
        cfg.restarts > 0 ? cfg.restarts : 16 + 8 * static_cast<std::size_t>(d);

    // starting directions: deterministic unit samples, the first few replaced
    // by dominant atom-difference directions when the supports are small
    std::vector<std::vector<double>> starts(R);
    for (std::size_t r = 0; r < R; ++r) {
        rng g(hash64(cfg.seed, 0x73746172ULL + r));
        starts[r] = g.unit_vector(d);
    }
    if (cfg.warm_starts &&
        static_cast<double>(mu.size()) * static_cast<double>(nu.size()) <= 4e6) {
        struct cand {
            double len;
            std::vector<double> dir;
        };
        std::vector<cand> cands;
        for (int i = 0; i < mu.size(); ++i)
            for (int j = 0; j < nu.size(); ++j) {
                std::vector<double> v(static_cast<std::size_t>(d));
                const double* x = mu.point(i);
                const double* y = nu.point(j);
                double len = 0.0;
                for (int k = 0; k < d; ++k) {
                    v[static_cast<std::size_t>(k)] = x[k] - y[k];
                    len += v[static_cast<std::size_t>(k)] * v[static_cast<std::size_t>(k)];
                }
                if (len > 1e-20) cands.push_back({len, std::move(v)});
            }
        std::stable_sort(cands.begin(), cands.end(),
                         [](const cand& a, const cand& b) { return a.len > b.len; });
        const std::size_t warm = std::min<std::size_t>({3, cands.size(), R});
        for (std::size_t w = 0; w < warm; ++w) {
            std::vector<double> v = cands[w].dir;
            if (detail::normalize_in_place(v)) starts[w] = std::move(v);
        }
    }

    struct run_result {
        double value = -1.0;
        std::vector<double> direction;
        RestartRecord record;
    };
    std::vector<run_result> runs(R);

    const int threads = resolve_threads(cfg.threads);
    parallel_for(R, threads, [&](std::size_t r) {
        detail::slice_workspace ws;
        std::vector<double> theta = starts[r];
        std::vector<double> grad;
        double best_v = -1.0;
        std::vector<double> best_theta = theta;
        std::size_t stall = 0;
        for (std::size_t it = 1; it <= cfg.max_iterations; ++it) {
            const double v = detail::sliced_coupling(mu, nu, theta, ws, &grad);
            if (v > best_v + cfg.improve_tol) {
                best_v = v;
                best_theta = theta;
                stall = 0;
            } else if (++stall >= cfg.patience) {
                break;
            }
            const double step = 0.5 / std::sqrt(static_cast<double>(it));
            std::vector<double> next = theta;
            for (int k = 0; k < d; ++k)
                next[static_cast<std::size_t>(k)] += step * grad[static_cast<std::size_t>(k)];
            if (!detail::normalize_in_place(next)) break; // measures coincide
            theta = std::move(next);
        }
        if (best_v < 0.0)
            best_v = detail::sliced_coupling(mu, nu, best_theta, ws, nullptr);

        // kink polish: the diminishing-step loop stalls at its final step size
        // when the maximizer sits on a crease of the piecewise objective, so
        // halve a tangential probe until the value stops responding
        std::vector<double> tang(static_cast<std::size_t>(d));
        auto refresh_tangent = [&]() -> bool {
            detail::sliced_coupling(mu, nu, best_theta, ws, &grad);
            double along = 0.0;
            for (int k = 0; k < d; ++k)
                along += grad[static_cast<std::size_t>(k)] *
                         best_theta[static_cast<std::size_t>(k)];
            for (int k = 0; k < d; ++k)
                tang[static_cast<std::size_t>(k)] =
                    grad[static_cast<std::size_t>(k)] -
                    along * best_theta[static_cast<std::size_t>(k)];
            return detail::normalize_in_place(tang);
        };
        double pstep = 0.05;
        int probes = 0;
        bool live = refresh_tangent();
        while (live && pstep > 1e-13 && probes < 256) {
            std::vector<double> cand = best_theta;
            for (int k = 0; k < d; ++k)
                cand[static_cast<std::size_t>(k)] +=
                    pstep * tang[static_cast<std::size_t>(k)];
            if (!detail::normalize_in_place(cand)) break;
            const double v = detail::sliced_coupling(mu, nu, cand, ws, nullptr);
            ++probes;
            if (v > best_v) {
                best_v = v;
                best_theta = std::move(cand);
                live = refresh_tangent();
            } else {
                pstep *= 0.5;
            }
        }

        runs[r].value = best_v;
        runs[r].direction = std::move(best_theta);
        runs[r].record = {starts[r], best_v};
    });

    // fold in restart order so ties resolve identically at any thread count
    double best = -1.0;
    std::vector<double> best_dir;
    for (std::size_t r = 0; r < R; ++r) {
        out.trace.push_back(runs[r].record);
        const std::vector<double> canon =
            Direction::normalized(runs[r].direction).canonical().components();
        if (runs[r].value > best + 1e-12) {
            best = runs[r].value;
            best_dir = canon;
        } else if (std::abs(runs[r].value - best) <= 1e-12 &&
                   detail::lex_less(canon, best_dir)) {
            best_dir = canon;
        }
    }

    out.restarts_used = R;
    out.direction = best_dir;
    slice_workspace ws_final;
    out.value = sliced_coupling(mu, nu, out.direction, ws_final, nullptr);
    return out;
}

} // namespace detail

// Max-sliced distance by multi-start supergradient ascent on the sphere with
// a diminishing step and a halving polish. Supports are rescaled by a power of
// two into the unit ball first, so the search path is exactly invariant under
// scaling both measures by powers of two and the step sizes have a uniform
// meaning. The returned value is re-evaluated from scratch in the original
// coordinates along the returned direction, so it is always a valid lower
// bound of the true maximum, whatever the ascent did.
inline MaxSlicedResult maxsliced_w1(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                    const MaxSlicedConfig& cfg = {}) {
    detail::check_pair(mu, nu, "maxsliced_w1");
    const int d = mu.dim();

    if (d == 1) {
        // only two directions exist; +1 is canonical and they share the value
        MaxSlicedResult out;
        detail::slice_workspace ws;
        std::vector<double> theta{1.0};
        out.value = detail::sliced_coupling(mu, nu, theta, ws, nullptr);
        out.direction = theta;
        out.restarts_used = 1;
        out.trace.push_back({theta, out.value});
        return out;
    }

    const double extent = std::max(mu.max_point_norm(), nu.max_point_norm());
    MaxSlicedResult out;
    if (extent > 0.0) {
        double scale = std::ldexp(1.0, std::ilogb(extent));
        if (scale < extent) scale *= 2.0;
        if (scale != 1.0) {
            out = detail::maxsliced_core(detail::scaled_copy(mu, 1.0 / scale),
                                         detail::scaled_copy(nu, 1.0 / scale), cfg);
            for (auto& rec : out.trace) rec.value *= scale;
        } else {
            out = detail::maxsliced_core(mu, nu, cfg);
        }
    } else {
        out = detail::maxsliced_core(mu, nu, cfg);
    }
    detail::slice_workspace ws;
    out.value = detail::sliced_coupling(mu, nu, out.direction, ws, nullptr);
    return out;
}

// Brute-force half-circle scan for plane measures; K evenly spaced angles.
inline double grid_oracle_2d(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                             std::size_t K) {
    detail::check_pair(mu, nu, "grid_oracle_2d");
    if (mu.dim() != 2) throw input_error("grid_oracle_2d: plane measures required");
    if (K < 4) throw input_error("grid_oracle_2d: need at least 4 angles");
    detail::slice_workspace ws;
    double best = 0.0;
    std::vector<double> theta(2);
    for (std::size_t k = 0; k < K; ++k) {
        const double ang =
            std::numbers::pi * static_cast<double>(k) / static_cast<double>(K);
        theta[0] = std::cos(ang);
        theta[1] = std::sin(ang);
        best = std::max(best, detail::sliced_coupling(mu, nu, theta, ws, nullptr));
    }
    return best;
}

} // namespace cwot

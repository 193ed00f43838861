#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "errors.hpp"
#include "measure.hpp"
#include "network_simplex.hpp"

namespace cwot {

struct PlanEntry {
    std::size_t i = 0, j = 0;
    double mass = 0.0;
};

// Optimal coupling plus the dual certificate that proves it optimal.
struct TransportPlan {
    std::vector<PlanEntry> coupling;
    std::vector<double> potentials_mu;  // u_i
    std::vector<double> potentials_nu;  // v_j
    double value = 0.0;
};

namespace detail {

// Least k <= 12 such that every weight of both measures is within 1e-9 of an
// integer multiple of 10^-k. Weights outside that family still work: the
// apportionment below keeps each atom's mass error under one grid unit.
inline int quantization_exponent(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
    // a scale fits only when every weight is (numerically) an exact multiple
    // of one grid unit; the tolerance is absolute in units, otherwise any
    // scale beyond 1e9 would spuriously accept every weight vector
    auto fits = [](const DiscreteMeasure& m, double scale) {
        for (int i = 0; i < m.size(); ++i) {
            double t = m.weight(i) * scale;
            if (std::abs(t - std::round(t)) > 1e-9) return false;
        }
        return true;
    };
    double scale = 1.0;
    for (int k = 0; k <= 12; ++k, scale *= 10.0)
        if (fits(mu, scale) && fits(nu, scale)) return k;
    return 12;
}

// Round weights to integer counts summing to exactly T, via largest
// remainders, so each atom is off by less than one grid unit.
inline std::vector<std::int64_t> apportion(const std::vector<double>& w, std::int64_t T) {
    const std::size_t n = w.size();
    std::vector<std::int64_t> units(n);
    std::vector<double> rem(n);
    std::int64_t used = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double t = w[i] * static_cast<double>(T);
        double f = std::floor(t);
        // guard against t sitting a hair below an integer
        if (t - f > 1.0 - 1e-9) f += 1.0;
        units[i] = static_cast<std::int64_t>(f);
        rem[i] = t - f;
        used += units[i];
    }
    std::int64_t K = T - used;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (K > 0) {
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return rem[a] > rem[b]; });
        for (std::size_t k = 0; k < static_cast<std::size_t>(K); ++k)
            units[order[k % n]] += 1;
    } else if (K < 0) {
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return rem[a] < rem[b]; });
        std::int64_t take = -K;
        while (take > 0) {
            bool any = false;
            for (std::size_t k = 0; k < n && take > 0; ++k) {
                if (units[order[k]] > 0) {
                    units[order[k]] -= 1;
                    --take;
                    any = true;
                }
            }
            if (!any) throw solver_error("apportion: cannot balance unit grid");
        }
    }
    return units;
}

inline std::int64_t grid_size(int k) {
    std::int64_t T = 1;
    for (int i = 0; i < k; ++i) T *= 10;
    return T;
}

} // namespace detail

// Signed certificate defect: plan cost minus the dual objective under the
// measures' own weights. Optimal plans make this nonnegative and tiny.
inline double duality_gap(const TransportPlan& plan, const DiscreteMeasure& mu,
                          const DiscreteMeasure& nu) {
    const int d = mu.dim();
    long double primal = 0.0L;
    for (const auto& e : plan.coupling)
        primal += static_cast<long double>(e.mass) *
                  point_dist(mu.point(static_cast<int>(e.i)),
                             nu.point(static_cast<int>(e.j)), d);
    long double dual = 0.0L;
    for (int i = 0; i < mu.size(); ++i)
        dual += static_cast<long double>(mu.weight(i)) *
                plan.potentials_mu[static_cast<std::size_t>(i)];
    for (int j = 0; j < nu.size(); ++j)
        dual -= static_cast<long double>(nu.weight(j)) *
                plan.potentials_nu[static_cast<std::size_t>(j)];
    return static_cast<double>(primal - dual);
}

namespace detail {

inline void certify_plan(const TransportPlan& plan, const DiscreteMeasure& mu,
                         const DiscreteMeasure& nu, double gap_units) {
    const int n = mu.size(), m = nu.size(), d = mu.dim();
    // marginals
    std::vector<long double> row(static_cast<std::size_t>(n), 0.0L);
    std::vector<long double> col(static_cast<std::size_t>(m), 0.0L);
    for (const auto& e : plan.coupling) {
        if (e.i >= static_cast<std::size_t>(n) || e.j >= static_cast<std::size_t>(m))
            throw solver_error("plan: entry out of range");
        row[e.i] += e.mass;
        col[e.j] += e.mass;
    }
    for (int i = 0; i < n; ++i)
        if (std::abs(static_cast<double>(row[static_cast<std::size_t>(i)]) - mu.weight(i)) >
            1e-9)
            throw solver_error("plan: first marginal off by more than 1e-9");
    for (int j = 0; j < m; ++j)
        if (std::abs(static_cast<double>(col[static_cast<std::size_t>(j)]) - nu.weight(j)) >
            1e-9)
            throw solver_error("plan: second marginal off by more than 1e-9");
    // dual feasibility everywhere
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j)
            if (plan.potentials_mu[static_cast<std::size_t>(i)] -
                    plan.potentials_nu[static_cast<std::size_t>(j)] >
                point_dist(mu.point(i), nu.point(j), d) + 1e-9)
                throw solver_error("plan: dual constraint violated beyond 1e-9");
    // complementary slackness on carried mass
    for (const auto& e : plan.coupling)
        if (e.mass > 1e-12 &&
            std::abs(point_dist(mu.point(static_cast<int>(e.i)),
                                nu.point(static_cast<int>(e.j)), d) -
                     (plan.potentials_mu[e.i] - plan.potentials_nu[e.j])) > 1e-9)
            throw solver_error("plan: complementary slackness violated beyond 1e-9");
    if (std::abs(gap_units) > 1e-8)
        throw solver_error("plan: duality gap " + std::to_string(gap_units) +
                           " exceeds 1e-8");
}

} // namespace detail

// Exact Kantorovich distance between discrete measures under the Euclidean
// ground cost, with an optimal plan and dual potentials. Weights are mapped
// to a common integer grid first, so grid-representable inputs are solved
// exactly and anything else inherits at most one grid unit of error per atom.
inline TransportPlan w1_exact(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
    if (mu.dim() != nu.dim())
        throw input_error("w1_exact: dimension mismatch");
    const int n = mu.size(), m = nu.size(), d = mu.dim();
    const int k = detail::quantization_exponent(mu, nu);
    const std::int64_t T = detail::grid_size(k);
    std::vector<std::int64_t> su = detail::apportion(mu.weights(), T);
    std::vector<std::int64_t> sv = detail::apportion(nu.weights(), T);

    // the solver wants strictly positive supplies; atoms lighter than one
    // grid unit are folded back in through the potentials afterwards
    std::vector<int> keep_i, keep_j;
    std::vector<std::int64_t> a, b;
    for (int i = 0; i < n; ++i)
        if (su[static_cast<std::size_t>(i)] > 0) {
            keep_i.push_back(i);
            a.push_back(su[static_cast<std::size_t>(i)]);
        }
    for (int j = 0; j < m; ++j)
        if (sv[static_cast<std::size_t>(j)] > 0) {
            keep_j.push_back(j);
            b.push_back(sv[static_cast<std::size_t>(j)]);
        }
    if (keep_i.empty() || keep_j.empty())
        throw solver_error("w1_exact: all atoms below grid resolution");

    const double diam = mu.max_point_norm() + nu.max_point_norm();
    auto cost = [&mu, &nu, &keep_i, &keep_j, d](int p, int q) {
        return point_dist(mu.point(keep_i[static_cast<std::size_t>(p)]),
                          nu.point(keep_j[static_cast<std::size_t>(q)]), d);
    };
    detail::transport_simplex<decltype(cost)> solver(
        static_cast<int>(keep_i.size()), static_cast<int>(keep_j.size()), a, b, cost, diam);
    solver.solve();

    TransportPlan plan;
    const double inv_T = 1.0 / static_cast<double>(T);
    plan.value = solver.total_cost() * inv_T;
    plan.coupling.reserve(solver.flows().size());
    for (const auto& f : solver.flows())
        plan.coupling.push_back({static_cast<std::size_t>(keep_i[static_cast<std::size_t>(f.i)]),
                                 static_cast<std::size_t>(keep_j[static_cast<std::size_t>(f.j)]),
                                 static_cast<double>(f.f) * inv_T});
    std::sort(plan.coupling.begin(), plan.coupling.end(),
              [](const PlanEntry& x, const PlanEntry& y) {
                  return x.i != y.i ? x.i < y.i : x.j < y.j;
              });

    const double nan = std::numeric_limits<double>::quiet_NaN();
    plan.potentials_mu.assign(static_cast<std::size_t>(n), nan);
    plan.potentials_nu.assign(static_cast<std::size_t>(m), nan);
    for (std::size_t p = 0; p < keep_i.size(); ++p)
        plan.potentials_mu[static_cast<std::size_t>(keep_i[p])] = solver.pi_source()[p];
    for (std::size_t q = 0; q < keep_j.size(); ++q)
        plan.potentials_nu[static_cast<std::size_t>(keep_j[q])] = solver.pi_sink()[q];
    // dropped sinks: tightest value keeping every u_i - v_j <= c_ij feasible
    for (int j = 0; j < m; ++j) {
        if (!std::isnan(plan.potentials_nu[static_cast<std::size_t>(j)])) continue;
        double v = -std::numeric_limits<double>::infinity();
        for (int i : keep_i)
            v = std::max(v, plan.potentials_mu[static_cast<std::size_t>(i)] -
                                point_dist(mu.point(i), nu.point(j), d));
        plan.potentials_nu[static_cast<std::size_t>(j)] = v;
    }
    // dropped sources, against the now-complete sink side
    for (int i = 0; i < n; ++i) {
        if (!std::isnan(plan.potentials_mu[static_cast<std::size_t>(i)])) continue;
        double u = std::numeric_limits<double>::infinity();
        for (int j = 0; j < m; ++j)
            u = std::min(u, plan.potentials_nu[static_cast<std::size_t>(j)] +
                                point_dist(mu.point(i), nu.point(j), d));
        plan.potentials_mu[static_cast<std::size_t>(i)] = u;
    }

    // primal minus dual in exact grid units; the hub potentials cancel since
    // every hub arc carries zero flow at the optimum
    const double gap_units = (solver.total_cost() - solver.dual_value_units()) * inv_T;
    detail::certify_plan(plan, mu, nu, gap_units);
    return plan;
}

// ---------------------------------------------------------------------------
// Truncated transport distance:
//
//   W_r(mu, nu) = sup { |sum u d(mu - nu)| : u 1-Lipschitz, |u(z)| <= (r-|z|)^+ }
//
// over the supports, |z| Euclidean. The cap lets mass appear or vanish at the
// ball boundary for the price of the cap, so the sup equals a min-cost flow
// with one inlet node feeding the nu side and one outlet node draining the mu
// side, both at cost phi(z) = (r-|z|)^+, with spare capacity to absorb either
// support entirely. A function on the supports obeying the pairwise Lipschitz
// bounds and the cap extends to an admissible function on all of R^d (shortest
// extension clipped by the cap), so the finite LP carries the full supremum.

struct TruncatedResult {
    double value = 0.0;
    double radius = 0.0;
    int dim = 0;
    bool anchored = false;
    // certificate snapshot: an admissible u with sum u d(mu-nu) = value,
    //   u(z) = max(-cap(z), min(cap(z), min_j anchor_j + |z - y_j|))
    std::vector<double> cert_anchor;  // per kept nu atom: offset q_j
    std::vector<double> cert_point;   // matching nu atom coordinates, row-major
};

namespace detail {

inline double cone_cap(double znorm, double r) { return std::max(0.0, r - znorm); }
inline double anchored_cap(double znorm, double r) {
    return std::min(cone_cap(znorm, r), znorm);
}

inline double cert_value(const TruncatedResult& res, const double* z) {
    const double znorm = point_norm(z, res.dim);
    const double cap =
        res.anchored ? anchored_cap(znorm, res.radius) : cone_cap(znorm, res.radius);
    double u = cap;
    for (std::size_t j = 0; j < res.cert_anchor.size(); ++j)
        u = std::min(u, res.cert_anchor[j] +
                            point_dist(z, res.cert_point.data() +
                                              j * static_cast<std::size_t>(res.dim),
                                       res.dim));
    return std::max(u, -cap);
}

template <class Cap>
TruncatedResult truncated_core(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                               double r, Cap cap, bool anchored) {
    if (mu.dim() != nu.dim())
        throw input_error("w1_truncated_dual: dimension mismatch");
    if (!(r > 0.0) || !std::isfinite(r))
        throw input_error("w1_truncated_dual: radius must be positive and finite");

    const int n = mu.size(), m = nu.size(), d = mu.dim();
    const int k = quantization_exponent(mu, nu);
    const std::int64_t T = grid_size(k);
    std::vector<std::int64_t> su = apportion(mu.weights(), T);
    std::vector<std::int64_t> sv = apportion(nu.weights(), T);

    std::vector<int> keep_i, keep_j;
    std::vector<std::int64_t> a, b;
    for (int i = 0; i < n; ++i)
        if (su[static_cast<std::size_t>(i)] > 0) {
            keep_i.push_back(i);
            a.push_back(su[static_cast<std::size_t>(i)]);
        }
    for (int j = 0; j < m; ++j)
        if (sv[static_cast<std::size_t>(j)] > 0) {
            keep_j.push_back(j);
            b.push_back(sv[static_cast<std::size_t>(j)]);
        }
    if (keep_i.empty() || keep_j.empty())
        throw solver_error("w1_truncated_dual: all atoms below grid resolution");
    const int M = static_cast<int>(keep_i.size());
    const int N = static_cast<int>(keep_j.size());

    // source M is the inlet (creates mass), sink N the outlet (destroys it)
    a.push_back(T);
    b.push_back(T);
    auto xp = [&mu, &keep_i](int p) { return mu.point(keep_i[static_cast<std::size_t>(p)]); };
    auto yq = [&nu, &keep_j](int q) { return nu.point(keep_j[static_cast<std::size_t>(q)]); };
    auto cost = [&](int p, int q) {
        if (p == M && q == N) return 0.0;
        if (p == M) return cap(point_norm(yq(q), d), r);
        if (q == N) return cap(point_norm(xp(p), d), r);
        return point_dist(xp(p), yq(q), d);
    };
    const double diam = mu.max_point_norm() + nu.max_point_norm() + r;
    transport_simplex<decltype(cost)> solver(M + 1, N + 1, a, b, cost, diam);
    solver.solve();

    TruncatedResult res;
    res.radius = r;
    res.dim = d;
    res.anchored = anchored;
    res.value = solver.total_cost() / static_cast<double>(T);

    // dual potentials to an admissible test function: shift so inlet and
    // outlet sit symmetrically, then clamp each sink offset into the cap
    const double mid = 0.5 * (solver.pi_source()[static_cast<std::size_t>(M)] +
                              solver.pi_sink()[static_cast<std::size_t>(N)]);
    res.cert_anchor.reserve(static_cast<std::size_t>(N));
    res.cert_point.reserve(static_cast<std::size_t>(N) * static_cast<std::size_t>(d));
    for (int q = 0; q < N; ++q) {
        const double off = solver.pi_sink()[static_cast<std::size_t>(q)] - mid;
        res.cert_anchor.push_back(std::max(off, -cap(point_norm(yq(q), d), r)));
        res.cert_point.insert(res.cert_point.end(), yq(q), yq(q) + d);
    }

    // the certificate must reproduce the optimum on the original weights
    long double pairing = 0.0L;
    for (int i = 0; i < n; ++i)
        pairing += static_cast<long double>(mu.weight(i)) * cert_value(res, mu.point(i));
    for (int j = 0; j < m; ++j)
        pairing -= static_cast<long double>(nu.weight(j)) * cert_value(res, nu.point(j));
    const double defect = std::abs(static_cast<double>(pairing) - res.value);
    if (defect > 1e-9 * std::max(1.0, r))
        throw solver_error("w1_truncated_dual: certificate mismatch " +
                           std::to_string(defect));
    return res;
}

} // namespace detail

// Truncated distance: test functions are 1-Lipschitz, vanish outside the ball
// of radius r and stay under the cap (r - |z|)^+.
inline TruncatedResult w1_truncated_dual_full(const DiscreteMeasure& mu,
                                              const DiscreteMeasure& nu, double r) {
    return detail::truncated_core(
        mu, nu, r, [](double znorm, double rr) { return detail::cone_cap(znorm, rr); },
        false);
}

inline double w1_truncated_dual(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                double r) {
    return w1_truncated_dual_full(mu, nu, r).value;
}

// Variant that additionally pins u(0) = 0, i.e. cap min{(r-|z|)^+, |z|}; kept
// to measure how much that pin changes the value.
inline TruncatedResult w1_truncated_dual_anchored(const DiscreteMeasure& mu,
                                                  const DiscreteMeasure& nu, double r) {
    return detail::truncated_core(
        mu, nu, r, [](double znorm, double rr) { return detail::anchored_cap(znorm, rr); },
        true);
}

// Evaluate the certificate function carried by a truncated solve.
inline double truncated_certificate(const TruncatedResult& res,
                                    const std::vector<double>& z) {
    if (static_cast<int>(z.size()) != res.dim)
        throw input_error("truncated_certificate: dimension mismatch");
    return detail::cert_value(res, z.data());
}

} // namespace cwot

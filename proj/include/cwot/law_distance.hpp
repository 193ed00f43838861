#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <vector>

#include "errors.hpp"
#include "measure.hpp"
#include "rng.hpp"
#include "sampling.hpp"

namespace cwot {

namespace detail {

// integral of |c - F| over [a, b] for constant c, F the law cdf; exact via
// the cdf antiderivative, splitting once at the quantile when F crosses c
inline double segment_against_law(const ProjectedLaw& law, double a, double b, double c) {
    if (!(b > a)) return 0.0;
    const double Fa = law.cdf(a), Fb = law.cdf(b);
    const double Aa = law.cdf_antiderivative(a), Ab = law.cdf_antiderivative(b);
    if (c <= Fa) return (Ab - Aa) - c * (b - a);
    if (c >= Fb) return c * (b - a) - (Ab - Aa);
    double xs = law.quantile(c);
    xs = std::min(std::max(xs, a), b);
    const double As = law.cdf_antiderivative(xs);
    return (c * (xs - a) - (As - Aa)) + ((Ab - As) - c * (b - xs));
}

} // namespace detail

// W1 between a weighted sample on the line and the continuous law, computed
// as the exact area between the two distribution functions. Values need not
// be sorted; weights are taken as given (callers pass probability vectors).
inline double w1_empirical_vs_law(const std::vector<double>& values,
                                  const std::vector<double>& weights,
                                  const ProjectedLaw& law) {
    if (values.empty() || values.size() != weights.size())
        throw input_error("w1_empirical_vs_law: bad sample arrays");
    const std::size_t n = values.size();
    std::vector<std::size_t> ord(n);
    std::iota(ord.begin(), ord.end(), std::size_t{0});
    std::sort(ord.begin(), ord.end(), [&](std::size_t a, std::size_t b) {
        return values[a] != values[b] ? values[a] < values[b] : a < b;
    });
    double total = 0.0;
    double c = 0.0;
    double prev = std::min(-1.0, values[ord[0]]);
    for (std::size_t k = 0; k < n; ++k) {
        const double x = values[ord[k]];
        total += detail::segment_against_law(law, prev, x, c);
        c += weights[ord[k]];
        prev = x;
    }
    total += detail::segment_against_law(law, prev, std::max(1.0, prev), c);
    return total;
}

inline double w1_empirical_vs_law(const DiscreteMeasure& mu, const ProjectedLaw& law) {
    if (mu.dim() != 1) throw input_error("w1_empirical_vs_law: 1D measure required");
    return w1_empirical_vs_law(mu.flat_points(), mu.weights(), law);
}

struct ProjectedSupResult {
    double value = 0.0;
    std::vector<double> direction;
};

namespace detail {

// J(theta) = W1(theta # mu, law) together with a search direction
//   g = sum_k sigma_k x_(k),  sigma_k = 2 clamp(F(p_k), c_{k-1}, c_k) - c_{k-1} - c_k,
// the derivative of the area through the moving breakpoints p_k = <x_(k), theta>.
inline double law_slice(const DiscreteMeasure& mu, const ProjectedLaw& law,
                        const std::vector<double>& theta, std::vector<double>* grad) {
    const int n = mu.size(), d = mu.dim();
    std::vector<double> proj(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        proj[static_cast<std::size_t>(i)] = dot(mu.point(i), theta);
    std::vector<int> ord(static_cast<std::size_t>(n));
    std::iota(ord.begin(), ord.end(), 0);
    std::sort(ord.begin(), ord.end(), [&](int a, int b) {
        const double pa = proj[static_cast<std::size_t>(a)];
        const double pb = proj[static_cast<std::size_t>(b)];
        return pa != pb ? pa < pb : a < b;
    });
    if (grad) grad->assign(static_cast<std::size_t>(d), 0.0);
    double total = 0.0, c = 0.0;
    double prev = std::min(-1.0, proj[static_cast<std::size_t>(ord[0])]);
    for (int k = 0; k < n; ++k) {
        const int i = ord[static_cast<std::size_t>(k)];
        const double x = proj[static_cast<std::size_t>(i)];
        total += segment_against_law(law, prev, x, c);
        const double lo = c;
        c += mu.weight(i);
        if (grad) {
            const double f = law.cdf(x);
            const double sigma = 2.0 * std::min(std::max(f, lo), c) - lo - c;
            const double* xi = mu.point(i);
            for (int t = 0; t < d; ++t)
                (*grad)[static_cast<std::size_t>(t)] += sigma * xi[t];
        }
        prev = x;
    }
    total += segment_against_law(law, prev, std::max(1.0, prev), c);
    return total;
}

inline bool law_normalize(std::vector<double>& v) {
    double s = 0.0;
    for (double c : v) s += c * c;
    if (s <= 1e-24) return false;
    const double inv = 1.0 / std::sqrt(s);
    for (double& c : v) c *= inv;
    return true;
}

} // namespace detail

// sup over unit directions of W1(theta # mu, law of <X, theta>), the law
// being rotation invariant. Dimension dispatch: 1D compares both signs, the
// plane scans theta_budget angles around the whole circle, higher dimensions
// run multi-start ascent with theta_budget starts.
inline ProjectedSupResult sup_projected_law_distance(const DiscreteMeasure& mu,
                                                     const ProjectedLaw& law,
                                                     std::size_t theta_budget,
                                                     std::uint64_t seed) {
    const int d = mu.dim();
    if (theta_budget < 1)
        throw input_error("sup_projected_law_distance: empty direction budget");
    ProjectedSupResult out;

    if (d == 1) {
        const double plus = detail::law_slice(mu, law, {1.0}, nullptr);
        const double minus = detail::law_slice(mu, law, {-1.0}, nullptr);
        if (plus >= minus) {
            out.value = plus;
            out.direction = {1.0};
        } else {
            out.value = minus;
            out.direction = {-1.0};
        }
        return out;
    }

    if (d == 2) {
        std::vector<double> theta(2);
        for (std::size_t k = 0; k < theta_budget; ++k) {
            const double ang = 2.0 * std::numbers::pi * static_cast<double>(k) /
                               static_cast<double>(theta_budget);
            theta[0] = std::cos(ang);
            theta[1] = std::sin(ang);
            const double v = detail::law_slice(mu, law, theta, nullptr);
            if (v > out.value || out.direction.empty()) {
                out.value = v;
                out.direction = theta;
            }
        }
        return out;
    }

    std::vector<double> grad;
    for (std::size_t r = 0; r < theta_budget; ++r) {
        rng g(hash64(seed, 0x6c617773ULL + r));
        std::vector<double> theta = g.unit_vector(d);
        double best_v = -1.0;
        std::vector<double> best_theta = theta;
        std::size_t stall = 0;
        for (std::size_t it = 1; it <= 200; ++it) {
            const double v = detail::law_slice(mu, law, theta, &grad);
            if (v > best_v + 1e-10) {
                best_v = v;
                best_theta = theta;
                stall = 0;
            } else if (++stall >= 5) {
                break;
            }
            const double step = 0.5 / std::sqrt(static_cast<double>(it));
            for (int t = 0; t < d; ++t)
                theta[static_cast<std::size_t>(t)] += step * grad[static_cast<std::size_t>(t)];
            if (!detail::law_normalize(theta)) break;
        }
        if (best_v > out.value || out.direction.empty()) {
            out.value = best_v;
            out.direction = best_theta;
        }
    }
    // evaluate once more from scratch so the reported pair is consistent
    out.value = detail::law_slice(mu, law, out.direction, nullptr);
    return out;
}

} // namespace cwot

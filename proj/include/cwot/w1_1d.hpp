#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "errors.hpp"
#include "measure.hpp"

namespace cwot {

namespace detail {

// exact integral of |F - G| for pre-sorted weighted supports; the integrand
// is constant between consecutive support points
inline double w1_1d_sorted(const double* xa, const double* wa, int n, const double* xb,
                           const double* wb, int m) {
    double total = 0.0, cum = 0.0;
    double prev = 0.0;
    bool first = true;
    int i = 0, j = 0;
    while (i < n || j < m) {
        double x;
        double w;
        if (j >= m || (i < n && xa[i] <= xb[j])) {
            x = xa[i];
            w = wa[i];
            ++i;
        } else {
            x = xb[j];
            w = -wb[j];
            ++j;
        }
        if (!first) total += std::abs(cum) * (x - prev);
        first = false;
        cum += w;
        prev = x;
    }
    return total;
}

} // namespace detail

// exact 1d Kantorovich distance between discrete measures via a single
// merged CDF sweep; O((n+m) log(n+m)) worst case, linear here because
// measures keep their atoms sorted
inline double w1_1d(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
    if (mu.dim() != 1 || nu.dim() != 1)
        throw input_error("w1_1d: both measures must be 1-dimensional");
    return detail::w1_1d_sorted(mu.flat_points().data(), mu.weights().data(), mu.size(),
                                nu.flat_points().data(), nu.weights().data(), nu.size());
}

} // namespace cwot

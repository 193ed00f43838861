#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "errors.hpp"
#include "max_sliced.hpp"
#include "measure.hpp"
#include "transport.hpp"

namespace cwot {

// alpha = 2 / (d p* + 2) with p* = p / (p - 1); p = infinity gives p* = 1
inline double alpha_exponent(double p, int d) {
    if (d < 1) throw input_error("alpha_exponent: dimension must be at least 1");
    if (p == p_infinity) return 2.0 / (static_cast<double>(d) + 2.0);
    if (!(p > 1.0)) throw input_error("alpha_exponent: p must exceed 1 or be infinite");
    const double pstar = p / (p - 1.0);
    return 2.0 / (static_cast<double>(d) * pstar + 2.0);
}

// 18 b^{1-alpha} M^alpha; the full-dimensional distance never exceeds this
// when b bounds the p-th moment norms and M the max-sliced distance
inline double cw_upper_bound(double b, double M, double p, int d) {
    if (!(b >= 0.0) || !(M >= 0.0))
        throw input_error("cw_upper_bound: b and M must be nonnegative");
    if (M > 2.0 * b + 1e-9)
        throw input_error("cw_upper_bound: sliced distance exceeds its 2b ceiling");
    const double alpha = alpha_exponent(p, d);
    if (M == 0.0) return 0.0;
    return 18.0 * std::pow(b, 1.0 - alpha) * std::pow(M, alpha);
}

// 18 sqrt(d) M^{1/(d+1)}
inline double isotropic_bound(int d, double M) {
    if (d < 1) throw input_error("isotropic_bound: dimension must be at least 1");
    if (!(M >= 0.0)) throw input_error("isotropic_bound: M must be nonnegative");
    if (M == 0.0) return 0.0;
    return 18.0 * std::sqrt(static_cast<double>(d)) *
           std::pow(M, 1.0 / (static_cast<double>(d) + 1.0));
}

struct BoundReport {
    double W = 0.0;      // exact distance
    double M = 0.0;      // max-sliced lower bound
    double b = 0.0;      // moment bound used
    double p = 2.0;      // moment order (p_infinity allowed)
    int d = 1;
    double alpha = 0.0;
    double bound = 0.0;  // 18 b^{1-alpha} M^alpha
    double ratio = 0.0;  // W / bound, 0/0 := 0
    bool holds = false;  // ratio <= 1 + 1e-9
};

// Checks the dimension-free comparison on a concrete pair: exact distance on
// the left, 18 b^{1-alpha} (max-sliced)^alpha on the right. M is found
// numerically from below, and the right side increases in M, so a failed
// check indicates a solver defect rather than a counterexample.
inline BoundReport verify_cw(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                             double p, int threads = 1) {
    if (mu.dim() != nu.dim()) throw input_error("verify_cw: dimension mismatch");
    BoundReport rep;
    rep.p = p;
    rep.d = mu.dim();
    rep.alpha = alpha_exponent(p, rep.d);
    rep.b = std::max(moment_norm(mu, p), moment_norm(nu, p));
    rep.W = w1_exact(mu, nu).value;
    MaxSlicedConfig cfg;
    cfg.seed = 0x63770001ULL; // pinned: reports must not depend on call context
    cfg.threads = threads;
    rep.M = maxsliced_w1(mu, nu, cfg).value;
    rep.bound = cw_upper_bound(rep.b, rep.M, p, rep.d);
    if (rep.bound == 0.0)
        rep.ratio = rep.W == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    else
        rep.ratio = rep.W / rep.bound;
    rep.holds = rep.ratio <= 1.0 + 1e-9;
    return rep;
}

struct CfBoundReport {
    double max_violation = 0.0;
    bool holds = false;
};

// Characteristic-function control: |cf_mu(t) - cf_nu(t)| <= 2 |t| M whenever
// M dominates the max-sliced distance. Callers must pass a genuine upper
// bound (the exact distance qualifies); a numerically-found lower bound of
// the sliced supremum would produce spurious violations.
inline CfBoundReport cf_bound_check(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                    double M, const std::vector<std::vector<double>>& t_list) {
    if (mu.dim() != nu.dim()) throw input_error("cf_bound_check: dimension mismatch");
    CfBoundReport rep;
    rep.max_violation = -std::numeric_limits<double>::infinity();
    if (t_list.empty()) throw input_error("cf_bound_check: empty frequency list");
    for (const auto& t : t_list) {
        if (static_cast<int>(t.size()) != mu.dim())
            throw input_error("cf_bound_check: frequency dimension mismatch");
        const ComplexValue fa = empirical_cf(mu, t);
        const ComplexValue fb = empirical_cf(nu, t);
        const double tnorm = point_norm(t.data(), static_cast<int>(t.size()));
        const double viol = std::abs(fa - fb) - 2.0 * tnorm * M;
        rep.max_violation = std::max(rep.max_violation, viol);
    }
    rep.holds = rep.max_violation <= 1e-9;
    return rep;
}

struct TruncationReport {
    double lhs = 0.0;   // exact distance
    double w_r = 0.0;   // truncated dual value
    double b = 0.0;     // moment bound used
    double rhs = 0.0;   // 3 w_r + 4 b (2b/r)^{p-1}
    double r = 0.0;
    double p = 0.0;
    bool holds = false; // lhs <= rhs + 1e-8
};

// Tail-vs-truncation control: the exact distance is covered by three times
// the truncated distance plus a moment tail term. Finite p > 1 only; the
// tail term degenerates otherwise.
inline TruncationReport truncation_bound_check(const DiscreteMeasure& mu,
                                               const DiscreteMeasure& nu, double p,
                                               double r) {
    if (mu.dim() != nu.dim())
        throw input_error("truncation_bound_check: dimension mismatch");
    if (!(p > 1.0) || p == p_infinity)
        throw input_error("truncation_bound_check: finite p > 1 required");
    if (!(r > 0.0)) throw input_error("truncation_bound_check: r must be positive");
    TruncationReport rep;
    rep.r = r;
    rep.p = p;
    rep.b = std::max(moment_norm(mu, p), moment_norm(nu, p));
    rep.lhs = w1_exact(mu, nu).value;
    rep.w_r = w1_truncated_dual(mu, nu, r);
    rep.rhs = 3.0 * rep.w_r + 4.0 * rep.b * std::pow(2.0 * rep.b / r, p - 1.0);
    rep.holds = rep.lhs <= rep.rhs + 1e-8;
    return rep;
}

} // namespace cwot

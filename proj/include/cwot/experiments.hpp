#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "bounds.hpp"
#include "errors.hpp"
#include "law_distance.hpp"
#include "max_sliced.hpp"
#include "measure.hpp"
#include "measure_io.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "sampling.hpp"
#include "transport.hpp"
#include "w1_1d.hpp"

namespace cwot {

struct SweepConfig {
    DistributionSpec spec;
    std::vector<int> n_grid;
    int trials = 1;
    std::size_t theta_budget = 0;  // 0 -> dimension-based default
    int reference_size = 0;        // 0 -> unset
    std::uint64_t seed = 0;
    int threads = 1;
};

struct RateRow {
    int n = 0;
    double mean = 0.0;
    double stderr_mean = 0.0;
    int trials = 0;
};

struct RateTable {
    std::vector<RateRow> rows;
    double slope = std::numeric_limits<double>::quiet_NaN();
    double slope_se = std::numeric_limits<double>::quiet_NaN();
    double intercept = std::numeric_limits<double>::quiet_NaN();
    bool degenerate = false;  // some mean vanished; no log-log fit possible
    std::string note;
};

namespace detail {

inline void validate_sweep(const SweepConfig& cfg, bool reference_required) {
    if (cfg.n_grid.empty()) throw input_error("sweep: empty size grid");
    for (std::size_t i = 0; i < cfg.n_grid.size(); ++i) {
        if (cfg.n_grid[i] < 2) throw input_error("sweep: sizes must be at least 2");
        if (i > 0 && cfg.n_grid[i] <= cfg.n_grid[i - 1])
            throw input_error("sweep: size grid must increase strictly");
    }
    if (cfg.trials < 1) throw input_error("sweep: trials must be at least 1");
    const bool uses_reference = reference_required || cfg.reference_size > 0;
    if (reference_required && cfg.reference_size <= 0)
        throw input_error("sweep: reference size required");
    if (uses_reference && cfg.reference_size > 0 &&
        cfg.reference_size < 16 * cfg.n_grid.back())
        throw input_error("sweep: reference size must be at least 16x the largest n");
}

inline std::uint64_t trial_seed(std::uint64_t seed, int n, int t) {
    return hash64(hash64(seed, static_cast<std::uint64_t>(n)),
                  static_cast<std::uint64_t>(t));
}

inline DistributionSpec reseed(const DistributionSpec& s, std::uint64_t seed) {
    return DistributionSpec::make(s.family, s.dim, s.params, seed);
}

constexpr std::uint64_t reference_tag = 0x726566ULL;

inline std::size_t direction_budget(const SweepConfig& cfg) {
    if (cfg.spec.dim == 2) return 512;  // certified plane grid
    if (cfg.theta_budget > 0) return cfg.theta_budget;
    return 16 + 8 * static_cast<std::size_t>(cfg.spec.dim);
}

// mean and standard error (sample sd / sqrt(count)) folding in index order
inline RateRow aggregate_row(int n, const std::vector<double>& vals) {
    RateRow row;
    row.n = n;
    row.trials = static_cast<int>(vals.size());
    long double s = 0.0L;
    for (double v : vals) s += v;
    const double mean = static_cast<double>(s / static_cast<long double>(vals.size()));
    long double q = 0.0L;
    for (double v : vals) q += (v - mean) * (v - mean);
    row.mean = mean;
    row.stderr_mean =
        vals.size() > 1
            ? std::sqrt(static_cast<double>(q) /
                        (static_cast<double>(vals.size() - 1) * static_cast<double>(vals.size())))
            : 0.0;
    return row;
}

inline void fit_loglog(RateTable& table) {
    const std::size_t k = table.rows.size();
    for (const auto& r : table.rows)
        if (!(r.mean > 0.0)) {
            table.degenerate = true;
            return;
        }
    if (k < 2) {
        table.degenerate = true;
        return;
    }
    std::vector<double> xs(k), ys(k);
    for (std::size_t i = 0; i < k; ++i) {
        xs[i] = std::log(static_cast<double>(table.rows[i].n));
        ys[i] = std::log(table.rows[i].mean);
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(k);
    my /= static_cast<double>(k);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    table.slope = sxy / sxx;
    table.intercept = my - table.slope * mx;
    double rss = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double e = ys[i] - (table.intercept + table.slope * xs[i]);
        rss += e * e;
    }
    table.slope_se =
        k > 2 ? std::sqrt(rss / (static_cast<double>(k - 2) * sxx)) : 0.0;
}

// Runs fn(n, trial) over the whole (size, trial) grid in parallel and folds
// the per-trial values in ascending trial order per size.
template <class Fn>
std::vector<RateRow> sweep_rows(const SweepConfig& cfg, Fn&& fn) {
    const std::size_t G = cfg.n_grid.size();
    const std::size_t Tr = static_cast<std::size_t>(cfg.trials);
    std::vector<double> slots(G * Tr, 0.0);
    const int threads = resolve_threads(cfg.threads);
    parallel_for(G * Tr, threads, [&](std::size_t idx) {
        const std::size_t gi = idx / Tr;
        const int t = static_cast<int>(idx % Tr);
        slots[idx] = fn(cfg.n_grid[gi], t);
    });
    std::vector<RateRow> rows;
    rows.reserve(G);
    for (std::size_t gi = 0; gi < G; ++gi) {
        std::vector<double> vals(slots.begin() + static_cast<std::ptrdiff_t>(gi * Tr),
                                 slots.begin() + static_cast<std::ptrdiff_t>((gi + 1) * Tr));
        rows.push_back(aggregate_row(cfg.n_grid[gi], vals));
    }
    return rows;
}

// sup over directions of the distance between projected sample and target,
// against the closed-form law when available, else against a fresh reference
// sample of the configured size.
inline double projected_sup_trial(const SweepConfig& cfg, int n, int t, bool oracle) {
    const std::uint64_t st = trial_seed(cfg.seed, n, t);
    const DiscreteMeasure mu_n = sample_empirical(reseed(cfg.spec, st), n);
    const std::size_t budget = direction_budget(cfg);
    if (oracle) {
        const ProjectedLaw law = projected_law(cfg.spec);
        return sup_projected_law_distance(mu_n, law, budget, st).value;
    }
    const DiscreteMeasure mu_ref =
        sample_empirical(reseed(cfg.spec, hash64(st, reference_tag)), cfg.reference_size);
    if (cfg.spec.dim == 2) return grid_oracle_2d(mu_n, mu_ref, budget);
    MaxSlicedConfig ms;
    ms.restarts = budget;
    ms.seed = st;
    return maxsliced_w1(mu_n, mu_ref, ms).value;
}

inline double full_distance_trial(const SweepConfig& cfg, int n, int t) {
    const std::uint64_t st = trial_seed(cfg.seed, n, t);
    const DiscreteMeasure mu_n = sample_empirical(reseed(cfg.spec, st), n);
    const DiscreteMeasure mu_ref =
        sample_empirical(reseed(cfg.spec, hash64(st, reference_tag)), cfg.reference_size);
    if (cfg.spec.dim == 1) return w1_1d(mu_n, mu_ref);
    return w1_exact(mu_n, mu_ref).value;
}

} // namespace detail

// Monte Carlo decay of sup_theta W1(projected sample, projected target) in n.
inline RateTable projection_rate_sweep(const SweepConfig& cfg) {
    const bool oracle = has_projection_oracle(cfg.spec);
    if (!oracle && cfg.reference_size <= 0)
        throw input_error(
            "projection_rate_sweep: family lacks a projected quantile rule and no "
            "reference size is set");
    detail::validate_sweep(cfg, !oracle);
    RateTable table;
    table.rows = detail::sweep_rows(cfg, [&](int n, int t) {
        return detail::projected_sup_trial(cfg, n, t, oracle);
    });
    detail::fit_loglog(table);
    table.note = oracle ? "projected target evaluated through its quantile rule"
                        : "projected target approximated by a fresh reference sample "
                          "per trial; adds O(m^{-1/2}) bias";
    return table;
}

// Monte Carlo decay of the full-dimensional distance in n, against a fresh
// reference sample per trial standing in for the continuous target.
inline RateTable full_rate_sweep(const SweepConfig& cfg) {
    detail::validate_sweep(cfg, true);
    RateTable table;
    table.rows = detail::sweep_rows(
        cfg, [&](int n, int t) { return detail::full_distance_trial(cfg, n, t); });
    detail::fit_loglog(table);
    table.note =
        "two-sample proxy: distances measured against a finite reference sample "
        "overestimate the continuous-target distance by O(m^{-1/d})";
    return table;
}

struct TransferRow {
    int n = 0;
    double full_mean = 0.0;
    double full_se = 0.0;
    double proj_mean = 0.0;
    double proj_se = 0.0;
    double rhs = 0.0;    // 18 * proj_mean^alpha
    double ratio = 0.0;  // full_mean / rhs, 0/0 := 0
    double tol = 0.0;    // 3 * combined standard error of the ratio
};

struct TransferReport {
    double alpha = 0.0;
    std::vector<TransferRow> rows;
    double worst_ratio = 0.0;
    bool holds = false;
    std::string note;
};

// Checks that mean full-dimensional distances stay under 18 times the
// alpha-th power of the mean projected supremum, alpha = 2/(d+2). Both sides
// share each trial's sample; the inner supremum is found from below, which
// inflates ratios, so the allowance is three combined standard errors.
inline TransferReport concavity_transfer_check(const SweepConfig& cfg) {
    detail::validate_sweep(cfg, true);
    const bool oracle = has_projection_oracle(cfg.spec);
    const int d = cfg.spec.dim;
    TransferReport rep;
    rep.alpha = alpha_exponent(p_infinity, d);

    const std::size_t G = cfg.n_grid.size();
    const std::size_t Tr = static_cast<std::size_t>(cfg.trials);
    std::vector<double> full_slots(G * Tr, 0.0), proj_slots(G * Tr, 0.0);
    const int threads = resolve_threads(cfg.threads);
    parallel_for(G * Tr, threads, [&](std::size_t idx) {
        const std::size_t gi = idx / Tr;
        const int t = static_cast<int>(idx % Tr);
        const int n = cfg.n_grid[gi];
        const std::uint64_t st = detail::trial_seed(cfg.seed, n, t);
        const DiscreteMeasure mu_n = sample_empirical(detail::reseed(cfg.spec, st), n);
        const DiscreteMeasure mu_ref = sample_empirical(
            detail::reseed(cfg.spec, hash64(st, detail::reference_tag)),
            cfg.reference_size);
        full_slots[idx] =
            d == 1 ? w1_1d(mu_n, mu_ref) : w1_exact(mu_n, mu_ref).value;
        const std::size_t budget = detail::direction_budget(cfg);
        if (oracle) {
            proj_slots[idx] =
                sup_projected_law_distance(mu_n, projected_law(cfg.spec), budget, st)
                    .value;
        } else if (d == 2) {
            proj_slots[idx] = grid_oracle_2d(mu_n, mu_ref, budget);
        } else {
            MaxSlicedConfig ms;
            ms.restarts = budget;
            ms.seed = st;
            proj_slots[idx] = maxsliced_w1(mu_n, mu_ref, ms).value;
        }
    });

    rep.worst_ratio = 0.0;
    bool all_hold = true;
    for (std::size_t gi = 0; gi < G; ++gi) {
        std::vector<double> fv(full_slots.begin() + static_cast<std::ptrdiff_t>(gi * Tr),
                               full_slots.begin() + static_cast<std::ptrdiff_t>((gi + 1) * Tr));
        std::vector<double> pv(proj_slots.begin() + static_cast<std::ptrdiff_t>(gi * Tr),
                               proj_slots.begin() + static_cast<std::ptrdiff_t>((gi + 1) * Tr));
        const RateRow fr = detail::aggregate_row(cfg.n_grid[gi], fv);
        const RateRow pr = detail::aggregate_row(cfg.n_grid[gi], pv);
        TransferRow row;
        row.n = fr.n;
        row.full_mean = fr.mean;
        row.full_se = fr.stderr_mean;
        row.proj_mean = pr.mean;
        row.proj_se = pr.stderr_mean;
        row.rhs = pr.mean > 0.0 ? 18.0 * std::pow(pr.mean, rep.alpha) : 0.0;
        if (row.rhs == 0.0) {
            row.ratio = fr.mean == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
            row.tol = 0.0;
        } else {
            row.ratio = fr.mean / row.rhs;
            const double rel_full = fr.mean > 0.0 ? fr.stderr_mean / fr.mean : 0.0;
            const double rel_proj = pr.mean > 0.0 ? pr.stderr_mean / pr.mean : 0.0;
            row.tol = 3.0 * row.ratio *
                      std::sqrt(rel_full * rel_full +
                                rep.alpha * rep.alpha * rel_proj * rel_proj);
        }
        rep.worst_ratio = std::max(rep.worst_ratio, row.ratio);
        if (!(row.ratio <= 1.0 + row.tol)) all_hold = false;
        rep.rows.push_back(row);
    }
    rep.holds = all_hold;
    rep.note =
        "inner supremum estimated from below; allowance is three combined "
        "standard errors";
    return rep;
}

struct RatioScanReport {
    std::vector<RateRow> rows;  // per-size mean ratios
    double slope = std::numeric_limits<double>::quiet_NaN();
    double slope_se = std::numeric_limits<double>::quiet_NaN();
    double intercept = std::numeric_limits<double>::quiet_NaN();
    bool degenerate = false;
    double max_ratio = 0.0;
    bool holds = false;         // max_ratio <= 1 + 1e-9
    // argmax instance
    int argmax_pair = -1;
    int argmax_n = 0;
    int argmax_trial = -1;
    BoundReport argmax_report;
    std::string file_mu, file_nu;
};

// Empirical probe of how close random instance pairs get to the bound: runs
// verify_cw over `budget` sampled pairs, cycling the spec pairs and the size
// grid, tracks the maximum ratio and persists the argmax pair for replay.
inline RatioScanReport ratio_scan(
    const std::vector<std::pair<DistributionSpec, DistributionSpec>>& pairs, double p,
    int budget, std::uint64_t seed, const std::vector<int>& n_grid,
    const std::string& out_prefix, int threads = 1) {
    if (pairs.empty()) throw input_error("ratio_scan: no spec pairs");
    if (budget < 1) throw input_error("ratio_scan: budget must be at least 1");
    if (n_grid.empty()) throw input_error("ratio_scan: empty size grid");
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
        if (n_grid[i] < 2) throw input_error("ratio_scan: sizes must be at least 2");
        if (i > 0 && n_grid[i] <= n_grid[i - 1])
            throw input_error("ratio_scan: size grid must increase strictly");
    }

    const std::size_t P = pairs.size();
    const std::size_t G = n_grid.size();
    struct trial_out {
        double ratio = 0.0;
        std::size_t gi = 0;
    };
    std::vector<trial_out> outs(static_cast<std::size_t>(budget));
    const int nthreads = resolve_threads(threads);
    parallel_for(static_cast<std::size_t>(budget), nthreads, [&](std::size_t t) {
        const std::size_t pi = t % P;
        const std::size_t gi = (t / P) % G;
        const int n = n_grid[gi];
        const std::uint64_t base = hash64(seed, static_cast<std::uint64_t>(t));
        const DistributionSpec sa =
            detail::reseed(pairs[pi].first, hash64(base, pairs[pi].first.fingerprint()));
        const DistributionSpec sb =
            detail::reseed(pairs[pi].second, hash64(base, pairs[pi].second.fingerprint()));
        const DiscreteMeasure mu = sample_empirical(sa, n);
        const DiscreteMeasure nu = sample_empirical(sb, n);
        const BoundReport rep = verify_cw(mu, nu, p);
        outs[t] = {rep.ratio, gi};
    });

    RatioScanReport rep;
    // fold in trial order: argmax = first trial achieving the maximum
    double best = -1.0;
    std::size_t best_t = 0;
    std::vector<std::vector<double>> per_size(G);
    for (std::size_t t = 0; t < outs.size(); ++t) {
        per_size[outs[t].gi].push_back(outs[t].ratio);
        if (outs[t].ratio > best) {
            best = outs[t].ratio;
            best_t = t;
        }
    }
    rep.max_ratio = best;
    rep.holds = best <= 1.0 + 1e-9;

    for (std::size_t gi = 0; gi < G; ++gi)
        if (!per_size[gi].empty())
            rep.rows.push_back(detail::aggregate_row(n_grid[gi], per_size[gi]));
    RateTable fit_table;
    fit_table.rows = rep.rows;
    detail::fit_loglog(fit_table);
    rep.slope = fit_table.slope;
    rep.slope_se = fit_table.slope_se;
    rep.intercept = fit_table.intercept;
    rep.degenerate = fit_table.degenerate;

    // rebuild and persist the argmax pair
    {
        const std::size_t t = best_t;
        const std::size_t pi = t % P;
        const std::size_t gi = (t / P) % G;
        const int n = n_grid[gi];
        const std::uint64_t base = hash64(seed, static_cast<std::uint64_t>(t));
        const DistributionSpec sa =
            detail::reseed(pairs[pi].first, hash64(base, pairs[pi].first.fingerprint()));
        const DistributionSpec sb =
            detail::reseed(pairs[pi].second, hash64(base, pairs[pi].second.fingerprint()));
        const DiscreteMeasure mu = sample_empirical(sa, n);
        const DiscreteMeasure nu = sample_empirical(sb, n);
        rep.argmax_report = verify_cw(mu, nu, p);
        rep.argmax_pair = static_cast<int>(pi);
        rep.argmax_n = n;
        rep.argmax_trial = static_cast<int>(t);
        rep.file_mu = out_prefix + "_mu.msr";
        rep.file_nu = out_prefix + "_nu.msr";
        save_measure(rep.file_mu, mu);
        save_measure(rep.file_nu, nu);
    }
    return rep;
}

// shared CSV shape for all sweep-flavoured commands
inline void write_rate_csv(const std::string& path, const std::vector<RateRow>& rows) {
    std::ofstream out(path);
    if (!out) throw input_error("cannot open for writing: " + path);
    out << "n,mean,stderr,trials\n";
    for (const auto& r : rows)
        out << r.n << ',' << fmt_double(r.mean) << ',' << fmt_double(r.stderr_mean)
            << ',' << r.trials << '\n';
    if (!out) throw input_error("failed writing: " + path);
}

} // namespace cwot

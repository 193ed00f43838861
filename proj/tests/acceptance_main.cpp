// acceptance gate: run as `acceptance <1..9>`, one PASS/FAIL line per criterion
#include <cwot/cwot.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace cwot;

// pinned tolerances, one place only
constexpr double k1_oracle_tol = 1e-9;
constexpr double k1_brute_tol = 1e-10;
constexpr double k1_budget_s = 60.0;
constexpr double k2_marginal_tol = 1e-9;
constexpr double k2_feasibility_tol = 1e-9;
constexpr double k2_gap_tol = 1e-8;
constexpr double k3_sliced_slack = 1e-8;
constexpr double k4_replay_tol = 1e-9;
constexpr double k4_budget_s = 600.0;
constexpr double k5_monotone_slack = 1e-9;
constexpr double k5_saturation_tol = 1e-6;
constexpr double k6_cf_slack = 1e-9;
constexpr double k7_slope_lo = -0.6, k7_slope_hi = -0.4;
constexpr double k7_budget_s = 900.0;
constexpr double k8_d3_lo = -0.45, k8_d3_hi = -0.22;
constexpr double k8_d1_lo = -0.62, k8_d1_hi = -0.38;

struct timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    }
};

DiscreteMeasure rand_measure(std::uint64_t seed, int n, int d,
                             bool uniform_weights = false) {
    rng g(hash64(seed, 0x6d736ee5ULL));
    std::vector<double> pts;
    pts.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(d));
    std::vector<double> w(static_cast<std::size_t>(n), 1.0);
    for (int i = 0; i < n; ++i) {
        auto x = g.ball_point(d);
        for (double c : x) pts.push_back(c);
        if (!uniform_weights) w[static_cast<std::size_t>(i)] = 0.05 + g.uniform();
    }
    return DiscreteMeasure(d, std::move(pts), std::move(w));
}

int pick(rng& g, int lo, int hi) {
    return lo + static_cast<int>(g.uniform() * static_cast<double>(hi - lo + 1));
}

double brute_force_uniform_w1(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
    const int n = mu.size(), d = mu.dim();
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double c = 0.0;
        for (int i = 0; i < n; ++i)
            c += point_dist(mu.point(i), nu.point(perm[static_cast<std::size_t>(i)]), d);
        best = std::min(best, c);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best / n;
}

const std::filesystem::path& scratch_dir() {
    static const std::filesystem::path dir = [] {
        auto p = std::filesystem::temp_directory_path() /
                 ("cwot_acceptance_" + std::to_string(::getpid()));
        std::filesystem::create_directories(p);
        return p;
    }();
    return dir;
}

std::string scratch(const std::string& name) { return (scratch_dir() / name).string(); }

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

struct cli_result {
    int status = -1;
    std::string out;
    std::string err;
};

cli_result run_cli(const std::string& args) {
    static int counter = 0;
    const std::string tag = std::to_string(++counter);
    const std::string so = scratch("out_" + tag + ".txt");
    const std::string se = scratch("err_" + tag + ".txt");
    const std::string cmd =
        std::string(CWOT_CLI_PATH) + " " + args + " >" + so + " 2>" + se;
    const int rc = std::system(cmd.c_str());
    return {rc == -1 ? -1 : WEXITSTATUS(rc), slurp(so), slurp(se)};
}

// --------------------------------------------------------------------------

bool criterion1(std::ostream& log) {
    timer t;
    double worst_line = 0.0;
    for (int k = 0; k < 500; ++k) {
        rng g(hash64(0x0101, static_cast<std::uint64_t>(k)));
        const int n = pick(g, 1, 64), m = pick(g, 1, 64);
        const auto mu = rand_measure(hash64(1, static_cast<std::uint64_t>(k)),
                                     std::max(2, n), 1);
        const auto nu = rand_measure(hash64(2, static_cast<std::uint64_t>(k)),
                                     std::max(2, m), 1);
        const double fast = w1_1d(mu, nu);
        const double lp = w1_exact(mu, nu).value;
        worst_line = std::max(worst_line, std::abs(fast - lp));
    }
    if (worst_line > k1_oracle_tol) {
        log << "line oracle mismatch " << worst_line << " > " << k1_oracle_tol;
        return false;
    }
    double worst_brute = 0.0;
    for (int k = 0; k < 200; ++k) {
        rng g(hash64(0x0102, static_cast<std::uint64_t>(k)));
        const int n = pick(g, 2, 7);
        const int d = 1 + k % 3;
        const auto mu =
            rand_measure(hash64(3, static_cast<std::uint64_t>(k)), n, d, true);
        const auto nu =
            rand_measure(hash64(4, static_cast<std::uint64_t>(k)), n, d, true);
        const double lp = w1_exact(mu, nu).value;
        const double brute = brute_force_uniform_w1(mu, nu);
        worst_brute = std::max(worst_brute, std::abs(lp - brute));
    }
    if (worst_brute > k1_brute_tol) {
        log << "brute-force mismatch " << worst_brute << " > " << k1_brute_tol;
        return false;
    }
    const double el = t.seconds();
    if (el > k1_budget_s) {
        log << "runtime " << el << "s exceeds " << k1_budget_s << "s";
        return false;
    }
    log << "500 line instances within " << k1_oracle_tol << " (max " << worst_line
        << "), 200 brute-force instances within " << k1_brute_tol << " (max "
        << worst_brute << "), " << el << "s";
    return true;
}

bool criterion2(std::ostream& log) {
    // independent re-certification of returned plans; note that w1_exact also
    // self-certifies on every call and throws otherwise, so the whole test
    // suite inherits this property
    double worst_marginal = 0.0, worst_feas = 0.0, worst_gap = 0.0;
    int count = 0;
    auto examine = [&](const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
        const auto plan = w1_exact(mu, nu);
        ++count;
        std::vector<long double> row(static_cast<std::size_t>(mu.size()), 0.0L);
        std::vector<long double> col(static_cast<std::size_t>(nu.size()), 0.0L);
        for (const auto& e : plan.coupling) {
            row[e.i] += e.mass;
            col[e.j] += e.mass;
        }
        for (int i = 0; i < mu.size(); ++i)
            worst_marginal = std::max(
                worst_marginal,
                std::abs(static_cast<double>(row[static_cast<std::size_t>(i)]) -
                         mu.weight(i)));
        for (int j = 0; j < nu.size(); ++j)
            worst_marginal = std::max(
                worst_marginal,
                std::abs(static_cast<double>(col[static_cast<std::size_t>(j)]) -
                         nu.weight(j)));
        for (int i = 0; i < mu.size(); ++i)
            for (int j = 0; j < nu.size(); ++j)
                worst_feas = std::max(
                    worst_feas,
                    plan.potentials_mu[static_cast<std::size_t>(i)] -
                        plan.potentials_nu[static_cast<std::size_t>(j)] -
                        point_dist(mu.point(i), nu.point(j), mu.dim()));
        worst_gap = std::max(worst_gap, std::abs(duality_gap(plan, mu, nu)));
    };
    for (int k = 0; k < 60; ++k) {
        rng g(hash64(0x0201, static_cast<std::uint64_t>(k)));
        const int d = 1 + k % 4;
        examine(rand_measure(hash64(5, static_cast<std::uint64_t>(k)),
                             pick(g, 2, 48), d),
                rand_measure(hash64(6, static_cast<std::uint64_t>(k)),
                             pick(g, 2, 48), d));
    }
    // deliberately lopsided shapes
    examine(rand_measure(71, 5, 2), rand_measure(72, 90, 2));
    examine(rand_measure(73, 64, 3), rand_measure(74, 64, 3));
    examine(rand_measure(75, 33, 4), rand_measure(76, 7, 4));
    examine(rand_measure(77, 2, 1), rand_measure(78, 80, 1));
    examine(DiscreteMeasure(2, {0.25, 0.5}, {1.0}), rand_measure(79, 50, 2));
    if (worst_marginal > k2_marginal_tol || worst_feas > k2_feasibility_tol ||
        worst_gap > k2_gap_tol) {
        log << "certificate defects: marginal " << worst_marginal << ", feasibility "
            << worst_feas << ", gap " << worst_gap;
        return false;
    }
    log << count << " plans re-certified externally: max marginal defect "
        << worst_marginal << " <= " << k2_marginal_tol << ", max feasibility excess "
        << worst_feas << " <= " << k2_feasibility_tol << ", max |gap| " << worst_gap
        << " <= " << k2_gap_tol << "; every w1_exact call also self-certifies";
    return true;
}

bool criterion3(std::ostream& log) {
    const int dims[3] = {2, 3, 5};
    int violations = 0;
    double worst = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < 1000; ++k) {
        rng g(hash64(0x0301, static_cast<std::uint64_t>(k)));
        const int d = dims[k % 3];
        const auto mu =
            rand_measure(hash64(7, static_cast<std::uint64_t>(k)), pick(g, 2, 20), d);
        const auto nu =
            rand_measure(hash64(8, static_cast<std::uint64_t>(k)), pick(g, 2, 20), d);
        MaxSlicedConfig cfg;
        cfg.seed = static_cast<std::uint64_t>(k);
        const double sliced = maxsliced_w1(mu, nu, cfg).value;
        const double full = w1_exact(mu, nu).value;
        worst = std::max(worst, sliced - full);
        if (sliced > full + k3_sliced_slack) ++violations;
    }
    if (violations > 0) {
        log << violations << " of 1000 instances exceed the full distance by more "
            << "than " << k3_sliced_slack << " (worst excess " << worst << ")";
        return false;
    }
    log << "1000 instances over d in {2,3,5}: sliced value never exceeds the full "
        << "distance + " << k3_sliced_slack << " (worst excess " << worst << ")";
    return true;
}

bool criterion4(std::ostream& log) {
    timer t;
    const int dims[3] = {1, 2, 3};
    const double ps[3] = {2.0, 4.0, p_infinity};
    int violations = 0;
    double max_ratio = 0.0;
    for (int di = 0; di < 3; ++di)
        for (int pi = 0; pi < 3; ++pi)
            for (int k = 0; k < 1000; ++k) {
                const std::uint64_t tag =
                    hash64(static_cast<std::uint64_t>(di * 3 + pi),
                           static_cast<std::uint64_t>(k));
                rng g(hash64(0x0401, tag));
                const auto mu =
                    rand_measure(hash64(9, tag), pick(g, 2, 20), dims[di]);
                const auto nu =
                    rand_measure(hash64(10, tag), pick(g, 2, 20), dims[di]);
                const auto rep = verify_cw(mu, nu, ps[pi]);
                if (!rep.holds) ++violations;
                max_ratio = std::max(max_ratio, rep.ratio);
            }
    if (violations > 0) {
        log << violations << " of 9000 pairs violate the bound";
        return false;
    }
    if (!(max_ratio < 1.0)) {
        log << "max observed ratio " << max_ratio << " not below 1";
        return false;
    }

    auto ball = DistributionSpec::make(Family::uniform_ball, 2, {}, 0);
    auto sphere = DistributionSpec::make(Family::uniform_sphere, 2, {}, 0);
    auto twopt = DistributionSpec::make(Family::two_point_mixture, 2, {}, 0);
    const auto scan = ratio_scan({{ball, sphere}, {ball, twopt}, {sphere, twopt}},
                                 2.0, 300, 0x2026, {16, 64, 256}, scratch("argmax"));
    if (!scan.holds || !(scan.max_ratio < 1.0)) {
        log << "ratio scan max ratio " << scan.max_ratio << " breaks the bound";
        return false;
    }
    const auto replay =
        verify_cw(load_measure(scan.file_mu), load_measure(scan.file_nu), 2.0);
    const double drift = std::abs(replay.ratio - scan.max_ratio);
    if (drift > k4_replay_tol) {
        log << "argmax replay drifts by " << drift << " > " << k4_replay_tol;
        return false;
    }
    const double el = t.seconds();
    if (el > k4_budget_s) {
        log << "runtime " << el << "s exceeds " << k4_budget_s << "s";
        return false;
    }
    log << "9000 pairs across (d,p) in {1,2,3}x{2,4,inf} all hold (max instance "
        << "ratio " << max_ratio << "); scan of 300 sampled pairs: max ratio "
        << scan.max_ratio << " < 1, argmax replay drift " << drift << " <= "
        << k4_replay_tol << ", " << el << "s";
    return true;
}

bool criterion5(std::ostream& log) {
    const double rs[5] = {0.25, 0.5, 1.0, 2.0, 8.0};
    const double ps[3] = {1.5, 2.0, 4.0};
    int violations = 0;
    for (int pi = 0; pi < 3; ++pi)
        for (int ri = 0; ri < 5; ++ri)
            for (int k = 0; k < 100; ++k) {
                const std::uint64_t tag =
                    hash64(static_cast<std::uint64_t>(pi * 5 + ri),
                           static_cast<std::uint64_t>(k));
                rng g(hash64(0x0501, tag));
                const int d = 1 + k % 3;
                const auto mu = rand_measure(hash64(11, tag), pick(g, 2, 16), d);
                const auto nu = rand_measure(hash64(12, tag), pick(g, 2, 16), d);
                if (!truncation_bound_check(mu, nu, ps[pi], rs[ri]).holds)
                    ++violations;
            }
    if (violations > 0) {
        log << violations << " of 1500 truncation checks fail";
        return false;
    }
    double worst_drop = 0.0, worst_saturation = 0.0;
    for (int k = 0; k < 100; ++k) {
        rng g(hash64(0x0502, static_cast<std::uint64_t>(k)));
        const int d = 1 + k % 3;
        const auto mu =
            rand_measure(hash64(13, static_cast<std::uint64_t>(k)), pick(g, 2, 14), d);
        const auto nu =
            rand_measure(hash64(14, static_cast<std::uint64_t>(k)), pick(g, 2, 14), d);
        double prev = -1.0;
        for (double r : rs) {
            const double wr = w1_truncated_dual(mu, nu, r);
            worst_drop = std::max(worst_drop, prev - wr);
            prev = wr;
        }
        // supports live in the unit ball, so r = 8 cannot truncate anything
        worst_saturation =
            std::max(worst_saturation, std::abs(prev - w1_exact(mu, nu).value));
    }
    if (worst_drop > k5_monotone_slack) {
        log << "truncated value drops by " << worst_drop << " along increasing r";
        return false;
    }
    if (worst_saturation > k5_saturation_tol) {
        log << "r = 8 value differs from the full distance by " << worst_saturation;
        return false;
    }
    log << "1500 truncation checks hold over r in {0.25,0.5,1,2,8}, p in "
        << "{1.5,2,4}; monotone in r (worst drop " << worst_drop
        << "), saturates at r = 8 within " << k5_saturation_tol << " (worst "
        << worst_saturation << ")";
    return true;
}

bool criterion6(std::ostream& log) {
    int violations = 0;
    double worst = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < 200; ++k) {
        rng g(hash64(0x0601, static_cast<std::uint64_t>(k)));
        const int d = 1 + k % 3;
        const auto mu =
            rand_measure(hash64(15, static_cast<std::uint64_t>(k)), pick(g, 2, 24), d);
        const auto nu =
            rand_measure(hash64(16, static_cast<std::uint64_t>(k)), pick(g, 2, 24), d);
        const double W = w1_exact(mu, nu).value;
        std::vector<std::vector<double>> ts;
        ts.reserve(50);
        for (int j = 0; j < 50; ++j) {
            auto v = g.unit_vector(d);
            const double radius = 20.0 * g.uniform();
            for (auto& c : v) c *= radius;
            ts.push_back(std::move(v));
        }
        const auto rep = cf_bound_check(mu, nu, W, ts);
        worst = std::max(worst, rep.max_violation);
        if (!rep.holds) ++violations;
    }
    if (violations > 0) {
        log << violations << " of 200 instances violate the frequency bound beyond "
            << k6_cf_slack << " (worst " << worst << ")";
        return false;
    }
    log << "200 instances x 50 frequencies with |t| <= 20, M = exact distance: no "
        << "violation beyond " << k6_cf_slack << " (worst " << worst << ")";
    return true;
}

bool criterion7(std::ostream& log) {
    timer t;
    SweepConfig cfg;
    cfg.spec = DistributionSpec::make(Family::uniform_ball, 2, {}, 0);
    cfg.n_grid = {64, 128, 256, 512, 1024, 2048, 4096};
    cfg.trials = 200;
    cfg.seed = 0x0701;
    const auto table = projection_rate_sweep(cfg);
    const double el = t.seconds();
    if (table.degenerate) {
        log << "sweep degenerated";
        return false;
    }
    if (!(table.slope >= k7_slope_lo && table.slope <= k7_slope_hi)) {
        log << "slope " << table.slope << " outside [" << k7_slope_lo << ", "
            << k7_slope_hi << "]";
        return false;
    }
    if (el > k7_budget_s) {
        log << "runtime " << el << "s exceeds " << k7_budget_s << "s";
        return false;
    }
    log << "plane ball, n = 64..4096, 200 trials: slope " << table.slope << " (se "
        << table.slope_se << ") in [" << k7_slope_lo << ", " << k7_slope_hi << "], "
        << el << "s";
    return true;
}

bool criterion8(std::ostream& log) {
    SweepConfig c3;
    c3.spec = DistributionSpec::make(Family::uniform_ball, 3, {}, 0);
    c3.n_grid = {32, 64, 128, 256};
    c3.trials = 100;
    c3.reference_size = 4096;
    c3.seed = 0x0801;
    const auto t3 = full_rate_sweep(c3);

    SweepConfig c1;
    c1.spec = DistributionSpec::make(Family::uniform_ball, 1, {}, 0);
    c1.n_grid = {64, 128, 256, 512, 1024};
    c1.trials = 200;
    c1.reference_size = 16384;
    c1.seed = 0x0802;
    const auto t1 = full_rate_sweep(c1);

    if (t3.degenerate || t1.degenerate) {
        log << "sweep degenerated";
        return false;
    }
    if (!(t3.slope >= k8_d3_lo && t3.slope <= k8_d3_hi)) {
        log << "d = 3 slope " << t3.slope << " outside [" << k8_d3_lo << ", "
            << k8_d3_hi << "]";
        return false;
    }
    if (!(t1.slope >= k8_d1_lo && t1.slope <= k8_d1_hi)) {
        log << "d = 1 slope " << t1.slope << " outside [" << k8_d1_lo << ", "
            << k8_d1_hi << "]";
        return false;
    }
    if (t3.note.find("proxy") == std::string::npos ||
        t1.note.find("proxy") == std::string::npos) {
        log << "proxy bias not stated in sweep metadata";
        return false;
    }
    log << "d = 3 slope " << t3.slope << " in [" << k8_d3_lo << ", " << k8_d3_hi
        << "]; d = 1 slope " << t1.slope << " in [" << k8_d1_lo << ", " << k8_d1_hi
        << "]; metadata states: \"" << t3.note << "\"";
    return true;
}

bool criterion9(std::ostream& log) {
    // library-written inputs shared by every invocation
    const std::string a1 = scratch("a1.msr"), b1 = scratch("b1.msr");
    const std::string a2 = scratch("a2.msr"), b2 = scratch("b2.msr");
    save_measure(a1, rand_measure(21, 12, 1));
    save_measure(b1, rand_measure(22, 9, 1));
    save_measure(a2, rand_measure(23, 14, 2));
    save_measure(b2, rand_measure(24, 11, 2));

    const std::string rp_csv = scratch("rp.csv"), rf_csv = scratch("rf.csv");
    const std::string tr_csv = scratch("tr.csv"), sc_csv = scratch("sc.csv");
    const std::string rp_cfg = scratch("rp.cfg"), rf_cfg = scratch("rf.cfg");
    const std::string tr_cfg = scratch("tr.cfg"), sc_cfg = scratch("sc.cfg");
    write_file(rp_cfg, "family = uniform-ball\nd = 2\nn_grid = 8,32\ntrials = 6\n"
                       "seed = 5\nout_csv = " + rp_csv + "\n");
    write_file(rf_cfg, "family = uniform-ball\nd = 2\nn_grid = 8,32\ntrials = 6\n"
                       "seed = 5\nreference_size = 512\nout_csv = " + rf_csv + "\n");
    write_file(tr_cfg, "family = uniform-ball\nd = 2\nn_grid = 8,32\ntrials = 6\n"
                       "seed = 5\nreference_size = 512\nout_csv = " + tr_csv + "\n");
    write_file(sc_cfg, "d = 2\np = 2\nbudget = 8\nn_grid = 8,16\nseed = 5\n"
                       "out_csv = " + sc_csv + "\nout_prefix = " + scratch("sc_argmax") +
                       "\npair = uniform-ball uniform-sphere\n");

    struct probe {
        std::string name;
        std::string args;
        std::string artifact; // produced file whose bytes must match too
    };
    const std::vector<probe> probes = {
        {"w1d", "w1d " + a1 + " " + b1, ""},
        {"wnd", "wnd " + a2 + " " + b2 + " --dual --truncated 1.5", ""},
        {"maxsliced",
         "maxsliced " + a2 + " " + b2 + " --restarts 8 --seed 3 --grid 128", ""},
        {"verify", "verify " + a2 + " " + b2 + " --p 2 --check all", ""},
        {"verify-inf", "verify " + a2 + " " + b2 + " --p inf --check cf", ""},
        {"gen",
         "gen " + scratch("g.msr") + " --family uniform-ball --d 3 --n 32 --seed 9",
         scratch("g.msr")},
        {"rate-proj", "rate-proj " + rp_cfg, rp_csv},
        {"rate-full", "rate-full " + rf_cfg, rf_csv},
        {"transfer", "transfer " + tr_cfg, tr_csv},
        {"ratio-scan", "ratio-scan " + sc_cfg, sc_csv},
    };

    for (const auto& p : probes) {
        const auto one = run_cli(p.args + " --threads 1");
        if (one.status != 0) {
            log << p.name << " failed under --threads 1: " << one.err;
            return false;
        }
        const std::string art_one = p.artifact.empty() ? "" : slurp(p.artifact);
        const auto rerun = run_cli(p.args + " --threads 1");
        if (rerun.out != one.out) {
            log << p.name << " is not reproducible under identical reruns";
            return false;
        }
        const auto four = run_cli(p.args + " --threads 4");
        if (four.status != 0) {
            log << p.name << " failed under --threads 4: " << four.err;
            return false;
        }
        if (four.out != one.out) {
            log << p.name << " stdout differs between --threads 1 and --threads 4";
            return false;
        }
        if (!p.artifact.empty() && slurp(p.artifact) != art_one) {
            log << p.name << " artifact differs between --threads 1 and --threads 4";
            return false;
        }
    }
    log << probes.size() << " invocations byte-identical across reruns and "
        << "--threads in {1,4} (artifacts included)";
    return true;
}

} // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: acceptance <criterion 1..9>\n";
        return 2;
    }
    const int which = std::atoi(argv[1]);
    if (which < 1 || which > 9) {
        std::cerr << "usage: acceptance <criterion 1..9>\n";
        return 2;
    }
    bool ok = false;
    std::ostringstream log;
    try {
        switch (which) {
            case 1: ok = criterion1(log); break;
            case 2: ok = criterion2(log); break;
            case 3: ok = criterion3(log); break;
            case 4: ok = criterion4(log); break;
            case 5: ok = criterion5(log); break;
            case 6: ok = criterion6(log); break;
            case 7: ok = criterion7(log); break;
            case 8: ok = criterion8(log); break;
            case 9: ok = criterion9(log); break;
        }
    } catch (const std::exception& e) {
        std::cout << "FAIL criterion " << which << ": unexpected exception: "
                  << e.what() << "\n";
        return 1;
    }
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << which << ": "
              << log.str() << "\n";
    return ok ? 0 : 1;
}

#pragma once

#include <catch2/catch_amalgamated.hpp>
#include <cwot/cwot.hpp>

#include <sys/wait.h>

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

namespace testsup {

using namespace cwot;

// deterministic random measure supported in scale * B_1
inline DiscreteMeasure random_measure(std::uint64_t seed, int n, int d,
                                      double scale = 1.0,
                                      bool uniform_weights = false) {
    rng g(hash64(seed, 0x6d736ee5ULL));
    std::vector<double> pts;
    pts.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(d));
    std::vector<double> w(static_cast<std::size_t>(n), 1.0);
    for (int i = 0; i < n; ++i) {
        auto x = g.ball_point(d);
        for (double c : x) pts.push_back(c * scale);
        if (!uniform_weights) w[static_cast<std::size_t>(i)] = 0.05 + g.uniform();
    }
    return DiscreteMeasure(d, std::move(pts), std::move(w));
}

// exact reference by permutation enumeration; uniform weights, n == m <= 8
inline double brute_force_uniform_w1(const DiscreteMeasure& mu,
                                     const DiscreteMeasure& nu) {
    REQUIRE(mu.size() == nu.size());
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

// exact reference for the truncated distance on uniform-weight instances:
// every source atom either matches a distinct sink atom or pays its own cap,
// and unmatched sinks pay theirs; integrality of the vertex solutions makes
// this enumeration exhaustive
template <class Cap>
double brute_force_uniform_truncated(const DiscreteMeasure& mu,
                                     const DiscreteMeasure& nu, double r, Cap cap) {
    REQUIRE(mu.size() == nu.size());
    const int n = mu.size(), d = mu.dim();
    std::vector<bool> used(static_cast<std::size_t>(n), false);
    double best = std::numeric_limits<double>::infinity();
    double hang = 0.0; // accumulated cost of decided sources
    auto rec = [&](auto&& self, int i) -> void {
        if (i == n) {
            double c = hang;
            for (int j = 0; j < n; ++j)
                if (!used[static_cast<std::size_t>(j)])
                    c += cap(point_norm(nu.point(j), d), r);
            best = std::min(best, c);
            return;
        }
        const double keep = hang;
        hang = keep + cap(point_norm(mu.point(i), d), r);
        self(self, i + 1); // export
        for (int j = 0; j < n; ++j)
            if (!used[static_cast<std::size_t>(j)]) {
                used[static_cast<std::size_t>(j)] = true;
                hang = keep + point_dist(mu.point(i), nu.point(j), d);
                self(self, i + 1);
                used[static_cast<std::size_t>(j)] = false;
            }
        hang = keep;
    };
    rec(rec, 0);
    return best / n;
}

inline const std::filesystem::path& scratch_dir() {
    static const std::filesystem::path dir = [] {
        auto p = std::filesystem::temp_directory_path() /
                 ("cwot_tests_" + std::to_string(::getpid()));
        std::filesystem::create_directories(p);
        return p;
    }();
    return dir;
}

inline std::string scratch_path(const std::string& name) {
    return (scratch_dir() / name).string();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    REQUIRE(out.good());
    out << content;
    REQUIRE(out.good());
}

inline std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct cli_result {
    int status = -1;
    std::string out;
    std::string err;
};

// run the batch binary with shell-ready arguments, capturing both streams
inline cli_result run_cli(const std::string& args) {
    static int counter = 0;
    const std::string tag = std::to_string(++counter);
    const std::string so = scratch_path("cli_out_" + tag + ".txt");
    const std::string se = scratch_path("cli_err_" + tag + ".txt");
    const std::string cmd =
        std::string(CWOT_CLI_PATH) + " " + args + " >" + so + " 2>" + se;
    const int rc = std::system(cmd.c_str());
    cli_result res;
    res.status = rc == -1 ? -1 : WEXITSTATUS(rc);
    res.out = slurp(so);
    res.err = slurp(se);
    return res;
}

// measure file for CLI tests
inline std::string save_scratch_measure(const std::string& name,
                                        const DiscreteMeasure& m) {
    const std::string path = scratch_path(name);
    save_measure(path, m);
    return path;
}

} // namespace testsup

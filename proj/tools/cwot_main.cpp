// batch front end: every operation as a subcommand with JSON on stdout
#include <cwot/cwot.hpp>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

using ordered_json = nlohmann::ordered_json;

namespace {

const char* const usage_text =
    "usage: cwot <subcommand> [args]\n"
    "  w1d <a.msr> <b.msr>                         line distance\n"
    "  wnd <a.msr> <b.msr> [--dual] [--truncated r] exact distance in R^d\n"
    "  maxsliced <a.msr> <b.msr> [--restarts R] [--seed S] [--grid K]\n"
    "  verify <a.msr> <b.msr> --p <p|inf> [--check cf|trunc|all] [--r r] [--seed S]\n"
    "  rate-proj <config>                          projected-distance decay sweep\n"
    "  rate-full <config>                          full-distance decay sweep\n"
    "  transfer <config>                           mean-bound transfer check\n"
    "  ratio-scan <config>                         bound-ratio scan over instances\n"
    "  gen <out.msr> --family F --d D --n N [--seed S] [--params a,b,...]\n"
    "common flags: --threads N (0 = all cores), --help\n";

struct parsed_args {
    std::vector<std::string> positional;
    std::map<std::string, std::string> flags;  // value flags
    std::map<std::string, bool> switches;      // boolean flags
    bool help = false;
};

// flag spec: name -> takes_value
parsed_args parse_args(int argc, char** argv, int start,
                       const std::map<std::string, bool>& spec) {
    parsed_args out;
    for (int i = start; i < argc; ++i) {
        std::string a = argv[i];
        if (a == "--help") {
            out.help = true;
            continue;
        }
        if (a.rfind("--", 0) == 0) {
            auto it = spec.find(a);
            if (it == spec.end()) throw cwot::input_error("unknown flag " + a);
            if (it->second) {
                if (i + 1 >= argc) throw cwot::input_error("flag " + a + " needs a value");
                out.flags[a] = argv[++i];
            } else {
                out.switches[a] = true;
            }
        } else {
            out.positional.push_back(std::move(a));
        }
    }
    return out;
}

std::uint64_t parse_u64(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        const std::uint64_t v = std::stoull(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw cwot::input_error("bad " + what + ": " + s);
    }
}

int parse_int(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(s, &pos);
        if (pos != s.size() || v < -2147483647L || v > 2147483647L)
            throw std::invalid_argument(s);
        return static_cast<int>(v);
    } catch (const std::exception&) {
        throw cwot::input_error("bad " + what + ": " + s);
    }
}

double parse_real(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw cwot::input_error("bad " + what + ": " + s);
    }
}

double parse_p(const std::string& s) {
    if (s == "inf" || s == "infinity") return cwot::p_infinity;
    return parse_real(s, "p");
}

std::vector<double> parse_real_list(const std::string& s, const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(parse_real(item, what));
    return out;
}

std::vector<int> parse_int_list(const std::string& s, const std::string& what) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(parse_int(item, what));
    return out;
}

int flag_threads(const parsed_args& a) {
    auto it = a.flags.find("--threads");
    return it == a.flags.end() ? 0 : parse_int(it->second, "threads");
}

void emit(const ordered_json& payload) { std::cout << payload.dump() << "\n"; }

ordered_json json_slope(double v, bool degenerate) {
    if (degenerate) return ordered_json("degenerate");
    return ordered_json(v);
}

// ---------------------------------------------------------------------------
// key = value config files for the sweep commands

struct config_file {
    std::map<std::string, std::string> single;
    std::vector<std::string> pair_lines;  // repeated `pair` keys, in order
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

config_file load_config(const std::string& path,
                        const std::vector<std::string>& allowed) {
    std::ifstream in(path);
    if (!in) throw cwot::input_error("cannot open config: " + path);
    config_file cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw cwot::input_error(path + ":" + std::to_string(lineno) +
                                    ": expected key = value");
        const std::string key = trim(t.substr(0, eq));
        const std::string val = trim(t.substr(eq + 1));
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw cwot::input_error(path + ":" + std::to_string(lineno) +
                                    ": unknown key '" + key + "'");
        if (key == "pair") {
            cfg.pair_lines.push_back(val);
        } else {
            if (cfg.single.count(key))
                throw cwot::input_error(path + ":" + std::to_string(lineno) +
                                        ": duplicate key '" + key + "'");
            cfg.single[key] = val;
        }
    }
    return cfg;
}

std::string need(const config_file& cfg, const std::string& key, const std::string& path) {
    auto it = cfg.single.find(key);
    if (it == cfg.single.end())
        throw cwot::input_error(path + ": missing key '" + key + "'");
    return it->second;
}

std::string get_or(const config_file& cfg, const std::string& key, const std::string& dflt) {
    auto it = cfg.single.find(key);
    return it == cfg.single.end() ? dflt : it->second;
}

cwot::SweepConfig sweep_from_config(const config_file& cfg, const std::string& path,
                                    int threads_override) {
    cwot::SweepConfig sc;
    const cwot::Family fam = cwot::family_from_name(need(cfg, "family", path));
    const int d = parse_int(need(cfg, "d", path), "d");
    std::vector<double> params;
    if (cfg.single.count("params")) params = parse_real_list(cfg.single.at("params"), "params");
    const std::uint64_t seed = parse_u64(get_or(cfg, "seed", "0"), "seed");
    sc.spec = cwot::DistributionSpec::make(fam, d, std::move(params), seed);
    sc.n_grid = parse_int_list(need(cfg, "n_grid", path), "n_grid");
    sc.trials = parse_int(need(cfg, "trials", path), "trials");
    if (cfg.single.count("theta_budget"))
        sc.theta_budget =
            static_cast<std::size_t>(parse_int(cfg.single.at("theta_budget"), "theta_budget"));
    if (cfg.single.count("reference_size"))
        sc.reference_size = parse_int(cfg.single.at("reference_size"), "reference_size");
    sc.seed = seed;
    sc.threads = threads_override;
    return sc;
}

const std::vector<std::string> sweep_keys = {
    "family", "d", "params", "seed", "n_grid", "trials",
    "theta_budget", "reference_size", "out_csv"};

// ---------------------------------------------------------------------------

int cmd_w1d(int argc, char** argv) {
    const auto a = parse_args(argc, argv, 2, {{"--threads", true}});
    if (a.help) {
        std::cout << "usage: cwot w1d <a.msr> <b.msr>\n";
        return 0;
    }
    if (a.positional.size() != 2) throw cwot::input_error("w1d needs two measure files");
    const auto mu = cwot::load_measure(a.positional[0]);
    const auto nu = cwot::load_measure(a.positional[1]);
    ordered_json out;
    out["w1"] = cwot::w1_1d(mu, nu);
    emit(out);
    return 0;
}

int cmd_wnd(int argc, char** argv) {
    const auto a = parse_args(
        argc, argv, 2,
        {{"--dual", false}, {"--truncated", true}, {"--threads", true}});
    if (a.help) {
        std::cout << "usage: cwot wnd <a.msr> <b.msr> [--dual] [--truncated r]\n";
        return 0;
    }
    if (a.positional.size() != 2) throw cwot::input_error("wnd needs two measure files");
    const auto mu = cwot::load_measure(a.positional[0]);
    const auto nu = cwot::load_measure(a.positional[1]);
    const auto plan = cwot::w1_exact(mu, nu);
    ordered_json out;
    out["w1"] = plan.value;
    if (a.switches.count("--dual")) {
        out["potentials_mu"] = plan.potentials_mu;
        out["potentials_nu"] = plan.potentials_nu;
    }
    if (a.flags.count("--truncated")) {
        const double r = parse_real(a.flags.at("--truncated"), "truncation radius");
        out["r"] = r;
        out["w1_truncated"] = cwot::w1_truncated_dual(mu, nu, r);
    }
    emit(out);
    return 0;
}

int cmd_maxsliced(int argc, char** argv) {
    const auto a = parse_args(argc, argv, 2,
                              {{"--restarts", true},
                               {"--seed", true},
                               {"--grid", true},
                               {"--threads", true}});
    if (a.help) {
        std::cout << "usage: cwot maxsliced <a.msr> <b.msr> [--restarts R] [--seed S] "
                     "[--grid K]\n";
        return 0;
    }
    if (a.positional.size() != 2)
        throw cwot::input_error("maxsliced needs two measure files");
    const auto mu = cwot::load_measure(a.positional[0]);
    const auto nu = cwot::load_measure(a.positional[1]);
    cwot::MaxSlicedConfig cfg;
    if (a.flags.count("--restarts"))
        cfg.restarts = static_cast<std::size_t>(
            parse_int(a.flags.at("--restarts"), "restart count"));
    if (a.flags.count("--seed")) cfg.seed = parse_u64(a.flags.at("--seed"), "seed");
    cfg.threads = flag_threads(a);
    const auto res = cwot::maxsliced_w1(mu, nu, cfg);
    ordered_json out;
    out["value"] = res.value;
    out["direction"] = res.direction;
    out["restarts_used"] = res.restarts_used;
    if (a.flags.count("--grid")) {
        const int K = parse_int(a.flags.at("--grid"), "grid size");
        out["grid_value"] =
            cwot::grid_oracle_2d(mu, nu, static_cast<std::size_t>(K));
    }
    emit(out);
    return 0;
}

int cmd_verify(int argc, char** argv) {
    const auto a = parse_args(argc, argv, 2,
                              {{"--p", true},
                               {"--check", true},
                               {"--r", true},
                               {"--seed", true},
                               {"--threads", true}});
    if (a.help) {
        std::cout << "usage: cwot verify <a.msr> <b.msr> --p <p|inf> "
                     "[--check cf|trunc|all] [--r r] [--seed S]\n";
        return 0;
    }
    if (a.positional.size() != 2)
        throw cwot::input_error("verify needs two measure files");
    if (!a.flags.count("--p")) throw cwot::input_error("verify needs --p");
    const double p = parse_p(a.flags.at("--p"));
    const auto mu = cwot::load_measure(a.positional[0]);
    const auto nu = cwot::load_measure(a.positional[1]);
    const int threads = flag_threads(a);
    const auto rep = cwot::verify_cw(mu, nu, p, threads);
    ordered_json out;
    out["W"] = rep.W;
    out["M"] = rep.M;
    out["b"] = rep.b;
    out["p"] = p == cwot::p_infinity ? ordered_json("inf") : ordered_json(p);
    out["d"] = rep.d;
    out["alpha"] = rep.alpha;
    out["bound"] = rep.bound;
    out["ratio"] = rep.ratio;
    out["holds"] = rep.holds;

    std::string check = "none";
    if (a.flags.count("--check")) {
        check = a.flags.at("--check");
        if (check != "cf" && check != "trunc" && check != "all")
            throw cwot::input_error("--check must be cf, trunc or all");
    }
    if (check == "cf" || check == "all") {
        // frequencies drawn in the ball of radius 20; the exact distance
        // stands in for the sliced supremum, which it dominates
        const std::uint64_t seed =
            a.flags.count("--seed") ? parse_u64(a.flags.at("--seed"), "seed") : 0;
        std::vector<std::vector<double>> ts;
        for (int k = 0; k < 50; ++k) {
            cwot::rng g(cwot::hash64(seed, 0x6366ULL + static_cast<std::uint64_t>(k)));
            std::vector<double> t = g.unit_vector(mu.dim());
            const double radius = 20.0 * g.uniform();
            for (auto& c : t) c *= radius;
            ts.push_back(std::move(t));
        }
        const auto cf = cwot::cf_bound_check(mu, nu, rep.W, ts);
        out["cf_max_violation"] = cf.max_violation;
        out["cf_holds"] = cf.holds;
    }
    if (check == "trunc" || check == "all") {
        const double r =
            a.flags.count("--r") ? parse_real(a.flags.at("--r"), "radius") : 1.0;
        const auto tr = cwot::truncation_bound_check(mu, nu, p, r);
        out["r"] = tr.r;
        out["trunc_w_r"] = tr.w_r;
        out["trunc_lhs"] = tr.lhs;
        out["trunc_rhs"] = tr.rhs;
        out["trunc_holds"] = tr.holds;
    }
    emit(out);
    return 0;
}

int cmd_rate(int argc, char** argv, bool projected) {
    const auto a = parse_args(argc, argv, 2, {{"--threads", true}, {"--seed", true}});
    if (a.help) {
        std::cout << "usage: cwot " << (projected ? "rate-proj" : "rate-full")
                  << " <config>\nconfig keys: family, d, params, seed, n_grid, trials, "
                     "theta_budget, reference_size, out_csv\n";
        return 0;
    }
    if (a.positional.size() != 1) throw cwot::input_error("expected one config file");
    const auto cfgf = load_config(a.positional[0], sweep_keys);
    cwot::SweepConfig sc = sweep_from_config(cfgf, a.positional[0], flag_threads(a));
    if (a.flags.count("--seed")) sc.seed = parse_u64(a.flags.at("--seed"), "seed");
    const std::string csv = need(cfgf, "out_csv", a.positional[0]);
    const cwot::RateTable table =
        projected ? cwot::projection_rate_sweep(sc) : cwot::full_rate_sweep(sc);
    cwot::write_rate_csv(csv, table.rows);
    ordered_json out;
    out["slope"] = json_slope(table.slope, table.degenerate);
    out["slope_se"] = json_slope(table.slope_se, table.degenerate);
    out["intercept"] = json_slope(table.intercept, table.degenerate);
    out["note"] = table.note;
    emit(out);
    return 0;
}

int cmd_transfer(int argc, char** argv) {
    const auto a = parse_args(argc, argv, 2, {{"--threads", true}, {"--seed", true}});
    if (a.help) {
        std::cout << "usage: cwot transfer <config>\nconfig keys as rate-full\n";
        return 0;
    }
    if (a.positional.size() != 1) throw cwot::input_error("expected one config file");
    const auto cfgf = load_config(a.positional[0], sweep_keys);
    cwot::SweepConfig sc = sweep_from_config(cfgf, a.positional[0], flag_threads(a));
    if (a.flags.count("--seed")) sc.seed = parse_u64(a.flags.at("--seed"), "seed");
    const std::string csv = need(cfgf, "out_csv", a.positional[0]);
    const cwot::TransferReport rep = cwot::concavity_transfer_check(sc);

    std::vector<cwot::RateRow> rows;
    for (const auto& r : rep.rows)
        rows.push_back({r.n, r.full_mean, r.full_se, sc.trials});
    cwot::write_rate_csv(csv, rows);
    cwot::RateTable fit;
    fit.rows = rows;
    cwot::detail::fit_loglog(fit);

    ordered_json out;
    out["slope"] = json_slope(fit.slope, fit.degenerate);
    out["slope_se"] = json_slope(fit.slope_se, fit.degenerate);
    out["intercept"] = json_slope(fit.intercept, fit.degenerate);
    out["alpha"] = rep.alpha;
    out["worst_ratio"] = rep.worst_ratio;
    out["holds"] = rep.holds;
    out["note"] = rep.note;
    emit(out);
    return 0;
}

int cmd_ratio_scan(int argc, char** argv) {
    const auto a = parse_args(argc, argv, 2, {{"--threads", true}, {"--seed", true}});
    if (a.help) {
        std::cout << "usage: cwot ratio-scan <config>\nconfig keys: d, p, budget, seed, "
                     "n_grid, out_csv, out_prefix, pair (repeatable: '<familyA> "
                     "<familyB>')\n";
        return 0;
    }
    if (a.positional.size() != 1) throw cwot::input_error("expected one config file");
    const std::vector<std::string> keys = {"d",      "p",       "budget",    "seed",
                                           "n_grid", "out_csv", "out_prefix", "pair"};
    const auto cfgf = load_config(a.positional[0], keys);
    const std::string path = a.positional[0];
    const int d = parse_int(need(cfgf, "d", path), "d");
    const double p = parse_p(need(cfgf, "p", path));
    const int budget = parse_int(need(cfgf, "budget", path), "budget");
    std::uint64_t seed = parse_u64(get_or(cfgf, "seed", "0"), "seed");
    if (a.flags.count("--seed")) seed = parse_u64(a.flags.at("--seed"), "seed");
    const std::vector<int> n_grid = parse_int_list(need(cfgf, "n_grid", path), "n_grid");
    const std::string csv = need(cfgf, "out_csv", path);
    const std::string prefix = need(cfgf, "out_prefix", path);
    if (cfgf.pair_lines.empty()) throw cwot::input_error(path + ": no pair lines");

    std::vector<std::pair<cwot::DistributionSpec, cwot::DistributionSpec>> pairs;
    for (const auto& line : cfgf.pair_lines) {
        std::stringstream ss(line);
        std::string fa, fb;
        if (!(ss >> fa >> fb))
            throw cwot::input_error(path + ": pair needs two family names: " + line);
        std::string extra;
        if (ss >> extra)
            throw cwot::input_error(path + ": pair takes two family names: " + line);
        pairs.emplace_back(
            cwot::DistributionSpec::make(cwot::family_from_name(fa), d, {}, 0),
            cwot::DistributionSpec::make(cwot::family_from_name(fb), d, {}, 0));
    }

    const auto rep =
        cwot::ratio_scan(pairs, p, budget, seed, n_grid, prefix, flag_threads(a));
    cwot::write_rate_csv(csv, rep.rows);
    ordered_json out;
    out["slope"] = json_slope(rep.slope, rep.degenerate);
    out["slope_se"] = json_slope(rep.slope_se, rep.degenerate);
    out["intercept"] = json_slope(rep.intercept, rep.degenerate);
    out["max_ratio"] = rep.max_ratio;
    out["holds"] = rep.holds;
    ordered_json arg;
    arg["pair"] = rep.argmax_pair;
    arg["n"] = rep.argmax_n;
    arg["trial"] = rep.argmax_trial;
    arg["ratio"] = rep.argmax_report.ratio;
    arg["W"] = rep.argmax_report.W;
    arg["M"] = rep.argmax_report.M;
    arg["b"] = rep.argmax_report.b;
    arg["bound"] = rep.argmax_report.bound;
    out["argmax"] = arg;
    out["files"] = ordered_json::array({rep.file_mu, rep.file_nu});
    emit(out);
    return 0;
}

int cmd_gen(int argc, char** argv) {
    const auto a = parse_args(argc, argv, 2,
                              {{"--family", true},
                               {"--d", true},
                               {"--n", true},
                               {"--seed", true},
                               {"--params", true},
                               {"--threads", true}});
    if (a.help) {
        std::cout << "usage: cwot gen <out.msr> --family F --d D --n N [--seed S] "
                     "[--params a,b,...]\n";
        return 0;
    }
    if (a.positional.size() != 1) throw cwot::input_error("gen needs an output path");
    if (!a.flags.count("--family") || !a.flags.count("--d") || !a.flags.count("--n"))
        throw cwot::input_error("gen needs --family, --d and --n");
    const cwot::Family fam = cwot::family_from_name(a.flags.at("--family"));
    const int d = parse_int(a.flags.at("--d"), "d");
    const int n = parse_int(a.flags.at("--n"), "n");
    const std::uint64_t seed =
        a.flags.count("--seed") ? parse_u64(a.flags.at("--seed"), "seed") : 0;
    std::vector<double> params;
    if (a.flags.count("--params")) params = parse_real_list(a.flags.at("--params"), "params");
    const auto spec = cwot::DistributionSpec::make(fam, d, std::move(params), seed);
    const auto m = cwot::sample_empirical(spec, n);
    cwot::save_measure(a.positional[0], m);
    ordered_json out;
    out["file"] = a.positional[0];
    out["family"] = cwot::family_name(fam);
    out["d"] = d;
    out["n"] = n;
    out["seed"] = seed;
    emit(out);
    return 0;
}

int run(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << usage_text;
        return 1;
    }
    const std::string cmd = argv[1];
    if (cmd == "--help" || cmd == "help") {
        std::cout << usage_text;
        return 0;
    }
    if (cmd == "w1d") return cmd_w1d(argc, argv);
    if (cmd == "wnd") return cmd_wnd(argc, argv);
    if (cmd == "maxsliced") return cmd_maxsliced(argc, argv);
    if (cmd == "verify") return cmd_verify(argc, argv);
    if (cmd == "rate-proj") return cmd_rate(argc, argv, true);
    if (cmd == "rate-full") return cmd_rate(argc, argv, false);
    if (cmd == "transfer") return cmd_transfer(argc, argv);
    if (cmd == "ratio-scan") return cmd_ratio_scan(argc, argv);
    if (cmd == "gen") return cmd_gen(argc, argv);
    std::cerr << usage_text;
    throw cwot::input_error("unknown subcommand " + cmd);
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const cwot::input_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const cwot::solver_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

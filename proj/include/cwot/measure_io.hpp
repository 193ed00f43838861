#pragma once

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "errors.hpp"
#include "measure.hpp"

namespace cwot {

// shortest decimal string that round-trips the double exactly
inline std::string fmt_double(double x) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

// file format: header "d n", then n lines "w x_1 ... x_d"
inline void save_measure(const std::string& path, const DiscreteMeasure& m) {
    std::ofstream out(path);
    if (!out) throw input_error("cannot open for writing: " + path);
    out << m.dim() << ' ' << m.size() << '\n';
    for (int i = 0; i < m.size(); ++i) {
        out << fmt_double(m.weight(i));
        for (int k = 0; k < m.dim(); ++k) out << ' ' << fmt_double(m.coord(i, k));
        out << '\n';
    }
    if (!out) throw input_error("write failed: " + path);
}

inline DiscreteMeasure load_measure(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open measure file: " + path);
    long long d = 0, n = 0;
    if (!(in >> d >> n)) throw input_error("bad header in measure file: " + path);
    if (d < 1 || n < 1 || d > 1'000'000 || n > 100'000'000)
        throw input_error("bad header in measure file: " + path);
    std::vector<double> weights(static_cast<std::size_t>(n));
    std::vector<double> points(static_cast<std::size_t>(n * d));
    for (long long i = 0; i < n; ++i) {
        if (!(in >> weights[static_cast<std::size_t>(i)]))
            throw input_error("truncated measure file: " + path);
        for (long long k = 0; k < d; ++k)
            if (!(in >> points[static_cast<std::size_t>(i * d + k)]))
                throw input_error("truncated measure file: " + path);
    }
    std::string rest;
    if (in >> rest) throw input_error("trailing content in measure file: " + path);
    return DiscreteMeasure(static_cast<int>(d), std::move(points), std::move(weights));
}

} // namespace cwot

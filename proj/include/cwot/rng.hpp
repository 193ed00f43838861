#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace cwot {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// fixed 2->1 mixing function used for every seed derivation; all streams are
// keyed by (seed, index) so execution order and thread count cannot matter
inline std::uint64_t hash64(std::uint64_t a, std::uint64_t b) {
    return mix64(mix64(a + 0x9e3779b97f4a7c15ULL) ^ (b + 0xd1b54a32d192ed03ULL));
}

// small counter-based generator; cheap to construct per sample index
class rng {
public:
    explicit rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() { return splitmix64(state_); }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    // standard normal, Box-Muller; the sine mate of each pair is cached
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; // (0, 1]
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // uniform on the unit sphere S^{d-1}
    std::vector<double> unit_vector(int d) {
        std::vector<double> v(static_cast<std::size_t>(d));
        while (true) {
            double s = 0.0;
            for (auto& c : v) {
                c = gaussian();
                s += c * c;
            }
            if (s > 1e-24) {
                double inv = 1.0 / std::sqrt(s);
                for (auto& c : v) c *= inv;
                return v;
            }
        }
    }

    // uniform in the closed unit ball B_1
    std::vector<double> ball_point(int d) {
        std::vector<double> v = unit_vector(d);
        double r = std::pow(uniform(), 1.0 / d);
        for (auto& c : v) c *= r;
        return v;
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace cwot

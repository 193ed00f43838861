#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "errors.hpp"
#include "measure.hpp"
#include "rng.hpp"

namespace cwot {

enum class Family {
    uniform_ball,
    uniform_sphere,
    two_point_mixture,
    product_uniform_rescaled,
    truncated_gaussian_rescaled,
};

inline std::string family_name(Family f) {
    switch (f) {
        case Family::uniform_ball: return "uniform-ball";
        case Family::uniform_sphere: return "uniform-sphere";
        case Family::two_point_mixture: return "two-point-mixture";
        case Family::product_uniform_rescaled: return "product-uniform-rescaled";
        case Family::truncated_gaussian_rescaled: return "truncated-gaussian-rescaled";
    }
    throw input_error("unknown family enum");
}

inline Family family_from_name(const std::string& name) {
    if (name == "uniform-ball") return Family::uniform_ball;
    if (name == "uniform-sphere") return Family::uniform_sphere;
    if (name == "two-point-mixture") return Family::two_point_mixture;
    if (name == "product-uniform-rescaled") return Family::product_uniform_rescaled;
    if (name == "truncated-gaussian-rescaled") return Family::truncated_gaussian_rescaled;
    throw input_error("unknown distribution family: " + name);
}

// named sampleable distribution supported on the closed unit ball.
// sampling is a pure function of (spec, index); no shared generator state.
struct DistributionSpec {
    Family family = Family::uniform_ball;
    int dim = 1;
    std::vector<double> params; // family specific, validated by make()
    std::uint64_t seed = 0;

    // two-point-mixture params: a_1..a_d, b_1..b_d, lambda  (default +-e1, 1/2)
    // truncated-gaussian-rescaled params: sigma              (default 0.5)
    // other families take no params
    static DistributionSpec make(Family family, int dim, std::vector<double> params,
                                 std::uint64_t seed) {
        if (dim < 1) throw input_error("spec: dimension must be >= 1");
        for (double v : params)
            if (!std::isfinite(v)) throw input_error("spec: non-finite parameter");
        DistributionSpec s;
        s.family = family;
        s.dim = dim;
        s.seed = seed;
        switch (family) {
            case Family::uniform_ball:
            case Family::uniform_sphere:
            case Family::product_uniform_rescaled:
                if (!params.empty()) throw input_error("spec: family takes no parameters");
                break;
            case Family::two_point_mixture: {
                std::size_t want = 2 * static_cast<std::size_t>(dim) + 1;
                if (params.empty()) {
                    params.assign(want, 0.0);
                    params[0] = 1.0;
                    params[static_cast<std::size_t>(dim)] = -1.0;
                    params[want - 1] = 0.5;
                } else if (params.size() != want) {
                    throw input_error("spec: two-point-mixture needs 2d+1 parameters");
                }
                double lambda = params[want - 1];
                if (!(lambda >= 0.0 && lambda <= 1.0))
                    throw input_error("spec: mixture weight must lie in [0, 1]");
                // force both points into B_1
                for (int pt = 0; pt < 2; ++pt) {
                    double* p = params.data() + static_cast<std::size_t>(pt) * dim;
                    double n = point_norm(p, dim);
                    if (n > 1.0)
                        for (int k = 0; k < dim; ++k) p[k] /= n;
                }
                break;
            }
            case Family::truncated_gaussian_rescaled:
                if (params.empty()) params.assign(1, 0.5);
                if (params.size() != 1 || !(params[0] > 0.0))
                    throw input_error("spec: truncated-gaussian-rescaled needs one sigma > 0");
                break;
        }
        s.params = std::move(params);
        return s;
    }

    // stable identity of the sampled law; identical specs share sample streams
    std::uint64_t fingerprint() const {
        std::uint64_t h = hash64(static_cast<std::uint64_t>(family),
                                 static_cast<std::uint64_t>(dim));
        for (double v : params) h = hash64(h, std::bit_cast<std::uint64_t>(v));
        return hash64(h, seed);
    }
};

inline std::vector<double> sample_point(const DistributionSpec& spec, std::uint64_t index) {
    rng g(hash64(spec.seed, index));
    const int d = spec.dim;
    switch (spec.family) {
        case Family::uniform_ball:
            return g.ball_point(d);
        case Family::uniform_sphere:
            return g.unit_vector(d);
        case Family::two_point_mixture: {
            double lambda = spec.params[2 * static_cast<std::size_t>(d)];
            const double* p =
                spec.params.data() + (g.uniform() < lambda ? 0 : static_cast<std::size_t>(d));
            return std::vector<double>(p, p + d);
        }
        case Family::product_uniform_rescaled: {
            std::vector<double> x(static_cast<std::size_t>(d));
            double scale = 1.0 / std::sqrt(static_cast<double>(d));
            for (auto& c : x) c = g.uniform(-1.0, 1.0) * scale;
            return x;
        }
        case Family::truncated_gaussian_rescaled: {
            std::vector<double> x(static_cast<std::size_t>(d));
            for (auto& c : x) c = spec.params[0] * g.gaussian();
            double n = point_norm(x.data(), d);
            if (n > 1.0)
                for (auto& c : x) c /= n;
            return x;
        }
    }
    throw input_error("unknown family enum");
}

// n atoms of weight 1/n, i.i.d. per the spec; deterministic in (spec, n)
inline DiscreteMeasure sample_empirical(const DistributionSpec& spec, int n) {
    if (n < 1) throw input_error("sample_empirical: n must be >= 1");
    std::vector<double> pts;
    pts.reserve(static_cast<std::size_t>(n) * spec.dim);
    for (int i = 0; i < n; ++i) {
        auto x = sample_point(spec, static_cast<std::uint64_t>(i));
        pts.insert(pts.end(), x.begin(), x.end());
    }
    return DiscreteMeasure(spec.dim, std::move(pts),
                           std::vector<double>(static_cast<std::size_t>(n), 1.0 / n));
}

namespace detail {
// int_{-pi/2}^{phi} cos^m t dt by the stable two-term reduction
inline double cos_power_integral(int m, double phi) {
    double c = std::cos(phi), s = std::sin(phi);
    double im2 = phi + std::numbers::pi / 2.0; // I_0
    if (m == 0) return im2;
    double im1 = s + 1.0; // I_1
    if (m == 1) return im1;
    double cpow = c; // c^{k-1} for k = 2
    for (int k = 2; k <= m; ++k) {
        double ik = cpow * s / k + (k - 1.0) / k * im2;
        im2 = im1;
        im1 = ik;
        cpow *= c;
    }
    return im1;
}
} // namespace detail

// law of <X, theta> for a rotation-invariant family: density on [-1, 1]
// proportional to (1 - x^2)^{(m-1)/2}; m = d for the uniform ball and
// m = d - 2 for the uniform sphere
class ProjectedLaw {
public:
    explicit ProjectedLaw(int m) : m_(m) {
        if (m < 0) throw input_error("projected law: negative exponent index");
        z_ = detail::cos_power_integral(m_, std::numbers::pi / 2.0);
    }

    int m() const { return m_; }

    double pdf(double x) const {
        if (x <= -1.0 || x >= 1.0) return 0.0;
        return std::pow(1.0 - x * x, (m_ - 1) / 2.0) / z_;
    }

    double cdf(double x) const {
        if (x <= -1.0) return 0.0;
        if (x >= 1.0) return 1.0;
        return detail::cos_power_integral(m_, std::asin(x)) / z_;
    }

    // int_{-1}^{x} cdf(t) dt; exact antiderivative, zero at -1
    double cdf_antiderivative(double x) const {
        if (x <= -1.0) return 0.0;
        if (x >= 1.0) return x; // cdf is 1 beyond the support and Phi(1) = 1
        return x * cdf(x) + std::pow(1.0 - x * x, (m_ + 1) / 2.0) / ((m_ + 1) * z_);
    }

    // absolute tolerance well below 1e-10
    double quantile(double u) const {
        if (!(u > 0.0 && u < 1.0)) throw input_error("quantile: u must lie in (0, 1)");
        if (m_ == 0) return std::sin(std::numbers::pi * (u - 0.5));
        if (m_ == 1) return 2.0 * u - 1.0;
        double lo = -1.0, hi = 1.0, x = 2.0 * u - 1.0;
        for (int it = 0; it < 200; ++it) {
            double f = cdf(x) - u;
            if (f > 0.0)
                hi = x;
            else
                lo = x;
            if (hi - lo < 1e-13) break;
            double dens = pdf(x);
            double step = dens > 1e-18 ? f / dens : 0.0;
            double nx = x - step;
            if (!(nx > lo && nx < hi)) nx = 0.5 * (lo + hi);
            if (std::abs(nx - x) < 1e-15) {
                x = nx;
                break;
            }
            x = nx;
        }
        return x;
    }

private:
    int m_;
    double z_;
};

inline bool has_projection_oracle(const DistributionSpec& spec) {
    if (spec.family == Family::uniform_ball) return true;
    if (spec.family == Family::uniform_sphere) return spec.dim >= 2;
    return false;
}

inline ProjectedLaw projected_law(const DistributionSpec& spec) {
    if (spec.family == Family::uniform_ball) return ProjectedLaw(spec.dim);
    if (spec.family == Family::uniform_sphere && spec.dim >= 2)
        return ProjectedLaw(spec.dim - 2);
    throw unsupported_family_error("no closed-form projected law for family " +
                                   family_name(spec.family));
}

// u-quantile of the law of <X, theta>; rotation invariance makes it
// independent of the direction, which is validated for dimension only
inline double projected_reference_quantile(const DistributionSpec& spec, const Direction& theta,
                                           double u) {
    if (theta.dim() != spec.dim)
        throw input_error("projected_reference_quantile: dimension mismatch");
    return projected_law(spec).quantile(u);
}

} // namespace cwot

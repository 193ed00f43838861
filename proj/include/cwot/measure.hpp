#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

#include "errors.hpp"

namespace cwot {

// p = infinity is a distinguished sentinel; formulas branch on it explicitly
inline constexpr double p_infinity = std::numeric_limits<double>::infinity();

// atoms closer than this merge at construction; duplicate support points
// would otherwise create degenerate bases in the flow solvers
inline constexpr double atom_merge_tol = 1e-12;

using ComplexValue = std::complex<double>;

inline double point_norm(const double* x, int d) {
    double s = 0.0;
    for (int k = 0; k < d; ++k) s += x[k] * x[k];
    return std::sqrt(s);
}

inline double point_dist(const double* x, const double* y, int d) {
    double s = 0.0;
    for (int k = 0; k < d; ++k) {
        double t = x[k] - y[k];
        s += t * t;
    }
    return std::sqrt(s);
}

// weighted point cloud in R^d; immutable after construction.
// construction drops zero-weight atoms, renormalizes weights to sum 1, sorts
// atoms lexicographically and merges atoms within atom_merge_tol.
class DiscreteMeasure {
public:
    DiscreteMeasure(int dim, std::vector<double> points, std::vector<double> weights)
        : dim_(dim) {
        if (dim < 1) throw input_error("measure: dimension must be >= 1");
        if (weights.empty()) throw input_error("measure: no atoms");
        if (points.size() != weights.size() * static_cast<std::size_t>(dim))
            throw input_error("measure: points/weights size mismatch");
        for (double c : points)
            if (!std::isfinite(c)) throw input_error("measure: non-finite coordinate");
        double sum = 0.0;
        for (double w : weights) {
            if (!std::isfinite(w)) throw input_error("measure: non-finite weight");
            if (w < 0.0) throw input_error("measure: negative weight");
            sum += w;
        }
        if (sum <= 0.0) throw input_error("measure: total weight must be positive");

        const std::size_t n_in = weights.size();
        std::vector<int> order;
        order.reserve(n_in);
        for (std::size_t i = 0; i < n_in; ++i)
            if (weights[i] > 0.0) order.push_back(static_cast<int>(i));
        if (order.empty()) throw input_error("measure: total weight must be positive");
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            const double* pa = points.data() + static_cast<std::size_t>(a) * dim;
            const double* pb = points.data() + static_cast<std::size_t>(b) * dim;
            return std::lexicographical_compare(pa, pa + dim, pb, pb + dim);
        });

        points_.reserve(order.size() * static_cast<std::size_t>(dim));
        weights_.reserve(order.size());
        for (int idx : order) {
            const double* p = points.data() + static_cast<std::size_t>(idx) * dim;
            double w = weights[static_cast<std::size_t>(idx)] / sum;
            if (!weights_.empty() &&
                point_dist(p, points_.data() + (weights_.size() - 1) * dim_, dim_) <= atom_merge_tol) {
                weights_.back() += w;
            } else {
                points_.insert(points_.end(), p, p + dim);
                weights_.push_back(w);
            }
        }
    }

    int dim() const { return dim_; }
    int size() const { return static_cast<int>(weights_.size()); }
    double weight(int i) const { return weights_[static_cast<std::size_t>(i)]; }
    const double* point(int i) const {
        return points_.data() + static_cast<std::size_t>(i) * dim_;
    }
    double coord(int i, int k) const { return point(i)[k]; }
    const std::vector<double>& weights() const { return weights_; }
    const std::vector<double>& flat_points() const { return points_; }

    double max_point_norm() const {
        double m = 0.0;
        for (int i = 0; i < size(); ++i) m = std::max(m, point_norm(point(i), dim_));
        return m;
    }

private:
    int dim_;
    std::vector<double> points_;  // row-major size() x dim()
    std::vector<double> weights_; // positive, sum 1
};

// unit vector in R^d
class Direction {
public:
    explicit Direction(std::vector<double> components) : v_(std::move(components)) {
        if (v_.empty()) throw input_error("direction: empty vector");
        double n = point_norm(v_.data(), static_cast<int>(v_.size()));
        if (std::abs(n - 1.0) > 1e-12)
            throw input_error("direction: vector is not unit length");
    }

    static Direction normalized(std::vector<double> v) {
        if (v.empty()) throw input_error("direction: empty vector");
        double n = point_norm(v.data(), static_cast<int>(v.size()));
        if (!(n > 1e-12)) throw input_error("direction: cannot normalize near-zero vector");
        for (auto& c : v) c /= n;
        return Direction(adopt{}, std::move(v));
    }

    int dim() const { return static_cast<int>(v_.size()); }
    const std::vector<double>& components() const { return v_; }
    double operator[](int k) const { return v_[static_cast<std::size_t>(k)]; }

    // representative with its first coordinate of magnitude > 1e-12 positive
    Direction canonical() const {
        std::vector<double> c = v_;
        for (double x : c) {
            if (std::abs(x) > 1e-12) {
                if (x < 0.0)
                    for (auto& y : c) y = -y;
                break;
            }
        }
        for (auto& y : c)
            if (y == 0.0) y = 0.0; // scrub negative zeros
        return Direction(adopt{}, std::move(c));
    }

private:
    struct adopt {};
    Direction(adopt, std::vector<double> v) : v_(std::move(v)) {}
    std::vector<double> v_;
};

inline double dot(const double* x, const std::vector<double>& v) {
    double s = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) s += x[k] * v[k];
    return s;
}

// pushforward under x -> <x, theta>; equal projected values merge
inline DiscreteMeasure project(const DiscreteMeasure& m, const Direction& theta) {
    if (m.dim() != theta.dim()) throw input_error("project: dimension mismatch");
    std::vector<double> vals(static_cast<std::size_t>(m.size()));
    for (int i = 0; i < m.size(); ++i) vals[static_cast<std::size_t>(i)] = dot(m.point(i), theta.components());
    return DiscreteMeasure(1, std::move(vals), m.weights());
}

// (sum_k w_k |x_k|^p)^{1/p}; max_k |x_k| for p = infinity
inline double moment_norm(const DiscreteMeasure& m, double p) {
    if (p == p_infinity) return m.max_point_norm();
    if (!(p >= 1.0)) throw input_error("moment_norm: p must be >= 1 or infinity");
    double s = 0.0;
    for (int i = 0; i < m.size(); ++i)
        s += m.weight(i) * std::pow(point_norm(m.point(i), m.dim()), p);
    return std::pow(s, 1.0 / p);
}

// sum_k w_k exp(i <t, x_k>)
inline ComplexValue empirical_cf(const DiscreteMeasure& m, const std::vector<double>& t) {
    if (static_cast<int>(t.size()) != m.dim()) throw input_error("empirical_cf: dimension mismatch");
    double re = 0.0, im = 0.0;
    for (int i = 0; i < m.size(); ++i) {
        double a = dot(m.point(i), t);
        re += m.weight(i) * std::cos(a);
        im += m.weight(i) * std::sin(a);
    }
    return {re, im};
}

// lambda * a + (1 - lambda) * b
inline DiscreteMeasure mix(const DiscreteMeasure& a, const DiscreteMeasure& b, double lambda) {
    if (a.dim() != b.dim()) throw input_error("mix: dimension mismatch");
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw input_error("mix: lambda must lie in [0, 1]");
    std::vector<double> pts = a.flat_points();
    pts.insert(pts.end(), b.flat_points().begin(), b.flat_points().end());
    std::vector<double> w;
    w.reserve(static_cast<std::size_t>(a.size() + b.size()));
    for (int i = 0; i < a.size(); ++i) w.push_back(lambda * a.weight(i));
    for (int j = 0; j < b.size(); ++j) w.push_back((1.0 - lambda) * b.weight(j));
    return DiscreteMeasure(a.dim(), std::move(pts), std::move(w));
}

} // namespace cwot

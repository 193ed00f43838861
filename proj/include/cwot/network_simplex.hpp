#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "errors.hpp"

namespace cwot::detail {

// Transportation network simplex on the dense bipartite graph.
//
// Sources carry positive integer supplies, sinks positive integer demands,
// and the totals balance. Costs come from a callback, cached when the arc
// matrix is small enough. The basis is a spanning tree over sources, sinks
// and one artificial hub node; the initial star basis routes every supply
// through the hub at a cost that dominates any real route. Strong
// feasibility (every zero-flow tree arc points toward the hub) together
// with picking the last blocking arc along the pivot cycle, traversed from
// the apex in the entering arc's orientation, keeps degenerate pivots from
// cycling. Pivot cap: 50 (m + n)^2, reported as solver_error, never as a
// wrong answer.
template <class CostFn>
class transport_simplex {
public:
    transport_simplex(int m, int n, std::vector<std::int64_t> supply,
                      std::vector<std::int64_t> demand, CostFn cost, double cost_bound)
        : m_(m), n_(n), supply_(std::move(supply)), demand_(std::move(demand)),
          cost_(std::move(cost)) {
        if (m_ < 1 || n_ < 1) throw input_error("flow: empty side");
        std::int64_t s = 0, d = 0;
        for (auto v : supply_) {
            if (v <= 0) throw input_error("flow: supplies must be positive");
            s += v;
        }
        for (auto v : demand_) {
            if (v <= 0) throw input_error("flow: demands must be positive");
            d += v;
        }
        if (s != d) throw input_error("flow: unbalanced problem");
        big_ = 4.0 * (1.0 + cost_bound);
        eps_ = 1e-10;
        if (static_cast<std::int64_t>(m_) * n_ <= cache_limit_) {
            cache_.resize(static_cast<std::size_t>(m_) * n_);
            for (int i = 0; i < m_; ++i)
                for (int j = 0; j < n_; ++j)
                    cache_[static_cast<std::size_t>(i) * n_ + j] = cost_(i, j);
        }
    }

    void solve() {
        init_tree();
        const std::int64_t cap =
            50LL * (m_ + n_) * (m_ + n_);
        const int refresh = m_ + n_ + 1;
        int since_refresh = 0;
        int ei, ej;
        while (find_entering(ei, ej)) {
            pivot(ei, ej);
            ++pivots_;
            if (pivots_ > cap)
                throw solver_error("flow: pivot cap exceeded (" + std::to_string(pivots_) +
                                   " pivots on " + std::to_string(m_) + "x" +
                                   std::to_string(n_) + ")");
            if (++since_refresh >= refresh) {
                recompute_potentials();
                since_refresh = 0;
            }
        }
        recompute_potentials();
        collect();
    }

    // unit-weighted optimal cost
    double total_cost() const { return total_; }
    // basic real arcs with positive flow: (source, sink, flow)
    struct flow_arc {
        int i, j;
        std::int64_t f;
    };
    const std::vector<flow_arc>& flows() const { return flows_; }
    const std::vector<double>& pi_source() const { return pi_src_; }
    const std::vector<double>& pi_sink() const { return pi_snk_; }
    std::int64_t pivots() const { return pivots_; }
    // exact in integer units: supplies/demands times potentials
    double dual_value_units() const { return dual_units_; }

private:
    static constexpr std::int64_t cache_limit_ = 6'000'000;

    double arc_cost(int i, int j) const {
        if (!cache_.empty()) return cache_[static_cast<std::size_t>(i) * n_ + j];
        return cost_(i, j);
    }

    int root() const { return m_ + n_; }
    bool is_source(int v) const { return v < m_; }

    // cost of the tree arc between v and parent(v)
    double tree_cost(int v) const {
        int p = parent_[v];
        if (p == root() || v == root()) return big_;
        return is_source(v) ? arc_cost(v, p - m_) : arc_cost(p, v - m_);
    }

    void add_child(int p, int c) {
        next_sib_[c] = first_child_[p];
        prev_sib_[c] = -1;
        if (first_child_[p] != -1) prev_sib_[first_child_[p]] = c;
        first_child_[p] = c;
    }

    void remove_child(int p, int c) {
        if (prev_sib_[c] != -1)
            next_sib_[prev_sib_[c]] = next_sib_[c];
        else
            first_child_[p] = next_sib_[c];
        if (next_sib_[c] != -1) prev_sib_[next_sib_[c]] = prev_sib_[c];
    }

    void init_tree() {
        const int N = m_ + n_ + 1;
        parent_.assign(N, -1);
        dirv_.assign(N, 0);
        tflow_.assign(N, 0);
        depth_.assign(N, 0);
        pi_.assign(N, 0.0);
        first_child_.assign(N, -1);
        next_sib_.assign(N, -1);
        prev_sib_.assign(N, -1);
        pivots_ = 0;
        next_arc_ = 0;
        block_ = std::max<std::int64_t>(
            64, static_cast<std::int64_t>(
                    std::sqrt(static_cast<double>(m_) * static_cast<double>(n_))));
        for (int i = 0; i < m_; ++i) {
            parent_[i] = root();
            dirv_[i] = +1; // arc source -> hub
            tflow_[i] = supply_[i];
            depth_[i] = 1;
            pi_[i] = big_;
            add_child(root(), i);
        }
        for (int j = 0; j < n_; ++j) {
            int v = m_ + j;
            parent_[v] = root();
            dirv_[v] = -1; // arc hub -> sink
            tflow_[v] = demand_[j];
            depth_[v] = 1;
            pi_[v] = -big_;
            add_child(root(), v);
        }
    }

    bool find_entering(int& ei, int& ej) {
        const std::int64_t A = static_cast<std::int64_t>(m_) * n_;
        std::int64_t a = next_arc_;
        std::int64_t scanned = 0;
        double best = -eps_;
        std::int64_t best_arc = -1;
        while (scanned < A) {
            std::int64_t count = std::min(block_, A - scanned);
            for (std::int64_t k = 0; k < count; ++k) {
                if (a >= A) a = 0;
                int i = static_cast<int>(a / n_);
                int j = static_cast<int>(a % n_);
                double r = arc_cost(i, j) - pi_[i] + pi_[m_ + j];
                if (r < best) {
                    best = r;
                    best_arc = a;
                }
                ++a;
            }
            scanned += count;
            if (best_arc >= 0) break;
        }
        next_arc_ = a >= A ? 0 : a;
        if (best_arc < 0) return false;
        ei = static_cast<int>(best_arc / n_);
        ej = static_cast<int>(best_arc % n_);
        return true;
    }

    void pivot(int ei, int ej) {
        const int u = ei;        // entering arc tail (source)
        const int v = m_ + ej;   // entering arc head (sink)
        const double re = arc_cost(ei, ej) - pi_[u] + pi_[v];

        // paths from both endpoints up to the common apex
        path_u_.clear();
        path_v_.clear();
        int x = u, y = v;
        while (x != y) {
            if (depth_[x] >= depth_[y]) {
                path_u_.push_back(x);
                x = parent_[x];
            } else {
                path_v_.push_back(y);
                y = parent_[y];
            }
        }

        // bounding arcs have flow moving against the cycle orientation;
        // traversal order for the tie-break: apex down to u, then v up to apex
        std::int64_t delta = std::numeric_limits<std::int64_t>::max();
        int leave = -1;
        bool leave_on_u_side = true;
        for (int k = static_cast<int>(path_u_.size()) - 1; k >= 0; --k) {
            int w = path_u_[k];
            if (dirv_[w] == +1 && tflow_[w] <= delta) {
                delta = tflow_[w];
                leave = w;
                leave_on_u_side = true;
            }
        }
        for (int w : path_v_) {
            if (dirv_[w] == -1 && tflow_[w] <= delta) {
                delta = tflow_[w];
                leave = w;
                leave_on_u_side = false;
            }
        }
        if (leave < 0) throw solver_error("flow: unbounded pivot cycle");

        // push delta around the cycle
        for (int w : path_u_) tflow_[w] -= dirv_[w] * delta;
        for (int w : path_v_) tflow_[w] += dirv_[w] * delta;

        // re-root the detached subtree at the entering endpoint inside it
        const int q = leave_on_u_side ? u : v;
        chain_.clear();
        for (int w = q;; w = parent_[w]) {
            chain_.push_back(w);
            if (w == leave) break;
        }
        const std::size_t L = chain_.size();
        old_dir_.resize(L);
        old_flow_.resize(L);
        old_parent_.resize(L);
        for (std::size_t k = 0; k < L; ++k) {
            old_dir_[k] = dirv_[chain_[k]];
            old_flow_[k] = tflow_[chain_[k]];
            old_parent_[k] = parent_[chain_[k]];
        }
        for (std::size_t k = 0; k < L; ++k) remove_child(old_parent_[k], chain_[k]);

        parent_[q] = leave_on_u_side ? v : u;
        dirv_[q] = leave_on_u_side ? +1 : -1; // physical arc is source -> sink
        tflow_[q] = delta;
        add_child(parent_[q], q);
        for (std::size_t k = 1; k < L; ++k) {
            int w = chain_[k];
            parent_[w] = chain_[k - 1];
            dirv_[w] = static_cast<signed char>(-old_dir_[k - 1]);
            tflow_[w] = old_flow_[k - 1];
            add_child(parent_[w], w);
        }

        // potentials of the re-hung subtree shift by a constant
        const double shift = leave_on_u_side ? re : -re;
        stack_.clear();
        stack_.push_back(q);
        while (!stack_.empty()) {
            int w = stack_.back();
            stack_.pop_back();
            pi_[w] += shift;
            depth_[w] = depth_[parent_[w]] + 1;
            for (int c = first_child_[w]; c != -1; c = next_sib_[c]) stack_.push_back(c);
        }
    }

    void recompute_potentials() {
        pi_[root()] = 0.0;
        stack_.clear();
        stack_.push_back(root());
        while (!stack_.empty()) {
            int w = stack_.back();
            stack_.pop_back();
            if (w != root()) {
                double c = tree_cost(w);
                pi_[w] = dirv_[w] == +1 ? c + pi_[parent_[w]] : pi_[parent_[w]] - c;
                depth_[w] = depth_[parent_[w]] + 1;
            }
            for (int c = first_child_[w]; c != -1; c = next_sib_[c]) stack_.push_back(c);
        }
    }

    void collect() {
        for (int c = first_child_[root()]; c != -1; c = next_sib_[c])
            if (tflow_[c] != 0)
                throw solver_error("flow: artificial arc kept positive flow at optimum");
        flows_.clear();
        long double total = 0.0L;
        for (int w = 0; w < m_ + n_; ++w) {
            if (parent_[w] == root() || tflow_[w] == 0) continue;
            int i = is_source(w) ? w : parent_[w];
            int j = is_source(w) ? parent_[w] - m_ : w - m_;
            flows_.push_back({i, j, tflow_[w]});
            total += static_cast<long double>(tflow_[w]) * arc_cost(i, j);
        }
        total_ = static_cast<double>(total);
        pi_src_.assign(pi_.begin(), pi_.begin() + m_);
        pi_snk_.assign(pi_.begin() + m_, pi_.begin() + m_ + n_);
        long double dual = 0.0L;
        for (int i = 0; i < m_; ++i) dual += static_cast<long double>(supply_[i]) * pi_src_[i];
        for (int j = 0; j < n_; ++j) dual -= static_cast<long double>(demand_[j]) * pi_snk_[j];
        dual_units_ = static_cast<double>(dual);
    }

    int m_, n_;
    std::vector<std::int64_t> supply_, demand_;
    CostFn cost_;
    std::vector<double> cache_;
    double big_ = 0.0, eps_ = 0.0;

    std::vector<int> parent_, depth_, first_child_, next_sib_, prev_sib_;
    std::vector<signed char> dirv_;
    std::vector<std::int64_t> tflow_;
    std::vector<double> pi_;
    std::vector<int> path_u_, path_v_, chain_, stack_;
    std::vector<signed char> old_dir_;
    std::vector<std::int64_t> old_flow_;
    std::vector<int> old_parent_;

    std::int64_t next_arc_ = 0, block_ = 64, pivots_ = 0;
    std::vector<flow_arc> flows_;
    std::vector<double> pi_src_, pi_snk_;
    double total_ = 0.0, dual_units_ = 0.0;
};

} // namespace cwot::detail

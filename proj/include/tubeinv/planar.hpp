#pragma once

#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tubeinv {

namespace detail {

class UnionFind {
public:
    explicit UnionFind(size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
    size_t find(size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    void unite(size_t a, size_t b) { parent_[find(a)] = find(b); }

private:
    std::vector<size_t> parent_;
};

}  // namespace detail

/// A planar (m,n)-tangle without crossings: a non-crossing perfect matching on
/// the m + n boundary points. Boundary nodes are indexed circularly: bottom
/// points 0..m-1 left to right, then top points m..m+n-1 right to left.
class PlanarDiagram {
public:
    PlanarDiagram(int m, int n, std::vector<int> match) : m_(m), n_(n), match_(std::move(match)) {
        const int total = m_ + n_;
        if (total % 2 != 0) throw std::invalid_argument("m + n must be even");
        if (static_cast<int>(match_.size()) != total) throw std::invalid_argument("bad matching size");
        for (int i = 0; i < total; ++i) {
            if (match_[i] < 0 || match_[i] >= total || match_[i] == i || match_[match_[i]] != i)
                throw std::invalid_argument("matching is not a perfect involution");
        }
        // non-crossing <=> balanced nesting in circular order
        std::vector<int> stack;
        for (int i = 0; i < total; ++i) {
            if (match_[i] > i) {
                stack.push_back(i);
            } else {
                if (stack.empty() || stack.back() != match_[i])
                    throw std::invalid_argument("matching has crossing chords");
                stack.pop_back();
            }
        }
    }

    int bottom_points() const { return m_; }
    int top_points() const { return n_; }

    int bottom_node(int i) const { return i; }
    int top_node(int j) const { return m_ + (n_ - 1 - j); }  // j counted left to right

    int partner(int node) const { return match_[node]; }
    const std::vector<int>& matching() const { return match_; }

    static PlanarDiagram identity(int n) {
        std::vector<int> match(2 * n);
        for (int i = 0; i < n; ++i) {
            match[i] = 2 * n - 1 - i;
            match[2 * n - 1 - i] = i;
        }
        return PlanarDiagram(n, n, std::move(match));
    }

    /// The cap-cup generator e_k on n strands, 1 <= k <= n-1.
    static PlanarDiagram cap_cup(int k, int n) {
        if (k < 1 || k >= n) throw std::invalid_argument("generator index out of range");
        PlanarDiagram id = identity(n);
        std::vector<int> match = id.match_;
        auto join = [&match](int a, int b) {
            match[a] = b;
            match[b] = a;
        };
        join(k - 1, k);
        join(id.top_node(k - 1), id.top_node(k));
        return PlanarDiagram(n, n, std::move(match));
    }

    /// Horizontal juxtaposition, this diagram on the left.
    PlanarDiagram tensor(const PlanarDiagram& other) const {
        const int m = m_ + other.m_, n = n_ + other.n_;
        std::vector<int> match(m + n);
        auto map_left = [&](int node) {
            return node < m_ ? node : m + n - 1 - (n_ - 1 - (node - m_));
        };
        auto map_right = [&](int node) {
            return node < other.m_ ? m_ + node : m + n - 1 - (n_ + (other.n_ - 1 - (node - other.m_)));
        };
        for (int i = 0; i < m_ + n_; ++i) match[map_left(i)] = map_left(match_[i]);
        for (int i = 0; i < other.m_ + other.n_; ++i) match[map_right(i)] = map_right(other.match_[i]);
        return PlanarDiagram(m, n, std::move(match));
    }

    /// Stacks `top` above this diagram, gluing this top boundary to its bottom
    /// boundary. Returns the glued diagram and the number of closed loops.
    std::pair<PlanarDiagram, int> compose(const PlanarDiagram& top) const {
        if (n_ != top.m_) throw std::invalid_argument("tangle arity mismatch");
        const int m = m_, k = n_, n = top.n_;
        detail::UnionFind uf(m + k + n);
        auto low_node = [&](int node) { return node < m ? node : m + (k - 1 - (node - m)); };
        auto high_node = [&](int node) { return node < k ? m + node : m + k + (n - 1 - (node - k)); };
        for (int i = 0; i < m + k; ++i)
            if (match_[i] > i) uf.unite(low_node(i), low_node(match_[i]));
        for (int i = 0; i < k + n; ++i)
            if (top.match_[i] > i) uf.unite(high_node(i), high_node(top.match_[i]));

        std::vector<int> mate(m + k + n, -1);
        std::vector<int> loops_roots;
        // each component carries exactly two boundary nodes or none (a loop)
        std::vector<int> first_boundary(m + k + n, -1);
        std::vector<int> result_match(m + n, -1);
        auto boundary_index = [&](int node) {
            // circular index in the glued (m,n)-diagram
            if (node < m) return node;
            int t = node - (m + k);  // top left-to-right position
            return m + (n - 1 - t);
        };
        int loops = 0;
        for (int node = 0; node < m + k + n; ++node) {
            bool is_boundary = node < m || node >= m + k;
            if (!is_boundary) continue;
            int root = static_cast<int>(uf.find(static_cast<size_t>(node)));
            if (first_boundary[root] < 0) {
                first_boundary[root] = node;
            } else {
                int a = boundary_index(first_boundary[root]);
                int b = boundary_index(node);
                result_match[a] = b;
                result_match[b] = a;
                first_boundary[root] = -2;
            }
        }
        for (int middle = m; middle < m + k; ++middle) {
            int root = static_cast<int>(uf.find(static_cast<size_t>(middle)));
            if (first_boundary[root] == -1) {
                ++loops;
                first_boundary[root] = -3;  // count each loop once
            }
        }
        (void)mate;
        (void)loops_roots;
        return {PlanarDiagram(m, n, std::move(result_match)), loops};
    }

    /// Closes the rightmost `count` strands (top j joined to bottom j for the
    /// closed positions). Returns the partially closed diagram and loop count.
    std::pair<PlanarDiagram, int> close_right(int count) const {
        if (m_ != n_ || count < 0 || count > n_) throw std::invalid_argument("bad partial closure");
        const int keep = n_ - count;
        detail::UnionFind uf(static_cast<size_t>(m_ + n_));
        for (int i = 0; i < m_ + n_; ++i)
            if (match_[i] > i) uf.unite(static_cast<size_t>(i), static_cast<size_t>(match_[i]));
        for (int j = keep; j < n_; ++j)
            uf.unite(static_cast<size_t>(bottom_node(j)), static_cast<size_t>(top_node(j)));

        std::vector<int> first_boundary(m_ + n_, -1);
        std::vector<int> result_match(2 * keep, -1);
        auto boundary_index = [&](int node) {
            if (node < keep) return node;  // kept bottom point
            int j = n_ - 1 - (node - m_);  // kept top point, left-to-right position
            return keep + (keep - 1 - j);
        };
        int loops = 0;
        for (int j = 0; j < keep; ++j) {
            for (int node : {bottom_node(j), top_node(j)}) {
                int root = static_cast<int>(uf.find(static_cast<size_t>(node)));
                if (first_boundary[root] < 0) {
                    first_boundary[root] = node;
                } else {
                    int a = boundary_index(first_boundary[root]);
                    int b = boundary_index(node);
                    result_match[a] = b;
                    result_match[b] = a;
                    first_boundary[root] = -2;
                }
            }
        }
        for (int j = keep; j < n_; ++j) {
            for (int node : {bottom_node(j), top_node(j)}) {
                int root = static_cast<int>(uf.find(static_cast<size_t>(node)));
                if (first_boundary[root] == -1) {
                    ++loops;
                    first_boundary[root] = -3;
                }
            }
        }
        return {PlanarDiagram(keep, keep, std::move(result_match)), loops};
    }

    friend bool operator==(const PlanarDiagram& a, const PlanarDiagram& b) {
        return a.m_ == b.m_ && a.n_ == b.n_ && a.match_ == b.match_;
    }
    friend bool operator<(const PlanarDiagram& a, const PlanarDiagram& b) {
        if (a.m_ != b.m_) return a.m_ < b.m_;
        if (a.n_ != b.n_) return a.n_ < b.n_;
        return a.match_ < b.match_;
    }

    /// Chord notation, e.g. "(b0-t0)(b1-b2)..." for debugging.
    std::string str() const {
        auto name = [this](int node) {
            if (node < m_) return "b" + std::to_string(node);
            return "t" + std::to_string(n_ - 1 - (node - m_));
        };
        std::string s;
        for (int i = 0; i < m_ + n_; ++i)
            if (match_[i] > i) s += "(" + name(i) + "-" + name(match_[i]) + ")";
        return s;
    }

private:
    int m_, n_;
    std::vector<int> match_;
};

}  // namespace tubeinv

#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tubeinv/cyclotomic.hpp"
#include "tubeinv/linalg.hpp"
#include "tubeinv/policy.hpp"

namespace tubeinv {

/// A symmetric quiver with a nowhere-zero eigenvector for beta = -[2]_q,
/// solved exactly in Q(zeta_{4h}). Double Dynkin quivers of type A, D, E are
/// available as builtins; arbitrary symmetric graphs are accepted and
/// validated (disconnected ones are permitted as negative controls).
class ADEQuiver {
public:
    static ADEQuiver from_graph(std::string name, std::vector<std::string> vertices,
                                const std::vector<std::pair<int, int>>& edges, int h,
                                std::optional<std::vector<Cyc>> eigenvector = std::nullopt) {
        if (h < 3) throw std::invalid_argument("quiver: h must be >= 3");
        const int n = static_cast<int>(vertices.size());
        if (n == 0) throw std::invalid_argument("quiver: no vertices");
        std::vector<std::vector<int>> adj(n, std::vector<int>(n, 0));
        for (auto [u, v] : edges) {
            if (u < 0 || v < 0 || u >= n || v >= n) throw std::invalid_argument("quiver: edge endpoint out of range");
            if (u == v) throw std::invalid_argument("quiver: self-loops are not allowed");
            if (adj[u][v]) throw std::invalid_argument("quiver: multiple edges are not allowed");
            adj[u][v] = adj[v][u] = 1;
        }
        ADEQuiver q;
        q.name_ = std::move(name);
        q.vertex_names_ = std::move(vertices);
        q.adj_ = std::move(adj);
        q.h_ = h;
        q.connected_ = q.compute_connected();
        if (eigenvector) {
            if (static_cast<int>(eigenvector->size()) != n)
                throw std::invalid_argument("quiver: eigenvector has wrong length");
            q.x_ = std::move(*eigenvector);
            q.validate_eigenvector();
        } else {
            q.solve_eigenvector();
        }
        return q;
    }

    /// Builtin names: A2..A29, D4..D16, E6, E7, E8.
    static ADEQuiver builtin(const std::string& name) {
        auto arm_graph = [](const std::string& nm, const std::vector<int>& arms, int h) {
            // star with given arm lengths (in edges) around a branch vertex 0
            std::vector<std::string> verts = {"v0"};
            std::vector<std::pair<int, int>> edges;
            int next = 1;
            for (int arm : arms) {
                int prev = 0;
                for (int s = 0; s < arm; ++s) {
                    verts.push_back("v" + std::to_string(next));
                    edges.emplace_back(prev, next);
                    prev = next++;
                }
            }
            return from_graph(nm, std::move(verts), edges, h);
        };
        if (name.size() >= 2 && (name[0] == 'A' || name[0] == 'D' || name[0] == 'E')) {
            int n = 0;
            try {
                n = std::stoi(name.substr(1));
            } catch (...) {
                throw std::invalid_argument("unknown builtin quiver: " + name);
            }
            if (name[0] == 'A' && n >= 2 && n <= 29) {
                std::vector<std::string> verts;
                std::vector<std::pair<int, int>> edges;
                for (int i = 0; i < n; ++i) {
                    verts.push_back("v" + std::to_string(i));
                    if (i > 0) edges.emplace_back(i - 1, i);
                }
                return from_graph(name, std::move(verts), edges, n + 1);
            }
            if (name[0] == 'D' && n >= 4 && n <= 16) return arm_graph(name, {1, 1, n - 3}, 2 * (n - 1));
            if (name[0] == 'E' && n == 6) return arm_graph(name, {1, 2, 2}, 12);
            if (name[0] == 'E' && n == 7) return arm_graph(name, {1, 2, 3}, 18);
            if (name[0] == 'E' && n == 8) return arm_graph(name, {1, 2, 4}, 30);
        }
        throw std::invalid_argument("unknown builtin quiver: " + name);
    }

    const std::string& name() const { return name_; }
    int vertex_count() const { return static_cast<int>(adj_.size()); }
    const std::vector<std::string>& vertex_names() const { return vertex_names_; }
    const std::vector<std::vector<int>>& adjacency() const { return adj_; }
    int coxeter() const { return h_; }
    const std::vector<Cyc>& eigenvector() const { return x_; }
    bool connected() const { return connected_; }

private:
    ADEQuiver() = default;

    bool compute_connected() const {
        const int n = vertex_count();
        std::vector<bool> seen(n, false);
        std::vector<int> stack = {0};
        seen[0] = true;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int u = 0; u < n; ++u)
                if (adj_[v][u] && !seen[u]) {
                    seen[u] = true;
                    stack.push_back(u);
                }
        }
        return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
    }

    void validate_eigenvector() const {
        const Cyc beta = loop_value(h_);
        const int n = vertex_count();
        for (int i = 0; i < n; ++i) {
            if (x_[i].is_zero())
                throw std::invalid_argument("quiver: eigenvector entry " + std::to_string(i) + " is zero");
            Cyc acc = Cyc::zero(cyc_order(h_));
            for (int j = 0; j < n; ++j)
                if (adj_[i][j]) acc += x_[j];
            if (acc != beta * x_[i])
                throw std::invalid_argument("quiver: G x != beta x at vertex " + std::to_string(i));
        }
    }

    void solve_eigenvector() {
        const int n = vertex_count();
        ExactPolicy p{h_};
        const Cyc beta = p.beta();
        Mat<Cyc> m(n, std::vector<Cyc>(n, p.zero()));
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j)
                if (adj_[i][j]) m[i][j] = p.one();
            m[i][i] -= beta;
        }
        auto ns = linalg::nullspace(p, std::move(m), static_cast<size_t>(n));
        if (ns.basis.empty())
            throw std::invalid_argument("quiver: beta = -[2]_q is not an eigenvalue of the graph");
        // Reduced nullspace vectors of a block graph are supported on single
        // components, so their plain sum is the nowhere-zero candidate.
        std::vector<Cyc> x(n, p.zero());
        for (const auto& v : ns.basis)
            for (int i = 0; i < n; ++i) x[i] += v[i];
        for (int i = 0; i < n; ++i)
            if (x[i].is_zero())
                throw std::invalid_argument("quiver: no nowhere-zero eigenvector for beta exists");
        x_ = std::move(x);
        validate_eigenvector();
    }

    std::string name_;
    std::vector<std::string> vertex_names_;
    std::vector<std::vector<int>> adj_;
    int h_ = 0;
    std::vector<Cyc> x_;
    bool connected_ = true;
};

}  // namespace tubeinv

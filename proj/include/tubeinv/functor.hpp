#pragma once

#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tubeinv/policy.hpp"
#include "tubeinv/quiver.hpp"

namespace tubeinv {

/// A path i -> j in the double quiver, encoded as one byte per step: byte 0 is
/// the start vertex, bytes 1..len are arrow ids.
using PathKey = std::string;

template <class S>
using GradedVec = std::unordered_map<PathKey, S>;

/// Block-graded linear data between path spaces: one dense matrix per vertex
/// pair, rows indexed by target-cell paths and columns by source-cell paths
/// (or by essential coordinates, depending on context).
template <class S>
struct GradedBlocks {
    std::map<std::pair<int, int>, Mat<S>> blocks;
};

/// The module-category functor M of the quiver construction, realized as
/// sparse generator actions on path vectors: M(ann_1): v (x) w -> x_j <v,w>
/// with j the middle vertex, M(cre_1): 1 -> x_i^{-1} sum_b b (x) b*.
template <class P>
class MFunctor {
public:
    using S = typename P::Scalar;
    using Vec = GradedVec<S>;

    MFunctor(const ADEQuiver& q, P pol) : q_(q), pol_(pol) {
        const auto& adj = q.adjacency();
        const int n = q.vertex_count();
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (adj[i][j]) {
                    src_.push_back(i);
                    dst_.push_back(j);
                }
        rev_.resize(src_.size());
        for (size_t a = 0; a < src_.size(); ++a)
            for (size_t b = 0; b < src_.size(); ++b)
                if (src_[a] == dst_[b] && dst_[a] == src_[b]) rev_[a] = static_cast<int>(b);
        x_.reserve(n);
        x_inv_.reserve(n);
        for (const Cyc& xi : q.eigenvector()) {
            x_.push_back(pol_.convert(xi));
            x_inv_.push_back(pol_.convert(xi.inverse()));
        }
        arrows_from_.assign(n, {});
        for (size_t a = 0; a < src_.size(); ++a) arrows_from_[src_[a]].push_back(static_cast<int>(a));
        verify_identities();
    }

    const ADEQuiver& quiver() const { return q_; }
    const P& policy() const { return pol_; }
    int arrow_count() const { return static_cast<int>(src_.size()); }
    int arrow_src(int a) const { return src_[a]; }
    int arrow_dst(int a) const { return dst_[a]; }
    int arrow_rev(int a) const { return rev_[a]; }
    const std::vector<int>& arrows_from(int v) const { return arrows_from_[v]; }
    const S& x(int v) const { return x_[v]; }
    const S& x_inv(int v) const { return x_inv_[v]; }

    static PathKey empty_path(int vertex) { return PathKey(1, static_cast<char>(vertex)); }
    static int path_length(const PathKey& p) { return static_cast<int>(p.size()) - 1; }
    static int path_start(const PathKey& p) { return static_cast<unsigned char>(p[0]); }
    int path_end(const PathKey& p) const {
        return p.size() == 1 ? path_start(p) : dst_[static_cast<unsigned char>(p.back())];
    }
    int vertex_before(const PathKey& p, int k) const {
        // vertex after k-1 arrows, i.e. the source of the k-th arrow slot
        return k == 1 ? path_start(p) : dst_[static_cast<unsigned char>(p[k - 1])];
    }
    PathKey append_arrow(const PathKey& p, int a) const {
        PathKey r = p;
        r.push_back(static_cast<char>(a));
        return r;
    }
    PathKey concat(const PathKey& a, const PathKey& b) const {
        if (path_end(a) != path_start(b)) throw std::logic_error("path concat endpoint mismatch");
        return a + b.substr(1);
    }
    std::pair<PathKey, PathKey> split(const PathKey& p, int prefix_len) const {
        PathKey a = p.substr(0, static_cast<size_t>(prefix_len) + 1);
        PathKey b = empty_path(path_end(a));
        b += p.substr(static_cast<size_t>(prefix_len) + 1);
        return {a, b};
    }

    void add_term(Vec& v, const PathKey& p, const S& c) const {
        if (pol_.is_zero(c)) return;
        auto [it, fresh] = v.emplace(p, c);
        if (!fresh) {
            it->second += c;
            if (pol_.is_zero(it->second)) v.erase(it);
        }
    }

    /// M(ann) contracting strand positions k, k+1.
    Vec apply_cap(int k, const Vec& v) const {
        Vec out;
        for (const auto& [p, c] : v) {
            const int len = path_length(p);
            if (k < 1 || k + 1 > len) throw std::invalid_argument("cap position out of range");
            int a = static_cast<unsigned char>(p[k]);
            int b = static_cast<unsigned char>(p[k + 1]);
            if (b != rev_[a]) continue;
            PathKey r = p.substr(0, static_cast<size_t>(k));
            r += p.substr(static_cast<size_t>(k) + 2);
            add_term(out, r, c * x_[dst_[a]]);
        }
        return out;
    }

    /// M(cre) inserting a created pair before strand position k (k may be len+1).
    Vec apply_cup(int k, const Vec& v) const {
        Vec out;
        for (const auto& [p, c] : v) {
            const int len = path_length(p);
            if (k < 1 || k > len + 1) throw std::invalid_argument("cup position out of range");
            const int w = (k == len + 1) ? path_end(p) : vertex_before(p, k);
            const S coeff = c * x_inv_[w];
            for (int d : arrows_from_[w]) {
                PathKey r = p.substr(0, static_cast<size_t>(k));
                r.push_back(static_cast<char>(d));
                r.push_back(static_cast<char>(rev_[d]));
                r += p.substr(static_cast<size_t>(k));
                add_term(out, r, coeff);
            }
        }
        return out;
    }

    /// M(e_k) = M(cre) after M(ann) at position k.
    Vec apply_e(int k, const Vec& v) const {
        Vec out;
        for (const auto& [p, c] : v) {
            const int len = path_length(p);
            if (k < 1 || k + 1 > len) throw std::invalid_argument("generator position out of range");
            int a = static_cast<unsigned char>(p[k]);
            int b = static_cast<unsigned char>(p[k + 1]);
            if (b != rev_[a]) continue;
            const int base = src_[a];
            const S coeff = c * x_[dst_[a]] * x_inv_[base];
            for (int d : arrows_from_[base]) {
                PathKey r = p;
                r[k] = static_cast<char>(d);
                r[k + 1] = static_cast<char>(rev_[d]);
                add_term(out, r, coeff);
            }
        }
        return out;
    }

    /// Skein-expanded crossing at position k: A^{+-1} id + A^{-+1} e_k.
    Vec apply_cross(int k, int sign, const Vec& v) const {
        const S a_pow = pol_.A(sign > 0 ? 1 : -1);
        const S a_neg = pol_.A(sign > 0 ? -1 : 1);
        Vec out;
        out.reserve(v.size() * 2);
        for (const auto& [p, c] : v) {
            add_term(out, p, c * a_pow);
            int a = static_cast<unsigned char>(p[k]);
            int b = static_cast<unsigned char>(p[k + 1]);
            if (b != rev_[a]) continue;
            const int base = src_[a];
            const S coeff = c * x_[dst_[a]] * x_inv_[base] * a_neg;
            for (int d : arrows_from_[base]) {
                PathKey r = p;
                r[k] = static_cast<char>(d);
                r[k + 1] = static_cast<char>(rev_[d]);
                add_term(out, r, coeff);
            }
        }
        return out;
    }

    /// Moves the trailing bundle of z strands to the front across m strands
    /// (z*m crossings of one sign), the image of the braiding under M.
    Vec braid_to_front(Vec v, int m, int z, int sign) const {
        for (int t = 1; t <= z; ++t)
            for (int k = m + t - 1; k >= t; --k) v = apply_cross(k, sign, v);
        return v;
    }

    /// M(ann_n): contracts the nested bundle occupying positions off+1..off+2n.
    Vec apply_cap_bundle(int n, int off, Vec v) const {
        for (int k = off + n; k >= off + 1; --k) v = apply_cap(k, v);
        return v;
    }

    /// M(cre_n): creates a nested n-pair at positions off+1..off+2n.
    Vec apply_cup_bundle(int n, int off, Vec v) const {
        for (int k = off + 1; k <= off + n; ++k) v = apply_cup(k, v);
        return v;
    }

    // ---- right composition: g |-> g o M(op) for functionals stored as sparse
    // rows over path keys. Precomposing with a cap expands, with a cup contracts.

    Vec rc_cap(int k, const Vec& g) const {
        Vec out;
        for (const auto& [q, c] : g) {
            const int len = path_length(q);
            if (k < 1 || k > len + 1) throw std::invalid_argument("cap position out of range");
            const int w = (k == len + 1) ? path_end(q) : vertex_before(q, k);
            for (int d : arrows_from_[w]) {
                PathKey r = q.substr(0, static_cast<size_t>(k));
                r.push_back(static_cast<char>(d));
                r.push_back(static_cast<char>(rev_[d]));
                r += q.substr(static_cast<size_t>(k));
                add_term(out, r, c * x_[dst_[d]]);
            }
        }
        return out;
    }

    Vec rc_cup(int k, const Vec& g) const {
        Vec out;
        for (const auto& [q, c] : g) {
            const int len = path_length(q);
            if (k < 1 || k + 1 > len) throw std::invalid_argument("cup position out of range");
            int a = static_cast<unsigned char>(q[k]);
            int b = static_cast<unsigned char>(q[k + 1]);
            if (b != rev_[a]) continue;
            PathKey r = q.substr(0, static_cast<size_t>(k));
            r += q.substr(static_cast<size_t>(k) + 2);
            add_term(out, r, c * x_inv_[src_[a]]);
        }
        return out;
    }

    Vec rc_e(int k, const Vec& g) const { return rc_cap(k, rc_cup(k, g)); }

    Vec rc_cross(int k, int sign, const Vec& g) const {
        const S a_pow = pol_.A(sign > 0 ? 1 : -1);
        const S a_neg = pol_.A(sign > 0 ? -1 : 1);
        Vec out;
        out.reserve(g.size() * 2);
        for (const auto& [p, c] : g) {
            add_term(out, p, c * a_pow);
            int a = static_cast<unsigned char>(p[k]);
            int b = static_cast<unsigned char>(p[k + 1]);
            if (b != rev_[a]) continue;
            const int base = src_[a];
            const S coeff = c * x_inv_[base] * a_neg;
            for (int d : arrows_from_[base]) {
                PathKey r = p;
                r[k] = static_cast<char>(d);
                r[k + 1] = static_cast<char>(rev_[d]);
                add_term(out, r, coeff * x_[dst_[d]]);
            }
        }
        return out;
    }

    Vec rc_jw(int n, int off, Vec g) const {
        if (n <= 1) return g;
        if (n >= q_.coxeter()) throw std::invalid_argument("no Jones-Wenzl projector at this size");
        Vec w = rc_jw(n - 1, off, std::move(g));
        Vec u = rc_e(off + n - 1, w);
        u = rc_jw(n - 1, off, std::move(u));
        const S ratio = pol_.qint(n - 1) * inv_qint(n);
        Vec out = w;
        for (const auto& [p, c] : u) add_term(out, p, c * ratio);
        return out;
    }

    /// g o M(braid word moving the trailing z-bundle to the front across m strands).
    Vec rc_braid_to_front(Vec g, int m, int z, int sign) const {
        for (int t = z; t >= 1; --t)
            for (int k = t; k <= m + t - 1; ++k) g = rc_cross(k, sign, g);
        return g;
    }

    Vec rc_cap_bundle(int n, int off, Vec g) const {
        for (int k = off + 1; k <= off + n; ++k) g = rc_cap(k, g);
        return g;
    }
    Vec rc_cup_bundle(int n, int off, Vec g) const {
        for (int k = off + n; k >= off + 1; --k) g = rc_cup(k, g);
        return g;
    }

    // ---- tangle words: a forward-ordered list of elementary steps ----

    struct WordOp {
        enum Kind { cap, cup, cross, jw } kind;
        int pos;   // strand position (1-based)
        int n;     // bundle size for jw
        int sign;  // crossing sign
    };
    using Word = std::vector<WordOp>;

    Vec apply_word(const Word& w, Vec v) const {
        for (const auto& op : w) {
            switch (op.kind) {
                case WordOp::cap: v = apply_cap(op.pos, v); break;
                case WordOp::cup: v = apply_cup(op.pos, v); break;
                case WordOp::cross: v = apply_cross(op.pos, op.sign, v); break;
                case WordOp::jw: v = apply_jw(op.n, op.pos, std::move(v)); break;
            }
        }
        return v;
    }

    /// g o M(word) for a functional row g.
    Vec rc_word(const Word& w, Vec g) const {
        for (auto it = w.rbegin(); it != w.rend(); ++it) {
            switch (it->kind) {
                case WordOp::cap: g = rc_cap(it->pos, g); break;
                case WordOp::cup: g = rc_cup(it->pos, g); break;
                case WordOp::cross: g = rc_cross(it->pos, it->sign, g); break;
                case WordOp::jw: g = rc_jw(it->n, it->pos, std::move(g)); break;
            }
        }
        return g;
    }

    /// Jones-Wenzl projector on strand positions off+1 .. off+n via the Wenzl
    /// recursion (signed loop convention, coefficient +[n-1]/[n]); never
    /// expands the projector into diagrams.
    Vec apply_jw(int n, int off, Vec v) const {
        if (n <= 1) return v;
        if (n >= q_.coxeter()) throw std::invalid_argument("no Jones-Wenzl projector at this size");
        Vec w = apply_jw(n - 1, off, std::move(v));
        Vec u = apply_e(off + n - 1, w);
        u = apply_jw(n - 1, off, std::move(u));
        const S ratio = pol_.qint(n - 1) * inv_qint(n);
        Vec out = w;
        for (const auto& [p, c] : u) add_term(out, p, c * ratio);
        return out;
    }

    // ---- per-cell path tables, built lazily ----

    struct Cell {
        std::vector<PathKey> paths;
        std::unordered_map<PathKey, int> index;
        bool has(const PathKey& p) const { return index.count(p) > 0; }
        int at(const PathKey& p) const { return index.at(p); }
        size_t size() const { return paths.size(); }
    };

    const Cell& cell(int i, int j, int len) const {
        std::lock_guard<std::mutex> lock(cell_mu_);
        ensure_length_locked(len);
        return cells_[len][{i, j}];
    }

    /// Pre-enumerates all cells up to max_len (call before parallel sections).
    void ensure_paths(int max_len) const {
        std::lock_guard<std::mutex> lock(cell_mu_);
        ensure_length_locked(max_len);
    }

    Vec dense_to_vec(int i, int j, int len, const std::vector<S>& column) const {
        const Cell& c = cell(i, j, len);
        Vec v;
        for (size_t r = 0; r < column.size(); ++r)
            if (!pol_.is_zero(column[r])) v.emplace(c.paths[r], column[r]);
        return v;
    }

private:
    S inv_qint(int n) const {
        if constexpr (P::exact) {
            return quantum_integer(n, pol_.h).inverse();
        } else {
            return 1.0 / quantum_integer(n, pol_.h).embed();
        }
    }

    void ensure_length_locked(int len) const {
        while (static_cast<int>(cells_.size()) <= len) {
            int l = static_cast<int>(cells_.size());
            std::map<std::pair<int, int>, Cell> layer;
            if (l == 0) {
                for (int i = 0; i < q_.vertex_count(); ++i) {
                    Cell& c = layer[{i, i}];
                    c.paths.push_back(empty_path(i));
                    c.index.emplace(c.paths.back(), 0);
                }
            } else {
                for (const auto& [ij, prev] : cells_[l - 1]) {
                    for (const PathKey& p : prev.paths) {
                        int end = path_end(p);
                        for (int a : arrows_from_[end]) {
                            Cell& c = layer[{ij.first, dst_[a]}];
                            c.paths.push_back(append_arrow(p, a));
                            c.index.emplace(c.paths.back(), static_cast<int>(c.paths.size()) - 1);
                        }
                    }
                }
            }
            cells_.push_back(std::move(layer));
        }
    }

    // Loop value and both zig-zags pin the index convention of M(ann)/M(cre);
    // a wrong reading must fail here, at construction.
    void verify_identities() const {
        const S beta = pol_.beta();
        for (int i = 0; i < q_.vertex_count(); ++i) {
            Vec unit;
            unit.emplace(empty_path(i), pol_.one());
            Vec loop = apply_cap(1, apply_cup(1, unit));
            if (loop.size() != 1 || !near_equal(loop.begin()->second, beta))
                throw std::logic_error("M(ann_1 cre_1) != beta at vertex " + std::to_string(i));
        }
        for (int a = 0; a < arrow_count(); ++a) {
            Vec b;
            PathKey pb = empty_path(src_[a]);
            pb.push_back(static_cast<char>(a));
            b.emplace(pb, pol_.one());
            Vec z1 = apply_cap(2, apply_cup(1, b));
            Vec z2 = apply_cap(1, apply_cup(2, b));
            for (const Vec* z : {&z1, &z2})
                if (z->size() != 1 || z->begin()->first != pb || !near_equal(z->begin()->second, pol_.one()))
                    throw std::logic_error("zig-zag identity failed on arrow " + std::to_string(a));
        }
    }

    bool near_equal(const S& a, const S& b) const {
        if constexpr (P::exact) {
            return a == b;
        } else {
            return std::abs(a - b) < 1e-9;
        }
    }

    ADEQuiver q_;
    P pol_;
    std::vector<int> src_, dst_, rev_;
    std::vector<std::vector<int>> arrows_from_;
    std::vector<S> x_, x_inv_;

    mutable std::mutex cell_mu_;
    mutable std::vector<std::map<std::pair<int, int>, Cell>> cells_;
};

}  // namespace tubeinv

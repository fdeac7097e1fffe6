#pragma once

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "tubeinv/essential.hpp"
#include "tubeinv/functor.hpp"
#include "tubeinv/linalg.hpp"
#include "tubeinv/modular_data.hpp"
#include "tubeinv/tm.hpp"
#include "tubeinv/util.hpp"

namespace tubeinv {

struct FrobeniusReport {
    bool haploid = false;
    bool unit_law = false;
    bool commutativity = false;
    bool associativity = false;
    bool pairing_perfect = false;
    bool pairing_symmetric = false;
    bool balanced_frobenius = false;
    bool dim_criterion = false;          // total dimension equals d(C)
    bool dim_matches_invariance = false; // agrees with the invariance report
    bool dual_route_ranks = false;       // rank of the loop projector equals dim tm_basis
    std::vector<std::string> failures;

    bool all_pass() const {
        return haploid && unit_law && commutativity && associativity && pairing_perfect &&
               pairing_symmetric && balanced_frobenius && dim_criterion && dim_matches_invariance &&
               dual_route_ranks;
    }
};

/// The Frobenius-algebra structure on TM at small Coxeter number, exact only.
/// Simple summands are indexed by label pairs (a,b) with Z_ab != 0, realized as
/// functionals on diagonal path spaces fixed by the loop-average idempotent
/// (an s-colored circle crossing the first strand group positively and the
/// second negatively). Morphisms between pair objects are tube morphisms: a
/// strand word together with that loop average.
class FrobContext {
public:
    using P = ExactPolicy;
    using S = Cyc;
    using Vec = GradedVec<S>;
    using F = MFunctor<P>;
    using Word = F::Word;
    using WordOp = F::WordOp;

    // Convention constants pinned by the algebra checks: this is the unique
    // assignment under which the unit, commutativity and Frobenius identities
    // close (see the decisions ledger). kReorderSign is the bookkeeping
    // braiding phi taking the interleaved pair realization to the side-by-side
    // order; its inverse (opposite sign, opposite direction) appears in the
    // covertex and coevaluation words so that covertex . vertex telescopes.
    static constexpr int kReorderSign = -1;
    static constexpr int kTildeSign = 1;   // realization swap between (X,Y)- and (Y,X)-ordered spaces
    static constexpr int kBraidSign = -1;  // first-coordinate part of the doubled braiding

    struct PairLabel {
        int a = 0, b = 0;
        friend bool operator<(const PairLabel& x, const PairLabel& y) {
            return std::tie(x.a, x.b) < std::tie(y.a, y.b);
        }
        friend bool operator==(const PairLabel& x, const PairLabel& y) { return x.a == y.a && x.b == y.b; }
    };

    FrobContext(const F& f, const EssentialTower<P>& tower)
        : f_(f), tower_(tower), md_(f.quiver().coxeter()), h_(f.quiver().coxeter()) {
        if (h_ > 6) throw std::invalid_argument("exact backend required, h <= 6");
        f_.ensure_paths(6 * (h_ - 2));
        TMSolver<P> solver(f_, tower_);
        const int n = h_ - 1;
        z_.assign(n, std::vector<long>(n, 0));
        for (int a = 1; a <= n; ++a)
            for (int b = 1; b <= n; ++b) {
                auto basis = solver.solve(a, b);
                z_[a - 1][b - 1] = static_cast<long>(basis.dimension());
                if (basis.dimension() > 0) pair_order_.push_back({a, b});
            }
        for (const auto& pl : pair_order_) build_pair(pl);
        normalize_unit();
        build_grams();
    }

    const IntMatrix& z() const { return z_; }
    const std::vector<PairLabel>& pairs() const { return pair_order_; }
    size_t dim_tm(const PairLabel& pl) const { return pair_data_.at(pl).basis.size(); }
    const Vec& basis_functional(const PairLabel& pl, size_t k) const { return pair_data_.at(pl).basis.at(k); }
    const Vec& unit_functional() const { return pair_data_.at({1, 1}).basis.at(0); }
    const Mat<S>& gram(const PairLabel& pl) const { return pair_data_.at(pl).gram; }

    /// Right-composition with the loop closure: expands a functional on
    /// m-paths to one on (z + m + z)-paths, outer bundles paired off by the
    /// x-weighted annihilation.
    Vec rc_closure(int z, const Vec& g) const {
        if (z == 0) return g;
        const P& pol = f_.policy();
        Vec out;
        for (const auto& [mid, c] : g) {
            const int u = F::path_start(mid);
            if (f_.path_end(mid) != u) continue;
            for (int i = 0; i < f_.quiver().vertex_count(); ++i) {
                const auto& cell = f_.cell(i, u, z);
                for (const PathKey& q : cell.paths) {
                    PathKey rq = F::empty_path(u);
                    for (int t = static_cast<int>(q.size()) - 1; t >= 1; --t)
                        rq.push_back(static_cast<char>(f_.arrow_rev(static_cast<unsigned char>(q[t]))));
                    Vec probe;
                    probe.emplace(f_.concat(q, rq), pol.one());
                    Vec capped = f_.apply_cap_bundle(z, 0, std::move(probe));
                    auto it = capped.find(F::empty_path(i));
                    if (it == capped.end()) continue;
                    f_.add_term(out, f_.concat(f_.concat(q, mid), rq), c * it->second);
                }
            }
        }
        return out;
    }

    /// s-colored loop around a functional row over groups of sizes (ga, gb).
    Vec encircle_row(const Vec& g, int ga, int gb, int s) const {
        const int z = s - 1;
        if (z == 0) return g;
        Vec row = rc_closure(z, g);
        Word word;
        for (int k = 1; k <= z; ++k) word.push_back({WordOp::cup, k, 0, 0});  // nested creation
        word.push_back({WordOp::jw, 0, z, 0});
        for (int t = 0; t < z; ++t) {
            int pos = 2 * z - t;
            for (int step = 0; step < ga; ++step) word.push_back({WordOp::cross, pos + step, 0, +1});
            for (int step = 0; step < gb; ++step) word.push_back({WordOp::cross, pos + ga + step, 0, -1});
        }
        return f_.rc_word(word, std::move(row));
    }

    /// Tube average (1/d(C)) sum_s d(s) [s-loop] of a functional row.
    Vec loop_average_row(const Vec& g, int ga, int gb) const {
        Vec acc;
        for (int s = 1; s <= h_ - 1; ++s) {
            Vec e = encircle_row(g, ga, gb, s);
            const Cyc ds = md_.dim(s);
            for (const auto& [p, c] : e) f_.add_term(acc, p, c * ds);
        }
        Cyc dcinv = md_.global_dim().inverse();
        Vec out;
        for (const auto& [p, c] : acc) f_.add_term(out, p, c * dcinv);
        return out;
    }

    /// Jones-Wenzl sandwich of a functional at pair (a,b), by right composition.
    Vec sandwich_row(const Vec& g, int a, int b) const {
        Vec v = f_.rc_jw(a - 1, 0, g);
        return f_.rc_jw(b - 1, a - 1, std::move(v));
    }

    /// The projector with image TM_a^b on the simple-pair functional space.
    Vec project_tm(const Vec& alpha, int a, int b) const {
        Vec v = sandwich_row(alpha, a, b);
        v = loop_average_row(std::move(v), a - 1, b - 1);
        return sandwich_row(v, a, b);
    }

    /// Rank of the loop projector on the sandwiched functional space.
    int projector_rank(int a, int b) const {
        const auto rows = sandwiched_basis(a, b);
        const P& pol = f_.policy();
        if (rows.empty()) return 0;
        std::map<PathKey, size_t> col_index;
        for (const auto& r : rows)
            for (const auto& [p, c] : r) col_index.emplace(p, col_index.size());
        std::vector<Vec> averaged;
        for (const auto& r : rows) {
            Vec av = loop_average_row(r, a - 1, b - 1);
            for (const auto& [p, c] : av) col_index.emplace(p, col_index.size());
            averaged.push_back(std::move(av));
        }
        Mat<S> dense;
        for (const auto& r : averaged) {
            std::vector<S> d(col_index.size(), pol.zero());
            for (const auto& [p, c] : r) d[col_index.at(p)] = c;
            dense.push_back(std::move(d));
        }
        return linalg::rank(pol, std::move(dense));
    }

    /// Product component: coordinates of nabla(f (x) g) in the stored basis of R.
    std::vector<S> nabla(const PairLabel& r, const PairLabel& s, const PairLabel& t, const Vec& fa,
                         const Vec& ga) const {
        if (!admissible(r, s, t)) throw std::invalid_argument("inadmissible fusion triple");
        Vec prod = combine(fa, ga);
        prod = f_.rc_word(word_vertex_pair(r, s, t), std::move(prod));
        prod = loop_average_row(std::move(prod), r.a - 1, r.b - 1);
        return coordinates(r, prod);
    }

    bool admissible(const PairLabel& r, const PairLabel& s, const PairLabel& t) const {
        return md_.fusion(s.a, t.a, r.a) > 0 && md_.fusion(s.b, t.b, r.b) > 0;
    }

    /// nabla on stored basis elements, memoized.
    const std::vector<S>& nabla_basis(const PairLabel& r, const PairLabel& s, const PairLabel& t,
                                      size_t fi, size_t gi) const {
        auto key = std::make_tuple(r, s, t, fi, gi);
        {
            std::lock_guard<std::mutex> lock(nabla_mu_);
            auto it = nabla_cache_.find(key);
            if (it != nabla_cache_.end()) return it->second;
        }
        auto coords = nabla(r, s, t, basis_functional(s, fi), basis_functional(t, gi));
        std::lock_guard<std::mutex> lock(nabla_mu_);
        return nabla_cache_.emplace(std::move(key), std::move(coords)).first->second;
    }

    /// Nested-cup pairing of f at (a,b) with g at (a,b) (self-dual labels).
    S pairing(const PairLabel& pl, const Vec& fa, const Vec& ga) const {
        const int ma = pl.a - 1, mb = pl.b - 1;
        Vec gt = ga;
        if (ma > 0 && mb > 0) {
            Word tilt;
            for (int t = 1; t <= ma; ++t)
                for (int k = mb + t - 1; k >= t; --k) tilt.push_back({WordOp::cross, k, 0, kTildeSign});
            gt = f_.rc_word(tilt, std::move(gt));  // realize g on the (Y,X)-ordered space
        }
        std::optional<S> value;
        for (int i = 0; i < f_.quiver().vertex_count(); ++i) {
            Vec unit;
            unit.emplace(F::empty_path(i), f_.policy().one());
            Vec created = f_.apply_cup_bundle(ma, 0, std::move(unit));
            created = f_.apply_cup_bundle(mb, ma, std::move(created));
            S acc = f_.policy().zero();
            for (const auto& [p, c] : created) {
                auto [left, right] = f_.split(p, ma + mb);
                auto itf = fa.find(left);
                if (itf == fa.end()) continue;
                auto itg = gt.find(right);
                if (itg == gt.end()) continue;
                acc += c * itf->second * itg->second;
            }
            if (!value) {
                value = acc;
            } else if (*value != acc) {
                throw std::logic_error("pairing is not scalar on the unit block");
            }
        }
        return *value;
    }

    FrobeniusReport report() {
        FrobeniusReport rep;
        auto tick = [] { return std::chrono::steady_clock::now(); };
        auto lap = [&](const char* name, auto t0) {
            if (std::getenv("TUBEDEV_TIME"))
                std::cerr << name << ": " << std::chrono::duration<double>(tick() - t0).count() << " s\n";
            return tick();
        };
        auto t = tick();

        rep.haploid = (z_[0][0] == 1);

        rep.dual_route_ranks = true;
        for (int a = 1; a <= h_ - 1; ++a)
            for (int b = 1; b <= h_ - 1; ++b)
                if (projector_rank(a, b) != static_cast<int>(z_[a - 1][b - 1])) {
                    rep.dual_route_ranks = false;
                    rep.failures.push_back("projector rank mismatch at (" + std::to_string(a) + "," +
                                           std::to_string(b) + ")");
                }
        t = lap("ranks", t);

        {
            S total = f_.policy().zero();
            for (int a = 1; a <= h_ - 1; ++a)
                for (int b = 1; b <= h_ - 1; ++b)
                    if (z_[a - 1][b - 1] != 0)
                        total += Cyc::from_int(cyc_order(h_), z_[a - 1][b - 1]) * md_.dim(a) * md_.dim(b);
            rep.dim_criterion = (total == md_.global_dim());
            rep.dim_matches_invariance = (rep.dim_criterion == md_.invariance_report(z_).dim_condition);
        }

        rep.unit_law = true;
        const PairLabel one{1, 1};
        for (const auto& r : pair_order_) {
            for (size_t k = 0; k < dim_tm(r); ++k) {
                auto left = nabla(r, one, r, unit_functional(), basis_functional(r, k));
                auto right = nabla(r, r, one, basis_functional(r, k), unit_functional());
                for (size_t u = 0; u < left.size(); ++u) {
                    S want = (u == k) ? f_.policy().one() : f_.policy().zero();
                    if (left[u] != want || right[u] != want) {
                        rep.unit_law = false;
                        rep.failures.push_back("unit law fails at (" + std::to_string(r.a) + "," +
                                               std::to_string(r.b) + ")");
                        break;
                    }
                }
            }
        }
        t = lap("unit", t);

        rep.commutativity = check_commutativity(&rep);
        t = lap("commutativity", t);
        rep.associativity = check_associativity(&rep);
        t = lap("associativity", t);
        check_pairing(&rep);
        t = lap("pairing", t);
        rep.balanced_frobenius = check_balanced(&rep);
        lap("balanced", t);
        return rep;
    }

private:
    struct FunSpace {
        std::vector<std::pair<int, int>> index;  // (vertex, path index)
        std::map<int, int> offset;
        size_t dim = 0;
    };

    struct PairData {
        std::vector<Vec> basis;
        Mat<S> basis_dense;
        std::vector<size_t> pivot_cols;
        Mat<S> pivot_inv;
        Mat<S> gram, gram_inv;
    };

    const FunSpace& fun_space(int ma, int mb) const {
        std::lock_guard<std::mutex> lock(cache_mu_);
        auto key = std::make_pair(ma, mb);
        auto it = spaces_.find(key);
        if (it != spaces_.end()) return it->second;
        FunSpace fs;
        const int m = ma + mb;
        for (int i = 0; i < f_.quiver().vertex_count(); ++i) {
            fs.offset[i] = static_cast<int>(fs.index.size());
            const auto& cell = f_.cell(i, i, m);
            for (size_t t = 0; t < cell.size(); ++t) fs.index.push_back({i, static_cast<int>(t)});
        }
        fs.dim = fs.index.size();
        return spaces_.emplace(key, std::move(fs)).first->second;
    }

    std::vector<S> row_to_dense(const FunSpace& fs, int m, const Vec& row) const {
        std::vector<S> v(fs.dim, f_.policy().zero());
        for (const auto& [p, c] : row) {
            int i = F::path_start(p);
            v[static_cast<size_t>(fs.offset.at(i) + f_.cell(i, i, m).at(p))] = c;
        }
        return v;
    }

    /// A basis of the sandwiched functional space at pair (a,b): the row space
    /// of the Jones-Wenzl sandwich, echelonised.
    std::vector<Vec> sandwiched_basis(int a, int b) const {
        const int ma = a - 1, mb = b - 1, m = ma + mb;
        const FunSpace& fs = fun_space(ma, mb);
        const P& pol = f_.policy();
        Mat<S> rows;
        for (size_t k = 0; k < fs.dim; ++k) {
            auto [i, pidx] = fs.index[k];
            Vec unit;
            unit.emplace(f_.cell(i, i, m).paths[pidx], pol.one());
            rows.push_back(row_to_dense(fs, m, sandwich_row(unit, a, b)));
        }
        linalg::rref(rows);
        std::vector<Vec> out;
        for (const auto& r : rows) {
            Vec v;
            for (size_t k = 0; k < fs.dim; ++k) {
                if (pol.is_zero(r[k])) continue;
                auto [i, pidx] = fs.index[k];
                v.emplace(f_.cell(i, i, m).paths[pidx], r[k]);
            }
            out.push_back(std::move(v));
        }
        return out;
    }

    void build_pair(const PairLabel& pl) {
        const int ma = pl.a - 1, mb = pl.b - 1, m = ma + mb;
        const FunSpace& fs = fun_space(ma, mb);
        const P& pol = f_.policy();
        auto rows = sandwiched_basis(pl.a, pl.b);
        // solve alpha . (avg - 1) = 0 over combinations of the sandwiched basis
        std::map<PathKey, size_t> cols;
        std::vector<Vec> diffs;
        for (const auto& r : rows) {
            Vec av = loop_average_row(r, ma, mb);
            for (const auto& [p, c] : r) f_.add_term(av, p, -c);
            for (const auto& [p, c] : av) cols.emplace(p, cols.size());
            diffs.push_back(std::move(av));
        }
        Mat<S> constraints(cols.size(), std::vector<S>(rows.size(), pol.zero()));
        for (size_t r = 0; r < diffs.size(); ++r)
            for (const auto& [p, c] : diffs[r]) constraints[cols.at(p)][r] = c;
        auto ns = linalg::nullspace(pol, std::move(constraints), rows.size());
        PairData pd;
        for (const auto& combo : ns.basis) {
            Vec v;
            for (size_t k = 0; k < rows.size(); ++k) {
                if (pol.is_zero(combo[k])) continue;
                for (const auto& [p, c] : rows[k]) f_.add_term(v, p, c * combo[k]);
            }
            pd.basis.push_back(std::move(v));
        }
        if (static_cast<long>(pd.basis.size()) != z_[pl.a - 1][pl.b - 1])
            throw std::logic_error("projector route and intertwiner route disagree at (" +
                                   std::to_string(pl.a) + "," + std::to_string(pl.b) + ")");
        prepare_coordinates(fs, m, &pd);
        pair_data_.emplace(pl, std::move(pd));
    }

    void prepare_coordinates(const FunSpace& fs, int m, PairData* pd) {
        const P& pol = f_.policy();
        const size_t n = pd->basis.size();
        Mat<S> dense(n);
        for (size_t k = 0; k < n; ++k) dense[k] = row_to_dense(fs, m, pd->basis[k]);
        pd->basis_dense = dense;
        Mat<S> work = dense;
        std::vector<size_t> piv;
        for (size_t t = 0; t < n; ++t) {
            size_t c = 0;
            while (c < fs.dim && pol.is_zero(work[t][c])) ++c;
            if (c == fs.dim) throw std::logic_error("dependent TM basis");
            piv.push_back(c);
            Cyc inv = work[t][c].inverse();
            for (size_t u = t + 1; u < n; ++u) {
                if (pol.is_zero(work[u][c])) continue;
                Cyc fac = work[u][c] * inv;
                for (size_t cc = 0; cc < fs.dim; ++cc) {
                    work[u][cc] -= fac * work[t][cc];
                    work[u][cc].normalize();
                }
            }
        }
        Mat<S> sub(n, std::vector<S>(n, pol.zero()));
        for (size_t r = 0; r < n; ++r)
            for (size_t t = 0; t < n; ++t) sub[r][t] = dense[t][piv[r]];
        pd->pivot_cols = std::move(piv);
        pd->pivot_inv = linalg::invert(pol, std::move(sub));
    }

    std::vector<S> coordinates(const PairLabel& pl, const Vec& row) const {
        const PairData& pd = pair_data_.at(pl);
        const FunSpace& fs = fun_space(pl.a - 1, pl.b - 1);
        const int m = (pl.a - 1) + (pl.b - 1);
        const P& pol = f_.policy();
        std::vector<S> dense = row_to_dense(fs, m, row);
        const size_t n = pd.basis.size();
        std::vector<S> coords(n, pol.zero());
        for (size_t t = 0; t < n; ++t)
            for (size_t c = 0; c < n; ++c) coords[t] += pd.pivot_inv[t][c] * dense[pd.pivot_cols[c]];
        for (size_t c = 0; c < fs.dim; ++c) {
            S acc = dense[c];
            for (size_t t = 0; t < n; ++t) acc -= coords[t] * pd.basis_dense[t][c];
            if (!pol.is_zero(acc)) throw std::logic_error("functional outside the TM span");
        }
        return coords;
    }

    void normalize_unit() {
        auto it = pair_data_.find({1, 1});
        if (it == pair_data_.end() || it->second.basis.size() != 1) return;  // not haploid
        Vec& u = it->second.basis[0];
        S first = u.begin()->second;
        if (f_.policy().is_zero(first)) return;
        S inv = first.inverse();
        bool constant = true;
        for (auto& [p, c] : u) {
            c *= inv;
            if (c != f_.policy().one()) constant = false;
        }
        if (!constant) throw std::logic_error("unit functional is not the identity scalar");
        prepare_coordinates(fun_space(0, 0), 0, &it->second);
    }

    void build_grams() {
        const P& pol = f_.policy();
        for (auto& [pl, pd] : pair_data_) {
            const size_t n = pd.basis.size();
            pd.gram.assign(n, std::vector<S>(n, pol.zero()));
            for (size_t i = 0; i < n; ++i)
                for (size_t j = 0; j < n; ++j) pd.gram[i][j] = pairing(pl, pd.basis[i], pd.basis[j]);
        }
    }

    // ---- tangle words ----

    static void move_right(Word* w, int start, int z, int across, int sign) {
        for (int t = 0; t < z; ++t) {
            int pos = start + z - t;
            for (int k = pos; k <= pos + across - 1; ++k) w->push_back({WordOp::cross, k, 0, sign});
        }
    }
    static void move_left(Word* w, int start, int z, int across, int sign) {
        for (int t = 0; t < z; ++t) {
            int pos = start + 1 + t;
            for (int k = pos - 1; k >= pos - across; --k) w->push_back({WordOp::cross, k, 0, sign});
        }
    }
    static void tau(Word* w, int off, int m_in, int m1, int m2) {
        int i0 = (m_in + m1 - m2) / 2, kc = (m1 + m2 - m_in) / 2;
        w->push_back({WordOp::jw, off, m_in, 0});
        // nested creation between the two output bundles
        for (int k = 0; k < kc; ++k) w->push_back({WordOp::cup, off + i0 + 1 + k, 0, 0});
        w->push_back({WordOp::jw, off, m1, 0});
        w->push_back({WordOp::jw, off + m1, m2, 0});
    }
    static void tau_hat(Word* w, int off, int m1, int m2, int m_out) {
        int i0 = (m_out + m1 - m2) / 2, kc = (m1 + m2 - m_out) / 2;
        w->push_back({WordOp::jw, off, m1, 0});
        w->push_back({WordOp::jw, off + m1, m2, 0});
        // nested contraction, innermost pair first
        for (int k = kc - 1; k >= 0; --k) w->push_back({WordOp::cap, off + i0 + 1 + k, 0, 0});
        w->push_back({WordOp::jw, off, m_out, 0});
    }

    /// R-realization (I,J) -> side-by-side (K,L,M,N).
    Word word_vertex_pair(const PairLabel& r, const PairLabel& s, const PairLabel& t) const {
        int mi = r.a - 1, mk = s.a - 1, ml = s.b - 1, mm = t.a - 1, mn = t.b - 1;
        Word w;
        tau(&w, mi, r.b - 1, ml, mn);  // J-group first: its input offset is still mi
        tau(&w, 0, mi, mk, mm);
        move_right(&w, mk, mm, ml, kReorderSign);  // (K,M,L,N) -> (K,L,M,N)
        return w;
    }

    /// Side-by-side (K,L,M,N) at `off` -> R-realization (I,J).
    Word word_covertex_pair(const PairLabel& s, const PairLabel& t, const PairLabel& r, int off = 0) const {
        int mi = r.a - 1, mj = r.b - 1, mk = s.a - 1, ml = s.b - 1, mm = t.a - 1, mn = t.b - 1;
        Word w;
        move_left(&w, off + mk + ml, mm, ml, -kReorderSign);  // (K,L,M,N) -> (K,M,L,N)
        tau_hat(&w, off, mk, mm, mi);
        tau_hat(&w, off + mi, ml, mn, mj);
        return w;
    }

    /// Creates (T, T-dual) side by side at offset `off`: () -> (M,N,M,N).
    Word word_coev_pair(int off, const PairLabel& t) const {
        int mm = t.a - 1, mn = t.b - 1;
        Word w;
        for (int k = off + 1; k <= off + mm; ++k) w.push_back({WordOp::cup, k, 0, 0});
        for (int k = off + mm + 1; k <= off + mm + mn; ++k) w.push_back({WordOp::cup, k, 0, 0});
        w.push_back({WordOp::jw, off, mm, 0});
        w.push_back({WordOp::jw, off + mm, mn, 0});
        move_left(&w, off + mm + 2 * mn, mm, mn, -kReorderSign);  // (M,N,N,M) -> (M,N,M,N)
        return w;
    }

    bool check_commutativity(FrobeniusReport* rep) {
        std::vector<std::pair<PairLabel, PairLabel>> jobs;
        for (const auto& s : pair_order_)
            for (const auto& t : pair_order_) jobs.push_back({s, t});
        std::mutex mu;
        bool ok = true;
        parallel_for(jobs.size(), [&](size_t j) {
            const auto& [s, t] = jobs[j];
            int mk = s.a - 1, ml = s.b - 1, mm = t.a - 1, mn = t.b - 1;
            // The doubled braiding is a tube morphism: the strand word below
            // followed by the loop average on the source realization.
            Word lhs_word;
            move_left(&lhs_word, mk, mm, mk, kBraidSign);             // M under K
            move_left(&lhs_word, mm + mk + ml, mn, ml, -kBraidSign);  // N over L
            move_right(&lhs_word, mm, mk, mn, kReorderSign);          // (M,K,N,L) -> (M,N,K,L)
            Word rhs_word;
            move_right(&rhs_word, mk, mm, ml, kReorderSign);  // (K,M,L,N) -> (K,L,M,N)
            for (size_t gi = 0; gi < dim_tm(s); ++gi)
                for (size_t hi = 0; hi < dim_tm(t); ++hi) {
                    Vec lhs = f_.rc_word(lhs_word, combine(basis_functional(t, hi), basis_functional(s, gi)));
                    Vec rhs = f_.rc_word(rhs_word, combine(basis_functional(s, gi), basis_functional(t, hi)));
                    Vec diff = std::move(lhs);
                    for (const auto& [p, c] : rhs) f_.add_term(diff, p, -c);
                    if (!diff.empty()) diff = loop_average_row(diff, mk + mm, ml + mn);
                    if (!diff.empty()) {
                        std::lock_guard<std::mutex> lock(mu);
                        ok = false;
                        rep->failures.push_back("commutativity fails at S=(" + std::to_string(s.a) + "," +
                                                std::to_string(s.b) + ") T=(" + std::to_string(t.a) + "," +
                                                std::to_string(t.b) + ")");
                    }
                }
        });
        return ok;
    }

    bool check_associativity(FrobeniusReport* rep) {
        struct Job {
            PairLabel r, s, t;
            int vertex;  // restrict to functional terms starting here
        };
        std::vector<Job> jobs;
        const int nv = f_.quiver().vertex_count();
        for (const auto& r : pair_order_)
            for (const auto& s : pair_order_)
                for (const auto& t : pair_order_)
                    for (int v = 0; v < nv; ++v) jobs.push_back({r, s, t, v});
        // largest strand totals first so the pool stays busy
        auto weight = [](const Job& j) { return j.r.a + j.r.b + j.s.a + j.s.b + j.t.a + j.t.b; };
        std::sort(jobs.begin(), jobs.end(), [&](const Job& x, const Job& y) { return weight(x) > weight(y); });
        std::mutex mu;
        bool ok = true;
        parallel_for(jobs.size(), [&](size_t jb) {
            const auto& [r, s, t, vtx] = jobs[jb];
            int mi = r.a - 1, mj = r.b - 1, mk = s.a - 1, ml = s.b - 1, mm = t.a - 1, mn = t.b - 1;

            // ((R S) T) versus (R (S T)) on the 6-group space (I,K,M,J,L,N);
            // right composition preserves the start vertex, so the identity
            // may be checked one diagonal block at a time.
            Word lhs_word, rhs_word;
            move_right(&lhs_word, mi + mk, mm, mj + ml, kReorderSign);
            move_right(&lhs_word, mi, mk, mj, kReorderSign);
            move_right(&rhs_word, mi, mk + mm, mj, kReorderSign);
            move_right(&rhs_word, mi + mj + mk, mm, ml, kReorderSign);
            for (size_t fi = 0; fi < dim_tm(r); ++fi)
                for (size_t gi = 0; gi < dim_tm(s); ++gi)
                    for (size_t hi = 0; hi < dim_tm(t); ++hi) {
                        Vec fgh = combine(combine(basis_functional(r, fi), basis_functional(s, gi)),
                                          basis_functional(t, hi));
                        Vec block;
                        for (const auto& [p, c] : fgh)
                            if (F::path_start(p) == vtx) block.emplace(p, c);
                        if (block.empty()) continue;
                        Vec lhs = f_.rc_word(lhs_word, block);
                        Vec rhs = f_.rc_word(rhs_word, std::move(block));
                        if (!rows_equal(lhs, rhs)) {
                            std::lock_guard<std::mutex> lock(mu);
                            ok = false;
                            rep->failures.push_back("associativity fails at R=(" + std::to_string(r.a) + "," +
                                                    std::to_string(r.b) + ") S=(" + std::to_string(s.a) + "," +
                                                    std::to_string(s.b) + ") T=(" + std::to_string(t.a) + "," +
                                                    std::to_string(t.b) + ")");
                        }
                    }
        });
        return ok;
    }

    /// Associativity at structure-constant level: both bracketings of the
    /// reconstructed product agree on every final summand.
    bool component_associativity(const PairLabel& r, const PairLabel& s, const PairLabel& t) const {
        const P& pol = f_.policy();
        for (const auto& w : pair_order_) {
            for (size_t fi = 0; fi < dim_tm(r); ++fi)
                for (size_t gi = 0; gi < dim_tm(s); ++gi)
                    for (size_t hi = 0; hi < dim_tm(t); ++hi) {
                        std::vector<S> lhs(dim_tm(w), pol.zero()), rhs(dim_tm(w), pol.zero());
                        for (const auto& u : pair_order_) {
                            if (admissible(u, r, s) && admissible(w, u, t)) {
                                const auto& first = nabla_basis(u, r, s, fi, gi);
                                for (size_t mu2 = 0; mu2 < first.size(); ++mu2) {
                                    if (pol.is_zero(first[mu2])) continue;
                                    const auto& second = nabla_basis(w, u, t, mu2, hi);
                                    for (size_t nu = 0; nu < second.size(); ++nu)
                                        lhs[nu] += first[mu2] * second[nu];
                                }
                            }
                            if (admissible(u, s, t) && admissible(w, r, u)) {
                                const auto& first = nabla_basis(u, s, t, gi, hi);
                                for (size_t mu2 = 0; mu2 < first.size(); ++mu2) {
                                    if (pol.is_zero(first[mu2])) continue;
                                    const auto& second = nabla_basis(w, r, u, fi, mu2);
                                    for (size_t nu = 0; nu < second.size(); ++nu)
                                        rhs[nu] += first[mu2] * second[nu];
                                }
                            }
                        }
                        for (size_t nu = 0; nu < dim_tm(w); ++nu)
                            if (lhs[nu] != rhs[nu]) return false;
                    }
        }
        return true;
    }

    void check_pairing(FrobeniusReport* rep) {
        const P& pol = f_.policy();
        rep->pairing_perfect = true;
        rep->pairing_symmetric = true;
        for (auto& [pl, pd] : pair_data_) {
            const size_t n = pd.basis.size();
            for (size_t i = 0; i < n; ++i)
                for (size_t j = 0; j < n; ++j)
                    if (pd.gram[i][j] != pd.gram[j][i]) {
                        rep->pairing_symmetric = false;
                        rep->failures.push_back("pairing not symmetric at (" + std::to_string(pl.a) + "," +
                                                std::to_string(pl.b) + ")");
                    }
            try {
                pd.gram_inv = linalg::invert(pol, pd.gram);
            } catch (const std::domain_error&) {
                rep->pairing_perfect = false;
                rep->failures.push_back("pairing degenerate at (" + std::to_string(pl.a) + "," +
                                        std::to_string(pl.b) + ")");
            }
        }
    }

    bool check_balanced(FrobeniusReport* rep) {
        struct Job {
            PairLabel r, s, t;
        };
        std::vector<Job> jobs;
        for (const auto& r : pair_order_)
            for (const auto& s : pair_order_)
                for (const auto& t : pair_order_)
                    if (admissible(r, s, t)) jobs.push_back({r, s, t});
        std::mutex mu;
        bool ok = true;
        parallel_for(jobs.size(), [&](size_t jb) {
            const auto& [r, s, t] = jobs[jb];
            S cs = md_.dim(s.a) * md_.dim(s.b);  // c = d on the doubled category
            S ct = md_.dim(t.a) * md_.dim(t.b);
            Word bent_right = word_coev_pair((s.a - 1) + (s.b - 1), t);
            for (const auto& op : word_covertex_pair(s, t, r)) bent_right.push_back(op);
            Word bent_left = word_coev_pair(0, s);
            for (const auto& op : word_covertex_pair(s, t, r, (s.a - 1) + (s.b - 1))) bent_left.push_back(op);
            for (size_t fi = 0; fi < dim_tm(r); ++fi)
                for (size_t gi = 0; gi < dim_tm(s); ++gi)
                    for (size_t hi = 0; hi < dim_tm(t); ++hi) {
                        Vec hdual = dual_vector(t, hi, ct);
                        Vec gdual = dual_vector(s, gi, cs);
                        Vec lhs_f = f_.rc_word(bent_right, combine(basis_functional(r, fi), hdual));
                        lhs_f = loop_average_row(std::move(lhs_f), s.a - 1, s.b - 1);
                        S lhs = cs * coordinates(s, lhs_f)[gi];
                        Vec rhs_f = f_.rc_word(bent_left, combine(gdual, basis_functional(r, fi)));
                        rhs_f = loop_average_row(std::move(rhs_f), t.a - 1, t.b - 1);
                        S rhs = ct * coordinates(t, rhs_f)[hi];
                        if (lhs != rhs) {
                            std::ostringstream os;
                            os << "balanced condition fails at R=(" << r.a << "," << r.b << ") S=(" << s.a
                               << "," << s.b << ") T=(" << t.a << "," << t.b << "): lhs=" << lhs.str()
                               << " rhs=" << rhs.str();
                            std::lock_guard<std::mutex> lock(mu);
                            ok = false;
                            rep->failures.push_back(os.str());
                        }
                    }
        });
        return ok;
    }

    Vec dual_vector(const PairLabel& pl, size_t k, const S& scale) const {
        const PairData& pd = pair_data_.at(pl);
        Vec out;
        for (size_t u = 0; u < pd.basis.size(); ++u) {
            S c = scale * pd.gram_inv[u][k];
            if (f_.policy().is_zero(c)) continue;
            for (const auto& [p, v] : pd.basis[u]) f_.add_term(out, p, v * c);
        }
        return out;
    }

    Vec combine(const Vec& left, const Vec& right) const {
        Vec out;
        for (const auto& [p, c] : left) {
            for (const auto& [q, d] : right) {
                if (F::path_start(q) != f_.path_end(p)) continue;
                f_.add_term(out, f_.concat(p, q), c * d);
            }
        }
        return out;
    }

    bool rows_equal(const Vec& a, const Vec& b) const {
        Vec diff = a;
        for (const auto& [p, c] : b) f_.add_term(diff, p, -c);
        return diff.empty();
    }

    const F& f_;
    const EssentialTower<P>& tower_;
    ModularData md_;
    int h_;
    IntMatrix z_;
    std::vector<PairLabel> pair_order_;
    std::map<PairLabel, PairData> pair_data_;
    mutable std::mutex cache_mu_;
    mutable std::map<std::pair<int, int>, FunSpace> spaces_;
    mutable std::mutex nabla_mu_;
    mutable std::map<std::tuple<PairLabel, PairLabel, PairLabel, size_t, size_t>, std::vector<S>> nabla_cache_;
};

}  // namespace tubeinv

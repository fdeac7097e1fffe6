#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tubeinv/essential.hpp"
#include "tubeinv/functor.hpp"
#include "tubeinv/modular_data.hpp"
#include "tubeinv/quiver.hpp"
#include "tubeinv/tm.hpp"
#include "tubeinv/util.hpp"

namespace tubeinv {

/// A candidate modular invariant with its provenance.
struct ZMatrix {
    int h = 0;
    std::string quiver;
    std::string backend;
    std::optional<double> tolerance;
    bool deep = false;
    IntMatrix z;
    // float-backend rank-gap report: the worst (largest) dropped and the worst
    // (smallest) kept relative singular values over all cells
    double worst_kept_rel = 0.0;
    double worst_dropped_rel = 0.0;
};

/// Computes Z(TM): Z_ab = dim TM_a^b, cells solved independently in parallel.
template <class P>
ZMatrix z_matrix(const MFunctor<P>& f, const EssentialTower<P>& tower, bool deep = false) {
    const int h = f.quiver().coxeter();
    const int n = h - 1;
    ZMatrix out;
    out.h = h;
    out.quiver = f.quiver().name();
    out.backend = P::name();
    if constexpr (!P::exact) out.tolerance = f.policy().tol;
    out.deep = deep;
    out.z.assign(n, std::vector<long>(n, 0));
    out.worst_kept_rel = 1.0;

    f.ensure_paths(n - 1 + (deep ? 2 : 1));  // longest braided vector: (h-2) + bundle
    TMSolver<P> solver(f, tower);
    std::mutex mu;
    parallel_for(static_cast<size_t>(n) * n, [&](size_t job) {
        int a = static_cast<int>(job) / n + 1;
        int b = static_cast<int>(job) % n + 1;
        auto basis = solver.solve(a, b, deep);
        std::lock_guard<std::mutex> lock(mu);
        out.z[a - 1][b - 1] = static_cast<long>(basis.dimension());
        if (basis.diag.sigma_max > 0) {
            if (basis.diag.sigma_kept_min > 0)
                out.worst_kept_rel = std::min(out.worst_kept_rel, basis.diag.sigma_kept_min / basis.diag.sigma_max);
            out.worst_dropped_rel = std::max(out.worst_dropped_rel, basis.diag.sigma_dropped_max / basis.diag.sigma_max);
        }
    });
    return out;
}

/// Diagonal of Z by the spectral route: entry m is the multiplicity of the
/// exact eigenvalue chi_m(2) in the adjacency matrix, via exact rank of
/// G - chi_m(2) I over the cyclotomic field. Valid for every h up to 30.
inline std::vector<long> diagonal_spectrum(const ADEQuiver& q) {
    const int h = q.coxeter();
    const int nv = q.vertex_count();
    ModularData md(h);
    ExactPolicy pol{h};
    std::vector<long> diag(h - 1, 0);
    for (int m = 1; m <= h - 1; ++m) {
        Cyc ev = md.verlinde_character(m, 2);  // the recorded sign: -2cos(pi m / h)
        Mat<Cyc> mat(nv, std::vector<Cyc>(nv, pol.zero()));
        for (int i = 0; i < nv; ++i) {
            for (int j = 0; j < nv; ++j)
                if (q.adjacency()[i][j]) mat[i][j] = pol.one();
            mat[i][i] -= ev;
        }
        diag[m - 1] = nv - linalg::rank(pol, std::move(mat));
    }
    return diag;
}

/// One entry of the Cappelli-Itzykson-Zuber list, with the block data used to
/// print it in partition-function style.
struct CizEntry {
    std::string name;
    IntMatrix z;
    std::vector<std::pair<int, std::vector<int>>> square_blocks;              // mult * |chi_i + ...|^2
    std::vector<std::pair<std::vector<int>, std::vector<int>>> cross_blocks;  // u v* + v u*
};

/// Materializes every invariant of the classification at Coxeter number h:
/// the A-series always, D at even h, E6/E7/E8 at h = 12/18/30.
inline std::vector<CizEntry> ciz_reference(int h) {
    if (h < 3) throw std::invalid_argument("Coxeter number must be >= 3");
    const int n = h - 1;
    auto build = [n](CizEntry* e) {
        e->z.assign(n, std::vector<long>(n, 0));
        for (const auto& [mult, block] : e->square_blocks)
            for (int a : block)
                for (int b : block) e->z[a - 1][b - 1] += mult;
        for (const auto& [u, v] : e->cross_blocks)
            for (int a : u)
                for (int b : v) {
                    e->z[a - 1][b - 1] += 1;
                    e->z[b - 1][a - 1] += 1;
                }
    };
    std::vector<CizEntry> list;
    {
        CizEntry a;
        a.name = "A" + std::to_string(h - 1);
        for (int i = 1; i <= n; ++i) a.square_blocks.push_back({1, {i}});
        build(&a);
        list.push_back(std::move(a));
    }
    if (h % 2 == 0) {
        CizEntry d;
        d.name = "D" + std::to_string(h / 2 + 1);
        if ((h / 2) % 2 == 0) {
            for (int a = 1; a <= n; a += 2) d.square_blocks.push_back({1, {a}});
            d.square_blocks.push_back({1, {h / 2}});
            for (int a = 2; a < h / 2; a += 2) d.cross_blocks.push_back({{a}, {h - a}});
        } else {
            for (int a = 1; a < h / 2; a += 2) d.square_blocks.push_back({1, {a, h - a}});
            d.square_blocks.push_back({2, {h / 2}});
        }
        build(&d);
        list.push_back(std::move(d));
    }
    if (h == 12) {
        CizEntry e;
        e.name = "E6";
        e.square_blocks = {{1, {1, 7}}, {1, {4, 8}}, {1, {5, 11}}};
        build(&e);
        list.push_back(std::move(e));
    }
    if (h == 18) {
        CizEntry e;
        e.name = "E7";
        e.square_blocks = {{1, {1, 17}}, {1, {5, 13}}, {1, {7, 11}}, {1, {9}}};
        e.cross_blocks = {{{9}, {3, 15}}};
        build(&e);
        list.push_back(std::move(e));
    }
    if (h == 30) {
        CizEntry e;
        e.name = "E8";
        e.square_blocks = {{1, {1, 11, 19, 29}}, {1, {7, 13, 17, 23}}};
        build(&e);
        list.push_back(std::move(e));
    }
    return list;
}

inline std::optional<std::string> ciz_match(const IntMatrix& z, int h) {
    for (const auto& entry : ciz_reference(h))
        if (entry.z == z) return entry.name;
    return std::nullopt;
}

/// Full pipeline result for one quiver.
struct CheckSuite {
    ZMatrix zm;
    InvarianceReport report;
    std::optional<std::string> ciz;
    std::vector<long> z_diagonal;
    std::vector<long> spectral_diagonal;
    bool diagonals_agree = false;
};

template <class P>
CheckSuite check_suite(const MFunctor<P>& f, const EssentialTower<P>& tower, bool deep = false) {
    CheckSuite cs;
    cs.zm = z_matrix(f, tower, deep);
    ModularData md(f.quiver().coxeter());
    cs.report = md.invariance_report(cs.zm.z);
    cs.ciz = ciz_match(cs.zm.z, f.quiver().coxeter());
    for (size_t i = 0; i < cs.zm.z.size(); ++i) cs.z_diagonal.push_back(cs.zm.z[i][i]);
    cs.spectral_diagonal = diagonal_spectrum(f.quiver());
    cs.diagonals_agree = (cs.z_diagonal == cs.spectral_diagonal);
    return cs;
}

}  // namespace tubeinv

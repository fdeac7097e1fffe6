#include <cmath>

#include "doctest.h"
#include "tubeinv/modular_data.hpp"
#include "tubeinv/tl.hpp"

using namespace tubeinv;

TEST_CASE("closed-form data at small h") {
    ModularData m3(3);
    CHECK(m3.label_count() == 2);
    CHECK(m3.dim(1) == Cyc::one(12));
    CHECK(m3.dim(2) == Cyc::from_int(12, -1));

    ModularData m4(4);
    CHECK(m4.dim(2) * m4.dim(2) == Cyc::from_int(16, 2));  // d(2)^2 = 2
    CHECK(m4.global_dim() == Cyc::from_int(16, 4));
    CHECK(std::abs(m4.global_dim().embed().real() - 4.0 / (2.0 * std::pow(std::sin(M_PI / 4), 2)) * 2 *
                                                        std::pow(std::sin(M_PI / 4), 2)) < 1e-9);
}

TEST_CASE("global dimension equals h / (2 sin^2(pi/h)) under embedding") {
    for (int h = 3; h <= 30; ++h) {
        ModularData md(h);
        double expect = h / (2.0 * std::pow(std::sin(M_PI / h), 2));
        CHECK(std::abs(md.global_dim().embed() - std::complex<double>(expect, 0)) < 1e-8 * expect);
    }
}

TEST_CASE("S-matrix structure") {
    for (int h = 3; h <= 10; ++h) {
        ModularData md(h);
        const int n = md.label_count();
        ExactPolicy pol{h};
        for (int a = 1; a <= n; ++a) {
            CHECK(md.s_entry(1, a) == md.dim(a));  // first row carries the dimensions
            for (int b = 1; b <= n; ++b) CHECK(md.s_entry(a, b) == md.s_entry(b, a));
        }
        // S^2 = d(C) I (all labels self-dual)
        for (int a = 1; a <= n; ++a)
            for (int b = 1; b <= n; ++b) {
                Cyc acc = pol.zero();
                for (int k = 1; k <= n; ++k) acc += md.s_entry(a, k) * md.s_entry(k, b);
                CHECK(acc == (a == b ? md.global_dim() : pol.zero()));
            }
        // |T_aa| = 1 under embedding
        for (int a = 1; a <= n; ++a) CHECK(std::abs(std::abs(md.t_entry(a).embed()) - 1.0) < 1e-10);
    }
}

TEST_CASE("fusion rules match the Verlinde oracle") {
    for (int h = 3; h <= 8; ++h) {
        ModularData md(h);
        for (int a = 1; a <= h - 1; ++a)
            for (int b = 1; b <= h - 1; ++b)
                for (int c = 1; c <= h - 1; ++c) {
                    Cyc verlinde = md.verlinde_fusion(a, b, c);
                    CHECK(verlinde == Cyc::from_int(cyc_order(h), md.fusion(a, b, c)));
                    // symmetry under all label permutations
                    CHECK(md.fusion(a, b, c) == md.fusion(b, a, c));
                    CHECK(md.fusion(a, b, c) == md.fusion(a, c, b));
                }
        for (int b = 1; b <= h - 1; ++b)
            for (int c = 1; c <= h - 1; ++c) CHECK(md.fusion(1, b, c) == (b == c ? 1 : 0));
    }
    CHECK(fusion_mult(2, 2, 3, 5) == 1);
    CHECK(fusion_mult(2, 2, 1, 5) == 1);
    CHECK(fusion_mult(2, 3, 2, 4) == 1);
    CHECK_THROWS_AS(fusion_mult(2, 3, 4, 4), std::invalid_argument);  // 4 is not a label at h = 4
}

TEST_CASE("Verlinde characters are fusion-ring characters") {
    for (int h : {4, 5, 6}) {
        ModularData md(h);
        for (int m = 1; m <= h - 1; ++m) {
            CHECK(md.verlinde_character(m, 1) == Cyc::one(cyc_order(h)));
            // recorded sign: chi_m(2) = -2 cos(pi m / h)
            double expect = -2.0 * std::cos(M_PI * m / h);
            CHECK(std::abs(md.verlinde_character(m, 2).embed() - std::complex<double>(expect, 0)) < 1e-9);
            for (int a = 1; a <= h - 1; ++a)
                for (int b = 1; b <= h - 1; ++b) {
                    Cyc lhs = md.verlinde_character(m, a) * md.verlinde_character(m, b);
                    Cyc rhs = Cyc::zero(cyc_order(h));
                    for (int c = 1; c <= h - 1; ++c)
                        if (md.fusion(a, b, c))
                            rhs += Cyc::from_int(cyc_order(h), md.fusion(a, b, c)) * md.verlinde_character(m, c);
                    CHECK(lhs == rhs);
                }
        }
    }
}

TEST_CASE("diagrammatic S and T equal the closed forms for h <= 6") {
    for (int h = 3; h <= 6; ++h) {
        ModularData md(h);
        for (int a = 1; a <= h - 1; ++a) {
            CHECK(curl_scalar(a, h) == md.t_entry(a));
            for (int b = 1; b <= h - 1; ++b) CHECK(hopf_link(a, b, h) == md.s_entry(a, b));
        }
    }
}

TEST_CASE("invariance reports") {
    for (int h = 3; h <= 30; ++h) {
        ModularData md(h);
        auto rep = md.invariance_report(int_identity(h - 1));
        CHECK(rep.commutes_with_t);
        CHECK(rep.commutes_with_s);
        CHECK(rep.haploid);
        CHECK(rep.dim_condition);
        CHECK(rep.all_pass());
    }

    // single 1 in the (1,1) entry at h = 4: S fails with defect 1/d(C) = 1/4
    ModularData m4(4);
    IntMatrix e11(3, std::vector<long>(3, 0));
    e11[0][0] = 1;
    auto rep = m4.invariance_report(e11);
    CHECK(rep.commutes_with_t);
    CHECK_FALSE(rep.commutes_with_s);
    CHECK(rep.haploid);
    CHECK_FALSE(rep.dim_condition);
    REQUIRE(rep.s_defect.has_value());
    CHECK(*rep.s_defect == Cyc::from_rational(16, Rational(1, 4)));

    // D4 invariant at h = 6 passes all four checks
    ModularData m6(6);
    IntMatrix d4(5, std::vector<long>(5, 0));
    d4[0][0] = d4[0][4] = d4[4][0] = d4[4][4] = 1;
    d4[2][2] = 2;
    auto rep6 = m6.invariance_report(d4);
    CHECK(rep6.all_pass());

    CHECK_THROWS_AS(m4.invariance_report(int_identity(2)), std::invalid_argument);
}

#include <random>

#include "doctest.h"
#include "tubeinv/tl.hpp"

using namespace tubeinv;

namespace {

TLMorphism random_morphism(int n, int h, std::mt19937& rng) {
    // random word in the generators with random small scalars
    std::uniform_int_distribution<int> gen(1, n - 1), coeff(-3, 3), len(1, 4);
    TLMorphism f = TLMorphism::identity(n, h);
    int steps = len(rng);
    for (int i = 0; i < steps; ++i) {
        f = compose_generator(f, gen(rng));
        f = f + TLMorphism::identity(n, h) * Cyc::from_int(cyc_order(h), coeff(rng));
    }
    return f;
}

}  // namespace

TEST_CASE("composition basics") {
    const int h = 5;
    TLMorphism e1 = TLMorphism::generator(1, 2, h);
    CHECK(tl_compose(e1, e1) == e1 * loop_value(h));  // e1 e1 = beta e1
    TLMorphism id3 = TLMorphism::identity(3, h);
    TLMorphism f = TLMorphism::generator(2, 3, h);
    CHECK(tl_compose(id3, f) == f);
    CHECK(tl_compose(f, id3) == f);
    // e1 e2 e1 = e1 on 3 strands: glue by hand, no loops form
    TLMorphism g1 = TLMorphism::generator(1, 3, h), g2 = TLMorphism::generator(2, 3, h);
    CHECK(tl_compose(tl_compose(g1, g2), g1) == g1);
    CHECK_THROWS_AS(tl_compose(e1, id3), std::invalid_argument);
}

TEST_CASE("TL relations as morphism identities") {
    for (int h = 3; h <= 8; ++h) {
        for (int n = 2; n <= 8; ++n) {
            const Cyc beta = loop_value(h);
            for (int k = 1; k < n; ++k) {
                TLMorphism ek = TLMorphism::generator(k, n, h);
                CHECK(tl_compose(ek, ek) == ek * beta);
                if (k + 1 < n) {
                    TLMorphism ek1 = TLMorphism::generator(k + 1, n, h);
                    CHECK(tl_compose(tl_compose(ek, ek1), ek) == ek);
                    CHECK(tl_compose(tl_compose(ek1, ek), ek1) == ek1);
                }
                for (int j = k + 2; j < n; ++j) {
                    TLMorphism ej = TLMorphism::generator(j, n, h);
                    CHECK(tl_compose(ek, ej) == tl_compose(ej, ek));
                }
            }
        }
    }
}

TEST_CASE("Jones-Wenzl projectors") {
    CHECK(jones_wenzl(1, 5) == TLMorphism::identity(1, 5));
    // p_2 = id - (1/beta) e_1: the unique idempotent annihilating e_1 when
    // loops count beta = -[2]
    TLMorphism p2 = jones_wenzl(2, 5);
    TLMorphism expect =
        TLMorphism::identity(2, 5) - TLMorphism::generator(1, 2, 5) * loop_value(5).inverse();
    CHECK(p2 == expect);

    for (int h = 3; h <= 8; ++h) {
        for (int n = 0; n <= h - 1; ++n) {
            const TLMorphism& p = jones_wenzl(n, h);
            CHECK(tl_compose(p, p) == p);  // idempotent
            // coefficient of the identity diagram is 1
            if (n > 0) {
                auto it = p.terms().find(PlanarDiagram::identity(n));
                REQUIRE(it != p.terms().end());
                CHECK(it->second == Cyc::one(cyc_order(h)));
            }
            for (int k = 1; k < n; ++k) {
                CHECK(compose_generator(p, k).is_zero());  // p_n kills every e_k
                CHECK(tl_compose(TLMorphism::generator(k, n, h), p).is_zero());
            }
        }
        CHECK_THROWS_AS(jones_wenzl(h, h), std::invalid_argument);
    }
}

TEST_CASE("markov trace") {
    for (int h = 3; h <= 8; ++h) {
        const Cyc beta = loop_value(h);
        // trace of the identity on n strands is beta^n
        Cyc bn = Cyc::one(cyc_order(h));
        for (int n = 1; n <= 5; ++n) {
            bn *= beta;
            CHECK(markov_trace(TLMorphism::identity(n, h)) == bn);
        }
        CHECK(markov_trace(TLMorphism::generator(1, 2, h)) == beta);
        // trace of p_n is the quantum dimension (-1)^n [n+1]
        for (int n = 0; n <= h - 2; ++n) {
            Cyc expect = quantum_integer(n + 1, h);
            if (n % 2 == 1) expect = -expect;
            CHECK(markov_trace(jones_wenzl(n, h)) == expect);
        }
    }
    // trace property on random morphisms: tr(fg) = tr(gf)
    std::mt19937 rng(99);
    for (int trial = 0; trial < 10; ++trial) {
        int h = 4 + trial % 3, n = 3 + trial % 2;
        TLMorphism f = random_morphism(n, h, rng), g = random_morphism(n, h, rng);
        CHECK(markov_trace(tl_compose(f, g)) == markov_trace(tl_compose(g, f)));
    }
}

TEST_CASE("crossings satisfy Reidemeister moves") {
    for (int h : {3, 4, 5, 6}) {
        TLMorphism plus = crossing(+1, h), minus = crossing(-1, h);
        CHECK(tl_compose(plus, minus) == TLMorphism::identity(2, h));  // R2
        // braid relation on 3 strands
        TLMorphism id3 = TLMorphism::identity(3, h);
        TLMorphism s1 = compose_crossing(id3, 1, +1), s2_then_s1 = compose_crossing(compose_crossing(id3, 2, +1), 1, +1);
        TLMorphism lhs = compose_crossing(compose_crossing(compose_crossing(id3, 1, +1), 2, +1), 1, +1);
        TLMorphism rhs = compose_crossing(compose_crossing(compose_crossing(id3, 2, +1), 1, +1), 2, +1);
        CHECK(lhs == rhs);
        // R1: a curl contributes -A^3 (positive) or -A^-3 (negative)
        CHECK(curl_scalar(2, h, +1) == -skein_A(h, 3));
        CHECK(curl_scalar(2, h, -1) == -skein_A(h, -3));
    }
}

TEST_CASE("hopf link evaluations") {
    for (int h : {3, 4, 5, 6}) {
        for (int a = 1; a <= h - 1; ++a) {
            // unlinking with the empty color leaves the plain closure
            Cyc d = quantum_integer(a, h);
            if (a % 2 == 0) d = -d;
            CHECK(hopf_link(1, a, h) == d);
            for (int b = a; b <= h - 1; ++b) CHECK(hopf_link(a, b, h) == hopf_link(b, a, h));
        }
    }
    CHECK_THROWS_AS(hopf_link(0, 1, 5), std::invalid_argument);
    CHECK_THROWS_AS(hopf_link(1, 5, 5), std::invalid_argument);
    CHECK_THROWS_AS(curl_scalar(6, 6), std::invalid_argument);
}

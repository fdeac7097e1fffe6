#include <complex>
#include <random>

#include "doctest.h"
#include "tubeinv/cyclotomic.hpp"

using namespace tubeinv;

namespace {

Cyc random_cyc(unsigned order, std::mt19937& rng) {
    std::uniform_int_distribution<int> num(-6, 6);
    std::uniform_int_distribution<int> den(1, 4);
    std::vector<Rational> coeffs(CycCtx::get(order)->degree());
    for (auto& c : coeffs) {
        c = Rational(num(rng), den(rng));
        c.canonicalize();
    }
    return Cyc::from_coeffs(order, coeffs);
}

}  // namespace

TEST_CASE("zeta powers multiply to one") {
    Cyc z = Cyc::zeta(8);
    Cyc z7 = Cyc::zeta(8, 7);
    CHECK(z * z7 == Cyc::one(8));
}

TEST_CASE("(zeta_8 + zeta_8^-1)^2 = 2") {
    Cyc s = Cyc::zeta(8, 1) + Cyc::zeta(8, -1);
    CHECK(s * s == Cyc::from_int(8, 2));
}

TEST_CASE("extended-Euclidean inverse checked by multiplication") {
    Cyc s = Cyc::zeta(16, 1) + Cyc::zeta(16, -1);  // [2]_q at h = 4
    Cyc inv = s.inverse();
    CHECK(inv * s == Cyc::one(16));
    CHECK_THROWS_AS(Cyc::zero(16).inverse(), std::domain_error);
}

TEST_CASE("mismatched orders are an error, never a coercion") {
    CHECK_THROWS_AS(Cyc::one(8) + Cyc::one(12), std::invalid_argument);
    CHECK_THROWS_AS(Cyc::one(8) * Cyc::one(12), std::invalid_argument);
}

TEST_CASE("field axioms on randomized samples, exact") {
    std::mt19937 rng(20240811);
    for (unsigned order : {8u, 12u, 20u, 40u}) {
        for (int trial = 0; trial < 25; ++trial) {
            Cyc a = random_cyc(order, rng), b = random_cyc(order, rng), c = random_cyc(order, rng);
            CHECK((a + b) + c == a + (b + c));
            CHECK((a * b) * c == a * (b * c));
            CHECK(a * b == b * a);
            CHECK(a * (b + c) == a * b + a * c);
            if (!b.is_zero()) CHECK((a / b) * b == a);
        }
    }
}

TEST_CASE("quantum integers") {
    for (int h = 3; h <= 12; ++h) {
        CHECK(quantum_integer(1, h) == Cyc::one(cyc_order(h)));
        CHECK(quantum_integer(h, h).is_zero());
        // sine symmetry [n] = [h-n]
        for (int n = 1; n <= h - 1; ++n) CHECK(quantum_integer(n, h) == quantum_integer(h - n, h));
        // recursion oracle [n+1] = [2][n] - [n-1], computed independently
        Cyc two = quantum_integer(2, h);
        Cyc prev = Cyc::zero(cyc_order(h)), cur = Cyc::one(cyc_order(h));
        for (int n = 1; n < h + 3; ++n) {
            Cyc next = two * cur - prev;
            CHECK(quantum_integer(n + 1, h) == next);
            prev = cur;
            cur = next;
        }
    }
    // [3] at h = 5 equals [2]^2 - 1 and embeds to the golden ratio
    Cyc three = quantum_integer(3, 5);
    Cyc expect = quantum_integer(2, 5) * quantum_integer(2, 5) - Cyc::one(20);
    CHECK(three == expect);
    CHECK(std::abs(three.embed() - std::complex<double>(1.6180339887, 0)) < 1e-7);
}

TEST_CASE("complex embedding") {
    CHECK(std::abs(Cyc::one(8).embed() - std::complex<double>(1, 0)) < 1e-12);
    CHECK(std::abs(Cyc::zeta(8).embed() - std::complex<double>(0.7071067811865476, 0.7071067811865476)) < 1e-7);
    CHECK(std::abs(quantum_integer(2, 4).embed() - std::complex<double>(1.4142135623730951, 0)) < 1e-7);

    std::mt19937 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        Cyc a = random_cyc(24, rng), b = random_cyc(24, rng);
        CHECK(std::abs((a * b).embed() - a.embed() * b.embed()) <
              1e-10 * (1.0 + std::abs(a.embed()) * std::abs(b.embed())));
    }
}

TEST_CASE("canonical coefficients and serialization forms") {
    Cyc s = Cyc::zeta(8, 1) + Cyc::zeta(8, -1);
    auto coeffs = s.coefficients();
    REQUIRE(coeffs.size() == 4);  // deg Phi_8 = 4
    // zeta^-1 = -zeta^3 + ... reduced mod Phi_8 = x^4 + 1: zeta^7 = -zeta^3
    CHECK(coeffs[0] == 0);
    CHECK(coeffs[1] == 1);
    CHECK(coeffs[2] == 0);
    CHECK(coeffs[3] == -1);
    CHECK(parse_rational("-3/6") == Rational(-1, 2));
}

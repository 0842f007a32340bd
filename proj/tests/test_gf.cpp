#include <catch2/catch_amalgamated.hpp>

#include "gfldpc/gf.hpp"

using namespace gfldpc;

TEST_CASE("addition matches digit-wise arithmetic", "[gf]") {
    const FieldSpec f8 = FieldSpec::make(8);
    CHECK(f8.add(3, 5) == 6);  // 011 + 101 = 110 componentwise mod 2
    const FieldSpec f3 = FieldSpec::make(3);
    CHECK(f3.add(2, 2) == 1);
    for (int q : {2, 3, 4, 5, 8, 9}) {
        const FieldSpec fs = FieldSpec::make(q);
        for (int a = 0; a < q; ++a) {
            CHECK(fs.add(a, 0) == a);
            CHECK(fs.sub(fs.add(a, 3 % q), 3 % q) == a);
        }
    }
}

TEST_CASE("multiplication and inverses", "[gf]") {
    const FieldSpec f3 = FieldSpec::make(3);
    CHECK(f3.mul(2, 2) == 1);
    CHECK(f3.inv(2) == 2);

    const FieldSpec f4 = FieldSpec::make(4);  // x^2 + x + 1
    CHECK(f4.mul(2, 2) == 3);                 // x * x = x + 1

    const FieldSpec f8 = FieldSpec::make(8);
    CHECK(f8.inv(1) == 1);
    for (int a = 1; a < 8; ++a) CHECK(f8.mul(a, f8.inv(a)) == 1);
    for (int q : {2, 3, 4, 5, 8, 9, 16}) {
        const FieldSpec fs = FieldSpec::make(q);
        for (int a = 0; a < q; ++a) CHECK(fs.mul(a, 1) == a);
    }
    CHECK_THROWS_AS(f8.inv(0), std::domain_error);
    CHECK_THROWS_AS(f8.add(-1, 0), std::domain_error);
    CHECK_THROWS_AS(f8.mul(8, 0), std::domain_error);
}

TEST_CASE("field axioms hold exhaustively for q <= 16", "[gf]") {
    for (int q : {2, 3, 4, 5, 7, 8, 9, 11, 13, 16}) {
        const FieldSpec fs = FieldSpec::make(q);
        for (int a = 0; a < q; ++a) {
            CHECK(fs.add(a, fs.neg(a)) == 0);
            if (a != 0) CHECK(fs.mul(a, fs.inv(a)) == 1);
            for (int b = 0; b < q; ++b) {
                CHECK(fs.add(a, b) == fs.add(b, a));
                CHECK(fs.mul(a, b) == fs.mul(b, a));
                for (int c = 0; c < q; ++c) {
                    CHECK(fs.add(fs.add(a, b), c) == fs.add(a, fs.add(b, c)));
                    CHECK(fs.mul(fs.mul(a, b), c) == fs.mul(a, fs.mul(b, c)));
                    CHECK(fs.mul(a, fs.add(b, c)) == fs.add(fs.mul(a, b), fs.mul(a, c)));
                }
            }
        }
    }
}

TEST_CASE("addition is an involution exactly in characteristic two", "[gf]") {
    for (int q : {2, 4, 8, 16, 32, 64}) {
        const FieldSpec fs = FieldSpec::make(q);
        for (int a = 0; a < q; ++a) CHECK(fs.add(a, a) == 0);
    }
    for (int q : {3, 5, 7, 9, 25, 27}) {
        const FieldSpec fs = FieldSpec::make(q);
        for (int a = 1; a < q; ++a) CHECK(fs.add(a, a) != 0);
    }
}

TEST_CASE("digit vectors round-trip with indices", "[gf]") {
    for (int q : {2, 3, 4, 5, 7, 8, 9, 16, 25, 27, 32, 49, 64, 81, 125, 128, 243, 256}) {
        const FieldSpec fs = FieldSpec::make(q);
        for (int a = 0; a < q; ++a) CHECK(fs.from_digits(fs.digits(a)) == a);
    }
}

TEST_CASE("construction rejects invalid orders and reducible polynomials", "[gf]") {
    CHECK_THROWS_AS(FieldSpec::make(1), std::domain_error);
    CHECK_THROWS_AS(FieldSpec::make(6), std::domain_error);
    CHECK_THROWS_AS(FieldSpec::make(12), std::domain_error);
    // x^2 + 1 = (x + 1)^2 over GF(2)
    CHECK_THROWS_AS(FieldSpec::make(2, 2, {1, 0, 1}), std::domain_error);
    // x^4 + x^2 + 1 = (x^2 + x + 1)^2 over GF(2): rejected by trial division
    CHECK_THROWS_AS(FieldSpec::make(2, 4, {1, 0, 1, 0, 1}), std::domain_error);
    CHECK_NOTHROW(FieldSpec::make(2, 4, {1, 1, 0, 0, 1}));
    // GF(11^2) has no table entry but works with an explicit polynomial
    CHECK_THROWS_AS(FieldSpec::make(121), std::domain_error);
    CHECK_NOTHROW(FieldSpec::make(11, 2, {1, 0, 1}));
}

TEST_CASE("large field tables stay consistent", "[gf]") {
    const FieldSpec fs = FieldSpec::make(256);
    for (int a = 1; a < 256; ++a) {
        CHECK(fs.mul(a, fs.inv(a)) == 1);
        CHECK(fs.mul(a, 1) == a);
    }
    // spot-check associativity on a few triples in a bigger field
    const FieldSpec f4096 = FieldSpec::make(4096);
    for (int a : {5, 1000, 4095})
        for (int b : {7, 233, 2048})
            CHECK(f4096.mul(f4096.mul(a, b), 99) == f4096.mul(a, f4096.mul(b, 99)));
}

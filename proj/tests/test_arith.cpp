#include <doctest.h>

#include "cbm/arith.hpp"

using namespace cbm;

TEST_CASE("is_prime basics") {
    CHECK(is_prime(1873));
    CHECK_FALSE(is_prime(1));
    CHECK_FALSE(is_prime(1874));  // 2 * 937
    CHECK(is_prime(2));
    CHECK_FALSE(is_prime(561));   // Carmichael
    CHECK(is_prime((uint64_t(1) << 61) - 1));
    // oracle: trial division below 10^4
    auto slow = [](uint64_t m) {
        if (m < 2) return false;
        for (uint64_t d = 2; d * d <= m; ++d)
            if (m % d == 0) return false;
        return true;
    };
    for (uint64_t m = 1; m < 10000; ++m) CHECK(is_prime(m) == slow(m));
}

TEST_CASE("legendre examples and multiplicativity") {
    CHECK(legendre(1, 7) == 1);
    CHECK(legendre(Int(1873), 5) == -1);
    CHECK(legendre(Int(1873), 11) == 1);  // 1873 = 3 = 5^2 mod 11
    CHECK_THROWS(legendre(Int(3), 2));
    CHECK_THROWS(legendre(Int(3), 15));
    for (uint64_t p = 3; p <= 97; p = next_prime(p)) {
        // oracle: count of square roots
        for (uint64_t a = 0; a < p; ++a) {
            int roots = 0;
            for (uint64_t x = 0; x < p; ++x)
                if (mulmod(x, x, p) == a) ++roots;
            int expect = a == 0 ? 0 : (roots > 0 ? 1 : -1);
            CHECK(legendre(Int(a), p) == expect);
        }
        for (uint64_t a = 1; a < p; ++a)
            for (uint64_t b = 1; b < p; ++b)
                CHECK(legendre(Int(a * b), p) == legendre(Int(a), p) * legendre(Int(b), p));
    }
}

TEST_CASE("sqrt_mod") {
    CHECK(sqrt_mod(Int(4), 7) == 2);
    CHECK(sqrt_mod(Int(3), 11) == 5);
    CHECK_FALSE(sqrt_mod(Int(2), 5).has_value());
    for (uint64_t p = 3; p <= 97; p = next_prime(p)) {
        for (uint64_t a = 0; a < p; ++a) {
            auto r = sqrt_mod(Int(a), p);
            if (legendre(Int(a), p) == -1) {
                CHECK_FALSE(r.has_value());
            } else {
                REQUIRE(r.has_value());
                CHECK(mulmod(*r, *r, p) == a);
                CHECK(*r <= p - *r);  // smaller root
            }
        }
    }
}

TEST_CASE("crt") {
    CHECK(crt({{Int(0), Int(1)}}) == 0);
    CHECK(crt({{Int(1), Int(2)}, {Int(2), Int(3)}}) == 5);
    CHECK(crt({{Int(2), Int(4)}, {Int(3), Int(5)}, {Int(0), Int(7)}}) == 98);
    CHECK_THROWS(crt({{Int(1), Int(4)}, {Int(2), Int(6)}}));
    // recovery property
    std::vector<std::pair<Int, Int>> sys{{Int(5), Int(9)}, {Int(3), Int(10)}, {Int(6), Int(7)}};
    Int x = crt(sys);
    for (auto& [r, m] : sys) CHECK(x % m == r % m);
}

TEST_CASE("square classes") {
    SquareClassQv c = square_class(Rat(50), Place::prime(5));
    CHECK(c.val_parity == 0);
    CHECK(c.unit == -1);  // 50 = 5^2 * 2, 2 a nonresidue mod 5

    c = square_class(Rat(-2), Place::make_real());
    CHECK(c.unit == -1);

    c = square_class(Rat(8), Place::prime(2));
    CHECK(c.val_parity == 1);
    CHECK(c.unit == 1);

    // square invariance: class(x * y^2) = class(x)
    std::vector<Place> places{Place::make_real(), Place::prime(2), Place::prime(3), Place::prime(5)};
    for (int xn = -9; xn <= 9; ++xn) {
        if (xn == 0) continue;
        for (int xd = 1; xd <= 4; ++xd)
            for (int y = 1; y <= 5; ++y) {
                Rat x = Rat(xn) / xd;
                for (auto& v : places)
                    CHECK(square_class(x * y * y, v) == square_class(x, v));
            }
    }

    // group law matches multiplication
    for (int a = -6; a <= 6; ++a) {
        if (a == 0) continue;
        for (int b = -6; b <= 6; ++b) {
            if (b == 0) continue;
            for (auto& v : places)
                CHECK(square_class(Rat(a), v) * square_class(Rat(b), v) ==
                      square_class(Rat(a) * b, v));
        }
    }
}

TEST_CASE("square_class_from_parts") {
    // p^val * unit against direct computation
    for (uint64_t p : {3ull, 7ull}) {
        Place v = Place::prime(p);
        for (int val = 0; val <= 3; ++val)
            for (uint64_t u = 1; u < p; ++u) {
                Rat x = Rat(u);
                for (int i = 0; i < val; ++i) x *= Rat(p);
                CHECK(square_class_from_parts(v, val, u) == square_class(x, v));
            }
    }
    Place v2 = Place::prime(2);
    for (int val = 0; val <= 3; ++val)
        for (uint64_t u : {1ull, 3ull, 5ull, 7ull}) {
            Rat x = Rat(u);
            for (int i = 0; i < val; ++i) x *= 2;
            CHECK(square_class_from_parts(v2, val, u) == square_class(x, v2));
        }
}

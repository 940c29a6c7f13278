#include <doctest.h>

#include <random>

#include "oracles.hpp"

using namespace cbm;

TEST_CASE("hilbert_symbol examples") {
    CHECK(hilbert_symbol(Rat(-1), Rat(-1), Place::make_real()) == -1);
    CHECK(hilbert_symbol(Rat(1), Rat(7), Place::prime(3)) == 1);
    CHECK(hilbert_symbol(Rat(1), Rat(-5), Place::make_real()) == 1);
    CHECK(hilbert_symbol(Rat(1873), Rat(5), Place::prime(5)) == -1);
    // v_7(7) = 1 and legendre(2,7) = +1, so the symbol is +1 and inv is 0
    CHECK(hilbert_symbol(Rat(2), Rat(7), Place::prime(7)) == 1);
    CHECK(inv(Rat(2), Rat(7), Place::prime(7)) == HalfInv{0});
    CHECK_THROWS(hilbert_symbol(Rat(0), Rat(1), Place::prime(3)));
}

TEST_CASE("conic_has_local_point") {
    CHECK_FALSE(conic_has_local_point(Rat(1873), Rat(5), Place::prime(1873)));
    CHECK(conic_has_local_point(Rat(1873), Rat(5), Place::prime(3)));
    for (int b = -5; b <= 5; ++b) {
        if (b == 0) continue;
        CHECK(conic_has_local_point(Rat(4), Rat(b), Place::prime(3)));
        CHECK(conic_has_local_point(Rat(4), Rat(b), Place::prime(2)));
        CHECK(conic_has_local_point(Rat(4), Rat(b), Place::make_real()));
    }
}

TEST_CASE("oracle equivalence on small squarefree range") {
    // smaller range here; the full |a|,|b| <= 50 sweep runs in acceptance
    auto vals = cbm_test::squarefree_values(15);
    std::vector<Place> places{Place::make_real(), Place::prime(2), Place::prime(3),
                              Place::prime(5), Place::prime(7), Place::prime(11)};
    for (int a : vals)
        for (int b : vals)
            for (auto& v : places)
                CHECK(hilbert_symbol(Rat(a), Rat(b), v) == cbm_test::hilbert_oracle(Rat(a), Rat(b), v));
}

TEST_CASE("symbol identities") {
    std::vector<Place> places{Place::make_real(), Place::prime(2), Place::prime(3),
                              Place::prime(5), Place::prime(7)};
    for (int a = -12; a <= 12; ++a) {
        if (a == 0) continue;
        for (int b = -12; b <= 12; ++b) {
            if (b == 0) continue;
            for (auto& v : places) {
                CHECK(hilbert_symbol(Rat(a), Rat(b), v) == hilbert_symbol(Rat(b), Rat(a), v));
                for (int b2 = 1; b2 <= 6; ++b2)
                    CHECK(hilbert_symbol(Rat(a), Rat(b) * b2, v) ==
                          hilbert_symbol(Rat(a), Rat(b), v) * hilbert_symbol(Rat(a), Rat(b2), v));
            }
        }
        for (auto& v : places) {
            CHECK(hilbert_symbol(Rat(a), Rat(-a), v) == 1);
            if (a != 1) CHECK(hilbert_symbol(Rat(a), Rat(1 - a), v) == 1);
        }
    }
}

TEST_CASE("product formula") {
    auto rep = check_product_formula(Rat(3), Rat(5));
    CHECK(rep.ok());
    rep = check_product_formula(Rat(1), Rat(1));
    for (auto& [v, h] : rep.table) CHECK(h.is_zero());
    rep = check_product_formula(Rat(-1), Rat(-1));
    for (auto& [v, h] : rep.table) {
        bool nontrivial = v.real || v.p == 2;
        CHECK(h.half == (nontrivial ? 1 : 0));
    }

    std::mt19937 rng(20260823);
    std::uniform_int_distribution<int> d(-200, 200);
    int done = 0;
    while (done < 1000) {
        int a = d(rng), b = d(rng);
        if (a == 0 || b == 0) continue;
        CHECK(check_product_formula(Rat(a), Rat(b)).ok());  // throws on violation
        ++done;
    }
}

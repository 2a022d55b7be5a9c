#include "adsec/secondary_algebra.hpp"

#include "doctest.h"

#include <random>

using namespace adsec;

namespace {

MilnorElt sq(const Profile& r) { return MilnorElt::basis_elt(r); }

MilnorElt random_elt(std::mt19937_64& rng, int d)
{
    MilnorElt e = MilnorElt::zero(d);
    for (std::size_t i = 0; i < e.coeffs.size(); ++i)
        if (rng() & 1)
            e.coeffs.set(i);
    return e;
}

std::vector<YKey> y_keys(int d)
{
    std::vector<YKey> out;
    for (int l = 1; y_degree(0, l) <= d; ++l)
        for (int k = 0; k < l && y_degree(k, l) <= d; ++k)
            out.push_back({k, l});
    return out;
}

// additive basis of B0 in degree d (Z/4 generators and Y_{k,l} Sq(R))
std::vector<BZeroElt> b0_basis(int d)
{
    std::vector<BZeroElt> out;
    for (const auto& r : milnor_basis(d))
        out.push_back(BZeroElt::sq(r));
    for (auto [k, l] : y_keys(d))
        for (const auto& r : milnor_basis(d - y_degree(k, l)))
            out.push_back(BZeroElt::y_term(k, l, r));
    return out;
}

BZeroElt random_b0(std::mt19937_64& rng, int d)
{
    BZeroElt b = BZeroElt::zero(d);
    for (auto& c : b.main)
        c = static_cast<std::uint8_t>(rng() % 4);
    for (auto [k, l] : y_keys(d))
        b.add_y(k, l, random_elt(rng, d - y_degree(k, l)).coeffs);
    return b;
}

KerPiElt random_kerpi(std::mt19937_64& rng, int d)
{
    BZeroElt b = random_b0(rng, d);
    for (auto& c : b.main)
        c &= 2;
    return KerPiElt::from(b);
}

}  // namespace

TEST_CASE("B0 product examples")
{
    BZeroElt s11 = b0_product(BZeroElt::sq({1}), BZeroElt::sq({1}));
    CHECK(s11 == BZeroElt::y_term(0, 1) + BZeroElt::sq({2}, 2));

    BZeroElt s12 = b0_product(BZeroElt::sq({1}), BZeroElt::sq({2}));
    CHECK(s12 == BZeroElt::y_term(0, 1, {1}) + BZeroElt::sq({3}, 3));

    CHECK(b0_product(BZeroElt::y_term(0, 1), BZeroElt::y_term(0, 1)).is_zero());
    CHECK(s11.to_string() == "2 Sq(2) + Y_{0,1}");
}

TEST_CASE("sigma and pi")
{
    CHECK(sigma_b(MilnorElt::zero(4)).is_zero());
    CHECK(sigma_b(sq({2})) == BZeroElt::sq({2}));
    CHECK(sigma_b(sq({3}) + sq({0, 1})) == BZeroElt::sq({3}) + BZeroElt::sq({0, 1}));
    CHECK(reduce_pi(BZeroElt::sq({2}, 2)).is_zero());
    CHECK(reduce_pi(BZeroElt::y_term(0, 1, {1})).is_zero());
    CHECK(reduce_pi(BZeroElt::sq({3}, 3)) == sq({3}));

    std::mt19937_64 rng(1);
    for (int d = 0; d < 16; ++d) {
        MilnorElt a = random_elt(rng, d);
        CHECK(reduce_pi(sigma_b(a)) == a);
    }
}

TEST_CASE("A-function examples")
{
    KerPiElt two = KerPiElt::from(BZeroElt::sq({}, 2));
    CHECK(a_function(sq({1}), two) == sq({}));
    CHECK(a_function(sq({2}), two) == sq({1}));
    CHECK(a_function(sq({1}), BZeroElt::y_term(0, 1)) == sq({2}));
    CHECK_THROWS_WITH(a_function(sq({1}), BZeroElt::sq({1})), doctest::Contains("kernel of pi"));
}

TEST_CASE("B0 associativity, exhaustive in low degree")
{
    for (int total = 0; total <= 10; ++total)
        for (int da = 0; da <= total; ++da)
            for (int db = 0; da + db <= total; ++db) {
                const int dc = total - da - db;
                auto ba = b0_basis(da), bb = b0_basis(db), bc = b0_basis(dc);
                for (const auto& a : ba)
                    for (const auto& b : bb)
                        for (const auto& c : bc) {
                            BZeroElt l = b0_product(b0_product(a, b), c);
                            BZeroElt r = b0_product(a, b0_product(b, c));
                            CHECK_MESSAGE(l == r, a.to_string() << " | " << b.to_string() << " | " << c.to_string());
                        }
            }
}

TEST_CASE("B0 associativity, random up to degree 20")
{
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 150; ++trial) {
        int da = rng() % 10, db = rng() % 10;
        int dc = rng() % (21 - da - db);
        auto a = random_b0(rng, da), b = random_b0(rng, db), c = random_b0(rng, dc);
        CHECK(b0_product(b0_product(a, b), c) == b0_product(a, b0_product(b, c)));
    }
}

TEST_CASE("pi is a ring map")
{
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 150; ++trial) {
        auto a = random_b0(rng, rng() % 12), b = random_b0(rng, rng() % 12);
        CHECK(reduce_pi(b0_product(a, b)) == milnor_product(reduce_pi(a), reduce_pi(b)));
    }
}

TEST_CASE("accumulator agrees with b0_product")
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        int da = rng() % 12, db = rng() % 12;
        auto a = random_elt(rng, da), b = random_elt(rng, db);
        B0Accumulator acc(da + db);
        acc.add_sigma_product(a, b);
        CHECK(acc.get() == b0_product(sigma_b(a), sigma_b(b)));
        acc.add_sigma_product(a, b, -1);
        CHECK(acc.get().in_ker_pi());
        CHECK(acc.get().y.empty());
    }
}

TEST_CASE("A-function cocycle")
{
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 200; ++trial) {
        int da = 1 + rng() % 8, db = rng() % 8, dr = rng() % 8;
        MilnorElt a = random_elt(rng, da), b = random_elt(rng, db);
        KerPiElt r = random_kerpi(rng, dr);
        BZeroElt br = b0_product(sigma_b(b), r.to_b0());
        MilnorElt lhs = a_function(milnor_product(a, b), r);
        MilnorElt rhs = a_function(a, br) + milnor_product(a, a_function(b, r));
        CHECK(lhs == rhs);
        CHECK(lhs.degree == da + db + dr - 1);

        // another lift of b differs by ker pi, which annihilates ker pi
        BZeroElt other = sigma_b(b) + random_kerpi(rng, db).to_b0();
        CHECK(b0_product(other, r.to_b0()) == br);
    }
}

TEST_CASE("A(-, 2) is a derivation")
{
    std::mt19937_64 rng(3);
    KerPiElt two = KerPiElt::from(BZeroElt::sq({}, 2));
    for (int trial = 0; trial < 200; ++trial) {
        MilnorElt a = random_elt(rng, 1 + rng() % 10), b = random_elt(rng, 1 + rng() % 10);
        CHECK(a_function(milnor_product(a, b), two) ==
              milnor_product(a_function(a, two), b) + milnor_product(a, a_function(b, two)));
    }
}

#include "adsec/fp_linalg.hpp"

#include "doctest.h"

#include <random>

using namespace adsec;

namespace {

FMatrix random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c, double density = 0.5)
{
    std::bernoulli_distribution bit(density);
    FMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j)
            if (bit(rng))
                m.set(i, j);
    return m;
}

FVector random_vector(std::mt19937_64& rng, std::size_t n)
{
    std::bernoulli_distribution bit(0.5);
    FVector v(n);
    for (std::size_t i = 0; i < n; ++i)
        if (bit(rng))
            v.set(i);
    return v;
}

}  // namespace

TEST_CASE("row_reduce examples")
{
    auto r = row_reduce(FMatrix::from_rows({{1, 1}, {0, 1}}));
    CHECK(r.rref == FMatrix::from_rows({{1, 0}, {0, 1}}));
    CHECK(r.pivots == std::vector<std::size_t>{0, 1});

    r = row_reduce(FMatrix::from_rows({{0, 0}, {0, 0}}));
    CHECK(r.rref == FMatrix::from_rows({{0, 0}, {0, 0}}));
    CHECK(r.pivots.empty());

    r = row_reduce(FMatrix::from_rows({{1, 1, 0}, {1, 1, 1}}));
    CHECK(r.rref == FMatrix::from_rows({{1, 1, 0}, {0, 0, 1}}));
    CHECK(r.pivots == std::vector<std::size_t>{0, 2});
}

TEST_CASE("solver examples")
{
    Solver id(FMatrix::identity(3));
    for (int b = 0; b < 8; ++b) {
        FVector v = FVector::from_bits({b & 1, (b >> 1) & 1, (b >> 2) & 1});
        REQUIRE(id.solve(v));
        CHECK(*id.solve(v) == v);
    }

    Solver z(FMatrix(2, 3));
    CHECK(!z.solve(FVector::from_bits({1, 0, 0})));
    CHECK(z.solve(FVector(3)));
    CHECK(z.kernel_basis().rows() == 2);

    Solver s(FMatrix::from_rows({{1, 1, 0}, {0, 1, 1}}));
    CHECK(*s.solve(FVector::from_bits({1, 0, 1})) == FVector::from_bits({1, 1}));

    Solver t(FMatrix::from_rows({{1, 1}, {0, 1}}));
    CHECK(*t.solve(FVector::from_bits({1, 0})) == FVector::from_bits({1, 1}));

    Solver zero1(FMatrix(1, 1));
    CHECK(!zero1.solve(FVector::from_bits({1})));

    Solver k(FMatrix::from_rows({{1, 1}, {1, 1}}));
    auto kb = k.kernel_basis();
    REQUIRE(kb.rows() == 1);
    CHECK(kb.row(0) == FVector::from_bits({1, 1}));
    CHECK(Solver(FMatrix::identity(5)).kernel_basis().rows() == 0);
}

TEST_CASE("solve rejects wrong length")
{
    Solver s(FMatrix::identity(3));
    CHECK_THROWS(s.solve(FVector(4)));
}

TEST_CASE("random kernel, rank and solve properties")
{
    std::mt19937_64 rng(12345);
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t r = 1 + rng() % 64, c = 1 + rng() % 64;
        FMatrix m = random_matrix(rng, r, c, trial % 3 == 0 ? 0.1 : 0.5);
        Solver s(m);
        auto kb = s.kernel_basis();
        for (std::size_t i = 0; i < kb.rows(); ++i)
            CHECK(m.apply(kb.row(i)).is_zero());
        CHECK(rank(kb) == kb.rows());
        CHECK(rank(m) + kb.rows() == r);
        CHECK(s.rank() == rank(m));

        FVector x = random_vector(rng, r);
        FVector b = m.apply(x);
        auto sol = s.solve(b);
        REQUIRE(sol);
        CHECK(m.apply(*sol) == b);
        // determinism
        CHECK(*Solver(m).solve(b) == *sol);

        auto rr = row_reduce(m);
        auto rr2 = row_reduce(rr.rref);
        CHECK(rr2.rref == rr.rref);
        CHECK(rr2.pivots == rr.pivots);
    }
}

TEST_CASE("append_row matches rebuild")
{
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        std::size_t r = 1 + rng() % 30, c = 1 + rng() % 30;
        FMatrix m = random_matrix(rng, r, c, 0.3);
        Solver inc(FMatrix(0, c));
        for (std::size_t i = 0; i < r; ++i)
            inc.append_row(m.row(i));
        Solver full(m);
        CHECK(inc.kernel_basis() == full.kernel_basis());
        CHECK(inc.pivots() == full.pivots());
        for (int k = 0; k < 5; ++k) {
            FVector b = m.apply(random_vector(rng, r));
            CHECK(*inc.solve(b) == *full.solve(b));
        }
        FVector junk = random_vector(rng, c);
        CHECK(inc.in_image(junk) == full.in_image(junk));
    }
}

TEST_CASE("unaligned add_at")
{
    FVector a(200), src(70);
    src.set(0);
    src.set(69);
    a.add_at(src, 61);
    CHECK(a.get(61));
    CHECK(a.get(130));
    CHECK(a.count() == 2);
    CHECK(to_string(FVector::from_bits({1, 0, 1})) == "[1, 0, 1]");
}

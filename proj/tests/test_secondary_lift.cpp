#include "support.hpp"

#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <random>

using namespace testsupport;

namespace {

std::size_t count_data_lines(const std::string& path)
{
    std::ifstream in(path);
    std::size_t n = 0;
    for (std::string line; std::getline(in, line);)
        if (!line.empty() && line[0] != '#')
            ++n;
    return n;
}

std::string temp_path(const std::string& name)
{
    auto dir = std::filesystem::temp_directory_path() / "adsec_test_secondary";
    std::filesystem::create_directories(dir);
    return (dir / name).string();
}

}  // namespace

TEST_CASE("h_tau solves its lifting equation at every generator")
{
    const auto& S = sphere();
    std::size_t checked = 0, expected = 0;
    for (int s = 3; s <= S.res.max_s(); ++s)
        for (int n = 0; n <= S.res.max_n() - 1; ++n)
            expected += S.res.num_gens(s, n + s);
    for (int s = 3; s <= S.res.max_s(); ++s)
        for (std::size_t j = 0; j < S.res.free(s).num_gens(); ++j) {
            if (!S.sec.has_h_tau(s, j))
                continue;
            const int t = S.res.free(s).degree(j);
            CHECK(S.res.apply_d(s - 2, t - 1, S.sec.h_tau(s, j)) == S.sec.h_tau_rhs(s, j));
            ++checked;
        }
    CHECK(checked == expected);
}

TEST_CASE("d2 d2 = 0 over the whole range")
{
    const auto& S = sphere();
    for (int n = 0; n <= 40; ++n)
        for (int s = 0; s <= 20; ++s) {
            if (!S.sec.d2_defined(n, s) || !S.sec.d2_defined(n - 1, s + 2))
                continue;
            const FMatrix m = S.sec.d2_matrix(n, s);
            for (std::size_t i = 0; i < m.rows(); ++i) {
                CAPTURE(n);
                CAPTURE(s);
                CHECK(S.sec.d2(ExtClass{n - 1, s + 2, m.row(i)}).vector.is_zero());
            }
        }
}

TEST_CASE("d2 is h0, h1, h2 linear (Leibniz against the Yoneda products)")
{
    const auto& S = sphere();
    std::size_t checked = 0;
    for (int j = 0; j <= 2; ++j)
        for (int n = 0; n <= 40; ++n)
            for (int s = 0; s <= 19; ++s) {
                const int hn = n + (1 << j) - 1;
                if (!S.sec.d2_defined(n, s) || !S.sec.d2_defined(hn, s + 1))
                    continue;
                for (std::size_t i = 0; i < S.res.num_gens(s, n + s); ++i) {
                    const ExtClass x = basis_class(S.res, n, s, i);
                    CAPTURE(j);
                    CAPTURE(n);
                    CAPTURE(s);
                    CHECK(S.sec.d2(h_product(S.res, j, x)) == h_product(S.res, j, S.sec.d2(x)));
                    ++checked;
                }
            }
    CHECK(checked > 500);
}

TEST_CASE("classical d2 values")
{
    const auto& S = sphere();
    const auto& r = S.res;
    for (int j = 0; j <= 3; ++j)
        CHECK(S.sec.d2(h(r, j)).vector.is_zero());
    CHECK(S.sec.d2(h(r, 4)) == h_times(r, {3, 3}, h(r, 0)));   // h0 h3^2
    CHECK(S.sec.d2(h(r, 5)) == h_times(r, {4, 4}, h(r, 0)));   // h0 h4^2
    CHECK(S.sec.d2(unique_class(r, 8, 3)).vector.is_zero());   // c0
    CHECK(S.sec.d2(unique_class(r, 14, 4)).vector.is_zero());  // d0
    CHECK(S.sec.d2(unique_class(r, 20, 4)).vector.is_zero());  // g
}

TEST_CASE("lift_sum carrying law")
{
    const auto& r = sphere().res;
    std::mt19937_64 rng(7);
    for (auto [n, s] : {std::pair{31, 3}, {31, 5}, {23, 9}, {37, 8}, {38, 4}, {0, 3}}) {
        for (int trial = 0; trial < 8; ++trial) {
            ExtClass x = zero_class(r, n, s), y = zero_class(r, n, s);
            for (std::size_t i = 0; i < x.vector.size(); ++i) {
                x.vector.set(i, rng() & 1);
                y.vector.set(i, rng() & 1);
            }
            const SecondaryValue sum = lift_sum(r, lift(r, x), lift(r, y));
            ExtClass e = x;
            e.vector.add(y.vector);
            ExtClass carry = x;
            carry.vector.and_with(y.vector);
            CHECK(sum.e == e);
            CHECK(sum.f == h_product(r, 0, carry));
        }
        // [x] + [x] = tau h0 x
        ExtClass x = zero_class(r, n, s);
        x.vector.set(0);
        const SecondaryValue two = lift_sum(r, lift(r, x), lift(r, x));
        CHECK(two.e.vector.is_zero());
        CHECK(two.f == h_product(r, 0, x));
    }
}

TEST_CASE("lift_sum is associative and commutative")
{
    const auto& r = sphere().res;
    std::mt19937_64 rng(11);
    auto random_value = [&](int n, int s) {
        SecondaryValue v = SecondaryValue::zero(r, n, s);
        for (std::size_t i = 0; i < v.e.vector.size(); ++i)
            v.e.vector.set(i, rng() & 1);
        for (std::size_t i = 0; i < v.f.vector.size(); ++i)
            v.f.vector.set(i, rng() & 1);
        return v;
    };
    for (int trial = 0; trial < 20; ++trial) {
        const auto a = random_value(31, 5), b = random_value(31, 5), c = random_value(31, 5);
        CHECK(lift_sum(r, lift_sum(r, a, b), c) == lift_sum(r, a, lift_sum(r, b, c)));
        CHECK(lift_sum(r, a, b) == lift_sum(r, b, a));
        CHECK(lift_sum(r, a, SecondaryValue::zero(r, 31, 5)) == a);
    }
}

TEST_CASE("twist is an involution and negates")
{
    const auto& r = sphere().res;
    const ExtClass x = h(r, 0);
    const SecondaryValue v = lift(r, x);
    const SecondaryValue t = twist(r, v);
    CHECK(t.e == x);
    CHECK(t.f == h_product(r, 0, x));
    CHECK(twist(r, t) == v);
    // x + (-x) = 0
    CHECK(lift_sum(r, v, t).is_zero());
}

TEST_CASE("timing log has one line per generator")
{
    Resolution r;
    r.extend(16, 8);
    SecondaryResolution sec(r);
    sec.compute();
    std::size_t gens = 0;
    for (int s = 2; s <= 8; ++s)
        for (int n = 0; n <= 15; ++n)
            gens += r.num_gens(s, n + s);
    CHECK(sec.timings().size() == gens);
    const std::string path = temp_path("timing.log");
    sec.write_timing_log(path);
    CHECK(count_data_lines(path) == gens);

    Resolution small;
    small.extend(10, 1);
    SecondaryResolution empty(small);
    empty.compute();
    empty.write_timing_log(path);
    CHECK(count_data_lines(path) == 0);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "# n s t index wall_us cpu_us");
}

TEST_CASE("secondary data is deterministic")
{
    Resolution a, b;
    a.extend(24, 10);
    b.extend(24, 10);
    SecondaryResolution sa(a), sb(b);
    sa.compute();
    sb.compute();
    for (int n = 0; n <= 24; ++n)
        for (int s = 0; s <= 10; ++s)
            if (sa.d2_defined(n, s)) {
                REQUIRE(sb.d2_defined(n, s));
                const FMatrix ma = sa.d2_matrix(n, s), mb = sb.d2_matrix(n, s);
                for (std::size_t i = 0; i < ma.rows(); ++i)
                    CHECK(ma.row(i) == mb.row(i));
            }
}

TEST_CASE("d2_preimage inverts d2")
{
    const auto& S = sphere();
    const ExtClass x = h(S.res, 4);
    const ExtClass y = S.sec.d2(x);
    auto pre = S.sec.d2_preimage(15, 1, y);
    REQUIRE(pre.has_value());
    CHECK(S.sec.d2(*pre) == y);
    CHECK(S.sec.d2_preimage(15, 1, zero_class(S.res, 14, 3)).value().vector.is_zero());
}

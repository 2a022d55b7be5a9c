#include "adsec/resolution.hpp"

#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

using namespace adsec;

namespace {

// ---- cobar oracle: Ext_A(F2, F2) as the cohomology of the cobar complex of
// the dual Steenrod algebra F2[xi_1, xi_2, ...], Delta xi_k = sum xi_{k-i}^{2^i} (x) xi_i.

using Mono = Profile;  // exponents of xi_1, xi_2, ...
using Tensor = std::set<std::pair<Mono, Mono>>;

Mono mono_mul(const Mono& a, const Mono& b)
{
    Mono m(std::max(a.size(), b.size()), 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        m[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i)
        m[i] += b[i];
    trim(m);
    return m;
}

Mono xi_power(int k, std::uint32_t e)
{
    if (k == 0 || e == 0)
        return {};
    Mono m(static_cast<std::size_t>(k), 0);
    m[static_cast<std::size_t>(k - 1)] = e;
    return m;
}

void toggle(Tensor& t, const std::pair<Mono, Mono>& term)
{
    auto [it, fresh] = t.insert(term);
    if (!fresh)
        t.erase(it);
}

Tensor tensor_mul(const Tensor& a, const Tensor& b)
{
    Tensor out;
    for (const auto& x : a)
        for (const auto& y : b)
            toggle(out, {mono_mul(x.first, y.first), mono_mul(x.second, y.second)});
    return out;
}

Tensor coproduct(const Mono& r)
{
    Tensor out{{Mono{}, Mono{}}};
    for (std::size_t k = 1; k <= r.size(); ++k) {
        Tensor dk;
        for (int i = 0; i <= static_cast<int>(k); ++i)
            toggle(dk, {xi_power(static_cast<int>(k) - i, 1u << i), xi_power(i, 1)});
        for (std::uint32_t e = 0; e < r[k - 1]; ++e)
            out = tensor_mul(out, dk);
    }
    return out;
}

Tensor reduced_coproduct(const Mono& r)
{
    Tensor out;
    for (const auto& term : coproduct(r))
        if (!term.first.empty() && !term.second.empty())
            out.insert(term);
    return out;
}

using Word = std::vector<Mono>;

void words(int t, Word& cur, int s, std::vector<Word>& out)
{
    if (s == 0) {
        if (t == 0)
            out.push_back(cur);
        return;
    }
    for (int d = 1; d <= t; ++d)
        for (const auto& m : milnor_basis(d)) {
            cur.push_back(m);
            words(t - d, cur, s - 1, out);
            cur.pop_back();
        }
}

std::vector<Word> cobar_basis(int s, int t)
{
    std::vector<Word> out;
    Word cur;
    words(t, cur, s, out);
    return out;
}

std::size_t cobar_rank(int s, int t)  // rank of d: C^(s,t) -> C^(s+1,t)
{
    const auto src = cobar_basis(s, t), dst = cobar_basis(s + 1, t);
    if (src.empty() || dst.empty())
        return 0;
    std::map<Word, std::size_t> idx;
    for (std::size_t i = 0; i < dst.size(); ++i)
        idx[dst[i]] = i;
    FMatrix m(src.size(), dst.size());
    for (std::size_t i = 0; i < src.size(); ++i)
        for (std::size_t k = 0; k < src[i].size(); ++k)
            for (const auto& [l, r] : reduced_coproduct(src[i][k])) {
                Word w = src[i];
                w[k] = l;
                w.insert(w.begin() + static_cast<std::ptrdiff_t>(k) + 1, r);
                m.row(i).flip(idx.at(w));
            }
    return rank(m);
}

std::size_t cobar_ext(int s, int t)
{
    if (s == 0)
        return t == 0 ? 1 : 0;
    const std::size_t dim = cobar_basis(s, t).size();
    return dim - cobar_rank(s, t) - cobar_rank(s - 1, t);
}

ModulePresentation moore_space()
{
    ModulePresentation m({0, 1}, "S_2_mod_2");
    m.set_action({1}, 0, FVector::from_bits({1}));
    return m;
}

std::filesystem::path temp_file(const std::string& name)
{
    auto dir = std::filesystem::temp_directory_path() / "adsec_test_resolution";
    std::filesystem::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_CASE("cobar oracle agrees with the minimal resolution for t <= 12")
{
    Resolution r;
    r.extend(12, 12);
    for (int t = 0; t <= 12; ++t)
        for (int s = 0; s <= t; ++s) {
            CAPTURE(s);
            CAPTURE(t);
            CHECK(r.num_gens(s, t) == cobar_ext(s, t));
        }
}

TEST_CASE("low generators")
{
    Resolution r;
    r.extend(10, 6);
    CHECK(r.num_gens(0, 0) == 1);
    CHECK(r.num_gens(1, 1) == 1);
    CHECK(r.num_gens(1, 2) == 1);
    CHECK(r.num_gens(2, 2) == 1);
    CHECK(r.num_gens(2, 4) == 1);
    CHECK(r.num_gens(1, 3) == 0);
    CHECK(r.num_gens(2, 3) == 0);  // h0 h1 = 0
    CHECK(r.num_gens(3, 6) == 1);  // h1^3 = h0^2 h2
    CHECK(r.num_gens(4, 8) == 0);  // h1^4 = 0
    for (int s = 0; s <= 6; ++s)
        CHECK(r.num_gens(s, s) == 1);  // h0 tower
}

TEST_CASE("Ext^1 is spanned by the h_j")
{
    Resolution r;
    r.extend(40, 2);
    for (int t = 1; t <= 41; ++t) {
        CAPTURE(t);
        const bool power = (t & (t - 1)) == 0;
        CHECK(r.num_gens(1, t) == (power ? 1u : 0u));
    }
}

TEST_CASE("exactness and minimality")
{
    Resolution r;
    r.extend(24, 10);
    CHECK(r.verify() == "");
    Resolution m(moore_space());
    m.extend(16, 8);
    CHECK(m.verify() == "");
    CHECK(m.num_gens(0, 0) == 1);
    for (int s = 1; s <= 8; ++s)
        CHECK(m.num_gens(s, s) == 0);  // 2 kills the h0 tower
    CHECK(m.num_gens(1, 2) == 1);      // h1 on the bottom cell
}

TEST_CASE("queries outside the computed range throw")
{
    Resolution r;
    r.extend(5, 3);
    CHECK_THROWS(r.num_gens(4, 4));
    CHECK_THROWS(r.num_gens(1, 8));
    CHECK_FALSE(r.computed(2, 10));
}

TEST_CASE("growing a resolution keeps earlier data and matches a direct run")
{
    Resolution a;
    a.extend(20, 8);
    const FVector d_old = a.d(2, a.first_gen(2, 16));
    a.extend(30, 10);
    Resolution b;
    b.extend(30, 10);
    CHECK(a.d(2, a.first_gen(2, 16)) == d_old);
    for (int s = 0; s <= 10; ++s)
        for (int n = 0; n <= 30; ++n)
            CHECK(a.num_gens(s, n + s) == b.num_gens(s, n + s));
    CHECK(a.verify() == "");
}

TEST_CASE("resolutions are deterministic")
{
    Resolution a, b;
    a.extend(22, 9);
    b.extend(22, 9);
    for (int s = 0; s < a.num_stages(); ++s) {
        REQUIRE(a.free(s).num_gens() == b.free(s).num_gens());
        for (std::size_t j = 0; j < a.free(s).num_gens(); ++j)
            CHECK(a.d(s, j) == b.d(s, j));
    }
}

TEST_CASE("checkpoint round trip")
{
    Resolution a;
    a.extend(18, 7);
    const auto path = temp_file("rt.adsec");
    a.save(path.string());
    Resolution b = Resolution::load(path.string());
    CHECK(b.max_n() == 18);
    CHECK(b.max_s() == 7);
    for (int s = 0; s < a.num_stages(); ++s) {
        REQUIRE(a.free(s).num_gens() == b.free(s).num_gens());
        for (std::size_t j = 0; j < a.free(s).num_gens(); ++j) {
            CHECK(a.free(s).degree(j) == b.free(s).degree(j));
            CHECK(a.d(s, j) == b.d(s, j));
        }
    }
    // resuming from the checkpoint equals growing in memory
    a.extend(26, 9);
    b.extend(26, 9);
    for (int s = 0; s < a.num_stages(); ++s)
        for (std::size_t j = 0; j < a.free(s).num_gens(); ++j)
            CHECK(a.d(s, j) == b.d(s, j));

    Resolution m(moore_space());
    m.extend(10, 5);
    m.save(path.string());
    Resolution m2 = Resolution::load(path.string());
    CHECK(m2.module().name() == "S_2_mod_2");
    CHECK(m2.num_gens(1, 2) == 1);
}

TEST_CASE("corrupt checkpoints are rejected")
{
    Resolution a;
    a.extend(8, 4);
    const auto path = temp_file("bad.adsec");
    a.save(path.string());
    {
        std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(20);
        char c = 0;
        f.read(&c, 1);
        f.seekp(20);
        c ^= 0x5a;
        f.write(&c, 1);
    }
    CHECK_THROWS_WITH(Resolution::load(path.string()), doctest::Contains("checksum"));
    {
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        f << "NOTADSECFILE-------";
    }
    CHECK_THROWS_WITH(Resolution::load(path.string()), doctest::Contains("magic"));
    CHECK_THROWS(Resolution::load(temp_file("missing.adsec").string()));
}

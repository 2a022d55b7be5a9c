#pragma once
// Shared test fixtures and oracles. The sphere resolution (n <= 40, s <= 20)
// and its secondary data are built once per process.

#include "adsec/homotopy_lift.hpp"
#include "adsec/sseq.hpp"

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace testsupport {

using namespace adsec;

struct Sphere {
    Resolution res;
    SecondaryResolution sec;

    Sphere(int max_n, int max_s) : res(), sec((res.extend(max_n, max_s), res)) { sec.compute(); }
};

inline const Sphere& sphere()
{
    static const std::unique_ptr<Sphere> s = std::make_unique<Sphere>(40, 20);
    return *s;
}

inline ExtClass zero_class(const Resolution& r, int n, int s) { return ExtClass{n, s, FVector(r.num_gens(s, n + s))}; }

inline ExtClass basis_class(const Resolution& r, int n, int s, std::size_t i)
{
    ExtClass x = zero_class(r, n, s);
    x.vector.set(i);
    return x;
}

inline ExtClass from_bits(const Resolution& r, int n, int s, const std::vector<int>& bits)
{
    ExtClass x = zero_class(r, n, s);
    if (bits.size() != x.vector.size())
        throw std::logic_error("class length mismatch at (" + std::to_string(n) + ", " + std::to_string(s) + ")");
    for (std::size_t i = 0; i < bits.size(); ++i)
        x.vector.set(i, bits[i] != 0);
    return x;
}

// The nonzero class of a one-dimensional bidegree; throws otherwise, so a
// structural identification can never silently pick an index.
inline ExtClass unique_class(const Resolution& r, int n, int s)
{
    if (r.num_gens(s, n + s) != 1)
        throw std::logic_error("bidegree (" + std::to_string(n) + ", " + std::to_string(s) + ") is not one-dimensional");
    return basis_class(r, n, s, 0);
}

inline ExtClass h(const Resolution& r, int j) { return unique_class(r, (1 << j) - 1, 1); }

inline ExtClass h_times(const Resolution& r, std::initializer_list<int> js, ExtClass x)
{
    for (int j : js)
        x = h_product(r, j, x);
    return x;
}

inline SecondaryValue lift(const Resolution& r, const ExtClass& x) { return SecondaryValue::lift(r, x); }

inline SecondaryValue value(const Resolution& r, const ExtClass& e, const ExtClass* f = nullptr)
{
    SecondaryValue v = SecondaryValue::lift(r, e);
    if (f)
        v.f = *f;
    return v;
}

// Equality in pi_{*,*} C tau^2 up to the choice of tau part: the tau parts may
// differ by an element of the image of d2.
inline bool eq_mod_d2(const SecondaryResolution& sec, const SecondaryValue& a, const SecondaryValue& b)
{
    if (!(a.e == b.e) || a.f.n != b.f.n || a.f.s != b.f.s)
        return false;
    FVector d = a.f.vector;
    d.add(b.f.vector);
    if (d.is_zero())
        return true;
    const int n = a.f.n + 1, s = a.f.s - 2;
    if (s < 0 || !sec.d2_defined(n, s))
        return false;
    return sec.d2_preimage(n, s, ExtClass{a.f.n, a.f.s, d}).has_value();
}

// [name] x for every basis class x in range, as the product file would list
// it: classes that do not survive d2 keep only their E2 part.
inline std::vector<ProductRecord> product_records(const Sphere& S, const std::string& name, const SecondaryValue& a)
{
    SecondaryChainMap m(S.sec, S.sec, a);
    m.extend(S.res.max_n());
    std::vector<ProductRecord> out;
    for (int n = 0; n <= S.res.max_n(); ++n)
        for (int s = 0; s <= S.res.max_s(); ++s) {
            if (!S.res.computed(s, n + s) || !product_defined(m, n, s))
                continue;
            const bool known = S.sec.d2_defined(n, s);
            for (std::size_t i = 0; i < S.res.num_gens(s, n + s); ++i) {
                const ExtClass x = basis_class(S.res, n, s, i);
                ProductRecord rec{name, x, product(m, lift(S.res, x)), false};
                if (!known || !S.sec.d2(x).vector.is_zero()) {
                    rec.mod_tau = true;
                    rec.value.f.vector.clear();
                }
                if (!rec.value.is_zero())
                    out.push_back(std::move(rec));
            }
        }
    return out;
}

// every nonzero d2 on a basis class
inline std::vector<Differential> all_d2(const Sphere& S)
{
    std::vector<Differential> out;
    for (int n = 0; n <= S.res.max_n(); ++n)
        for (int s = 0; s <= S.res.max_s(); ++s) {
            if (!S.sec.d2_defined(n, s))
                continue;
            for (std::size_t i = 0; i < S.res.num_gens(s, n + s); ++i) {
                const ExtClass x = basis_class(S.res, n, s, i);
                ExtClass y = S.sec.d2(x);
                if (!y.vector.is_zero())
                    out.push_back(Differential{2, x, std::move(y)});
            }
        }
    return out;
}

// Ordinary Massey product <c, b, a> in Ext of the sphere, from a chain
// null-homotopy H of B o A (dH + Hd = BA, H = 0 below the composite's
// filtration), evaluated against the cocycle c. Independent of the secondary
// machinery: only the chain maps and the resolution's differentials are used.
class OrdinaryMassey {
public:
    OrdinaryMassey(const Resolution& r, const ChainMap& a, const ChainMap& b)
        : r_(r), a_(a), b_(b), s0_(a.shift_s() + b.shift_s()), t0_(a.shift_t() + b.shift_t())
    {
    }

    // the composite b a as a class (must vanish for the bracket)
    ExtClass composite_class() const
    {
        const int n = t0_ - s0_;
        ExtClass x = zero_class(r_, n, s0_);
        const std::size_t first = r_.first_gen(s0_, t0_);
        for (std::size_t i = 0; i < x.vector.size(); ++i)
            x.vector.set(i, unit_coeff(ba(s0_, first + i), 0));
        return x;
    }

    // <c, b, a> at (c.n + stem(ba) + 1, c.s + s0 - 1)
    ExtClass bracket(const ExtClass& c) const
    {
        const int s = c.s + s0_ - 1, t = c.t() + t0_;
        ExtClass out = zero_class(r_, t - s, s);
        const std::size_t first = r_.first_gen(s, t), cfirst = r_.first_gen(c.s, c.t());
        for (std::size_t i = 0; i < out.vector.size(); ++i) {
            const FVector& hv = homotopy(s, first + i);
            bool v = false;
            for (std::size_t k : c.vector.support())
                v ^= unit_coeff(hv, cfirst + k, c.s);
            out.vector.set(i, v);
        }
        return out;
    }

private:
    // Sq(0) coefficient of generator j in x (full layout of P^(s) in degree deg j)
    bool unit_coeff(const FVector& x, std::size_t j, int s = 0) const
    {
        const FreeModule& f = r_.free(s);
        return x.get(f.offset(f.degree(j), j));
    }

    FVector ba(int s, std::size_t j) const
    {
        const int t = r_.free(s).degree(j);
        return b_.apply(s - a_.shift_s(), t - a_.shift_t(), a_.value(s, j));
    }

    const FVector& homotopy(int s, std::size_t j) const
    {
        auto key = std::make_pair(s, j);
        auto it = memo_.find(key);
        if (it != memo_.end())
            return it->second;
        const int t = r_.free(s).degree(j);
        const int ts = s - s0_, tt = t - t0_;  // BA(g) lives in P^(ts), degree tt
        if (tt < 0)
            return memo_.emplace(key, FVector()).first->second;
        const FreeModule& tgt = r_.free(ts);
        FVector rhs = ba(s, j);
        if (s > s0_)
            for (const auto& [k, coeff] : r_.d_terms(s, j))
                if (r_.free(s - 1).degree(k) >= t0_)
                    tgt.left_multiply(coeff, r_.free(s - 1).degree(k) - t0_, homotopy(s - 1, k), rhs);
        FVector sol(r_.free(ts + 1).dim(tt));
        const std::size_t below = tgt.dim_below(tt);
        for (std::size_t i = below; i < rhs.size(); ++i)
            if (rhs.get(i))
                throw std::logic_error("B o A is not null-homotopic");
        if (tt >= 0 && below > 0) {
            auto x = r_.solver(ts + 1, tt).solve(rhs.slice(0, below));
            if (!x)
                throw std::logic_error("homotopy equation has no solution");
            sol = *x;
        }
        return memo_.emplace(key, std::move(sol)).first->second;
    }

    const Resolution& r_;
    const ChainMap& a_;
    const ChainMap& b_;
    int s0_, t0_;
    mutable std::map<std::pair<int, std::size_t>, FVector> memo_;
};

}  // namespace testsupport

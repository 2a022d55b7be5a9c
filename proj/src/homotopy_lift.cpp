#include "adsec/homotopy_lift.hpp"

#include "adsec/parallel.hpp"

#include <algorithm>
#include <stdexcept>

namespace adsec {

namespace {

std::string at(int s, int t) { return "(n=" + std::to_string(t - s) + ", s=" + std::to_string(s) + ")"; }

// nonzero coefficients of x (degree t, any layout) as a sparse row
Row row_terms(const FreeModule& fm, int t, const FVector& x)
{
    Row out;
    if (t < 0 || x.is_zero())
        return out;
    const std::size_t n = fm.gens_through(t);
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t o = fm.offset(t, j);
        if (o >= x.size())
            break;
        MilnorElt c = fm.coeff(t, x, j);
        if (!c.is_zero())
            out.emplace_back(j, std::move(c));
    }
    return out;
}

void accumulate(std::map<std::size_t, B0Accumulator>& acc, const FreeModule& fm, int t, std::size_t q,
                const MilnorElt& a, const MilnorElt& b, int sign)
{
    auto it = acc.find(q);
    if (it == acc.end())
        it = acc.emplace(q, B0Accumulator(t - fm.degree(q))).first;
    it->second.add_sigma_product(a, b, sign);
}

KerPiRow to_row(const std::map<std::size_t, B0Accumulator>& acc, const char* what)
{
    KerPiRow out;
    for (const auto& [q, a] : acc) {
        if (a.is_zero())
            continue;
        BZeroElt b = a.get();
        if (!b.in_ker_pi())
            throw std::logic_error(std::string(what) + " is not in ker pi");
        out.emplace_back(q, KerPiElt::from(b));
    }
    return out;
}

void add_a_terms(const FreeModule& fm, int t, FVector& out, const MilnorElt& a, const KerPiRow& row)
{
    for (const auto& [q, k] : row) {
        MilnorElt v = a_function(a, k);
        if (!v.is_zero())
            fm.add_coeff(t, out, q, v);
    }
}

void safe_left_multiply(const FreeModule& fm, const MilnorElt& a, int t, const FVector& x, FVector& out)
{
    if (t < 0 || x.size() == 0 || x.is_zero())
        return;
    fm.left_multiply(a, t, x, out);
}

// Split off the slots of generators of degree t (which no differential can
// hit) and return them; x is truncated to the lower layout.
FVector split_top(const FreeModule& fm, int t, FVector& x)
{
    const std::size_t lo = fm.dim_below(t);
    FVector top = x.slice(lo, x.size());
    x.resize(lo);
    return top;
}

// the Sq() slots of the generators of degree t, as an Ext cochain
FVector bottom_cells(const FreeModule& fm, int t, const FVector& x, std::size_t n)
{
    const std::size_t lo = fm.dim_below(t);
    return x.slice(lo, lo + n);
}

bool parity(const FVector& a, const FVector& b)
{
    FVector c = a;
    c.and_with(b);
    bool v = false;
    for (std::size_t i = c.first_set(); i != FVector::npos; i = c.next_set(i + 1))
        v = !v;
    return v;
}

int popcount(const FVector& a, const FVector& b)
{
    FVector c = a;
    c.and_with(b);
    int v = 0;
    for (std::size_t i = c.first_set(); i != FVector::npos; i = c.next_set(i + 1))
        ++v;
    return v;
}

std::size_t index_in(const Resolution& r, int s, int t, std::size_t j) { return j - r.first_gen(s, t); }

}  // namespace

// ------------------------------------------------------------------ ChainMap

ChainMap::ChainMap(const Resolution& p, const Resolution& q, const ExtClass& a) : p_(p), q_(q), a_(a)
{
    if (a.vector.size() != p.num_gens(a.s, a.t()))
        throw std::invalid_argument("chain map: class vector has the wrong length");
}

bool ChainMap::has(int s, std::size_t j) const
{
    return s >= 0 && s < static_cast<int>(f_.size()) && f_[static_cast<std::size_t>(s)].count(j);
}

const FVector& ChainMap::value(int s, std::size_t j) const
{
    if (!has(s, j))
        throw std::out_of_range("chain map not lifted to generator " + std::to_string(j) + " of stage " +
                                std::to_string(s));
    return f_[static_cast<std::size_t>(s)].at(j);
}

const Row& ChainMap::terms(int s, std::size_t j) const
{
    if (!has(s, j))
        throw std::out_of_range("chain map not lifted to generator " + std::to_string(j) + " of stage " +
                                std::to_string(s));
    return terms_[static_cast<std::size_t>(s)].at(j);
}

FVector ChainMap::apply(int s, int t, const FVector& x) const
{
    const int u = t - shift_t();
    const FreeModule& tgt = q_.free(s - shift_s());
    FVector out(u >= 0 ? tgt.dim(u) : 0);
    if (u < 0)
        return out;
    for (const auto& [p, c] : row_terms(p_.free(s), t, x))
        safe_left_multiply(tgt, c, p_.free(s).degree(p) - shift_t(), value(s, p), out);
    return out;
}

FVector ChainMap::lift_one(int s, std::size_t j) const
{
    const int k = s - shift_s();
    const int u = p_.free(s).degree(j) - shift_t();
    if (u < 0)
        return FVector(0);
    const FreeModule& tgt = q_.free(k);
    FVector out(tgt.dim(u));
    if (k == 0) {
        if (u == 0 && a_.vector.get(index_in(p_, s, shift_t(), j)))
            out.set(0);
        return out;
    }
    if (out.size() == 0)
        return out;
    const FreeModule& below = q_.free(k - 1);
    FVector rhs(below.dim_below(u));
    for (const auto& [gi, alpha] : p_.d_terms(s, j))
        safe_left_multiply(below, alpha, p_.free(s - 1).degree(gi) - shift_t(), value(s - 1, gi), rhs);
    if (rhs.is_zero())
        return out;
    if (!q_.has_solver(k, u))
        throw std::out_of_range("target resolution not computed at " + at(k, u));
    auto x = q_.solver(k, u).solve(rhs);
    if (!x)
        throw std::logic_error("chain map lift failed at " + at(s, p_.free(s).degree(j)));
    return std::move(*x);
}

void ChainMap::extend(int max_stem)
{
    max_stem = std::min(max_stem, p_.max_n());
    const int s1 = shift_s();
    const int smax = std::min(p_.max_s(), s1 + q_.max_s());
    if (static_cast<int>(f_.size()) <= smax) {
        f_.resize(static_cast<std::size_t>(smax + 1));
        terms_.resize(static_cast<std::size_t>(smax + 1));
    }
    for (int s = s1; s <= smax; ++s) {
        const int k = s - s1;
        for (int t = s + p_.min_stem(); t - s <= max_stem; ++t) {
            if (!p_.computed(s, t))
                continue;
            const std::size_t n = p_.num_gens(s, t), first = p_.first_gen(s, t);
            if (n == 0 || f_[static_cast<std::size_t>(s)].count(first))
                continue;
            std::vector<FVector> vals(n);
            parallel_for(n, [&](std::size_t i) { vals[i] = lift_one(s, first + i); });
            for (std::size_t i = 0; i < n; ++i) {
                terms_[static_cast<std::size_t>(s)][first + i] = row_terms(q_.free(k), t - shift_t(), vals[i]);
                f_[static_cast<std::size_t>(s)][first + i] = std::move(vals[i]);
            }
        }
    }
    max_stem_ = std::max(max_stem_, max_stem);
}

bool yoneda_defined(const ChainMap& m, int n, int s)
{
    const int ss = s + m.shift_s(), tt = n + s + m.shift_t();
    return tt - ss <= m.max_stem() && m.source().computed(ss, tt) && m.target().computed(s, n + s);
}

std::vector<int> evaluate_count(const ChainMap& m, const ExtClass& x)
{
    const int ss = x.s + m.shift_s(), tt = x.t() + m.shift_t();
    const Resolution& p = m.source();
    const std::size_t n = p.num_gens(ss, tt), first = p.first_gen(ss, tt);
    std::vector<int> out(n, 0);
    if (x.vector.is_zero())
        return out;
    for (std::size_t i = 0; i < n; ++i)
        out[i] = popcount(bottom_cells(m.target().free(x.s), x.t(), m.value(ss, first + i), x.vector.size()),
                          x.vector);
    return out;
}

ExtClass yoneda(const ChainMap& m, const ExtClass& x)
{
    auto c = evaluate_count(m, x);
    ExtClass out{x.n + m.shift_t() - m.shift_s(), x.s + m.shift_s(), FVector(c.size())};
    for (std::size_t i = 0; i < c.size(); ++i)
        out.vector.set(i, c[i] & 1);
    return out;
}

KerPiRow chain_defect(const ChainMap& m, int s, std::size_t j)
{
    const Resolution& p = m.source();
    const Resolution& q = m.target();
    const int k = s - m.shift_s();
    const int u = p.free(s).degree(j) - m.shift_t();
    if (k < 1 || u < 0)
        return {};
    const FreeModule& tgt = q.free(k - 1);
    std::map<std::size_t, B0Accumulator> acc;
    for (const auto& [gi, alpha] : p.d_terms(s, j))
        for (const auto& [r, beta] : m.terms(s - 1, gi))
            accumulate(acc, tgt, u, r, alpha, beta, 1);
    for (const auto& [qj, beta] : m.terms(s, j))
        for (const auto& [r, gamma] : q.d_terms(k, qj))
            accumulate(acc, tgt, u, r, beta, gamma, -1);
    return to_row(acc, "chain map defect");
}

// --------------------------------------------------------- SecondaryChainMap

SecondaryChainMap::SecondaryChainMap(const SecondaryResolution& p, const SecondaryResolution& q,
                                     const SecondaryValue& a)
    : p_(p), q_(q), a_(a), map_(p.resolution(), q.resolution(), a.e)
{
    if (!a.f.vector.is_zero())
        tau_map_ = std::make_unique<ChainMap>(p.resolution(), q.resolution(), a.f);
}

bool SecondaryChainMap::has_h_tau(int s, std::size_t j) const
{
    return s >= 0 && s < static_cast<int>(h_.size()) && h_[static_cast<std::size_t>(s)].count(j);
}

const FVector& SecondaryChainMap::h_tau(int s, std::size_t j) const
{
    if (!has_h_tau(s, j))
        throw std::out_of_range("secondary chain map not lifted to generator " + std::to_string(j) + " of stage " +
                                std::to_string(s));
    return h_[static_cast<std::size_t>(s)].at(j);
}

const KerPiRow& SecondaryChainMap::defect(int s, std::size_t j) const
{
    if (s < 0 || s >= static_cast<int>(defect_.size()) || !defect_[static_cast<std::size_t>(s)].count(j))
        throw std::out_of_range("chain map defect not computed");
    return defect_[static_cast<std::size_t>(s)].at(j);
}

FVector SecondaryChainMap::h_tau_rhs(int s, std::size_t j) const
{
    const Resolution& p = p_.resolution();
    const Resolution& q = q_.resolution();
    const int k = s - map_.shift_s();
    const int dg = p.free(s).degree(j);
    const int u = dg - map_.shift_t() - 1;
    const FreeModule& tgt = q.free(k - 2);
    FVector rhs(u >= 0 ? tgt.dim(u) : 0);
    if (u < 0)
        return rhs;
    // f(h_tau(g))
    rhs.add(map_.apply(s - 2, dg - 1, p_.h_tau(s, j)));
    // h_tau and A-terms on f(g)
    for (const auto& [qj, beta] : map_.terms(s, j)) {
        const int dq = q.free(k).degree(qj);
        safe_left_multiply(tgt, beta, dq - 1, q_.h_tau(k, qj), rhs);
        add_a_terms(tgt, u, rhs, beta, q_.composite(k, qj));
    }
    // H_tau and A-terms on d(g)
    for (const auto& [gi, alpha] : p.d_terms(s, j)) {
        if (k - 1 >= 2)
            safe_left_multiply(tgt, alpha, p.free(s - 1).degree(gi) - map_.shift_t() - 1, h_tau(s - 1, gi), rhs);
        add_a_terms(tgt, u, rhs, alpha, defect(s - 1, gi));
    }
    return rhs;
}

void SecondaryChainMap::extend(int max_stem)
{
    const Resolution& p = p_.resolution();
    const Resolution& q = q_.resolution();
    max_stem = std::min(max_stem, p_.max_n() - 1);
    map_.extend(max_stem + 1);
    if (tau_map_)
        tau_map_->extend(max_stem + 1);
    const int s1 = map_.shift_s();
    const int smax = std::min(p.max_s(), s1 + q.max_s());
    if (static_cast<int>(h_.size()) <= smax) {
        h_.resize(static_cast<std::size_t>(smax + 1));
        defect_.resize(static_cast<std::size_t>(smax + 1));
    }
    for (int s = s1 + 1; s <= smax; ++s) {
        const int k = s - s1;
        for (int t = s + p.min_stem(); t - s <= max_stem; ++t) {
            if (!p.computed(s, t))
                continue;
            const std::size_t n = p.num_gens(s, t), first = p.first_gen(s, t);
            if (n == 0 || defect_[static_cast<std::size_t>(s)].count(first))
                continue;
            const int u = t - map_.shift_t() - 1;
            std::vector<KerPiRow> defs(n);
            std::vector<FVector> rhs(n);
            parallel_for(n, [&](std::size_t i) {
                defs[i] = chain_defect(map_, s, first + i);
                if (k >= 2)
                    rhs[i] = h_tau_rhs(s, first + i);
            });
            for (std::size_t i = 0; i < n; ++i)
                defect_[static_cast<std::size_t>(s)][first + i] = std::move(defs[i]);
            for (std::size_t i = 0; i < n; ++i) {
                FVector h(u >= 0 ? q.free(k - 1).dim(u) : 0);
                if (k >= 2 && u >= 0) {
                    FVector top = split_top(q.free(k - 2), u, rhs[i]);
                    if (!top.is_zero()) {
                        if (k == 2)
                            throw std::domain_error("class does not survive to E3: d2 is nonzero at " +
                                                    at(s, t));
                        throw std::logic_error("secondary chain map: degree-0 obstruction at " + at(s, t));
                    }
                    if (!rhs[i].is_zero()) {
                        if (!q.has_solver(k - 1, u))
                            throw std::out_of_range("target resolution not computed at " + at(k - 1, u));
                        auto x = q.solver(k - 1, u).solve(rhs[i]);
                        if (!x)
                            throw std::logic_error("secondary chain map: H_tau equation unsolvable at " + at(s, t));
                        h = std::move(*x);
                    }
                }
                h_[static_cast<std::size_t>(s)][first + i] = std::move(h);
            }
        }
    }
    max_stem_ = std::max(max_stem_, max_stem);
}

bool product_defined(const SecondaryChainMap& m, int n, int s)
{
    const Resolution& p = m.source().resolution();
    const int ss = s + m.map().shift_s(), nn = n + m.map().shift_t() - m.map().shift_s();
    return nn <= m.max_stem() && ss + 1 <= p.max_s() && p.computed(ss + 1, nn + ss + 1) &&
           m.target().resolution().computed(s + 1, n + s + 1);
}

ProductReadout product_readout(const SecondaryChainMap& m, const SecondaryValue& x)
{
    const Resolution& p = m.source().resolution();
    const Resolution& q = m.target().resolution();
    const ChainMap& f = m.map();
    const int ss = x.e.s + f.shift_s(), tt = x.e.t() + f.shift_t();
    const int nn = tt - ss;
    if (!product_defined(m, x.e.n, x.e.s))
        throw std::out_of_range("product not computed at " + at(ss, tt));
    ProductReadout out{ExtClass{nn, ss, FVector(p.num_gens(ss, tt))}, ExtClass{nn, ss, FVector(p.num_gens(ss, tt))},
                       ExtClass{nn, ss + 1, FVector(p.num_gens(ss + 1, tt + 1))}};
    auto c = evaluate_count(f, x.e);
    for (std::size_t i = 0; i < c.size(); ++i) {
        out.e.vector.set(i, c[i] & 1);
        out.w.vector.set(i, (c[i] >> 1) & 1);
    }
    const std::size_t first = p.first_gen(ss + 1, tt + 1);
    for (std::size_t i = 0; i < out.tau.vector.size(); ++i)
        if (parity(bottom_cells(q.free(x.e.s), x.e.t(), m.h_tau(ss + 1, first + i), x.e.vector.size()),
                   x.e.vector))
            out.tau.vector.flip(i);
    out.tau.vector.add(yoneda(f, x.f).vector);
    if (m.tau_map_)
        out.tau.vector.add(yoneda(*m.tau_map_, x.e).vector);
    return out;
}

SecondaryValue product_untwisted(const SecondaryChainMap& m, const SecondaryValue& x)
{
    const Resolution& p = m.source().resolution();
    ProductReadout r = product_readout(m, x);
    SecondaryValue v{r.e, r.tau};
    v.f.vector.add(h_product(p, 0, r.w).vector);
    return v;
}

SecondaryValue product(const SecondaryChainMap& m, const SecondaryValue& x)
{
    SecondaryValue v = product_untwisted(m, x);
    if ((m.map().shift_s() * x.e.t()) % 2 != 0)
        v = twist(m.source().resolution(), v);
    return v;
}

// -------------------------------------------------------------- MasseyContext

MasseyContext::MasseyContext(const SecondaryResolution& res, SecondaryChainMap& a, SecondaryChainMap& b)
    : res_(res), a_(a), b_(b)
{
    if (!a.multiplier().f.vector.is_zero() || !b.multiplier().f.vector.is_zero())
        throw std::invalid_argument("Massey products take standard lifts [a], [b] (zero tau part)");
    s0_ = a.map().shift_s() + b.map().shift_s();
    t0_ = a.map().shift_t() + b.map().shift_t();
    if (s0_ < 1)
        throw std::invalid_argument("Massey products need classes of positive filtration");
    const Resolution& r = res_.resolution();
    const int n0 = t0_ - s0_;
    if (n0 + 1 > res_.max_n() - 1 || s0_ + 1 > r.max_s())
        throw std::out_of_range("Massey product: composite outside the computed range");

    // mod tau the composite must vanish
    a_.extend(n0);
    if (!yoneda(a_.map(), b.multiplier().e).vector.is_zero())
        throw std::domain_error("b o a is not null mod tau");

    // run with z = 0 through stage s0 + 1 to read off the degree-0 obstruction
    z_ = ExtClass{n0 + 1, s0_ - 1, FVector(r.num_gens(s0_ - 1, t0_))};
    collect_ = true;
    r0_ = FVector(r.num_gens(s0_ + 1, t0_ + 1));
    extend_to(n0, s0_ + 1);
    collect_ = false;
    auto z = res_.d2_preimage(n0 + 1, s0_ - 1, ExtClass{n0, s0_ + 1, r0_});
    if (!z)
        throw std::domain_error("b o a is not null: its tau part is not hit by d2");
    z_ = std::move(*z);
    reset();
}

void MasseyContext::reset()
{
    hat_.clear();
    err_.clear();
    eta_.clear();
    max_stem_ = -1;
}

const FVector& MasseyContext::homotopy(int s, std::size_t j) const
{
    if (s < 0 || s >= static_cast<int>(hat_.size()) || !hat_[static_cast<std::size_t>(s)].count(j))
        throw std::out_of_range("null-homotopy not computed");
    return hat_[static_cast<std::size_t>(s)].at(j);
}

const FVector& MasseyContext::eta(int s, std::size_t j) const
{
    if (s < 0 || s >= static_cast<int>(eta_.size()) || !eta_[static_cast<std::size_t>(s)].count(j))
        throw std::out_of_range("null-homotopy tau part not computed");
    return eta_[static_cast<std::size_t>(s)].at(j);
}

FVector MasseyContext::composite_value(int s, std::size_t j) const
{
    const int k = s - s0_;
    const int tg = res_.resolution().free(s).degree(j);
    return b_.map().apply(b_.map().shift_s() + k, tg - a_.map().shift_t(), a_.map().value(s, j));
}

FVector MasseyContext::apply_homotopy(int s, int t, const FVector& x) const
{
    const Resolution& r = res_.resolution();
    const FreeModule& tgt = r.free(s - s0_ + 1);
    const int u = t - t0_;
    FVector out(u >= 0 ? tgt.dim(u) : 0);
    if (u < 0)
        return out;
    for (const auto& [p, c] : row_terms(r.free(s), t, x))
        safe_left_multiply(tgt, c, r.free(s).degree(p) - t0_, homotopy(s, p), out);
    return out;
}

KerPiRow MasseyContext::error_row(int s, std::size_t j) const
{
    const Resolution& r = res_.resolution();
    const int k = s - s0_;
    const int u = r.free(s).degree(j) - t0_;
    if (u < 0)
        return {};
    const FreeModule& tgt = r.free(k);
    std::map<std::size_t, B0Accumulator> acc;
    for (const auto& [rj, gamma] : row_terms(r.free(k + 1), u, homotopy(s, j)))
        for (const auto& [rr, eps] : r.d_terms(k + 1, rj))
            accumulate(acc, tgt, u, rr, gamma, eps, 1);
    for (const auto& [gi, alpha] : r.d_terms(s, j)) {
        const int ui = r.free(s - 1).degree(gi) - t0_;
        for (const auto& [rr, gamma] : row_terms(tgt, ui, homotopy(s - 1, gi)))
            accumulate(acc, tgt, u, rr, alpha, gamma, 1);
    }
    const int sb = b_.map().shift_s() + k;
    for (const auto& [q, beta] : a_.map().terms(s, j))
        for (const auto& [rr, delta] : b_.map().terms(sb, q))
            accumulate(acc, tgt, u, rr, beta, delta, -1);
    return to_row(acc, "null-homotopy error");
}

FVector MasseyContext::composite_tau(int s, std::size_t j) const
{
    const Resolution& r = res_.resolution();
    const int k = s - s0_;
    const int tg = r.free(s).degree(j);
    const int u = tg - t0_ - 1;
    const FreeModule& tgt = r.free(k - 1);
    FVector out(u >= 0 ? tgt.dim(u) : 0);
    if (u < 0)
        return out;
    const int sb = b_.map().shift_s() + k;
    const int tb = b_.map().shift_t();
    for (const auto& [q, beta] : a_.map().terms(s, j)) {
        safe_left_multiply(tgt, beta, r.free(sb).degree(q) - tb - 1, b_.h_tau(sb, q), out);
        add_a_terms(tgt, u, out, beta, b_.defect(sb, q));
    }
    out.add(b_.map().apply(sb - 1, tg - a_.map().shift_t() - 1, a_.h_tau(s, j)));
    return out;
}

FVector MasseyContext::eta_rhs(int s, std::size_t j) const
{
    const Resolution& r = res_.resolution();
    const int k = s - s0_;
    const int tg = r.free(s).degree(j);
    const int u = tg - t0_ - 1;
    const FreeModule& tgt = r.free(k - 1);
    FVector rhs(u >= 0 ? tgt.dim(u) : 0);
    if (u < 0)
        return rhs;
    for (const auto& [gi, alpha] : r.d_terms(s, j)) {
        if (k - 1 >= 1)
            safe_left_multiply(tgt, alpha, r.free(s - 1).degree(gi) - t0_ - 1, eta(s - 1, gi), rhs);
        add_a_terms(tgt, u, rhs, alpha, err_[static_cast<std::size_t>(s - 1)].at(gi));
    }
    for (const auto& [rj, gamma] : row_terms(r.free(k + 1), u + 1, homotopy(s, j))) {
        safe_left_multiply(tgt, gamma, r.free(k + 1).degree(rj) - 1, res_.h_tau(k + 1, rj), rhs);
        add_a_terms(tgt, u, rhs, gamma, res_.composite(k + 1, rj));
    }
    rhs.add(apply_homotopy(s - 2, tg - 1, res_.h_tau(s, j)));
    rhs.add(composite_tau(s, j));
    return rhs;
}

void MasseyContext::compute_stage(int s, int max_stem)
{
    const Resolution& r = res_.resolution();
    const int k = s - s0_;
    for (int t = s + r.min_stem(); t - s <= max_stem + 1; ++t) {
        if (!r.computed(s, t))
            continue;
        const std::size_t n = r.num_gens(s, t), first = r.first_gen(s, t);
        if (n == 0)
            continue;
        const int u = t - t0_;
        auto& hat = hat_[static_cast<std::size_t>(s)];
        if (!hat.count(first)) {
            for (std::size_t i = 0; i < n; ++i) {
                FVector h(u >= 0 ? r.free(k + 1).dim(u) : 0);
                if (k == -1) {
                    if (u == 0 && z_.vector.get(i))
                        h.set(0);
                } else if (u >= 0) {
                    FVector rhs = composite_value(s, first + i);
                    for (const auto& [gi, alpha] : r.d_terms(s, first + i))
                        safe_left_multiply(r.free(k), alpha, r.free(s - 1).degree(gi) - t0_, homotopy(s - 1, gi),
                                           rhs);
                    if (!split_top(r.free(k), u, rhs).is_zero())
                        throw std::domain_error("b o a is not null mod tau at " + at(s, t));
                    if (!rhs.is_zero()) {
                        if (!r.has_solver(k + 1, u))
                            throw std::out_of_range("resolution not computed at " + at(k + 1, u));
                        auto x = r.solver(k + 1, u).solve(rhs);
                        if (!x)
                            throw std::logic_error("null-homotopy equation unsolvable at " + at(s, t));
                        h = std::move(*x);
                    }
                }
                hat[first + i] = std::move(h);
            }
        }
        if (k >= 0 && !err_[static_cast<std::size_t>(s)].count(first)) {
            std::vector<KerPiRow> rows(n);
            parallel_for(n, [&](std::size_t i) { rows[i] = error_row(s, first + i); });
            for (std::size_t i = 0; i < n; ++i)
                err_[static_cast<std::size_t>(s)][first + i] = std::move(rows[i]);
        }
        if (k >= 1 && t - s <= max_stem && !eta_[static_cast<std::size_t>(s)].count(first)) {
            std::vector<FVector> rhs(n);
            parallel_for(n, [&](std::size_t i) { rhs[i] = eta_rhs(s, first + i); });
            for (std::size_t i = 0; i < n; ++i) {
                FVector e(u - 1 >= 0 ? r.free(k).dim(u - 1) : 0);
                if (u - 1 >= 0) {
                    FVector top = split_top(r.free(k - 1), u - 1, rhs[i]);
                    if (!top.is_zero()) {
                        if (collect_ && k == 1 && u - 1 == 0)
                            r0_.set(i, top.get(0));
                        else
                            throw std::logic_error("secondary null-homotopy: degree-0 obstruction at " + at(s, t));
                    }
                    if (!rhs[i].is_zero()) {
                        if (!r.has_solver(k, u - 1))
                            throw std::out_of_range("resolution not computed at " + at(k, u - 1));
                        auto x = r.solver(k, u - 1).solve(rhs[i]);
                        if (!x)
                            throw std::logic_error("eta equation unsolvable at " + at(s, t));
                        e = std::move(*x);
                    }
                }
                eta_[static_cast<std::size_t>(s)][first + i] = std::move(e);
            }
        }
    }
}

void MasseyContext::extend_to(int max_stem, int max_stage)
{
    const Resolution& r = res_.resolution();
    max_stem = std::min(max_stem, res_.max_n() - 1);
    a_.extend(max_stem + 1);
    b_.extend(max_stem + 1 - (a_.map().shift_t() - a_.map().shift_s()));
    const int smax = std::min({max_stage, r.max_s(), s0_ - 1 + r.max_s()});
    if (static_cast<int>(hat_.size()) <= smax) {
        hat_.resize(static_cast<std::size_t>(smax + 1));
        err_.resize(static_cast<std::size_t>(smax + 1));
        eta_.resize(static_cast<std::size_t>(smax + 1));
    }
    for (int s = s0_ - 1; s <= smax; ++s)
        compute_stage(s, max_stem);
    max_stem_ = std::max(max_stem_, max_stem);
}

void MasseyContext::extend(int max_stem) { extend_to(max_stem, res_.resolution().max_s()); }

bool MasseyContext::defined(int n, int s) const
{
    const Resolution& r = res_.resolution();
    const int n0 = t0_ - s0_;
    const int m = s0_ + s - 1;
    return n0 + n + 1 <= max_stem_ && m + 1 <= r.max_s() && r.computed(s, n + s) &&
           product_defined(b_, n, s) && n + (b_.map().shift_t() - b_.map().shift_s()) + 1 <= res_.max_n();
}

std::optional<SecondaryValue> MasseyContext::massey(const ExtClass& c) const
{
    const Resolution& r = res_.resolution();
    if (!defined(c.n, c.s))
        throw std::out_of_range("Massey product not computed for a class at " + at(c.s, c.t()));
    const ChainMap& fa = a_.map();
    const int sb = b_.map().shift_s(), tb = b_.map().shift_t();

    // null-homotopy y of c o b
    ProductReadout pr = product_readout(b_, SecondaryValue::lift(r, c));
    if (!pr.e.vector.is_zero())
        return std::nullopt;
    ExtClass target = pr.tau;
    target.vector.add(h_product(r, 0, pr.w).vector);
    auto y = res_.d2_preimage(c.n + tb - sb + 1, c.s + sb - 1, target);
    if (!y)
        return std::nullopt;

    const int m = s0_ + c.s - 1, t = t0_ + c.t();
    SecondaryValue out = SecondaryValue::zero(r, t - m, m);
    const std::size_t first_e = r.first_gen(m, t), first_f = r.first_gen(m + 1, t + 1);
    auto v2 = evaluate_count(fa, *y);
    ExtClass u{t - m, m, FVector(out.e.vector.size())};
    for (std::size_t i = 0; i < out.e.vector.size(); ++i) {
        const int v1 = popcount(bottom_cells(r.free(c.s), c.t(), homotopy(m, first_e + i), c.vector.size()), c.vector);
        const int v = ((v1 - v2[i]) % 4 + 4) % 4;
        out.e.vector.set(i, v & 1);
        u.vector.set(i, (v >> 1) & 1);
    }
    const int tq = c.t() + tb;  // degree of w and y's targets
    const std::size_t sq1 = MilnorAlgebra::instance().index(Profile{1});
    for (std::size_t i = 0; i < out.f.vector.size(); ++i) {
        bool v = parity(bottom_cells(r.free(c.s), c.t(), eta(m + 1, first_f + i), c.vector.size()), c.vector);
        // tau part of the null-homotopy of c o b, composed with a
        const FreeModule& qf = r.free(c.s + sb);
        for (const auto& [q, beta] : fa.terms(m + 1, first_f + i))
            if (qf.degree(q) == tq && beta.degree == 1 && beta.coeffs.get(sq1) &&
                pr.w.vector.get(index_in(r, c.s + sb, tq, q)))
                v = !v;
        if (parity(bottom_cells(r.free(c.s + sb - 1), tq, a_.h_tau(m + 1, first_f + i), y->vector.size()),
                   y->vector))
            v = !v;
        out.f.vector.set(i, v);
    }
    out.f.vector.add(h_product(r, 0, u).vector);
    return out;
}

}  // namespace adsec

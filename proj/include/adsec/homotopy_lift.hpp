#pragma once
// Chain maps lifting Ext classes (Yoneda products), their secondary
// refinements (products in pi_{*,*} C tau^2) and secondary null-homotopies
// (Massey products).
//
// All maps go from the resolution P of the source module to the resolution Q
// of the sphere. A class a at (s', t') gives f: P^(s'+k) -> Q^(k) lowering the
// internal degree by t'.

#include "adsec/secondary_lift.hpp"

#include <map>
#include <memory>
#include <optional>
#include <vector>

namespace adsec {

using Row = std::vector<std::pair<std::size_t, MilnorElt>>;

// Ordinary (mod tau) lift of a cocycle to a chain map.
class ChainMap {
public:
    ChainMap(const Resolution& p, const Resolution& q, const ExtClass& a);

    const ExtClass& cls() const { return a_; }
    int shift_s() const { return a_.s; }
    int shift_t() const { return a_.t(); }

    // Lift every generator of P at stem <= max_stem (within both ranges).
    void extend(int max_stem);
    int max_stem() const { return max_stem_; }

    bool has(int s, std::size_t j) const;
    // f(g) over the full layout of Q^(s - s') in degree deg g - t'
    const FVector& value(int s, std::size_t j) const;
    const Row& terms(int s, std::size_t j) const;

    // f(x) for x in P^(s) of degree t (full or lower layout)
    FVector apply(int s, int t, const FVector& x) const;

    const Resolution& source() const { return p_; }
    const Resolution& target() const { return q_; }

private:
    FVector lift_one(int s, std::size_t j) const;

    const Resolution& p_;
    const Resolution& q_;
    ExtClass a_;
    int max_stem_ = -1;
    std::vector<std::map<std::size_t, FVector>> f_;  // per s
    std::vector<std::map<std::size_t, Row>> terms_;
};

// Yoneda product x * a where x is a class of Q and m lifts a: the class at
// (x.s + s', x.t + t') of P
ExtClass yoneda(const ChainMap& m, const ExtClass& x);
bool yoneda_defined(const ChainMap& m, int n, int s);

// tau * sum of Sq() coefficients, as a Z/4 count per target generator
std::vector<int> evaluate_count(const ChainMap& m, const ExtClass& x);

// ---------------------------------------------------------------- secondary

// D = f0 d0 - d0 f0 applied to generator j of P^(s), a ker pi row over
// Q^(s - s' - 1)
KerPiRow chain_defect(const ChainMap& m, int s, std::size_t j);

// Readout pieces of x * [a] before the twist: Z/4 counts c = e + 2w and the
// remaining tau part F (without h0 w)
struct ProductReadout {
    ExtClass e, w, tau;
};

class SecondaryChainMap {
public:
    // p, q: secondary data of source and target; a.e survives d2
    SecondaryChainMap(const SecondaryResolution& p, const SecondaryResolution& q, const SecondaryValue& a);

    const SecondaryValue& multiplier() const { return a_; }
    const ChainMap& map() const { return map_; }

    void extend(int max_stem);
    int max_stem() const { return max_stem_; }

    bool has_h_tau(int s, std::size_t j) const;
    // tau part H_tau(g) over the full layout of Q^(s - s' - 1) in degree deg g - t' - 1
    const FVector& h_tau(int s, std::size_t j) const;
    const KerPiRow& defect(int s, std::size_t j) const;

    // right-hand side of the H_tau equation (full layout), for residual checks
    FVector h_tau_rhs(int s, std::size_t j) const;

    const SecondaryResolution& source() const { return p_; }
    const SecondaryResolution& target() const { return q_; }

private:
    const SecondaryResolution& p_;
    const SecondaryResolution& q_;
    SecondaryValue a_;
    ChainMap map_;
    std::unique_ptr<ChainMap> tau_map_;  // lifts a.f when nonzero
    int max_stem_ = -1;
    std::vector<std::map<std::size_t, FVector>> h_;
    std::vector<std::map<std::size_t, KerPiRow>> defect_;

    friend ProductReadout product_readout(const SecondaryChainMap& m, const SecondaryValue& x);
};

bool product_defined(const SecondaryChainMap& m, int n, int s);
// [a] * x with the (-1)^{s' t} twist applied (t = internal degree of x)
SecondaryValue product(const SecondaryChainMap& m, const SecondaryValue& x);
// the same without the twist
SecondaryValue product_untwisted(const SecondaryChainMap& m, const SecondaryValue& x);

ProductReadout product_readout(const SecondaryChainMap& m, const SecondaryValue& x);

// ---------------------------------------------------------------- Massey

// Secondary null-homotopy of the composite b o a (a: P -> Q, b: Q -> R, all
// resolutions of the sphere here), computing < -, [b], [a] >.
class MasseyContext {
public:
    // Throws std::domain_error when b o a is not null in C tau^2.
    MasseyContext(const SecondaryResolution& res, SecondaryChainMap& a, SecondaryChainMap& b);

    void extend(int max_stem);
    int max_stem() const { return max_stem_; }

    const ExtClass& correction() const { return z_; }  // the degree-0 correction class
    bool defined(int n, int s) const;                  // for c at (n, s)

    // <c, b, a> up to sign; nullopt when c o b is not null
    std::optional<SecondaryValue> massey(const ExtClass& c) const;

    // null-homotopy data, exposed for tests
    const FVector& homotopy(int s, std::size_t j) const;  // over R^(s - s0 + 1)
    const FVector& eta(int s, std::size_t j) const;       // tau part over R^(s - s0)
    FVector eta_rhs(int s, std::size_t j) const;
    int s0() const { return s0_; }
    int t0() const { return t0_; }

private:
    void reset();
    void extend_to(int max_stem, int max_stage);
    void compute_stage(int s, int max_stem);
    FVector composite_value(int s, std::size_t j) const;  // b(a(g)) over R^(s - s0)
    FVector composite_tau(int s, std::size_t j) const;    // tau part of b o a
    KerPiRow error_row(int s, std::size_t j) const;
    FVector apply_homotopy(int s, int t, const FVector& x) const;

    const SecondaryResolution& res_;
    SecondaryChainMap& a_;
    SecondaryChainMap& b_;
    int s0_, t0_;  // bidegree of the composite b o a
    ExtClass z_;
    bool collect_ = false;
    FVector r0_;  // degree-0 obstruction with z = 0
    int max_stem_ = -1;
    std::vector<std::map<std::size_t, FVector>> hat_;      // per s
    std::vector<std::map<std::size_t, KerPiRow>> err_;     // E(g)
    std::vector<std::map<std::size_t, FVector>> eta_;
};

}  // namespace adsec

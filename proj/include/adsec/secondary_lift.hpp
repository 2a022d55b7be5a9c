#pragma once
// Secondary chain complex on top of a minimal resolution: the ker-pi part of
// the null-homotopies (the composites d0 d0), their tau parts h_tau, and d2.

#include "adsec/resolution.hpp"
#include "adsec/secondary_algebra.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace adsec {

// Sparse row over the generators of some P^(s): (generator, coefficient)
using KerPiRow = std::vector<std::pair<std::size_t, KerPiElt>>;

// sigma(d) sigma(d) applied to generator j of P^(s), as a row over P^(s-2)
KerPiRow compute_composite(const Resolution& res, int s, std::size_t j);

// h_j * x for the filtration-one classes h_j (Yoneda product, read off the
// Sq(2^j) coefficients of the differential)
ExtClass h_product(const Resolution& res, int j, const ExtClass& x);

struct TimingRecord {
    int s = 0, t = 0;
    std::size_t index = 0;  // i in x_(t-s, s, i)
    double wall_us = 0, cpu_us = 0;
};

class SecondaryResolution {
public:
    explicit SecondaryResolution(const Resolution& res);

    const Resolution& resolution() const { return res_; }

    // Override h_tau on generator j of P^(2) (over the full layout of P^(0) in
    // degree deg j - 1). Must be called before compute().
    void set_h_tau_2(std::size_t j, FVector v);

    // Composites and h_tau for every generator at stem <= max_n - 1 within the
    // computed range of the resolution (default: its max_n).
    void compute(int max_n = -1);
    int max_n() const { return max_n_; }

    bool has_h_tau(int s, std::size_t j) const;
    // h_tau(g) over the full layout of P^(s-2) in degree deg g - 1
    const FVector& h_tau(int s, std::size_t j) const;
    const KerPiRow& composite(int s, std::size_t j) const;

    // Right-hand side of the lifting equation for generator j of P^(s), s >= 3
    // (lower layout of P^(s-3) in degree deg g - 1)
    FVector h_tau_rhs(int s, std::size_t j) const;

    bool d2_defined(int n, int s) const;
    ExtClass d2(const ExtClass& x) const;  // at (n - 1, s + 2)
    // rows: d2 of the basis classes at (n, s)
    FMatrix d2_matrix(int n, int s) const;
    // some x at (n, s) with d2(x) = y, if any
    std::optional<ExtClass> d2_preimage(int n, int s, const ExtClass& y) const;

    const std::vector<TimingRecord>& timings() const { return timings_; }
    void write_timing_log(const std::string& path) const;

private:
    const KerPiRow& composite_or_compute(int s, std::size_t j) const;

    const Resolution& res_;
    int max_n_ = -1;
    std::vector<std::map<std::size_t, FVector>> h_tau_;  // per s
    mutable std::vector<std::map<std::size_t, KerPiRow>> comp_;
    std::map<std::size_t, FVector> h2_override_;
    std::vector<TimingRecord> timings_;
};

// An element of pi_{*,*} C tau^2 in standard-lift coordinates: [e] + tau f.
struct SecondaryValue {
    ExtClass e;  // (n, s)
    ExtClass f;  // (n, s + 1)

    static SecondaryValue zero(const Resolution& res, int n, int s);
    static SecondaryValue lift(const Resolution& res, const ExtClass& e);  // [e]
    bool is_zero() const { return e.vector.is_zero() && f.vector.is_zero(); }
    bool operator==(const SecondaryValue& o) const { return e == o.e && f == o.f; }
};

// [x] + [y] = [x + y] + tau h0 (x AND y) in coordinates: e adds, f gets the carry
SecondaryValue lift_sum(const Resolution& res, const SecondaryValue& a, const SecondaryValue& b);
// (e, f) -> (e, f + h0 e): multiplication by -1
SecondaryValue twist(const Resolution& res, const SecondaryValue& v);

}  // namespace adsec

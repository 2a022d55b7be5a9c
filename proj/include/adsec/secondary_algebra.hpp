#pragma once
// B0 of the secondary Steenrod algebra: Z/4 combinations of Sq(R) plus
// F2 combinations of Y_{k,l} Sq(R) (k < l), and the A-function on ker pi.

#include "adsec/milnor.hpp"

#include <map>
#include <utility>

namespace adsec {

// |Y_{k,l}| = 2^k + 2^l - 1
inline int y_degree(int k, int l) { return (1 << k) + (1 << l) - 1; }

using YKey = std::pair<int, int>;
using YPart = std::map<YKey, FVector>;  // cofactor over milnor_basis(deg - |Y_{k,l}|)

struct BZeroElt {
    int degree = 0;
    std::vector<std::uint8_t> main;  // Z/4 coefficients over milnor_basis(degree)
    YPart y;

    static BZeroElt zero(int d);
    static BZeroElt sq(const Profile& r, int coef = 1);
    static BZeroElt y_term(int k, int l, const Profile& r = {});

    bool is_zero() const;
    bool in_ker_pi() const;  // all main coefficients even
    BZeroElt& operator+=(const BZeroElt& o);
    BZeroElt& operator-=(const BZeroElt& o);
    BZeroElt operator-() const;
    BZeroElt& scale(int c);  // multiply by an integer mod 4
    bool operator==(const BZeroElt& o) const;
    std::string to_string() const;

    void add_y(int k, int l, const FVector& cof);  // normalises k > l, drops zero
};

BZeroElt operator+(BZeroElt a, const BZeroElt& b);
BZeroElt operator-(BZeroElt a, const BZeroElt& b);

BZeroElt b0_product(const BZeroElt& a, const BZeroElt& b);
BZeroElt sigma_b(const MilnorElt& a);
MilnorElt reduce_pi(const BZeroElt& b);

// a * Y_{k,l}, with Y_{k,k} = 2 Sq(Delta_{k+1}) and Y_{k,l} = Y_{l,k}
BZeroElt act_on_y(const MilnorElt& a, int k, int l);

// Element of ker pi in split form: 2*half + sum Y_{k,l} c_{k,l}.
struct KerPiElt {
    int degree = 0;
    FVector half;  // over milnor_basis(degree)
    YPart y;

    static KerPiElt zero(int d);
    static KerPiElt from(const BZeroElt& b);  // throws outside ker pi
    BZeroElt to_b0() const;
    bool is_zero() const;
    KerPiElt& operator+=(const KerPiElt& o);
    bool operator==(const KerPiElt& o) const { return degree == o.degree && half == o.half && y == o.y; }
};

// The tau component A(a, r); result has degree |a| + |r| - 1.
MilnorElt a_function(const MilnorElt& a, const BZeroElt& r);
MilnorElt a_function(const MilnorElt& a, const KerPiElt& r);

// Z/4 accumulator for sums of products of sigma-lifts, the shape every
// composite sigma(d) sigma(d') takes.
class B0Accumulator {
public:
    explicit B0Accumulator(int degree);
    int degree() const { return degree_; }
    // += sigma(a) * sigma(b)
    void add_sigma_product(const MilnorElt& a, const MilnorElt& b);
    void add(const BZeroElt& x);
    void sub(const BZeroElt& x);
    // += sign * sigma(a) * sigma(b) with sign = +1 or -1
    void add_sigma_product(const MilnorElt& a, const MilnorElt& b, int sign);
    BZeroElt get() const;
    bool is_zero() const;

private:
    void add_lohi(const FVector& lo, const FVector& hi, bool negate);
    int degree_;
    FVector lo_, hi_;
    YPart y_;
};

// Y-part of sigma(a) sigma(b), added into y
void add_product_y_part(const MilnorElt& a, const MilnorElt& b, YPart& y);

}  // namespace adsec

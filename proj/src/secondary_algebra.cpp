#include "adsec/secondary_algebra.hpp"

#include <stdexcept>

namespace adsec {

namespace {

MilnorAlgebra& alg() { return MilnorAlgebra::instance(); }

std::size_t dim_of(int t) { return t < 0 ? 0 : alg().dim(t); }

// (lo, hi) += sign * (l2, h2) over Z/4, word by word
void z4_add(std::uint64_t* lo, std::uint64_t* hi, const std::uint64_t* l2, const std::uint64_t* h2, std::size_t nw,
            bool negate)
{
    for (std::size_t w = 0; w < nw; ++w) {
        const std::uint64_t a = l2[w];
        const std::uint64_t b = negate ? (h2[w] ^ a) : h2[w];
        const std::uint64_t carry = lo[w] & a;
        lo[w] ^= a;
        hi[w] ^= b ^ carry;
    }
}

void add_to_ypart(YPart& y, int k, int l, const MilnorElt& cof)
{
    if (cof.is_zero())
        return;
    if (k > l)
        std::swap(k, l);
    auto it = y.find({k, l});
    if (it == y.end()) {
        y.emplace(YKey{k, l}, cof.coeffs);
        return;
    }
    it->second.add(cof.coeffs);
    if (it->second.is_zero())
        y.erase(it);
}

void add_ypart(YPart& y, const YPart& o)
{
    for (const auto& [key, v] : o)
        add_to_ypart(y, key.first, key.second, MilnorElt(0, v));
}

MilnorElt half_of(const BZeroElt& b)
{
    MilnorElt h = MilnorElt::zero(b.degree);
    for (std::size_t i = 0; i < b.main.size(); ++i)
        if (b.main[i] & 2)
            h.coeffs.set(i);
    return h;
}

// x * c where x lies in ker pi
BZeroElt right_multiply_kerpi(const BZeroElt& x, const MilnorElt& c)
{
    BZeroElt out = BZeroElt::zero(x.degree + c.degree);
    MilnorElt h = milnor_product(half_of(x), c);
    for (std::size_t i = h.coeffs.first_set(); i != FVector::npos; i = h.coeffs.next_set(i + 1))
        out.main[i] = 2;
    for (const auto& [key, v] : x.y) {
        const int d = x.degree - y_degree(key.first, key.second);
        add_to_ypart(out.y, key.first, key.second, milnor_product(MilnorElt(d, v), c));
    }
    return out;
}

}  // namespace

// ------------------------------------------------------------------ BZeroElt

BZeroElt BZeroElt::zero(int d)
{
    BZeroElt b;
    b.degree = d;
    b.main.assign(dim_of(d), 0);
    return b;
}

BZeroElt BZeroElt::sq(const Profile& r, int coef)
{
    BZeroElt b = zero(profile_degree(r));
    b.main[alg().index(r)] = static_cast<std::uint8_t>(((coef % 4) + 4) % 4);
    return b;
}

BZeroElt BZeroElt::y_term(int k, int l, const Profile& r)
{
    if (k == l) {
        // Y_{k,k} = 2 Sq(Delta_{k+1})
        MilnorElt p = milnor_product(MilnorElt::basis_elt(delta(k + 1)), MilnorElt::basis_elt(r));
        BZeroElt b = zero(p.degree);
        for (std::size_t i = p.coeffs.first_set(); i != FVector::npos; i = p.coeffs.next_set(i + 1))
            b.main[i] = 2;
        return b;
    }
    BZeroElt b = zero(y_degree(k, l) + profile_degree(r));
    b.add_y(k, l, MilnorElt::basis_elt(r).coeffs);
    return b;
}

void BZeroElt::add_y(int k, int l, const FVector& cof)
{
    if (k == l)
        throw std::invalid_argument("add_y: Y_{k,k} is not a basis element");
    add_to_ypart(y, k, l, MilnorElt(0, cof));
}

bool BZeroElt::is_zero() const
{
    for (auto c : main)
        if (c)
            return false;
    return y.empty();
}

bool BZeroElt::in_ker_pi() const
{
    for (auto c : main)
        if (c & 1)
            return false;
    return true;
}

BZeroElt& BZeroElt::operator+=(const BZeroElt& o)
{
    if (degree != o.degree)
        throw std::invalid_argument("adding B0 elements of different degrees");
    for (std::size_t i = 0; i < main.size(); ++i)
        main[i] = static_cast<std::uint8_t>((main[i] + o.main[i]) & 3);
    add_ypart(y, o.y);
    return *this;
}

BZeroElt& BZeroElt::operator-=(const BZeroElt& o) { return *this += -o; }

BZeroElt BZeroElt::operator-() const
{
    BZeroElt r = *this;
    for (auto& c : r.main)
        c = static_cast<std::uint8_t>((4 - c) & 3);
    return r;
}

BZeroElt& BZeroElt::scale(int c)
{
    c = ((c % 4) + 4) % 4;
    for (auto& m : main)
        m = static_cast<std::uint8_t>((m * c) & 3);
    if (c % 2 == 0)
        y.clear();
    return *this;
}

bool BZeroElt::operator==(const BZeroElt& o) const
{
    return degree == o.degree && main == o.main && y == o.y;
}

std::string BZeroElt::to_string() const
{
    if (is_zero())
        return "0";
    std::string s;
    const auto& basis = milnor_basis(degree);
    for (std::size_t i = 0; i < main.size(); ++i) {
        if (!main[i])
            continue;
        if (!s.empty())
            s += " + ";
        if (main[i] != 1)
            s += std::to_string(main[i]) + " ";
        s += profile_to_string(basis[i]);
    }
    for (const auto& [key, v] : y) {
        const auto& b = milnor_basis(degree - y_degree(key.first, key.second));
        for (std::size_t i = v.first_set(); i != FVector::npos; i = v.next_set(i + 1)) {
            if (!s.empty())
                s += " + ";
            s += "Y_{" + std::to_string(key.first) + "," + std::to_string(key.second) + "}";
            if (!b[i].empty())
                s += " " + profile_to_string(b[i]);
        }
    }
    return s;
}

BZeroElt operator+(BZeroElt a, const BZeroElt& b)
{
    a += b;
    return a;
}

BZeroElt operator-(BZeroElt a, const BZeroElt& b)
{
    a -= b;
    return a;
}

BZeroElt sigma_b(const MilnorElt& a)
{
    BZeroElt b = BZeroElt::zero(a.degree);
    for (std::size_t i = a.coeffs.first_set(); i != FVector::npos; i = a.coeffs.next_set(i + 1))
        b.main[i] = 1;
    return b;
}

MilnorElt reduce_pi(const BZeroElt& b)
{
    MilnorElt r = MilnorElt::zero(b.degree);
    for (std::size_t i = 0; i < b.main.size(); ++i)
        if (b.main[i] & 1)
            r.coeffs.set(i);
    return r;
}

// ----------------------------------------------------------- products

void add_product_y_part(const MilnorElt& a, const MilnorElt& b, YPart& y)
{
    if (a.is_zero() || b.is_zero())
        return;
    // sum_k sum_{m<n} Y_{m+k,n+k} (xi_m^{2^k} xi_n^{2^k} -| a)(xi_{k+1} -| b)
    for (int k = 0; (1 << (k + 1)) - 1 <= b.degree; ++k) {
        MilnorElt right = contract(delta(k + 1), b);
        if (right.is_zero())
            continue;
        for (int n = 1; (1 << k) * ((1 << n) - 1) <= a.degree; ++n) {
            for (int m = 0; m < n; ++m) {
                const int xd = (1 << k) * ((1 << m) - 1 + (1 << n) - 1);
                if (xd > a.degree)
                    break;
                MilnorElt left = contract(xi_monomial(m, k, n, k), a);
                if (left.is_zero())
                    continue;
                add_to_ypart(y, m + k, n + k, milnor_product(left, right));
            }
        }
    }
}

BZeroElt act_on_y(const MilnorElt& a, int k, int l)
{
    if (k > l)
        std::swap(k, l);
    const int deg = a.degree + y_degree(k, l);
    BZeroElt out = BZeroElt::zero(deg);
    if (a.is_zero())
        return out;
    if (k == l) {
        MilnorElt p = milnor_product(a, MilnorElt::basis_elt(delta(k + 1)));
        for (std::size_t i = p.coeffs.first_set(); i != FVector::npos; i = p.coeffs.next_set(i + 1))
            out.main[i] = 2;
        return out;
    }
    for (int i = 0; (1 << k) * ((1 << i) - 1) <= a.degree; ++i) {
        for (int j = 0;; ++j) {
            const int xd = (1 << k) * ((1 << i) - 1) + (1 << l) * ((1 << j) - 1);
            if (xd > a.degree)
                break;
            MilnorElt c = contract(xi_monomial(i, k, j, l), a);
            if (c.is_zero())
                continue;
            const int p = k + i, q = l + j;
            if (p == q) {
                MilnorElt d = milnor_product(MilnorElt::basis_elt(delta(p + 1)), c);
                for (std::size_t t = d.coeffs.first_set(); t != FVector::npos; t = d.coeffs.next_set(t + 1))
                    out.main[t] = static_cast<std::uint8_t>((out.main[t] + 2) & 3);
            } else {
                add_to_ypart(out.y, p, q, c);
            }
        }
    }
    return out;
}

BZeroElt b0_product(const BZeroElt& x, const BZeroElt& y)
{
    const int deg = x.degree + y.degree;
    B0Accumulator acc(deg);
    const std::size_t nw = alg().words_for(deg);
    const std::size_t dt = alg().dim(deg);
    FVector lo(dt), hi(dt);
    for (std::size_t i = 0; i < x.main.size(); ++i) {
        if (!x.main[i])
            continue;
        for (std::size_t j = 0; j < y.main.size(); ++j) {
            if (!y.main[j])
                continue;
            const int c = (x.main[i] * y.main[j]) & 3;
            if (!c)
                continue;
            const std::uint64_t* pl = alg().product_words(x.degree, i, y.degree, j);
            const std::uint64_t* ph = alg().product_hi_words(x.degree, i, y.degree, j);
            if (c == 2) {
                // 2 * (lo + 2 hi) = 2 lo
                std::vector<std::uint64_t> zero(nw, 0);
                z4_add(lo.data(), hi.data(), zero.data(), pl, nw, false);
            } else {
                z4_add(lo.data(), hi.data(), pl, ph, nw, c == 3);
            }
        }
    }
    BZeroElt out = BZeroElt::zero(deg);
    for (std::size_t t = 0; t < dt; ++t)
        out.main[t] = static_cast<std::uint8_t>(lo.get(t) | (hi.get(t) << 1));

    const MilnorElt px = reduce_pi(x), py = reduce_pi(y);
    add_product_y_part(px, py, out.y);
    // pi(x) * Y_{kl} c
    for (const auto& [key, v] : y.y) {
        const int cd = y.degree - y_degree(key.first, key.second);
        out += right_multiply_kerpi(act_on_y(px, key.first, key.second), MilnorElt(cd, v));
    }
    // Y_{kl} c * pi(y); Y.Y = 0 and 2Y = 0
    for (const auto& [key, v] : x.y) {
        const int cd = x.degree - y_degree(key.first, key.second);
        add_to_ypart(out.y, key.first, key.second, milnor_product(MilnorElt(cd, v), py));
    }
    // 2h * (anything) only sees pi of the other factor, already in the main part
    return out;
}

// ----------------------------------------------------------- KerPiElt

KerPiElt KerPiElt::zero(int d)
{
    KerPiElt k;
    k.degree = d;
    k.half = FVector(dim_of(d));
    return k;
}

KerPiElt KerPiElt::from(const BZeroElt& b)
{
    if (!b.in_ker_pi())
        throw std::invalid_argument("element is not in the kernel of pi: " + b.to_string());
    KerPiElt k = zero(b.degree);
    for (std::size_t i = 0; i < b.main.size(); ++i)
        if (b.main[i] & 2)
            k.half.set(i);
    k.y = b.y;
    return k;
}

BZeroElt KerPiElt::to_b0() const
{
    BZeroElt b = BZeroElt::zero(degree);
    for (std::size_t i = half.first_set(); i != FVector::npos; i = half.next_set(i + 1))
        b.main[i] = 2;
    b.y = y;
    return b;
}

bool KerPiElt::is_zero() const { return half.is_zero() && y.empty(); }

KerPiElt& KerPiElt::operator+=(const KerPiElt& o)
{
    if (degree != o.degree)
        throw std::invalid_argument("adding ker pi elements of different degrees");
    half.add(o.half);
    add_ypart(y, o.y);
    return *this;
}

// ----------------------------------------------------------- A-function

namespace {

// L_a(k,l) = sum_{i,j : k+i >= l+j} Sq(Delta_{k+i} + Delta_{l+j}) (xi_i^{2^k} xi_j^{2^l} -| a)
MilnorElt l_function(const MilnorElt& a, int k, int l)
{
    const int deg = a.degree + y_degree(k, l) - 1;
    MilnorElt out = MilnorElt::zero(deg);
    for (int i = 0; (1 << k) * ((1 << i) - 1) <= a.degree; ++i) {
        for (int j = 0;; ++j) {
            const int xd = (1 << k) * ((1 << i) - 1) + (1 << l) * ((1 << j) - 1);
            if (xd > a.degree)
                break;
            const int p = k + i, q = l + j;
            if (p < q)
                continue;
            MilnorElt c = contract(xi_monomial(i, k, j, l), a);
            if (c.is_zero())
                continue;
            Profile z(static_cast<std::size_t>(p), 0);
            z[static_cast<std::size_t>(p - 1)] += 1;
            z[static_cast<std::size_t>(q - 1)] += 1;
            out += milnor_product(MilnorElt::basis_elt(z), c);
        }
    }
    return out;
}

}  // namespace

MilnorElt a_function(const MilnorElt& a, const KerPiElt& r)
{
    const int deg = a.degree + r.degree - 1;
    MilnorElt out = MilnorElt::zero(deg < 0 ? 0 : deg);
    if (a.is_zero() || a.degree == 0 || r.is_zero())
        return out;
    if (!r.half.is_zero()) {
        MilnorElt c = contract(delta(1), a);
        if (!c.is_zero())
            out += milnor_product(c, MilnorElt(r.degree, r.half));
    }
    for (const auto& [key, v] : r.y) {
        const int cd = r.degree - y_degree(key.first, key.second);
        MilnorElt lf = l_function(a, key.first, key.second);
        if (!lf.is_zero())
            out += milnor_product(lf, MilnorElt(cd, v));
    }
    return out;
}

MilnorElt a_function(const MilnorElt& a, const BZeroElt& r) { return a_function(a, KerPiElt::from(r)); }

// ----------------------------------------------------------- accumulator

B0Accumulator::B0Accumulator(int degree) : degree_(degree), lo_(dim_of(degree)), hi_(dim_of(degree)) {}

void B0Accumulator::add_lohi(const FVector& lo, const FVector& hi, bool negate)
{
    z4_add(lo_.data(), hi_.data(), lo.data(), hi.data(), lo_.num_words(), negate);
}

void B0Accumulator::add_sigma_product(const MilnorElt& a, const MilnorElt& b) { add_sigma_product(a, b, 1); }

void B0Accumulator::add_sigma_product(const MilnorElt& a, const MilnorElt& b, int sign)
{
    if (a.degree + b.degree != degree_)
        throw std::invalid_argument("B0Accumulator: degree mismatch");
    if (a.is_zero() || b.is_zero())
        return;
    const bool neg = sign < 0;
    const std::size_t nw = lo_.num_words();
    for (std::size_t i = a.coeffs.first_set(); i != FVector::npos; i = a.coeffs.next_set(i + 1))
        for (std::size_t j = b.coeffs.first_set(); j != FVector::npos; j = b.coeffs.next_set(j + 1))
            z4_add(lo_.data(), hi_.data(), alg().product_words(a.degree, i, b.degree, j),
                   alg().product_hi_words(a.degree, i, b.degree, j), nw, neg);
    add_product_y_part(a, b, y_);
}

void B0Accumulator::add(const BZeroElt& x)
{
    if (x.degree != degree_)
        throw std::invalid_argument("B0Accumulator: degree mismatch");
    FVector lo(lo_.size()), hi(hi_.size());
    for (std::size_t i = 0; i < x.main.size(); ++i) {
        if (x.main[i] & 1)
            lo.set(i);
        if (x.main[i] & 2)
            hi.set(i);
    }
    add_lohi(lo, hi, false);
    add_ypart(y_, x.y);
}

void B0Accumulator::sub(const BZeroElt& x) { add(-x); }

BZeroElt B0Accumulator::get() const
{
    BZeroElt out = BZeroElt::zero(degree_);
    for (std::size_t t = 0; t < out.main.size(); ++t)
        out.main[t] = static_cast<std::uint8_t>(lo_.get(t) | (hi_.get(t) << 1));
    out.y = y_;
    return out;
}

bool B0Accumulator::is_zero() const { return lo_.is_zero() && hi_.is_zero() && y_.empty(); }

}  // namespace adsec

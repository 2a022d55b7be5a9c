#include "adsec/milnor.hpp"

#include <algorithm>
#include <array>
#include <sstream>
#include <stdexcept>

namespace adsec {

int profile_degree(const Profile& r)
{
    int d = 0;
    for (std::size_t i = 0; i < r.size(); ++i)
        d += static_cast<int>(r[i]) * ((1 << (i + 1)) - 1);
    return d;
}

void trim(Profile& r)
{
    while (!r.empty() && r.back() == 0)
        r.pop_back();
}

std::string profile_to_string(const Profile& r)
{
    std::string s = "Sq(";
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (i)
            s += ',';
        s += std::to_string(r[i]);
    }
    return s + ")";
}

Profile parse_profile(const std::string& text)
{
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c)))
            s += c;
    if (s.size() < 4 || s.compare(0, 3, "Sq(") != 0 || s.back() != ')')
        throw std::invalid_argument("bad Milnor basis element '" + text + "'");
    Profile r;
    std::string body = s.substr(3, s.size() - 4);
    std::stringstream ss(body);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty() || !std::all_of(tok.begin(), tok.end(), ::isdigit))
            throw std::invalid_argument("bad Milnor basis element '" + text + "'");
        r.push_back(static_cast<std::uint32_t>(std::stoul(tok)));
    }
    trim(r);
    return r;
}

Profile delta(int k)
{
    Profile r(static_cast<std::size_t>(k), 0);
    r[static_cast<std::size_t>(k - 1)] = 1;
    return r;
}

Profile xi_monomial(int i, int k, int j, int l)
{
    Profile r(static_cast<std::size_t>(std::max(i, j)), 0);
    if (i > 0)
        r[static_cast<std::size_t>(i - 1)] += 1u << k;
    if (j > 0)
        r[static_cast<std::size_t>(j - 1)] += 1u << l;
    trim(r);
    return r;
}

namespace {

void gen_profiles(int pos, int rem, int maxpos, Profile& cur, std::vector<Profile>& out)
{
    if (pos > maxpos) {
        if (rem == 0) {
            Profile r = cur;
            trim(r);
            out.push_back(std::move(r));
        }
        return;
    }
    const int w = (1 << pos) - 1;
    for (int v = 0; v * w <= rem; ++v) {
        cur[static_cast<std::size_t>(pos - 1)] = static_cast<std::uint32_t>(v);
        gen_profiles(pos + 1, rem - v * w, maxpos, cur, out);
    }
    cur[static_cast<std::size_t>(pos - 1)] = 0;
}

std::uint64_t profile_key(const Profile& r)
{
    std::uint64_t k = 0;
    for (std::size_t i = 0; i < r.size(); ++i)
        k |= static_cast<std::uint64_t>(r[i]) << (8 * i);
    return k;
}

struct PascalMod4 {
    static constexpr unsigned N = 512;
    std::vector<std::uint8_t> t;
    PascalMod4() : t(N * N, 0)
    {
        for (unsigned n = 0; n < N; ++n) {
            t[n * N] = 1;
            for (unsigned k = 1; k <= n; ++k)
                t[n * N + k] = static_cast<std::uint8_t>((t[(n - 1) * N + k - 1] + (k < n ? t[(n - 1) * N + k] : 0)) & 3);
        }
    }
};

}  // namespace

bool milnor_order(const Profile& a, const Profile& b)
{
    if (a.size() != b.size())
        return a.size() > b.size();
    return b < a;
}

std::vector<Profile> enumerate_milnor_basis(int t)
{
    if (t < 0)
        throw std::invalid_argument("milnor_basis: negative degree");
    std::vector<Profile> out;
    int maxpos = 0;
    while ((1 << (maxpos + 1)) - 1 <= t)
        ++maxpos;
    Profile cur(static_cast<std::size_t>(maxpos), 0);
    gen_profiles(1, t, maxpos, cur, out);
    std::sort(out.begin(), out.end(), milnor_order);
    return out;
}

int binomial_mod4(unsigned n, unsigned k)
{
    static const PascalMod4 table;
    if (k > n)
        return 0;
    if (n >= PascalMod4::N)
        throw std::out_of_range("binomial_mod4: n too large");
    return table.t[n * PascalMod4::N + k];
}

void for_each_milnor_matrix(const Profile& r, const Profile& s, int modulus,
                            const std::function<void(const Profile&, int)>& f)
{
    const int m = static_cast<int>(r.size()), n = static_cast<int>(s.size());
    // x[i][j], 0 <= i <= m, 0 <= j <= n
    std::vector<std::uint32_t> x(static_cast<std::size_t>((m + 1) * (n + 1)), 0);
    auto X = [&](int i, int j) -> std::uint32_t& { return x[static_cast<std::size_t>(i * (n + 1) + j)]; };
    std::vector<std::uint32_t> rem_r(r.begin(), r.end()), rem_s(s.begin(), s.end());
    std::vector<std::uint32_t> mask(static_cast<std::size_t>(m + n + 1), 0);
    const bool mod2 = modulus == 2;

    auto finish = [&]() {
        for (int j = 1; j <= n; ++j) {
            X(0, j) = rem_s[static_cast<std::size_t>(j - 1)];
            if (mod2 && (X(0, j) & mask[static_cast<std::size_t>(j)]))
                return;
        }
        Profile t(static_cast<std::size_t>(m + n), 0);
        int coef = 1;
        for (int d = 1; d <= m + n; ++d) {
            unsigned acc = 0;
            for (int i = std::max(0, d - n); i <= std::min(d, m); ++i) {
                const unsigned e = X(i, d - i);
                if (!e)
                    continue;
                acc += e;
                if (!mod2) {
                    coef = (coef * binomial_mod4(acc, e)) & 3;
                    if (!coef)
                        return;
                }
            }
            t[static_cast<std::size_t>(d - 1)] = acc;
        }
        trim(t);
        f(t, coef);
    };

    std::function<void(int, int)> rec = [&](int i, int j) {
        if (i > m) {
            finish();
            return;
        }
        if (j > n) {
            const std::uint32_t v = rem_r[static_cast<std::size_t>(i - 1)];
            if (mod2 && (v & mask[static_cast<std::size_t>(i)]))
                return;
            X(i, 0) = v;
            const std::uint32_t saved = mask[static_cast<std::size_t>(i)];
            mask[static_cast<std::size_t>(i)] |= v;
            rec(i + 1, 1);
            mask[static_cast<std::size_t>(i)] = saved;
            return;
        }
        const std::uint32_t w = 1u << j;
        auto& rr = rem_r[static_cast<std::size_t>(i - 1)];
        auto& ss = rem_s[static_cast<std::size_t>(j - 1)];
        auto& mk = mask[static_cast<std::size_t>(i + j)];
        const std::uint32_t saved = mk;
        for (std::uint32_t v = 0; v * w <= rr && v <= ss; ++v) {
            if (mod2 && (v & saved))
                continue;
            X(i, j) = v;
            rr -= v * w;
            ss -= v;
            mk = saved | v;
            rec(i, j + 1);
            rr += v * w;
            ss += v;
        }
        mk = saved;
        X(i, j) = 0;
    };
    rec(1, 1);
}

// ---------------------------------------------------------- MilnorAlgebra

MilnorAlgebra& MilnorAlgebra::instance()
{
    static MilnorAlgebra alg;
    return alg;
}

MilnorAlgebra::MilnorAlgebra()
{
    degrees_.resize(kMaxDegree + 1);
    for (auto& d : degrees_)
        d = std::make_unique<Degree>();
    blocks_.resize(static_cast<std::size_t>((kMaxDegree + 1) * (kMaxDegree + 1)));
    for (auto& b : blocks_)
        b = std::make_unique<Block>();
}

MilnorAlgebra::Degree& MilnorAlgebra::degree(int t)
{
    if (t < 0 || t > kMaxDegree)
        throw std::out_of_range("Milnor basis degree " + std::to_string(t) + " out of range");
    Degree& d = *degrees_[static_cast<std::size_t>(t)];
    std::call_once(d.once, [&] {
        d.basis = enumerate_milnor_basis(t);
        for (std::size_t i = 0; i < d.basis.size(); ++i)
            d.index.emplace(profile_key(d.basis[i]), static_cast<std::uint32_t>(i));
    });
    return d;
}

const std::vector<Profile>& MilnorAlgebra::basis(int t) { return degree(t).basis; }

std::size_t MilnorAlgebra::index(const Profile& r)
{
    Degree& d = degree(profile_degree(r));
    auto it = d.index.find(profile_key(r));
    if (it == d.index.end() || r.size() > 8)
        throw std::invalid_argument("not a Milnor basis profile: " + profile_to_string(r));
    return it->second;
}

MilnorAlgebra::Block& MilnorAlgebra::block(int a, int b)
{
    if (a < 0 || b < 0 || a + b > kMaxDegree)
        throw std::out_of_range("Milnor product degree out of range");
    return *blocks_[static_cast<std::size_t>(a * (kMaxDegree + 1) + b)];
}

void MilnorAlgebra::fill_lo(int a, int b, Block& blk)
{
    const auto& ba = basis(a);
    const auto& bb = basis(b);
    Degree& dc = degree(a + b);
    blk.stride = (dc.basis.size() + 63) / 64;
    blk.lo.assign(ba.size() * bb.size() * blk.stride, 0);
    for (std::size_t i = 0; i < ba.size(); ++i)
        for (std::size_t j = 0; j < bb.size(); ++j) {
            std::uint64_t* out = blk.lo.data() + (i * bb.size() + j) * blk.stride;
            for_each_milnor_matrix(ba[i], bb[j], 2, [&](const Profile& t, int) {
                const std::size_t k = dc.index.at(profile_key(t));
                out[k >> 6] ^= std::uint64_t{1} << (k & 63);
            });
        }
}

void MilnorAlgebra::fill_hi(int a, int b, Block& blk)
{
    const auto& ba = basis(a);
    const auto& bb = basis(b);
    Degree& dc = degree(a + b);
    const std::size_t stride = (dc.basis.size() + 63) / 64;
    blk.hi.assign(ba.size() * bb.size() * stride, 0);
    std::vector<std::uint8_t> acc(dc.basis.size());
    for (std::size_t i = 0; i < ba.size(); ++i)
        for (std::size_t j = 0; j < bb.size(); ++j) {
            std::fill(acc.begin(), acc.end(), 0);
            for_each_milnor_matrix(ba[i], bb[j], 4, [&](const Profile& t, int c) {
                auto& v = acc[dc.index.at(profile_key(t))];
                v = static_cast<std::uint8_t>((v + c) & 3);
            });
            std::uint64_t* out = blk.hi.data() + (i * bb.size() + j) * stride;
            for (std::size_t k = 0; k < acc.size(); ++k)
                if (acc[k] & 2)
                    out[k >> 6] |= std::uint64_t{1} << (k & 63);
        }
}

const std::uint64_t* MilnorAlgebra::product_words(int a, std::size_t i, int b, std::size_t j)
{
    Block& blk = block(a, b);
    std::call_once(blk.lo_once, [&] { fill_lo(a, b, blk); });
    return blk.lo.data() + (i * dim(b) + j) * blk.stride;
}

const std::uint64_t* MilnorAlgebra::product_hi_words(int a, std::size_t i, int b, std::size_t j)
{
    Block& blk = block(a, b);
    std::call_once(blk.lo_once, [&] { fill_lo(a, b, blk); });
    std::call_once(blk.hi_once, [&] { fill_hi(a, b, blk); });
    return blk.hi.data() + (i * dim(b) + j) * blk.stride;
}

FVector MilnorAlgebra::product(int a, std::size_t i, int b, std::size_t j)
{
    FVector v(dim(a + b));
    v.add_words_at(product_words(a, i, b, j), v.size(), 0);
    return v;
}

void MilnorAlgebra::left_multiply_into(int a, std::size_t i, int b, const FVector& x, FVector& out, std::size_t offset)
{
    const std::size_t n = dim(a + b);
    for (std::size_t j = x.first_set(); j != FVector::npos; j = x.next_set(j + 1))
        out.add_words_at(product_words(a, i, b, j), n, offset);
}

void MilnorAlgebra::left_multiply_slice(int a, std::size_t i, int b, const FVector& src, std::size_t src_offset,
                                        FVector& out, std::size_t offset)
{
    const std::size_t n = dim(a + b);
    const std::size_t end = src_offset + dim(b);
    for (std::size_t j = src.next_set(src_offset); j != FVector::npos && j < end; j = src.next_set(j + 1))
        out.add_words_at(product_words(a, i, b, j - src_offset), n, offset);
}

// -------------------------------------------------------------- MilnorElt

MilnorElt MilnorElt::zero(int d) { return MilnorElt(d, FVector(MilnorAlgebra::instance().dim(d))); }

MilnorElt MilnorElt::basis_elt(const Profile& r)
{
    MilnorElt e = zero(profile_degree(r));
    e.coeffs.set(MilnorAlgebra::instance().index(r));
    return e;
}

MilnorElt MilnorElt::from_terms(int d, const std::vector<Profile>& terms)
{
    MilnorElt e = zero(d);
    for (const auto& t : terms) {
        if (profile_degree(t) != d)
            throw std::invalid_argument("inhomogeneous Milnor element");
        e.coeffs.flip(MilnorAlgebra::instance().index(t));
    }
    return e;
}

MilnorElt MilnorElt::parse(const std::string& s)
{
    std::vector<Profile> terms;
    std::size_t pos = 0;
    while (pos < s.size()) {
        std::size_t st = s.find("Sq(", pos);
        if (st == std::string::npos)
            break;
        std::size_t en = s.find(')', st);
        if (en == std::string::npos)
            throw std::invalid_argument("unterminated Sq( in '" + s + "'");
        terms.push_back(parse_profile(s.substr(st, en - st + 1)));
        pos = en + 1;
    }
    if (terms.empty())
        throw std::invalid_argument("no Milnor terms in '" + s + "'");
    return from_terms(profile_degree(terms[0]), terms);
}

std::vector<Profile> MilnorElt::terms() const
{
    std::vector<Profile> out;
    const auto& b = milnor_basis(degree);
    for (std::size_t i = coeffs.first_set(); i != FVector::npos; i = coeffs.next_set(i + 1))
        out.push_back(b[i]);
    return out;
}

MilnorElt& MilnorElt::operator+=(const MilnorElt& o)
{
    if (o.is_zero())
        return *this;
    if (is_zero() && degree != o.degree) {
        *this = o;
        return *this;
    }
    if (degree != o.degree)
        throw std::invalid_argument("adding Milnor elements of different degrees");
    coeffs.add(o.coeffs);
    return *this;
}

MilnorElt operator+(MilnorElt a, const MilnorElt& b)
{
    a += b;
    return a;
}

std::string MilnorElt::to_string() const
{
    if (is_zero())
        return "0";
    std::string s;
    for (const auto& t : terms()) {
        if (!s.empty())
            s += " + ";
        s += profile_to_string(t);
    }
    return s;
}

MilnorElt milnor_product(const MilnorElt& a, const MilnorElt& b)
{
    auto& alg = MilnorAlgebra::instance();
    MilnorElt out = MilnorElt::zero(a.degree + b.degree);
    for (std::size_t i = a.coeffs.first_set(); i != FVector::npos; i = a.coeffs.next_set(i + 1))
        alg.left_multiply_into(a.degree, i, b.degree, b.coeffs, out.coeffs, 0);
    return out;
}

MilnorElt contract(const Profile& xi, const MilnorElt& a)
{
    const int d = a.degree - profile_degree(xi);
    if (d < 0)
        return MilnorElt::zero(0);
    MilnorElt out = MilnorElt::zero(d);
    auto& alg = MilnorAlgebra::instance();
    const auto& b = alg.basis(a.degree);
    for (std::size_t i = a.coeffs.first_set(); i != FVector::npos; i = a.coeffs.next_set(i + 1)) {
        const Profile& s = b[i];
        if (xi.size() > s.size())
            continue;
        Profile t = s;
        bool ok = true;
        for (std::size_t k = 0; k < xi.size(); ++k) {
            if (t[k] < xi[k]) {
                ok = false;
                break;
            }
            t[k] -= xi[k];
        }
        if (!ok)
            continue;
        trim(t);
        out.coeffs.flip(alg.index(t));
    }
    return out;
}

// ----------------------------------------------------- ModulePresentation

ModulePresentation::ModulePresentation(std::vector<int> degrees, std::string name)
    : name_(std::move(name)), degrees_(std::move(degrees))
{
    reindex();
}

ModulePresentation ModulePresentation::sphere() { return ModulePresentation({0}, "S_2"); }

void ModulePresentation::reindex()
{
    by_degree_.clear();
    local_.assign(degrees_.size(), 0);
    for (std::size_t g = 0; g < degrees_.size(); ++g) {
        auto& v = by_degree_[degrees_[g]];
        local_[g] = v.size();
        v.push_back(g);
    }
}

int ModulePresentation::min_degree() const
{
    return degrees_.empty() ? 0 : *std::min_element(degrees_.begin(), degrees_.end());
}

int ModulePresentation::max_degree() const
{
    return degrees_.empty() ? 0 : *std::max_element(degrees_.begin(), degrees_.end());
}

std::size_t ModulePresentation::dim(int t) const
{
    auto it = by_degree_.find(t);
    return it == by_degree_.end() ? 0 : it->second.size();
}

std::size_t ModulePresentation::cell(int t, std::size_t local) const { return by_degree_.at(t).at(local); }

void ModulePresentation::set_action(const Profile& r, std::size_t g, const FVector& value)
{
    if (g >= degrees_.size())
        throw std::invalid_argument("module action on unknown generator");
    if (r.empty())
        throw std::invalid_argument("the action of Sq() is fixed to the identity");
    const int t = degrees_[g] + profile_degree(r);
    if (value.size() != dim(t))
        throw std::invalid_argument("module action value has wrong length for degree " + std::to_string(t));
    action_[{r, g}] = value;
}

FVector ModulePresentation::act_basis(const Profile& r, std::size_t g) const
{
    const int t = degrees_.at(g) + profile_degree(r);
    if (t > cap_)
        throw std::runtime_error("insufficient module data: degree " + std::to_string(t) + " beyond cap " +
                                 std::to_string(cap_));
    if (r.empty()) {
        FVector v(dim(t));
        v.set(local_[g]);
        return v;
    }
    auto it = action_.find({r, g});
    if (it == action_.end())
        return FVector(dim(t));
    return it->second;
}

FVector ModulePresentation::act(const MilnorElt& a, int t, const FVector& v) const
{
    if (v.size() != dim(t))
        throw std::invalid_argument("module element has wrong length");
    FVector out(dim(t + a.degree));
    if (v.is_zero() || a.is_zero())
        return out;
    for (const auto& r : a.terms())
        for (std::size_t l = v.first_set(); l != FVector::npos; l = v.next_set(l + 1))
            out.add(act_basis(r, cell(t, l)));
    return out;
}

void ModulePresentation::validate(int max_check) const
{
    for (std::size_t g = 0; g < degrees_.size(); ++g)
        if (degrees_[g] < 0)
            throw std::invalid_argument("generator " + std::to_string(g) + " has negative degree");
    const int top = std::min(max_degree(), cap_);
    for (std::size_t g = 0; g < degrees_.size(); ++g) {
        const int d0 = degrees_[g];
        FVector e(dim(d0));
        e.set(local_[g]);
        for (int a = 1; a + d0 <= top && a <= max_check; ++a)
            for (int b = 1; a + b + d0 <= top && a + b <= max_check; ++b)
                for (const auto& r : milnor_basis(a))
                    for (const auto& s : milnor_basis(b)) {
                        const MilnorElt ra = MilnorElt::basis_elt(r), sb = MilnorElt::basis_elt(s);
                        const FVector lhs = act(milnor_product(ra, sb), d0, e);
                        const FVector rhs = act(ra, d0 + b, act(sb, d0, e));
                        if (lhs != rhs)
                            throw std::invalid_argument("module action is not associative: (" + profile_to_string(r) +
                                                        profile_to_string(s) + ") g" + std::to_string(g));
                    }
    }
}

}  // namespace adsec

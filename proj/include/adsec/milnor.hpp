#pragma once
// The mod 2 Steenrod algebra in the Milnor basis.

#include "adsec/fp_linalg.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

namespace adsec {

// Sq(r_1, r_2, ...), trailing zeros trimmed. Also used for xi^R.
using Profile = std::vector<std::uint32_t>;

int profile_degree(const Profile& r);
void trim(Profile& r);
std::string profile_to_string(const Profile& r);  // "Sq(1,2)", "Sq()"
Profile parse_profile(const std::string& s);      // inverse of the above
Profile delta(int k);                              // 1 in the xi_k slot

// Degree-t basis, longest profile first, then descending lexicographic.
bool milnor_order(const Profile& a, const Profile& b);
std::vector<Profile> enumerate_milnor_basis(int t);

// Calls f(T, b(X) mod modulus) for every matrix X with R(X)=R, S(X)=S,
// modulus 2 or 4. With modulus 2 only odd terms are reported.
void for_each_milnor_matrix(const Profile& r, const Profile& s, int modulus,
                            const std::function<void(const Profile&, int)>& f);

// binom(n, k) mod 4 for n < 512
int binomial_mod4(unsigned n, unsigned k);

class MilnorAlgebra {
public:
    static constexpr int kMaxDegree = 255;
    static MilnorAlgebra& instance();

    const std::vector<Profile>& basis(int t);
    std::size_t dim(int t) { return basis(t).size(); }
    std::size_t index(const Profile& r);  // throws if r is not a basis profile

    // Sq(basis(a)[i]) * Sq(basis(b)[j]) mod 2, as dim(a+b) bits
    const std::uint64_t* product_words(int a, std::size_t i, int b, std::size_t j);
    // bit 1 of the same product computed over Z/4 (bit 0 agrees with the above)
    const std::uint64_t* product_hi_words(int a, std::size_t i, int b, std::size_t j);
    FVector product(int a, std::size_t i, int b, std::size_t j);

    // out[offset ..] ^= Sq_i * x with x over basis(b)
    void left_multiply_into(int a, std::size_t i, int b, const FVector& x, FVector& out, std::size_t offset);
    // same, with x = src[src_offset .. src_offset + dim(b))
    void left_multiply_slice(int a, std::size_t i, int b, const FVector& src, std::size_t src_offset, FVector& out,
                             std::size_t offset);

    std::size_t words_for(int t) { return (dim(t) + 63) / 64; }

private:
    MilnorAlgebra();
    struct Block {
        std::once_flag lo_once, hi_once;
        std::vector<std::uint64_t> lo, hi;
        std::size_t stride = 0;
    };
    struct Degree {
        std::once_flag once;
        std::vector<Profile> basis;
        std::unordered_map<std::uint64_t, std::uint32_t> index;
    };
    Block& block(int a, int b);
    Degree& degree(int t);
    void fill_lo(int a, int b, Block& blk);
    void fill_hi(int a, int b, Block& blk);

    std::vector<std::unique_ptr<Degree>> degrees_;
    std::vector<std::unique_ptr<Block>> blocks_;
};

inline const std::vector<Profile>& milnor_basis(int t) { return MilnorAlgebra::instance().basis(t); }

// Homogeneous GF(2) combination of Milnor basis elements.
struct MilnorElt {
    int degree = 0;
    FVector coeffs;  // over milnor_basis(degree)

    MilnorElt() : coeffs(1) {}
    MilnorElt(int d, FVector c) : degree(d), coeffs(std::move(c)) {}
    static MilnorElt zero(int d);
    static MilnorElt basis_elt(const Profile& r);
    static MilnorElt from_terms(int d, const std::vector<Profile>& terms);
    static MilnorElt parse(const std::string& s);  // "Sq(2) + Sq(0,1)" or "0@d"

    bool is_zero() const { return coeffs.is_zero(); }
    std::vector<Profile> terms() const;
    bool has_unit_term() const { return degree == 0 && !coeffs.is_zero(); }
    MilnorElt& operator+=(const MilnorElt& o);
    bool operator==(const MilnorElt& o) const { return degree == o.degree && coeffs == o.coeffs; }
    std::string to_string() const;
};

MilnorElt operator+(MilnorElt a, const MilnorElt& b);
MilnorElt milnor_product(const MilnorElt& a, const MilnorElt& b);
MilnorElt contract(const Profile& xi, const MilnorElt& a);
// xi_i^{2^k} xi_j^{2^l} as an exponent sequence (xi_0 = 1)
Profile xi_monomial(int i, int k, int j, int l);

// A finite-type module given by an F2 basis ("cells") with degrees and the
// action of Milnor basis elements on it. Unlisted actions are zero.
class ModulePresentation {
public:
    ModulePresentation() = default;
    explicit ModulePresentation(std::vector<int> degrees, std::string name = "");
    static ModulePresentation sphere();

    const std::string& name() const { return name_; }
    void set_name(std::string n) { name_ = std::move(n); }
    const std::vector<int>& degrees() const { return degrees_; }
    int min_degree() const;
    int max_degree() const;
    // Degrees beyond cap have unknown structure (open-ended data).
    int cap() const { return cap_; }
    void set_cap(int c) { cap_ = c; }

    std::size_t dim(int t) const;
    // position of cell g inside the degree-deg(g) basis
    std::size_t local_index(std::size_t g) const { return local_[g]; }
    std::size_t cell(int t, std::size_t local) const;

    // Sq(r) g = value (over the cells of degree deg g + |r|)
    void set_action(const Profile& r, std::size_t g, const FVector& value);
    FVector act_basis(const Profile& r, std::size_t g) const;
    // a * v, v over cells of degree t
    FVector act(const MilnorElt& a, int t, const FVector& v) const;

    // Throws with a description if Sq() is not the identity or some
    // (Sq(R)Sq(S)) m != Sq(R)(Sq(S) m) up to total degree max_check.
    void validate(int max_check = 24) const;

    const std::map<std::pair<Profile, std::size_t>, FVector>& actions() const { return action_; }

private:
    void reindex();
    std::string name_;
    std::vector<int> degrees_;
    std::vector<std::size_t> local_;
    std::map<int, std::vector<std::size_t>> by_degree_;
    std::map<std::pair<Profile, std::size_t>, FVector> action_;  // (Sq(R), cell)
    int cap_ = std::numeric_limits<int>::max();
};

inline FVector module_act(const ModulePresentation& m, const MilnorElt& a, int t, const FVector& v)
{
    return m.act(a, t, v);
}

}  // namespace adsec

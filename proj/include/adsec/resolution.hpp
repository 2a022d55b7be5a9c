#pragma once
// Minimal free resolution P^(0) <- P^(1) <- ... of a finite-type module,
// computed bidegree by bidegree.
//
// Layout conventions. Generators of P^(s) are numbered globally in order of
// creation (internal degree ascending). An element of P^(s) in degree t is an
// FVector that concatenates, for every generator g of degree <= t, its
// coefficient in milnor_basis(t - deg g). Since differentials are minimal,
// d(anything) has no component on generators of degree t; the "lower" layout
// drops those trailing slots and is the codomain layout of every solver.

#include "adsec/milnor.hpp"

#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace adsec {

class FreeModule {
public:
    std::size_t num_gens() const { return degrees_.size(); }
    int degree(std::size_t j) const { return degrees_[j]; }
    const std::vector<int>& degrees() const { return degrees_; }
    std::size_t add_gen(int deg);
    // offsets are tabulated up to this degree; queries beyond it throw
    void reserve_degree(int t);
    int reserved_degree() const { return static_cast<int>(off_.size()) - 1; }

    std::size_t gens_below(int t) const;    // generators of degree < t
    std::size_t gens_through(int t) const;  // generators of degree <= t
    std::size_t dim(int t) const;           // full layout size in degree t
    std::size_t dim_below(int t) const;     // lower layout size
    std::size_t offset(int t, std::size_t j) const;  // deg j <= t

    MilnorElt coeff(int t, const FVector& x, std::size_t j) const;
    void add_coeff(int t, FVector& x, std::size_t j, const MilnorElt& c) const;
    // out (degree t + |a|) += a * x, x of degree t; x may use either layout,
    // out must be at least as long as the lower layout in degree t + |a|
    void left_multiply(const MilnorElt& a, int t, const FVector& x, FVector& out) const;
    void left_multiply_basis(int a_deg, std::size_t a_idx, int t, const FVector& x, FVector& out) const;

private:
    const std::vector<std::size_t>& offsets(int t) const;
    std::vector<int> degrees_;
    std::vector<std::vector<std::size_t>> off_;  // off_[t]: prefix sums over generators of degree <= t
};

struct ExtClass {
    int n = 0, s = 0;
    FVector vector;  // over the generators of bidegree (s, n + s)
    int t() const { return n + s; }
    bool operator==(const ExtClass& o) const { return n == o.n && s == o.s && vector == o.vector; }
};

class Resolution {
public:
    using Progress = std::function<void(int s, int t)>;

    explicit Resolution(ModulePresentation m = ModulePresentation::sphere());
    Resolution(Resolution&&) noexcept;
    Resolution& operator=(Resolution&&) noexcept;
    ~Resolution();

    const ModulePresentation& module() const { return module_; }

    // Compute every (s, t) with s <= max_s and t - s <= max_n (grows the range
    // of an existing resolution without renumbering anything).
    void extend(int max_n, int max_s, const Progress& progress = {});
    int max_n() const { return max_n_; }
    int max_s() const { return max_s_; }
    bool computed(int s, int t) const { return done_.count({s, t}) > 0; }
    int min_stem() const { return module_.min_degree(); }

    std::size_t num_gens(int s, int t) const;  // throws "not computed"
    std::size_t first_gen(int s, int t) const; // global index of x_(t-s, s, 0)
    const FreeModule& free(int s) const { return stages_.at(static_cast<std::size_t>(s)).gens; }
    int num_stages() const { return static_cast<int>(stages_.size()); }

    // d of generator j of P^(s): over the lower layout of P^(s-1) in degree
    // deg j (for s = 0, over the module cells of that degree)
    const FVector& d(int s, std::size_t j) const;
    // the same as a list of (generator of P^(s-1), coefficient), s >= 1
    const std::vector<std::pair<std::size_t, MilnorElt>>& d_terms(int s, std::size_t j) const;

    // d_s in degree t: full layout of P^(s) -> lower layout of P^(s-1)
    const Solver& solver(int s, int t) const;
    bool has_solver(int s, int t) const;
    FVector apply_d(int s, int t, const FVector& x) const;
    // Row of the d_s matrix for Sq(basis index a_idx) * generator j
    FVector d_row(int s, int t, std::size_t j, std::size_t a_idx) const;

    // Kernel of d_s at t (full layout of P^(s), rows in canonical form)
    FMatrix kernel(int s, int t) const;

    // Exactness and minimality over the whole computed range; returns an
    // empty string on success, otherwise a description of the first failure.
    std::string verify() const;

    void save(const std::string& path) const;
    static Resolution load(const std::string& path);

private:
    struct Stage {
        FreeModule gens;
        std::vector<FVector> d;
        std::vector<std::vector<std::pair<std::size_t, MilnorElt>>> terms;
    };
    void step(int s, int t);
    std::unique_ptr<Solver> build_solver(int s, int t, std::size_t rows_gens) const;
    void add_generator(int s, int t, FVector dvec);
    std::size_t codomain_dim(int s, int t) const;
    Stage& stage(int s);

    ModulePresentation module_;
    std::vector<Stage> stages_;
    std::map<std::pair<int, int>, std::unique_ptr<Solver>> solvers_;
    std::set<std::pair<int, int>> done_;
    int max_n_ = -1, max_s_ = -1;
};

}  // namespace adsec

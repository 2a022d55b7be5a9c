#include "adsec/secondary_lift.hpp"

#include "adsec/parallel.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <stdexcept>

namespace adsec {

namespace {

double thread_cpu_us()
{
    timespec ts{};
    clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts);
    return static_cast<double>(ts.tv_sec) * 1e6 + static_cast<double>(ts.tv_nsec) / 1e3;
}

std::string bidegree(int s, int t) { return "(s=" + std::to_string(s) + ", t=" + std::to_string(t) + ")"; }

}  // namespace

KerPiRow compute_composite(const Resolution& res, int s, std::size_t j)
{
    KerPiRow out;
    if (s < 2)
        return out;
    const int t = res.free(s).degree(j);
    std::map<std::size_t, B0Accumulator> acc;
    const FreeModule& p2 = res.free(s - 2);
    for (const auto& [gi, alpha] : res.d_terms(s, j))
        for (const auto& [q, beta] : res.d_terms(s - 1, gi)) {
            auto it = acc.find(q);
            if (it == acc.end())
                it = acc.emplace(q, B0Accumulator(t - p2.degree(q))).first;
            it->second.add_sigma_product(alpha, beta);
        }
    for (auto& [q, a] : acc) {
        if (a.is_zero())
            continue;
        BZeroElt b = a.get();
        if (!b.in_ker_pi())
            throw std::logic_error("composite of differentials not in ker pi at " + bidegree(s, t));
        out.emplace_back(q, KerPiElt::from(b));
    }
    return out;
}

ExtClass h_product(const Resolution& res, int j, const ExtClass& x)
{
    const int s = x.s, t = x.t();
    const int shift = 1 << j;
    ExtClass out{x.n + shift - 1, s + 1, FVector(res.num_gens(s + 1, t + shift))};
    if (x.vector.is_zero())
        return out;
    const FreeModule& src = res.free(s + 1);
    const std::size_t first = res.first_gen(s, t);
    const std::size_t sq_idx = MilnorAlgebra::instance().index(Profile{static_cast<std::uint32_t>(shift)});
    const std::size_t g0 = src.gens_below(t + shift);
    for (std::size_t k = 0; k < out.vector.size(); ++k) {
        bool v = false;
        for (const auto& [h, c] : res.d_terms(s + 1, g0 + k))
            if (h >= first && h < first + x.vector.size() && x.vector.get(h - first) && c.degree == shift &&
                c.coeffs.get(sq_idx))
                v = !v;
        out.vector.set(k, v);
    }
    return out;
}

// ------------------------------------------------------- SecondaryResolution

SecondaryResolution::SecondaryResolution(const Resolution& res) : res_(res) {}

void SecondaryResolution::set_h_tau_2(std::size_t j, FVector v)
{
    if (!timings_.empty() || max_n_ >= 0)
        throw std::logic_error("h_tau^(2) must be set before compute()");
    const int t = res_.free(2).degree(j);
    if (v.size() != res_.free(0).dim(t - 1))
        throw std::invalid_argument("h_tau^(2) override has the wrong length");
    h2_override_[j] = std::move(v);
}

const KerPiRow& SecondaryResolution::composite_or_compute(int s, std::size_t j) const
{
    auto& m = comp_.at(static_cast<std::size_t>(s));
    auto it = m.find(j);
    if (it == m.end())
        throw std::logic_error("composite not computed");
    return it->second;
}

const KerPiRow& SecondaryResolution::composite(int s, std::size_t j) const { return composite_or_compute(s, j); }

bool SecondaryResolution::has_h_tau(int s, std::size_t j) const
{
    return s >= 0 && s < static_cast<int>(h_tau_.size()) && h_tau_[static_cast<std::size_t>(s)].count(j);
}

const FVector& SecondaryResolution::h_tau(int s, std::size_t j) const
{
    if (s < 2 || s >= static_cast<int>(h_tau_.size()))
        throw std::out_of_range("h_tau not computed at s=" + std::to_string(s));
    auto& m = h_tau_[static_cast<std::size_t>(s)];
    auto it = m.find(j);
    if (it == m.end())
        throw std::out_of_range("h_tau not computed for generator " + std::to_string(j) + " at s=" + std::to_string(s));
    return it->second;
}

FVector SecondaryResolution::h_tau_rhs(int s, std::size_t j) const
{
    const int t = res_.free(s).degree(j);
    const FreeModule& target = res_.free(s - 3);
    FVector rhs(target.dim_below(t - 1));
    for (const auto& [gi, alpha] : res_.d_terms(s, j)) {
        const int ti = res_.free(s - 1).degree(gi);
        target.left_multiply(alpha, ti - 1, h_tau(s - 1, gi), rhs);
        for (const auto& [q, k] : composite_or_compute(s - 1, gi)) {
            MilnorElt a = a_function(alpha, k);
            if (!a.is_zero())
                target.add_coeff(t - 1, rhs, q, a);
        }
    }
    return rhs;
}

void SecondaryResolution::compute(int max_n)
{
    if (max_n < 0)
        max_n = res_.max_n();
    max_n = std::min(max_n, res_.max_n());
    const int max_s = res_.max_s();
    if (static_cast<int>(h_tau_.size()) <= max_s)
        h_tau_.resize(static_cast<std::size_t>(max_s + 1));
    if (static_cast<int>(comp_.size()) <= max_s)
        comp_.resize(static_cast<std::size_t>(max_s + 1));

    for (int s = 2; s <= max_s; ++s) {
        for (int t = s; t - s <= max_n - 1; ++t) {
            if (!res_.computed(s, t))
                continue;
            const std::size_t first = res_.first_gen(s, t);
            const std::size_t n = res_.num_gens(s, t);
            if (n == 0)
                continue;
            if (comp_[static_cast<std::size_t>(s)].count(first))
                continue;
            const bool need_h = s >= 3;
            std::vector<KerPiRow> comps(n);
            std::vector<TimingRecord> times(n);
            std::vector<FVector> rhs(n);
            parallel_for(n, [&](std::size_t k) {
                const auto w0 = std::chrono::steady_clock::now();
                const double c0 = thread_cpu_us();
                comps[k] = compute_composite(res_, s, first + k);
                if (need_h)
                    rhs[k] = h_tau_rhs(s, first + k);
                times[k] = TimingRecord{s, t, k,
                                        std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - w0)
                                            .count(),
                                        thread_cpu_us() - c0};
            });
            for (std::size_t k = 0; k < n; ++k)
                comp_[static_cast<std::size_t>(s)][first + k] = std::move(comps[k]);
            if (!need_h) {
                // h_tau^(2) is 0 unless overridden
                for (std::size_t k = 0; k < n; ++k) {
                    auto it = h2_override_.find(first + k);
                    h_tau_[2][first + k] =
                        it != h2_override_.end() ? it->second : FVector(res_.free(0).dim(t - 1));
                    timings_.push_back(times[k]);
                }
                continue;
            }
            // sequential tail: solve with the (s-2, t-1) solver
            const Solver& sol = res_.solver(s - 2, t - 1);
            for (std::size_t k = 0; k < n; ++k) {
                auto x = sol.solve(rhs[k]);
                if (!x)
                    throw std::runtime_error("secondary obstruction: h_tau equation unsolvable at " + bidegree(s, t));
                h_tau_[static_cast<std::size_t>(s)][first + k] = std::move(*x);
                timings_.push_back(times[k]);
            }
        }
    }
    max_n_ = std::max(max_n_, max_n);
}

bool SecondaryResolution::d2_defined(int n, int s) const
{
    return n - 1 <= max_n_ - 1 && s + 2 <= res_.max_s() && res_.computed(s, n + s) && res_.computed(s + 2, n + s + 1);
}

ExtClass SecondaryResolution::d2(const ExtClass& x) const
{
    const int s = x.s, t = x.t();
    if (!d2_defined(x.n, s))
        throw std::out_of_range("d2 not computed at (n=" + std::to_string(x.n) + ", s=" + std::to_string(s) + ")");
    ExtClass out{x.n - 1, s + 2, FVector(res_.num_gens(s + 2, t + 1))};
    if (x.vector.size() != res_.num_gens(s, t))
        throw std::invalid_argument("Ext class vector has the wrong length");
    const std::size_t base = res_.free(s).dim_below(t);
    const std::size_t first = res_.first_gen(s + 2, t + 1);
    for (std::size_t k = 0; k < out.vector.size(); ++k) {
        const FVector& h = h_tau(s + 2, first + k);
        bool v = false;
        for (std::size_t i = x.vector.first_set(); i != FVector::npos; i = x.vector.next_set(i + 1))
            if (h.get(base + i))
                v = !v;
        out.vector.set(k, v);
    }
    return out;
}

FMatrix SecondaryResolution::d2_matrix(int n, int s) const
{
    const std::size_t rows = res_.num_gens(s, n + s);
    FMatrix m(rows, res_.num_gens(s + 2, n + s + 1));
    for (std::size_t i = 0; i < rows; ++i) {
        ExtClass x{n, s, FVector(rows)};
        x.vector.set(i);
        m.row(i) = d2(x).vector;
    }
    return m;
}

std::optional<ExtClass> SecondaryResolution::d2_preimage(int n, int s, const ExtClass& y) const
{
    auto x = Solver(d2_matrix(n, s)).solve(y.vector);
    if (!x)
        return std::nullopt;
    return ExtClass{n, s, std::move(*x)};
}

void SecondaryResolution::write_timing_log(const std::string& path) const
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write timing log " + path);
    out << "# n s t index wall_us cpu_us\n";
    std::map<std::pair<int, int>, std::pair<double, double>> totals;
    for (const auto& r : timings_) {
        out << r.t - r.s << ' ' << r.s << ' ' << r.t << ' ' << r.index << ' ' << r.wall_us << ' ' << r.cpu_us << '\n';
        auto& tot = totals[{r.s, r.t}];
        tot.first += r.wall_us;
        tot.second += r.cpu_us;
    }
    // per-bidegree totals, as comments so the record count stays one per generator
    for (const auto& [st, tot] : totals)
        out << "# total " << st.second - st.first << ' ' << st.first << ' ' << st.second << ' ' << tot.first << ' '
            << tot.second << '\n';
}

// ------------------------------------------------------------ SecondaryValue

SecondaryValue SecondaryValue::zero(const Resolution& res, int n, int s)
{
    return SecondaryValue{ExtClass{n, s, FVector(res.num_gens(s, n + s))},
                          ExtClass{n, s + 1, FVector(res.num_gens(s + 1, n + s + 1))}};
}

SecondaryValue SecondaryValue::lift(const Resolution& res, const ExtClass& e)
{
    SecondaryValue v = zero(res, e.n, e.s);
    v.e = e;
    return v;
}

SecondaryValue lift_sum(const Resolution& res, const SecondaryValue& a, const SecondaryValue& b)
{
    if (a.e.n != b.e.n || a.e.s != b.e.s)
        throw std::invalid_argument("lift_sum: bidegree mismatch");
    SecondaryValue out = a;
    out.e.vector.add(b.e.vector);
    out.f.vector.add(b.f.vector);
    FVector carry = a.e.vector;
    carry.and_with(b.e.vector);
    if (!carry.is_zero())
        out.f.vector.add(h_product(res, 0, ExtClass{a.e.n, a.e.s, carry}).vector);
    return out;
}

SecondaryValue twist(const Resolution& res, const SecondaryValue& v)
{
    SecondaryValue out = v;
    out.f.vector.add(h_product(res, 0, v.e).vector);
    return out;
}

}  // namespace adsec

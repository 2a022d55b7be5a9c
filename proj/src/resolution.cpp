#include "adsec/resolution.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace adsec {

namespace {

MilnorAlgebra& alg() { return MilnorAlgebra::instance(); }

}  // namespace

// ---------------------------------------------------------------- FreeModule

std::size_t FreeModule::add_gen(int deg)
{
    if (!degrees_.empty() && deg < degrees_.back())
        throw std::logic_error("FreeModule: generators must be added in degree order");
    degrees_.push_back(deg);
    for (int t = deg; t < static_cast<int>(off_.size()); ++t) {
        auto& o = off_[static_cast<std::size_t>(t)];
        o.push_back(o.back() + alg().dim(t - deg));
    }
    return degrees_.size() - 1;
}

void FreeModule::reserve_degree(int t)
{
    while (static_cast<int>(off_.size()) <= t) {
        const int u = static_cast<int>(off_.size());
        std::vector<std::size_t> o{0};
        for (int d : degrees_) {
            if (d > u)
                break;
            o.push_back(o.back() + alg().dim(u - d));
        }
        off_.push_back(std::move(o));
    }
}

const std::vector<std::size_t>& FreeModule::offsets(int t) const
{
    if (t < 0 || t >= static_cast<int>(off_.size()))
        throw std::out_of_range("FreeModule: degree " + std::to_string(t) + " not tabulated");
    return off_[static_cast<std::size_t>(t)];
}

std::size_t FreeModule::gens_below(int t) const
{
    return static_cast<std::size_t>(std::lower_bound(degrees_.begin(), degrees_.end(), t) - degrees_.begin());
}

std::size_t FreeModule::gens_through(int t) const
{
    return static_cast<std::size_t>(std::upper_bound(degrees_.begin(), degrees_.end(), t) - degrees_.begin());
}

std::size_t FreeModule::dim(int t) const
{
    if (t < 0)
        return 0;
    return offsets(t).back();
}

std::size_t FreeModule::dim_below(int t) const
{
    if (t < 0)
        return 0;
    return offsets(t)[gens_below(t)];
}

std::size_t FreeModule::offset(int t, std::size_t j) const { return offsets(t)[j]; }

MilnorElt FreeModule::coeff(int t, const FVector& x, std::size_t j) const
{
    const std::size_t o = offset(t, j);
    const int d = t - degrees_[j];
    return MilnorElt(d, x.slice(o, o + alg().dim(d)));
}

void FreeModule::add_coeff(int t, FVector& x, std::size_t j, const MilnorElt& c) const
{
    if (c.degree != t - degrees_[j])
        throw std::invalid_argument("FreeModule::add_coeff: degree mismatch");
    x.add_at(c.coeffs, offset(t, j));
}

void FreeModule::left_multiply_basis(int a_deg, std::size_t a_idx, int t, const FVector& x, FVector& out) const
{
    const auto& ot = offsets(t);
    const auto& ou = offsets(t + a_deg);
    const std::size_t n = gens_through(t);
    for (std::size_t j = 0; j < n && ot[j] < x.size(); ++j) {
        if (x.next_set(ot[j]) >= ot[j + 1])
            continue;
        alg().left_multiply_slice(a_deg, a_idx, t - degrees_[j], x, ot[j], out, ou[j]);
    }
}

void FreeModule::left_multiply(const MilnorElt& a, int t, const FVector& x, FVector& out) const
{
    for (std::size_t i = a.coeffs.first_set(); i != FVector::npos; i = a.coeffs.next_set(i + 1))
        left_multiply_basis(a.degree, i, t, x, out);
}

// ---------------------------------------------------------------- Resolution

Resolution::Resolution(ModulePresentation m) : module_(std::move(m)) {}
Resolution::Resolution(Resolution&&) noexcept = default;
Resolution& Resolution::operator=(Resolution&&) noexcept = default;
Resolution::~Resolution() = default;

Resolution::Stage& Resolution::stage(int s)
{
    while (static_cast<int>(stages_.size()) <= s)
        stages_.emplace_back();
    return stages_[static_cast<std::size_t>(s)];
}

std::size_t Resolution::codomain_dim(int s, int t) const
{
    if (s == 0)
        return module_.dim(t);
    return free(s - 1).dim_below(t);
}

void Resolution::extend(int max_n, int max_s, const Progress& progress)
{
    if (max_n < 0 || max_s < 0)
        throw std::invalid_argument("max_n and max_s must be non-negative");
    const int t0 = module_.min_degree();
    const int top = max_n + max_s + 2;
    for (int s = 0; s <= max_s + 1; ++s)
        stage(s).gens.reserve_degree(top);
    for (int t = t0; t <= max_n + max_s; ++t) {
        for (int s = 0; s <= max_s; ++s) {
            if (t - s > max_n || done_.count({s, t}))
                continue;
            step(s, t);
            if (progress)
                progress(s, t);
        }
    }
    max_n_ = std::max(max_n_, max_n);
    max_s_ = std::max(max_s_, max_s);
}

FVector Resolution::d_row(int s, int t, std::size_t j, std::size_t a_idx) const
{
    const int dj = free(s).degree(j);
    const int a = t - dj;
    if (s == 0) {
        const MilnorElt sq = MilnorElt::basis_elt(alg().basis(a)[a_idx]);
        return module_.act(sq, dj, d(0, j));
    }
    FVector out(codomain_dim(s, t));
    free(s - 1).left_multiply_basis(a, a_idx, dj, d(s, j), out);
    return out;
}

std::unique_ptr<Solver> Resolution::build_solver(int s, int t, std::size_t rows_gens) const
{
    FMatrix m(0, codomain_dim(s, t));
    const FreeModule& fm = free(s);
    for (std::size_t j = 0; j < rows_gens; ++j) {
        const int a = t - fm.degree(j);
        for (std::size_t i = 0; i < alg().dim(a); ++i)
            m.push_row(d_row(s, t, j, i));
    }
    return std::make_unique<Solver>(m);
}

void Resolution::add_generator(int s, int t, FVector dvec)
{
    Stage& st = stage(s);
    const std::size_t j = st.gens.add_gen(t);
    std::vector<std::pair<std::size_t, MilnorElt>> terms;
    if (s > 0) {
        const FreeModule& prev = free(s - 1);
        const std::size_t n = prev.gens_below(t);
        for (std::size_t h = 0; h < n; ++h) {
            MilnorElt c = prev.coeff(t, dvec, h);
            if (!c.is_zero())
                terms.emplace_back(h, std::move(c));
        }
    }
    st.d.push_back(std::move(dvec));
    st.terms.push_back(std::move(terms));
    (void)j;
}

void Resolution::step(int s, int t)
{
    stage(s);
    stage(s + 1).gens.reserve_degree(free(s).reserved_degree());
    // kernel of the previous differential in degree t
    FMatrix ker;
    const std::size_t cod = codomain_dim(s, t);
    if (s == 0) {
        ker = FMatrix::identity(module_.dim(t));
    } else {
        ker = kernel(s - 1, t);
    }
    auto solver = build_solver(s, t, free(s).gens_below(t));
    for (std::size_t r = 0; r < ker.rows(); ++r) {
        FVector k = ker.row(r);
        if (k.size() != cod)
            k.resize(cod);
        if (solver->in_image(k))
            continue;
        solver->append_row(k);
        add_generator(s, t, std::move(k));
    }
    solvers_[{s, t}] = std::move(solver);
    done_.insert({s, t});
}

FMatrix Resolution::kernel(int s, int t) const
{
    if (has_solver(s, t))
        return solver(s, t).kernel_basis();
    return build_solver(s, t, free(s).gens_below(t))->kernel_basis();
}

std::size_t Resolution::num_gens(int s, int t) const
{
    if (!computed(s, t)) {
        if (s >= 0 && s <= max_s_ && t - s < min_stem())
            return 0;
        throw std::out_of_range("bidegree (s=" + std::to_string(s) + ", t=" + std::to_string(t) + ") not computed");
    }
    const FreeModule& fm = free(s);
    return fm.gens_through(t) - fm.gens_below(t);
}

std::size_t Resolution::first_gen(int s, int t) const
{
    num_gens(s, t);
    return free(s).gens_below(t);
}

const FVector& Resolution::d(int s, std::size_t j) const { return stages_.at(static_cast<std::size_t>(s)).d.at(j); }

const std::vector<std::pair<std::size_t, MilnorElt>>& Resolution::d_terms(int s, std::size_t j) const
{
    return stages_.at(static_cast<std::size_t>(s)).terms.at(j);
}

bool Resolution::has_solver(int s, int t) const { return solvers_.count({s, t}) > 0; }

const Solver& Resolution::solver(int s, int t) const
{
    auto it = solvers_.find({s, t});
    if (it == solvers_.end())
        throw std::out_of_range("bidegree (s=" + std::to_string(s) + ", t=" + std::to_string(t) + ") not computed");
    return *it->second;
}

FVector Resolution::apply_d(int s, int t, const FVector& x) const
{
    const FreeModule& fm = free(s);
    FVector out(codomain_dim(s, t));
    const std::size_t n = fm.gens_through(t);
    for (std::size_t j = 0; j < n && fm.offset(t, j) < x.size(); ++j) {
        MilnorElt c = fm.coeff(t, x, j);
        if (c.is_zero())
            continue;
        if (s == 0)
            out.add(module_.act(c, fm.degree(j), d(0, j)));
        else
            free(s - 1).left_multiply(c, fm.degree(j), d(s, j), out);
    }
    return out;
}

std::string Resolution::verify() const
{
    for (const auto& [s, t] : done_) {
        const FreeModule& fm = free(s);
        const Solver& sol = solver(s, t);
        // exactness at P^(s-1) (or surjectivity onto the module)
        const std::size_t need = s == 0 ? module_.dim(t) : kernel(s - 1, t).rows();
        if (sol.rank() != need)
            return "exactness fails at (s=" + std::to_string(s) + ", t=" + std::to_string(t) + ")";
        for (std::size_t j = fm.gens_below(t); j < fm.gens_through(t); ++j) {
            if (s >= 1) {
                for (const auto& [h, c] : d_terms(s, j))
                    if (c.degree == 0)
                        return "non-minimal differential at (s=" + std::to_string(s) + ", t=" + std::to_string(t) + ")";
                if (!apply_d(s - 1, t, d(s, j)).is_zero())
                    return "d o d != 0 at (s=" + std::to_string(s) + ", t=" + std::to_string(t) + ")";
            }
        }
    }
    return {};
}

// ---------------------------------------------------------------- checkpoints

namespace {

constexpr char kMagic[] = "ADSEC1";

class Writer {
public:
    void u64(std::uint64_t v) { buf_.append(reinterpret_cast<const char*>(&v), sizeof v); }
    void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
    void str(const std::string& s)
    {
        u64(s.size());
        buf_ += s;
    }
    void vec(const FVector& v)
    {
        u64(v.size());
        for (std::size_t w = 0; w < v.num_words(); ++w)
            u64(v.data()[w]);
    }
    void profile(const Profile& r)
    {
        u64(r.size());
        for (auto x : r)
            u64(x);
    }
    const std::string& data() const { return buf_; }

private:
    std::string buf_;
};

class Reader {
public:
    explicit Reader(std::string data) : buf_(std::move(data)) {}
    std::uint64_t u64()
    {
        if (pos_ + 8 > buf_.size())
            throw std::runtime_error("checkpoint truncated");
        std::uint64_t v;
        std::memcpy(&v, buf_.data() + pos_, 8);
        pos_ += 8;
        return v;
    }
    std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
    std::size_t count(std::size_t limit = (1u << 28))
    {
        const std::uint64_t v = u64();
        if (v > limit)
            throw std::runtime_error("checkpoint corrupt: implausible size");
        return static_cast<std::size_t>(v);
    }
    std::string str()
    {
        const std::size_t n = count();
        if (pos_ + n > buf_.size())
            throw std::runtime_error("checkpoint truncated");
        std::string s = buf_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    FVector vec()
    {
        FVector v(count());
        for (std::size_t w = 0; w < v.num_words(); ++w)
            v.data()[w] = u64();
        return v;
    }
    Profile profile()
    {
        Profile r(count(64));
        for (auto& x : r)
            x = static_cast<std::uint32_t>(u64());
        return r;
    }
    bool at_end() const { return pos_ == buf_.size(); }

private:
    std::string buf_;
    std::size_t pos_ = 0;
};

std::uint64_t fnv1a(const std::string& s)
{
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace

void Resolution::save(const std::string& path) const
{
    Writer w;
    w.str(module_.name());
    w.u64(module_.degrees().size());
    for (int d : module_.degrees())
        w.i64(d);
    w.i64(module_.cap());
    w.u64(module_.actions().size());
    for (const auto& [key, v] : module_.actions()) {
        w.profile(key.first);
        w.u64(key.second);
        w.vec(v);
    }
    w.i64(max_n_);
    w.i64(max_s_);
    w.u64(done_.size());
    for (const auto& [s, t] : done_) {
        w.i64(s);
        w.i64(t);
    }
    w.u64(stages_.size());
    for (const auto& st : stages_) {
        w.u64(st.gens.num_gens());
        for (std::size_t j = 0; j < st.gens.num_gens(); ++j) {
            w.i64(st.gens.degree(j));
            w.vec(st.d[j]);
        }
    }
    std::string body = w.data();
    const std::uint64_t h = fnv1a(body);
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error("cannot write checkpoint " + path);
        out.write(kMagic, 6);
        out.write(body.data(), static_cast<std::streamsize>(body.size()));
        out.write(reinterpret_cast<const char*>(&h), 8);
        if (!out)
            throw std::runtime_error("cannot write checkpoint " + path);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("cannot write checkpoint " + path);
}

Resolution Resolution::load(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read checkpoint " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    std::string all = ss.str();
    if (all.size() < 14 || all.compare(0, 6, kMagic) != 0)
        throw std::runtime_error("checkpoint " + path + ": bad magic header (expected ADSEC1)");
    std::string body = all.substr(6, all.size() - 14);
    std::uint64_t h;
    std::memcpy(&h, all.data() + all.size() - 8, 8);
    if (h != fnv1a(body))
        throw std::runtime_error("checkpoint " + path + ": checksum mismatch");

    Reader r(std::move(body));
    std::string name = r.str();
    std::vector<int> degs(r.count());
    for (auto& d : degs)
        d = static_cast<int>(r.i64());
    ModulePresentation m(degs, name);
    m.set_cap(static_cast<int>(r.i64()));
    const std::size_t na = r.count();
    for (std::size_t i = 0; i < na; ++i) {
        Profile p = r.profile();
        std::size_t g = r.count();
        m.set_action(p, g, r.vec());
    }
    Resolution res(std::move(m));
    const int max_n = static_cast<int>(r.i64());
    const int max_s = static_cast<int>(r.i64());
    std::vector<std::pair<int, int>> done(r.count());
    for (auto& [s, t] : done) {
        s = static_cast<int>(r.i64());
        t = static_cast<int>(r.i64());
    }
    const std::size_t nst = r.count();
    struct Gen {
        int deg;
        FVector d;
    };
    std::vector<std::vector<Gen>> gens(nst);
    for (auto& st : gens) {
        st.resize(r.count());
        for (auto& g : st) {
            g.deg = static_cast<int>(r.i64());
            g.d = r.vec();
        }
    }
    if (!r.at_end())
        throw std::runtime_error("checkpoint " + path + ": trailing data");

    // replay generator creation in the original (t, s) order, rebuilding solvers
    // an interrupted run records done bidegrees beyond its stored range
    int top = std::max(max_n, 0) + std::max(max_s, 0) + 2;
    int top_s = max_s;
    for (const auto& [s, t] : done) {
        top = std::max(top, t + 2);
        top_s = std::max(top_s, s);
    }
    for (std::size_t s = 0; s < std::max<std::size_t>(nst, static_cast<std::size_t>(top_s + 2)); ++s)
        res.stage(static_cast<int>(s)).gens.reserve_degree(top);
    std::sort(done.begin(), done.end(), [](auto a, auto b) { return std::tie(a.second, a.first) < std::tie(b.second, b.first); });
    std::vector<std::size_t> next(nst, 0);
    for (const auto& [s, t] : done) {
        if (s < 0 || static_cast<std::size_t>(s) >= nst)
            throw std::runtime_error("checkpoint corrupt: bad stage index");
        auto solver = res.build_solver(s, t, res.free(s).gens_below(t));
        auto& list = gens[static_cast<std::size_t>(s)];
        auto& k = next[static_cast<std::size_t>(s)];
        while (k < list.size() && list[k].deg == t) {
            if (list[k].d.size() != res.codomain_dim(s, t))
                throw std::runtime_error("checkpoint corrupt: differential length");
            solver->append_row(list[k].d);
            res.add_generator(s, t, std::move(list[k].d));
            ++k;
        }
        res.solvers_[{s, t}] = std::move(solver);
        res.done_.insert({s, t});
    }
    for (std::size_t s = 0; s < nst; ++s)
        if (next[s] != gens[s].size())
            throw std::runtime_error("checkpoint corrupt: generators outside the computed range");
    res.max_n_ = max_n;
    res.max_s_ = max_s;
    return res;
}

}  // namespace adsec

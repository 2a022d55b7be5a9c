#include "adsec/sseq.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace adsec {

namespace {

using Key = std::pair<int, int>;

FMatrix rows_matrix(const std::vector<FVector>& rows, std::size_t cols)
{
    FMatrix m(0, cols);
    for (const auto& r : rows)
        m.push_row(r);
    return m;
}

std::string class_text(const ExtClass& x)
{
    if (x.vector.count() == 1)
        return "x_(" + std::to_string(x.n) + ", " + std::to_string(x.s) + ", " + std::to_string(x.vector.first_set()) +
               ")";
    return to_string(x.vector) + " at (" + std::to_string(x.n) + ", " + std::to_string(x.s) + ")";
}

// Product data of one multiplier, indexed by basis source.
struct MultTable {
    int n = 0, s = 0;  // bidegree of the multiplier
    bool have_degree = false;
    std::map<Key, std::map<std::size_t, const SecondaryValue*>> values;
    std::map<Key, std::map<std::size_t, std::size_t>> hidden;  // basis source -> extension index
};

class Propagator {
public:
    Propagator(const PageData& page, const std::vector<HiddenExtension>& exts,
               const std::vector<ProductRecord>& products)
        : page_(page), exts_(exts)
    {
        for (const auto& p : products) {
            if (p.x.vector.count() != 1)
                continue;
            auto& t = tables_[p.name];
            t.n = p.value.e.n - p.x.n;
            t.s = p.value.e.s - p.x.s;
            t.have_degree = true;
            t.values[{p.x.n, p.x.s}][p.x.vector.first_set()] = &p.value;
        }
        for (std::size_t k = 0; k < exts.size(); ++k) {
            const auto& e = exts[k];
            auto& t = tables_[e.multiplier];
            if (!t.have_degree) {
                t.n = e.target.n - e.source.n;
                t.s = e.target.s - 1 - e.source.s;
                t.have_degree = true;
            }
            if (e.source.vector.count() == 1)
                t.hidden[{e.source.n, e.source.s}][e.source.vector.first_set()] = k;
        }
    }

    std::vector<std::string> multipliers() const
    {
        std::set<std::string> names;
        for (const auto& e : exts_)
            names.insert(e.multiplier);
        return {names.begin(), names.end()};
    }

    const MultTable& table(const std::string& name) const { return tables_.at(name); }

    // E2 product alpha * x; nullopt when the target bidegree is unknown
    std::optional<FVector> e2_product(const std::string& name, const ExtClass& x) const
    {
        const MultTable& t = table(name);
        const PageEntry* target = page_.find(x.n + t.n, x.s + t.s);
        if (!target)
            return std::nullopt;
        FVector out(target->e2_dim);
        auto it = t.values.find({x.n, x.s});
        for (std::size_t i = x.vector.first_set(); i != FVector::npos; i = x.vector.next_set(i + 1)) {
            if (it == t.values.end())
                continue;
            auto jt = it->second.find(i);
            if (jt != it->second.end() && jt->second->e.vector.size() == out.size())
                out.add(jt->second->e.vector);
        }
        return out;
    }

    // hidden product: alpha * x = tau w with alpha x = 0 on E2. Fills the
    // extension indices used. nullopt when some summand has a nonzero E2 part.
    std::optional<FVector> hidden_product(const std::string& name, const ExtClass& x,
                                          std::vector<std::size_t>& used) const
    {
        for (std::size_t k = 0; k < exts_.size(); ++k)
            if (exts_[k].multiplier == name && exts_[k].source == x) {
                used.push_back(k);
                return exts_[k].target.vector;
            }
        const MultTable& t = table(name);
        const PageEntry* target = page_.find(x.n + t.n, x.s + t.s + 1);
        if (!target)
            return std::nullopt;
        FVector out(target->e2_dim);
        auto vt = t.values.find({x.n, x.s});
        auto ht = t.hidden.find({x.n, x.s});
        for (std::size_t i = x.vector.first_set(); i != FVector::npos; i = x.vector.next_set(i + 1)) {
            if (vt != t.values.end()) {
                auto jt = vt->second.find(i);
                if (jt != vt->second.end() && !jt->second->e.vector.is_zero())
                    return std::nullopt;
            }
            if (ht != t.hidden.end()) {
                auto jt = ht->second.find(i);
                if (jt != ht->second.end()) {
                    used.push_back(jt->second);
                    out.add(exts_[jt->second].target.vector);
                }
            }
        }
        return out;
    }

    std::vector<DerivedDifferential> multiply(const std::vector<Differential>& known, std::size_t k,
                                              const std::string& name) const
    {
        std::vector<DerivedDifferential> out;
        const Differential& d = known[k];
        auto xp = e2_product(name, d.source);
        if (!xp || xp->is_zero())
            return out;
        std::vector<std::size_t> used;
        auto w = hidden_product(name, d.target, used);
        if (!w || w->is_zero())
            return out;
        const MultTable& t = table(name);
        DerivedDifferential r;
        r.d.r = d.r + 1;
        r.d.source = ExtClass{d.source.n + t.n, d.source.s + t.s, std::move(*xp)};
        r.d.target = ExtClass{d.target.n + t.n, d.target.s + t.s + 1, std::move(*w)};
        r.from.kind = Provenance::Multiply;
        r.from.multiplier = name;
        r.from.differential = k;
        r.from.extensions = used;
        std::ostringstream text;
        text << "d_" << d.r << ' ' << class_text(d.source) << " = " << to_string(d.target.vector) << "; [" << name
             << "] " << class_text(d.source) << " = " << to_string(r.d.source.vector) << "; [" << name << "] "
             << class_text(d.target) << " = τ " << to_string(r.d.target.vector);
        r.from.text = text.str();
        if (finish(r))
            out.push_back(std::move(r));
        return out;
    }

    std::vector<DerivedDifferential> divide(const std::vector<Differential>& known, std::size_t k,
                                            const std::string& name) const
    {
        std::vector<DerivedDifferential> out;
        const Differential& d = known[k];
        const MultTable& t = table(name);
        // x with alpha x = tau y
        const int xn = d.source.n - t.n, xs = d.source.s - 1 - t.s;
        const PageEntry* xe = page_.find(xn, xs);
        const PageEntry* ye = page_.find(d.source.n, d.source.s);
        if (!xe || !ye)
            return out;
        std::vector<FVector> rows;
        std::vector<std::vector<std::size_t>> used_by;
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < xe->e2_dim; ++i) {
            ExtClass b{xn, xs, FVector(xe->e2_dim)};
            b.vector.set(i);
            auto e2 = e2_product(name, b);
            if (!e2 || !e2->is_zero())
                continue;
            std::vector<std::size_t> used;
            auto f = hidden_product(name, b, used);
            if (!f || f->is_zero())
                continue;
            rows.push_back(*f);
            used_by.push_back(used);
            idx.push_back(i);
        }
        if (rows.empty())
            return out;
        const std::size_t nx = rows.size();
        for (std::size_t i = 0; i < ye->image_in.rows(); ++i)
            rows.push_back(ye->image_in.row(i));
        Solver sx(rows_matrix(rows, ye->e2_dim));
        auto cx = sx.solve(d.source.vector);
        if (!cx)
            return out;
        ExtClass x{xn, xs, FVector(xe->e2_dim)};
        std::vector<std::size_t> used;
        for (std::size_t i = 0; i < nx; ++i)
            if (cx->get(i)) {
                x.vector.flip(idx[i]);
                used.insert(used.end(), used_by[i].begin(), used_by[i].end());
            }
        if (x.vector.is_zero())
            return out;
        bool ambiguous = false;
        {
            FMatrix ker = sx.kernel_basis();
            for (std::size_t i = 0; i < ker.rows(); ++i)
                if (!ker.row(i).slice(0, nx).is_zero())
                    ambiguous = true;
        }
        // z with alpha z = w on E2
        const int zn = d.target.n - t.n, zs = d.target.s - t.s;
        const PageEntry* ze = page_.find(zn, zs);
        if (!ze)
            return out;
        std::vector<FVector> zrows;
        for (std::size_t i = 0; i < ze->e2_dim; ++i) {
            ExtClass b{zn, zs, FVector(ze->e2_dim)};
            b.vector.set(i);
            auto e2 = e2_product(name, b);
            if (!e2)
                return out;
            zrows.push_back(*e2);
        }
        Solver sz(rows_matrix(zrows, d.target.vector.size()));
        auto z = sz.solve(d.target.vector);
        if (!z || z->is_zero())
            return out;
        DerivedDifferential r;
        r.d.r = d.r + 1;
        r.d.source = std::move(x);
        r.d.target = ExtClass{zn, zs, std::move(*z)};
        r.from.kind = Provenance::Divide;
        r.from.multiplier = name;
        r.from.differential = k;
        std::sort(used.begin(), used.end());
        used.erase(std::unique(used.begin(), used.end()), used.end());
        r.from.extensions = used;
        std::ostringstream text;
        text << "d_" << d.r << ' ' << class_text(d.source) << " = " << to_string(d.target.vector) << "; [" << name
             << "] " << class_text(r.d.source) << " = τ " << to_string(d.source.vector) << "; [" << name << "] "
             << class_text(r.d.target) << " = " << to_string(d.target.vector);
        r.from.text = text.str();
        if (ambiguous) {
            r.candidate = true;
            r.reason = "source not unique";
        }
        if (sz.kernel_basis().rows() > 0) {
            r.candidate = true;
            r.reason = "quotient by the multiplier is not unique";
        }
        if (finish(r))
            out.push_back(std::move(r));
        return out;
    }

private:
    // common checks; false drops the record
    bool finish(DerivedDifferential& r) const
    {
        const PageEntry* se = page_.find(r.d.source.n, r.d.source.s);
        const PageEntry* te = page_.find(r.d.target.n, r.d.target.s);
        if (!se || !te)
            return false;
        if (te->d2_in_known && page_.in_d2_image(r.d.target.n, r.d.target.s, r.d.target.vector))
            return false;  // target dies on E3: the differential is zero there
        if (!se->d2_out_known) {
            r.candidate = true;
            r.reason = "d2 on the source not computed";
        } else if (!se->d2.apply(r.d.source.vector).is_zero()) {
            return false;  // source does not survive to E3
        }
        if (!te->d2_in_known || te->rank_in > 0) {
            r.candidate = true;
            r.reason = "target defined only modulo d2 images";
        }
        if (r.d.r > 3) {
            r.candidate = true;
            r.reason = "indeterminacy from shorter differentials not tracked";
        }
        return true;
    }

    const PageData& page_;
    const std::vector<HiddenExtension>& exts_;
    std::map<std::string, MultTable> tables_;
};

}  // namespace

// ---------------------------------------------------------------- PageData

const PageEntry* PageData::find(int n, int s) const
{
    auto it = entries.find({n, s});
    return it == entries.end() ? nullptr : &it->second;
}

std::size_t PageData::e2_dim(int n, int s) const
{
    const PageEntry* e = find(n, s);
    return e ? e->e2_dim : 0;
}

std::size_t PageData::e3_dim(int n, int s) const
{
    const PageEntry* e = find(n, s);
    return e ? e->e3_basis.size() : 0;
}

bool PageData::in_d2_image(int n, int s, const FVector& x) const
{
    const PageEntry* e = find(n, s);
    if (!e)
        return false;
    if (x.is_zero())
        return true;
    if (e->image_in.rows() == 0)
        return false;
    return Solver(e->image_in).in_image(x);
}

std::vector<int> PageData::e3_coords(int n, int s, const FVector& x) const
{
    const PageEntry* e = find(n, s);
    if (!e || (e->d2_out_known && !e->d2.apply(x).is_zero()))
        return {};
    std::vector<FVector> rows = e->e3_basis;
    for (std::size_t i = 0; i < e->image_in.rows(); ++i)
        rows.push_back(e->image_in.row(i));
    auto c = Solver(rows_matrix(rows, e->e2_dim)).solve(x);
    if (!c)
        return {};
    std::vector<int> out(e->e3_basis.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = c->get(i) ? 1 : 0;
    return out;
}

PageData e3_page(const SecondaryResolution& sec, int max_n, int max_s)
{
    const Resolution& res = sec.resolution();
    PageData page;
    page.max_n = max_n < 0 ? res.max_n() : std::min(max_n, res.max_n());
    page.max_s = max_s < 0 ? res.max_s() : std::min(max_s, res.max_s());
    for (int n = res.min_stem(); n <= page.max_n; ++n)
        for (int s = 0; s <= page.max_s; ++s) {
            if (!res.computed(s, n + s))
                continue;
            PageEntry e;
            e.n = n;
            e.s = s;
            e.e2_dim = res.num_gens(s, n + s);
            e.d2_out_known = sec.d2_defined(n, s);
            if (e.d2_out_known) {
                e.d2 = sec.d2_matrix(n, s);
                e.rank_out = rank(e.d2);
            }
            e.image_in = FMatrix(0, e.e2_dim);
            if (s < 2 || !res.computed(s - 2, n + s - 1)) {
                e.d2_in_known = s < 2;
            } else if (sec.d2_defined(n + 1, s - 2)) {
                e.d2_in_known = true;
                RowReduced rr = row_reduce(sec.d2_matrix(n + 1, s - 2));
                for (std::size_t i = 0; i < rr.pivots.size(); ++i)
                    e.image_in.push_row(rr.rref.row(i));
                e.rank_in = rr.pivots.size();
            }
            // E3 representatives: kernel of d2 out, reduced modulo the incoming image
            FMatrix ker = e.d2_out_known ? Solver(e.d2).kernel_basis() : FMatrix::identity(e.e2_dim);
            Solver img(e.image_in);
            Solver acc(e.image_in);
            for (std::size_t i = 0; i < ker.rows(); ++i) {
                FVector rep = e.image_in.rows() ? img.reduce(ker.row(i)) : ker.row(i);
                if (rep.is_zero() || acc.in_image(rep))
                    continue;
                acc.append_row(rep);
                e.e3_basis.push_back(std::move(rep));
            }
            for (int j = 0; j < 3; ++j) {
                const int shift = 1 << j;
                if (!res.computed(s + 1, n + s + shift))
                    continue;
                e.h[j] = FMatrix(0, res.num_gens(s + 1, n + s + shift));
                for (std::size_t i = 0; i < e.e2_dim; ++i) {
                    ExtClass x{n, s, FVector(e.e2_dim)};
                    x.vector.set(i);
                    e.h[j].push_row(h_product(res, j, x).vector);
                }
            }
            page.entries.emplace(Key{n, s}, std::move(e));
        }
    return page;
}

// ---------------------------------------------------------- extensions

std::vector<HiddenExtension> extract_hidden(const std::vector<ProductRecord>& products)
{
    std::vector<HiddenExtension> out;
    for (const auto& p : products)
        if (!p.mod_tau && p.value.e.vector.is_zero() && !p.value.f.vector.is_zero())
            out.push_back(HiddenExtension{p.name, p.x, p.value.f, 1, true});
    return out;
}

std::vector<DerivedDifferential> leibniz_propagate(const PageData& page, const std::vector<Differential>& known,
                                                   const std::vector<HiddenExtension>& exts,
                                                   const std::vector<ProductRecord>& products)
{
    Propagator prop(page, exts, products);
    std::vector<DerivedDifferential> out;
    auto seen = [&](const DerivedDifferential& d) {
        for (const auto& o : out)
            if (o.d.r == d.d.r && o.d.source == d.d.source && o.d.target == d.d.target)
                return true;
        return false;
    };
    for (const auto& name : prop.multipliers())
        for (std::size_t k = 0; k < known.size(); ++k) {
            for (auto& d : prop.multiply(known, k, name))
                if (!seen(d))
                    out.push_back(std::move(d));
            for (auto& d : prop.divide(known, k, name))
                if (!seen(d))
                    out.push_back(std::move(d));
        }
    return out;
}

bool revalidate(const DerivedDifferential& d, const PageData& page, const std::vector<Differential>& known,
                const std::vector<HiddenExtension>& exts, const std::vector<ProductRecord>& products)
{
    if (d.from.differential >= known.size())
        return false;
    std::vector<Differential> k1{known[d.from.differential]};
    std::vector<HiddenExtension> e1;
    for (std::size_t i : d.from.extensions) {
        if (i >= exts.size() || exts[i].multiplier != d.from.multiplier)
            return false;
        e1.push_back(exts[i]);
    }
    std::vector<ProductRecord> p1;
    for (const auto& p : products)
        if (p.name == d.from.multiplier)
            p1.push_back(p);
    const Differential& src = known[d.from.differential];
    if (d.d.source.n - d.d.target.n != 1 || d.d.target.s - d.d.source.s != d.d.r || d.d.r != src.r + 1)
        return false;
    for (const auto& r : leibniz_propagate(page, k1, e1, p1))
        if (r.d.r == d.d.r && r.d.source == d.d.source && r.d.target == d.d.target && r.candidate == d.candidate)
            return true;
    return false;
}

std::string format_derived(const DerivedDifferential& d)
{
    std::ostringstream out;
    out << "d_" << d.d.r << ' ' << class_text(d.d.source) << " = " << to_string(d.d.target.vector)
        << (d.from.kind == Provenance::Multiply ? "  # multiply: " : "  # divide: ") << d.from.text;
    if (d.candidate)
        out << "  (candidate: " << d.reason << ')';
    return out.str();
}

// ------------------------------------------------------------------- chart

namespace {

constexpr double kCell = 24.0;
constexpr double kMargin = 30.0;

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f", v);
    return buf;
}

struct Layout {
    int max_n, max_s;
    double x(int n, std::size_t i, std::size_t k) const
    {
        const double off = (static_cast<double>(i) - (static_cast<double>(k) - 1) / 2.0) * 5.0;
        return kMargin + (n + 0.5) * kCell + off;
    }
    double y(int s, std::size_t i, std::size_t k) const
    {
        const double off = (static_cast<double>(i) - (static_cast<double>(k) - 1) / 2.0) * 3.0;
        return kMargin + (max_s - s + 0.5) * kCell - off;
    }
};

}  // namespace

std::string chart_svg(const PageData& page, const ChartOptions& opt)
{
    const int max_n = opt.max_n < 0 ? page.max_n : opt.max_n;
    const int max_s = opt.max_s < 0 ? page.max_s : opt.max_s;
    const bool e2 = opt.page <= 2;
    Layout L{std::max(max_n, 0), std::max(max_s, 0)};
    const double w = 2 * kMargin + (L.max_n + 1) * kCell, h = 2 * kMargin + (L.max_s + 1) * kCell;
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(w) << "\" height=\"" << num(h)
        << "\" viewBox=\"0 0 " << num(w) << ' ' << num(h) << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << num(kMargin) << "\" y=\"" << num(kMargin / 2) << "\" font-size=\"12\">E" << (e2 ? 2 : 3)
        << "</text>\n";
    out << "<g stroke=\"#ddd\" stroke-width=\"0.5\">\n";
    for (int n = 0; n <= L.max_n + 1; n += 1)
        out << "<line x1=\"" << num(kMargin + n * kCell) << "\" y1=\"" << num(kMargin) << "\" x2=\""
            << num(kMargin + n * kCell) << "\" y2=\"" << num(h - kMargin) << "\"/>\n";
    for (int s = 0; s <= L.max_s + 1; ++s)
        out << "<line x1=\"" << num(kMargin) << "\" y1=\"" << num(kMargin + s * kCell) << "\" x2=\""
            << num(w - kMargin) << "\" y2=\"" << num(kMargin + s * kCell) << "\"/>\n";
    out << "</g>\n<g font-size=\"8\" fill=\"#555\">\n";
    for (int n = 0; n <= L.max_n; n += 5)
        out << "<text x=\"" << num(kMargin + (n + 0.3) * kCell) << "\" y=\"" << num(h - kMargin / 3) << "\">" << n
            << "</text>\n";
    for (int s = 0; s <= L.max_s; s += 5)
        out << "<text x=\"" << num(kMargin / 4) << "\" y=\"" << num(kMargin + (L.max_s - s + 0.6) * kCell) << "\">"
            << s << "</text>\n";
    out << "</g>\n";

    auto visible = [&](int n, int s) { return n >= 0 && n <= max_n && s >= 0 && s <= max_s; };
    auto count = [&](const PageEntry& e) { return e2 ? e.e2_dim : e.e3_basis.size(); };
    // coordinates of a vector in the dots of (n, s)
    auto coords = [&](int n, int s, const FVector& v) -> std::vector<int> {
        if (!e2)
            return page.e3_coords(n, s, v);
        std::vector<int> c(v.size());
        for (std::size_t i = 0; i < v.size(); ++i)
            c[i] = v.get(i);
        return c;
    };
    auto dot_vector = [&](const PageEntry& e, std::size_t i) {
        if (!e2)
            return e.e3_basis[i];
        FVector v(e.e2_dim);
        v.set(i);
        return v;
    };

    // structure lines
    out << "<g stroke=\"#000\" stroke-width=\"0.7\">\n";
    for (const auto& [key, e] : page.entries) {
        if (!visible(e.n, e.s))
            continue;
        const std::size_t k = count(e);
        for (int j = 0; j < 3; ++j) {
            if (e.h[j].rows() == 0)
                continue;
            const int tn = e.n + (1 << j) - 1, ts = e.s + 1;
            const PageEntry* te = page.find(tn, ts);
            if (!te || !visible(tn, ts))
                continue;
            for (std::size_t i = 0; i < k; ++i) {
                FVector prod = e.h[j].apply(dot_vector(e, i));
                auto c = coords(tn, ts, prod);
                for (std::size_t m = 0; m < c.size(); ++m)
                    if (c[m])
                        out << "<line class=\"h" << j << "\" x1=\"" << num(L.x(e.n, i, k)) << "\" y1=\""
                            << num(L.y(e.s, i, k)) << "\" x2=\"" << num(L.x(tn, m, count(*te))) << "\" y2=\""
                            << num(L.y(ts, m, count(*te))) << "\"/>\n";
            }
        }
    }
    out << "</g>\n";

    // differentials
    out << "<g stroke=\"#1565c0\" stroke-width=\"0.8\">\n";
    auto arrow = [&](int r, int n, int s, std::size_t i, std::size_t k, int tn, int ts, std::size_t m,
                     std::size_t tk) {
        out << "<line class=\"d" << r << "\" x1=\"" << num(L.x(n, i, k)) << "\" y1=\"" << num(L.y(s, i, k))
            << "\" x2=\"" << num(L.x(tn, m, tk)) << "\" y2=\"" << num(L.y(ts, m, tk)) << "\"/>\n";
    };
    if (e2) {
        for (const auto& [key, e] : page.entries) {
            if (!visible(e.n, e.s) || !e.d2_out_known || !visible(e.n - 1, e.s + 2))
                continue;
            const PageEntry* te = page.find(e.n - 1, e.s + 2);
            if (!te)
                continue;
            for (std::size_t i = 0; i < e.e2_dim; ++i)
                for (std::size_t m = 0; m < te->e2_dim; ++m)
                    if (e.d2.get(i, m))
                        arrow(2, e.n, e.s, i, e.e2_dim, e.n - 1, e.s + 2, m, te->e2_dim);
        }
    } else {
        for (const auto& d : opt.extra) {
            const PageEntry* se = page.find(d.source.n, d.source.s);
            const PageEntry* te = page.find(d.target.n, d.target.s);
            if (!se || !te || !visible(d.source.n, d.source.s) || !visible(d.target.n, d.target.s))
                continue;
            auto a = page.e3_coords(d.source.n, d.source.s, d.source.vector);
            auto b = page.e3_coords(d.target.n, d.target.s, d.target.vector);
            for (std::size_t i = 0; i < a.size(); ++i)
                for (std::size_t m = 0; m < b.size(); ++m)
                    if (a[i] && b[m])
                        arrow(d.r, d.source.n, d.source.s, i, a.size(), d.target.n, d.target.s, m, b.size());
        }
    }
    out << "</g>\n";

    // dots, bottom-to-top then left-to-right
    std::vector<const PageEntry*> order;
    for (const auto& [key, e] : page.entries)
        order.push_back(&e);
    std::sort(order.begin(), order.end(),
              [](const PageEntry* a, const PageEntry* b) { return std::tie(a->s, a->n) < std::tie(b->s, b->n); });
    out << "<g fill=\"#000\">\n";
    for (const PageEntry* e : order) {
        if (!visible(e->n, e->s))
            continue;
        const std::size_t k = count(*e);
        for (std::size_t i = 0; i < k; ++i)
            out << "<circle class=\"dot\" cx=\"" << num(L.x(e->n, i, k)) << "\" cy=\"" << num(L.y(e->s, i, k))
                << "\" r=\"2\"><title>x_(" << e->n << ", " << e->s << ", " << i << ")</title></circle>\n";
    }
    out << "</g>\n</svg>\n";
    return out.str();
}

void emit_chart(const PageData& page, const ChartOptions& opt, const std::string& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot write chart " + path);
    out << chart_svg(page, opt);
    if (!out)
        throw std::runtime_error("cannot write chart " + path);
}

}  // namespace adsec

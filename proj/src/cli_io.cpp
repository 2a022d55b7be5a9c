#include "adsec/cli_io.hpp"

#include "adsec/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <regex>
#include <sstream>

namespace adsec {

namespace fs = std::filesystem;

namespace {

const std::string kTau = "τ";
const std::string kDot = "·";
const std::string kPm = "±";

std::string trim_ws(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool starts_with(const std::string& s, const std::string& p) { return s.compare(0, p.size(), p) == 0; }

int to_int(const std::string& s, const std::string& what)
{
    try {
        std::size_t pos = 0;
        const int v = std::stoi(s, &pos);
        if (pos != s.size())
            throw ParseError("");
        return v;
    } catch (const std::exception&) {
        throw ParseError("bad " + what + ": '" + s + "'");
    }
}

// Splits "lhs = rhs" at the first " = "
std::pair<std::string, std::string> split_eq(const std::string& line)
{
    const auto p = line.find(" = ");
    if (p == std::string::npos)
        throw ParseError("missing ' = ' in '" + line + "'");
    return {trim_ws(line.substr(0, p)), trim_ws(line.substr(p + 3))};
}

ExtClass basis_class(int n, int s, std::size_t dim, std::size_t i)
{
    ExtClass x{n, s, FVector(dim)};
    x.vector.set(i);
    return x;
}

std::string sanitize(const std::string& name)
{
    std::string out;
    for (char c : name)
        out += (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-') ? c : '_';
    return out.empty() ? "module" : out;
}

bool same_module(const ModulePresentation& a, const ModulePresentation& b)
{
    return a.degrees() == b.degrees() && a.actions() == b.actions() && a.cap() == b.cap();
}

void check_class(const Resolution& r, int n, int s, const FVector& v, const std::string& what)
{
    if (n < r.min_stem() || s < 0 || n > r.max_n() || s > r.max_s() || !r.computed(s, n + s))
        throw ParseError(what + " at (" + std::to_string(n) + ", " + std::to_string(s) + ") is outside the range");
    if (v.size() != r.num_gens(s, n + s))
        throw ParseError(what + " has " + std::to_string(v.size()) + " entries, expected " +
                         std::to_string(r.num_gens(s, n + s)));
}

SecondaryValue spec_value(const Resolution& r, const ClassSpec& c, const std::string& what)
{
    check_class(r, c.n, c.s, c.e, what);
    SecondaryValue v = SecondaryValue::lift(r, ExtClass{c.n, c.s, c.e});
    if (!c.f.empty()) {
        check_class(r, c.n, c.s + 1, c.f, what + " (tau part)");
        v.f.vector = c.f;
    }
    return v;
}

std::vector<Differential> all_d2(const PageData& page)
{
    std::vector<Differential> out;
    for (const auto& [key, e] : page.entries) {
        if (!e.d2_out_known)
            continue;
        for (std::size_t i = 0; i < e.e2_dim; ++i)
            if (!e.d2.row(i).is_zero())
                out.push_back(Differential{2, basis_class(e.n, e.s, e.e2_dim, i), ExtClass{e.n - 1, e.s + 2, e.d2.row(i)}});
    }
    return out;
}

struct Pipeline {
    Resolution res;
    SecondaryResolution sec;
    explicit Pipeline(Resolution r) : res(std::move(r)), sec(res) { sec.compute(); }
};

}  // namespace

// ------------------------------------------------------------ class tokens

ClassToken parse_class_token(const std::string& text)
{
    static const std::regex re(R"(^\s*x_\(\s*(-?\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*\)\s*$)");
    std::smatch m;
    if (!std::regex_match(text, m, re))
        throw ParseError("bad class token '" + text + "' (expected x_(n, s, i))");
    return ClassToken{to_int(m[1], "stem"), to_int(m[2], "filtration"), static_cast<std::size_t>(to_int(m[3], "index"))};
}

std::string format_class_token(const ClassToken& c)
{
    return "x_(" + std::to_string(c.n) + ", " + std::to_string(c.s) + ", " + std::to_string(c.index) + ")";
}

FVector parse_vector(const std::string& text)
{
    static const std::regex re(R"(^\s*\[\s*([01](\s*,\s*[01])*)?\s*\]\s*$)");
    std::smatch m;
    if (!std::regex_match(text, m, re))
        throw ParseError("bad class vector '" + text + "' (expected e.g. [1, 0])");
    if (!m[1].matched)
        throw ParseError("empty class vector");
    std::vector<int> bits;
    for (char c : std::string(m[1]))
        if (c == '0' || c == '1')
            bits.push_back(c - '0');
    return FVector::from_bits(bits);
}

std::string format_vector(const FVector& v) { return to_string(v); }

// ----------------------------------------------------------- module files

ModulePresentation parse_module(const std::string& text, const std::string& name)
{
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    std::optional<ModulePresentation> m;
    std::string mod_name = name;
    std::map<std::pair<Profile, std::size_t>, int> seen;
    static const std::regex action_re(R"(^(Sq\([0-9,\s]*\))\s+g(\d+)\s*=\s*(.+)$)");
    auto fail = [&](const std::string& msg) -> ParseError {
        return ParseError("module line " + std::to_string(lineno) + ": " + msg);
    };
    bool have_p = false;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = trim_ws(raw.substr(0, raw.find('#')));
        if (line.empty())
            continue;
        std::istringstream ls(line);
        std::string head;
        ls >> head;
        if (head == "p") {
            std::string p;
            ls >> p;
            if (p != "2")
                throw fail("only p = 2 is supported");
            have_p = true;
        } else if (head == "name") {
            std::getline(ls, mod_name);
            mod_name = trim_ws(mod_name);
        } else if (head == "gens") {
            if (m)
                throw fail("duplicate gens line");
            std::vector<int> degs;
            std::string tok;
            while (ls >> tok) {
                int d;
                try {
                    d = to_int(tok, "degree");
                } catch (const ParseError& e) {
                    throw fail(e.what());
                }
                if (d < 0)
                    throw fail("negative generator degree " + tok);
                degs.push_back(d);
            }
            if (degs.empty())
                throw fail("no generators");
            m.emplace(degs, mod_name);
        } else {
            std::smatch am;
            if (!std::regex_match(line, am, action_re))
                throw fail("cannot parse '" + line + "'");
            if (!m)
                throw fail("action before the gens line");
            Profile r;
            try {
                r = parse_profile(am[1]);
            } catch (const std::exception&) {
                throw fail("bad operation " + std::string(am[1]));
            }
            if (r.empty())
                throw fail("Sq() acts as the identity");
            const std::size_t g = static_cast<std::size_t>(to_int(am[2], "generator"));
            if (g >= m->degrees().size())
                throw fail("unknown generator g" + std::string(am[2]));
            if (seen.count({r, g}))
                throw fail("duplicate action");
            seen[{r, g}] = lineno;
            const int t = m->degrees()[g] + profile_degree(r);
            FVector v(m->dim(t));
            const std::string rhs = trim_ws(am[3]);
            if (rhs != "0") {
                std::istringstream rs(rhs);
                std::string tok;
                bool want_term = true;
                while (rs >> tok) {
                    if (!want_term) {
                        if (tok != "+")
                            throw fail("expected '+' in '" + rhs + "'");
                        want_term = true;
                        continue;
                    }
                    if (tok.size() < 2 || tok[0] != 'g')
                        throw fail("bad term '" + tok + "'");
                    const std::size_t j = static_cast<std::size_t>(to_int(tok.substr(1), "generator"));
                    if (j >= m->degrees().size())
                        throw fail("unknown generator " + tok);
                    if (m->degrees()[j] != t)
                        throw fail(tok + " has degree " + std::to_string(m->degrees()[j]) + ", expected " +
                                   std::to_string(t));
                    v.flip(m->local_index(j));
                    want_term = false;
                }
                if (want_term)
                    throw fail("dangling '+'");
            }
            if (!v.is_zero())
                m->set_action(r, g, v);
        }
    }
    if (!have_p)
        throw ParseError("module file: missing 'p 2' header");
    if (!m)
        throw ParseError("module file: missing gens line");
    m->set_name(mod_name);
    try {
        m->validate();
    } catch (const std::exception& e) {
        throw ParseError(std::string("module file: ") + e.what());
    }
    return *m;
}

ModulePresentation load_module_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot read module file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_module(ss.str(), fs::path(path).stem().string());
}

ModulePresentation resolve_module(const std::string& module)
{
    if (module.empty() || module == "S_2")
        return ModulePresentation::sphere();
    return load_module_file(module);
}

// ------------------------------------------------------------ checkpoints

std::string checkpoint_path(const RunConfig& cfg, const std::string& module_name, int max_n, int max_s)
{
    return (fs::path(cfg.save_dir) /
            (sanitize(module_name) + "_n" + std::to_string(max_n) + "_s" + std::to_string(max_s) + ".adsec"))
        .string();
}

Resolution open_resolution(const RunConfig& cfg, const ModulePresentation& m)
{
    if (cfg.max_n < 0 || cfg.max_s < 0)
        throw ParseError("max n and max s must be non-negative");
    if (cfg.threads > 0)
        set_worker_count(cfg.threads);
    const std::string name = m.name().empty() ? "module" : m.name();
    std::size_t fresh = 0;
    auto last_save = std::chrono::steady_clock::now();
    std::string path;
    Resolution res(m);

    if (!cfg.save_dir.empty()) {
        std::error_code ec;
        fs::create_directories(cfg.save_dir, ec);
        if (ec)
            throw std::runtime_error("cannot create save directory " + cfg.save_dir + ": " + ec.message());
        path = checkpoint_path(cfg, name, cfg.max_n, cfg.max_s);
        std::string from;
        if (fs::exists(path)) {
            from = path;
        } else {
            // largest smaller range of the same module
            static const std::regex re(R"(^(.*)_n(\d+)_s(\d+)\.adsec$)");
            int best_n = -1, best_s = -1;
            for (const auto& ent : fs::directory_iterator(cfg.save_dir)) {
                std::smatch mm;
                const std::string fn = ent.path().filename().string();
                if (!std::regex_match(fn, mm, re) || mm[1] != sanitize(name))
                    continue;
                const int n = std::stoi(mm[2]), s = std::stoi(mm[3]);
                if (n <= cfg.max_n && s <= cfg.max_s && std::make_pair(n, s) > std::make_pair(best_n, best_s)) {
                    best_n = n;
                    best_s = s;
                    from = ent.path().string();
                }
            }
        }
        if (!from.empty()) {
            res = Resolution::load(from);
            if (!same_module(res.module(), m))
                throw std::runtime_error("checkpoint " + from + " was computed for a different module");
        }
    }
    auto progress = [&](int, int) {
        ++fresh;
        if (!path.empty()) {
            const auto now = std::chrono::steady_clock::now();
            if (now - last_save > std::chrono::seconds(30)) {
                res.save(path);
                last_save = now;
            }
        }
        if (cfg.interrupt_after && fresh >= cfg.interrupt_after) {
            if (!path.empty())
                res.save(path);
            throw Interrupted("interrupted after " + std::to_string(fresh) + " bidegrees");
        }
    };
    res.extend(cfg.max_n, cfg.max_s, progress);
    if (!path.empty())
        res.save(path);
    return res;
}

// ------------------------------------------------------------ file lines

std::string format_d2_line(const D2Line& l)
{
    return "d_2 " + format_class_token(l.x) + " = " + format_vector(l.target);
}

D2Line parse_d2_line(const std::string& line)
{
    auto [lhs, rhs] = split_eq(line);
    if (!starts_with(lhs, "d_2 "))
        throw ParseError("bad d2 line '" + line + "'");
    return D2Line{parse_class_token(lhs.substr(4)), parse_vector(rhs)};
}

std::string format_product_header(const ProductHeader& h)
{
    std::string out = "# product [" + h.name + "] at (" + std::to_string(h.n) + ", " + std::to_string(h.s) +
                      ") = " + format_vector(h.e);
    if (!h.f.empty())
        out += " + " + kTau + " " + format_vector(h.f);
    return out;
}

ProductHeader parse_product_header(const std::string& line)
{
    static const std::regex re(R"(^# product \[(.+)\] at \(\s*(-?\d+)\s*,\s*(\d+)\s*\) = (\[[^\]]*\])(?: \+ τ (\[[^\]]*\]))?\s*$)");
    std::smatch m;
    if (!std::regex_match(line, m, re))
        throw ParseError("bad product header '" + line + "'");
    ProductHeader h;
    h.name = m[1];
    h.n = to_int(m[2], "stem");
    h.s = to_int(m[3], "filtration");
    h.e = parse_vector(m[4]);
    if (m[5].matched)
        h.f = parse_vector(m[5]);
    return h;
}

std::string format_product_line(const ProductLine& l)
{
    std::string out = "[" + l.name + "] " + format_class_token(l.x) + " = ";
    if (l.mod_tau)
        return out + format_vector(l.e) + " mod " + kTau;
    if (!l.e.empty())
        out += format_vector(l.e);
    if (!l.f.empty())
        out += (l.e.empty() ? "" : " + ") + kTau + " " + format_vector(l.f);
    return out;
}

ProductLine parse_product_line(const std::string& line)
{
    static const std::regex re(R"(^\[(.+)\] (x_\([^)]*\)) = (.+)$)");
    std::smatch m;
    if (!std::regex_match(line, m, re))
        throw ParseError("bad product line '" + line + "'");
    ProductLine l;
    l.name = m[1];
    l.x = parse_class_token(m[2]);
    std::string rhs = trim_ws(m[3]);
    const std::string mod = " mod " + kTau;
    if (rhs.size() > mod.size() && rhs.compare(rhs.size() - mod.size(), mod.size(), mod) == 0) {
        l.mod_tau = true;
        l.e = parse_vector(rhs.substr(0, rhs.size() - mod.size()));
        return l;
    }
    const auto tp = rhs.find(kTau);
    if (tp == std::string::npos) {
        l.e = parse_vector(rhs);
        return l;
    }
    std::string before = trim_ws(rhs.substr(0, tp));
    if (!before.empty()) {
        if (before.size() < 2 || before.back() != '+')
            throw ParseError("bad product value '" + rhs + "'");
        l.e = parse_vector(before.substr(0, before.size() - 1));
    }
    l.f = parse_vector(rhs.substr(tp + kTau.size()));
    return l;
}

std::string format_massey_line(const MasseyLine& l)
{
    std::string out = "<" + format_class_token(l.c) + ", [" + l.b + "], [" + l.a + "]> = ";
    if (l.e.empty() && l.f.empty())
        return out + "0";
    out += kPm + "(";
    if (!l.e.empty())
        out += format_vector(l.e);
    if (!l.f.empty())
        out += (l.e.empty() ? "" : " + ") + kTau + format_vector(l.f);
    return out + ")";
}

MasseyLine parse_massey_line(const std::string& line)
{
    static const std::regex re(R"(^<(x_\([^)]*\)), \[(.+)\], \[(.+)\]> = (.+)$)");
    std::smatch m;
    if (!std::regex_match(line, m, re))
        throw ParseError("bad massey line '" + line + "'");
    MasseyLine l;
    l.c = parse_class_token(m[1]);
    l.b = m[2];
    l.a = m[3];
    std::string rhs = trim_ws(m[4]);
    if (rhs == "0")
        return l;
    if (!starts_with(rhs, kPm + "(") || rhs.back() != ')')
        throw ParseError("bad massey value '" + rhs + "'");
    rhs = rhs.substr(kPm.size() + 1, rhs.size() - kPm.size() - 2);
    const auto tp = rhs.find(kTau);
    if (tp == std::string::npos) {
        l.e = parse_vector(rhs);
        return l;
    }
    std::string before = trim_ws(rhs.substr(0, tp));
    if (!before.empty()) {
        if (before.back() != '+')
            throw ParseError("bad massey value '" + rhs + "'");
        l.e = parse_vector(before.substr(0, before.size() - 1));
    }
    l.f = parse_vector(rhs.substr(tp + kTau.size()));
    return l;
}

std::string format_filtration_one_line(const FiltrationOneLine& l)
{
    return "h_" + std::to_string(l.j) + " " + kDot + " " + format_class_token(l.x) + " = " + format_vector(l.v);
}

FiltrationOneLine parse_filtration_one_line(const std::string& line)
{
    auto [lhs, rhs] = split_eq(line);
    const std::string sep = " " + kDot + " ";
    const auto p = lhs.find(sep);
    if (!starts_with(lhs, "h_") || p == std::string::npos)
        throw ParseError("bad filtration one line '" + line + "'");
    FiltrationOneLine l;
    l.j = to_int(lhs.substr(2, p - 2), "h index");
    l.x = parse_class_token(lhs.substr(p + sep.size()));
    l.v = parse_vector(rhs);
    return l;
}

std::vector<ProductRecord> read_product_file(std::istream& in, const PageData& page)
{
    std::vector<ProductRecord> out;
    std::optional<ProductHeader> h;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim_ws(line);
        if (line.empty())
            continue;
        try {
            if (starts_with(line, "# product")) {
                h = parse_product_header(line);
                continue;
            }
            if (line[0] == '#')
                continue;
            if (!h)
                throw ParseError("product line before the header");
            ProductLine l = parse_product_line(line);
            const PageEntry* xe = page.find(l.x.n, l.x.s);
            const PageEntry* ee = page.find(l.x.n + h->n, l.x.s + h->s);
            if (!xe || !ee || l.x.index >= xe->e2_dim)
                throw ParseError("class outside the computed range");
            ProductRecord r;
            r.name = l.name;
            r.x = basis_class(l.x.n, l.x.s, xe->e2_dim, l.x.index);
            r.mod_tau = l.mod_tau;
            r.value.e = ExtClass{l.x.n + h->n, l.x.s + h->s, l.e.empty() ? FVector(ee->e2_dim) : l.e};
            const PageEntry* fe = page.find(l.x.n + h->n, l.x.s + h->s + 1);
            const std::size_t fdim = fe ? fe->e2_dim : 0;
            r.value.f = ExtClass{l.x.n + h->n, l.x.s + h->s + 1, l.f.empty() ? FVector(fdim) : l.f};
            if (r.value.e.vector.size() != ee->e2_dim || r.value.f.vector.size() != fdim)
                throw ParseError("vector length does not match the bidegree");
            out.push_back(std::move(r));
        } catch (const ParseError& e) {
            throw ParseError("product file line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

// -------------------------------------------------------------- commands

void run_secondary(const RunConfig& cfg, std::ostream& out)
{
    Pipeline p(open_resolution(cfg, resolve_module(cfg.module)));
    if (!cfg.timing_log.empty())
        p.sec.write_timing_log(cfg.timing_log);
    if (!cfg.stem_maxima.empty()) {
        std::ofstream sm(cfg.stem_maxima);
        if (!sm)
            throw std::runtime_error("cannot write " + cfg.stem_maxima);
        write_stem_maxima(p.sec.timings(), sm);
    }
    const Resolution& r = p.res;
    for (int n = r.min_stem(); n <= r.max_n(); ++n)
        for (int s = 0; s <= r.max_s(); ++s) {
            if (!p.sec.d2_defined(n, s))
                continue;
            const FMatrix d = p.sec.d2_matrix(n, s);
            for (std::size_t i = 0; i < d.rows(); ++i)
                if (!d.row(i).is_zero())
                    out << format_d2_line(D2Line{ClassToken{n, s, i}, d.row(i)}) << '\n';
        }
}

void run_product(const RunConfig& cfg, const ClassSpec& a, std::ostream& out)
{
    const ModulePresentation m = resolve_module(cfg.module);
    const bool sphere = same_module(m, ModulePresentation::sphere());
    Pipeline pm(open_resolution(cfg, m));
    std::unique_ptr<Pipeline> ps;
    if (!sphere)
        ps = std::make_unique<Pipeline>(open_resolution(cfg, ModulePresentation::sphere()));
    const Pipeline& q = sphere ? pm : *ps;

    const SecondaryValue av = spec_value(pm.res, a, "class " + a.name);
    if (!pm.sec.d2_defined(a.n, a.s))
        throw ParseError("d2 of " + a.name + " is outside the computed range");
    const ExtClass d2a = pm.sec.d2(av.e);
    if (!d2a.vector.is_zero())
        throw std::domain_error("class " + a.name + " does not survive d2: d_2 = " + format_vector(d2a.vector));
    SecondaryChainMap map(pm.sec, q.sec, av);
    map.extend(pm.res.max_n());

    out << format_product_header(ProductHeader{a.name, a.n, a.s, a.e, a.f}) << '\n';
    const Resolution& r = q.res;
    for (int n = r.min_stem(); n <= r.max_n(); ++n)
        for (int s = 0; s <= r.max_s(); ++s) {
            if (!r.computed(s, n + s) || !product_defined(map, n, s))
                continue;
            const std::size_t dim = r.num_gens(s, n + s);
            const bool known = q.sec.d2_defined(n, s);
            const FMatrix d2 = known ? q.sec.d2_matrix(n, s) : FMatrix();
            for (std::size_t i = 0; i < dim; ++i) {
                const ExtClass x = basis_class(n, s, dim, i);
                const SecondaryValue v = product(map, SecondaryValue::lift(r, x));
                ProductLine l;
                l.name = a.name;
                l.x = ClassToken{n, s, i};
                if (!known || !d2.row(i).is_zero()) {
                    if (v.e.vector.is_zero())
                        continue;
                    l.mod_tau = true;
                    l.e = v.e.vector;
                } else {
                    if (v.is_zero())
                        continue;
                    if (!v.e.vector.is_zero())
                        l.e = v.e.vector;
                    if (!v.f.vector.is_zero())
                        l.f = v.f.vector;
                }
                out << format_product_line(l) << '\n';
            }
        }
}

void run_massey(const RunConfig& cfg, const ClassSpec& a, const ClassSpec& b, std::ostream& out)
{
    const ModulePresentation m = resolve_module(cfg.module);
    if (!same_module(m, ModulePresentation::sphere()))
        throw ParseError("massey products are only available for S_2");
    if (!a.f.empty() && !a.f.is_zero())
        throw ParseError("massey products with a nonzero τ part in a are not supported");
    if (!b.f.empty() && !b.f.is_zero())
        throw ParseError("massey products with a nonzero τ part in b are not supported");
    Pipeline p(open_resolution(cfg, m));
    const Resolution& r = p.res;
    ClassSpec a0 = a, b0 = b;
    a0.f = FVector();
    b0.f = FVector();
    const SecondaryValue av = spec_value(r, a0, "class a"), bv = spec_value(r, b0, "class b");
    for (const auto* c : {&a0, &b0})
        if (!p.sec.d2_defined(c->n, c->s) || !p.sec.d2(ExtClass{c->n, c->s, c->e}).vector.is_zero())
            throw std::domain_error("class " + c->name + " does not survive d2");
    SecondaryChainMap ma(p.sec, p.sec, av), mb(p.sec, p.sec, bv);
    std::optional<MasseyContext> ctx;
    try {
        ctx.emplace(p.sec, ma, mb);
    } catch (const std::domain_error& e) {
        std::string what = e.what();
        mb.extend(a.n + b.n);
        if (product_defined(mb, a.n, a.s)) {
            const SecondaryValue ab = product(mb, av);
            what += ": [" + b.name + "][" + a.name + "] = " + format_vector(ab.e.vector) + " + " + kTau + " " +
                    format_vector(ab.f.vector);
        }
        throw std::domain_error(what);
    }
    ctx->extend(r.max_n());
    out << "# massey <-, [" << b.name << "], [" << a.name << "]> a at (" << a.n << ", " << a.s
        << ") = " << format_vector(a.e) << ", b at (" << b.n << ", " << b.s << ") = " << format_vector(b.e) << '\n';
    for (int n = r.min_stem(); n <= r.max_n(); ++n)
        for (int s = 1; s <= r.max_s(); ++s) {
            if (!ctx->defined(n, s) || !p.sec.d2_defined(n, s))
                continue;
            const FMatrix d2 = p.sec.d2_matrix(n, s);
            const std::size_t dim = r.num_gens(s, n + s);
            for (std::size_t i = 0; i < dim; ++i) {
                if (!d2.row(i).is_zero())
                    continue;
                auto v = ctx->massey(basis_class(n, s, dim, i));
                if (!v)
                    continue;
                MasseyLine l;
                l.c = ClassToken{n, s, i};
                l.b = b.name;
                l.a = a.name;
                if (!v->e.vector.is_zero())
                    l.e = v->e.vector;
                if (!v->f.vector.is_zero())
                    l.f = v->f.vector;
                out << format_massey_line(l) << '\n';
            }
        }
}

void run_filtration_one(const RunConfig& cfg, std::ostream& out)
{
    const Resolution r = open_resolution(cfg, resolve_module(cfg.module));
    for (int n = r.min_stem(); n <= r.max_n(); ++n)
        for (int s = 0; s <= r.max_s(); ++s) {
            if (!r.computed(s, n + s))
                continue;
            const std::size_t dim = r.num_gens(s, n + s);
            for (std::size_t i = 0; i < dim; ++i)
                for (int j = 0; j < 4; ++j) {
                    if (!r.computed(s + 1, n + s + (1 << j)))
                        continue;
                    const ExtClass v = h_product(r, j, basis_class(n, s, dim, i));
                    if (!v.vector.is_zero())
                        out << format_filtration_one_line(FiltrationOneLine{j, ClassToken{n, s, i}, v.vector}) << '\n';
                }
        }
}

namespace {

std::vector<ProductRecord> read_products(const std::vector<std::string>& files, const PageData& page)
{
    std::vector<ProductRecord> all;
    for (const auto& f : files) {
        std::ifstream in(f);
        if (!in)
            throw ParseError("cannot read product file " + f);
        auto recs = read_product_file(in, page);
        all.insert(all.end(), std::make_move_iterator(recs.begin()), std::make_move_iterator(recs.end()));
    }
    return all;
}

}  // namespace

void run_chart(const RunConfig& cfg, int page_no, const std::string& path, const std::vector<std::string>& product_files)
{
    Pipeline p(open_resolution(cfg, resolve_module(cfg.module)));
    const PageData page = e3_page(p.sec);
    ChartOptions opt;
    opt.page = page_no;
    if (page_no >= 3 && !product_files.empty()) {
        const auto products = read_products(product_files, page);
        for (const auto& d : leibniz_propagate(page, all_d2(page), extract_hidden(products), products))
            if (!d.candidate)
                opt.extra.push_back(d.d);
    }
    emit_chart(page, opt, path);
}

void run_propagate(const RunConfig& cfg, const std::vector<std::string>& product_files, std::ostream& out)
{
    Pipeline p(open_resolution(cfg, resolve_module(cfg.module)));
    const PageData page = e3_page(p.sec);
    const auto products = read_products(product_files, page);
    for (const auto& d : leibniz_propagate(page, all_d2(page), extract_hidden(products), products))
        out << format_derived(d) << '\n';
}

void write_stem_maxima(const std::vector<TimingRecord>& timings, std::ostream& out)
{
    std::map<int, const TimingRecord*> best;
    for (const auto& r : timings) {
        auto& b = best[r.t - r.s];
        if (!b || r.cpu_us > b->cpu_us)
            b = &r;
    }
    out << "# n s t index cpu_us\n";
    for (const auto& [n, r] : best)
        out << n << ' ' << r->s << ' ' << r->t << ' ' << r->index << ' ' << r->cpu_us << '\n';
}

}  // namespace adsec

// adsec: secondary Adams spectral sequence data from the command line.
//
// Every prompt has a flag; prompts are only shown for missing flags (on
// stderr, answers on stdin; an empty answer takes the default). --batch never
// prompts. Exit codes: 0 success, 1 usage error, 2 computation error.

#include "adsec/cli_io.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

using namespace adsec;

namespace {

struct Prompter {
    bool batch = false;

    std::string ask(const std::string& prompt, const std::string& def = "") const
    {
        if (batch)
            return def;
        std::cerr << prompt << ' ' << std::flush;
        std::string line;
        if (!std::getline(std::cin, line))
            return def;
        while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
            line.pop_back();
        return line.empty() ? def : line;
    }

    std::string require(const std::string& prompt, const std::string& what) const
    {
        std::string v = ask(prompt);
        if (v.empty())
            throw ParseError("missing " + what);
        return v;
    }
};

int to_int(const std::string& s, const std::string& what)
{
    try {
        std::size_t pos = 0;
        int v = std::stoi(s, &pos);
        if (pos == s.size())
            return v;
    } catch (const std::exception&) {
    }
    throw ParseError("bad " + what + ": '" + s + "'");
}

struct Common {
    std::optional<std::string> module, save_dir;
    std::optional<int> max_n, max_s;
    std::size_t threads = 0;
    std::size_t interrupt_after = 0;
    std::string output;

    void add(CLI::App* app)
    {
        app->add_option("--module", module, "S_2 or a module file");
        app->add_option("--save-dir", save_dir, "checkpoint directory");
        app->add_option("--max-n", max_n, "maximum stem")->check(CLI::NonNegativeNumber);
        app->add_option("--max-s", max_s, "maximum filtration")->check(CLI::NonNegativeNumber);
        app->add_option("--threads", threads, "worker threads (default: ADSEC_THREADS or all cores)");
        app->add_option("-o,--output", output, "output file (default: stdout)");
        app->add_option("--interrupt-after", interrupt_after)->group("");
    }

    RunConfig config(const Prompter& p) const
    {
        RunConfig c;
        c.module = module ? *module : p.ask("Module (default: S_2):", "S_2");
        c.save_dir = save_dir ? *save_dir : p.ask("Module save directory (optional):", "");
        c.max_n = max_n ? *max_n : to_int(p.ask("Max n (default: 30):", "30"), "max n");
        c.max_s = max_s ? *max_s : to_int(p.ask("Max s (default: 15):", "15"), "max s");
        if (c.max_n < 0 || c.max_s < 0)
            throw ParseError("max n and max s must be non-negative");
        c.threads = threads;
        c.interrupt_after = interrupt_after;
        return c;
    }
};

// Class given on the command line or prompted for; label is "a"/"b" for
// Massey inputs, empty for the product multiplier.
struct ClassOpts {
    std::optional<std::string> name, vector, tau_name, tau;
    std::optional<int> n, s;

    void add(CLI::App* app, const std::string& prefix)
    {
        app->add_option("--" + prefix + "name", name, "name of the class");
        app->add_option("--" + prefix + "n", n, "stem of the class");
        app->add_option("--" + prefix + "s", s, "filtration of the class");
        app->add_option("--" + prefix + "class", vector, "class vector, e.g. [1, 0]");
        app->add_option("--" + prefix + "tau-name", tau_name, "name of the tau part");
        app->add_option("--" + prefix + "tau", tau, "tau part vector");
    }

    ClassSpec product_spec(const Prompter& p) const
    {
        ClassSpec c;
        c.name = name ? *name : p.require("Name of product:", "product name");
        c.n = n ? *n : to_int(p.require("n of Ext class " + c.name + ":", "n"), "n");
        c.s = s ? *s : to_int(p.require("s of Ext class " + c.name + ":", "s"), "s");
        c.e = parse_vector(vector ? *vector : p.require("Input ext class:", "class vector"));
        if (tau)
            c.f = parse_vector(*tau);
        return c;
    }

    ClassSpec massey_spec(const Prompter& p, const std::string& label) const
    {
        ClassSpec c;
        c.n = n ? *n : to_int(p.require("n of " + label + ":", "n of " + label), "n");
        c.s = s ? *s : to_int(p.require("s of " + label + ":", "s of " + label), "s");
        c.name = name ? *name : p.require("Name of Ext part of " + label + ":", "name of " + label);
        c.e = parse_vector(vector ? *vector : p.require("Input Ext class " + c.name + ":", "class vector"));
        c.tau_name = tau_name ? *tau_name : (tau ? "tau" : p.ask("Name of τ part of " + label + ":", ""));
        if (!c.tau_name.empty())
            c.f = parse_vector(tau ? *tau : p.require("Input Ext class " + c.tau_name + ":", "τ part vector"));
        return c;
    }
};

template <class F>
void with_output(const std::string& path, F&& f)
{
    if (path.empty() || path == "-") {
        f(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    f(out);
    out.flush();
    if (!out)
        throw std::runtime_error("cannot write " + path);
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Secondary Adams spectral sequence computations"};
    app.require_subcommand(1);
    Prompter prompter;
    app.add_flag("--batch", prompter.batch, "never prompt; use defaults for missing values");

    Common c_sec, c_prod, c_mas, c_f1, c_chart, c_prop;
    std::string timing_log, stem_max;
    auto* sec = app.add_subcommand("secondary", "d2 differentials");
    c_sec.add(sec);
    sec->add_option("--timing-log", timing_log, "per-generator timing log");
    sec->add_option("--stem-maxima", stem_max, "slowest generator per stem");

    ClassOpts prod_cls;
    auto* prod = app.add_subcommand("product", "products with a class [a] in pi_{*,*} C tau^2");
    c_prod.add(prod);
    prod_cls.add(prod, "");

    ClassOpts ma, mb;
    auto* mas = app.add_subcommand("massey", "Massey products <-, [b], [a]>");
    c_mas.add(mas);
    ma.add(mas, "a-");
    mb.add(mas, "b-");

    auto* f1 = app.add_subcommand("filtration_one", "h_0 .. h_3 products on the E2 page");
    c_f1.add(f1);

    int page = 2;
    std::vector<std::string> chart_products, prop_products;
    auto* chart = app.add_subcommand("chart", "SVG chart of the E2 or E3 page");
    c_chart.add(chart);
    chart->add_option("--page", page, "2 or 3")->check(CLI::IsMember({2, 3}));
    chart->add_option("--products", chart_products, "product files for E3 differentials");

    auto* prop = app.add_subcommand("propagate", "differentials derived along hidden extensions");
    c_prop.add(prop);
    prop->add_option("--products", prop_products, "product files")->required();

    for (auto* sub : {sec, prod, mas, f1, chart, prop})
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*sec) {
            RunConfig cfg = c_sec.config(prompter);
            cfg.timing_log = timing_log;
            cfg.stem_maxima = stem_max;
            with_output(c_sec.output, [&](std::ostream& out) { run_secondary(cfg, out); });
        } else if (*prod) {
            const RunConfig cfg = c_prod.config(prompter);
            const ClassSpec a = prod_cls.product_spec(prompter);
            with_output(c_prod.output, [&](std::ostream& out) { run_product(cfg, a, out); });
        } else if (*mas) {
            if (!prompter.batch) {
                std::cerr << "We are going to compute <-, b, a> for all (-), where a is an\n"
                          << "element in Ext(M, k) and b and (-) are elements in Ext(k, k).\n";
            }
            const RunConfig cfg = c_mas.config(prompter);
            const ClassSpec a = ma.massey_spec(prompter, "a");
            const ClassSpec b = mb.massey_spec(prompter, "b");
            with_output(c_mas.output, [&](std::ostream& out) { run_massey(cfg, a, b, out); });
        } else if (*f1) {
            const RunConfig cfg = c_f1.config(prompter);
            with_output(c_f1.output, [&](std::ostream& out) { run_filtration_one(cfg, out); });
        } else if (*chart) {
            const RunConfig cfg = c_chart.config(prompter);
            if (c_chart.output.empty() || c_chart.output == "-")
                throw ParseError("chart needs -o <file.svg>");
            run_chart(cfg, page, c_chart.output, chart_products);
        } else if (*prop) {
            const RunConfig cfg = c_prop.config(prompter);
            with_output(c_prop.output, [&](std::ostream& out) { run_propagate(cfg, prop_products, out); });
        }
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const Interrupted& e) {
        std::cerr << "interrupted: " << e.what() << " (checkpoint saved)\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}

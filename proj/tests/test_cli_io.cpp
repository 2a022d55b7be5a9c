#include "adsec/cli_io.hpp"

#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace adsec;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / "adsec_test_cli" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

RunConfig config(int max_n, int max_s, const std::string& save_dir = "")
{
    RunConfig c;
    c.max_n = max_n;
    c.max_s = max_s;
    c.save_dir = save_dir;
    return c;
}

std::string secondary_text(const RunConfig& c)
{
    std::ostringstream out;
    run_secondary(c, out);
    return out.str();
}

std::string read_file(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

bool has_line(const std::string& text, const std::string& line)
{
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);)
        if (l == line)
            return true;
    return false;
}

ClassSpec spec(const std::string& name, int n, int s, const std::string& v)
{
    ClassSpec c;
    c.name = name;
    c.n = n;
    c.s = s;
    c.e = parse_vector(v);
    return c;
}

int run_cli(const std::string& args, const std::string& stdin_text = "", std::string* err = nullptr)
{
    const fs::path dir = fs::temp_directory_path() / "adsec_test_cli";
    fs::create_directories(dir);
    const fs::path in = dir / "stdin.txt", errp = dir / "stderr.txt";
    {
        std::ofstream f(in);
        f << stdin_text;
    }
    const std::string cmd = std::string(ADSEC_CLI) + " " + args + " < " + in.string() + " > /dev/null 2> " + errp.string();
    const int status = std::system(cmd.c_str());
    if (err)
        *err = read_file(errp);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("class tokens and vectors round trip")
{
    for (ClassToken t : {ClassToken{0, 0, 0}, ClassToken{15, 1, 0}, ClassToken{39, 17, 12}}) {
        CHECK(parse_class_token(format_class_token(t)) == t);
    }
    CHECK(format_class_token(ClassToken{15, 2, 1}) == "x_(15, 2, 1)");
    CHECK(parse_class_token("x_(15,2,1)") == ClassToken{15, 2, 1});
    CHECK_THROWS_AS(parse_class_token("x_(15, 2)"), ParseError);
    CHECK_THROWS_AS(parse_class_token("y_(1, 2, 3)"), ParseError);
    CHECK_THROWS_AS(parse_class_token("x_(1, -2, 3)"), ParseError);

    CHECK(format_vector(FVector::from_bits({1, 0, 1})) == "[1, 0, 1]");
    CHECK(parse_vector("[1,0, 1]") == FVector::from_bits({1, 0, 1}));
    CHECK(parse_vector(" [0] ") == FVector::from_bits({0}));
    CHECK_THROWS_AS(parse_vector("[]"), ParseError);
    CHECK_THROWS_AS(parse_vector("[1, 2]"), ParseError);
    CHECK_THROWS_AS(parse_vector("1, 0"), ParseError);
}

TEST_CASE("file line grammars round trip")
{
    const D2Line d{{15, 1, 0}, FVector::from_bits({1})};
    CHECK(format_d2_line(d) == "d_2 x_(15, 1, 0) = [1]");
    CHECK(parse_d2_line(format_d2_line(d)) == d);

    ProductHeader h{"g", 20, 4, FVector::from_bits({1}), FVector()};
    CHECK(format_product_header(h) == "# product [g] at (20, 4) = [1]");
    CHECK(parse_product_header(format_product_header(h)) == h);
    h.f = FVector::from_bits({0, 1});
    CHECK(parse_product_header(format_product_header(h)) == h);

    std::vector<ProductLine> lines{
        {"g", {0, 0, 0}, FVector::from_bits({1}), FVector(), false},
        {"g", {0, 1, 0}, FVector::from_bits({1}), FVector::from_bits({1}), false},
        {"d_0", {15, 2, 0}, FVector(), FVector::from_bits({1}), false},
        {"h_0^2", {31, 2, 0}, FVector::from_bits({1}), FVector(), true},
    };
    CHECK(format_product_line(lines[1]) == "[g] x_(0, 1, 0) = [1] + τ [1]");
    CHECK(format_product_line(lines[2]) == "[d_0] x_(15, 2, 0) = τ [1]");
    CHECK(format_product_line(lines[3]) == "[h_0^2] x_(31, 2, 0) = [1] mod τ");
    for (const auto& l : lines)
        CHECK(parse_product_line(format_product_line(l)) == l);

    std::vector<MasseyLine> ms{
        {{1, 1, 0}, "h_0^4", "h_3", FVector::from_bits({1}), FVector()},
        {{3, 2, 0}, "h_0^4", "h_3", FVector::from_bits({1}), FVector::from_bits({1})},
        {{2, 2, 0}, "h_0^4", "h_3", FVector(), FVector()},
    };
    CHECK(format_massey_line(ms[0]) == "<x_(1, 1, 0), [h_0^4], [h_3]> = ±([1])");
    CHECK(format_massey_line(ms[1]) == "<x_(3, 2, 0), [h_0^4], [h_3]> = ±([1] + τ[1])");
    CHECK(format_massey_line(ms[2]) == "<x_(2, 2, 0), [h_0^4], [h_3]> = 0");
    for (const auto& l : ms)
        CHECK(parse_massey_line(format_massey_line(l)) == l);

    const FiltrationOneLine f{1, {1, 1, 0}, FVector::from_bits({1})};
    CHECK(format_filtration_one_line(f) == "h_1 · x_(1, 1, 0) = [1]");
    CHECK(parse_filtration_one_line(format_filtration_one_line(f)) == f);

    CHECK_THROWS_AS(parse_d2_line("d_3 x_(15, 1, 0) = [1]"), ParseError);
    CHECK_THROWS_AS(parse_product_line("[g x_(0, 0, 0) = [1]"), ParseError);
    CHECK_THROWS_AS(parse_filtration_one_line("h_x · x_(0, 0, 0) = [1]"), ParseError);
}

TEST_CASE("module files")
{
    const auto sphere = parse_module("p 2\ngens 0\n");
    CHECK(sphere.degrees() == std::vector<int>{0});

    const auto m = parse_module("# the mod 2 Moore space\np 2\ngens 0 1\nname S_2/2\nSq(1) g0 = g1\n", "moore");
    CHECK(m.name() == "S_2/2");
    CHECK(m.act_basis({1}, 0) == FVector::from_bits({1}));

    const auto c = parse_module("p 2\ngens 0 2 3\nSq(2) g0 = g1\nSq(1) g1 = g2\nSq(3) g0 = g2\nSq(0,1) g0 = g2\n");
    CHECK(c.degrees().size() == 3);

    CHECK_THROWS_WITH_AS(parse_module("p 2\ngens 0 -1\n"), doctest::Contains("module line 2"), ParseError);
    CHECK_THROWS_WITH_AS(parse_module("p 2\ngens 0 1\nSq(2) g0 = g1\n"), doctest::Contains("module line 3"), ParseError);
    CHECK_THROWS_AS(parse_module("p 3\ngens 0\n"), ParseError);
    CHECK_THROWS_AS(parse_module("p 2\ngens 0 1\nSq(1) g0 = g1\nSq(1) g0 = g1\n"), ParseError);
    CHECK_THROWS_AS(parse_module("p 2\nSq(1) g0 = g1\n"), ParseError);
    CHECK_THROWS_AS(parse_module("p 2\ngens 0 1\nSq(1) g0 = g5\n"), ParseError);
    CHECK_THROWS_AS(parse_module("p 2\ngens 0 1\nhello\n"), ParseError);
    // Sq(1) Sq(1) = 0 must hold
    CHECK_THROWS(parse_module("p 2\ngens 0 1 2\nSq(1) g0 = g1\nSq(1) g1 = g2\n"));

    const fs::path dir = scratch("module");
    {
        std::ofstream f(dir / "C2.module");
        f << "p 2\ngens 0 1\nSq(1) g0 = g1\n";
    }
    CHECK(load_module_file((dir / "C2.module").string()).name() == "C2");
    CHECK(resolve_module("S_2").degrees() == std::vector<int>{0});
    CHECK_THROWS(resolve_module((dir / "missing.module").string()));
}

TEST_CASE("secondary output")
{
    const std::string text = secondary_text(config(40, 20));
    CHECK(has_line(text, "d_2 x_(15, 1, 0) = [1]"));
    std::istringstream in(text);
    std::size_t lines = 0;
    int last_n = -1;
    for (std::string l; std::getline(in, l); ++lines) {
        const D2Line d = parse_d2_line(l);
        CHECK(d.x.n >= last_n);
        last_n = d.x.n;
    }
    CHECK(lines == 32);
    CHECK(secondary_text(config(5, 5)).empty());
    CHECK(secondary_text(config(40, 20)) == text);
}

TEST_CASE("filtration one output")
{
    std::ostringstream out;
    run_filtration_one(config(20, 10), out);
    const std::string text = out.str();
    CHECK(has_line(text, "h_0 · x_(0, 1, 0) = [1]"));
    CHECK(has_line(text, "h_1 · x_(1, 1, 0) = [1]"));
    CHECK(has_line(text, "h_2 · x_(3, 1, 0) = [1]"));
    CHECK_FALSE(text.find("h_1 · x_(3, 1, 0)") != std::string::npos);  // h1 h2 = 0
    CHECK_FALSE(text.find("h_0 · x_(1, 1, 0)") != std::string::npos);  // h0 h1 = 0
    std::ostringstream again;
    run_filtration_one(config(20, 10), again);
    CHECK(again.str() == text);
}

TEST_CASE("product output")
{
    std::ostringstream out;
    run_product(config(40, 20), spec("g", 20, 4, "[1]"), out);
    const std::string text = out.str();
    CHECK(text.rfind("# product [g] at (20, 4) = [1]\n", 0) == 0);
    CHECK(has_line(text, "[g] x_(0, 0, 0) = [1]"));

    std::ostringstream d0;
    run_product(config(40, 20), spec("d_0", 14, 4, "[1]"), d0);
    CHECK(has_line(d0.str(), "[d_0] x_(15, 2, 0) = τ [1]"));  // d0 h0h4 = tau k

    std::ostringstream ignored;
    CHECK_THROWS_AS(run_product(config(40, 20), spec("h_4", 15, 1, "[1]"), ignored), std::domain_error);
    CHECK_THROWS_AS(run_product(config(40, 20), spec("g", 20, 4, "[1, 0]"), ignored), ParseError);

    // product files parse back into records
    std::istringstream in(d0.str());
    Resolution r;
    r.extend(40, 20);
    SecondaryResolution sec(r);
    sec.compute();
    const auto recs = read_product_file(in, e3_page(sec));
    bool hidden = false;
    for (const auto& rec : recs)
        if (rec.x.n == 15 && rec.x.s == 2 && rec.value.e.vector.is_zero() && !rec.value.f.vector.is_zero())
            hidden = true;
    CHECK(hidden);
}

TEST_CASE("massey output")
{
    std::ostringstream out;
    ClassSpec a = spec("h_3", 7, 1, "[1]"), b = spec("h_0^4", 0, 4, "[1]");
    run_massey(config(30, 15), a, b, out);
    const std::string text = out.str();
    CHECK(text.rfind("# massey <-, [h_0^4], [h_3]>", 0) == 0);
    CHECK(has_line(text, "<x_(1, 1, 0), [h_0^4], [h_3]> = ±([1])"));

    std::ostringstream ignored;
    ClassSpec tau = a;
    tau.tau_name = "t";
    tau.f = parse_vector("[1]");
    CHECK_THROWS_AS(run_massey(config(30, 15), tau, b, ignored), ParseError);
    ClassSpec h1 = spec("h_1", 1, 1, "[1]");
    CHECK_THROWS_AS(run_massey(config(30, 15), h1, h1, ignored), std::domain_error);
}

TEST_CASE("propagation output")
{
    const fs::path dir = scratch("propagate");
    for (auto [name, n, s] : {std::tuple{"d_0", 14, 4}, {"h_0^2", 0, 2}}) {
        std::ofstream f(dir / name);
        run_product(config(40, 20), spec(name, n, s, "[1]"), f);
    }
    std::ostringstream out;
    run_propagate(config(40, 20), {(dir / "d_0").string(), (dir / "h_0^2").string()}, out);
    const std::string text = out.str();
    CHECK(text.find("d_3 x_(15, 2, 0) = [1]  # divide") != std::string::npos);
    CHECK(text.find("d_3 x_(31, 4, 0) = [1]  # multiply") != std::string::npos);

    const fs::path svg = dir / "e3.svg";
    run_chart(config(40, 20), 3, svg.string(), {(dir / "d_0").string(), (dir / "h_0^2").string()});
    CHECK(read_file(svg).find("class=\"d3\"") != std::string::npos);
}

TEST_CASE("checkpoints: layout, resume and interruption")
{
    const fs::path dir = scratch("ckpt");
    const std::string plain = secondary_text(config(30, 12));

    const std::string first = secondary_text(config(20, 10, dir.string()));
    CHECK(fs::exists(dir / "S_2_n20_s10.adsec"));
    CHECK(first == secondary_text(config(20, 10)));
    // grows from the smaller checkpoint
    CHECK(secondary_text(config(30, 12, dir.string())) == plain);
    CHECK(fs::exists(dir / "S_2_n30_s12.adsec"));
    // and reloads the exact one
    CHECK(secondary_text(config(30, 12, dir.string())) == plain);

    const fs::path dir2 = scratch("ckpt_interrupt");
    RunConfig c = config(30, 12, dir2.string());
    c.interrupt_after = 40;
    std::ostringstream ignored;
    CHECK_THROWS_AS(run_secondary(c, ignored), Interrupted);
    CHECK(fs::exists(dir2 / "S_2_n30_s12.adsec"));
    c.interrupt_after = 0;
    CHECK(secondary_text(c) == plain);

    // interrupted twice, deep into the range: the checkpoint holds bidegrees
    // beyond the range it was last completed for
    const fs::path dir3 = scratch("ckpt_interrupt_twice");
    RunConfig c3 = config(30, 12, dir3.string());
    for (std::size_t k : {150, 300}) {
        c3.interrupt_after = k;
        CHECK_THROWS_AS(run_secondary(c3, ignored), Interrupted);
    }
    c3.interrupt_after = 0;
    CHECK(secondary_text(c3) == plain);
}

TEST_CASE("command line: prompts and exit codes")
{
    std::string err;
    const std::string session = "S_2\n\n12\n6\n";
    CHECK(run_cli("secondary", session, &err) == 0);
    CHECK(err == "Module (default: S_2): Module save directory (optional): Max n (default: 30): Max s (default: 15): ");

    CHECK(run_cli("product", session + "g\n20\n4\n[1]\n", &err) != 0);  // g lies outside n <= 12
    CHECK(err.rfind("Module (default: S_2): Module save directory (optional): Max n (default: 30): "
                    "Max s (default: 15): Name of product: n of Ext class g: s of Ext class g: Input ext class: ",
                    0) == 0);

    CHECK(run_cli("massey", session + "7\n1\nh_3\n[1]\n\n0\n4\nh_0^4\n[1]\n\n", &err) == 0);
    CHECK(err ==
          "We are going to compute <-, b, a> for all (-), where a is an\n"
          "element in Ext(M, k) and b and (-) are elements in Ext(k, k).\n"
          "Module (default: S_2): Module save directory (optional): Max n (default: 30): Max s (default: 15): "
          "n of a: s of a: Name of Ext part of a: Input Ext class h_3: Name of τ part of a: "
          "n of b: s of b: Name of Ext part of b: Input Ext class h_0^4: Name of τ part of b: ");

    CHECK(run_cli("--batch secondary --max-n 8 --max-s 4") == 0);
    CHECK(run_cli("secondary --batch --max-n 8 --max-s 4") == 0);
    CHECK(run_cli("nonsense") == 1);
    CHECK(run_cli("secondary --batch --max-n -3") == 1);
    CHECK(run_cli("product --batch --max-n 8 --max-s 4 --name x --n 1 --s 1 --class '[1, 0]'") == 1);
    CHECK(run_cli("product --batch --max-n 20 --max-s 6 --name h_4 --n 15 --s 1 --class '[1]'", "", &err) == 2);
    CHECK(err.find("does not survive d2") != std::string::npos);
    CHECK(run_cli("secondary --batch --max-n 8 --max-s 4 --module /nonexistent.module") == 1);  // bad input file
}

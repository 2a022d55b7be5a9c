#pragma once
// Run configuration, module files, checkpoint directories and the text
// grammars of the emitted data files.
//
//   d2:             d_2 x_(n, s, i) = [c0, c1, ...]
//   product:        # product [g] at (20, 4) = [1]
//                   [g] x_(n, s, i) = [e] + τ [f]      (zero parts omitted)
//                   [g] x_(n, s, i) = [e] mod τ        (x does not survive d2)
//   massey:         # massey <-, [b], [a]> a at (7, 1) = [1], b at (0, 4) = [1]
//                   <x_(n, s, i), [b], [a]> = ±([e] + τ[f])   (or "= 0")
//   filtration_one: h_j · x_(n, s, i) = [v]
//   derived:        d_r x_(n, s, i) = [v]  # ...provenance

#include "adsec/homotopy_lift.hpp"
#include "adsec/sseq.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace adsec {

// Malformed user input (exit code 1)
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised when RunConfig::interrupt_after bidegrees have been resolved; the
// checkpoint is saved first.
struct Interrupted : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string module = "S_2";  // S_2 or a module file path
    std::string save_dir;        // empty: no checkpoint
    int max_n = 30, max_s = 15;
    std::size_t threads = 0;     // 0: ADSEC_THREADS or hardware concurrency
    std::string timing_log;
    std::string stem_maxima;          // slowest generator per stem (secondary only)
    std::size_t interrupt_after = 0;  // testing hook: stop after this many new bidegrees
};

// ------------------------------------------------------------ class tokens

struct ClassToken {
    int n = 0, s = 0;
    std::size_t index = 0;
    bool operator==(const ClassToken& o) const { return n == o.n && s == o.s && index == o.index; }
};

ClassToken parse_class_token(const std::string& text);  // x_(n, s, i)
std::string format_class_token(const ClassToken& c);
FVector parse_vector(const std::string& text);           // [1, 0, 1]; "[]" is an error
std::string format_vector(const FVector& v);

// ----------------------------------------------------------- module files

// p 2 / gens d0 d1 ... / Sq(R) g_i = g_j + g_k  (unspecified actions are 0)
ModulePresentation parse_module(const std::string& text, const std::string& name = "");
ModulePresentation load_module_file(const std::string& path);
ModulePresentation resolve_module(const std::string& module);  // S_2 or a path

// ------------------------------------------------------------ checkpoints

// <dir>/<module>_n<max_n>_s<max_s>.adsec
std::string checkpoint_path(const RunConfig& cfg, const std::string& module_name, int max_n, int max_s);
// Load the checkpoint for this range if present (or the largest smaller one
// for the module), extend, save. Without a save directory just resolves.
Resolution open_resolution(const RunConfig& cfg, const ModulePresentation& m);

// ------------------------------------------------------------ file lines

struct D2Line {
    ClassToken x;
    FVector target;
    bool operator==(const D2Line& o) const { return x == o.x && target == o.target; }
};
std::string format_d2_line(const D2Line& l);
D2Line parse_d2_line(const std::string& line);

struct ProductHeader {
    std::string name;
    int n = 0, s = 0;
    FVector e, f;  // f empty when the multiplier has no tau part
    bool operator==(const ProductHeader& o) const { return name == o.name && n == o.n && s == o.s && e == o.e && f == o.f; }
};
std::string format_product_header(const ProductHeader& h);
ProductHeader parse_product_header(const std::string& line);

struct ProductLine {
    std::string name;
    ClassToken x;
    FVector e, f;  // empty vector: omitted (zero) part
    bool mod_tau = false;
    bool operator==(const ProductLine& o) const
    {
        return name == o.name && x == o.x && e == o.e && f == o.f && mod_tau == o.mod_tau;
    }
};
std::string format_product_line(const ProductLine& l);
ProductLine parse_product_line(const std::string& line);

struct MasseyLine {
    ClassToken c;
    std::string b, a;
    FVector e, f;  // empty: omitted part; both empty: the value 0
    bool operator==(const MasseyLine& o) const { return c == o.c && b == o.b && a == o.a && e == o.e && f == o.f; }
};
std::string format_massey_line(const MasseyLine& l);
MasseyLine parse_massey_line(const std::string& line);

struct FiltrationOneLine {
    int j = 0;
    ClassToken x;
    FVector v;
    bool operator==(const FiltrationOneLine& o) const { return j == o.j && x == o.x && v == o.v; }
};
std::string format_filtration_one_line(const FiltrationOneLine& l);
FiltrationOneLine parse_filtration_one_line(const std::string& line);

// A product file as propagation input; dimensions come from the page.
std::vector<ProductRecord> read_product_file(std::istream& in, const PageData& page);

// -------------------------------------------------------------- commands

struct ClassSpec {
    std::string name;
    int n = 0, s = 0;
    FVector e;
    std::string tau_name;  // empty: no tau part
    FVector f;
};

void run_secondary(const RunConfig& cfg, std::ostream& out);
void run_product(const RunConfig& cfg, const ClassSpec& a, std::ostream& out);
// <-, [b], [a]> for every basis class; sphere only
void run_massey(const RunConfig& cfg, const ClassSpec& a, const ClassSpec& b, std::ostream& out);
void run_filtration_one(const RunConfig& cfg, std::ostream& out);
void run_chart(const RunConfig& cfg, int page, const std::string& path, const std::vector<std::string>& product_files);
// derived differentials from the d2 data and the given product files
void run_propagate(const RunConfig& cfg, const std::vector<std::string>& product_files, std::ostream& out);

// per-stem slowest generator (CPU time), as "n s t index cpu_us" lines
void write_stem_maxima(const std::vector<TimingRecord>& timings, std::ostream& out);

}  // namespace adsec

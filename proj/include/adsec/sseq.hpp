#pragma once
// E3 page assembly, jump-one hidden extensions read off Ctau^2 products, and
// differential propagation along extensions (generalized Leibniz rule).

#include "adsec/secondary_lift.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace adsec {

struct PageEntry {
    int n = 0, s = 0;
    std::size_t e2_dim = 0;
    bool d2_out_known = false;  // outgoing d2 computed
    bool d2_in_known = false;   // incoming d2 computed (or no source bidegree)
    FMatrix d2;                 // rows: d2 of basis classes, over (n - 1, s + 2)
    std::size_t rank_out = 0, rank_in = 0;
    FMatrix image_in;           // image of incoming d2, reduced
    std::vector<FVector> e3_basis;  // representatives, reduced modulo image_in
    FMatrix h[3];               // rows: h_j * basis, over (n + 2^j - 1, s + 1); empty when out of range
};

class PageData {
public:
    int max_n = -1, max_s = -1;
    std::map<std::pair<int, int>, PageEntry> entries;  // key (n, s)

    const PageEntry* find(int n, int s) const;
    std::size_t e2_dim(int n, int s) const;
    std::size_t e3_dim(int n, int s) const;
    // coordinates of x (a d2-cycle) against the E3 basis; empty if x is not a cycle
    std::vector<int> e3_coords(int n, int s, const FVector& x) const;
    // x lies in the image of the incoming d2
    bool in_d2_image(int n, int s, const FVector& x) const;
};

PageData e3_page(const SecondaryResolution& sec, int max_n = -1, int max_s = -1);

// One line of product data: [name] x = value. When x does not survive d2
// only the E2 part of the value is meaningful (mod_tau).
struct ProductRecord {
    std::string name;
    ExtClass x;
    SecondaryValue value;
    bool mod_tau = false;
};

struct HiddenExtension {
    std::string multiplier;
    ExtClass source;
    ExtClass target;  // one filtration above the (vanishing) E2 product
    int jump = 1;
    bool maximal = true;
};

// Records with e = 0 and f != 0 (mod-tau records are skipped)
std::vector<HiddenExtension> extract_hidden(const std::vector<ProductRecord>& products);

struct Differential {
    int r = 2;
    ExtClass source, target;
};

struct Provenance {
    enum Kind { Multiply, Divide } kind = Multiply;
    std::string multiplier;
    std::size_t differential = 0;          // index into the known list
    std::vector<std::size_t> extensions;   // indices into the extension list
    std::string text;
};

struct DerivedDifferential {
    Differential d;
    Provenance from;
    bool candidate = false;  // ambiguity left: not asserted
    std::string reason;      // why it is only a candidate
};

// Multiply: d_r(x) = z, alpha x = x' on E2, alpha z = tau w  =>  d_{r+1}(x') = w
// Divide:   d_r(y) = w, alpha x = tau y, alpha z = w on E2  =>  d_{r+1}(x) = z
// E2 products by alpha come from the e parts of the product records.
std::vector<DerivedDifferential> leibniz_propagate(const PageData& page, const std::vector<Differential>& known,
                                                   const std::vector<HiddenExtension>& exts,
                                                   const std::vector<ProductRecord>& products);

// Re-derive d from the inputs its provenance names; true iff it reproduces d.
bool revalidate(const DerivedDifferential& d, const PageData& page, const std::vector<Differential>& known,
                const std::vector<HiddenExtension>& exts, const std::vector<ProductRecord>& products);

std::string format_derived(const DerivedDifferential& d);

struct ChartOptions {
    int page = 2;  // 2: E2 with d2 arrows; 3: E3 with the extra differentials
    int max_n = -1, max_s = -1;
    std::vector<Differential> extra;  // drawn on the E3 chart
};

// Deterministic SVG chart. Throws on an unwritable path.
void emit_chart(const PageData& page, const ChartOptions& opt, const std::string& path);
std::string chart_svg(const PageData& page, const ChartOptions& opt);

}  // namespace adsec

#pragma once
// Dense linear algebra over GF(2). Row-vector convention: a matrix M maps
// x to x·M, rows are images of domain basis vectors.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace adsec {

class FVector {
public:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    FVector() = default;
    explicit FVector(std::size_t len) : words_((len + 63) / 64, 0), len_(len) {}
    static FVector from_bits(const std::vector<int>& bits);

    std::size_t size() const { return len_; }
    bool empty() const { return len_ == 0; }

    bool get(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
    void set(std::size_t i, bool v = true)
    {
        const std::uint64_t m = std::uint64_t{1} << (i & 63);
        if (v)
            words_[i >> 6] |= m;
        else
            words_[i >> 6] &= ~m;
    }
    void flip(std::size_t i) { words_[i >> 6] ^= std::uint64_t{1} << (i & 63); }

    // this ^= o; lengths must agree
    void add(const FVector& o);
    // this[offset + k] ^= src[k] for every k
    void add_at(const FVector& src, std::size_t offset);
    void add_words_at(const std::uint64_t* src, std::size_t nbits, std::size_t offset);
    void and_with(const FVector& o);
    void clear();
    void resize(std::size_t len);

    bool is_zero() const;
    std::size_t first_set() const;           // npos if zero
    std::size_t next_set(std::size_t from) const;  // first set index >= from
    std::size_t count() const;
    FVector slice(std::size_t begin, std::size_t end) const;
    std::vector<int> to_bits() const;
    std::vector<std::size_t> support() const;

    const std::uint64_t* data() const { return words_.data(); }
    std::uint64_t* data() { return words_.data(); }
    std::size_t num_words() const { return words_.size(); }

    bool operator==(const FVector& o) const { return len_ == o.len_ && words_ == o.words_; }
    bool operator!=(const FVector& o) const { return !(*this == o); }
    bool operator<(const FVector& o) const;

private:
    std::vector<std::uint64_t> words_;
    std::size_t len_ = 0;
};

std::string to_string(const FVector& v);  // "[1, 0, 1]"

class FMatrix {
public:
    FMatrix() = default;
    FMatrix(std::size_t rows, std::size_t cols) : rows_(rows, FVector(cols)), cols_(cols) {}
    static FMatrix from_rows(const std::vector<std::vector<int>>& rows, std::size_t cols = 0);
    static FMatrix identity(std::size_t n);

    std::size_t rows() const { return rows_.size(); }
    std::size_t cols() const { return cols_; }
    FVector& row(std::size_t i) { return rows_[i]; }
    const FVector& row(std::size_t i) const { return rows_[i]; }
    bool get(std::size_t i, std::size_t j) const { return rows_[i].get(j); }
    void set(std::size_t i, std::size_t j, bool v = true) { rows_[i].set(j, v); }
    void push_row(FVector r);

    // x·M
    FVector apply(const FVector& x) const;
    FMatrix multiply(const FMatrix& o) const;

    bool operator==(const FMatrix& o) const { return cols_ == o.cols_ && rows_ == o.rows_; }

private:
    std::vector<FVector> rows_;
    std::size_t cols_ = 0;
};

struct RowReduced {
    FMatrix rref;
    std::vector<std::size_t> pivots;
};

// Reduced row echelon form; zero rows are kept at the bottom.
RowReduced row_reduce(const FMatrix& m);
std::size_t rank(const FMatrix& m);

// Caches the reduced augmented form [M | I] so every solve is one pass over
// the pivot rows. Solutions are canonical: zero in every kernel pivot slot.
class Solver {
public:
    Solver() = default;
    explicit Solver(const FMatrix& m);

    std::size_t source_dim() const { return nrows_; }
    std::size_t target_dim() const { return ncols_; }
    std::size_t rank() const { return image_.size(); }

    std::optional<FVector> solve(const FVector& b) const;
    bool in_image(const FVector& b) const;
    // Reduce b modulo the image; zero iff b is in the image.
    FVector reduce(const FVector& b) const;
    FMatrix kernel_basis() const;
    const std::vector<std::size_t>& pivots() const { return pivots_; }

    // Append a new domain basis vector with image r (a new last row of M).
    // Keeps the cached form identical to a rebuild from scratch.
    void append_row(const FVector& r);

private:
    void add_image_row(FVector img, FVector pre);

    std::size_t nrows_ = 0, ncols_ = 0;
    std::vector<FVector> image_;       // RREF rows of M, pivots increasing
    std::vector<FVector> preimage_;    // matching combinations of M's rows
    std::vector<std::size_t> pivots_;
    std::vector<FVector> kernel_;      // RREF kernel rows
    std::vector<std::size_t> kernel_pivots_;
};

inline Solver solver_from(const FMatrix& m) { return Solver(m); }

}  // namespace adsec

#include "adsec/fp_linalg.hpp"

#include <algorithm>
#include <bit>

namespace adsec {

FVector FVector::from_bits(const std::vector<int>& bits)
{
    FVector v(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (bits[i] & 1)
            v.set(i);
    return v;
}

void FVector::add(const FVector& o)
{
    if (o.len_ != len_)
        throw std::invalid_argument("FVector::add: length mismatch");
    for (std::size_t i = 0; i < words_.size(); ++i)
        words_[i] ^= o.words_[i];
}

void FVector::add_words_at(const std::uint64_t* src, std::size_t nbits, std::size_t offset)
{
    if (nbits == 0)
        return;
    if (offset + nbits > len_)
        throw std::out_of_range("FVector::add_at: out of range");
    const std::size_t nw = (nbits + 63) / 64;
    const std::size_t w0 = offset >> 6, sh = offset & 63;
    if (sh == 0) {
        for (std::size_t i = 0; i < nw; ++i)
            words_[w0 + i] ^= src[i];
        return;
    }
    // src beyond nbits is assumed zero (FVector keeps its padding clear)
    for (std::size_t i = 0; i < nw; ++i) {
        words_[w0 + i] ^= src[i] << sh;
        const std::uint64_t hi = src[i] >> (64 - sh);
        if (hi)
            words_[w0 + i + 1] ^= hi;
    }
}

void FVector::add_at(const FVector& src, std::size_t offset)
{
    add_words_at(src.data(), src.size(), offset);
}

void FVector::and_with(const FVector& o)
{
    if (o.len_ != len_)
        throw std::invalid_argument("FVector::and_with: length mismatch");
    for (std::size_t i = 0; i < words_.size(); ++i)
        words_[i] &= o.words_[i];
}

void FVector::clear() { std::fill(words_.begin(), words_.end(), 0); }

void FVector::resize(std::size_t len)
{
    if (len < len_) {
        words_.resize((len + 63) / 64);
        if (len & 63)
            words_.back() &= (std::uint64_t{1} << (len & 63)) - 1;
    } else {
        words_.resize((len + 63) / 64, 0);
    }
    len_ = len;
}

bool FVector::is_zero() const
{
    for (auto w : words_)
        if (w)
            return false;
    return true;
}

std::size_t FVector::first_set() const { return next_set(0); }

std::size_t FVector::next_set(std::size_t from) const
{
    if (from >= len_)
        return npos;
    std::size_t wi = from >> 6;
    std::uint64_t w = words_[wi] & (~std::uint64_t{0} << (from & 63));
    while (true) {
        if (w)
            return (wi << 6) + static_cast<std::size_t>(std::countr_zero(w));
        if (++wi >= words_.size())
            return npos;
        w = words_[wi];
    }
}

std::size_t FVector::count() const
{
    std::size_t c = 0;
    for (auto w : words_)
        c += static_cast<std::size_t>(std::popcount(w));
    return c;
}

FVector FVector::slice(std::size_t begin, std::size_t end) const
{
    FVector r(end - begin);
    for (std::size_t i = next_set(begin); i != npos && i < end; i = next_set(i + 1))
        r.set(i - begin);
    return r;
}

std::vector<int> FVector::to_bits() const
{
    std::vector<int> out(len_);
    for (std::size_t i = 0; i < len_; ++i)
        out[i] = get(i);
    return out;
}

std::vector<std::size_t> FVector::support() const
{
    std::vector<std::size_t> out;
    for (std::size_t i = first_set(); i != npos; i = next_set(i + 1))
        out.push_back(i);
    return out;
}

bool FVector::operator<(const FVector& o) const
{
    if (len_ != o.len_)
        return len_ < o.len_;
    return words_ < o.words_;
}

std::string to_string(const FVector& v)
{
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i)
            s += ", ";
        s += v.get(i) ? '1' : '0';
    }
    return s + "]";
}

FMatrix FMatrix::from_rows(const std::vector<std::vector<int>>& rows, std::size_t cols)
{
    if (!rows.empty())
        cols = rows[0].size();
    FMatrix m;
    m.cols_ = cols;
    for (const auto& r : rows) {
        if (r.size() != cols)
            throw std::invalid_argument("FMatrix: ragged rows");
        m.rows_.push_back(FVector::from_bits(r));
    }
    return m;
}

FMatrix FMatrix::identity(std::size_t n)
{
    FMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        m.set(i, i);
    return m;
}

void FMatrix::push_row(FVector r)
{
    if (rows_.empty() && cols_ == 0)
        cols_ = r.size();
    if (r.size() != cols_)
        throw std::invalid_argument("FMatrix::push_row: length mismatch");
    rows_.push_back(std::move(r));
}

FVector FMatrix::apply(const FVector& x) const
{
    if (x.size() != rows_.size())
        throw std::invalid_argument("FMatrix::apply: dimension mismatch");
    FVector out(cols_);
    for (std::size_t i = x.first_set(); i != FVector::npos; i = x.next_set(i + 1))
        out.add(rows_[i]);
    return out;
}

FMatrix FMatrix::multiply(const FMatrix& o) const
{
    if (cols_ != o.rows())
        throw std::invalid_argument("FMatrix::multiply: dimension mismatch");
    FMatrix out;
    out.cols_ = o.cols();
    for (const auto& r : rows_)
        out.rows_.push_back(o.apply(r));
    return out;
}

RowReduced row_reduce(const FMatrix& m)
{
    RowReduced res;
    std::vector<FVector> rows;
    for (std::size_t i = 0; i < m.rows(); ++i)
        rows.push_back(m.row(i));
    std::size_t r = 0;
    for (std::size_t c = 0; c < m.cols() && r < rows.size(); ++c) {
        std::size_t p = r;
        while (p < rows.size() && !rows[p].get(c))
            ++p;
        if (p == rows.size())
            continue;
        std::swap(rows[r], rows[p]);
        for (std::size_t i = 0; i < rows.size(); ++i)
            if (i != r && rows[i].get(c))
                rows[i].add(rows[r]);
        res.pivots.push_back(c);
        ++r;
    }
    res.rref = FMatrix(0, m.cols());
    for (auto& row : rows)
        res.rref.push_row(std::move(row));
    return res;
}

std::size_t rank(const FMatrix& m) { return row_reduce(m).pivots.size(); }

// ---------------------------------------------------------------- Solver

Solver::Solver(const FMatrix& m) : ncols_(m.cols())
{
    // Pre-size combinations so append_row need not grow them one by one.
    const std::size_t n = m.rows();
    image_.reserve(std::min(n, ncols_));
    for (std::size_t i = 0; i < n; ++i) {
        FVector img = m.row(i);
        FVector pre(n);
        pre.set(i);
        nrows_ = i + 1;
        add_image_row(std::move(img), std::move(pre));
    }
    nrows_ = n;
}

void Solver::append_row(const FVector& r)
{
    if (r.size() != ncols_)
        throw std::invalid_argument("Solver::append_row: length mismatch");
    ++nrows_;
    for (auto& v : preimage_)
        v.resize(nrows_);
    for (auto& v : kernel_)
        v.resize(nrows_);
    FVector pre(nrows_);
    pre.set(nrows_ - 1);
    add_image_row(r, std::move(pre));
}

void Solver::add_image_row(FVector img, FVector pre)
{
    if (pre.size() < nrows_)
        pre.resize(nrows_);
    for (std::size_t i = 0; i < image_.size(); ++i) {
        if (img.get(pivots_[i])) {
            img.add(image_[i]);
            pre.add(preimage_[i]);
        }
    }
    const std::size_t p = img.first_set();
    if (p != FVector::npos) {
        for (std::size_t i = 0; i < image_.size(); ++i) {
            if (image_[i].get(p)) {
                image_[i].add(img);
                preimage_[i].add(pre);
            }
        }
        auto pos = std::lower_bound(pivots_.begin(), pivots_.end(), p) - pivots_.begin();
        pivots_.insert(pivots_.begin() + pos, p);
        image_.insert(image_.begin() + pos, std::move(img));
        preimage_.insert(preimage_.begin() + pos, std::move(pre));
        return;
    }
    // new kernel vector: keep kernel rows and all combinations reduced
    for (std::size_t i = 0; i < kernel_.size(); ++i)
        if (pre.get(kernel_pivots_[i]))
            pre.add(kernel_[i]);
    const std::size_t q = pre.first_set();
    for (auto& k : kernel_)
        if (k.get(q))
            k.add(pre);
    for (auto& v : preimage_)
        if (v.get(q))
            v.add(pre);
    auto pos = std::lower_bound(kernel_pivots_.begin(), kernel_pivots_.end(), q) - kernel_pivots_.begin();
    kernel_pivots_.insert(kernel_pivots_.begin() + pos, q);
    kernel_.insert(kernel_.begin() + pos, std::move(pre));
}

std::optional<FVector> Solver::solve(const FVector& b) const
{
    if (b.size() != ncols_)
        throw std::invalid_argument("Solver::solve: dimension mismatch");
    FVector rem = b;
    FVector x(nrows_);
    for (std::size_t i = 0; i < image_.size(); ++i) {
        if (rem.get(pivots_[i])) {
            rem.add(image_[i]);
            x.add(preimage_[i]);
        }
    }
    if (!rem.is_zero())
        return std::nullopt;
    return x;
}

FVector Solver::reduce(const FVector& b) const
{
    if (b.size() != ncols_)
        throw std::invalid_argument("Solver::reduce: dimension mismatch");
    FVector rem = b;
    for (std::size_t i = 0; i < image_.size(); ++i)
        if (rem.get(pivots_[i]))
            rem.add(image_[i]);
    return rem;
}

bool Solver::in_image(const FVector& b) const { return reduce(b).is_zero(); }

FMatrix Solver::kernel_basis() const
{
    FMatrix k(0, nrows_);
    for (const auto& v : kernel_)
        k.push_row(v);
    return k;
}

}  // namespace adsec

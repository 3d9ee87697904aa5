#pragma once

// Exact prime-field linear algebra over edge-indexed chains.
//
// A ChainVector is a sparse 1-chain: (edge id, residue mod p) entries sorted
// by edge id with no stored zeros. Incremental echelon bases accept chains
// and report whether they were independent of everything inserted before.
// GF(2) gets a packed-bit basis; any other prime uses dense residue rows.

#include "common.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <span>
#include <utility>
#include <vector>

namespace resopt {

/// Residue arithmetic modulo a prime p < 2^31.
class PrimeField {
public:
    explicit PrimeField(std::uint32_t p = 2) : p_(p)
    {
        if (p < 2) throw Error("PrimeField: modulus must be a prime >= 2");
        for (std::uint32_t d = 2; static_cast<std::uint64_t>(d) * d <= p; ++d)
            if (p % d == 0) throw Error("PrimeField: modulus " + std::to_string(p) + " is not prime");
    }

    std::uint32_t prime() const noexcept { return p_; }

    std::uint32_t from_int(std::int64_t x) const noexcept
    {
        const std::int64_t r = x % static_cast<std::int64_t>(p_);
        return static_cast<std::uint32_t>(r < 0 ? r + p_ : r);
    }
    std::uint32_t add(std::uint32_t a, std::uint32_t b) const noexcept
    {
        const std::uint32_t s = a + b;
        return s >= p_ ? s - p_ : s;
    }
    std::uint32_t sub(std::uint32_t a, std::uint32_t b) const noexcept { return a >= b ? a - b : a + p_ - b; }
    std::uint32_t mul(std::uint32_t a, std::uint32_t b) const noexcept
    {
        return static_cast<std::uint32_t>(static_cast<std::uint64_t>(a) * b % p_);
    }
    std::uint32_t inv(std::uint32_t a) const
    {
        if (a == 0) throw Error("PrimeField: inverse of zero");
        std::uint32_t result = 1, base = a, e = p_ - 2;
        while (e) {
            if (e & 1) result = mul(result, base);
            base = mul(base, base);
            e >>= 1;
        }
        return result;
    }

private:
    std::uint32_t p_;
};

class ChainVector {
public:
    using Entry = std::pair<EdgeId, std::uint32_t>;

    ChainVector() = default;

    /// Builds a chain from signed integer coefficients, combining repeated ids.
    static ChainVector from_terms(std::span<const std::pair<EdgeId, std::int64_t>> terms, const PrimeField& field)
    {
        std::map<EdgeId, std::uint32_t> acc;
        for (auto [id, c] : terms) acc[id] = field.add(acc[id], field.from_int(c));
        ChainVector v;
        for (auto [id, c] : acc)
            if (c != 0) v.entries_.emplace_back(id, c);
        return v;
    }

    const std::vector<Entry>& entries() const noexcept { return entries_; }
    bool empty() const noexcept { return entries_.empty(); }
    std::size_t size() const noexcept { return entries_.size(); }

    std::uint32_t coefficient(EdgeId id) const
    {
        auto it = std::lower_bound(entries_.begin(), entries_.end(), id,
                                   [](const Entry& e, EdgeId x) { return e.first < x; });
        return it != entries_.end() && it->first == id ? it->second : 0;
    }

    friend bool operator==(const ChainVector&, const ChainVector&) = default;

private:
    std::vector<Entry> entries_;
};

/// Incremental row-echelon basis over GF(2), rows packed 64 edges per word.
class Gf2Basis {
public:
    explicit Gf2Basis(std::size_t dimension)
        : dim_(dimension), words_((dimension + 63) / 64), pivot_row_(dimension, -1)
    {}

    std::size_t rank() const noexcept { return rows_.size(); }
    std::size_t dimension() const noexcept { return dim_; }

    /// Reduces `v` and stores it if nonzero. Returns true iff `v` was independent.
    bool insert(const ChainVector& v)
    {
        std::vector<std::uint64_t> bits = pack(v);
        const int pivot = reduce(bits);
        if (pivot < 0) return false;
        pivot_row_[pivot] = static_cast<int>(rows_.size());
        rows_.push_back(std::move(bits));
        return true;
    }

    bool in_span(const ChainVector& v) const
    {
        std::vector<std::uint64_t> bits = pack(v);
        return reduce(bits) < 0;
    }

private:
    std::vector<std::uint64_t> pack(const ChainVector& v) const
    {
        std::vector<std::uint64_t> bits(words_, 0);
        for (auto [id, c] : v.entries()) {
            if (id >= dim_) throw Error("Gf2Basis: chain index out of range");
            if (c & 1U) bits[id / 64] ^= std::uint64_t{1} << (id % 64);
        }
        return bits;
    }

    // Eliminates known pivots from low to high; returns the new pivot or -1.
    int reduce(std::vector<std::uint64_t>& bits) const
    {
        for (std::size_t w = 0; w < words_; ++w) {
            while (bits[w]) {
                const int bit = static_cast<int>(w * 64) + std::countr_zero(bits[w]);
                const int row = pivot_row_[bit];
                if (row < 0) return bit;
                const auto& r = rows_[row];
                for (std::size_t k = w; k < words_; ++k) bits[k] ^= r[k];
            }
        }
        return -1;
    }

    std::size_t dim_;
    std::size_t words_;
    std::vector<int> pivot_row_;
    std::vector<std::vector<std::uint64_t>> rows_;
};

/// Incremental row-echelon basis over GF(p) with dense residue rows.
class PrimeBasis {
public:
    PrimeBasis(std::size_t dimension, PrimeField field)
        : dim_(dimension), field_(field), pivot_row_(dimension, -1)
    {}

    std::size_t rank() const noexcept { return rows_.size(); }
    std::size_t dimension() const noexcept { return dim_; }

    bool insert(const ChainVector& v)
    {
        std::vector<std::uint32_t> dense = expand(v);
        const int pivot = reduce(dense);
        if (pivot < 0) return false;
        const std::uint32_t scale = field_.inv(dense[pivot]);
        for (auto& x : dense) x = field_.mul(x, scale);
        pivot_row_[pivot] = static_cast<int>(rows_.size());
        rows_.push_back(std::move(dense));
        return true;
    }

    bool in_span(const ChainVector& v) const
    {
        std::vector<std::uint32_t> dense = expand(v);
        return reduce(dense) < 0;
    }

private:
    std::vector<std::uint32_t> expand(const ChainVector& v) const
    {
        std::vector<std::uint32_t> dense(dim_, 0);
        for (auto [id, c] : v.entries()) {
            if (id >= dim_) throw Error("PrimeBasis: chain index out of range");
            dense[id] = field_.from_int(c);
        }
        return dense;
    }

    int reduce(std::vector<std::uint32_t>& dense) const
    {
        for (std::size_t i = 0; i < dim_; ++i) {
            if (dense[i] == 0) continue;
            const int row = pivot_row_[i];
            if (row < 0) return static_cast<int>(i);
            const std::uint32_t factor = dense[i];
            const auto& r = rows_[row];
            for (std::size_t k = i; k < dim_; ++k)
                if (r[k]) dense[k] = field_.sub(dense[k], field_.mul(factor, r[k]));
        }
        return -1;
    }

    std::size_t dim_;
    PrimeField field_;
    std::vector<int> pivot_row_;
    std::vector<std::vector<std::uint32_t>> rows_;
};

/// Calls `fn` with a fresh basis of the right kind for `prime`.
template <class Fn>
decltype(auto) with_basis(std::uint32_t prime, std::size_t dimension, Fn&& fn)
{
    if (prime == 2) {
        Gf2Basis basis(dimension);
        return fn(basis);
    }
    PrimeBasis basis(dimension, PrimeField(prime));
    return fn(basis);
}

} // namespace resopt

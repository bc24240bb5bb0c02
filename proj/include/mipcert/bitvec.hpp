#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mipcert::gf2 {

/// Fixed-length vector over the field with two elements, packed 64 bits per
/// machine word.  Addition is XOR.  Bits at positions >= size() are kept zero.
class BitVector {
public:
    BitVector() = default;
    explicit BitVector(std::size_t n) : n_(n), w_((n + 63) / 64, 0) {}

    static BitVector unit(std::size_t n, std::size_t i) {
        BitVector v(n);
        v.set(i);
        return v;
    }

    std::size_t size() const { return n_; }

    void clear() { std::fill(w_.begin(), w_.end(), 0); }

    bool get(std::size_t i) const { return (w_[i >> 6] >> (i & 63)) & 1u; }
    void set(std::size_t i) { w_[i >> 6] |= std::uint64_t{1} << (i & 63); }
    void reset(std::size_t i) { w_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
    void flip(std::size_t i) { w_[i >> 6] ^= std::uint64_t{1} << (i & 63); }

    BitVector& operator^=(const BitVector& o) {
        for (std::size_t k = 0; k < w_.size(); ++k) w_[k] ^= o.w_[k];
        return *this;
    }
    friend BitVector operator^(BitVector a, const BitVector& b) {
        a ^= b;
        return a;
    }
    bool operator==(const BitVector&) const = default;

    bool any() const {
        for (auto w : w_)
            if (w) return true;
        return false;
    }
    bool none() const { return !any(); }

    std::size_t popcount() const {
        std::size_t c = 0;
        for (auto w : w_) c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }
    /// popcount mod 2
    bool parity() const {
        std::uint64_t acc = 0;
        for (auto w : w_) acc ^= w;
        return std::popcount(acc) & 1;
    }

    /// Index of the lowest set bit, or -1 when zero.
    long lowest_set() const { return lowest_set_from(0); }

    /// Lowest set bit at position >= i, or -1.
    long lowest_set_from(std::size_t i) const {
        if (i >= n_) return -1;
        std::size_t k = i >> 6;
        std::uint64_t w = w_[k] & (~std::uint64_t{0} << (i & 63));
        while (true) {
            if (w) return static_cast<long>(k * 64 + std::countr_zero(w));
            if (++k == w_.size()) return -1;
            w = w_[k];
        }
    }

    template <class F>
    void for_each_set(F&& f) const {
        for (std::size_t k = 0; k < w_.size(); ++k)
            for (std::uint64_t w = w_[k]; w; w &= w - 1)
                f(k * 64 + static_cast<std::size_t>(std::countr_zero(w)));
    }

    std::vector<std::uint32_t> set_bits() const {
        std::vector<std::uint32_t> out;
        out.reserve(popcount());
        for_each_set([&](std::size_t i) { out.push_back(static_cast<std::uint32_t>(i)); });
        return out;
    }

    std::size_t hash() const {
        std::uint64_t h = 0x9e3779b97f4a7c15ull ^ n_;
        for (auto w : w_) {
            h ^= w + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
            h *= 0xff51afd7ed558ccdull;
        }
        return static_cast<std::size_t>(h ^ (h >> 33));
    }

    std::span<const std::uint64_t> words() const { return w_; }
    std::span<std::uint64_t> words() { return w_; }

    /// Row encoding used by the certificate format: ceil(n/8) bytes as lower-case
    /// hex, byte k holding bits 8k..8k+7 with the lowest column in the least
    /// significant position.
    std::string to_hex() const;
    static BitVector from_hex(std::string_view hex, std::size_t n);

private:
    std::size_t n_ = 0;
    std::vector<std::uint64_t> w_;
};

struct BitVectorHash {
    std::size_t operator()(const BitVector& v) const { return v.hash(); }
};

}  // namespace mipcert::gf2

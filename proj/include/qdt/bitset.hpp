#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace qdt {

// Fixed-size dynamic bitset over sample indices. Bits past size() in the last
// word are always zero.
class Bitset {
public:
    Bitset() = default;
    explicit Bitset(std::size_t n_bits, bool value = false)
        : n_bits_(n_bits), words_((n_bits + 63) / 64, value ? ~std::uint64_t{0} : 0) {
        clear_tail();
    }

    std::size_t size() const noexcept { return n_bits_; }
    std::size_t n_words() const noexcept { return words_.size(); }
    const std::vector<std::uint64_t>& words() const noexcept { return words_; }

    bool test(std::size_t i) const noexcept { return (words_[i >> 6] >> (i & 63)) & 1U; }
    void set(std::size_t i) noexcept { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
    void reset(std::size_t i) noexcept { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }

    std::size_t count() const noexcept {
        std::size_t c = 0;
        for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }
    bool any() const noexcept {
        for (auto w : words_)
            if (w) return true;
        return false;
    }

    // out = a & b, returns popcount of the result. Sizes must match.
    static std::size_t assign_and(Bitset& out, const Bitset& a, const Bitset& b) noexcept {
        std::size_t c = 0;
        for (std::size_t k = 0; k < a.words_.size(); ++k) {
            out.words_[k] = a.words_[k] & b.words_[k];
            c += static_cast<std::size_t>(std::popcount(out.words_[k]));
        }
        return c;
    }
    // out = a & ~b
    static std::size_t assign_and_not(Bitset& out, const Bitset& a, const Bitset& b) noexcept {
        std::size_t c = 0;
        for (std::size_t k = 0; k < a.words_.size(); ++k) {
            out.words_[k] = a.words_[k] & ~b.words_[k];
            c += static_cast<std::size_t>(std::popcount(out.words_[k]));
        }
        return c;
    }

    Bitset& operator&=(const Bitset& o) noexcept {
        for (std::size_t k = 0; k < words_.size(); ++k) words_[k] &= o.words_[k];
        return *this;
    }
    Bitset& operator|=(const Bitset& o) noexcept {
        for (std::size_t k = 0; k < words_.size(); ++k) words_[k] |= o.words_[k];
        return *this;
    }
    Bitset& and_not(const Bitset& o) noexcept {
        for (std::size_t k = 0; k < words_.size(); ++k) words_[k] &= ~o.words_[k];
        return *this;
    }
    Bitset operator~() const {
        Bitset r = *this;
        for (auto& w : r.words_) w = ~w;
        r.clear_tail();
        return r;
    }

    // Visits set bits in ascending index order.
    template <class F>
    void for_each(F&& fn) const {
        for (std::size_t k = 0; k < words_.size(); ++k) {
            std::uint64_t w = words_[k];
            while (w) {
                const auto bit = static_cast<std::size_t>(std::countr_zero(w));
                fn(k * 64 + bit);
                w &= w - 1;
            }
        }
    }

    std::vector<std::size_t> indices() const {
        std::vector<std::size_t> out;
        out.reserve(count());
        for_each([&](std::size_t i) { out.push_back(i); });
        return out;
    }

    friend bool operator==(const Bitset& a, const Bitset& b) {
        return a.n_bits_ == b.n_bits_ && a.words_ == b.words_;
    }

private:
    void clear_tail() noexcept {
        if (const std::size_t rem = n_bits_ & 63; rem != 0 && !words_.empty())
            words_.back() &= (std::uint64_t{1} << rem) - 1;
    }

    std::size_t n_bits_ = 0;
    std::vector<std::uint64_t> words_;
};

}  // namespace qdt

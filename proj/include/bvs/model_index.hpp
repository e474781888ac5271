#pragma once

#include <bit>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "bvs/error.hpp"

namespace bvs {

/// Inclusion vector over the p covariates. Bit i set means covariate i is in the model.
class ModelIndex {
public:
    ModelIndex() = default;
    explicit ModelIndex(int p) : p_(p), words_((p + 63) / 64, 0) {}

    /// Parses a 0/1 string, leftmost character = first covariate.
    static ModelIndex from_string(std::string_view bits);
    static ModelIndex from_mask(const std::vector<bool>& mask);

    int p() const noexcept { return p_; }
    int size() const noexcept { return size_; }

    bool test(int i) const noexcept { return (words_[i >> 6] >> (i & 63)) & 1u; }

    void set(int i, bool on) {
        if (test(i) != on) flip(i);
    }

    void flip(int i) {
        words_[i >> 6] ^= std::uint64_t{1} << (i & 63);
        size_ += test(i) ? 1 : -1;
    }

    /// True when every bit set in `other` is also set here.
    bool contains(const ModelIndex& other) const noexcept {
        for (std::size_t w = 0; w < words_.size(); ++w)
            if ((other.words_[w] & ~words_[w]) != 0) return false;
        return true;
    }

    std::vector<int> included() const {
        std::vector<int> out;
        out.reserve(size_);
        for (int i = 0; i < p_; ++i)
            if (test(i)) out.push_back(i);
        return out;
    }

    std::string to_string() const {
        std::string s(p_, '0');
        for (int i = 0; i < p_; ++i)
            if (test(i)) s[i] = '1';
        return s;
    }

    std::size_t hash() const noexcept {
        std::uint64_t h = 0x9E3779B97F4A7C15ull ^ static_cast<std::uint64_t>(p_);
        for (auto w : words_) {
            h ^= w + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
        }
        return static_cast<std::size_t>(h);
    }

    friend bool operator==(const ModelIndex& a, const ModelIndex& b) noexcept {
        return a.p_ == b.p_ && a.words_ == b.words_;
    }
    /// Total order; agrees with comparing the 0/1 strings when p <= 64.
    friend bool operator<(const ModelIndex& a, const ModelIndex& b) noexcept {
        if (a.p_ != b.p_) return a.p_ < b.p_;
        for (std::size_t w = 0; w < a.words_.size(); ++w) {
            if (a.words_[w] != b.words_[w]) {
                const std::uint64_t diff = a.words_[w] ^ b.words_[w];
                const std::uint64_t low = diff & (~diff + 1);
                return (b.words_[w] & low) != 0;
            }
        }
        return false;
    }

private:
    int p_ = 0;
    int size_ = 0;
    std::vector<std::uint64_t> words_;
};

inline ModelIndex ModelIndex::from_string(std::string_view bits) {
    ModelIndex m(static_cast<int>(bits.size()));
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] == '1') {
            m.flip(static_cast<int>(i));
        } else if (bits[i] != '0') {
            throw config_error("model bitstring must contain only 0 and 1");
        }
    }
    return m;
}

inline ModelIndex ModelIndex::from_mask(const std::vector<bool>& mask) {
    ModelIndex m(static_cast<int>(mask.size()));
    for (std::size_t i = 0; i < mask.size(); ++i)
        if (mask[i]) m.flip(static_cast<int>(i));
    return m;
}

struct ModelIndexHash {
    std::size_t operator()(const ModelIndex& m) const noexcept { return m.hash(); }
};

}  // namespace bvs

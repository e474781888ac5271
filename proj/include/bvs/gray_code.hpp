#pragma once

#include <bit>
#include <cstdint>
#include <iterator>
#include <vector>

#include "bvs/error.hpp"
#include "bvs/model_index.hpp"

namespace bvs {

inline constexpr int default_enumeration_cap = 30;

constexpr std::uint64_t gray_code(std::uint64_t k) { return k ^ (k >> 1); }

/// Integer code of a model over the given free columns: free[0] is the most significant bit,
/// so the code's binary digits read like the model's 0/1 string restricted to free columns.
inline std::uint64_t model_code(const ModelIndex& m, const std::vector<int>& free) {
    std::uint64_t c = 0;
    for (int f : free) c = (c << 1) | (m.test(f) ? 1u : 0u);
    return c;
}

inline ModelIndex model_from_code(std::uint64_t code, const std::vector<int>& free, ModelIndex base) {
    const int nf = static_cast<int>(free.size());
    for (int f = 0; f < nf; ++f) base.set(free[f], (code >> (nf - 1 - f)) & 1u);
    return base;
}

/// Reflected Gray-code walk over `free` starting at `start`; consecutive models differ in
/// exactly one free column. Columns outside `free` keep their value from `start`.
class GrayCodeWalk {
public:
    GrayCodeWalk(std::vector<int> free, ModelIndex start)
        : free_(std::move(free)), current_(std::move(start)) {
        if (free_.size() >= 63) throw cap_error("Gray-code walk over 63 or more columns");
        length_ = std::uint64_t{1} << free_.size();
    }

    const ModelIndex& current() const noexcept { return current_; }
    std::uint64_t step() const noexcept { return step_; }
    std::uint64_t length() const noexcept { return length_; }
    bool done() const noexcept { return step_ + 1 >= length_; }

    /// Column that the next step flips.
    int peek() const {
        const int bit = std::countr_zero(step_ + 1);
        return free_[free_.size() - 1 - static_cast<std::size_t>(bit)];
    }

    /// Advances one step and returns the flipped column id.
    int next() {
        const int col = peek();
        ++step_;
        current_.flip(col);
        return col;
    }

    class iterator {
    public:
        using iterator_category = std::input_iterator_tag;
        using value_type = ModelIndex;
        using difference_type = std::ptrdiff_t;
        using pointer = const ModelIndex*;
        using reference = const ModelIndex&;

        iterator() = default;
        explicit iterator(GrayCodeWalk* w) : walk_(w) {}
        reference operator*() const { return walk_->current(); }
        pointer operator->() const { return &walk_->current(); }
        iterator& operator++() {
            if (walk_->done()) {
                walk_ = nullptr;
            } else {
                walk_->next();
            }
            return *this;
        }
        void operator++(int) { ++*this; }
        friend bool operator==(const iterator& a, const iterator& b) { return a.walk_ == b.walk_; }

    private:
        GrayCodeWalk* walk_ = nullptr;
    };

    /// Single pass: iterating consumes the walk.
    iterator begin() { return iterator(this); }
    iterator end() { return iterator(); }

private:
    std::vector<int> free_;
    ModelIndex current_;
    std::uint64_t step_ = 0;
    std::uint64_t length_ = 1;
};

/// All admissible models (supersets of the fixed mask) in Gray-code order over the free columns.
inline GrayCodeWalk index_iter(int p, const std::vector<bool>& fixed_mask, int cap = default_enumeration_cap) {
    std::vector<bool> mask = fixed_mask.empty() ? std::vector<bool>(p, false) : fixed_mask;
    std::vector<int> free;
    for (int j = 0; j < p; ++j)
        if (!mask[j]) free.push_back(j);
    if (static_cast<int>(free.size()) > cap)
        throw cap_error("enumeration over " + std::to_string(free.size()) + " free covariates exceeds cap " +
                        std::to_string(cap));
    return GrayCodeWalk(std::move(free), ModelIndex::from_mask(mask));
}

}  // namespace bvs

#ifndef FORESTREC_BITS_HPP
#define FORESTREC_BITS_HPP

#include <bit>
#include <cstdint>
#include <vector>

namespace forestrec {

// Fixed-universe bitset used for leaf sets during split manipulation.
// std::vector<bool> is too slow for the set algebra we do and
// std::bitset needs a compile-time size, so we keep our own.
class Bits {
  public:
    Bits() : size_(0) {}
    explicit Bits(int size) : size_(size), w_((size + 63) / 64, 0) {}

    int size() const { return size_; }

    void set(int i) { w_[i >> 6] |= (uint64_t{1} << (i & 63)); }
    void reset(int i) { w_[i >> 6] &= ~(uint64_t{1} << (i & 63)); }
    bool test(int i) const { return (w_[i >> 6] >> (i & 63)) & 1; }

    int count() const {
        int c = 0;
        for (uint64_t w : w_) c += std::popcount(w);
        return c;
    }
    bool any() const {
        for (uint64_t w : w_)
            if (w) return true;
        return false;
    }
    bool none() const { return !any(); }

    Bits operator|(const Bits& o) const {
        Bits r(size_);
        for (size_t i = 0; i < w_.size(); ++i) r.w_[i] = w_[i] | o.w_[i];
        return r;
    }
    Bits operator&(const Bits& o) const {
        Bits r(size_);
        for (size_t i = 0; i < w_.size(); ++i) r.w_[i] = w_[i] & o.w_[i];
        return r;
    }
    Bits& operator|=(const Bits& o) {
        for (size_t i = 0; i < w_.size(); ++i) w_[i] |= o.w_[i];
        return *this;
    }
    // Complement within the universe.
    Bits complement() const {
        Bits r(size_);
        for (size_t i = 0; i < w_.size(); ++i) r.w_[i] = ~w_[i];
        r.trim();
        return r;
    }
    bool intersects(const Bits& o) const {
        for (size_t i = 0; i < w_.size(); ++i)
            if (w_[i] & o.w_[i]) return true;
        return false;
    }
    bool subset_of(const Bits& o) const {
        for (size_t i = 0; i < w_.size(); ++i)
            if (w_[i] & ~o.w_[i]) return false;
        return true;
    }

    bool operator==(const Bits& o) const { return size_ == o.size_ && w_ == o.w_; }
    bool operator<(const Bits& o) const { return w_ < o.w_; }

    std::vector<int> members() const {
        std::vector<int> out;
        for (int i = 0; i < size_; ++i)
            if (test(i)) out.push_back(i);
        return out;
    }

  private:
    void trim() {
        if (size_ & 63) w_.back() &= (uint64_t{1} << (size_ & 63)) - 1;
    }
    int size_;
    std::vector<uint64_t> w_;
};

}  // namespace forestrec

#endif

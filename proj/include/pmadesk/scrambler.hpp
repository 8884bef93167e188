#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace pmadesk {

// Fibonacci LFSR over 33 bits with feedback polynomial x^33 + x^tap + 1.
class lfsr33 {
public:
    explicit lfsr33(std::uint64_t seed, int tap = 13) : state_(seed & mask), tap_(tap) {
        if (state_ == 0) throw std::invalid_argument("LFSR seed must be nonzero in its low 33 bits");
        if (tap < 1 || tap > 32) throw std::invalid_argument("LFSR tap must be 1..32");
    }

    unsigned bit() {
        unsigned b = unsigned(((state_ >> 32) ^ (state_ >> (tap_ - 1))) & 1);
        state_ = ((state_ << 1) | b) & mask;
        return b;
    }

    unsigned bits(int n) {
        unsigned v = 0;
        for (int i = 0; i < n; ++i) v = (v << 1) | bit();
        return v;
    }

    std::uint64_t state() const { return state_; }

private:
    static constexpr std::uint64_t mask = (std::uint64_t(1) << 33) - 1;
    std::uint64_t state_;
    int tap_;
};

// Digit-wise addition mod 3; the inverse subtracts.
inline std::vector<int> ternary_scramble(const std::vector<int>& digits, const std::vector<int>& gen) {
    if (gen.size() < digits.size()) throw std::invalid_argument("generator desync: generator stream too short");
    std::vector<int> out(digits.size());
    for (std::size_t i = 0; i < digits.size(); ++i) {
        if (digits[i] < 0 || digits[i] > 2 || gen[i] < 0 || gen[i] > 2) throw std::invalid_argument("ternary digit out of range");
        out[i] = (digits[i] + gen[i]) % 3;
    }
    return out;
}

inline std::vector<int> ternary_descramble(const std::vector<int>& digits, const std::vector<int>& gen) {
    if (gen.size() < digits.size()) throw std::invalid_argument("generator desync: generator stream too short");
    std::vector<int> out(digits.size());
    for (std::size_t i = 0; i < digits.size(); ++i) {
        if (digits[i] < 0 || digits[i] > 2 || gen[i] < 0 || gen[i] > 2) throw std::invalid_argument("ternary digit out of range");
        out[i] = (digits[i] - gen[i] + 3) % 3;
    }
    return out;
}

// Mapping generator: k PRNG bits reduced mod 3 per ternary digit.
class ternary_generator {
public:
    explicit ternary_generator(std::uint64_t seed, int bits_per_digit = 4) : lfsr_(seed, 20), k_(bits_per_digit) {
        if (k_ < 2 || k_ > 16) throw std::invalid_argument("bits per digit must be 2..16");
    }
    int digit() { return int(lfsr_.bits(k_) % 3); }
    // Nonary value from one k-bit draw, used for a whole root (two ternary digits).
    int nonary() { return int(lfsr_.bits(k_) % 9); }

private:
    lfsr33 lfsr_;
    int k_;
};

}  // namespace pmadesk

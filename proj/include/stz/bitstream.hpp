#pragma once

#include <cstdint>
#include <cstring>
#include <vector>

#include "stz/errors.hpp"

namespace stz {

// Bit-level writer. Bits fill each byte LSB-first; multi-bit fields are
// written value-LSB-first; gamma codes are the classic Elias construction
// (N zeros, then the N+1 significant bits of v from MSB down).
class BitWriter {
  public:
    void put_bit(bool b) {
        const std::size_t byte = static_cast<std::size_t>(bit_count_ >> 3);
        if (byte >= bytes_.size()) bytes_.push_back(0);
        if (b) bytes_[byte] |= static_cast<std::uint8_t>(1u << (bit_count_ & 7));
        ++bit_count_;
    }

    void put_bits(std::uint64_t value, int nbits) {
        for (int i = 0; i < nbits; ++i) put_bit(((value >> i) & 1u) != 0);
    }

    void put_f64(double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, 8);
        put_bits(bits, 64);
    }

    void put_gamma(std::uint64_t v) {
        if (v == 0) throw ContractError("elias gamma: value must be >= 1");
        int top = 63;
        while (((v >> top) & 1u) == 0) --top;
        for (int i = 0; i < top; ++i) put_bit(false);
        for (int i = top; i >= 0; --i) put_bit(((v >> i) & 1u) != 0);
    }

    std::uint64_t bit_count() const { return bit_count_; }
    const std::vector<std::uint8_t>& bytes() const { return bytes_; }
    std::vector<std::uint8_t> take() { return std::move(bytes_); }

  private:
    std::vector<std::uint8_t> bytes_;
    std::uint64_t bit_count_ = 0;
};

class BitReader {
  public:
    BitReader(const std::uint8_t* data, std::uint64_t bit_length)
        : data_(data), bit_length_(bit_length) {}

    explicit BitReader(const std::vector<std::uint8_t>& bytes, std::uint64_t bit_length)
        : BitReader(bytes.data(), bit_length) {}

    bool get_bit() {
        if (pos_ >= bit_length_) {
            throw FormatError(FormatError::Kind::Truncated, "bitstream: read past end");
        }
        const bool b = (data_[pos_ >> 3] >> (pos_ & 7)) & 1u;
        ++pos_;
        return b;
    }

    std::uint64_t get_bits(int nbits) {
        std::uint64_t v = 0;
        for (int i = 0; i < nbits; ++i) {
            if (get_bit()) v |= (1ull << i);
        }
        return v;
    }

    double get_f64() {
        const std::uint64_t bits = get_bits(64);
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }

    std::uint64_t get_gamma() {
        int zeros = 0;
        while (!get_bit()) {
            if (++zeros > 63) {
                throw FormatError(FormatError::Kind::BadLayout, "elias gamma: run too long");
            }
        }
        std::uint64_t v = 1;
        for (int i = 0; i < zeros; ++i) v = (v << 1) | (get_bit() ? 1u : 0u);
        return v;
    }

    std::uint64_t position() const { return pos_; }
    std::uint64_t remaining() const { return bit_length_ - pos_; }

  private:
    const std::uint8_t* data_;
    std::uint64_t bit_length_;
    std::uint64_t pos_ = 0;
};

}  // namespace stz

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "stz/tensor.hpp"

namespace stz {

// Section tags, four ASCII bytes little-endian.
constexpr std::uint32_t make_tag(char a, char b, char c, char d) {
    return static_cast<std::uint32_t>(static_cast<unsigned char>(a)) |
           (static_cast<std::uint32_t>(static_cast<unsigned char>(b)) << 8) |
           (static_cast<std::uint32_t>(static_cast<unsigned char>(c)) << 16) |
           (static_cast<std::uint32_t>(static_cast<unsigned char>(d)) << 24);
}

namespace tags {
constexpr std::uint32_t kCoreSparse = make_tag('G', 'S', 'P', 'R');
constexpr std::uint32_t kCoreDense = make_tag('G', 'D', 'N', 'S');
constexpr std::uint32_t kResidual = make_tag('S', 'R', 'E', 'S');
constexpr std::uint32_t kRawTensor = make_tag('V', 'R', 'A', 'W');
inline std::uint32_t angles(int mode) { return make_tag('A', 'N', 'G', static_cast<char>('1' + mode)); }
inline std::uint32_t factor_raw(int mode) {
    return make_tag('F', 'R', 'W', static_cast<char>('1' + mode));
}
inline std::uint32_t phases(int mode) { return make_tag('P', 'H', 'S', static_cast<char>('1' + mode)); }
}  // namespace tags

struct BlobSection {
    std::uint32_t tag = 0;
    std::uint64_t bit_length = 0;        // exact payload length in bits
    std::vector<std::uint8_t> bytes;     // ceil(bit_length / 8) bytes
};

// Header carried verbatim in the .stz file; everything a decoder needs.
struct BlobHeader {
    Dims3 dims{0, 0, 0};
    Dims3 ranks{0, 0, 0};
    double s1 = 0.0;
    double s2 = 0.0;
    std::uint8_t bits_per_component = 16;
    std::uint8_t angle_bits = 14;
    double rle_rel_err_target = 0.01;
};

// Self-describing compressed container. File layout (.stz, little-endian):
// magic "STZ1", u16 version, u16 flags, 3x u32 dims, 3x u32 ranks, f64 s1,
// f64 s2, u8 bits_per_component, u8 angle_bits, u16 reserved, f64
// rle_rel_err_target, u32 section count; then one 24-byte table entry per
// section (u32 tag, u64 byte offset, u64 bit length, u32 crc32 of the
// payload bytes); then the byte-aligned payloads.
class CompressedBlob {
  public:
    BlobHeader header;
    std::vector<BlobSection> sections;

    static constexpr std::uint16_t kVersion = 1;

    // Exact bit accounting: header + table + sum of section bit lengths.
    std::uint64_t bit_size() const;
    std::uint64_t header_bit_size() const;

    const BlobSection* find(std::uint32_t tag) const;

    std::vector<std::uint8_t> pack() const;
    static CompressedBlob unpack(const std::uint8_t* data, std::size_t size);
    static CompressedBlob unpack(const std::vector<std::uint8_t>& bytes);

    void write(std::ostream& out) const;
    static CompressedBlob read(std::istream& in);
};

void save_blob(const std::string& path, const CompressedBlob& blob);
CompressedBlob load_blob(const std::string& path);

// Compressed bits over reference bits, where the reference stores every
// complex entry at 2*bits_per_component bits.
double compression_ratio(const CompressedBlob& blob, const Dims3& dims, int bits_per_component);
double compression_ratio(std::uint64_t bit_size, const Dims3& dims, int bits_per_component);

}  // namespace stz

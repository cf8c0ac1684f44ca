#include "stz/tensor_io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <ostream>

#include "stz/errors.hpp"

namespace stz {

namespace {

constexpr char kMagic[4] = {'C', 'T', '3', '\0'};
constexpr std::uint32_t kVersion = 1;

// All multi-byte fields are little-endian regardless of host order.
void put_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in) throw FormatError(FormatError::Kind::Truncated, "ct3: truncated header");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

void put_f64(std::ostream& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(b), 8);
}

double get_f64(std::istream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    if (!in) throw FormatError(FormatError::Kind::Truncated, "ct3: truncated payload");
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

}  // namespace

void write_ct3(std::ostream& out, const ComplexTensor3& t) {
    out.write(kMagic, 4);
    put_u32(out, kVersion);
    for (int m = 0; m < 3; ++m) put_u32(out, static_cast<std::uint32_t>(t.dim(m)));
    for (Index i = 0; i < t.size(); ++i) {
        put_f64(out, t[i].real());
        put_f64(out, t[i].imag());
    }
    if (!out) throw IoError("ct3: write failed");
}

ComplexTensor3 read_ct3(std::istream& in) {
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0) {
        throw FormatError(FormatError::Kind::BadMagic, "ct3: bad magic");
    }
    const std::uint32_t version = get_u32(in);
    if (version != kVersion) {
        throw FormatError(FormatError::Kind::BadVersion,
                          "ct3: unsupported version " + std::to_string(version));
    }
    Dims3 dims;
    for (int m = 0; m < 3; ++m) {
        const std::uint32_t d = get_u32(in);
        if (d == 0 || d > (1u << 24)) {
            throw FormatError(FormatError::Kind::BadLayout, "ct3: implausible dimension");
        }
        dims[static_cast<std::size_t>(m)] = static_cast<Index>(d);
    }
    ComplexTensor3 t(dims[0], dims[1], dims[2]);
    for (Index i = 0; i < t.size(); ++i) {
        const double re = get_f64(in);
        const double im = get_f64(in);
        t[i] = cxd(re, im);
    }
    return t;
}

void save_ct3(const std::string& path, const ComplexTensor3& t) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open for writing: " + path);
    write_ct3(f, t);
}

ComplexTensor3 load_ct3(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open for reading: " + path);
    return read_ct3(f);
}

}  // namespace stz

#include "stz/blob.hpp"

#include <zlib.h>

#include <cstring>
#include <fstream>
#include <ostream>

#include "stz/errors.hpp"

namespace stz {

namespace {

constexpr char kMagic[4] = {'S', 'T', 'Z', '1'};
constexpr std::size_t kFixedHeaderBytes = 64;
constexpr std::size_t kTableEntryBytes = 24;

std::uint32_t crc32_of(const std::vector<std::uint8_t>& bytes) {
    return static_cast<std::uint32_t>(
        ::crc32(0L, bytes.empty() ? Z_NULL : bytes.data(), static_cast<uInt>(bytes.size())));
}

class ByteWriter {
  public:
    explicit ByteWriter(std::vector<std::uint8_t>& out) : out_(out) {}

    void u8(std::uint8_t v) { out_.push_back(v); }
    void u16(std::uint16_t v) {
        for (int i = 0; i < 2; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void f64(double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, 8);
        u64(bits);
    }

  private:
    std::vector<std::uint8_t>& out_;
};

class ByteReader {
  public:
    ByteReader(const std::uint8_t* data, std::size_t size) : data_(data), size_(size) {}

    std::uint8_t u8() { return take(1)[0]; }
    std::uint16_t u16() {
        const std::uint8_t* p = take(2);
        return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
    }
    std::uint32_t u32() {
        const std::uint8_t* p = take(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
        return v;
    }
    std::uint64_t u64() {
        const std::uint8_t* p = take(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
        return v;
    }
    double f64() {
        const std::uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }
    std::size_t position() const { return pos_; }

  private:
    const std::uint8_t* take(std::size_t n) {
        if (pos_ + n > size_) {
            throw FormatError(FormatError::Kind::Truncated, "stz: truncated header");
        }
        const std::uint8_t* p = data_ + pos_;
        pos_ += n;
        return p;
    }

    const std::uint8_t* data_;
    std::size_t size_;
    std::size_t pos_ = 0;
};

}  // namespace

std::uint64_t CompressedBlob::header_bit_size() const {
    return 8 * (kFixedHeaderBytes + kTableEntryBytes * sections.size());
}

std::uint64_t CompressedBlob::bit_size() const {
    std::uint64_t bits = header_bit_size();
    for (const BlobSection& s : sections) bits += s.bit_length;
    return bits;
}

const BlobSection* CompressedBlob::find(std::uint32_t tag) const {
    for (const BlobSection& s : sections) {
        if (s.tag == tag) return &s;
    }
    return nullptr;
}

std::vector<std::uint8_t> CompressedBlob::pack() const {
    std::vector<std::uint8_t> out;
    ByteWriter w(out);
    out.insert(out.end(), kMagic, kMagic + 4);
    w.u16(kVersion);
    w.u16(0);  // flags
    for (int m = 0; m < 3; ++m) w.u32(static_cast<std::uint32_t>(header.dims[static_cast<std::size_t>(m)]));
    for (int m = 0; m < 3; ++m) w.u32(static_cast<std::uint32_t>(header.ranks[static_cast<std::size_t>(m)]));
    w.f64(header.s1);
    w.f64(header.s2);
    w.u8(header.bits_per_component);
    w.u8(header.angle_bits);
    w.u16(0);  // reserved
    w.f64(header.rle_rel_err_target);
    w.u32(static_cast<std::uint32_t>(sections.size()));
    if (out.size() != kFixedHeaderBytes) {
        throw NumericError("stz: internal header layout error");
    }

    std::uint64_t offset = kFixedHeaderBytes + kTableEntryBytes * sections.size();
    for (const BlobSection& s : sections) {
        if (s.bytes.size() != (s.bit_length + 7) / 8) {
            throw ContractError("stz: section byte size does not match bit length");
        }
        w.u32(s.tag);
        w.u64(offset);
        w.u64(s.bit_length);
        w.u32(crc32_of(s.bytes));
        offset += s.bytes.size();
    }
    for (const BlobSection& s : sections) {
        out.insert(out.end(), s.bytes.begin(), s.bytes.end());
    }
    return out;
}

CompressedBlob CompressedBlob::unpack(const std::uint8_t* data, std::size_t size) {
    if (size < 4 || std::memcmp(data, kMagic, 4) != 0) {
        throw FormatError(FormatError::Kind::BadMagic, "stz: bad magic");
    }
    ByteReader r(data + 4, size - 4);
    CompressedBlob blob;
    const std::uint16_t version = r.u16();
    if (version != kVersion) {
        throw FormatError(FormatError::Kind::BadVersion,
                          "stz: unsupported version " + std::to_string(version));
    }
    r.u16();  // flags
    for (int m = 0; m < 3; ++m) blob.header.dims[static_cast<std::size_t>(m)] = static_cast<Index>(r.u32());
    for (int m = 0; m < 3; ++m) blob.header.ranks[static_cast<std::size_t>(m)] = static_cast<Index>(r.u32());
    blob.header.s1 = r.f64();
    blob.header.s2 = r.f64();
    blob.header.bits_per_component = r.u8();
    blob.header.angle_bits = r.u8();
    r.u16();  // reserved
    blob.header.rle_rel_err_target = r.f64();
    const std::uint32_t count = r.u32();
    if (count > 64) {
        throw FormatError(FormatError::Kind::BadLayout, "stz: implausible section count");
    }

    struct Entry {
        std::uint32_t tag;
        std::uint64_t offset;
        std::uint64_t bit_length;
        std::uint32_t crc;
    };
    std::vector<Entry> entries;
    for (std::uint32_t i = 0; i < count; ++i) {
        Entry e{};
        e.tag = r.u32();
        e.offset = r.u64();
        e.bit_length = r.u64();
        e.crc = r.u32();
        entries.push_back(e);
    }

    for (const Entry& e : entries) {
        const std::uint64_t nbytes = (e.bit_length + 7) / 8;
        if (e.offset + nbytes > size) {
            throw FormatError(FormatError::Kind::Truncated, "stz: section extends past end of file");
        }
        BlobSection s;
        s.tag = e.tag;
        s.bit_length = e.bit_length;
        s.bytes.assign(data + e.offset, data + e.offset + nbytes);
        if (crc32_of(s.bytes) != e.crc) {
            throw FormatError(FormatError::Kind::ChecksumMismatch,
                              "stz: section checksum mismatch");
        }
        blob.sections.push_back(std::move(s));
    }
    return blob;
}

CompressedBlob CompressedBlob::unpack(const std::vector<std::uint8_t>& bytes) {
    return unpack(bytes.data(), bytes.size());
}

void CompressedBlob::write(std::ostream& out) const {
    const std::vector<std::uint8_t> bytes = pack();
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("stz: write failed");
}

CompressedBlob CompressedBlob::read(std::istream& in) {
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return unpack(bytes);
}

void save_blob(const std::string& path, const CompressedBlob& blob) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open for writing: " + path);
    blob.write(f);
}

CompressedBlob load_blob(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open for reading: " + path);
    return CompressedBlob::read(f);
}

double compression_ratio(std::uint64_t bit_size, const Dims3& dims, int bits_per_component) {
    const double reference =
        2.0 * bits_per_component * static_cast<double>(dims[0] * dims[1] * dims[2]);
    if (reference <= 0.0) throw ContractError("compression_ratio: empty reference");
    return static_cast<double>(bit_size) / reference;
}

double compression_ratio(const CompressedBlob& blob, const Dims3& dims, int bits_per_component) {
    return compression_ratio(blob.bit_size(), dims, bits_per_component);
}

}  // namespace stz

#include "stz/sparse_codec.hpp"

#include <algorithm>
#include <cmath>

#include "stz/errors.hpp"

namespace stz {

QuantizedBlock quantize_block(const cxd* data, Index count, int bits) {
    QuantizedBlock b;
    b.bits = bits;
    double scale = 0.0;
    for (Index i = 0; i < count; ++i) {
        scale = std::max(scale, std::abs(data[i].real()));
        scale = std::max(scale, std::abs(data[i].imag()));
    }
    b.scale = scale;
    b.codes.resize(static_cast<std::size_t>(2 * count));
    for (Index i = 0; i < count; ++i) {
        b.codes[static_cast<std::size_t>(2 * i)] = quantize_signed(data[i].real(), scale, bits);
        b.codes[static_cast<std::size_t>(2 * i + 1)] = quantize_signed(data[i].imag(), scale, bits);
    }
    return b;
}

void write_block(BitWriter& w, const QuantizedBlock& b) {
    w.put_f64(b.scale);
    for (std::uint64_t c : b.codes) w.put_bits(c, b.bits);
}

QuantizedBlock read_block(BitReader& r, Index count, int bits) {
    QuantizedBlock b;
    b.bits = bits;
    b.scale = r.get_f64();
    if (!std::isfinite(b.scale) || b.scale < 0.0) {
        throw FormatError(FormatError::Kind::BadLayout, "quantized block: bad scale");
    }
    b.codes.resize(static_cast<std::size_t>(2 * count));
    for (std::uint64_t& c : b.codes) c = r.get_bits(bits);
    return b;
}

Index SparsePayload::nnz() const { return values.count(); }

std::uint64_t SparsePayload::bit_cost() const {
    return values.bit_cost() + static_cast<std::uint64_t>(mask.size());
}

SparsePayload encode_sparse(const ComplexTensor3& t, const QuantizerSpec& q) {
    q.validate();
    SparsePayload p;
    p.dims = t.dims();
    p.mask.assign(static_cast<std::size_t>(t.size()), false);
    std::vector<cxd> nonzeros;
    for (Index i = 0; i < t.size(); ++i) {
        if (t[i] != cxd(0.0, 0.0)) {
            p.mask[static_cast<std::size_t>(i)] = true;
            nonzeros.push_back(t[i]);
        }
    }
    p.values = quantize_block(nonzeros.data(), static_cast<Index>(nonzeros.size()),
                              q.bits_per_component);
    return p;
}

ComplexTensor3 decode_sparse(const SparsePayload& p) {
    ComplexTensor3 t(p.dims[0], p.dims[1], p.dims[2]);
    Index next = 0;
    for (Index i = 0; i < t.size(); ++i) {
        if (p.mask[static_cast<std::size_t>(i)]) t[i] = p.values.value(next++);
    }
    if (next != p.values.count()) {
        throw FormatError(FormatError::Kind::BadLayout, "sparse payload: mask/value count mismatch");
    }
    return t;
}

void write_sparse(BitWriter& w, const SparsePayload& p) {
    w.put_f64(p.values.scale);
    for (bool b : p.mask) w.put_bit(b);
    for (std::uint64_t c : p.values.codes) w.put_bits(c, p.values.bits);
}

SparsePayload read_sparse(BitReader& r, const Dims3& dims, int bits) {
    SparsePayload p;
    p.dims = dims;
    p.values.bits = bits;
    p.values.scale = r.get_f64();
    if (!std::isfinite(p.values.scale) || p.values.scale < 0.0) {
        throw FormatError(FormatError::Kind::BadLayout, "sparse payload: bad scale");
    }
    const Index n = dims[0] * dims[1] * dims[2];
    p.mask.resize(static_cast<std::size_t>(n));
    Index nnz = 0;
    for (Index i = 0; i < n; ++i) {
        const bool b = r.get_bit();
        p.mask[static_cast<std::size_t>(i)] = b;
        if (b) ++nnz;
    }
    p.values.codes.resize(static_cast<std::size_t>(2 * nnz));
    for (std::uint64_t& c : p.values.codes) c = r.get_bits(bits);
    return p;
}

QuantizedBlock encode_dense(const ComplexTensor3& t, int bits) {
    return quantize_block(t.data(), t.size(), bits);
}

ComplexTensor3 decode_dense(const QuantizedBlock& b, const Dims3& dims) {
    ComplexTensor3 t(dims[0], dims[1], dims[2]);
    if (b.count() != t.size()) {
        throw FormatError(FormatError::Kind::BadLayout, "dense payload: size mismatch");
    }
    for (Index i = 0; i < t.size(); ++i) t[i] = b.value(i);
    return t;
}

QuantizedBlock encode_matrix(const Eigen::MatrixXcd& m, int bits) {
    // Column-major traversal matches Eigen's storage.
    std::vector<cxd> flat(static_cast<std::size_t>(m.size()));
    Index pos = 0;
    for (Index j = 0; j < m.cols(); ++j)
        for (Index i = 0; i < m.rows(); ++i) flat[static_cast<std::size_t>(pos++)] = m(i, j);
    return quantize_block(flat.data(), static_cast<Index>(flat.size()), bits);
}

Eigen::MatrixXcd decode_matrix(const QuantizedBlock& b, Index rows, Index cols) {
    if (b.count() != rows * cols) {
        throw FormatError(FormatError::Kind::BadLayout, "matrix payload: size mismatch");
    }
    Eigen::MatrixXcd m(rows, cols);
    Index pos = 0;
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) m(i, j) = b.value(pos++);
    return m;
}

}  // namespace stz

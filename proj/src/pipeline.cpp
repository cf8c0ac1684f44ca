#include "stz/pipeline.hpp"

#include <string>

#include "stz/angle_codec.hpp"
#include "stz/errors.hpp"
#include "stz/givens.hpp"
#include "stz/hosvd.hpp"
#include "stz/sparse_codec.hpp"

namespace stz {

const char* method_name(CodecMethod m) {
    switch (m) {
        case CodecMethod::StdFc: return "std_fc";
        case CodecMethod::StdRaw: return "std";
        case CodecMethod::Td: return "td";
    }
    return "unknown";
}

std::optional<CodecMethod> method_from_name(const std::string& name) {
    if (name == "std_fc") return CodecMethod::StdFc;
    if (name == "std") return CodecMethod::StdRaw;
    if (name == "td") return CodecMethod::Td;
    return std::nullopt;
}

namespace {

BlobSection section_from_writer(std::uint32_t tag, BitWriter&& w) {
    BlobSection s;
    s.tag = tag;
    s.bit_length = w.bit_count();
    s.bytes = w.take();
    return s;
}

}  // namespace

CompressedBlob compress_tensor(const ComplexTensor3& v, const StdConfig& cfg,
                               const QuantizerSpec& q, CodecMethod method, CompressStats* stats,
                               DescentTrace* trace) {
    cfg.validate(v.dims());
    q.validate();

    ComplexTensor3 core;
    std::array<FactorMatrix, 3> factors;
    ComplexTensor3 residual(v.dims()[0], v.dims()[1], v.dims()[2]);
    int iterations = 0;

    if (method == CodecMethod::Td) {
        HosvdResult h = hosvd(v, cfg.ranks);
        core = std::move(h.core);
        factors = std::move(h.factors);
        if (trace != nullptr) trace->records.clear();
    } else {
        SolveResult res = apbcd_solve(v, cfg);
        core = std::move(res.state.core);
        factors = std::move(res.state.factors);
        residual = std::move(res.state.residual);
        iterations = res.state.iterations;
        if (trace != nullptr) *trace = std::move(res.trace);
    }

    CompressedBlob blob;
    blob.header.dims = v.dims();
    blob.header.ranks = cfg.ranks;
    blob.header.s1 = cfg.s1;
    blob.header.s2 = cfg.s2;
    blob.header.bits_per_component = static_cast<std::uint8_t>(q.bits_per_component);
    blob.header.angle_bits = static_cast<std::uint8_t>(q.angle_bits);
    blob.header.rle_rel_err_target = q.rle_rel_err_target;

    if (method == CodecMethod::StdFc) {
        // Canonicalize column phases into the core before it is quantized;
        // the blob then needs no separate phase records.
        for (int mode = 0; mode < 3; ++mode) {
            auto [u_fixed, core_fixed] =
                normalize_column_phases(factors[static_cast<std::size_t>(mode)], core, mode);
            factors[static_cast<std::size_t>(mode)] = std::move(u_fixed);
            core = std::move(core_fixed);
        }
    }

    {
        BitWriter w;
        if (method == CodecMethod::Td) {
            write_block(w, encode_dense(core, q.bits_per_component));
            blob.sections.push_back(section_from_writer(tags::kCoreDense, std::move(w)));
        } else {
            write_sparse(w, encode_sparse(core, q));
            blob.sections.push_back(section_from_writer(tags::kCoreSparse, std::move(w)));
        }
    }

    if (method != CodecMethod::Td && cfg.alpha2(v.dims()) > 0) {
        BitWriter w;
        write_sparse(w, encode_sparse(residual, q));
        blob.sections.push_back(section_from_writer(tags::kResidual, std::move(w)));
    }

    for (int mode = 0; mode < 3; ++mode) {
        BitWriter w;
        if (method == CodecMethod::StdFc) {
            GivensParams p = givens_decompose(factors[static_cast<std::size_t>(mode)]);
            encode_angles(w, p, q);
            blob.sections.push_back(section_from_writer(tags::angles(mode), std::move(w)));
        } else {
            write_block(w, encode_matrix(factors[static_cast<std::size_t>(mode)],
                                         q.bits_per_component));
            blob.sections.push_back(section_from_writer(tags::factor_raw(mode), std::move(w)));
        }
    }

    if (stats != nullptr) {
        stats->bit_size = blob.bit_size();
        stats->compression_ratio = compression_ratio(blob, v.dims(), q.bits_per_component);
        stats->iterations = iterations;
        const ComplexTensor3 decoded = decompress_blob(blob);
        if (v.norm() == 0.0) {
            stats->relative_error = decoded.norm() == 0.0 ? 0.0 : 1.0;
        } else {
            stats->relative_error = relative_error(decoded, v);
        }
    }
    return blob;
}

ComplexTensor3 decompress_blob(const CompressedBlob& blob) {
    const Dims3& dims = blob.header.dims;
    const Dims3& ranks = blob.header.ranks;
    const int bits = blob.header.bits_per_component;
    for (int m = 0; m < 3; ++m) {
        if (dims[static_cast<std::size_t>(m)] < 1 || ranks[static_cast<std::size_t>(m)] < 1 ||
            ranks[static_cast<std::size_t>(m)] > dims[static_cast<std::size_t>(m)]) {
            throw FormatError(FormatError::Kind::BadLayout, "stz: inconsistent dims/ranks");
        }
    }

    if (const BlobSection* raw = blob.find(tags::kRawTensor)) {
        BitReader r(raw->bytes, raw->bit_length);
        const Index n = dims[0] * dims[1] * dims[2];
        return decode_dense(read_block(r, n, bits), dims);
    }

    ComplexTensor3 core(ranks[0], ranks[1], ranks[2]);
    if (const BlobSection* s = blob.find(tags::kCoreSparse)) {
        BitReader r(s->bytes, s->bit_length);
        core = decode_sparse(read_sparse(r, ranks, bits));
    } else if (const BlobSection* d = blob.find(tags::kCoreDense)) {
        BitReader r(d->bytes, d->bit_length);
        core = decode_dense(read_block(r, ranks[0] * ranks[1] * ranks[2], bits), ranks);
    } else {
        throw FormatError(FormatError::Kind::BadLayout, "stz: missing core section");
    }

    std::array<FactorMatrix, 3> factors;
    for (int mode = 0; mode < 3; ++mode) {
        const Index n = dims[static_cast<std::size_t>(mode)];
        const Index rk = ranks[static_cast<std::size_t>(mode)];
        if (const BlobSection* a = blob.find(tags::angles(mode))) {
            BitReader r(a->bytes, a->bit_length);
            factors[static_cast<std::size_t>(mode)] = givens_reconstruct(decode_angles(r, n, rk));
        } else if (const BlobSection* f = blob.find(tags::factor_raw(mode))) {
            BitReader r(f->bytes, f->bit_length);
            factors[static_cast<std::size_t>(mode)] = decode_matrix(read_block(r, n * rk, bits), n, rk);
        } else {
            throw FormatError(FormatError::Kind::BadLayout,
                              "stz: missing factor section for mode " + std::to_string(mode + 1));
        }
    }

    ComplexTensor3 out = tucker_reconstruct(core, factors[0], factors[1], factors[2]);
    if (const BlobSection* s = blob.find(tags::kResidual)) {
        BitReader r(s->bytes, s->bit_length);
        out += decode_sparse(read_sparse(r, dims, bits));
    }
    return out;
}

}  // namespace stz

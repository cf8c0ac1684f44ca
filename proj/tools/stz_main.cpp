// stz: two-stage compressor for complex beamforming-weight tensors, plus an
// evaluation harness for compression ratio and sum-rate loss.
//
// Exit codes: 0 success, 2 bad configuration or arguments, 3 I/O or file
// format error, 4 numeric failure, 5 unsupported container version,
// 6 checksum mismatch.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "stz/config_json.hpp"
#include "stz/errors.hpp"
#include "stz/eval.hpp"
#include "stz/pipeline.hpp"
#include "stz/rng.hpp"
#include "stz/tensor_io.hpp"
#include "stz/version.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitBadConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitNumeric = 4;
constexpr int kExitVersion = 5;
constexpr int kExitChecksum = 6;

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const stz::ContractError*>(&e) != nullptr) return kExitBadConfig;
    if (const auto* f = dynamic_cast<const stz::FormatError*>(&e)) {
        switch (f->kind()) {
            case stz::FormatError::Kind::BadVersion: return kExitVersion;
            case stz::FormatError::Kind::ChecksumMismatch: return kExitChecksum;
            default: return kExitIo;
        }
    }
    if (dynamic_cast<const stz::NumericError*>(&e) != nullptr) return kExitNumeric;
    if (dynamic_cast<const stz::IoError*>(&e) != nullptr) return kExitIo;
    return kExitBadConfig;
}

json load_json_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw stz::IoError("cannot open config: " + path);
    json j;
    try {
        f >> j;
    } catch (const json::parse_error& e) {
        throw stz::ContractError("config parse error in " + path + ": " + e.what());
    }
    return j;
}

// Applies "dotted.path=value" overrides; values parse as JSON when they can,
// else as strings.
void apply_overrides(json& config, const std::vector<std::string>& sets) {
    for (const std::string& s : sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) {
            throw stz::ContractError("--set expects key=value, got: " + s);
        }
        const std::string key = s.substr(0, eq);
        const std::string raw = s.substr(eq + 1);
        json value;
        try {
            value = json::parse(raw);
        } catch (const json::parse_error&) {
            value = raw;
        }
        json* node = &config;
        std::size_t start = 0;
        for (;;) {
            const auto dot = key.find('.', start);
            const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos
                                                                                : dot - start);
            if (part.empty()) throw stz::ContractError("--set: empty path segment in " + key);
            if (dot == std::string::npos) {
                (*node)[part] = value;
                break;
            }
            node = &(*node)[part];
            start = dot + 1;
        }
    }
}

std::string tag_to_string(std::uint32_t tag) {
    std::string s(4, '?');
    for (int i = 0; i < 4; ++i) {
        const char c = static_cast<char>((tag >> (8 * i)) & 0xff);
        s[static_cast<std::size_t>(i)] = (c >= 32 && c < 127) ? c : '?';
    }
    return s;
}

int cmd_compress(const std::string& input, const std::string& output, const json& config,
                 const std::string& manifest_path) {
    const auto t0 = std::chrono::steady_clock::now();
    const stz::ComplexTensor3 v = stz::load_ct3(input);

    stz::StdConfig cfg = stz::std_config_from_json(config);
    stz::QuantizerSpec quant;
    if (config.contains("quant")) quant = stz::quantizer_from_json(config.at("quant"));
    stz::CodecMethod method = stz::CodecMethod::StdFc;
    if (config.contains("method")) {
        const auto m = stz::method_from_name(config.at("method").get<std::string>());
        if (!m) throw stz::ContractError("config: unknown method");
        method = *m;
    }

    stz::CompressStats stats;
    const stz::CompressedBlob blob = stz::compress_tensor(v, cfg, quant, method, &stats);
    const auto t1 = std::chrono::steady_clock::now();
    stz::save_blob(output, blob);

    std::fprintf(stderr, "CR=%.6f RE=%.6g iterations=%d bits=%llu\n", stats.compression_ratio,
                 stats.relative_error, stats.iterations,
                 static_cast<unsigned long long>(stats.bit_size));

    if (!manifest_path.empty()) {
        json manifest{
            {"tool_version", stz::kVersion},
            {"config", config},
            {"config_hash", stz::fnv1a64(config.dump())},
            {"seed", cfg.seed},
            {"input", input},
            {"output", output},
            {"timings_ms",
             {{"compress", std::chrono::duration<double, std::milli>(t1 - t0).count()}}},
            {"metrics",
             {{"CR", stats.compression_ratio},
              {"RE", stats.relative_error},
              {"iterations", stats.iterations},
              {"bits", stats.bit_size}}}};
        std::ofstream f(manifest_path);
        if (!f) throw stz::IoError("cannot open manifest for writing: " + manifest_path);
        f << manifest.dump(2) << '\n';
    }
    return kExitOk;
}

int cmd_decompress(const std::string& input, const std::string& output) {
    const stz::CompressedBlob blob = stz::load_blob(input);
    const stz::ComplexTensor3 v = stz::decompress_blob(blob);
    stz::save_ct3(output, v);
    std::fprintf(stderr, "decompressed %lldx%lldx%lld tensor from %llu bits\n",
                 static_cast<long long>(v.dim(0)), static_cast<long long>(v.dim(1)),
                 static_cast<long long>(v.dim(2)),
                 static_cast<unsigned long long>(blob.bit_size()));
    return kExitOk;
}

int cmd_inspect(const std::string& input) {
    const stz::CompressedBlob blob = stz::load_blob(input);
    const auto& h = blob.header;
    std::printf("stz container v%u\n", static_cast<unsigned>(stz::CompressedBlob::kVersion));
    std::printf("dims: %lld x %lld x %lld, ranks: %lld x %lld x %lld\n",
                static_cast<long long>(h.dims[0]), static_cast<long long>(h.dims[1]),
                static_cast<long long>(h.dims[2]), static_cast<long long>(h.ranks[0]),
                static_cast<long long>(h.ranks[1]), static_cast<long long>(h.ranks[2]));
    std::printf("s1=%g s2=%g bits=%u angle_bits=%u rle_target=%g\n", h.s1, h.s2,
                h.bits_per_component, h.angle_bits, h.rle_rel_err_target);
    std::printf("sections (%zu):\n", blob.sections.size());
    for (const auto& s : blob.sections) {
        std::printf("  %s  %10llu bits  (%zu bytes)\n", tag_to_string(s.tag).c_str(),
                    static_cast<unsigned long long>(s.bit_length), s.bytes.size());
    }
    std::printf("total bit_size: %llu\n", static_cast<unsigned long long>(blob.bit_size()));
    std::printf("CR vs %u-bit reference: %.6f\n", h.bits_per_component,
                stz::compression_ratio(blob, h.dims, h.bits_per_component));
    return kExitOk;
}

int cmd_eval(const json& scenario_json, const std::string& out_dir, int jobs_override) {
    stz::EvalScenario scenario = stz::EvalScenario::from_json(scenario_json);
    if (jobs_override > 0) scenario.jobs = jobs_override;
    const stz::EvalReport report = stz::run_eval(scenario, out_dir);
    std::size_t failed = 0;
    for (const auto& r : report.rows) failed += r.failed ? 1 : 0;
    std::fprintf(stderr, "eval: %zu rows (%zu failed) -> %s\n", report.rows.size(), failed,
                 out_dir.c_str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stz: sparse-Tucker compressor for complex weight tensors"};
    app.set_version_flag("--version", std::string(stz::kVersion));
    app.require_subcommand(1);

    std::string input, output, config_path, manifest_path, out_dir = "eval_out";
    std::vector<std::string> sets;
    int jobs = 0;

    auto* compress = app.add_subcommand("compress", "compress a .ct3 tensor into a .stz blob");
    compress->add_option("input", input, "input .ct3 tensor")->required();
    compress->add_option("output", output, "output .stz blob")->required();
    compress->add_option("--config", config_path, "JSON config (ranks, s1, s2, beta, quant, ...)")
        ->required();
    compress->add_option("--set", sets, "override config entries, e.g. --set s1=0.4");
    compress->add_option("--manifest", manifest_path, "write a run manifest JSON here");

    auto* decompress = app.add_subcommand("decompress", "reconstruct a .ct3 tensor from a blob");
    decompress->add_option("input", input, "input .stz blob")->required();
    decompress->add_option("output", output, "output .ct3 tensor")->required();

    auto* inspect = app.add_subcommand("inspect", "dump blob header and section table");
    inspect->add_option("input", input, "input .stz blob")->required();

    auto* eval = app.add_subcommand("eval", "run an evaluation scenario (channels -> metrics)");
    eval->add_option("scenario", config_path, "scenario JSON")->required();
    eval->add_option("--out", out_dir, "output directory for reports and traces");
    eval->add_option("--jobs", jobs, "worker threads for grid combos");
    eval->add_option("--set", sets, "override scenario entries");

    CLI11_PARSE(app, argc, argv);

    try {
        if (compress->parsed()) {
            json config = load_json_file(config_path);
            apply_overrides(config, sets);
            return cmd_compress(input, output, config, manifest_path);
        }
        if (decompress->parsed()) return cmd_decompress(input, output);
        if (inspect->parsed()) return cmd_inspect(input);
        if (eval->parsed()) {
            json scenario = load_json_file(config_path);
            apply_overrides(scenario, sets);
            return cmd_eval(scenario, out_dir, jobs);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_code_for(e);
    }
    return kExitOk;
}

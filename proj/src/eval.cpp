#include "stz/eval.hpp"

#include <zlib.h>

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include "stz/config_json.hpp"
#include "stz/errors.hpp"
#include "stz/rates.hpp"
#include "stz/rng.hpp"
#include "stz/version.hpp"
#include "stz/zf.hpp"

namespace stz {

using nlohmann::json;

StdConfig std_config_from_json(const json& j) {
    StdConfig cfg;
    if (j.contains("ranks")) {
        const auto& r = j.at("ranks");
        if (!r.is_array() || r.size() != 3) throw ContractError("config: ranks must be [r1,r2,r3]");
        for (int m = 0; m < 3; ++m) cfg.ranks[static_cast<std::size_t>(m)] = r[static_cast<std::size_t>(m)].get<Index>();
    }
    cfg.s1 = j.value("s1", cfg.s1);
    cfg.s2 = j.value("s2", cfg.s2);
    cfg.beta = j.value("beta", cfg.beta);
    cfg.max_iters = j.value("max_iters", cfg.max_iters);
    cfg.tol = j.value("tol", cfg.tol);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.eta_refresh = j.value("eta_refresh", cfg.eta_refresh);
    if (j.contains("eta")) {
        const auto& e = j.at("eta");
        if (e.contains("auto") && e.at("auto").get<bool>()) {
            cfg.eta_auto = true;
        } else if (e.contains("values")) {
            cfg.eta_auto = false;
            const auto& v = e.at("values");
            cfg.eta_core = v.value("core", 1.0);
            cfg.eta_sparse = v.value("sparse", 1.0);
            if (v.contains("factor")) {
                const auto& f = v.at("factor");
                if (!f.is_array() || f.size() != 3) {
                    throw ContractError("config: eta.values.factor must have 3 entries");
                }
                for (int m = 0; m < 3; ++m) {
                    cfg.eta_factor[static_cast<std::size_t>(m)] = f[static_cast<std::size_t>(m)].get<double>();
                }
            }
        } else {
            throw ContractError("config: eta must specify auto or values");
        }
    }
    return cfg;
}

json std_config_to_json(const StdConfig& cfg) {
    json j;
    j["ranks"] = {cfg.ranks[0], cfg.ranks[1], cfg.ranks[2]};
    j["s1"] = cfg.s1;
    j["s2"] = cfg.s2;
    j["beta"] = cfg.beta;
    if (cfg.eta_auto) {
        j["eta"] = {{"auto", true}};
    } else {
        j["eta"] = {{"values",
                     {{"core", cfg.eta_core},
                      {"sparse", cfg.eta_sparse},
                      {"factor", {cfg.eta_factor[0], cfg.eta_factor[1], cfg.eta_factor[2]}}}}};
    }
    j["max_iters"] = cfg.max_iters;
    j["tol"] = cfg.tol;
    j["seed"] = cfg.seed;
    j["eta_refresh"] = cfg.eta_refresh;
    return j;
}

QuantizerSpec quantizer_from_json(const json& j) {
    QuantizerSpec q;
    q.bits_per_component = j.value("bits", q.bits_per_component);
    q.angle_bits = j.value("angle_bits", q.angle_bits);
    q.rle_rel_err_target = j.value("rle_rel_err", q.rle_rel_err_target);
    q.validate();
    return q;
}

json quantizer_to_json(const QuantizerSpec& q) {
    return json{{"bits", q.bits_per_component},
                {"angle_bits", q.angle_bits},
                {"rle_rel_err", q.rle_rel_err_target}};
}

namespace {

ChannelSpec channel_from_json(const json& j) {
    ChannelSpec c;
    const std::string model = j.value("model", std::string("geometric"));
    if (model == "iid") {
        c.model = ChannelModel::Iid;
    } else if (model == "geometric") {
        c.model = ChannelModel::Geometric;
    } else {
        throw ContractError("scenario: unknown channel model " + model);
    }
    c.users = j.value("users", c.users);
    c.res_elements = j.value("res_elements", c.res_elements);
    c.tx_antennas = j.value("tx_antennas", c.tx_antennas);
    c.rx_antennas = j.value("rx_antennas", c.rx_antennas);
    c.streams = j.value("streams", c.streams);
    c.snr_db = j.value("snr_db", c.snr_db);
    c.paths = j.value("paths", c.paths);
    c.res_per_rb = j.value("res_per_rb", c.res_per_rb);
    return c;
}

json channel_to_json(const ChannelSpec& c) {
    return json{{"model", c.model == ChannelModel::Iid ? "iid" : "geometric"},
                {"users", c.users},
                {"res_elements", c.res_elements},
                {"tx_antennas", c.tx_antennas},
                {"rx_antennas", c.rx_antennas},
                {"streams", c.streams},
                {"snr_db", c.snr_db},
                {"paths", c.paths},
                {"res_per_rb", c.res_per_rb}};
}

std::uint32_t crc32_of_string(const std::string& s) {
    return static_cast<std::uint32_t>(
        ::crc32(0L, reinterpret_cast<const Bytef*>(s.data()), static_cast<uInt>(s.size())));
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open for writing: " + path);
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw IoError("write failed: " + path);
}

std::string ranks_label(const Dims3& r) {
    std::ostringstream os;
    os << r[0] << 'x' << r[1] << 'x' << r[2];
    return os.str();
}

}  // namespace

EvalScenario EvalScenario::from_json(const json& j) {
    EvalScenario s;
    if (j.contains("channel")) s.channel = channel_from_json(j.at("channel"));
    if (j.contains("methods")) s.methods = j.at("methods").get<std::vector<std::string>>();
    if (s.methods.empty()) s.methods = {"std_fc", "std", "td"};
    for (const std::string& m : s.methods) {
        if (!method_from_name(m)) throw ContractError("scenario: unknown method " + m);
    }
    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        if (g.contains("ranks")) {
            for (const auto& r : g.at("ranks")) {
                if (!r.is_array() || r.size() != 3) {
                    throw ContractError("scenario: grid.ranks entries must be [r1,r2,r3]");
                }
                s.ranks_grid.push_back({r[0].get<Index>(), r[1].get<Index>(), r[2].get<Index>()});
            }
        }
        if (g.contains("s1")) s.s1_grid = g.at("s1").get<std::vector<double>>();
        if (g.contains("s2")) s.s2_grid = g.at("s2").get<std::vector<double>>();
    }
    if (s.ranks_grid.empty()) {
        throw ContractError("scenario: grid.ranks must list at least one rank triple");
    }
    if (j.contains("solver")) s.solver = std_config_from_json(j.at("solver"));
    if (j.contains("quant")) s.quant = quantizer_from_json(j.at("quant"));
    if (j.contains("seeds")) s.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (s.seeds.empty()) throw ContractError("scenario: seeds must be nonempty");
    s.jobs = j.value("jobs", 1);
    if (s.jobs < 1) throw ContractError("scenario: jobs must be >= 1");
    s.write_traces = j.value("write_traces", true);
    return s;
}

json EvalScenario::to_json() const {
    json g;
    g["ranks"] = json::array();
    for (const Dims3& r : ranks_grid) g["ranks"].push_back({r[0], r[1], r[2]});
    g["s1"] = s1_grid;
    g["s2"] = s2_grid;
    return json{{"channel", channel_to_json(channel)}, {"methods", methods},
                {"grid", g},           {"solver", std_config_to_json(solver)},
                {"quant", quantizer_to_json(quant)},   {"seeds", seeds},
                {"jobs", jobs},        {"write_traces", write_traces}};
}

void EvalReport::write_csv(std::ostream& out) const {
    out << "method,r1,r2,r3,s1,s2,seed,CR,RE,RL,iters,seconds,status\n";
    for (const EvalRow& r : rows) {
        out << r.method << ',' << r.ranks[0] << ',' << r.ranks[1] << ',' << r.ranks[2] << ','
            << r.s1 << ',' << r.s2 << ',' << r.seed << ',' << r.cr << ',' << r.re << ',' << r.rl
            << ',' << r.iters << ',' << r.seconds << ','
            << (r.failed ? "failed: " + r.error : std::string("ok")) << '\n';
    }
}

json EvalReport::to_json() const {
    json rows_json = json::array();
    for (const EvalRow& r : rows) {
        rows_json.push_back(json{{"method", r.method},
                                 {"ranks", {r.ranks[0], r.ranks[1], r.ranks[2]}},
                                 {"s1", r.s1},
                                 {"s2", r.s2},
                                 {"seed", r.seed},
                                 {"CR", r.cr},
                                 {"RE", r.re},
                                 {"RL", r.rl},
                                 {"iters", r.iters},
                                 {"seconds", r.seconds},
                                 {"failed", r.failed},
                                 {"error", r.error}});
    }
    return json{{"rows", rows_json}, {"manifest", manifest}};
}

EvalReport run_eval(const EvalScenario& scenario, const std::string& out_dir) {
    scenario.channel.validate();
    scenario.quant.validate();

    // Expanded grid. The truncation baseline ignores the sparsity knobs, so
    // it contributes one combo per rank triple.
    std::vector<EvalCombo> combos;
    for (const std::string& name : scenario.methods) {
        const CodecMethod method = *method_from_name(name);
        for (const Dims3& ranks : scenario.ranks_grid) {
            if (method == CodecMethod::Td) {
                combos.push_back({method, ranks, 1.0, 0.0});
                continue;
            }
            for (double s1 : scenario.s1_grid) {
                for (double s2 : scenario.s2_grid) {
                    combos.push_back({method, ranks, s1, s2});
                }
            }
        }
    }

    namespace fs = std::filesystem;
    const bool emit = !out_dir.empty();
    if (emit) {
        fs::create_directories(out_dir);
        if (scenario.write_traces) fs::create_directories(fs::path(out_dir) / "traces");
    }

    const auto t_start = std::chrono::steady_clock::now();

    // Per-seed shared context, built up front so workers stay independent.
    struct SeedContext {
        ChannelSet channels;
        WeightSet reference;
        double raw_bits = 0.0;
        double ref_norm_sq = 0.0;
    };
    std::vector<SeedContext> contexts(scenario.seeds.size());
    for (std::size_t si = 0; si < scenario.seeds.size(); ++si) {
        ChannelSpec spec = scenario.channel;
        spec.seed = scenario.seeds[si];
        contexts[si].channels = synth_channels(spec);
        contexts[si].reference = zf_weights(contexts[si].channels);
        for (const ComplexTensor3& v : contexts[si].reference.v) {
            contexts[si].raw_bits += 2.0 * scenario.quant.bits_per_component *
                                     static_cast<double>(v.size());
            contexts[si].ref_norm_sq += v.squared_norm();
        }
    }
    const auto t_setup = std::chrono::steady_clock::now();

    struct Task {
        std::size_t seed_index;
        std::size_t combo_index;
    };
    std::vector<Task> tasks;
    for (std::size_t si = 0; si < scenario.seeds.size(); ++si) {
        for (std::size_t ci = 0; ci < combos.size(); ++ci) tasks.push_back({si, ci});
    }

    EvalReport report;
    report.rows.resize(tasks.size());
    std::vector<std::string> trace_blobs(tasks.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t ti = next.fetch_add(1);
            if (ti >= tasks.size()) return;
            const Task& task = tasks[ti];
            const SeedContext& ctx = contexts[task.seed_index];
            const EvalCombo& combo = combos[task.combo_index];

            EvalRow row;
            row.method = method_name(combo.method);
            row.ranks = combo.ranks;
            row.s1 = combo.s1;
            row.s2 = combo.s2;
            row.seed = scenario.seeds[task.seed_index];

            const auto t0 = std::chrono::steady_clock::now();
            try {
                StdConfig cfg = scenario.solver;
                cfg.ranks = combo.ranks;
                cfg.s1 = combo.s1;
                cfg.s2 = combo.s2;
                cfg.seed = row.seed;

                double bits = 0.0;
                double err_sq = 0.0;
                int iters = 0;
                std::vector<ComplexTensor3> decoded;
                DescentTrace trace;
                for (std::size_t k = 0; k < ctx.reference.v.size(); ++k) {
                    CompressStats stats;
                    DescentTrace* trace_ptr = (k == 0) ? &trace : nullptr;
                    CompressedBlob blob = compress_tensor(ctx.reference.v[k], cfg, scenario.quant,
                                                          combo.method, &stats, trace_ptr);
                    bits += static_cast<double>(stats.bit_size);
                    iters = std::max(iters, stats.iterations);
                    ComplexTensor3 dec = decompress_blob(blob);
                    ComplexTensor3 diff = dec;
                    diff -= ctx.reference.v[k];
                    err_sq += diff.squared_norm();
                    decoded.push_back(std::move(dec));
                }
                WeightSet rebuilt = weights_from_tensors(ctx.channels, std::move(decoded));
                row.cr = bits / ctx.raw_bits;
                row.re = std::sqrt(err_sq / ctx.ref_norm_sq);
                row.rl = rate_loss(ctx.channels, ctx.reference, rebuilt);
                row.iters = iters;
                if (scenario.write_traces && combo.method != CodecMethod::Td) {
                    std::ostringstream os;
                    trace.write_csv(os);
                    trace_blobs[ti] = os.str();
                }
            } catch (const std::exception& e) {
                row.failed = true;
                row.error = e.what();
            }
            row.seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            report.rows[ti] = std::move(row);
        }
    };

    const int jobs = std::max(1, scenario.jobs);
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    const auto t_end = std::chrono::steady_clock::now();

    const json scenario_json = scenario.to_json();
    std::ostringstream hash_src;
    hash_src << scenario_json.dump();
    char hash_hex[32];
    std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(hash_src.str())));

    json artifacts = json::array();
    if (emit) {
        namespace fs = std::filesystem;
        for (std::size_t ti = 0; ti < tasks.size(); ++ti) {
            if (trace_blobs[ti].empty()) continue;
            const EvalRow& row = report.rows[ti];
            std::ostringstream name;
            name << "trace_" << row.method << '_' << ranks_label(row.ranks) << "_s1_" << row.s1
                 << "_s2_" << row.s2 << "_seed_" << row.seed << ".csv";
            const std::string path = (fs::path(out_dir) / "traces" / name.str()).string();
            write_file(path, trace_blobs[ti]);
            artifacts.push_back(json{{"path", path}, {"crc32", crc32_of_string(trace_blobs[ti])}});
        }
    }

    report.manifest = json{
        {"tool_version", kVersion},
        {"config_hash", std::string(hash_hex)},
        {"scenario", scenario_json},
        {"rows", report.rows.size()},
        {"timings_ms",
         {{"setup", std::chrono::duration<double, std::milli>(t_setup - t_start).count()},
          {"combos", std::chrono::duration<double, std::milli>(t_end - t_setup).count()}}},
        {"artifacts", artifacts}};

    if (emit) {
        namespace fs = std::filesystem;
        std::ostringstream csv;
        report.write_csv(csv);
        const std::string csv_path = (fs::path(out_dir) / "report.csv").string();
        write_file(csv_path, csv.str());
        report.manifest["artifacts"].push_back(
            json{{"path", csv_path}, {"crc32", crc32_of_string(csv.str())}});

        const std::string rows_json = report.to_json().dump(2);
        const std::string json_path = (fs::path(out_dir) / "report.json").string();
        write_file(json_path, rows_json);
        report.manifest["artifacts"].push_back(
            json{{"path", json_path}, {"crc32", crc32_of_string(rows_json)}});

        write_file((fs::path(out_dir) / "manifest.json").string(), report.manifest.dump(2));
    }
    return report;
}

}  // namespace stz

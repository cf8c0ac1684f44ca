#pragma once

#include <cstdint>
#include <json.hpp>
#include <string>
#include <vector>

#include "stz/channel.hpp"
#include "stz/pipeline.hpp"

namespace stz {

// One point of the parameter grid.
struct EvalCombo {
    CodecMethod method;
    Dims3 ranks;
    double s1;
    double s2;
};

struct EvalRow {
    std::string method;
    Dims3 ranks{0, 0, 0};
    double s1 = 0.0;
    double s2 = 0.0;
    std::uint64_t seed = 0;
    double cr = 0.0;
    double re = 0.0;
    double rl = 0.0;
    int iters = 0;
    double seconds = 0.0;
    bool failed = false;
    std::string error;
};

struct EvalScenario {
    ChannelSpec channel;                 // seed field is overridden per run seed
    std::vector<std::string> methods;    // subset of {"std_fc", "std", "td"}
    std::vector<Dims3> ranks_grid;
    std::vector<double> s1_grid{0.5};
    std::vector<double> s2_grid{0.0};
    StdConfig solver;                    // ranks/s1/s2/seed overridden per combo
    QuantizerSpec quant;
    std::vector<std::uint64_t> seeds{1};
    int jobs = 1;
    bool write_traces = true;

    static EvalScenario from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

struct EvalReport {
    std::vector<EvalRow> rows;
    nlohmann::json manifest;

    void write_csv(std::ostream& out) const;
    nlohmann::json to_json() const;
};

// Runs every (seed x method x ranks x s1 x s2) combination: synthesizes
// channels, builds reference ZF weights, compresses each user's weight
// tensor, decodes, recomputes precoders and reports CR / RE / RL. Per-combo
// failures are recorded in the row and the run continues. Artifacts
// (report.csv, report.json, manifest.json, per-run traces) land in out_dir
// unless it is empty.
EvalReport run_eval(const EvalScenario& scenario, const std::string& out_dir);

}  // namespace stz

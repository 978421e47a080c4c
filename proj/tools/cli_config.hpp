#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "whsboost/evaluation.hpp"

namespace whsboost::cli {

// Anything wrong with the config file or the inputs it references. The
// driver maps this to exit code 1; every other exception becomes 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DatasetBlock {
    std::string name;
    std::string csv;
    std::string schema;
    std::string meta;  // optional sidecar JSON copied into summary.json
};

struct SimBlock {
    std::string name;
    SimulationSpec spec;  // seed is filled from the master seed at run time
};

struct StatsBlock {
    std::vector<std::string> results;
    std::string metric = "f_beta";  // recall | precision | f_beta | auc
    bool pooled = false;
    double alpha = 0.05;
};

struct RunConfig {
    std::uint64_t seed = 0;
    int repetitions = 1;
    double train_fraction = 0.7;
    double beta = 3.0;
    std::vector<DatasetBlock> datasets;
    std::vector<SimBlock> sims;
    std::vector<PipelineSpec> pipelines;
    StatsBlock stats;
};

// Flat key = value text; '#' lines are comments. A `dataset.name`,
// `sim.name`, or `pipeline.name` key opens a new block and later keys with
// the same prefix bind to it. Unknown keys, unreadable referenced files,
// and a missing seed are all errors.
RunConfig parse_run_config(const std::string& path);

}  // namespace whsboost::cli

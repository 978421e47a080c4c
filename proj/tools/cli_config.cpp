#include "cli_config.hpp"

#include <cctype>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

namespace whsboost::cli {
namespace {

namespace fs = std::filesystem;

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

struct Cursor {
    std::string path;
    int line = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw ConfigError(path + ":" + std::to_string(line) + ": " + msg);
    }
};

std::uint64_t parse_u64(const Cursor& at, const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        if (!value.empty() && value[0] == '-') throw std::invalid_argument("negative");
        std::uint64_t v = std::stoull(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        at.fail(key + ": expected a non-negative integer, got '" + value + "'");
    }
}

int parse_int(const Cursor& at, const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        int v = std::stoi(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        at.fail(key + ": expected an integer, got '" + value + "'");
    }
}

double parse_double(const Cursor& at, const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        at.fail(key + ": expected a number, got '" + value + "'");
    }
}

bool parse_bool(const Cursor& at, const std::string& key, const std::string& value) {
    if (value == "true" || value == "yes" || value == "1") return true;
    if (value == "false" || value == "no" || value == "0") return false;
    at.fail(key + ": expected true/false, got '" + value + "'");
}

// Block and column names end up as CSV cells and file stems, so keep them
// to a character set that needs no quoting anywhere.
std::string parse_name(const Cursor& at, const std::string& key, const std::string& value) {
    if (value.empty()) at.fail(key + ": empty name");
    for (char ch : value) {
        bool ok = std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-' ||
                  ch == '.';
        if (!ok) at.fail(key + ": name '" + value + "' may use only [A-Za-z0-9_.-]");
    }
    return value;
}

std::string parse_existing_file(const Cursor& at, const std::string& key,
                                const std::string& value) {
    if (!fs::exists(value)) at.fail(key + ": file does not exist: " + value);
    if (fs::is_directory(value)) at.fail(key + ": expected a file, got a directory: " + value);
    return value;
}

}  // namespace

RunConfig parse_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file: " + path);

    RunConfig cfg;
    bool seed_set = false;
    Cursor at{path, 0};
    std::string raw;

    auto current_dataset = [&]() -> DatasetBlock& {
        if (cfg.datasets.empty()) at.fail("dataset.* key before any dataset.name");
        return cfg.datasets.back();
    };
    auto current_sim = [&]() -> SimBlock& {
        if (cfg.sims.empty()) at.fail("sim.* key before any sim.name");
        return cfg.sims.back();
    };
    auto current_pipeline = [&]() -> PipelineSpec& {
        if (cfg.pipelines.empty()) at.fail("pipeline.* key before any pipeline.name");
        return cfg.pipelines.back();
    };

    while (std::getline(in, raw)) {
        ++at.line;
        std::string text = trim(raw);
        if (text.empty() || text[0] == '#') continue;

        std::size_t eq = text.find('=');
        if (eq == std::string::npos) at.fail("expected 'key = value'");
        std::string key = trim(text.substr(0, eq));
        std::string value = trim(text.substr(eq + 1));
        if (key.empty()) at.fail("missing key before '='");
        if (value.empty()) at.fail(key + ": missing value");

        if (key == "seed") {
            cfg.seed = parse_u64(at, key, value);
            seed_set = true;
        } else if (key == "repetitions") {
            cfg.repetitions = parse_int(at, key, value);
            if (cfg.repetitions < 1) at.fail("repetitions: must be at least 1");
        } else if (key == "train_fraction") {
            cfg.train_fraction = parse_double(at, key, value);
            if (!(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0))
                at.fail("train_fraction: must lie strictly between 0 and 1");
        } else if (key == "beta") {
            cfg.beta = parse_double(at, key, value);
            if (!(cfg.beta > 0.0)) at.fail("beta: must be positive");
        } else if (key == "dataset.name") {
            cfg.datasets.push_back({parse_name(at, key, value), "", "", ""});
        } else if (key == "dataset.csv") {
            current_dataset().csv = parse_existing_file(at, key, value);
        } else if (key == "dataset.schema") {
            current_dataset().schema = parse_existing_file(at, key, value);
        } else if (key == "dataset.meta") {
            current_dataset().meta = parse_existing_file(at, key, value);
        } else if (key == "sim.name") {
            cfg.sims.push_back({parse_name(at, key, value), SimulationSpec{}});
        } else if (key == "sim.n_total") {
            current_sim().spec.n_total = parse_u64(at, key, value);
        } else if (key == "sim.p") {
            current_sim().spec.p = parse_u64(at, key, value);
        } else if (key == "sim.p0") {
            current_sim().spec.p0 = parse_u64(at, key, value);
        } else if (key == "sim.minority_fraction") {
            current_sim().spec.minority_fraction = parse_double(at, key, value);
        } else if (key == "sim.pool") {
            current_sim().spec.oversample_pool = parse_u64(at, key, value);
        } else if (key == "pipeline.name") {
            PipelineSpec spec;
            spec.name = parse_name(at, key, value);
            cfg.pipelines.push_back(spec);
        } else if (key == "pipeline.method") {
            try {
                current_pipeline().method = pipeline_method_from_name(value);
            } catch (const std::exception& e) {
                at.fail(e.what());
            }
        } else if (key == "pipeline.base") {
            try {
                current_pipeline().config.base.kind = classifier_kind_from_name(value);
            } catch (const std::exception& e) {
                at.fail(e.what());
            }
        } else if (key == "pipeline.knn_k") {
            current_pipeline().config.base.knn_k = parse_u64(at, key, value);
        } else if (key == "pipeline.dtree_max_depth") {
            current_pipeline().config.base.dtree_max_depth = parse_u64(at, key, value);
        } else if (key == "pipeline.dtree_min_leaf") {
            current_pipeline().config.base.dtree_min_leaf = parse_u64(at, key, value);
        } else if (key == "pipeline.bpnn_hidden") {
            current_pipeline().config.base.bpnn_hidden = parse_u64(at, key, value);
        } else if (key == "pipeline.bpnn_epochs") {
            current_pipeline().config.base.bpnn_epochs = parse_u64(at, key, value);
        } else if (key == "pipeline.bpnn_lr") {
            current_pipeline().config.base.bpnn_learning_rate = parse_double(at, key, value);
        } else if (key == "pipeline.svm_kernel") {
            if (value == "linear")
                current_pipeline().config.base.svm_kernel = SvmKernel::linear;
            else if (value == "rbf")
                current_pipeline().config.base.svm_kernel = SvmKernel::rbf;
            else
                at.fail("pipeline.svm_kernel: expected linear or rbf, got '" + value + "'");
        } else if (key == "pipeline.svm_c") {
            current_pipeline().config.base.svm_c = parse_double(at, key, value);
        } else if (key == "pipeline.svm_gamma") {
            current_pipeline().config.base.svm_gamma = parse_double(at, key, value);
        } else if (key == "pipeline.svm_tol") {
            current_pipeline().config.base.svm_tolerance = parse_double(at, key, value);
        } else if (key == "pipeline.svm_max_passes") {
            current_pipeline().config.base.svm_max_passes = parse_u64(at, key, value);
        } else if (key == "pipeline.iterations") {
            current_pipeline().config.iterations = parse_int(at, key, value);
        } else if (key == "pipeline.balanced_size") {
            current_pipeline().config.balanced_size = parse_u64(at, key, value);
        } else if (key == "pipeline.smote_k") {
            current_pipeline().config.smote_k = parse_u64(at, key, value);
        } else if (key == "pipeline.pool_c") {
            current_pipeline().config.pool_constant = parse_double(at, key, value);
        } else if (key == "pipeline.error_threshold") {
            current_pipeline().config.error_threshold = parse_double(at, key, value);
        } else if (key == "pipeline.max_retries") {
            current_pipeline().config.max_retries = parse_int(at, key, value);
        } else if (key == "pipeline.wsmote_literal") {
            current_pipeline().config.wsmote.literal_formula = parse_bool(at, key, value);
        } else if (key == "stats.results") {
            cfg.stats.results.push_back(parse_existing_file(at, key, value));
        } else if (key == "stats.metric") {
            if (value != "recall" && value != "precision" && value != "f_beta" && value != "auc")
                at.fail("stats.metric: expected recall, precision, f_beta, or auc");
            cfg.stats.metric = value;
        } else if (key == "stats.pooled") {
            cfg.stats.pooled = parse_bool(at, key, value);
        } else if (key == "stats.alpha") {
            cfg.stats.alpha = parse_double(at, key, value);
            if (!(cfg.stats.alpha > 0.0 && cfg.stats.alpha < 1.0))
                at.fail("stats.alpha: must lie strictly between 0 and 1");
        } else {
            at.fail("unknown key '" + key + "'");
        }
    }

    if (!seed_set) throw ConfigError(path + ": seed is required (runs never key off the clock)");

    std::set<std::string> names;
    for (const auto& d : cfg.datasets) {
        if (!names.insert(d.name).second)
            throw ConfigError(path + ": duplicate dataset name '" + d.name + "'");
        if (d.csv.empty()) throw ConfigError(path + ": dataset '" + d.name + "' has no csv");
        if (d.schema.empty())
            throw ConfigError(path + ": dataset '" + d.name + "' has no schema");
    }
    names.clear();
    for (const auto& s : cfg.sims)
        if (!names.insert(s.name).second)
            throw ConfigError(path + ": duplicate sim name '" + s.name + "'");
    names.clear();
    for (const auto& p : cfg.pipelines)
        if (!names.insert(p.name).second)
            throw ConfigError(path + ": duplicate pipeline name '" + p.name + "'");

    return cfg;
}

}  // namespace whsboost::cli

#include "cli_commands.hpp"

#include <algorithm>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "whsboost/rng.hpp"

namespace whsboost::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kResultsHeader =
    "dataset,pipeline,base_classifier,repetition,recall,precision,f_beta,auc,wallclock_ms";
constexpr const char* kPlotHeader = "dataset,pipeline,base_classifier,metric,repetition,value";
constexpr const char* kWilcoxonHeader =
    "dataset,metric,row,col,n_effective,w_plus,w_minus,z,p,exact,rank_basis,significant,status";

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);  // round-trips exactly through stod
    return buf;
}

std::string fmt_ms(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

std::string fmt_short(double v) {  // log cosmetics only; data files use fmt_double
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::string timestamp_utc() {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_file_atomic(const fs::path& final_path, const std::string& content) {
    fs::path tmp = final_path;
    tmp += ".partial";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write file: " + tmp.string());
        out << content;
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    fs::rename(tmp, final_path);
}

// Runs a writer against `<final>.partial`, then renames, so library savers
// that open the path themselves still get the atomic treatment.
template <typename Writer>
void write_via_partial(const fs::path& final_path, Writer&& writer) {
    fs::path tmp = final_path;
    tmp += ".partial";
    writer(tmp.string());
    fs::rename(tmp, final_path);
}

// Timestamped line log streamed to run.log.partial; the rename happens in
// finalize() (or the destructor, so the log also survives exceptions). A
// hard kill leaves only the .partial file, keeping the "no truncated final
// outputs" rule intact.
class RunLog {
public:
    explicit RunLog(const fs::path& dir)
        : partial_(dir / "run.log.partial"), final_(dir / "run.log"), out_(partial_) {
        if (!out_) throw std::runtime_error("cannot write log file: " + partial_.string());
    }

    void line(const std::string& msg) {
        out_ << '[' << timestamp_utc() << "] " << msg << '\n';
        out_.flush();
    }

    void finalize() {
        if (done_) return;
        done_ = true;
        out_.close();
        fs::rename(partial_, final_);
    }

    ~RunLog() {
        try {
            finalize();
        } catch (...) {
        }
    }

private:
    fs::path partial_;
    fs::path final_;
    std::ofstream out_;
    bool done_ = false;
};

std::size_t count_positive(const Dataset& data) {
    std::size_t n = 0;
    for (int label : data.labels) n += label == +1;
    return n;
}

json metric_summary_json(const MetricSummary& s) {
    return json{{"mean", s.mean}, {"stddev", s.stddev}};
}

json load_json_file(const std::string& path, const char* what) {
    std::ifstream in(path);
    if (!in) throw ConfigError(std::string(what) + ": cannot read " + path);
    try {
        return json::parse(in);
    } catch (const std::exception& e) {
        throw ConfigError(std::string(what) + ": " + path + ": " + e.what());
    }
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

int cmd_simulate(const RunConfig& config, const std::string& out_dir) {
    if (config.sims.empty())
        throw ConfigError("simulate: config defines no sim blocks (start one with sim.name)");

    fs::create_directories(out_dir);
    RunLog log(out_dir);
    log.line("simulate: " + std::to_string(config.sims.size()) + " block(s), master seed " +
             std::to_string(config.seed));

    for (std::size_t i = 0; i < config.sims.size(); ++i) {
        const SimBlock& block = config.sims[i];
        SimulationSpec spec = block.spec;
        spec.seed = derive_seed(config.seed, i);
        try {
            spec.validate();
        } catch (const std::exception& e) {
            throw ConfigError("sim '" + block.name + "': " + e.what());
        }

        SimulationOutput out;
        try {
            out = simulate_dataset(spec);
        } catch (const std::exception& e) {
            log.line("sim '" + block.name + "' failed: " + e.what());
            throw std::runtime_error("sim '" + block.name + "': " + e.what());
        }

        const fs::path dir(out_dir);
        write_via_partial(dir / (block.name + ".csv"),
                          [&](const std::string& p) { save_csv_dataset(out.data, p); });
        write_via_partial(dir / (block.name + ".schema.json"),
                          [&](const std::string& p) { save_schema(out.data.schema, p); });

        const std::size_t positives = count_positive(out.data);
        json meta;
        meta["beta"] = out.beta;
        meta["effective"] = out.effective;
        meta["master_seed"] = config.seed;
        meta["minority_fraction"] = spec.minority_fraction;
        meta["n_total"] = spec.n_total;
        meta["name"] = block.name;
        meta["negatives"] = out.data.n_rows() - positives;
        meta["p"] = spec.p;
        meta["p0"] = spec.p0;
        meta["pool"] = spec.oversample_pool;
        meta["pool_negative"] = out.pool_negative;
        meta["pool_positive"] = out.pool_positive;
        meta["positives"] = positives;
        meta["seed"] = spec.seed;
        write_file_atomic(dir / (block.name + ".meta.json"), meta.dump(2) + "\n");

        log.line("sim '" + block.name + "': wrote " + std::to_string(out.data.n_rows()) +
                 " rows (" + std::to_string(positives) + " positive), pool " +
                 std::to_string(out.pool_positive) + "+/" + std::to_string(out.pool_negative) +
                 "-");
    }

    log.line("simulate: done");
    log.finalize();
    return 0;
}

int cmd_bench(const RunConfig& config, const std::string& out_dir) {
    if (config.datasets.empty())
        throw ConfigError("bench: config defines no dataset blocks (start one with dataset.name)");
    if (config.pipelines.empty())
        throw ConfigError(
            "bench: config defines no pipeline blocks (start one with pipeline.name)");
    for (const PipelineSpec& p : config.pipelines) {
        try {
            p.config.validate();
        } catch (const std::exception& e) {
            throw ConfigError("pipeline '" + p.name + "': " + e.what());
        }
    }

    fs::create_directories(out_dir);
    RunLog log(out_dir);
    log.line("bench: " + std::to_string(config.datasets.size()) + " dataset(s) x " +
             std::to_string(config.pipelines.size()) + " pipeline(s), " +
             std::to_string(config.repetitions) + " repetition(s), seed " +
             std::to_string(config.seed));

    std::string results = std::string(kResultsHeader) + "\n";
    std::string plot = std::string(kPlotHeader) + "\n";
    json summary;
    summary["beta"] = config.beta;
    summary["repetitions"] = config.repetitions;
    summary["seed"] = config.seed;
    summary["train_fraction"] = config.train_fraction;
    summary["datasets"] = json::object();

    bool any_failed = false;

    for (std::size_t di = 0; di < config.datasets.size(); ++di) {
        const DatasetBlock& block = config.datasets[di];
        Dataset data;
        try {
            data = load_csv_dataset(block.csv, block.schema);
        } catch (const std::exception& e) {
            throw ConfigError("dataset '" + block.name + "': " + e.what());
        }
        const std::size_t positives = count_positive(data);
        log.line("dataset '" + block.name + "': " + std::to_string(data.n_rows()) + " rows, " +
                 std::to_string(positives) + " positive / " +
                 std::to_string(data.n_rows() - positives) + " negative");

        json jds;
        jds["csv"] = block.csv;
        jds["rows"] = data.n_rows();
        jds["positives"] = positives;
        jds["negatives"] = data.n_rows() - positives;
        if (!block.meta.empty())
            jds["meta"] = load_json_file(block.meta, ("dataset '" + block.name + "' meta").c_str());
        jds["pipelines"] = json::object();

        ExperimentResult res =
            run_experiment(data, config.pipelines, config.repetitions, config.train_fraction,
                           config.beta, derive_seed(config.seed, di));

        for (const PipelineColumn& col : res.columns) {
            const std::string base = classifier_kind_name(col.spec.config.base.kind);
            json jp;
            jp["base_classifier"] = base;
            jp["method"] = pipeline_method_name(col.spec.method);
            jp["failed"] = col.failed;
            jp["error"] = col.error;
            jp["repetitions_completed"] = col.rows.size();

            if (col.failed) {
                any_failed = true;
                log.line("pipeline '" + col.spec.name + "' on '" + block.name +
                         "' FAILED: " + col.error);
            } else {
                for (const RepetitionResult& row : col.rows) {
                    const std::string id = block.name + "," + col.spec.name + "," + base + ",";
                    const std::string rep = std::to_string(row.repetition);
                    results += id + rep + "," + fmt_double(row.recall) + "," +
                               fmt_double(row.precision) + "," + fmt_double(row.f_beta) + "," +
                               fmt_double(row.auc) + "," + fmt_ms(row.wallclock_ms) + "\n";
                    plot += id + "recall," + rep + "," + fmt_double(row.recall) + "\n";
                    plot += id + "precision," + rep + "," + fmt_double(row.precision) + "\n";
                    plot += id + "f_beta," + rep + "," + fmt_double(row.f_beta) + "\n";
                    plot += id + "auc," + rep + "," + fmt_double(row.auc) + "\n";
                }
                jp["metrics"] = json{{"auc", metric_summary_json(col.auc)},
                                     {"f_beta", metric_summary_json(col.f_beta)},
                                     {"precision", metric_summary_json(col.precision)},
                                     {"recall", metric_summary_json(col.recall)}};
                log.line("pipeline '" + col.spec.name + "' on '" + block.name +
                         "': f_beta mean " + fmt_short(col.f_beta.mean) + ", auc mean " +
                         fmt_short(col.auc.mean));
            }
            jds["pipelines"][col.spec.name] = jp;
        }
        summary["datasets"][block.name] = jds;
    }

    const fs::path dir(out_dir);
    write_file_atomic(dir / "results.csv", results);
    write_file_atomic(dir / "plotdata.csv", plot);
    write_file_atomic(dir / "summary.json", summary.dump(2) + "\n");

    const int code = any_failed ? 2 : 0;
    log.line("bench: done, exit code " + std::to_string(code));
    log.finalize();
    return code;
}

namespace {

int metric_column(const std::string& metric) {
    if (metric == "recall") return 4;
    if (metric == "precision") return 5;
    if (metric == "f_beta") return 6;
    return 7;  // auc — the config parser admits nothing else
}

struct PairedSeries {
    std::vector<long> repetitions;  // ascending, identical across pipelines
    std::map<std::string, std::vector<double>> values;  // pipeline -> per-rep metric
    std::vector<std::string> pipeline_order;            // first appearance
};

}  // namespace

int cmd_stats(const RunConfig& config, const std::string& out_dir) {
    if (config.stats.results.empty())
        throw ConfigError("stats: no inputs (give at least one stats.results = path)");

    fs::create_directories(out_dir);
    RunLog log(out_dir);
    log.line("stats: " + std::to_string(config.stats.results.size()) + " input file(s), metric " +
             config.stats.metric + ", alpha " + fmt_short(config.stats.alpha) +
             (config.stats.pooled ? ", pooled" : ", per-dataset"));

    const int col = metric_column(config.stats.metric);

    // dataset -> pipeline -> (repetition, value); insertion order kept on the side
    std::map<std::string, std::map<std::string, std::vector<std::pair<long, double>>>> table;
    std::vector<std::string> dataset_order;
    std::map<std::string, std::vector<std::string>> pipeline_order;
    std::vector<std::uint64_t> master_seeds;

    for (const std::string& path : config.stats.results) {
        std::ifstream in(path);
        if (!in) throw ConfigError("stats: cannot read " + path);
        std::string line;
        if (!std::getline(in, line) || line != kResultsHeader)
            throw ConfigError("stats: " + path + ": unexpected results.csv header");
        int lineno = 1;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            std::vector<std::string> cells = split_csv_line(line);
            if (cells.size() != 9)
                throw ConfigError("stats: " + path + ":" + std::to_string(lineno) +
                                  ": expected 9 cells");
            const std::string& ds = cells[0];
            const std::string& pipe = cells[1];
            long rep = 0;
            double value = 0;
            try {
                rep = std::stol(cells[3]);
                value = std::stod(cells[static_cast<std::size_t>(col)]);
            } catch (const std::exception&) {
                throw ConfigError("stats: " + path + ":" + std::to_string(lineno) +
                                  ": unparsable number");
            }
            if (!table.count(ds)) dataset_order.push_back(ds);
            auto& by_pipe = table[ds];
            if (!by_pipe.count(pipe)) pipeline_order[ds].push_back(pipe);
            by_pipe[pipe].emplace_back(rep, value);
        }

        // Pairing across files is only checkable through the master seed each
        // bench recorded beside its results; a lone input is paired with
        // itself by construction.
        fs::path sidecar = fs::path(path).parent_path() / "summary.json";
        if (fs::exists(sidecar)) {
            json s = load_json_file(sidecar.string(), "stats: summary sidecar");
            if (!s.contains("seed") || !s["seed"].is_number())
                throw ConfigError("stats: " + sidecar.string() + ": no numeric seed recorded");
            master_seeds.push_back(s["seed"].get<std::uint64_t>());
        } else if (config.stats.results.size() > 1) {
            throw ConfigError("stats: cannot verify pairing: missing summary.json beside " +
                              path);
        }
    }
    for (std::size_t i = 1; i < master_seeds.size(); ++i)
        if (master_seeds[i] != master_seeds[0])
            throw ConfigError("stats: unpaired inputs: master seeds differ (" +
                              std::to_string(master_seeds[0]) + " vs " +
                              std::to_string(master_seeds[i]) + ")");
    if (table.empty()) throw ConfigError("stats: inputs contain no data rows");

    // Align observations by repetition index within each dataset.
    std::map<std::string, PairedSeries> series;
    for (const std::string& ds : dataset_order) {
        PairedSeries s;
        s.pipeline_order = pipeline_order[ds];
        for (const std::string& pipe : s.pipeline_order) {
            auto obs = table[ds][pipe];
            std::sort(obs.begin(), obs.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            std::vector<long> reps;
            std::vector<double> vals;
            for (const auto& [rep, value] : obs) {
                if (!reps.empty() && reps.back() == rep)
                    throw ConfigError("stats: duplicate repetition " + std::to_string(rep) +
                                      " for " + ds + "/" + pipe);
                reps.push_back(rep);
                vals.push_back(value);
            }
            if (s.repetitions.empty())
                s.repetitions = reps;
            else if (s.repetitions != reps)
                throw ConfigError("stats: unpaired inputs: repetition sets differ within '" + ds +
                                  "' (pipeline '" + pipe + "')");
            s.values[pipe] = std::move(vals);
        }
        series[ds] = std::move(s);
    }

    // Assemble the comparison groups: one per dataset, or a single pooled
    // group concatenating datasets (which then must share a pipeline set).
    std::vector<std::pair<std::string, PairedSeries>> groups;
    if (config.stats.pooled) {
        PairedSeries pooled;
        pooled.pipeline_order = series[dataset_order.front()].pipeline_order;
        std::vector<std::string> canon = pooled.pipeline_order;
        std::sort(canon.begin(), canon.end());
        for (const std::string& ds : dataset_order) {
            std::vector<std::string> here = series[ds].pipeline_order;
            std::sort(here.begin(), here.end());
            if (here != canon)
                throw ConfigError("stats: pooled mode needs identical pipelines per dataset; '" +
                                  ds + "' differs");
            for (const std::string& pipe : pooled.pipeline_order) {
                auto& dst = pooled.values[pipe];
                const auto& src = series[ds].values[pipe];
                dst.insert(dst.end(), src.begin(), src.end());
            }
        }
        groups.emplace_back("(pooled)", std::move(pooled));
    } else {
        for (const std::string& ds : dataset_order) groups.emplace_back(ds, series[ds]);
    }

    std::string csv = std::string(kWilcoxonHeader) + "\n";
    std::size_t significant = 0;
    for (const auto& [group_name, s] : groups) {
        for (const std::string& row : s.pipeline_order) {
            for (const std::string& colp : s.pipeline_order) {
                const std::vector<double>& a = s.values.at(colp);  // column pipeline
                const std::vector<double>& b = s.values.at(row);   // row pipeline
                bool all_zero = true;
                for (std::size_t i = 0; i < a.size() && all_zero; ++i)
                    all_zero = a[i] == b[i];
                const std::string prefix =
                    group_name + "," + config.stats.metric + "," + row + "," + colp + ",";
                if (all_zero) {
                    csv += prefix + "0,,,,,,,no,undefined\n";
                    continue;
                }
                WilcoxonResult w = wilcoxon_signed_rank(a, b);
                const bool sig = w.p_two_sided < config.stats.alpha;
                significant += sig;
                csv += prefix + std::to_string(w.n_effective) + "," + fmt_double(w.w_plus) + "," +
                       fmt_double(w.w_minus) + "," + fmt_double(w.z) + "," +
                       fmt_double(w.p_two_sided) + "," + (w.exact ? "yes" : "no") + "," +
                       (w.rank_basis == RankBasis::negative ? "b" : "c") + "," +
                       (sig ? "yes" : "no") + ",ok\n";
            }
        }
        log.line("group '" + group_name + "': " + std::to_string(s.pipeline_order.size()) +
                 " pipeline(s), " + std::to_string(s.values.begin()->second.size()) +
                 " paired observation(s)");
    }

    write_file_atomic(fs::path(out_dir) / "wilcoxon.csv", csv);
    log.line("stats: wrote wilcoxon.csv, " + std::to_string(significant) +
             " significant cell(s) at alpha " + fmt_short(config.stats.alpha));
    log.finalize();
    return 0;
}

}  // namespace whsboost::cli

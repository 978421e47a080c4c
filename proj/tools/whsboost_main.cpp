#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cli_commands.hpp"
#include "whsboost/parallel.hpp"

namespace {

// WHSBOOST_WORKERS is the only environment hook: it caps the worker pool
// and never changes results (repetition order is fixed at assembly).
bool apply_worker_env() {
    const char* env = std::getenv("WHSBOOST_WORKERS");
    if (env == nullptr) return true;
    std::string text(env);
    int n = 0;
    try {
        std::size_t pos = 0;
        n = std::stoi(text, &pos);
        if (pos != text.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
        n = 0;
    }
    if (n < 1) {
        std::cerr << "config error: WHSBOOST_WORKERS must be a positive integer, got '" << text
                  << "'\n";
        return false;
    }
    whsboost::parallel::set_worker_count(n);
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"weighted hybrid-sampling boosting toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    auto attach = [&](const char* name, const char* description) {
        CLI::App* sub = app.add_subcommand(name, description);
        sub->add_option("--config", config_path, "run configuration file")->required();
        sub->add_option("--out", out_dir, "output directory (created if missing)")->required();
        return sub;
    };
    attach("simulate", "materialize synthetic datasets (CSV + schema + generator metadata)");
    attach("bench", "run every configured pipeline on every dataset; write result tables");
    attach("stats", "pairwise Wilcoxon signed-rank matrix over stored bench results");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;  // fold CLI11's error palette into "config error"
    }

    if (!apply_worker_env()) return 1;

    using namespace whsboost::cli;
    try {
        RunConfig config = parse_run_config(config_path);
        if (app.got_subcommand("simulate")) return cmd_simulate(config, out_dir);
        if (app.got_subcommand("bench")) return cmd_bench(config, out_dir);
        return cmd_stats(config, out_dir);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}

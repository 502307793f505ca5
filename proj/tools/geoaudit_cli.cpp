// geoaudit command-line front end. Talks to the library only through the C API.

#include <cstdio>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "geoaudit/geoaudit.h"

namespace {

struct ConfigDeleter {
    void operator()(ga_config* c) const { ga_config_free(c); }
};
using ConfigPtr = std::unique_ptr<ga_config, ConfigDeleter>;

// 1 config, 2 data, 3 numeric failure.
int exit_code(ga_status status) {
    switch (status) {
    case GA_OK: return 0;
    case GA_ERR_CONFIG:
    case GA_ERR_ARGUMENT: return 1;
    case GA_ERR_DATA:
    case GA_ERR_IO: return 2;
    case GA_ERR_NUMERIC: return 3;
    default: return 4;
    }
}

int report_failure(ga_status status) {
    std::fprintf(stderr, "geoaudit: %s\n", ga_last_error());
    return exit_code(status);
}

struct CommonOptions {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string stages;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("-c,--config", opts.config, "Experiment configuration file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--seed", opts.seed, "Override the experiment seed");
    cmd->add_option("--out", opts.out, "Override the output directory");
    cmd->add_option("--stage,--stages", opts.stages,
                    "Comma-separated stages to emit (ingest,audit,sweep,stress,baselines,all)");
}

ga_status open_config(const CommonOptions& opts, ConfigPtr& out) {
    ga_config* raw = nullptr;
    ga_status st = ga_config_load(opts.config.c_str(), &raw);
    if (st != GA_OK) return st;
    out.reset(raw);
    if (opts.seed && (st = ga_config_set_seed(raw, *opts.seed)) != GA_OK) return st;
    if (!opts.out.empty() && (st = ga_config_set_output_dir(raw, opts.out.c_str())) != GA_OK) return st;
    return GA_OK;
}

int run_ingest_check(const CommonOptions& opts) {
    ConfigPtr config;
    if (ga_status st = open_config(opts, config); st != GA_OK) return report_failure(st);
    ga_ingest_summary summary{};
    if (ga_status st = ga_ingest_check(config.get(), &summary); st != GA_OK) return report_failure(st);
    std::printf("rows read:    %zu\nrows dropped: %zu\ntrain rows:   %zu\ntest rows:    %zu\nfeatures:     %zu\n",
                summary.rows_read, summary.rows_dropped, summary.train_rows, summary.test_rows, summary.dims);
    return 0;
}

int run_stages(const CommonOptions& opts, const std::string& default_stages) {
    ConfigPtr config;
    if (ga_status st = open_config(opts, config); st != GA_OK) return report_failure(st);
    const std::string stages = opts.stages.empty() ? default_stages : opts.stages;
    char* manifest = nullptr;
    if (ga_status st = ga_pipeline_run(config.get(), stages.c_str(), &manifest); st != GA_OK)
        return report_failure(st);
    char* dir = nullptr;
    if (ga_config_output_dir(config.get(), &dir) == GA_OK) {
        std::printf("output directory: %s\n", dir);
        ga_string_free(dir);
    }
    std::fputs(manifest, stdout);
    ga_string_free(manifest);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"geoaudit: linear-probe shortcut auditing and capacity experiments"};
    app.set_version_flag("--version", std::string(ga_version()));
    app.require_subcommand(1);

    CommonOptions opts;
    struct Command {
        const char* name;
        const char* help;
        const char* stages;
    };
    const Command commands[] = {
        {"ingest-check", "Load, split and encode the data, then print row counts", "ingest"},
        {"audit", "Train the linear probe and write audit.json", "audit"},
        {"sweep", "Capacity sweep on baseline and pruned data (capacity.csv, transition.json)", "sweep"},
        {"stress", "Counterfactual stress suite on the final models (stress.json, stress.csv)", "stress"},
        {"baselines", "L1 and Just-Train-Twice baselines with cost comparison (comparison.json)", "baselines"},
        {"run", "Full pipeline", "all"},
    };
    std::string chosen;
    std::string chosen_stages;
    for (const auto& c : commands) {
        auto* sub = app.add_subcommand(c.name, c.help);
        add_common(sub, opts);
        sub->callback([&chosen, &chosen_stages, c] {
            chosen = c.name;
            chosen_stages = c.stages;
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // --help and --version exit 0; any usage problem counts as a config error
        return app.exit(e) == 0 ? 0 : 1;
    }

    if (chosen == "ingest-check") return run_ingest_check(opts);
    return run_stages(opts, chosen_stages);
}

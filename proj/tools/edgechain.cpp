// edgechain: command-line front end for the monitoring, queueing, chain
// optimisation and simulation toolkit.
//
// Exit codes: 0 success, 1 usage, 2 configuration/validation/parse, 3 runtime.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "edgechain/error.hpp"
#include "edgechain/io/commands.hpp"
#include "edgechain/io/scenario.hpp"
#include "edgechain/io/signals.hpp"
#include "edgechain/io/table.hpp"

namespace {

using edgechain::ErrorKind;
using edgechain::io::Table;

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Parse:
        case ErrorKind::Configuration:
            return 2;
        default:
            return 3;
    }
}

void report_error(std::string_view kind, int code, const std::string& message) {
    nlohmann::json line{{"error", kind}, {"exit_code", code}, {"message", message}};
    std::cerr << line.dump() << '\n';
}

void emit(const std::vector<Table>& tables, const std::string& out_dir) {
    if (out_dir.empty()) {
        edgechain::io::write_tables(std::cout, tables);
        return;
    }
    std::filesystem::create_directories(out_dir);
    for (const auto& t : tables) {
        const auto path = std::filesystem::path(out_dir) / (t.name + ".csv");
        std::ofstream f(path);
        if (!f) edgechain::fail(ErrorKind::Configuration, "cannot write " + path.string());
        f << t.to_csv();
    }
}

edgechain::io::IngestResult load_signals(const std::string& path, std::size_t window) {
    auto input = edgechain::io::ingest_signals(path, window);
    if (input.dropped_samples > 0) {
        std::cerr << "warning: dropped " << input.dropped_samples << " trailing samples (partial windows)\n";
    }
    return input;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Edge monitoring, priority queueing and multi-channel blockchain configuration toolkit"};
    app.require_subcommand(1);
    std::string out_dir;
    app.add_option("-o,--output-dir", out_dir, "Write one CSV file per table into this directory");

    std::string signals_path;
    std::size_t window = edgechain::monitor::kDefaultWindowLength;
    double zeta = edgechain::monitor::kDefaultZeta;

    auto* features = app.add_subcommand("features", "Per-window feature vectors from a signal CSV");
    features->add_option("signals", signals_path, "Signal CSV (patient,channel,session,sample_index,value)")->required();
    features->add_option("--window", window, "Samples per window")->check(CLI::Range(std::size_t{2}, std::size_t{1} << 30));

    auto* monitor = app.add_subcommand("monitor", "Deltas, change indicators, patient status and share decision");
    monitor->add_option("signals", signals_path, "Signal CSV")->required();
    monitor->add_option("--window", window, "Samples per window")->check(CLI::Range(std::size_t{2}, std::size_t{1} << 30));
    monitor->add_option("--zeta", zeta, "Change threshold in percent")->check(CLI::PositiveNumber);

    std::string scenario_ref;
    auto* queue = app.add_subcommand("queue", "Closed-form sojourn times, equal vs urgency priority");
    queue->add_option("scenario", scenario_ref, "Scenario file or built-in name")->required();

    auto* optimize = app.add_subcommand("optimize", "Greedy configuration search vs exhaustive search");
    optimize->add_option("scenario", scenario_ref, "Scenario file or built-in name")->required();

    auto* channels = app.add_subcommand("channels", "Per-channel configuration and convergence traces");
    channels->add_option("scenario", scenario_ref, "Scenario file or built-in name")->required();

    std::uint64_t seed = 0;
    auto* simulate = app.add_subcommand("simulate", "Discrete-event pipeline simulation");
    simulate->add_option("scenario", scenario_ref, "Scenario file or built-in name")->required();
    auto* seed_opt = simulate->add_option("--seed", seed, "Master seed (default: scenario sim.seed)");

    auto* show = app.add_subcommand("scenario", "Print a scenario with generators expanded");
    show->add_option("scenario", scenario_ref, "Scenario file or built-in name")->required();

    edgechain::io::CohortSpec cohort;
    std::string synth_out;
    auto* synth = app.add_subcommand("synth", "Synthetic EEG cohort as signal CSV");
    synth->add_option("--patients", cohort.patients, "Patients")->check(CLI::PositiveNumber);
    synth->add_option("--channels", cohort.channels, "EEG channels per patient")->check(CLI::PositiveNumber);
    synth->add_option("--window", cohort.window_length, "Samples per session")->check(CLI::Range(std::size_t{2}, std::size_t{1} << 30));
    synth->add_option("--inject", cohort.injected_channels, "Channels per patient with an injected change")->check(CLI::NonNegativeNumber);
    synth->add_option("--offset", cohort.offset, "Offset added to during/after of injected channels (uV)");
    synth->add_option("--sd", cohort.baseline_sd, "Baseline standard deviation (uV)")->check(CLI::PositiveNumber);
    synth->add_option("--seed", cohort.seed, "Generator seed");
    synth->add_option("--out", synth_out, "Signal CSV path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        if (rc != 0) report_error("usage", 1, e.what());
        return rc == 0 ? 0 : 1;
    }

    try {
        using namespace edgechain::io;
        if (features->parsed()) {
            emit(features_command(load_signals(signals_path, window)), out_dir);
        } else if (monitor->parsed()) {
            emit(monitor_command(load_signals(signals_path, window), zeta), out_dir);
        } else if (queue->parsed()) {
            emit(queue_command(load_scenario(scenario_ref)), out_dir);
        } else if (optimize->parsed()) {
            emit(optimize_command(load_scenario(scenario_ref)), out_dir);
        } else if (channels->parsed()) {
            emit(channels_command(load_scenario(scenario_ref)), out_dir);
        } else if (simulate->parsed()) {
            const auto sc = load_scenario(scenario_ref);
            emit(simulate_command(sc, seed_opt->count() ? seed : sc.sim.seed), out_dir);
        } else if (show->parsed()) {
            std::cout << write_scenario(load_scenario(scenario_ref));
        } else if (synth->parsed()) {
            const auto data = generate_synthetic_cohort(cohort);
            if (synth_out.empty()) {
                write_signals(std::cout, data.records());
            } else {
                std::ofstream f(synth_out);
                if (!f) edgechain::fail(ErrorKind::Configuration, "cannot write " + synth_out);
                write_signals(f, data.records());
            }
            if (!out_dir.empty()) emit(synth_table(data), out_dir);
        }
    } catch (const edgechain::Error& e) {
        const int code = exit_code_for(e.kind());
        report_error(edgechain::to_string(e.kind()), code, e.what());
        return code;
    } catch (const std::exception& e) {
        report_error("runtime", 3, e.what());
        return 3;
    }
    return 0;
}

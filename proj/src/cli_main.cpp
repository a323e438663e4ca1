#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "cyberchar/cli.hpp"
#include "cyberchar/error.hpp"

namespace cyberchar::cli {

int run(int argc, char** argv) {
    CLI::App app{"Synthetic reactor telemetry, attack injection and three-level event characterization"};
    app.require_subcommand(1);

    GlobalOptions g;
    std::uint64_t seed = 0;
    std::string out;
    std::size_t jobs = 1;
    auto* o_seed = app.add_option("--seed", seed, "Master seed (overrides the config)");
    auto* o_out = app.add_option("--out", out, "Output directory");
    auto* o_jobs = app.add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
    app.add_option("--config", g.config_path, "Config file (key = value text, or .json)");
    app.add_option("--set", g.set, "Extra key=value settings applied after the config");
    app.add_flag("-v,--verbose", g.verbose, "Progress on stderr");
    app.add_flag("--plots", g.plots, "Write SVG sensitivity plots");
    app.fallthrough();

    auto* generate = app.add_subcommand("generate", "Write the 14 use-case datasets and their manifest");

    std::string bundle_dir, model_dir, input, it_input, catalog, results_dir;
    auto* train = app.add_subcommand("train", "Train the three-level classifier on a bundle");
    train->add_option("bundle", bundle_dir, "Bundle directory")->required();

    bool oot = false;
    auto* eval = app.add_subcommand("eval", "Confusion matrices and metrics of a trained model");
    eval->add_option("model", model_dir, "Model directory")->required();
    eval->add_option("bundle", bundle_dir, "Bundle directory")->required();
    eval->add_flag("--out-of-training", oot, "Also run the channel 3/4 falsification + DoS scenario");

    bool timings = false;
    auto* sweep = app.add_subcommand("sweep", "Parameter sweep ranked by validation F1");
    sweep->add_option("bundle", bundle_dir, "Bundle directory")->required();
    sweep->add_flag("--timings", timings, "Also write per-combination fit wall-times");

    auto* classify = app.add_subcommand("classify", "Classify every window of an OT/IT CSV pair");
    classify->add_option("model", model_dir, "Model directory")->required();
    classify->add_option("input", input, "OT CSV file")->required();
    classify->add_option("--it", it_input, "IT CSV file (default: the matching _it.csv)");
    classify->add_option("--catalog", catalog, "Signal catalog JSON");

    auto* report = app.add_subcommand("report", "Summarize an eval or sweep output directory");
    report->add_option("results", results_dir, "Directory holding metrics.csv and/or sweep.csv")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    if (*o_seed) g.seed = seed;
    if (*o_out) g.out = out;
    if (*o_jobs) g.jobs = jobs;

    try {
        if (*generate) {
            cmd_generate(g);
        } else if (*train) {
            cmd_train(g, bundle_dir);
        } else if (*eval) {
            cmd_eval(g, model_dir, bundle_dir, oot);
        } else if (*sweep) {
            cmd_sweep(g, bundle_dir, timings);
        } else if (*classify) {
            std::optional<fs::path> it, cat;
            if (!it_input.empty()) it = it_input;
            if (!catalog.empty()) cat = catalog;
            if (g.out) {
                fs::create_directories(*g.out);
                std::ofstream f(fs::path(*g.out) / "classify.csv", std::ios::binary);
                require(static_cast<bool>(f), ErrorCode::IoError, "cannot write classify.csv in " + *g.out);
                cmd_classify(g, model_dir, input, it, cat, f);
            } else {
                std::ios::sync_with_stdio(false);
                cmd_classify(g, model_dir, input, it, cat, std::cout);
            }
        } else if (*report) {
            cmd_report(g, results_dir, std::cout);
        }
    } catch (const Error& e) {
        std::cerr << "error [" << error_code_name(e.code()) << "]: " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error [IoError]: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 4;
    }
    return 0;
}

}  // namespace cyberchar::cli

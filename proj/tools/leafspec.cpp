// leafspec: command-line front end for the spectra classification pipeline.
//
// Subcommands: synth, preprocess, gdd, rmd, train, evaluate, importance.
// Exit codes: 0 success, 1 runtime failure, 2 usage error. Failures print a
// single line "error: <category>: <detail>" to stderr. All file outputs are
// written atomically.

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "leafspec/core.hpp"
#include "leafspec/diagnostics.hpp"
#include "leafspec/io.hpp"
#include "leafspec/phenology.hpp"
#include "leafspec/pipeline.hpp"
#include "leafspec/preprocess.hpp"
#include "leafspec/runconfig.hpp"
#include "leafspec/synthgen.hpp"

namespace {

using namespace leafspec;

struct CommonArgs {
    std::string config_path;
    std::string in_path;
    std::string out_path;
    std::uint64_t seed = 0;
    int threads = 0;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* threads_opt = nullptr;
    CLI::Option* in_opt = nullptr;
    CLI::Option* out_opt = nullptr;
};

void add_common(CLI::App* cmd, CommonArgs& a, bool takes_input) {
    cmd->add_option("--config", a.config_path, "JSON run configuration")
        ->check(CLI::ExistingFile);
    if (takes_input) a.in_opt = cmd->add_option("--in", a.in_path, "input file");
    a.out_opt = cmd->add_option("--out", a.out_path, "output file");
    a.seed_opt = cmd->add_option("--seed", a.seed, "master seed (overrides config)");
    a.threads_opt =
        cmd->add_option("--threads", a.threads,
                        "worker threads (overrides config; 0 defers to SPECTRA_THREADS)");
}

RunConfig resolve_config(const CommonArgs& a) {
    RunConfig cfg;
    if (!a.config_path.empty()) cfg = parse_run_config(read_file(a.config_path));
    if (a.seed_opt && a.seed_opt->count() > 0) cfg.seed = a.seed;
    if (a.threads_opt && a.threads_opt->count() > 0) cfg.threads = a.threads;
    cfg.validate();
    return cfg;
}

std::string input_path(const CommonArgs& a, const RunConfig& cfg) {
    if (a.in_opt && a.in_opt->count() > 0) return a.in_path;
    require(!cfg.in_path.empty(), "usage", "--in is required (or set 'in' in the config)");
    return cfg.in_path;
}

std::string output_path(const CommonArgs& a, const RunConfig& cfg) {
    if (a.out_opt && a.out_opt->count() > 0) return a.out_path;
    require(!cfg.out_path.empty(), "usage", "--out is required (or set 'out' in the config)");
    return cfg.out_path;
}

SpectralDataset load_input_spectra(const CommonArgs& a, const RunConfig& cfg) {
    return load_spectra_csv(input_path(a, cfg));
}

SpectralDataset filter_stage(const SpectralDataset& ds, double stage) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < ds.n_samples(); ++i)
        if (ds.stage_gdd[i] == stage) rows.push_back(i);
    require(!rows.empty(), "train",
            "no samples at stage_gdd " + format_double(stage));
    return ds.subset(rows);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"leaf spectral reflectance classification pipeline"};
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic spectra CSV");
    CommonArgs synth_args;
    add_common(synth, synth_args, false);

    // preprocess
    auto* prep = app.add_subcommand(
        "preprocess", "trim detector edges, resample, smooth; optionally fit a band map");
    CommonArgs prep_args;
    add_common(prep, prep_args, true);
    std::string map_path;
    prep->add_option("--map", map_path, "write a correlation band-map JSON here");

    // gdd
    auto* gdd = app.add_subcommand(
        "gdd", "accumulate growing degree days from a temperature CSV");
    CommonArgs gdd_args;
    add_common(gdd, gdd_args, true);

    // rmd
    auto* rmd = app.add_subcommand(
        "rmd", "per-band relative mean difference between classes, as CSV");
    CommonArgs rmd_args;
    add_common(rmd, rmd_args, true);

    // train
    auto* train = app.add_subcommand("train", "train a stacked ensemble, write model JSON");
    CommonArgs train_args;
    add_common(train, train_args, true);
    std::string selection_path;
    double train_stage = 0.0;
    train->add_option("--selection", selection_path, "write the selection report JSON here");
    CLI::Option* stage_opt =
        train->add_option("--stage", train_stage, "keep only rows at this stage_gdd");

    // evaluate
    auto* eval = app.add_subcommand("evaluate", "score a trained model, write metrics JSON");
    CommonArgs eval_args;
    add_common(eval, eval_args, true);
    std::string model_path;
    std::string split_name = "test";
    eval->add_option("--model", model_path, "trained model JSON")->required();
    eval->add_option("--split", split_name, "train | validation | test | all (default test)");

    // importance
    auto* imp = app.add_subcommand(
        "importance", "permutation band importance on the validation split, as CSV");
    CommonArgs imp_args;
    add_common(imp, imp_args, true);
    std::string imp_model_path;
    int repeats = 10;
    imp->add_option("--model", imp_model_path, "trained model JSON")->required();
    imp->add_option("--repeats", repeats, "shuffles per band (default 10)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::string msg = e.what();
        for (char& c : msg)
            if (c == '\n') c = ' ';
        std::fprintf(stderr, "error: usage: %s\n", msg.c_str());
        return 2;
    }

    try {
        if (*synth) {
            const RunConfig cfg = resolve_config(synth_args);
            SynthConfig sc = cfg.synth;
            sc.seed = cfg.seed;
            save_spectra_csv(output_path(synth_args, cfg), generate(sc));
        } else if (*prep) {
            const RunConfig cfg = resolve_config(prep_args);
            const SpectralDataset raw = load_input_spectra(prep_args, cfg);
            const SpectralDataset processed = preprocess_rows(
                raw, cfg.layout, cfg.preprocess,
                static_cast<unsigned>(resolve_threads(cfg.threads)));
            save_spectra_csv(output_path(prep_args, cfg), processed);
            if (!map_path.empty()) {
                const BandGroupMap map = fit_band_groups(processed, cfg.preprocess);
                write_file_atomic(map_path, band_group_map_to_json(map).dump(2) + "\n");
            }
        } else if (*gdd) {
            const RunConfig cfg = resolve_config(gdd_args);
            const auto records = load_temperature_csv(input_path(gdd_args, cfg));
            const double total = compute_gdd(records, cfg.gdd);
            const StageTable table = StageTable::standard();
            const nlohmann::json out{{"gdd", total}, {"stage", stage_of(total, table)}};
            write_file_atomic(output_path(gdd_args, cfg), out.dump(2) + "\n");
        } else if (*rmd) {
            const RunConfig cfg = resolve_config(rmd_args);
            const SpectralDataset raw = load_input_spectra(rmd_args, cfg);
            const SpectralDataset processed = preprocess_rows(
                raw, cfg.layout, cfg.preprocess,
                static_cast<unsigned>(resolve_threads(cfg.threads)));
            const ClassMeanProfile profile = class_mean_profile(processed);
            const std::vector<double> values = relative_mean_difference(profile);
            write_file_atomic(output_path(rmd_args, cfg),
                              rmd_to_csv(processed.grid.nm, values));
        } else if (*train) {
            const RunConfig cfg = resolve_config(train_args);
            SpectralDataset raw = load_input_spectra(train_args, cfg);
            if (stage_opt->count() > 0) raw = filter_stage(raw, train_stage);
            const TrainResult result = train_pipeline(raw, cfg);
            save_model_bundle(output_path(train_args, cfg), result.bundle);
            if (!selection_path.empty())
                write_file_atomic(selection_path,
                                  selection_report_to_json(result.selection).dump(2) + "\n");
        } else if (*eval) {
            const RunConfig cfg = resolve_config(eval_args);
            const ModelBundle bundle = load_model_bundle(model_path);
            const SpectralDataset raw = load_input_spectra(eval_args, cfg);
            const MetricsReport report = evaluate_bundle(
                bundle, raw, split_name, static_cast<int>(resolve_threads(cfg.threads)));
            write_file_atomic(
                output_path(eval_args, cfg),
                metrics_to_json(report, bundle.ensemble.stage_gdd, split_name).dump(2) + "\n");
        } else if (*imp) {
            const RunConfig cfg = resolve_config(imp_args);
            const ModelBundle bundle = load_model_bundle(imp_model_path);
            const SpectralDataset raw = load_input_spectra(imp_args, cfg);
            const ImportanceProfile profile = importance_bundle(
                bundle, raw, repeats, static_cast<int>(resolve_threads(cfg.threads)));
            write_file_atomic(output_path(imp_args, cfg), importance_to_csv(profile));
        }
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: internal: %s\n", e.what());
        return 1;
    }
    return 0;
}

#include "hsps/cli/app.hpp"

#include <chrono>
#include <ctime>
#include <iostream>
#include <optional>

#include <omp.h>

#include "CLI11.hpp"

#include "hsps/cli/commands.hpp"
#include "hsps/error.hpp"

namespace hsps::cli {

namespace {

std::string utc_now()
{
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

int run(int argc, char** argv)
{
    CLI::App app{"Heralded single-photon source modelling toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    app.add_option("--config", config_path, "Run configuration (JSON with comments)")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "Output directory (overrides io.out_dir)");
    app.add_option("--seed", seed, "Seed for simulation and fit starts (overrides multiplex.seed)");
    app.add_option("--threads", threads, "OpenMP worker count")->check(CLI::PositiveNumber);

    std::string sweep = "all";
    std::string structure, data, fit_kind;
    std::optional<std::uint64_t> trials;

    auto* jsa = app.add_subcommand("jsa", "Joint spectral intensity, pump envelope, |Phi| map, diagnostics");
    auto* her = app.add_subcommand("heralding", "Heralding efficiency sweeps");
    her->add_option("--sweep", sweep, "wavelength, focal or all")
        ->check(CLI::IsMember({"wavelength", "focal", "all"}));
    auto* pur = app.add_subcommand("purity", "Schmidt purity and filter sweep");
    auto* pol = app.add_subcommand("poling", "Custom poling design");
    pol->require_subcommand(1);
    auto* pol_opt = pol->add_subcommand("optimize", "Optimize domain orientations");
    auto* pol_eval = pol->add_subcommand("evaluate", "Evaluate a structure file against the periodic crystal");
    pol_eval->add_option("--structure", structure, "Structure file (overrides poling.structure_file)");
    auto* pol_land = pol->add_subcommand("landscape", "Purity over pump width and crystal length");
    auto* mux = app.add_subcommand("multiplex", "Time-multiplexing model, simulation and fits");
    mux->require_subcommand(1);
    auto* mux_model = mux->add_subcommand("model", "Probability versus number of bins");
    auto* mux_sim = mux->add_subcommand("simulate", "Monte Carlo pulse train");
    mux_sim->add_option("--trials", trials, "Trials (overrides multiplex.trials)");
    auto* mux_fit = mux->add_subcommand("fit", "Fit a CSV data file");
    mux_fit->add_option("--data", data, "Data file (overrides multiplex.fit.data_file)");
    mux_fit->add_option("--kind", fit_kind, "multiplexed or loop_loss")
        ->check(CLI::IsMember({"multiplexed", "loop_loss"}));
    auto* cfg_cmd = app.add_subcommand("config", "Print the resolved configuration");

    for (auto* s : {jsa, her, pur, pol, pol_opt, pol_eval, pol_land, mux, mux_model, mux_sim, mux_fit, cfg_cmd}) {
        s->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        auto cfg = config_path.empty() ? config::RunConfig::defaults() : config::load(config_path);
        if (!out_dir.empty()) cfg.io.out_dir = out_dir;
        if (seed) cfg.multiplex.seed = *seed;
        if (trials) cfg.multiplex.trials = *trials;
        if (!structure.empty()) cfg.poling.structure_file = structure;
        if (!data.empty()) cfg.multiplex.fit.data_file = data;
        if (!fit_kind.empty()) cfg.multiplex.fit.kind = fit_kind;
        cfg.validate();
        if (threads) omp_set_num_threads(*threads);

        if (*cfg_cmd) {
            std::cout << config::serialize(cfg);
            return 0;
        }

        OutputSink sink(cfg.io.out_dir);
        ManifestInfo info;
        info.threads = omp_get_max_threads();
        info.started_utc = utc_now();

        if (*jsa) {
            info.command = "jsa";
            cmd_jsa(cfg, sink);
        } else if (*her) {
            info.command = "heralding";
            cmd_heralding(cfg,
                          sweep == "wavelength" ? HeraldingSweepKind::wavelength
                          : sweep == "focal"    ? HeraldingSweepKind::focal
                                                : HeraldingSweepKind::all,
                          sink);
        } else if (*pur) {
            info.command = "purity";
            cmd_purity(cfg, sink);
        } else if (*pol) {
            const auto action = *pol_opt ? PolingAction::optimize
                                : *pol_eval ? PolingAction::evaluate
                                            : PolingAction::landscape;
            info.command = *pol_opt ? "poling_optimize" : *pol_eval ? "poling_evaluate" : "poling_landscape";
            cmd_poling(cfg, action, sink);
        } else {
            const auto action = *mux_model ? MultiplexAction::model
                                : *mux_sim ? MultiplexAction::simulate
                                           : MultiplexAction::fit;
            info.command = *mux_model ? "multiplex_model" : *mux_sim ? "multiplex_simulate" : "multiplex_fit";
            cmd_multiplex(cfg, action, sink);
        }

        info.finished_utc = utc_now();
        const auto records = sink.records();
        sink.write(info.command + ".manifest.json", manifest_json(cfg, info, records));
        for (const auto& r : records) std::cout << (sink.dir() / r.file).string() << "\n";
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 4;
    } catch (const FitError& e) {
        std::cerr << "fit error: " << e.what() << "\n";
        return 4;
    } catch (const Error& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace hsps::cli

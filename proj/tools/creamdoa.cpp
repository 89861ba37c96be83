#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "cream/experiment.hpp"

namespace {

void write_output(const cream::ResultTable& table, const std::string& out_path) {
    const std::string csv = cream::to_csv(table);
    if (out_path.empty()) {
        std::cout << csv;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file " + out_path);
    out << csv;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Wideband ULA radar echo synthesis and DoA estimation with "
                 "beam-split and mutual-coupling calibration"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    std::optional<uint64_t> seed_override;
    int threads = 0;

    auto add_common = [&](CLI::App* cmd, bool with_out = true) {
        cmd->add_option("--config", config_path, "experiment config (JSON)")->required();
        if (with_out) cmd->add_option("--out", out_path, "output CSV path (default: stdout)");
        cmd->add_option("--seed", seed_override, "override sweep.seed");
        cmd->add_option("--threads", threads, "worker threads, 0 = all cores");
    };

    CLI::App* sweep = app.add_subcommand("sweep", "Monte-Carlo RMSE vs SNR sweep");
    bool timing = false;
    add_common(sweep);
    sweep->add_flag("--timing", timing, "append a (non-reproducible) wall_ms column");

    CLI::App* spectra = app.add_subcommand("spectra", "per-subcarrier MUSIC spectra dump");
    std::optional<double> snr_db;
    add_common(spectra);
    spectra->add_option("--snr", snr_db, "SNR in dB (omit for noiseless)");

    CLI::App* gain = app.add_subcommand("gain", "array-gain slice over spatial angle");
    double gain_angle = 0.0;
    int gain_m = 1;
    add_common(gain);
    gain->add_option("--angle-deg", gain_angle, "physical direction in degrees")->required();
    gain->add_option("--m", gain_m, "subcarrier index, 1-based")->required();

    CLI::App* validate = app.add_subcommand("validate", "schema-check a config and exit");
    add_common(validate, false);

    CLI11_PARSE(app, argc, argv);

    cream::ExperimentConfig cfg;
    try {
        cfg = cream::load_config(config_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    if (seed_override) cfg.sweep.seed = *seed_override;

    try {
        if (validate->parsed()) {
            std::cout << "ok\n";
        } else if (sweep->parsed()) {
            write_output(cream::run_sweep(cfg, threads, timing), out_path);
        } else if (spectra->parsed()) {
            write_output(cream::run_spectra(cfg, snr_db, threads), out_path);
        } else if (gain->parsed()) {
            write_output(cream::run_gain(cfg, gain_angle, gain_m), out_path);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}

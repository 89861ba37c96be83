#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cream/estimator.hpp"

namespace cream {

inline constexpr const char* kToolVersion = "creamdoa 1.0.0";

struct CouplingSpec {
    enum class Mode { identity, random_phase, explicit_phase };
    Mode mode = Mode::identity;
    int band_size = 1;
    std::vector<std::vector<double>> sector_magnitudes; // profiles, each band_size-1 long
    std::vector<std::vector<double>> sector_phases_deg; // explicit mode, same shape
};

struct SceneSpec {
    int k_targets = 1;
    bool random_angles = false;
    std::vector<double> angles_deg;      // fixed mode
    double angle_min_deg = -90.0;        // random mode
    double angle_max_deg = 90.0;
    double min_separation_deg = 0.0;
    bool random_reflection = true;
    std::vector<cplx> reflections;       // fixed mode
    CouplingSpec coupling;
};

struct EstimatorSpec {
    std::vector<SpectrumMode> modes{SpectrumMode::plain, SpectrumMode::bsc, SpectrumMode::mcc,
                                    SpectrumMode::cream};
    double grid_step_deg = 0.02;
    double epsilon = 1e-4;
    int max_iter = 50;
    int sectors = 6;
};

struct SweepSpec {
    std::vector<double> snr_db{0.0, 10.0, 20.0};
    int trials = 50;
    uint64_t seed = 1;
};

struct ExperimentConfig {
    ArrayConfig array;
    SceneSpec scene;
    int snapshots = 100;
    bool normalized_power = true;
    double radar_power = 0.0; // resolved: normalized -> M N^2
    EstimatorSpec estimator;
    SweepSpec sweep;
    uint64_t config_hash = 0;
};

/// Parses and validates the JSON experiment schema; unknown keys and
/// type/range violations throw with the offending field path.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

/// Scene + acquisition drawn from one deterministic stream. The draw order
/// is fixed: angles, reflections, coupling phases, combiner, then probing
/// and noise inside the synthesizer.
SnapshotSet synth_trial(const ExperimentConfig& cfg, std::optional<double> snr_db,
                        uint64_t stream_seed);

/// Plain string table with verbatim '#' comment lines; CSV round-trips
/// byte-identically.
struct ResultTable {
    std::vector<std::string> comments;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

std::string to_csv(const ResultTable& table);
ResultTable parse_csv(const std::string& text);

std::string format_double(double v);

/// Monte-Carlo RMSE sweep over (mode, SNR) cells. Deterministic given the
/// config and seed; per-trial wall times are only emitted when `timing` is
/// set since they are inherently non-reproducible.
ResultTable run_sweep(const ExperimentConfig& cfg, int threads = 1, bool timing = false);

/// Per-subcarrier spectra for PLAIN and CREAM plus the summed CREAM
/// spectrum (emitted as subcarrier 0) for a single trial. Omitting snr_db
/// synthesizes noiseless data.
ResultTable run_spectra(const ExperimentConfig& cfg, std::optional<double> snr_db,
                        int threads = 1);

/// Array-gain slice over a spatial grid for one physical direction and
/// subcarrier (1-based); includes the analytic argmax as a comment.
ResultTable run_gain(const ExperimentConfig& cfg, double angle_deg, int subcarrier);

} // namespace cream

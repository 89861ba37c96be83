#include "cream/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "cream/parallel.hpp"
#include "cream/rng.hpp"

namespace cream {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw std::invalid_argument("config: " + path + ": " + msg);
}

std::string join_path(const std::string& base, const std::string& key) {
    return base.empty() ? key : base + "." + key;
}

void check_keys(const json& j, const std::string& path,
                std::initializer_list<const char*> allowed) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) { known = true; break; }
        if (!known) fail(join_path(path, it.key()), "unknown key");
    }
}

const json* find(const json& j, const char* key) {
    auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
}

const json& require(const json& j, const std::string& path, const char* key) {
    const json* p = find(j, key);
    if (!p) fail(join_path(path, key), "required key missing");
    return *p;
}

double as_number(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

int as_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) fail(path, "expected an integer");
    return j.get<int>();
}

std::vector<double> as_number_list(const json& j, const std::string& path) {
    if (!j.is_array()) fail(path, "expected an array of numbers");
    std::vector<double> out;
    for (size_t i = 0; i < j.size(); ++i)
        out.push_back(as_number(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

CouplingSpec parse_coupling(const json& j, const std::string& path, int n_antennas) {
    check_keys(j, path, {"band_size", "mode", "sector_magnitudes", "sector_phases_deg"});
    CouplingSpec spec;
    spec.band_size = as_int(require(j, path, "band_size"), join_path(path, "band_size"));
    if (spec.band_size < 1 || spec.band_size > n_antennas)
        fail(join_path(path, "band_size"), "must be in [1, n_antennas]");

    const json& mode = require(j, path, "mode");
    if (!mode.is_string()) fail(join_path(path, "mode"), "expected a string");
    const std::string name = mode.get<std::string>();
    if (name == "identity")
        spec.mode = CouplingSpec::Mode::identity;
    else if (name == "random-phase")
        spec.mode = CouplingSpec::Mode::random_phase;
    else if (name == "explicit")
        spec.mode = CouplingSpec::Mode::explicit_phase;
    else
        fail(join_path(path, "mode"), "expected identity | random-phase | explicit");

    if (spec.mode == CouplingSpec::Mode::identity) {
        if (find(j, "sector_magnitudes") || find(j, "sector_phases_deg"))
            fail(path, "identity coupling takes no magnitude/phase vectors");
        return spec;
    }

    const json& mags = require(j, path, "sector_magnitudes");
    const std::string mags_path = join_path(path, "sector_magnitudes");
    if (!mags.is_array() || mags.empty()) fail(mags_path, "expected a non-empty array of arrays");
    for (size_t i = 0; i < mags.size(); ++i) {
        const std::string p = mags_path + "[" + std::to_string(i) + "]";
        std::vector<double> v = as_number_list(mags[i], p);
        if (static_cast<int>(v.size()) != spec.band_size - 1)
            fail(p, "expected band_size-1 = " + std::to_string(spec.band_size - 1) +
                        " magnitudes (the leading 1 is implicit)");
        for (double m : v)
            if (!(m >= 0.0)) fail(p, "magnitudes must be non-negative");
        spec.sector_magnitudes.push_back(std::move(v));
    }

    if (spec.mode == CouplingSpec::Mode::explicit_phase) {
        const json& ph = require(j, path, "sector_phases_deg");
        const std::string ph_path = join_path(path, "sector_phases_deg");
        if (!ph.is_array() || ph.size() != mags.size())
            fail(ph_path, "expected one phase vector per magnitude vector");
        for (size_t i = 0; i < ph.size(); ++i) {
            const std::string p = ph_path + "[" + std::to_string(i) + "]";
            std::vector<double> v = as_number_list(ph[i], p);
            if (static_cast<int>(v.size()) != spec.band_size - 1)
                fail(p, "expected band_size-1 phases");
            spec.sector_phases_deg.push_back(std::move(v));
        }
    } else if (find(j, "sector_phases_deg")) {
        fail(join_path(path, "sector_phases_deg"), "only valid with explicit coupling");
    }
    return spec;
}

SceneSpec parse_scene(const json& j, const std::string& path, int n_antennas) {
    check_keys(j, path,
               {"k_targets", "angles_deg", "angle_range_deg", "min_separation_deg", "reflection",
                "coupling"});
    SceneSpec scene;
    scene.k_targets = as_int(require(j, path, "k_targets"), join_path(path, "k_targets"));
    if (scene.k_targets < 1) fail(join_path(path, "k_targets"), "must be >= 1");
    if (scene.k_targets >= n_antennas)
        fail(join_path(path, "k_targets"), "must be below n_antennas");

    const json& angles = require(j, path, "angles_deg");
    const std::string angles_path = join_path(path, "angles_deg");
    if (angles.is_string()) {
        if (angles.get<std::string>() != "random")
            fail(angles_path, "expected an array of degrees or \"random\"");
        scene.random_angles = true;
    } else {
        scene.angles_deg = as_number_list(angles, angles_path);
        if (static_cast<int>(scene.angles_deg.size()) != scene.k_targets)
            fail(angles_path, "expected k_targets = " + std::to_string(scene.k_targets) + " angles");
        for (double a : scene.angles_deg)
            if (!(a >= -90.0 && a <= 90.0)) fail(angles_path, "angles must lie in [-90, 90]");
    }

    if (const json* range = find(j, "angle_range_deg")) {
        if (!scene.random_angles)
            fail(join_path(path, "angle_range_deg"), "only valid with random angles");
        std::vector<double> v = as_number_list(*range, join_path(path, "angle_range_deg"));
        if (v.size() != 2 || !(v[0] < v[1]) || v[0] < -90.0 || v[1] > 90.0)
            fail(join_path(path, "angle_range_deg"), "expected [lo, hi] within [-90, 90]");
        scene.angle_min_deg = v[0];
        scene.angle_max_deg = v[1];
    }
    if (const json* sep = find(j, "min_separation_deg")) {
        if (!scene.random_angles)
            fail(join_path(path, "min_separation_deg"), "only valid with random angles");
        scene.min_separation_deg = as_number(*sep, join_path(path, "min_separation_deg"));
        if (scene.min_separation_deg < 0.0)
            fail(join_path(path, "min_separation_deg"), "must be non-negative");
        if ((scene.k_targets - 1) * scene.min_separation_deg >
            scene.angle_max_deg - scene.angle_min_deg)
            fail(join_path(path, "min_separation_deg"), "infeasible for the angle range");
    }

    if (const json* refl = find(j, "reflection")) {
        const std::string refl_path = join_path(path, "reflection");
        if (refl->is_string()) {
            if (refl->get<std::string>() != "unit-random-phase")
                fail(refl_path, "expected \"unit-random-phase\" or an array");
            scene.random_reflection = true;
        } else if (refl->is_array()) {
            if (static_cast<int>(refl->size()) != scene.k_targets)
                fail(refl_path, "expected one entry per target");
            scene.random_reflection = false;
            for (size_t i = 0; i < refl->size(); ++i) {
                const std::string p = refl_path + "[" + std::to_string(i) + "]";
                const json& e = (*refl)[i];
                if (!e.is_object()) fail(p, "expected {magnitude, phase_deg}");
                check_keys(e, p, {"magnitude", "phase_deg"});
                const double mag = as_number(require(e, p, "magnitude"), join_path(p, "magnitude"));
                const double ph = as_number(require(e, p, "phase_deg"), join_path(p, "phase_deg"));
                if (!(mag > 0.0)) fail(join_path(p, "magnitude"), "must be positive");
                scene.reflections.push_back(std::polar(mag, ph * M_PI / 180.0));
            }
        } else {
            fail(refl_path, "expected \"unit-random-phase\" or an array");
        }
    }

    if (const json* coup = find(j, "coupling"))
        scene.coupling = parse_coupling(*coup, join_path(path, "coupling"), n_antennas);
    return scene;
}

} // namespace

ExperimentConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) fail("", "top level must be an object");
    check_keys(j, "", {"array", "scene", "acquisition", "estimator", "sweep"});

    ExperimentConfig cfg;

    const json& arr = require(j, "", "array");
    check_keys(arr, "array", {"n_antennas", "n_rf", "carrier_ghz", "bandwidth_ghz", "n_subcarriers"});
    const int n = as_int(require(arr, "array", "n_antennas"), "array.n_antennas");
    const int n_rf = as_int(require(arr, "array", "n_rf"), "array.n_rf");
    const double fc = as_number(require(arr, "array", "carrier_ghz"), "array.carrier_ghz");
    const double bw = as_number(require(arr, "array", "bandwidth_ghz"), "array.bandwidth_ghz");
    const int m = as_int(require(arr, "array", "n_subcarriers"), "array.n_subcarriers");
    try {
        cfg.array = make_array_config(n, n_rf, fc * 1e9, bw * 1e9, m);
    } catch (const std::invalid_argument& e) {
        fail("array", e.what());
    }

    cfg.scene = parse_scene(require(j, "", "scene"), "scene", n);

    if (const json* acq = find(j, "acquisition")) {
        check_keys(*acq, "acquisition", {"snapshots", "power"});
        if (const json* t = find(*acq, "snapshots")) {
            cfg.snapshots = as_int(*t, "acquisition.snapshots");
            if (cfg.snapshots < 1) fail("acquisition.snapshots", "must be >= 1");
        }
        if (const json* p = find(*acq, "power")) {
            if (p->is_string()) {
                if (p->get<std::string>() != "normalized")
                    fail("acquisition.power", "expected \"normalized\" or a positive number");
            } else {
                cfg.normalized_power = false;
                cfg.radar_power = as_number(*p, "acquisition.power");
                if (!(cfg.radar_power > 0.0)) fail("acquisition.power", "must be positive");
            }
        }
    }
    if (cfg.normalized_power) cfg.radar_power = normalized_radar_power(cfg.array);

    if (const json* est = find(j, "estimator")) {
        check_keys(*est, "estimator", {"modes", "grid_step_deg", "epsilon", "max_iter", "sectors"});
        if (const json* modes = find(*est, "modes")) {
            if (!modes->is_array() || modes->empty())
                fail("estimator.modes", "expected a non-empty array of mode names");
            cfg.estimator.modes.clear();
            for (size_t i = 0; i < modes->size(); ++i) {
                const std::string p = "estimator.modes[" + std::to_string(i) + "]";
                if (!(*modes)[i].is_string()) fail(p, "expected a string");
                SpectrumMode mode;
                try {
                    mode = spectrum_mode_from((*modes)[i].get<std::string>());
                } catch (const std::invalid_argument& e) {
                    fail(p, e.what());
                }
                if (std::find(cfg.estimator.modes.begin(), cfg.estimator.modes.end(), mode) !=
                    cfg.estimator.modes.end())
                    fail(p, "duplicate mode");
                cfg.estimator.modes.push_back(mode);
            }
        }
        if (const json* g = find(*est, "grid_step_deg")) {
            cfg.estimator.grid_step_deg = as_number(*g, "estimator.grid_step_deg");
            if (!(cfg.estimator.grid_step_deg > 0.0)) fail("estimator.grid_step_deg", "must be positive");
        }
        if (const json* e = find(*est, "epsilon")) {
            cfg.estimator.epsilon = as_number(*e, "estimator.epsilon");
            if (!(cfg.estimator.epsilon > 0.0)) fail("estimator.epsilon", "must be positive");
        }
        if (const json* it = find(*est, "max_iter")) {
            cfg.estimator.max_iter = as_int(*it, "estimator.max_iter");
            if (cfg.estimator.max_iter < 1) fail("estimator.max_iter", "must be >= 1");
        }
        if (const json* s = find(*est, "sectors")) {
            cfg.estimator.sectors = as_int(*s, "estimator.sectors");
            if (cfg.estimator.sectors < 1) fail("estimator.sectors", "must be >= 1");
        }
    }

    if (const json* sw = find(j, "sweep")) {
        check_keys(*sw, "sweep", {"snr_db", "trials", "seed"});
        if (const json* snr = find(*sw, "snr_db")) {
            cfg.sweep.snr_db = as_number_list(*snr, "sweep.snr_db");
            if (cfg.sweep.snr_db.empty()) fail("sweep.snr_db", "must be non-empty");
        }
        if (const json* t = find(*sw, "trials")) {
            cfg.sweep.trials = as_int(*t, "sweep.trials");
            if (cfg.sweep.trials < 1) fail("sweep.trials", "must be >= 1");
        }
        if (const json* s = find(*sw, "seed")) {
            if (!s->is_number_integer() || s->get<int64_t>() < 0)
                fail("sweep.seed", "expected a non-negative integer");
            cfg.sweep.seed = s->get<uint64_t>();
        }
    }

    cfg.config_hash = fnv1a(j.dump());
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

namespace {

std::vector<double> draw_angles(const SceneSpec& scene, Rng& rng) {
    if (!scene.random_angles) {
        std::vector<double> out;
        for (double a : scene.angles_deg) out.push_back(a * M_PI / 180.0);
        std::sort(out.begin(), out.end());
        return out;
    }
    const double lo = scene.angle_min_deg, hi = scene.angle_max_deg;
    for (int attempt = 0; attempt < 10000; ++attempt) {
        std::vector<double> deg(scene.k_targets);
        for (double& a : deg) a = rng.uniform(lo, hi);
        std::sort(deg.begin(), deg.end());
        bool ok = true;
        for (int i = 1; i < scene.k_targets; ++i)
            if (deg[i] - deg[i - 1] < scene.min_separation_deg) { ok = false; break; }
        if (!ok) continue;
        std::vector<double> out;
        for (double a : deg) out.push_back(a * M_PI / 180.0);
        return out;
    }
    throw std::runtime_error("scene: failed to draw angles with the requested separation");
}

CouplingModel draw_coupling(const CouplingSpec& spec, int sectors, int subcarriers, Rng& rng) {
    if (spec.mode == CouplingSpec::Mode::identity)
        return CouplingModel::identity(std::max(1, spec.band_size), sectors, subcarriers);
    CouplingModel model;
    model.band_size = spec.band_size;
    model.coeffs.assign(sectors, std::vector<std::vector<cplx>>(
                                     subcarriers, std::vector<cplx>(spec.band_size)));
    const int profiles = static_cast<int>(spec.sector_magnitudes.size());
    for (int s = 0; s < sectors; ++s) {
        const std::vector<double>& mags = spec.sector_magnitudes[s % profiles];
        for (int m = 0; m < subcarriers; ++m) {
            std::vector<cplx>& c = model.coeffs[s][m];
            c[0] = 1.0;
            for (int l = 1; l < spec.band_size; ++l) {
                const double phase = spec.mode == CouplingSpec::Mode::random_phase
                                         ? rng.uniform(-M_PI, M_PI)
                                         : spec.sector_phases_deg[s % profiles][l - 1] * M_PI / 180.0;
                c[l] = std::polar(mags[l - 1], phase);
            }
        }
    }
    return model;
}

} // namespace

SnapshotSet synth_trial(const ExperimentConfig& cfg, std::optional<double> snr_db,
                        uint64_t stream_seed) {
    Rng rng(stream_seed);

    Scene scene;
    scene.seed = stream_seed;
    scene.sectors = SectorPlan{cfg.estimator.sectors};
    const std::vector<double> angles = draw_angles(cfg.scene, rng);
    for (int k = 0; k < cfg.scene.k_targets; ++k) {
        Target t;
        t.dir = Direction::from_physical(angles[k]);
        t.reflection = cfg.scene.random_reflection ? std::polar(1.0, rng.uniform(-M_PI, M_PI))
                                                   : cfg.scene.reflections[k];
        scene.targets.push_back(t);
    }
    scene.coupling =
        draw_coupling(cfg.scene.coupling, cfg.estimator.sectors, cfg.array.n_subcarriers, rng);

    AcquisitionPlan plan;
    plan.snapshots = cfg.snapshots;
    plan.radar_power = cfg.radar_power;
    plan.noise_var = snr_db ? snr_to_noise(*snr_db, cfg.array, cfg.radar_power) : 0.0;
    gen_combiner(cfg.array, plan, rng);

    return synth_snapshots(cfg.array, scene, plan, rng);
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string to_csv(const ResultTable& table) {
    std::string out;
    for (const std::string& c : table.comments) {
        out += c;
        out += '\n';
    }
    for (size_t i = 0; i < table.header.size(); ++i) {
        if (i) out += ',';
        out += table.header[i];
    }
    out += '\n';
    for (const auto& row : table.rows) {
        for (size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += row[i];
        }
        out += '\n';
    }
    return out;
}

ResultTable parse_csv(const std::string& text) {
    ResultTable table;
    std::istringstream in(text);
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            table.comments.push_back(line);
            continue;
        }
        std::vector<std::string> cells;
        size_t start = 0;
        while (true) {
            const size_t pos = line.find(',', start);
            if (pos == std::string::npos) {
                cells.push_back(line.substr(start));
                break;
            }
            cells.push_back(line.substr(start, pos - start));
            start = pos + 1;
        }
        if (!have_header) {
            table.header = std::move(cells);
            have_header = true;
        } else {
            table.rows.push_back(std::move(cells));
        }
    }
    return table;
}

namespace {

std::string hash_hex(uint64_t h) {
    char buf[17];
    snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::vector<std::string> standard_comments(const ExperimentConfig& cfg, const char* kind) {
    return {std::string("# ") + kToolVersion + " " + kind,
            "# config_hash: " + hash_hex(cfg.config_hash),
            "# seed: " + std::to_string(cfg.sweep.seed)};
}

struct TrialOutcome {
    bool ok = false;
    std::vector<double> estimates;
    std::vector<double> truths;
    double wall_ms = 0.0;
};

TrialOutcome run_one_trial(const ExperimentConfig& cfg, SpectrumMode mode, double snr_db,
                           int trial) {
    const uint64_t stream = mix_seed({cfg.sweep.seed, fnv1a(to_string(mode)),
                                      static_cast<uint64_t>(std::llround(snr_db * 1024.0)),
                                      static_cast<uint64_t>(trial)});
    TrialOutcome out;
    const auto start = std::chrono::steady_clock::now();
    try {
        const SnapshotSet snapshots = synth_trial(cfg, snr_db, stream);
        for (const Target& t : snapshots.scene.targets) out.truths.push_back(t.dir.physical_rad);

        if (mode == SpectrumMode::plain || mode == SpectrumMode::bsc) {
            out.estimates = estimate_music(snapshots, cfg.array, cfg.scene.k_targets, mode,
                                           cfg.estimator.grid_step_deg);
        } else {
            EstimatorOptions opts;
            opts.grid_step_deg = cfg.estimator.grid_step_deg;
            opts.epsilon = cfg.estimator.epsilon;
            opts.max_iter = cfg.estimator.max_iter;
            opts.sectors = cfg.estimator.sectors;
            opts.band_size = std::max(1, cfg.scene.coupling.band_size);
            opts.compensate_beam_split = (mode == SpectrumMode::cream);
            out.estimates = cream_music(snapshots, cfg.array, cfg.scene.k_targets, opts).doa_rad;
        }
        out.ok = true;
    } catch (const std::exception&) {
        out.ok = false;
    }
    out.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - start).count();
    return out;
}

} // namespace

ResultTable run_sweep(const ExperimentConfig& cfg, int threads, bool timing) {
    const auto& modes = cfg.estimator.modes;
    const auto& snrs = cfg.sweep.snr_db;
    const int trials = cfg.sweep.trials;
    const int cells = static_cast<int>(modes.size() * snrs.size());
    std::vector<TrialOutcome> outcomes(static_cast<size_t>(cells) * trials);

    parallel_for(cells * trials, threads, [&](int idx) {
        const int cell = idx / trials;
        const int trial = idx % trials;
        const SpectrumMode mode = modes[cell / snrs.size()];
        const double snr = snrs[cell % snrs.size()];
        outcomes[idx] = run_one_trial(cfg, mode, snr, trial);
    });

    ResultTable table;
    table.comments = standard_comments(cfg, "sweep");
    table.header = {"mode", "snr_db", "rmse_deg", "trials", "errors"};
    if (timing) table.header.push_back("wall_ms");

    for (size_t mi = 0; mi < modes.size(); ++mi)
        for (size_t si = 0; si < snrs.size(); ++si) {
            const size_t cell = mi * snrs.size() + si;
            std::vector<std::vector<double>> est, tru;
            int errors = 0;
            double wall = 0.0;
            for (int t = 0; t < trials; ++t) {
                const TrialOutcome& o = outcomes[cell * trials + t];
                wall += o.wall_ms;
                if (!o.ok) {
                    ++errors;
                    continue;
                }
                est.push_back(o.estimates);
                tru.push_back(o.truths);
            }
            const double rmse = est.empty() ? std::nan("") : rmse_deg(est, tru);
            std::vector<std::string> row = {to_string(modes[mi]), format_double(snrs[si]),
                                            format_double(rmse), std::to_string(est.size()),
                                            std::to_string(errors)};
            if (timing) row.push_back(format_double(std::round(wall)));
            table.rows.push_back(std::move(row));
        }
    return table;
}

ResultTable run_spectra(const ExperimentConfig& cfg, std::optional<double> snr_db, int threads) {
    const uint64_t stream = mix_seed({cfg.sweep.seed, fnv1a("spectra"),
                                      snr_db ? static_cast<uint64_t>(std::llround(*snr_db * 1024.0))
                                             : 0xffffffffULL});
    const SnapshotSet snapshots = synth_trial(cfg, snr_db, stream);
    const int k = cfg.scene.k_targets;
    const double step = cfg.estimator.grid_step_deg;

    const std::vector<SubspaceDecomposition> decomps = decompose_all(snapshots, k);
    const SpectrumGrid plain = compute_spectrum(cfg.array, snapshots.plan, decomps,
                                                SpectrumMode::plain, nullptr, SectorPlan{1}, step,
                                                true, threads);

    EstimatorOptions opts;
    opts.grid_step_deg = step;
    opts.epsilon = cfg.estimator.epsilon;
    opts.max_iter = cfg.estimator.max_iter;
    opts.sectors = cfg.estimator.sectors;
    opts.band_size = std::max(1, cfg.scene.coupling.band_size);
    opts.threads = threads;
    const CalibrationResult calib = cream_music(snapshots, cfg.array, k, opts);
    const SpectrumGrid cream = compute_spectrum(cfg.array, snapshots.plan, decomps,
                                                SpectrumMode::cream, &calib.sector_coupling,
                                                calib.sectors, step, true, threads);

    ResultTable table;
    table.comments = standard_comments(cfg, "spectra");
    table.comments.push_back(std::string("# snr_db: ") +
                             (snr_db ? format_double(*snr_db) : "noiseless"));
    table.header = {"mode", "m", "theta_deg", "value"};

    auto emit = [&](const char* mode, int m, const std::vector<double>& theta,
                    const std::vector<double>& values) {
        for (size_t i = 0; i < theta.size(); ++i)
            table.rows.push_back({mode, std::to_string(m),
                                  format_double(theta[i] * 180.0 / M_PI),
                                  format_double(values[i])});
    };
    for (int m = 0; m < cfg.array.n_subcarriers; ++m)
        emit("PLAIN", m + 1, plain.theta_rad, plain.per_subcarrier[m]);
    for (int m = 0; m < cfg.array.n_subcarriers; ++m)
        emit("CREAM", m + 1, cream.theta_rad, cream.per_subcarrier[m]);
    emit("CREAM", 0, cream.theta_rad, cream.summed);
    return table;
}

ResultTable run_gain(const ExperimentConfig& cfg, double angle_deg, int subcarrier) {
    if (!(angle_deg >= -90.0 && angle_deg <= 90.0))
        throw std::invalid_argument("gain: angle must lie in [-90, 90] degrees");
    if (subcarrier < 1 || subcarrier > cfg.array.n_subcarriers)
        throw std::invalid_argument("gain: subcarrier must lie in [1, " +
                                    std::to_string(cfg.array.n_subcarriers) + "]");
    const int m = subcarrier - 1;
    const double theta = std::sin(angle_deg * M_PI / 180.0);
    const double argmax = cfg.array.eta[m] * theta;

    ResultTable table;
    table.comments = standard_comments(cfg, "gain");
    table.comments.push_back("# analytic_argmax_spatial: " + format_double(argmax));
    table.header = {"m", "theta_bar", "gain"};
    constexpr double kStep = 1e-4;
    const int points = static_cast<int>(std::lround(2.0 / kStep)) + 1;
    for (int i = 0; i < points; ++i) {
        const double bar = std::min(-1.0 + i * kStep, 1.0);
        table.rows.push_back({std::to_string(subcarrier), format_double(bar),
                              format_double(array_gain(cfg.array, theta, bar, m))});
    }
    return table;
}

} // namespace cream

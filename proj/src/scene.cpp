#include "cream/scene.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cream {

void Scene::validate(const ArrayConfig& cfg) const {
    if (targets.empty()) throw std::invalid_argument("scene: at least one target required");
    for (const Target& t : targets)
        if (!(t.dir.physical_rad >= -M_PI / 2 - 1e-12 && t.dir.physical_rad <= M_PI / 2 + 1e-12))
            throw std::invalid_argument("scene: target angle outside [-pi/2, pi/2]");
    if (sectors.count < 1) throw std::invalid_argument("scene: sector count must be >= 1");
    if (static_cast<int>(coupling.coeffs.size()) != sectors.count)
        throw std::invalid_argument("scene: coupling sectors != sector plan");
    for (const auto& per_sector : coupling.coeffs)
        if (static_cast<int>(per_sector.size()) != cfg.n_subcarriers)
            throw std::invalid_argument("scene: coupling subcarriers != config");
    coupling.validate();
}

double normalized_radar_power(const ArrayConfig& cfg) {
    return static_cast<double>(cfg.n_subcarriers) * cfg.n_antennas * cfg.n_antennas;
}

double snr_to_noise(double snr_db, const ArrayConfig& cfg, double radar_power) {
    const double rho = radar_power / (cfg.n_subcarriers * static_cast<double>(cfg.n_antennas) * cfg.n_antennas);
    return rho * std::pow(10.0, -snr_db / 10.0);
}

CMatrix gen_probing(const ArrayConfig& cfg, const AcquisitionPlan& plan, int m, Rng& rng) {
    if (m < 0 || m >= cfg.n_subcarriers) throw std::out_of_range("gen_probing: bad subcarrier");
    const double var = plan.radar_power / (cfg.n_subcarriers * static_cast<double>(cfg.n_antennas));
    CMatrix x(cfg.n_antennas, plan.snapshots);
    if (var > 0.0)
        for (cplx& v : x.data()) v = rng.cgauss(var);
    return x;
}

void gen_combiner(const ArrayConfig& cfg, AcquisitionPlan& plan, Rng& rng) {
    const int n_rf = cfg.n_rf;
    const int slots = cfg.slots();
    const double mag = 1.0 / std::sqrt(static_cast<double>(cfg.n_antennas));
    plan.blocks.assign(slots, CMatrix(n_rf, n_rf));
    plan.combiner = CMatrix(cfg.n_antennas, cfg.n_antennas);
    for (int j = 0; j < slots; ++j) {
        CMatrix& blk = plan.blocks[j];
        for (int r = 0; r < n_rf; ++r)
            for (int c = 0; c < n_rf; ++c) {
                const cplx w = std::polar(mag, rng.uniform(-1.0, 1.0));
                blk(r, c) = w;
                plan.combiner(j * n_rf + r, j * n_rf + c) = w;
            }
    }
}

std::vector<cplx> apply_combiner_adjoint(const AcquisitionPlan& plan, const std::vector<cplx>& x) {
    std::vector<cplx> y(x.size());
    const int slots = static_cast<int>(plan.blocks.size());
    const int n_rf = slots > 0 ? plan.blocks[0].rows() : 0;
    if (static_cast<int>(x.size()) != slots * n_rf)
        throw std::invalid_argument("apply_combiner_adjoint: length mismatch");
    for (int j = 0; j < slots; ++j) {
        const CMatrix& blk = plan.blocks[j];
        const cplx* xin = x.data() + static_cast<size_t>(j) * n_rf;
        cplx* yout = y.data() + static_cast<size_t>(j) * n_rf;
        for (int c = 0; c < n_rf; ++c) {
            cplx acc{};
            for (int r = 0; r < n_rf; ++r) acc += std::conj(blk(r, c)) * xin[r];
            yout[c] = acc;
        }
    }
    return y;
}

SnapshotSet synth_snapshots(const ArrayConfig& cfg, const Scene& scene, const AcquisitionPlan& plan,
                            Rng& rng) {
    scene.validate(cfg);
    if (plan.snapshots < 1) throw std::invalid_argument("synth: snapshots must be >= 1");
    if (static_cast<int>(plan.blocks.size()) != cfg.slots())
        throw std::invalid_argument("synth: combiner not generated for this config");

    const int n = cfg.n_antennas;
    const int t_count = plan.snapshots;
    const int k_count = static_cast<int>(scene.targets.size());

    SnapshotSet out;
    out.plan = plan;
    out.scene = scene;
    out.y.reserve(cfg.n_subcarriers);

    std::vector<cplx> col(n);
    for (int m = 0; m < cfg.n_subcarriers; ++m) {
        // Corrupted steering matrix D_m, one column per target.
        CMatrix d(n, k_count);
        for (int k = 0; k < k_count; ++k) {
            const Target& tgt = scene.targets[k];
            const int sector = scene.sectors.index_of(tgt.dir.physical_rad);
            const std::vector<cplx> a = steering_corrupted(cfg, scene.coupling, tgt.dir, m, sector);
            for (int i = 0; i < n; ++i) d(i, k) = a[i];
        }

        const CMatrix x = gen_probing(cfg, plan, m, rng);

        // s = Pi D^T X (K x T), then signal = D s (N x T).
        CMatrix s(k_count, t_count);
        for (int k = 0; k < k_count; ++k) {
            const cplx beta = scene.targets[k].reflection;
            for (int t = 0; t < t_count; ++t) {
                cplx acc{};
                for (int i = 0; i < n; ++i) acc += d(i, k) * x(i, t);
                s(k, t) = beta * acc;
            }
        }
        CMatrix received(n, t_count);
        for (int i = 0; i < n; ++i) {
            cplx* row = received.row(i);
            for (int k = 0; k < k_count; ++k) {
                const cplx dik = d(i, k);
                const cplx* srow = s.row(k);
                for (int t = 0; t < t_count; ++t) row[t] += dik * srow[t];
            }
        }
        if (plan.noise_var > 0.0)
            for (cplx& v : received.data()) v += rng.cgauss(plan.noise_var);

        // Stacked observation: block-diagonal W^H applied per snapshot.
        CMatrix y(n, t_count);
        for (int t = 0; t < t_count; ++t) {
            for (int i = 0; i < n; ++i) col[i] = received(i, t);
            const std::vector<cplx> combined = apply_combiner_adjoint(out.plan, col);
            for (int i = 0; i < n; ++i) y(i, t) = combined[i];
        }
        out.y.push_back(std::move(y));
    }
    return out;
}

} // namespace cream

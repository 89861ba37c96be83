#pragma once

#include <cstdint>
#include <vector>

#include "cream/array_model.hpp"
#include "cream/rng.hpp"

namespace cream {

struct Target {
    Direction dir;
    cplx reflection{1.0, 0.0};
};

/// Ground-truth scene for one Monte-Carlo trial.
struct Scene {
    std::vector<Target> targets;
    CouplingModel coupling;   // per (sector, subcarrier)
    SectorPlan sectors{1};
    uint64_t seed = 0;

    void validate(const ArrayConfig& cfg) const;
};

/// Subarrayed acquisition: J = N/N_RF time slots, each applying one
/// N_RF x N_RF unit-modulus block; the stacked observation sees the
/// block-diagonal combiner W.
struct AcquisitionPlan {
    int snapshots = 0;
    double radar_power = 0.0;
    double noise_var = 0.0;
    std::vector<CMatrix> blocks; // J blocks, each N_RF x N_RF
    CMatrix combiner;            // assembled block-diagonal W, N x N
};

/// Per-subcarrier stacked observations Y_m plus everything needed to score
/// an estimate against the truth.
struct SnapshotSet {
    std::vector<CMatrix> y; // M matrices, each N x T
    AcquisitionPlan plan;
    Scene scene;
};

/// Noise power for a target SNR given the normalized reference power
/// rho = P_r / (M N^2): sigma_n^2 = rho 10^(-snr/10).
double snr_to_noise(double snr_db, const ArrayConfig& cfg, double radar_power);

/// Radar power making rho = 1.
double normalized_radar_power(const ArrayConfig& cfg);

/// Probing matrix X_m, entries i.i.d. CN(0, P_r/(M N)).
CMatrix gen_probing(const ArrayConfig& cfg, const AcquisitionPlan& plan, int m, Rng& rng);

/// Draws the per-slot combiner blocks, entries (1/sqrt(N)) e^{j psi},
/// psi ~ unif[-1, 1], and assembles the block-diagonal W.
void gen_combiner(const ArrayConfig& cfg, AcquisitionPlan& plan, Rng& rng);

/// y = W^H x using the block structure (O(N * N_RF) per column).
std::vector<cplx> apply_combiner_adjoint(const AcquisitionPlan& plan, const std::vector<cplx>& x);

/// Synthesizes Y_m = W^H D_m Pi D_m^T X_m + W^H Nbar_m for every
/// subcarrier, where D_m stacks the corrupted steering vectors.
SnapshotSet synth_snapshots(const ArrayConfig& cfg, const Scene& scene, const AcquisitionPlan& plan,
                            Rng& rng);

} // namespace cream

#pragma once

#include <vector>

#include "cream/scene.hpp"

namespace cream {

/// Per-subcarrier sample covariance with its eigen pairs split into signal
/// and noise subspaces.
struct SubspaceDecomposition {
    CMatrix covariance;       // N x N Hermitian
    HermEig eig;              // descending eigenvalues
    CMatrix signal;           // N x K
    CMatrix noise;            // N x (N-K)
    int k = 0;
};

/// R = (1/T) Y Y^H, symmetrized.
CMatrix sample_covariance(const CMatrix& y);

/// Eigenvectors of the N-K smallest eigenvalues of R.
CMatrix noise_subspace(const CMatrix& r, int k);

SubspaceDecomposition decompose(const CMatrix& y, int k);
std::vector<SubspaceDecomposition> decompose_all(const SnapshotSet& snapshots, int k);

/// ||U_N^H x||^2 computed against the stored noise subspace directly.
double noise_projection_norm2(const SubspaceDecomposition& dec, const std::vector<cplx>& x);

/// Which steering model the scan evaluates at each candidate direction.
///   plain: W^H a(theta)                   (no calibration)
///   bsc:   W^H a(eta_m theta)             (beam-split compensation only)
///   mcc:   W^H C a(theta)                 (coupling calibration only)
///   cream: W^H C a(eta_m theta)           (both)
enum class SpectrumMode { plain, bsc, mcc, cream };

const char* to_string(SpectrumMode mode);
SpectrumMode spectrum_mode_from(const std::string& name);

/// Pseudospectra over a uniform physical-angle grid covering [-90, 90] deg.
struct SpectrumGrid {
    std::vector<double> theta_rad;                  // ascending
    std::vector<std::vector<double>> per_subcarrier; // empty unless requested
    std::vector<double> summed;
};

/// Evaluates 1 / (e^H U_N U_N^H e) per subcarrier and sums over subcarriers.
/// `coupling`/`sectors` supply the per-sector coefficient estimates for
/// mcc/cream; pass nullptr to use the identity. Denominators are floored at
/// 1e-30.
SpectrumGrid compute_spectrum(const ArrayConfig& cfg, const AcquisitionPlan& plan,
                              const std::vector<SubspaceDecomposition>& decomps, SpectrumMode mode,
                              const CouplingModel* coupling, const SectorPlan& sectors,
                              double grid_step_deg, bool keep_per_subcarrier = false,
                              int threads = 1);

struct Peak {
    double theta_rad = 0.0;
    double value = 0.0;
};

/// K largest strict local maxima of the summed spectrum, refined by 3-point
/// parabolic interpolation on the log spectrum; ascending in angle. Throws
/// when fewer than K strict local maxima exist.
std::vector<double> find_peaks(const SpectrumGrid& spectrum, int k);

/// find_peaks plus peak heights; falls back to the K largest grid values
/// when there are not enough strict local maxima.
std::vector<Peak> find_peaks_or_largest(const SpectrumGrid& spectrum, int k);

/// Closed-form coupling solve at one subcarrier for the candidate steering
/// angle (spatial): minimizes c^H Sigma c subject to c[0] = 1 with
/// Sigma = T^H W U_N U_N^H W^H T. The leading entry of the result is
/// exactly 1. m/k only label error messages.
std::vector<cplx> estimate_coupling(const SubspaceDecomposition& dec, const ArrayConfig& cfg,
                                    const AcquisitionPlan& plan, double steer_spatial,
                                    int band_size, int m = -1, int k = -1);

struct EstimatorOptions {
    double grid_step_deg = 0.02;
    double epsilon = 1e-4; // convergence threshold on summed |DoA change|, physical radians
    int max_iter = 50;
    int sectors = 6;
    int band_size = 5;
    bool compensate_beam_split = true; // false runs the coupling-only (MCC) variant
    int threads = 1;
};

struct CalibrationResult {
    std::vector<double> doa_rad;                          // ascending, size K
    std::vector<std::vector<double>> beam_split;          // [m][k], spatial offsets
    std::vector<std::vector<std::vector<cplx>>> coupling; // [m][k] -> band_size coeffs
    CouplingModel sector_coupling;                        // final per-sector estimates
    SectorPlan sectors{1};
    std::vector<std::vector<double>> doa_trace;           // per-iteration DoAs
    std::vector<double> objective_trace;                  // per-iteration sum of f(m,k)
    bool converged = false;
    int iterations = 0;
};

/// Alternating DoA / beam-split / coupling estimation: spectra with the
/// current per-sector coupling, K peaks, closed-form coupling refresh at the
/// peaks, until the summed DoA change drops below epsilon. Covariances and
/// subspaces are computed once up front.
CalibrationResult cream_music(const SnapshotSet& snapshots, const ArrayConfig& cfg, int k,
                              const EstimatorOptions& opts);

/// Non-iterative baselines (plain or bsc): one scan, K peaks.
std::vector<double> estimate_music(const SnapshotSet& snapshots, const ArrayConfig& cfg, int k,
                                   SpectrumMode mode, double grid_step_deg, int threads = 1);

/// Root mean-squared DoA error in physical degrees; estimates and truths are
/// paired by ascending order within each trial.
double rmse_deg(const std::vector<std::vector<double>>& estimates_rad,
                const std::vector<std::vector<double>>& truths_rad);

} // namespace cream

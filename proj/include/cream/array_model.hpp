#pragma once

#include <vector>

#include "cream/numerics.hpp"

namespace cream {

/// Uniform linear array over an OFDM-style frequency grid. Spacing is tied
/// to the highest subcarrier, d = c / (2 f_max), so the nominal steering
/// phase step is exactly pi * sin(angle).
struct ArrayConfig {
    int n_antennas = 0;
    int n_rf = 0;
    double carrier_hz = 0.0;
    double bandwidth_hz = 0.0;
    int n_subcarriers = 0;
    double wave_speed = 299792458.0;

    // Derived.
    std::vector<double> subcarrier_hz; // f_m, ascending
    std::vector<double> eta;           // f_m / f_max, eta.back() == 1
    double f_max_hz = 0.0;
    double spacing_m = 0.0;

    int slots() const { return n_antennas / n_rf; }
};

ArrayConfig make_array_config(int n_antennas, int n_rf, double carrier_hz, double bandwidth_hz,
                              int n_subcarriers, double wave_speed = 299792458.0);

/// Target direction. Physical angle in radians, spatial angle = sin(physical).
struct Direction {
    double physical_rad = 0.0;
    double spatial = 0.0;

    static Direction from_physical(double rad);
    static Direction from_spatial(double s);
};

/// Uniform partition of the physical search space [-pi/2, pi/2] into
/// `count` angular sectors.
struct SectorPlan {
    int count = 1;

    int index_of(double physical_rad) const;
    double width() const;
};

/// Per-sector, per-subcarrier mutual-coupling coefficient vectors. Each
/// vector has length band_size with the leading (diagonal) coefficient
/// pinned to 1; the assembled matrix is banded symmetric Toeplitz.
struct CouplingModel {
    int band_size = 1;
    std::vector<std::vector<std::vector<cplx>>> coeffs; // [sector][subcarrier] -> length band_size

    static CouplingModel identity(int band_size, int sectors, int subcarriers);
    void validate() const;
};

/// Nominal steering vector, unit-modulus entries exp(j pi (n-1) sin(angle)).
std::vector<cplx> steering_nominal(const ArrayConfig& cfg, const Direction& dir);

/// Beam-split steering vector at subcarrier m (0-based): the nominal vector
/// evaluated at the shifted spatial direction eta_m * sin(angle).
std::vector<cplx> steering_split(const ArrayConfig& cfg, const Direction& dir, int m);

/// Diagonal operator mapping the nominal vector onto the split one.
struct BeamSplitOp {
    int subcarrier = 0;
    double delta = 0.0;          // spatial offset (eta_m - 1) * sin(angle)
    std::vector<cplx> diagonal;  // unit-modulus entries
};

BeamSplitOp beam_split_op(const ArrayConfig& cfg, const Direction& dir, int m);

/// Spatial beam-split offset (eta_m - 1) * sin(angle).
double beam_split_of(const ArrayConfig& cfg, const Direction& dir, int m);

/// Normalized array gain between a nominal beam at spatial angle theta_bar
/// and the subcarrier-m response to spatial angle theta; Dirichlet-kernel
/// closed form, exactly 1 at theta_bar = eta_m * theta.
double array_gain(const ArrayConfig& cfg, double theta_spatial, double theta_bar_spatial, int m);

/// Assembled N x N coupling matrix for one sector and subcarrier.
CMatrix coupling_matrix(const ArrayConfig& cfg, const CouplingModel& model, int sector, int m);

/// Steering vector corrupted by both beam-split and mutual coupling:
/// C_m(sector) * a(eta_m * sin(angle)).
std::vector<cplx> steering_corrupted(const ArrayConfig& cfg, const CouplingModel& model,
                                     const Direction& dir, int m, int sector);

/// N x L matrix T with column l = S_l * a, where S_l selects the positions
/// the banded Toeplitz pattern assigns to coefficient l. Satisfies
/// T c = Toeplitz(c) * a for every length-L coefficient vector c.
CMatrix selection_transform(int band_size, const std::vector<cplx>& split_steering);

} // namespace cream

#include "cream/array_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cream {

ArrayConfig make_array_config(int n_antennas, int n_rf, double carrier_hz, double bandwidth_hz,
                              int n_subcarriers, double wave_speed) {
    if (n_antennas < 1) throw std::invalid_argument("array: n_antennas must be >= 1");
    if (n_rf < 1) throw std::invalid_argument("array: n_rf must be >= 1");
    if (n_antennas % n_rf != 0)
        throw std::invalid_argument("array: n_antennas (" + std::to_string(n_antennas) +
                                    ") not divisible by n_rf (" + std::to_string(n_rf) + ")");
    if (n_subcarriers < 1) throw std::invalid_argument("array: n_subcarriers must be >= 1");
    if (carrier_hz <= 0.0 || bandwidth_hz < 0.0)
        throw std::invalid_argument("array: carrier must be positive, bandwidth non-negative");

    ArrayConfig cfg;
    cfg.n_antennas = n_antennas;
    cfg.n_rf = n_rf;
    cfg.carrier_hz = carrier_hz;
    cfg.bandwidth_hz = bandwidth_hz;
    cfg.n_subcarriers = n_subcarriers;
    cfg.wave_speed = wave_speed;

    const int m_count = n_subcarriers;
    cfg.subcarrier_hz.resize(m_count);
    for (int m = 1; m <= m_count; ++m)
        cfg.subcarrier_hz[m - 1] = carrier_hz + bandwidth_hz / m_count * (m - 1 - (m_count - 1) / 2.0);
    if (cfg.subcarrier_hz.front() <= 0.0)
        throw std::invalid_argument("array: lowest subcarrier frequency is not positive");

    cfg.f_max_hz = cfg.subcarrier_hz.back();
    cfg.spacing_m = wave_speed / (2.0 * cfg.f_max_hz);
    cfg.eta.resize(m_count);
    for (int m = 0; m < m_count; ++m) cfg.eta[m] = cfg.subcarrier_hz[m] / cfg.f_max_hz;
    cfg.eta[m_count - 1] = 1.0;
    return cfg;
}

Direction Direction::from_physical(double rad) {
    if (!(rad >= -M_PI / 2 - 1e-12 && rad <= M_PI / 2 + 1e-12))
        throw std::invalid_argument("direction: physical angle outside [-pi/2, pi/2]");
    return Direction{rad, std::sin(rad)};
}

Direction Direction::from_spatial(double s) {
    if (!(s >= -1.0 && s <= 1.0))
        throw std::invalid_argument("direction: spatial angle outside [-1, 1]");
    return Direction{std::asin(s), s};
}

int SectorPlan::index_of(double physical_rad) const {
    const int idx = static_cast<int>(std::floor((physical_rad + M_PI / 2) / width()));
    return std::clamp(idx, 0, count - 1);
}

double SectorPlan::width() const { return M_PI / count; }

CouplingModel CouplingModel::identity(int band_size, int sectors, int subcarriers) {
    CouplingModel model;
    model.band_size = band_size;
    std::vector<cplx> c(band_size);
    c[0] = 1.0;
    model.coeffs.assign(sectors, std::vector<std::vector<cplx>>(subcarriers, c));
    return model;
}

void CouplingModel::validate() const {
    if (band_size < 1) throw std::invalid_argument("coupling: band_size must be >= 1");
    for (const auto& per_sector : coeffs)
        for (const auto& c : per_sector) {
            if (static_cast<int>(c.size()) != band_size)
                throw std::invalid_argument("coupling: coefficient vector length != band_size");
            if (c[0] != cplx{1.0, 0.0})
                throw std::invalid_argument("coupling: leading coefficient must be exactly 1");
        }
}

namespace {

// exp(j pi (n-1) x) for n = 1..N via phasor recursion; one sincos total.
std::vector<cplx> phase_ramp(int n, double x) {
    std::vector<cplx> a(n);
    const cplx step = std::polar(1.0, M_PI * x);
    cplx cur{1.0, 0.0};
    for (int i = 0; i < n; ++i) {
        a[i] = cur;
        cur *= step;
    }
    return a;
}

void check_subcarrier(const ArrayConfig& cfg, int m) {
    if (m < 0 || m >= cfg.n_subcarriers)
        throw std::out_of_range("subcarrier index " + std::to_string(m) + " outside [0, " +
                                std::to_string(cfg.n_subcarriers - 1) + "]");
}

} // namespace

std::vector<cplx> steering_nominal(const ArrayConfig& cfg, const Direction& dir) {
    return phase_ramp(cfg.n_antennas, dir.spatial);
}

std::vector<cplx> steering_split(const ArrayConfig& cfg, const Direction& dir, int m) {
    check_subcarrier(cfg, m);
    return phase_ramp(cfg.n_antennas, cfg.eta[m] * dir.spatial);
}

BeamSplitOp beam_split_op(const ArrayConfig& cfg, const Direction& dir, int m) {
    check_subcarrier(cfg, m);
    BeamSplitOp op;
    op.subcarrier = m;
    op.delta = (cfg.eta[m] - 1.0) * dir.spatial;
    op.diagonal = phase_ramp(cfg.n_antennas, op.delta);
    return op;
}

double beam_split_of(const ArrayConfig& cfg, const Direction& dir, int m) {
    check_subcarrier(cfg, m);
    return (cfg.eta[m] - 1.0) * dir.spatial;
}

double array_gain(const ArrayConfig& cfg, double theta_spatial, double theta_bar_spatial, int m) {
    check_subcarrier(cfg, m);
    const int n = cfg.n_antennas;
    // mu = d (f_max theta_bar - f_m theta) / c = (theta_bar - eta_m theta) / 2
    const double mu = 0.5 * (theta_bar_spatial - cfg.eta[m] * theta_spatial);
    const double den = std::sin(M_PI * mu);
    if (std::abs(den) < 1e-12) return 1.0; // analytic limit at the (grating) peak
    const double ratio = std::sin(M_PI * n * mu) / (n * den);
    return ratio * ratio;
}

CMatrix coupling_matrix(const ArrayConfig& cfg, const CouplingModel& model, int sector, int m) {
    return banded_toeplitz(model.coeffs.at(sector).at(m), cfg.n_antennas);
}

std::vector<cplx> steering_corrupted(const ArrayConfig& cfg, const CouplingModel& model,
                                     const Direction& dir, int m, int sector) {
    return banded_toeplitz_apply(model.coeffs.at(sector).at(m), steering_split(cfg, dir, m));
}

CMatrix selection_transform(int band_size, const std::vector<cplx>& split_steering) {
    const int n = static_cast<int>(split_steering.size());
    if (band_size > n)
        throw std::invalid_argument("selection_transform: band " + std::to_string(band_size) +
                                    " exceeds array size " + std::to_string(n));
    CMatrix t(n, band_size);
    for (int i = 0; i < n; ++i) {
        t(i, 0) = split_steering[i];
        for (int l = 1; l < band_size; ++l) {
            cplx s{};
            if (i - l >= 0) s += split_steering[i - l];
            if (i + l < n) s += split_steering[i + l];
            t(i, l) = s;
        }
    }
    return t;
}

} // namespace cream

#include "cream/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "cream/parallel.hpp"

namespace cream {

CMatrix sample_covariance(const CMatrix& y) {
    const int n = y.rows();
    const int t = y.cols();
    if (t < 1) throw std::invalid_argument("sample_covariance: no snapshots");
    CMatrix r(n, n);
    for (int i = 0; i < n; ++i) {
        const cplx* yi = y.row(i);
        for (int j = i; j < n; ++j) {
            const cplx* yj = y.row(j);
            cplx acc{};
            for (int s = 0; s < t; ++s) acc += yi[s] * std::conj(yj[s]);
            acc /= static_cast<double>(t);
            r(i, j) = acc;
            r(j, i) = std::conj(acc);
        }
        r(i, i) = cplx{r(i, i).real(), 0.0};
    }
    return r;
}

namespace {

void check_model_order(int k, int n) {
    if (k < 1 || k >= n)
        throw std::invalid_argument("model order K=" + std::to_string(k) +
                                    " must satisfy 1 <= K < N=" + std::to_string(n));
}

} // namespace

CMatrix noise_subspace(const CMatrix& r, int k) {
    check_model_order(k, r.rows());
    const HermEig eig = eig_hermitian(r);
    const int n = r.rows();
    CMatrix noise(n, n - k);
    for (int j = k; j < n; ++j)
        for (int i = 0; i < n; ++i) noise(i, j - k) = eig.eigenvectors(i, j);
    return noise;
}

SubspaceDecomposition decompose(const CMatrix& y, int k) {
    check_model_order(k, y.rows());
    SubspaceDecomposition dec;
    dec.k = k;
    dec.covariance = sample_covariance(y);
    dec.eig = eig_hermitian(dec.covariance);
    const int n = y.rows();
    dec.signal = CMatrix(n, k);
    dec.noise = CMatrix(n, n - k);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            if (j < k)
                dec.signal(i, j) = dec.eig.eigenvectors(i, j);
            else
                dec.noise(i, j - k) = dec.eig.eigenvectors(i, j);
        }
    return dec;
}

std::vector<SubspaceDecomposition> decompose_all(const SnapshotSet& snapshots, int k) {
    std::vector<SubspaceDecomposition> out(snapshots.y.size());
    for (size_t m = 0; m < snapshots.y.size(); ++m) out[m] = decompose(snapshots.y[m], k);
    return out;
}

double noise_projection_norm2(const SubspaceDecomposition& dec, const std::vector<cplx>& x) {
    const int n = dec.noise.rows();
    if (static_cast<int>(x.size()) != n)
        throw std::invalid_argument("noise_projection_norm2: length mismatch");
    double total = 0.0;
    for (int j = 0; j < dec.noise.cols(); ++j) {
        cplx acc{};
        for (int i = 0; i < n; ++i) acc += std::conj(dec.noise(i, j)) * x[i];
        total += std::norm(acc);
    }
    return total;
}

const char* to_string(SpectrumMode mode) {
    switch (mode) {
        case SpectrumMode::plain: return "PLAIN";
        case SpectrumMode::bsc: return "BSC";
        case SpectrumMode::mcc: return "MCC";
        case SpectrumMode::cream: return "CREAM";
    }
    return "?";
}

SpectrumMode spectrum_mode_from(const std::string& name) {
    if (name == "PLAIN") return SpectrumMode::plain;
    if (name == "BSC") return SpectrumMode::bsc;
    if (name == "MCC") return SpectrumMode::mcc;
    if (name == "CREAM") return SpectrumMode::cream;
    throw std::invalid_argument("unknown spectrum mode: " + name);
}

namespace {

constexpr double kDenomFloor = 1e-30;

std::vector<double> make_grid(double step_deg) {
    if (!(step_deg > 0.0)) throw std::invalid_argument("spectrum: grid step must be positive");
    const int n = static_cast<int>(std::ceil(180.0 / step_deg - 1e-9)) + 1;
    std::vector<double> grid(n);
    for (int i = 0; i < n; ++i)
        grid[i] = std::min(-90.0 + i * step_deg, 90.0) * M_PI / 180.0;
    return grid;
}

// Residual e^H U_N U_N^H e through the unitary complement: |e|^2 - |U_S^H e|^2.
double signal_complement_residual(const CMatrix& signal, const std::vector<cplx>& e) {
    double total = 0.0;
    for (const cplx& v : e) total += std::norm(v);
    for (int j = 0; j < signal.cols(); ++j) {
        cplx acc{};
        for (int i = 0; i < signal.rows(); ++i) acc += std::conj(signal(i, j)) * e[i];
        total -= std::norm(acc);
    }
    return total;
}

void phase_ramp_into(std::vector<cplx>& a, int n, double x) {
    a.resize(n);
    const cplx step = std::polar(1.0, M_PI * x);
    cplx cur{1.0, 0.0};
    for (int i = 0; i < n; ++i) {
        a[i] = cur;
        cur *= step;
    }
}

void banded_apply_into(const std::vector<cplx>& coeffs, const std::vector<cplx>& x,
                       std::vector<cplx>& y) {
    const int n = static_cast<int>(x.size());
    const int band = static_cast<int>(coeffs.size());
    y.resize(n);
    for (int i = 0; i < n; ++i) {
        cplx acc = coeffs[0] * x[i];
        const int lmax = std::min(band - 1, std::max(i, n - 1 - i));
        for (int l = 1; l <= lmax; ++l) {
            cplx s{};
            if (i - l >= 0) s += x[i - l];
            if (i + l < n) s += x[i + l];
            acc += coeffs[l] * s;
        }
        y[i] = acc;
    }
}

void combiner_adjoint_into(const AcquisitionPlan& plan, const std::vector<cplx>& x,
                           std::vector<cplx>& y) {
    const int slots = static_cast<int>(plan.blocks.size());
    const int n_rf = plan.blocks[0].rows();
    y.resize(x.size());
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
}

} // namespace

SpectrumGrid compute_spectrum(const ArrayConfig& cfg, const AcquisitionPlan& plan,
                              const std::vector<SubspaceDecomposition>& decomps, SpectrumMode mode,
                              const CouplingModel* coupling, const SectorPlan& sectors,
                              double grid_step_deg, bool keep_per_subcarrier, int threads) {
    const int m_count = cfg.n_subcarriers;
    if (static_cast<int>(decomps.size()) != m_count)
        throw std::invalid_argument("spectrum: need one decomposition per subcarrier, got " +
                                    std::to_string(decomps.size()));
    const bool use_coupling = (mode == SpectrumMode::mcc || mode == SpectrumMode::cream);
    const bool use_split = (mode == SpectrumMode::bsc || mode == SpectrumMode::cream);
    if (use_coupling && coupling != nullptr &&
        static_cast<int>(coupling->coeffs.size()) != sectors.count)
        throw std::invalid_argument("spectrum: coupling estimates do not match sector plan");

    SpectrumGrid out;
    out.theta_rad = make_grid(grid_step_deg);
    const int points = static_cast<int>(out.theta_rad.size());
    out.summed.assign(points, 0.0);
    if (keep_per_subcarrier)
        out.per_subcarrier.assign(m_count, std::vector<double>(points, 0.0));

    const int n = cfg.n_antennas;
    const int chunk_count = std::max(1, std::min(points, resolve_threads(threads) * 8));
    const int chunk_len = (points + chunk_count - 1) / chunk_count;

    parallel_for(chunk_count, threads, [&](int chunk) {
        std::vector<cplx> steer, coupled, combined;
        const int begin = chunk * chunk_len;
        const int end = std::min(points, begin + chunk_len);
        for (int i = begin; i < end; ++i) {
            const double theta = out.theta_rad[i];
            const double s = std::sin(theta);
            const int sector = sectors.index_of(theta);
            double sum = 0.0;
            for (int m = 0; m < m_count; ++m) {
                phase_ramp_into(steer, n, use_split ? cfg.eta[m] * s : s);
                const std::vector<cplx>* e = &steer;
                if (use_coupling && coupling != nullptr) {
                    banded_apply_into(coupling->coeffs[sector][m], steer, coupled);
                    e = &coupled;
                }
                combiner_adjoint_into(plan, *e, combined);
                const double f = signal_complement_residual(decomps[m].signal, combined);
                const double val = 1.0 / std::max(f, kDenomFloor);
                sum += val;
                if (keep_per_subcarrier) out.per_subcarrier[m][i] = val;
            }
            out.summed[i] = sum;
        }
    });
    return out;
}

namespace {

double refine_parabolic(const std::vector<double>& theta, const std::vector<double>& values, int i) {
    if (i <= 0 || i + 1 >= static_cast<int>(values.size())) return theta[i];
    const double ym = std::log(values[i - 1]);
    const double y0 = std::log(values[i]);
    const double yp = std::log(values[i + 1]);
    const double denom = ym - 2.0 * y0 + yp;
    if (std::abs(denom) < 1e-300) return theta[i];
    const double delta = std::clamp(0.5 * (ym - yp) / denom, -0.5, 0.5);
    return theta[i] + delta * (theta[i + 1] - theta[i]);
}

std::vector<Peak> strict_local_maxima(const SpectrumGrid& spectrum) {
    const auto& v = spectrum.summed;
    std::vector<Peak> peaks;
    for (int i = 1; i + 1 < static_cast<int>(v.size()); ++i)
        if (v[i] > v[i - 1] && v[i] > v[i + 1])
            peaks.push_back({refine_parabolic(spectrum.theta_rad, v, i), v[i]});
    return peaks;
}

std::vector<Peak> top_k_ascending(std::vector<Peak> peaks, int k) {
    std::sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) { return a.value > b.value; });
    peaks.resize(k);
    std::sort(peaks.begin(), peaks.end(),
              [](const Peak& a, const Peak& b) { return a.theta_rad < b.theta_rad; });
    return peaks;
}

} // namespace

std::vector<double> find_peaks(const SpectrumGrid& spectrum, int k) {
    if (static_cast<int>(spectrum.theta_rad.size()) < 2 * k + 1)
        throw std::invalid_argument("find_peaks: grid needs at least 2K+1 points");
    std::vector<Peak> peaks = strict_local_maxima(spectrum);
    if (static_cast<int>(peaks.size()) < k)
        throw std::runtime_error("find_peaks: only " + std::to_string(peaks.size()) +
                                 " local maxima for K=" + std::to_string(k));
    std::vector<double> out;
    for (const Peak& p : top_k_ascending(std::move(peaks), k)) out.push_back(p.theta_rad);
    return out;
}

std::vector<Peak> find_peaks_or_largest(const SpectrumGrid& spectrum, int k) {
    std::vector<Peak> peaks = strict_local_maxima(spectrum);
    if (static_cast<int>(peaks.size()) < k) {
        // Degenerate spectrum: fall back to the K largest grid values.
        std::vector<int> idx(spectrum.summed.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(),
                  [&](int a, int b) { return spectrum.summed[a] > spectrum.summed[b]; });
        peaks.clear();
        for (int i = 0; i < k; ++i)
            peaks.push_back({spectrum.theta_rad[idx[i]], spectrum.summed[idx[i]]});
        std::sort(peaks.begin(), peaks.end(),
                  [](const Peak& a, const Peak& b) { return a.theta_rad < b.theta_rad; });
        return peaks;
    }
    return top_k_ascending(std::move(peaks), k);
}

std::vector<cplx> estimate_coupling(const SubspaceDecomposition& dec, const ArrayConfig& cfg,
                                    const AcquisitionPlan& plan, double steer_spatial,
                                    int band_size, int m, int k) {
    const int n = cfg.n_antennas;
    std::vector<cplx> steer;
    phase_ramp_into(steer, n, steer_spatial);
    const CMatrix t = selection_transform(band_size, steer);

    // W^H T, column by column.
    CMatrix wht(n, band_size);
    std::vector<cplx> col(n), combined;
    for (int l = 0; l < band_size; ++l) {
        for (int i = 0; i < n; ++i) col[i] = t(i, l);
        combiner_adjoint_into(plan, col, combined);
        for (int i = 0; i < n; ++i) wht(i, l) = combined[i];
    }

    // G = U_N^H (W^H T), Sigma = G^H G.
    const int noise_dim = dec.noise.cols();
    CMatrix g(noise_dim, band_size);
    for (int r = 0; r < noise_dim; ++r)
        for (int l = 0; l < band_size; ++l) {
            cplx acc{};
            for (int i = 0; i < n; ++i) acc += std::conj(dec.noise(i, r)) * wht(i, l);
            g(r, l) = acc;
        }
    CMatrix sigma(band_size, band_size);
    for (int l1 = 0; l1 < band_size; ++l1)
        for (int l2 = 0; l2 < band_size; ++l2) {
            cplx acc{};
            for (int r = 0; r < noise_dim; ++r) acc += std::conj(g(r, l1)) * g(r, l2);
            sigma(l1, l2) = acc;
        }

    std::vector<cplx> v(band_size);
    v[0] = 1.0;
    std::vector<cplx> x;
    try {
        x = solve_regularized(sigma, v);
    } catch (const std::runtime_error& e) {
        throw std::runtime_error("estimate_coupling (m=" + std::to_string(m) +
                                 ", k=" + std::to_string(k) + "): " + e.what());
    }
    if (x[0] == cplx{})
        throw std::runtime_error("estimate_coupling (m=" + std::to_string(m) +
                                 ", k=" + std::to_string(k) + "): pinned entry vanished");
    std::vector<cplx> c(band_size);
    c[0] = 1.0;
    for (int l = 1; l < band_size; ++l) c[l] = x[l] / x[0];
    return c;
}

namespace {

// Objective term f(m,k) with explicit coefficients, evaluated against the
// stored noise subspace.
double objective_term(const ArrayConfig& cfg, const AcquisitionPlan& plan,
                      const SubspaceDecomposition& dec, const std::vector<cplx>& coeffs,
                      double steer_spatial) {
    std::vector<cplx> steer, coupled, combined;
    phase_ramp_into(steer, cfg.n_antennas, steer_spatial);
    banded_apply_into(coeffs, steer, coupled);
    combiner_adjoint_into(plan, coupled, combined);
    return noise_projection_norm2(dec, combined);
}

} // namespace

CalibrationResult cream_music(const SnapshotSet& snapshots, const ArrayConfig& cfg, int k,
                              const EstimatorOptions& opts) {
    check_model_order(k, cfg.n_antennas);
    if (!(opts.epsilon > 0.0)) throw std::invalid_argument("cream_music: epsilon must be positive");
    if (opts.max_iter < 1) throw std::invalid_argument("cream_music: max_iter must be >= 1");
    if (opts.sectors < 1) throw std::invalid_argument("cream_music: sector count must be >= 1");

    const int m_count = cfg.n_subcarriers;
    const std::vector<SubspaceDecomposition> decomps = decompose_all(snapshots, k);
    const SectorPlan sectors{opts.sectors};
    CouplingModel est = CouplingModel::identity(opts.band_size, opts.sectors, m_count);
    const SpectrumMode mode = opts.compensate_beam_split ? SpectrumMode::cream : SpectrumMode::mcc;

    CalibrationResult res;
    res.sectors = sectors;

    std::vector<double> prev;
    std::vector<Peak> peaks;
    std::vector<std::vector<std::vector<cplx>>> coeffs_mk; // [m][k]
    for (int iter = 1; iter <= opts.max_iter; ++iter) {
        const SpectrumGrid spec = compute_spectrum(cfg, snapshots.plan, decomps, mode, &est,
                                                   sectors, opts.grid_step_deg, false, opts.threads);
        peaks = find_peaks_or_largest(spec, k);

        std::vector<double> thetas(k);
        for (int i = 0; i < k; ++i) thetas[i] = peaks[i].theta_rad;

        // Closed-form coupling refresh at the current peaks.
        coeffs_mk.assign(m_count, std::vector<std::vector<cplx>>(k));
        for (int ki = 0; ki < k; ++ki) {
            const double s_hat = std::sin(thetas[ki]);
            for (int m = 0; m < m_count; ++m) {
                const double steer = (opts.compensate_beam_split ? cfg.eta[m] : 1.0) * s_hat;
                coeffs_mk[m][ki] =
                    estimate_coupling(decomps[m], cfg, snapshots.plan, steer, opts.band_size, m, ki);
            }
        }

        // Per-sector assignment; when several targets share a sector the one
        // with the largest peak wins.
        std::vector<int> winner(opts.sectors, -1);
        for (int ki = 0; ki < k; ++ki) {
            const int s = sectors.index_of(thetas[ki]);
            if (winner[s] < 0 || peaks[ki].value > peaks[winner[s]].value) winner[s] = ki;
        }
        for (int s = 0; s < opts.sectors; ++s)
            if (winner[s] >= 0)
                for (int m = 0; m < m_count; ++m) est.coeffs[s][m] = coeffs_mk[m][winner[s]];

        double objective = 0.0;
        for (int ki = 0; ki < k; ++ki) {
            const double s_hat = std::sin(thetas[ki]);
            for (int m = 0; m < m_count; ++m) {
                const double steer = (opts.compensate_beam_split ? cfg.eta[m] : 1.0) * s_hat;
                objective +=
                    objective_term(cfg, snapshots.plan, decomps[m], coeffs_mk[m][ki], steer);
            }
        }

        res.doa_trace.push_back(thetas);
        res.objective_trace.push_back(objective);
        res.iterations = iter;

        if (!prev.empty()) {
            double change = 0.0;
            for (int i = 0; i < k; ++i) change += std::abs(thetas[i] - prev[i]);
            if (change <= opts.epsilon) {
                res.converged = true;
                break;
            }
        }
        prev = thetas;
    }

    res.doa_rad = res.doa_trace.back();
    res.beam_split.assign(m_count, std::vector<double>(k, 0.0));
    res.coupling = coeffs_mk;
    for (int ki = 0; ki < k; ++ki) {
        const double s_hat = std::sin(res.doa_rad[ki]);
        for (int m = 0; m < m_count; ++m) res.beam_split[m][ki] = (cfg.eta[m] - 1.0) * s_hat;
    }
    res.sector_coupling = est;
    return res;
}

std::vector<double> estimate_music(const SnapshotSet& snapshots, const ArrayConfig& cfg, int k,
                                   SpectrumMode mode, double grid_step_deg, int threads) {
    if (mode != SpectrumMode::plain && mode != SpectrumMode::bsc)
        throw std::invalid_argument("estimate_music: only PLAIN/BSC are non-iterative");
    const std::vector<SubspaceDecomposition> decomps = decompose_all(snapshots, k);
    const SpectrumGrid spec = compute_spectrum(cfg, snapshots.plan, decomps, mode, nullptr,
                                               SectorPlan{1}, grid_step_deg, false, threads);
    const std::vector<Peak> peaks = find_peaks_or_largest(spec, k);
    std::vector<double> out;
    for (const Peak& p : peaks) out.push_back(p.theta_rad);
    return out;
}

double rmse_deg(const std::vector<std::vector<double>>& estimates_rad,
                const std::vector<std::vector<double>>& truths_rad) {
    if (estimates_rad.size() != truths_rad.size())
        throw std::invalid_argument("rmse: trial count mismatch");
    if (estimates_rad.empty()) throw std::invalid_argument("rmse: no trials");
    double sum_sq = 0.0;
    size_t count = 0;
    for (size_t t = 0; t < estimates_rad.size(); ++t) {
        if (estimates_rad[t].size() != truths_rad[t].size())
            throw std::invalid_argument("rmse: estimate/truth count mismatch in trial " +
                                        std::to_string(t));
        std::vector<double> est = estimates_rad[t];
        std::vector<double> tru = truths_rad[t];
        std::sort(est.begin(), est.end());
        std::sort(tru.begin(), tru.end());
        for (size_t i = 0; i < est.size(); ++i) {
            const double d = (est[i] - tru[i]) * 180.0 / M_PI;
            sum_sq += d * d;
            ++count;
        }
    }
    return std::sqrt(sum_sq / static_cast<double>(count));
}

} // namespace cream

#include <doctest.h>

#include <cmath>

#include "cream/array_model.hpp"
#include "cream/rng.hpp"

using namespace cream;

namespace {

// Reference wide-band setup: 300 GHz carrier, 30 GHz bandwidth, 11 bins.
ArrayConfig wideband_config(int n = 128, int n_rf = 8) {
    return make_array_config(n, n_rf, 300e9, 30e9, 11);
}

} // namespace

TEST_CASE("frequency grid and derived quantities") {
    const ArrayConfig cfg = wideband_config();
    CHECK(cfg.subcarrier_hz.front() == doctest::Approx(3150e9 / 11.0).epsilon(1e-12));
    CHECK(cfg.subcarrier_hz.back() == doctest::Approx(3450e9 / 11.0).epsilon(1e-12));
    CHECK(cfg.eta.front() == doctest::Approx(21.0 / 23.0).epsilon(1e-12));
    CHECK(cfg.eta.back() == 1.0);
    CHECK(cfg.spacing_m == doctest::Approx(cfg.wave_speed / (2.0 * cfg.f_max_hz)));
    // Symmetry of the grid around the carrier.
    const int m_count = cfg.n_subcarriers;
    for (int m = 0; m < m_count; ++m)
        CHECK(cfg.subcarrier_hz[m] + cfg.subcarrier_hz[m_count - 1 - m] ==
              doctest::Approx(2.0 * cfg.carrier_hz).epsilon(1e-14));
    CHECK_THROWS_AS(make_array_config(10, 3, 300e9, 30e9, 4), std::invalid_argument);
}

TEST_CASE("steering_nominal: broadside, endfire, quarter") {
    const ArrayConfig c2 = make_array_config(2, 1, 300e9, 30e9, 3);
    const auto broadside = steering_nominal(c2, Direction::from_physical(0.0));
    CHECK(std::abs(broadside[0] - cplx{1.0}) < 1e-15);
    CHECK(std::abs(broadside[1] - cplx{1.0}) < 1e-15);

    const auto endfire = steering_nominal(c2, Direction::from_spatial(1.0));
    CHECK(std::abs(endfire[1] - cplx{-1.0}) < 1e-12);

    const ArrayConfig c4 = make_array_config(4, 1, 300e9, 30e9, 3);
    const auto quarter = steering_nominal(c4, Direction::from_spatial(0.5));
    CHECK(std::abs(quarter[1] - cplx{0.0, 1.0}) < 1e-12);
    CHECK(std::abs(quarter[2] - cplx{-1.0, 0.0}) < 1e-12);
    CHECK(std::abs(quarter[3] - cplx{0.0, -1.0}) < 1e-12);
}

TEST_CASE("steering_split: last subcarrier reduces to nominal, zero direction is flat") {
    const ArrayConfig cfg = wideband_config(16);
    const Direction dir = Direction::from_physical(0.4);
    const auto split = steering_split(cfg, dir, cfg.n_subcarriers - 1);
    const auto nominal = steering_nominal(cfg, dir);
    for (int i = 0; i < cfg.n_antennas; ++i) CHECK(std::abs(split[i] - nominal[i]) < 1e-14);

    const Direction zero = Direction::from_physical(0.0);
    for (int m = 0; m < cfg.n_subcarriers; ++m)
        for (const cplx& v : steering_split(cfg, zero, m)) CHECK(std::abs(v - cplx{1.0}) < 1e-15);

    CHECK_THROWS_AS(steering_split(cfg, dir, cfg.n_subcarriers), std::out_of_range);
}

TEST_CASE("steering_split equals nominal at the shifted spatial angle") {
    const ArrayConfig cfg = wideband_config(32);
    Rng rng(21);
    for (int trial = 0; trial < 20; ++trial) {
        const Direction dir = Direction::from_spatial(rng.uniform(-1.0, 1.0));
        const int m = static_cast<int>(rng.uniform(0.0, cfg.n_subcarriers));
        const auto split = steering_split(cfg, dir, m);
        const auto shifted = steering_nominal(cfg, Direction::from_spatial(cfg.eta[m] * dir.spatial));
        for (int i = 0; i < cfg.n_antennas; ++i) CHECK(std::abs(split[i] - shifted[i]) < 1e-14);
    }
}

TEST_CASE("split direction at the band edge for a 60 degree source") {
    const ArrayConfig cfg = wideband_config();
    const Direction dir = Direction::from_physical(60.0 * M_PI / 180.0);
    CHECK(cfg.eta[0] * dir.spatial == doctest::Approx(0.7907188).epsilon(1e-6));
    CHECK(beam_split_of(cfg, dir, 0) == doctest::Approx(-0.0753066).epsilon(1e-5));
    CHECK(beam_split_of(cfg, dir, cfg.n_subcarriers - 1) == 0.0);
    CHECK(beam_split_of(cfg, Direction::from_physical(0.0), 3) == 0.0);
}

TEST_CASE("beam split operator maps nominal onto split steering") {
    const ArrayConfig cfg = wideband_config(24);
    const Direction dir = Direction::from_physical(-0.7);
    for (int m : {0, 4, 10}) {
        const BeamSplitOp op = beam_split_op(cfg, dir, m);
        CHECK(op.delta == doctest::Approx((cfg.eta[m] - 1.0) * dir.spatial));
        const auto nominal = steering_nominal(cfg, dir);
        const auto split = steering_split(cfg, dir, m);
        for (int i = 0; i < cfg.n_antennas; ++i) {
            CHECK(std::abs(op.diagonal[i]) == doctest::Approx(1.0));
            CHECK(std::abs(op.diagonal[i] * nominal[i] - split[i]) < 1e-13);
        }
    }
}

TEST_CASE("array_gain: unit peak on the split direction, collapse at the band edge") {
    const ArrayConfig cfg = wideband_config();
    Rng rng(22);
    for (int trial = 0; trial < 10; ++trial) {
        const double theta = rng.uniform(-0.99, 0.99);
        const int m = static_cast<int>(rng.uniform(0.0, cfg.n_subcarriers));
        CHECK(array_gain(cfg, theta, cfg.eta[m] * theta, m) == doctest::Approx(1.0).epsilon(1e-12));
    }
    const double s60 = std::sin(60.0 * M_PI / 180.0);
    CHECK(array_gain(cfg, s60, s60, cfg.n_subcarriers - 1) == doctest::Approx(1.0));
    CHECK(array_gain(cfg, s60, s60, 0) < 0.1); // N=128 at the lowest subcarrier
}

TEST_CASE("array_gain: closed form matches the inner-product definition") {
    const ArrayConfig cfg = wideband_config(64);
    Rng rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        const double theta = rng.uniform(-1.0, 1.0);
        const double bar = rng.uniform(-1.0, 1.0);
        const int m = static_cast<int>(rng.uniform(0.0, cfg.n_subcarriers));
        // |a(bar)^H a_m(theta)|^2 / N^2 with a_m the split steering.
        const auto nominal_bar = steering_nominal(cfg, Direction::from_spatial(bar));
        const auto split = steering_split(cfg, Direction::from_spatial(theta), m);
        cplx dot{};
        for (int i = 0; i < cfg.n_antennas; ++i) dot += std::conj(nominal_bar[i]) * split[i];
        const double direct = std::norm(dot) / (static_cast<double>(cfg.n_antennas) * cfg.n_antennas);
        CHECK(array_gain(cfg, theta, bar, m) == doctest::Approx(direct).epsilon(1e-9));
    }
}

TEST_CASE("array_gain: brute-force argmax sits at eta_m * theta") {
    const ArrayConfig cfg = wideband_config(64);
    Rng rng(24);
    for (int trial = 0; trial < 5; ++trial) {
        const double theta = std::sin(rng.uniform(-M_PI / 2, M_PI / 2));
        const int m = static_cast<int>(rng.uniform(0.0, cfg.n_subcarriers));
        const double step = 1e-3;
        double best = -1.0, best_bar = 0.0;
        for (double bar = -1.0; bar <= 1.0; bar += step) {
            const double g = array_gain(cfg, theta, bar, m);
            if (g > best) { best = g; best_bar = bar; }
        }
        CHECK(std::abs(best_bar - cfg.eta[m] * theta) <= step + 1e-12);
    }
}

TEST_CASE("coupling_matrix: identity vector, reference magnitudes, band structure") {
    const ArrayConfig cfg = wideband_config(16);
    CouplingModel identity = CouplingModel::identity(5, 2, cfg.n_subcarriers);
    const CMatrix eye = coupling_matrix(cfg, identity, 0, 3);
    for (int i = 0; i < 16; ++i)
        for (int j = 0; j < 16; ++j) CHECK(eye(i, j) == (i == j ? cplx{1.0} : cplx{}));

    Rng rng(25);
    CouplingModel model = CouplingModel::identity(5, 1, cfg.n_subcarriers);
    const double mags[4] = {0.85, 0.8, 0.4, 0.2};
    for (int m = 0; m < cfg.n_subcarriers; ++m)
        for (int l = 1; l < 5; ++l)
            model.coeffs[0][m][l] = std::polar(mags[l - 1], rng.uniform(-M_PI, M_PI));
    model.validate();
    const CMatrix c = coupling_matrix(cfg, model, 0, 0);
    CHECK(std::abs(c(3, 4)) == doctest::Approx(0.85));
    CHECK(std::abs(c(0, 4)) == doctest::Approx(0.2));
    CHECK(c(0, 5) == cplx{});
    for (int i = 0; i < 16; ++i) {
        CHECK(c(i, i) == cplx{1.0});
        for (int j = 0; j < 16; ++j) CHECK(c(i, j) == c(j, i));
    }
}

TEST_CASE("steering_corrupted: identity coupling reductions and product oracle") {
    const ArrayConfig cfg = wideband_config(16);
    const Direction dir = Direction::from_physical(0.5);
    CouplingModel identity = CouplingModel::identity(3, 1, cfg.n_subcarriers);

    const auto last = steering_corrupted(cfg, identity, dir, cfg.n_subcarriers - 1, 0);
    const auto nominal = steering_nominal(cfg, dir);
    for (int i = 0; i < 16; ++i) CHECK(std::abs(last[i] - nominal[i]) < 1e-13);

    const auto mid = steering_corrupted(cfg, identity, dir, 2, 0);
    const auto split = steering_split(cfg, dir, 2);
    for (int i = 0; i < 16; ++i) CHECK(std::abs(mid[i] - split[i]) < 1e-13);

    Rng rng(26);
    CouplingModel model = CouplingModel::identity(4, 1, cfg.n_subcarriers);
    for (int m = 0; m < cfg.n_subcarriers; ++m)
        for (int l = 1; l < 4; ++l)
            model.coeffs[0][m][l] = {rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};
    const auto fast = steering_corrupted(cfg, model, dir, 5, 0);
    const auto slow = matvec(coupling_matrix(cfg, model, 0, 5), steering_split(cfg, dir, 5));
    for (int i = 0; i < 16; ++i) CHECK(std::abs(fast[i] - slow[i]) < 1e-13);
}

TEST_CASE("selection_transform: trivial column, adjacency pattern, defining identity") {
    const ArrayConfig cfg = wideband_config(16);
    const Direction dir = Direction::from_physical(-0.3);
    const auto a = steering_split(cfg, dir, 1);

    const CMatrix t1 = selection_transform(1, a);
    for (int i = 0; i < 16; ++i) CHECK(t1(i, 0) == a[i]);

    std::vector<cplx> a4(a.begin(), a.begin() + 4);
    const CMatrix t2 = selection_transform(2, a4);
    CHECK(std::abs(t2(0, 1) - a4[1]) < 1e-15);
    CHECK(std::abs(t2(1, 1) - (a4[0] + a4[2])) < 1e-15);
    CHECK(std::abs(t2(2, 1) - (a4[1] + a4[3])) < 1e-15);
    CHECK(std::abs(t2(3, 1) - a4[2]) < 1e-15);

    Rng rng(27);
    for (int trial = 0; trial < 20; ++trial) {
        const int band = 2 + static_cast<int>(rng.uniform(0.0, 4.0));
        std::vector<cplx> c(band);
        c[0] = 1.0;
        for (int l = 1; l < band; ++l) c[l] = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        const Direction d = Direction::from_spatial(rng.uniform(-1.0, 1.0));
        const int m = static_cast<int>(rng.uniform(0.0, cfg.n_subcarriers));
        const auto steer = steering_split(cfg, d, m);
        const CMatrix t = selection_transform(band, steer);
        const std::vector<cplx> via_t = matvec(t, c);
        const std::vector<cplx> via_c = banded_toeplitz_apply(c, steer);
        for (int i = 0; i < 16; ++i) CHECK(std::abs(via_t[i] - via_c[i]) < 1e-12);
    }
    CHECK_THROWS_AS(selection_transform(20, a), std::invalid_argument);
}

TEST_CASE("sector plan covers the search space") {
    const SectorPlan plan{6};
    CHECK(plan.index_of(-M_PI / 2) == 0);
    CHECK(plan.index_of(M_PI / 2) == 5);
    CHECK(plan.index_of(0.0) == 3);
    CHECK(plan.index_of(-1e-9) == 2);
    int prev = 0;
    for (double a = -M_PI / 2; a <= M_PI / 2; a += 0.01) {
        const int s = plan.index_of(a);
        CHECK(s >= prev);
        prev = s;
    }
}

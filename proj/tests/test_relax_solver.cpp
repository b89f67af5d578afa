#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "oracle_trig.hpp"
#include "relaxflow/ns_solver.hpp"
#include "relaxflow/relax_solver.hpp"

using namespace relaxflow;

namespace {

using MatC = Eigen::MatrixXcd;

// Independent oracle: complex 7x7 generator assembled directly from the
// equations in the plain variables (phat, uhat, Uhat), exponentiated by a
// long-double Taylor series with scaling and squaring.
MatC plain_generator(double g1, double g2, const RelaxParams& prm) {
    const Complex I(0.0, 1.0);
    const double g[2] = {g1, g2};
    MatC B = MatC::Zero(7, 7);
    for (int i = 0; i < 2; ++i) {
        B(0, 1 + i) = I * g[i] / prm.epsilon;
        B(1 + i, 0) = I * g[i];
        for (int j = 0; j < 2; ++j) {
            B(1 + i, 3 + 2 * j + i) = I * g[j];
            B(3 + 2 * i + j, 1 + j) = I * g[i] / prm.delta;
        }
        if (prm.friction) B(1 + i, 1 + i) = 1.0;
    }
    for (int c = 3; c < 7; ++c) B(c, c) = 1.0 / prm.delta;
    return B;
}

MatC expm_oracle(const MatC& A) {
    using MatL = Eigen::Matrix<std::complex<long double>, Eigen::Dynamic, Eigen::Dynamic>;
    MatL X = A.cast<std::complex<long double>>();
    int s = 0;
    while (X.cwiseAbs().maxCoeff() * X.rows() > 0.25L) {
        X *= 0.5L;
        ++s;
    }
    MatL E = MatL::Identity(A.rows(), A.cols()), term = E;
    for (int k = 1; k < 60; ++k) {
        term = term * X / static_cast<long double>(k);
        E += term;
        if (term.cwiseAbs().maxCoeff() < 1e-26L) break;
    }
    for (int k = 0; k < s; ++k) E = E * E;
    return E.cast<Complex>();
}

VectorField taylor_green(const TorusGrid& grid, double amp = 1.0) {
    return VectorField::sample(grid, [amp](int c, double x1, double x2) {
        return c == 0 ? amp * std::sin(kTwoPi * x1) * std::cos(kTwoPi * x2)
                      : -amp * std::cos(kTwoPi * x1) * std::sin(kTwoPi * x2);
    });
}

SystemState well_prepared(const TorusGrid& grid, const VectorField& u0) {
    SystemState s;
    s.t = 0.0;
    s.u = u0;
    s.p = ns_pressure(u0);
    s.U = ns_flux(u0);
    return s;
}

double sup_err_u_l2(const StateSeries& series, const NsTrajectory& ref) {
    double sup = 0.0;
    const TorusGrid& grid = series.grid;
    const int nm = grid.nmodes();
    for (const auto& snap : series.snapshots) {
        auto uref = ref.u_hat_at(snap.t);
        double acc = 0.0;
        for (int c = 0; c < 2; ++c) {
            std::vector<Complex> d(nm);
            for (int m = 0; m < nm; ++m) d[m] = snap.comp[(1 + c) * nm + m] - uref[c * nm + m];
            acc += spec::l2_sq(grid, d.data());
        }
        sup = std::max(sup, acc);
    }
    return sup;  // squared sup error
}

}  // namespace

TEST_CASE("symbol at k = 0 is the pure relaxation diagonal") {
    RelaxParams prm{.epsilon = 1e-2, .delta = 1e-3};
    Mat7 A = linear_symbol(0.0, 0.0, prm);
    Mat7 expect = Mat7::Zero();
    for (int c = 3; c < 7; ++c) expect(c, c) = 1e3;
    REQUIRE((A - expect).cwiseAbs().maxCoeff() == 0.0);

    prm.friction = true;
    Mat7 Af = linear_symbol(0.0, 0.0, prm);
    expect(1, 1) = expect(2, 2) = 1.0;
    REQUIRE((Af - expect).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("symmetrized symbol has eigenvalues with nonnegative real part") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> gk(-200.0, 200.0);
    std::uniform_real_distribution<double> lp(-6.0, -0.5);
    for (int trial = 0; trial < 40; ++trial) {
        RelaxParams prm{.epsilon = std::pow(10.0, lp(rng)), .delta = std::pow(10.0, lp(rng)),
                        .a = 1.0, .friction = trial % 2 == 0};
        Mat7 As = symmetrized_symbol(gk(rng), gk(rng), prm);
        // antisymmetric wave part plus nonnegative diagonal
        Mat7 sym = 0.5 * (As + As.transpose());
        Mat7 offdiag = sym;
        offdiag.diagonal().setZero();
        REQUIRE(offdiag.cwiseAbs().maxCoeff() < 1e-9);
        REQUIRE(sym.diagonal().minCoeff() >= 0.0);
        Eigen::EigenSolver<Mat7> es(As);
        REQUIRE(es.eigenvalues().real().minCoeff() > -1e-9 * As.cwiseAbs().maxCoeff());
        // plain symbol is similar, same spectrum constraint
        Eigen::EigenSolver<Mat7> ep(linear_symbol(100.0, -40.0, prm));
        REQUIRE(ep.eigenvalues().real().minCoeff() > -1e-7);
    }
}

TEST_CASE("characteristic speeds at k = (1,0) carry the 1/sqrt(eps), 1/sqrt(delta) factors") {
    const RelaxParams prm{.epsilon = 4e-2, .delta = 1e-2};
    Mat7 A = linear_symbol(kTwoPi, 0.0, prm);
    A.diagonal().setZero();  // convective part only
    Eigen::EigenSolver<Mat7> es(A);
    std::vector<double> omegas;
    for (int i = 0; i < 7; ++i) {
        REQUIRE(std::abs(es.eigenvalues()[i].real()) < 1e-8);
        omegas.push_back(es.eigenvalues()[i].imag());
    }
    std::sort(omegas.begin(), omegas.end());
    // closed form: 0 (x3), +-2 pi sqrt(1/eps + 1/delta), +-2 pi/sqrt(delta)
    const double w_fast = kTwoPi * std::sqrt(1.0 / prm.epsilon + 1.0 / prm.delta);
    const double w_shear = kTwoPi / std::sqrt(prm.delta);
    std::vector<double> expect{-w_fast, -w_shear, 0.0, 0.0, 0.0, w_shear, w_fast};
    for (int i = 0; i < 7; ++i) REQUIRE(omegas[i] == Catch::Approx(expect[i]).margin(1e-8));
}

TEST_CASE("source-free evolution matches the dense complex ODE oracle per mode") {
    TorusGrid grid(16);
    std::mt19937_64 rng(5150);
    std::normal_distribution<double> dist;
    for (const double eps : {1e-1, 1e-3, 1e-6}) {
        for (const double del : {1e-1, 1e-3, 1e-6}) {
            RelaxParams prm{.epsilon = eps, .delta = del};
            const double dt = default_relax_dt(prm);
            RelaxSolver solver(grid, prm, dt);
            const int steps = 5;
            // seed a handful of random stored modes
            for (int trial = 0; trial < 4; ++trial) {
                const int i = static_cast<int>(rng() % 16), j = static_cast<int>(rng() % 9);
                SpectralState7 s;
                s.t = 0.0;
                s.comp.assign(static_cast<size_t>(7) * grid.nmodes(), Complex(0, 0));
                Eigen::VectorXcd z0(7);
                for (int c = 0; c < 7; ++c) {
                    z0[c] = Complex(dist(rng), dist(rng));
                    s.comp[c * grid.nmodes() + grid.mode(i, j)] = z0[c];
                }
                for (int k = 0; k < steps; ++k) s = solver.step(s, /*disable_source=*/true);
                const MatC B = plain_generator(grid.deriv1(i), grid.deriv2(j), prm);
                const Eigen::VectorXcd zT = expm_oracle((-steps * dt * B).eval()) * z0;
                for (int c = 0; c < 7; ++c) {
                    const Complex got = s.comp[c * grid.nmodes() + grid.mode(i, j)];
                    REQUIRE(std::abs(got - zT[c]) < 1e-10 * (1.0 + zT.cwiseAbs().maxCoeff()));
                }
            }
        }
    }
}

TEST_CASE("spatially uniform equilibrium is an exact fixed point") {
    TorusGrid grid(16);
    SystemState s;
    s.t = 0.0;
    s.p = ScalarField::sample(grid, [](int, double, double) { return 0.3; });
    s.u = VectorField::sample(grid, [](int c, double, double) { return c == 0 ? 0.4 : -0.7; });
    s.U = TensorField::sample(grid, [](int c, double, double) {
        const double u[2] = {0.4, -0.7};
        return u[c / 2] * u[c % 2];
    });
    RelaxParams prm{.epsilon = 1e-2, .delta = 1e-2};
    auto series = relax_run(s, prm, {.T = 0.02, .dt = 1e-3, .dt_out = 1e-2});
    REQUIRE_FALSE(series.blowup_t.has_value());
    const auto& last = series.snapshots.back();
    auto fin = last.to_system_state(grid);
    REQUIRE(norms::linf(fin.u - s.u) < 1e-13);
    REQUIRE(norms::linf(fin.p - s.p) < 1e-13);
    REQUIRE(norms::linf(*fin.U - *s.U) < 1e-13);
}

TEST_CASE("symmetrizer energy is non-increasing with the source disabled") {
    TorusGrid grid(32);
    SystemState s;
    s.t = 0.0;
    s.p = zero_mean(oracle::random_poly(11, 6, 6).to_field(grid));
    s.u = VectorField::sample(grid, [&](int c, double x1, double x2) {
        return oracle::random_poly(21 + c, 6, 6).eval(x1, x2);
    });
    s.U = TensorField::sample(grid, [&](int c, double x1, double x2) {
        return oracle::random_poly(31 + c, 6, 6).eval(x1, x2);
    });
    RelaxParams prm{.epsilon = 2e-2, .delta = 5e-3};
    auto series = relax_run(s, prm, {.T = 0.05, .dt = 1e-3, .dt_out = 5e-3,
                                     .disable_nonlinearity = true});
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& snap : series.snapshots) {
        auto st = snap.to_system_state(grid);
        const double e = prm.epsilon * norms::l2_sq(st.p) + norms::l2_sq(st.u) +
                         prm.delta * norms::l2_sq(*st.U);
        REQUIRE(e <= prev * (1.0 + 1e-12));
        prev = e;
    }
}

TEST_CASE("halving dt changes the final state at second order") {
    TorusGrid grid(32);
    auto s0 = well_prepared(grid, taylor_green(grid));
    RelaxParams prm{.epsilon = 4e-3, .delta = 4e-3};
    auto final_u = [&](double dt) {
        auto series = relax_run(s0, prm, {.T = 0.02, .dt = dt, .dt_out = 0.02});
        return series.snapshots.back().to_system_state(grid).u;
    };
    auto u1 = final_u(4e-4), u2 = final_u(2e-4), u3 = final_u(1e-4);
    const double e1 = norms::l2(u1 - u2), e2 = norms::l2(u2 - u3);
    REQUIRE(e1 / e2 == Catch::Approx(4.0).margin(1.2));
}

TEST_CASE("velocity error vs the reference scales linearly in eps + delta") {
    TorusGrid grid(32);
    auto u0 = taylor_green(grid);
    auto s0 = well_prepared(grid, u0);
    NsSolver ns({.n = 32, .dt = 2.5e-4});
    NsTrajectory ref(grid, false, 0.0, 2.5e-4 * 4);
    ns_run(ns, u0, 0.1, 2.5e-4 * 4, ref);

    auto sup_sq = [&](double ed) {
        RelaxParams prm{.epsilon = ed, .delta = ed};
        auto series = relax_run(s0, prm, {.T = 0.1, .dt = 0.1 / std::ceil(0.1 / default_relax_dt(prm)),
                                          .dt_out = 0.01});
        REQUIRE_FALSE(series.blowup_t.has_value());
        return sup_err_u_l2(series, ref);
    };
    const double e_coarse = sup_sq(2e-3);
    const double e_fine = sup_sq(1e-3);
    // the bound sup |u - u_ref|^2 <= C (eps+delta) gives at least a factor
    // ~2 per halving; equilibrium-prepared data actually lands near the
    // first-order rate (factor ~4), which only undershoots the bound
    REQUIRE(e_coarse / e_fine > 1.6);
    REQUIRE(e_coarse / e_fine < 5.0);
}

TEST_CASE("friction decays the mean velocity as exp(-t) to 1e-8") {
    TorusGrid grid(16);
    auto u0 = VectorField::sample(grid, [](int c, double x1, double x2) {
        const double tg = c == 0 ? std::sin(kTwoPi * x1) * std::cos(kTwoPi * x2)
                                 : -std::cos(kTwoPi * x1) * std::sin(kTwoPi * x2);
        return 0.2 * tg + (c == 0 ? 0.35 : -0.15);
    });
    auto s0 = well_prepared(grid, u0);
    RelaxParams prm{.epsilon = 1e-2, .delta = 1e-2, .a = 1.0, .friction = true};
    auto series = relax_run(s0, prm, {.T = 0.5, .dt = 1e-3, .dt_out = 0.05});
    const int nm = grid.nmodes();
    const Complex mean1_0 = series.snapshots.front().comp[nm];
    const Complex mean2_0 = series.snapshots.front().comp[2 * nm];
    for (const auto& snap : series.snapshots) {
        const double decay = std::exp(-snap.t);
        REQUIRE(std::abs(snap.comp[nm] - mean1_0 * decay) < 1e-8 * std::abs(mean1_0));
        REQUIRE(std::abs(snap.comp[2 * nm] - mean2_0 * decay) < 1e-8 * std::abs(mean2_0));
    }
}

TEST_CASE("T = 0 returns only the initial snapshot") {
    TorusGrid grid(16);
    auto s0 = well_prepared(grid, taylor_green(grid));
    auto series = relax_run(s0, {.epsilon = 1e-2, .delta = 1e-2}, {.T = 0.0, .dt = 1e-3, .dt_out = 1e-3});
    REQUIRE(series.count() == 1);
    REQUIRE_FALSE(series.blowup_t.has_value());
}

TEST_CASE("blow-up threshold aborts with the last stable time") {
    TorusGrid grid(16);
    auto s0 = well_prepared(grid, taylor_green(grid));
    RelaxParams prm{.epsilon = 1e-2, .delta = 1e-2};
    auto series = relax_run(s0, prm, {.T = 0.05, .dt = 1e-3, .dt_out = 5e-3,
                                      .blowup_threshold = 0.5});
    REQUIRE(series.blowup_t.has_value());
    REQUIRE(*series.blowup_t == Catch::Approx(0.0));
    REQUIRE(series.count() == 1);
}

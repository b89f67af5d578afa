#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "oracle_trig.hpp"
#include "relaxflow/model.hpp"
#include "relaxflow/snapshot.hpp"

using namespace relaxflow;

namespace {

SystemState taylor_green_state(const TorusGrid& grid) {
    SystemState s;
    s.t = 0.0;
    s.u = VectorField::sample(grid, [](int c, double x1, double x2) {
        return c == 0 ? std::sin(kTwoPi * x1) * std::cos(kTwoPi * x2)
                      : -std::cos(kTwoPi * x1) * std::sin(kTwoPi * x2);
    });
    s.p = ScalarField::sample(grid, [](int, double x1, double x2) {
        return 0.25 * (std::cos(2 * kTwoPi * x1) + std::cos(2 * kTwoPi * x2));
    });
    s.U = ns_flux(s.u);
    return s;
}

}  // namespace

TEST_CASE("residual of identical states is zero") {
    TorusGrid grid(32);
    auto s = taylor_green_state(grid);
    RelaxParams params{.epsilon = 1e-2, .delta = 1e-3};
    auto w = residual_from(s, s, params);
    REQUIRE(norms::l2(w.q) == 0.0);
    REQUIRE(norms::l2(w.v) == 0.0);
    REQUIRE(norms::l2(w.V) == 0.0);
}

TEST_CASE("constant pressure offset gives q = sqrt(eps) * dp") {
    TorusGrid grid(32);
    auto s = taylor_green_state(grid);
    auto shifted = s;
    shifted.p = s.p + ScalarField::sample(grid, [](int, double, double) { return 1.0; });
    RelaxParams params{.epsilon = 0.04, .delta = 1e-3};
    auto w = residual_from(shifted, s, params);
    for (int m = 0; m < grid.npoints(); ++m)
        REQUIRE(w.q.values(0)[m] == Catch::Approx(0.2).epsilon(1e-13));
    REQUIRE(norms::l2(w.v) == 0.0);
}

TEST_CASE("mu scaling divides the unit-scaled residual by mu") {
    TorusGrid grid(32);
    auto a = taylor_green_state(grid);
    auto b = a;
    b.u = a.u * 0.5;
    b.U = ns_flux(b.u);
    RelaxParams params{.epsilon = 1e-2, .delta = 1e-2};
    REQUIRE(params.mu() == Catch::Approx(0.1));
    auto wu = residual_from(a, b, params, ResidualScaling::unit);
    auto wm = residual_from(a, b, params, ResidualScaling::mu);
    REQUIRE(norms::l2(wm.v) == Catch::Approx(10.0 * norms::l2(wu.v)).epsilon(1e-12));
    REQUIRE(norms::l2(wm.V) == Catch::Approx(10.0 * norms::l2(wu.V)).epsilon(1e-12));
}

TEST_CASE("residual is linear in the state difference") {
    TorusGrid grid(32);
    auto base = taylor_green_state(grid);
    auto mid = base, far = base;
    mid.u = base.u * 1.25;
    far.u = base.u * 1.5;
    mid.p = base.p * 1.25;
    far.p = base.p * 1.5;
    mid.U = *base.U * 1.25;
    far.U = *base.U * 1.5;
    RelaxParams params{.epsilon = 3e-2, .delta = 2e-3};
    auto w1 = residual_from(mid, base, params);
    auto w2 = residual_from(far, base, params);
    REQUIRE(norms::l2(w2.v - w1.v * 2.0) < 1e-12);
    REQUIRE(norms::l2(w2.q - w1.q * 2.0) < 1e-12);
    REQUIRE(norms::l2(w2.V - w1.V * 2.0) < 1e-12);
}

TEST_CASE("ns_flux of zero and of a constant velocity") {
    TorusGrid grid(32);
    auto zero = VectorField(grid);
    REQUIRE(norms::l2(ns_flux(zero)) == 0.0);

    auto c = VectorField::sample(grid, [](int comp, double, double) {
        return comp == 0 ? 0.75 : -0.5;
    });
    auto U = ns_flux(c);
    const double expect[4] = {0.75 * 0.75, 0.75 * -0.5, -0.5 * 0.75, 0.25};
    for (int comp = 0; comp < 4; ++comp)
        for (int m = 0; m < grid.npoints(); ++m)
            REQUIRE(U.values(comp)[m] == Catch::Approx(expect[comp]).margin(1e-13));
}

TEST_CASE("ns_flux of Taylor-Green matches the symbolic algebra oracle") {
    TorusGrid grid(64);
    auto s = taylor_green_state(grid);
    auto U = ns_flux(s.u);
    auto expect = TensorField::sample(grid, [](int c, double x1, double x2) {
        const double s1 = std::sin(kTwoPi * x1), c1 = std::cos(kTwoPi * x1);
        const double s2 = std::sin(kTwoPi * x2), c2 = std::cos(kTwoPi * x2);
        const double u1 = s1 * c2, u2 = -c1 * s2;
        switch (c) {
            case 0: return u1 * u1 - kTwoPi * c1 * c2;
            case 1: return u1 * u2 - kTwoPi * s1 * s2;
            case 2: return u1 * u2 + kTwoPi * s1 * s2;
            default: return u2 * u2 + kTwoPi * c1 * c2;
        }
    });
    for (int c = 0; c < 4; ++c)
        for (int m = 0; m < grid.npoints(); ++m)
            REQUIRE(U.values(c)[m] == Catch::Approx(expect.values(c)[m]).margin(1e-10));
}

TEST_CASE("snapshot round trip is bit exact") {
    TorusGrid grid(16);
    auto s = taylor_green_state(grid);
    s.t = 0.375;
    RelaxParams params{.epsilon = 1e-3, .delta = 2e-4, .a = 1.5, .friction = true};
    const auto path = std::filesystem::temp_directory_path() / "relaxflow_snap_test.bin";
    write_snapshot(path.string(), s, params);
    auto snap = read_snapshot(path.string());
    std::filesystem::remove(path);
    REQUIRE(snap.state.t == s.t);
    REQUIRE(snap.params.epsilon == params.epsilon);
    REQUIRE(snap.params.delta == params.delta);
    REQUIRE(snap.params.a == params.a);
    REQUIRE(snap.params.friction == params.friction);
    REQUIRE(snap.state.U.has_value());
    for (int m = 0; m < grid.npoints(); ++m) {
        REQUIRE(snap.state.p.values(0)[m] == s.p.values(0)[m]);
        REQUIRE(snap.state.u.values(0)[m] == s.u.values(0)[m]);
        REQUIRE(snap.state.u.values(1)[m] == s.u.values(1)[m]);
        for (int c = 0; c < 4; ++c) REQUIRE(snap.state.U->values(c)[m] == s.U->values(c)[m]);
    }
}

TEST_CASE("reading garbage fails with a clear error") {
    const auto path = std::filesystem::temp_directory_path() / "relaxflow_not_snap.bin";
    {
        std::ofstream out(path, std::ios::binary);
        out << "this is not a snapshot";
    }
    REQUIRE_THROWS_AS(read_snapshot(path.string()), std::runtime_error);
    std::filesystem::remove(path);
}

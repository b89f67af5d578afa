#pragma once

// Pseudo-spectral reference solver for the incompressible system on T^2
// with unit viscosity:
//   div u = 0,   du/dt + div(u x u) = -grad p + Lap u  (- u with friction).
// The nonlinear term is Leray-projected and 2/3-dealiased, integrated with
// classical RK4 on the integrating-factor transform; the viscous (and
// friction) part is exact, so the only error source is the projected
// nonlinearity. Pressure is recovered diagnostically from
//   -Lap p = div div (u x u),  mean p = 0.

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "relaxflow/model.hpp"
#include "relaxflow/modes.hpp"
#include "relaxflow/trajectory.hpp"

namespace relaxflow {

struct DivergenceError : std::runtime_error {
    DivergenceError(const std::string& what, double t_last)
        : std::runtime_error(what + " at t = " + std::to_string(t_last)), t(t_last) {}
    double t;
};

struct NsSolverConfig {
    int n = 64;
    double dt = 1e-3;
    bool friction = false;
    double blowup_threshold = 1e6;
};

// Velocity spectrum at one instant, component-major (2 * nmodes).
struct NsSpecState {
    double t = 0.0;
    std::vector<Complex> u;
};

class NsSolver {
  public:
    explicit NsSolver(const NsSolverConfig& config)
        : cfg_(config), grid_(config.n), mt_(grid_) {
        if (!(cfg_.dt > 0.0)) throw std::invalid_argument("dt must be positive");
        const int nm = grid_.nmodes();
        e_half_.resize(nm);
        e_full_.resize(nm);
        const double fric = cfg_.friction ? 1.0 : 0.0;
        for (int m = 0; m < nm; ++m) {
            const double lam = -(symbol_ksq(m) + fric);
            e_half_[m] = std::exp(0.5 * cfg_.dt * lam);
            e_full_[m] = std::exp(cfg_.dt * lam);
        }
    }

    const TorusGrid& grid() const { return grid_; }
    const NsSolverConfig& config() const { return cfg_; }

    NsSpecState make_state(const VectorField& u0) const {
        if (u0.grid() != grid_) throw std::invalid_argument("initial data grid mismatch");
        NsSpecState s;
        s.t = 0.0;
        s.u.assign(u0.raw_coef().begin(), u0.raw_coef().end());
        dealias_state(s.u);
        project(s.u);
        return s;
    }

    // Projected, dealiased advection term N(u) = -P[div(u x u)].
    std::vector<Complex> rhs_nonlinear(const std::vector<Complex>& u) const {
        const int nm = grid_.nmodes();
        std::vector<Complex> s(static_cast<size_t>(3) * nm);
        spec::outer_sym_dealiased(grid_, mt_, u.data(), u.data(), s.data());
        std::vector<Complex> out(static_cast<size_t>(2) * nm);
        const Complex I(0.0, 1.0);
        for (int m = 0; m < nm; ++m) {
            const double g1 = mt_.g1[m], g2 = mt_.g2[m];
            out[m] = -I * (g1 * s[m] + g2 * s[nm + m]);
            out[nm + m] = -I * (g1 * s[nm + m] + g2 * s[2 * nm + m]);
        }
        project(out);
        return out;
    }

    // One integrating-factor RK4 step; dt may be negative (diagnostic use).
    NsSpecState step(const NsSpecState& s, double dt_override) const {
        const int nm = grid_.nmodes();
        const double h = dt_override;
        std::vector<double> eh(nm), ef(nm);
        const double fric = cfg_.friction ? 1.0 : 0.0;
        if (h == cfg_.dt) {
            eh = e_half_;
            ef = e_full_;
        } else {
            for (int m = 0; m < nm; ++m) {
                const double lam = -(symbol_ksq(m) + fric);
                eh[m] = std::exp(0.5 * h * lam);
                ef[m] = std::exp(h * lam);
            }
        }
        auto scaled = [&](const std::vector<Complex>& a, const std::vector<double>& e) {
            std::vector<Complex> r(a.size());
            for (int m = 0; m < nm; ++m) {
                r[m] = e[m] * a[m];
                r[nm + m] = e[m] * a[nm + m];
            }
            return r;
        };
        const auto k1 = rhs_nonlinear(s.u);
        std::vector<Complex> tmp(2 * nm);
        for (int m = 0; m < 2 * nm; ++m) tmp[m] = s.u[m] + 0.5 * h * k1[m];
        const auto k2 = rhs_nonlinear(scaled(tmp, eh));
        const auto ue_half = scaled(s.u, eh);
        for (int m = 0; m < 2 * nm; ++m) tmp[m] = ue_half[m] + 0.5 * h * k2[m];
        const auto k3 = rhs_nonlinear(tmp);
        const auto ue_full = scaled(s.u, ef);
        const auto k3e = scaled(k3, eh);
        for (int m = 0; m < 2 * nm; ++m) tmp[m] = ue_full[m] + h * k3e[m];
        const auto k4 = rhs_nonlinear(tmp);

        NsSpecState out;
        out.t = s.t + h;
        out.u.resize(2 * nm);
        const auto k1e = scaled(k1, ef);
        const auto k2e = scaled(k2, eh);
        for (int m = 0; m < 2 * nm; ++m)
            out.u[m] = ue_full[m] + (h / 6.0) * (k1e[m] + 2.0 * (k2e[m] + k3e[m]) + k4[m]);
        project(out.u);
        if (!std::isfinite(spec::l2_sq(grid_, out.u.data()))) {
            throw DivergenceError("reference solver diverged", s.t);
        }
        return out;
    }

    NsSpecState step(const NsSpecState& s) const { return step(s, cfg_.dt); }

    void project(std::vector<Complex>& u) const {
        const int nm = grid_.nmodes();
        for (int m = 0; m < nm; ++m) {
            const double g1 = mt_.g1[m], g2 = mt_.g2[m];
            const double gg = g1 * g1 + g2 * g2;
            if (gg == 0.0) continue;
            const Complex kv = (g1 * u[m] + g2 * u[nm + m]) / gg;
            u[m] -= g1 * kv;
            u[nm + m] -= g2 * kv;
        }
    }

    void dealias_state(std::vector<Complex>& u) const {
        const int nm = grid_.nmodes();
        for (int m = 0; m < nm; ++m)
            if (!mt_.keep[m]) {
                u[m] = 0.0;
                u[nm + m] = 0.0;
            }
    }

    VectorField velocity_field(const NsSpecState& s) const {
        return VectorField::from_coef(grid_, s.u);
    }

  private:
    double symbol_ksq(int m) const {
        // full -Lap symbol; mt_ carries the Nyquist-zeroed first-derivative
        // factors, the viscous weight wants the plain |2 pi k|^2
        const int n = grid_.n();
        const int i = m / (n / 2 + 1), j = m % (n / 2 + 1);
        const double a1 = kTwoPi * grid_.k1(i), a2 = kTwoPi * grid_.k2(j);
        return a1 * a1 + a2 * a2;
    }

    NsSolverConfig cfg_;
    TorusGrid grid_;
    ModeTable mt_;
    std::vector<double> e_half_, e_full_;
};

// -Lap p = div div (u x u), zero mean.
inline std::vector<Complex> ns_pressure_spec(const TorusGrid& grid, const ModeTable& mt,
                                             const std::vector<Complex>& u) {
    const int nm = grid.nmodes();
    std::vector<Complex> s(static_cast<size_t>(3) * nm);
    spec::outer_sym_dealiased(grid, mt, u.data(), u.data(), s.data());
    std::vector<Complex> p(nm);
    for (int m = 0; m < nm; ++m) {
        const double g1 = mt.g1[m], g2 = mt.g2[m];
        const double gg = g1 * g1 + g2 * g2;
        if (gg == 0.0) {
            p[m] = 0.0;
            continue;
        }
        // -Lap p = div div S  =>  |g|^2 phat = (div div S)^
        const Complex dd = -(g1 * g1 * s[m] + 2.0 * g1 * g2 * s[nm + m] + g2 * g2 * s[2 * nm + m]);
        p[m] = dd / gg;
    }
    return p;
}

inline ScalarField ns_pressure(const VectorField& u) {
    const TorusGrid& grid = u.grid();
    ModeTable mt(grid);
    std::vector<Complex> uh(u.raw_coef().begin(), u.raw_coef().end());
    return ScalarField::from_coef(grid, ns_pressure_spec(grid, mt, uh));
}

struct NsDiagnosticsRow {
    double t = 0.0;
    double energy = 0.0;   // kinetic energy |u|^2 / 2
    double max_div = 0.0;  // Linf of div u on the grid
};

struct NsRunResult {
    std::vector<NsDiagnosticsRow> diagnostics;
    double t_final = 0.0;
};

// Advance to T, appending every cadence-spaced velocity spectrum to traj.
inline NsRunResult ns_run(const NsSolver& solver, const VectorField& u0, double T,
                          double cadence, NsTrajectory& traj) {
    const TorusGrid& grid = solver.grid();
    ModeTable mt(grid);
    const int per = detail::exact_ratio(cadence, solver.config().dt, "sample cadence / dt");
    const int nsamp = detail::exact_ratio(T, cadence, "T / cadence");
    NsSpecState s = solver.make_state(u0);
    auto record = [&](const NsSpecState& st) {
        traj.push(st.u);
        NsDiagnosticsRow row;
        row.t = st.t;
        row.energy = 0.5 * spec::l2_sq(grid, st.u.data()) +
                     0.5 * spec::l2_sq(grid, st.u.data() + grid.nmodes());
        std::vector<Complex> div(grid.nmodes());
        const Complex I(0.0, 1.0);
        for (int m = 0; m < grid.nmodes(); ++m)
            div[m] = I * (mt.g1[m] * st.u[m] + mt.g2[m] * st.u[grid.nmodes() + m]);
        row.max_div = spec::max_abs(grid, div.data());
        return row;
    };
    NsRunResult result;
    result.diagnostics.push_back(record(s));
    for (int samp = 1; samp <= nsamp; ++samp) {
        for (int k = 0; k < per; ++k) {
            s = solver.step(s);
            const double uinf = std::max(spec::max_abs(grid, s.u.data()),
                                         spec::max_abs(grid, s.u.data() + grid.nmodes()));
            if (uinf > solver.config().blowup_threshold)
                throw DivergenceError("reference velocity exceeded blow-up threshold", s.t);
        }
        s.t = cadence * samp;  // re-anchor to the exact sample time
        result.diagnostics.push_back(record(s));
    }
    result.t_final = s.t;
    return result;
}

struct NsTimeDerivatives {
    ScalarField dp;       // d/dt p
    TensorField dU;       // d/dt (u x u - grad u)
    VectorField dgradp;   // d/dt grad p
    ScalarField d2p;      // d^2/dt^2 p, centered difference over 2 dt
};

// First derivatives by substituting the equations (no differencing); the
// second pressure derivative by a centered difference of the recovered
// pressure one step forward and backward.
inline NsTimeDerivatives ns_time_derivatives(const NsSolver& solver, const NsSpecState& s) {
    const TorusGrid& grid = solver.grid();
    ModeTable mt(grid);
    const int nm = grid.nmodes();
    const double fric = solver.config().friction ? 1.0 : 0.0;

    // full right-hand side a = N(u) + Lap u (- u)
    std::vector<Complex> a = solver.rhs_nonlinear(s.u);
    for (int i = 0; i < grid.n(); ++i)
        for (int j = 0; j <= grid.n() / 2; ++j) {
            const int m = grid.mode(i, j);
            const double a1 = kTwoPi * grid.k1(i), a2 = kTwoPi * grid.k2(j);
            const double lam = -(a1 * a1 + a2 * a2) - fric;
            a[m] += lam * s.u[m];
            a[nm + m] += lam * s.u[nm + m];
        }

    // dS = dealias(a x u + u x a)
    std::vector<Complex> ds(static_cast<size_t>(3) * nm);
    spec::outer_sym_dealiased(grid, mt, a.data(), s.u.data(), ds.data());
    for (auto& z : ds) z *= 2.0;  // symmetrized product already averages

    NsTimeDerivatives out;

    std::vector<Complex> dp(nm);
    for (int m = 0; m < nm; ++m) {
        const double g1 = mt.g1[m], g2 = mt.g2[m];
        const double gg = g1 * g1 + g2 * g2;
        if (gg == 0.0) {
            dp[m] = 0.0;
            continue;
        }
        const Complex dd =
            -(g1 * g1 * ds[m] + 2.0 * g1 * g2 * ds[nm + m] + g2 * g2 * ds[2 * nm + m]);
        dp[m] = dd / gg;
    }
    out.dp = ScalarField::from_coef(grid, dp);
    out.dgradp = gradient(out.dp);

    // dU = dS - grad_vec a
    std::vector<Complex> dU(static_cast<size_t>(4) * nm);
    const Complex I(0.0, 1.0);
    for (int m = 0; m < nm; ++m) {
        const double g1 = mt.g1[m], g2 = mt.g2[m];
        dU[m] = ds[m] - I * g1 * a[m];
        dU[nm + m] = ds[nm + m] - I * g1 * a[nm + m];
        dU[2 * nm + m] = ds[nm + m] - I * g2 * a[m];
        dU[3 * nm + m] = ds[2 * nm + m] - I * g2 * a[nm + m];
    }
    out.dU = TensorField::from_coef(grid, dU);

    // the backward step multiplies in-band rounding noise by
    // e^{4 pi^2 |k|^2 h}; cap h so that stays harmless
    const double h = std::min(solver.config().dt, 2.5 / (grid.n() * grid.n()));
    const auto fwd = solver.step(s, h);
    const auto bwd = solver.step(s, -h);
    const auto pf = ns_pressure_spec(grid, mt, fwd.u);
    const auto pb = ns_pressure_spec(grid, mt, bwd.u);
    const auto p0 = ns_pressure_spec(grid, mt, s.u);
    std::vector<Complex> d2p(nm);
    for (int m = 0; m < nm; ++m) d2p[m] = (pf[m] - 2.0 * p0[m] + pb[m]) / (h * h);
    out.d2p = ScalarField::from_coef(grid, d2p);
    return out;
}

}  // namespace relaxflow

#pragma once

// Intermediate linear system: same hyperbolic left-hand side as the
// relaxation system, but the flux source is the reference tensor
// u_ref x u_ref sampled from a trajectory, so the system is linear in its
// own unknowns. Also the auxiliary pressure quantities
//   f = delta d/dt p' + p' - p_ref,   g = sqrt(eps delta) d/dt grad p',
//   E_fg = eps |df/dt|^2 + |grad f|^2 + |g|^2,
// the third-order pressure ODE residual
//   eps delta d^3t p' - (eps+delta) dt Lap p' + eps d^2t p' - Lap(p'-p_ref),
// and the vorticity / initial-layer variables (xi, X). Time derivatives of
// p' substitute the equations exactly (dt p' = -div u'/eps,
// d2t p' = (div div U' + Lap p')/eps); only d3t and df/dt use differences.

#include <vector>

#include "relaxflow/ns_solver.hpp"
#include "relaxflow/relax_solver.hpp"

namespace relaxflow {

class LinearSolver {
  public:
    LinearSolver(const TorusGrid& grid, const RelaxParams& params, double dt,
                 const NsTrajectory& forcing)
        : core_(grid, params, dt, detail7::ForcedSource{&forcing}) {
        if (forcing.grid() != grid) throw std::invalid_argument("forcing trajectory grid mismatch");
    }

    const TorusGrid& grid() const { return core_.grid(); }
    double dt() const { return core_.dt(); }

    SpectralState7 step(const SpectralState7& s) const {
        std::vector<Complex> y;
        detail7::plain_to_twisted(core_.grid(), s.comp, y);
        core_.step(y, s.t, false);
        SpectralState7 out;
        out.t = s.t + core_.dt();
        detail7::twisted_to_plain(core_.grid(), y, out.comp);
        return out;
    }

    StateSeries run(const SystemState& initial, const RelaxRunConfig& cfg) const {
        return run_hyper7(core_, initial, cfg);
    }

  private:
    Hyper7Solver<detail7::ForcedSource> core_;
};

inline StateSeries linear_run(const SystemState& initial, const RelaxParams& params,
                              const NsTrajectory& forcing, RelaxRunConfig cfg) {
    if (cfg.dt <= 0.0) cfg.dt = default_relax_dt(params);
    if (!forcing.covers(0.0) || !forcing.covers(cfg.T))
        throw std::invalid_argument("forcing trajectory does not cover [0, T]");
    LinearSolver solver(initial.grid(), params, cfg.dt, forcing);
    return solver.run(initial, cfg);
}

namespace detail7 {

// dt p' = -(1/eps) div u', spectrally, from a plain snapshot.
inline std::vector<Complex> dtp_spec(const TorusGrid& grid, const ModeTable& mt,
                                     const SpectralState7& s, double epsilon) {
    const int nm = grid.nmodes();
    std::vector<Complex> out(nm);
    const Complex I(0.0, 1.0);
    for (int m = 0; m < nm; ++m)
        out[m] = -I * (mt.g1[m] * s.comp[nm + m] + mt.g2[m] * s.comp[2 * nm + m]) / epsilon;
    return out;
}

// d2t p' = (div div U' + Lap p') / eps, spectrally.
inline std::vector<Complex> d2tp_spec(const TorusGrid& grid, const ModeTable& mt,
                                      const SpectralState7& s, double epsilon) {
    const int nm = grid.nmodes();
    std::vector<Complex> out(nm);
    for (int i = 0; i < grid.n(); ++i)
        for (int j = 0; j <= grid.n() / 2; ++j) {
            const int m = grid.mode(i, j);
            const double g1 = mt.g1[m], g2 = mt.g2[m];
            const double a1 = kTwoPi * grid.k1(i), a2 = kTwoPi * grid.k2(j);
            const Complex divdivU = -(g1 * g1 * s.comp[3 * nm + m] +
                                      g1 * g2 * (s.comp[4 * nm + m] + s.comp[5 * nm + m]) +
                                      g2 * g2 * s.comp[6 * nm + m]);
            const Complex lap_p = -(a1 * a1 + a2 * a2) * s.comp[m];
            out[m] = (divdivU + lap_p) / epsilon;
        }
    return out;
}

}  // namespace detail7

struct PressureAux {
    double t = 0.0;
    ScalarField f;
    VectorField g;
    double e_fg = 0.0;
};

inline std::vector<PressureAux> pressure_aux(const StateSeries& series,
                                             const NsTrajectory& ns_traj,
                                             const RelaxParams& params) {
    const TorusGrid& grid = series.grid;
    if (ns_traj.grid() != grid) throw std::invalid_argument("pressure_aux grid mismatch");
    const ModeTable mt(grid);
    const int nm = grid.nmodes();
    const int n = series.count();
    if (n < 3) throw std::invalid_argument("pressure_aux needs at least 3 snapshots");

    std::vector<std::vector<Complex>> f_spec(n);
    std::vector<PressureAux> out(n);
    for (int i = 0; i < n; ++i) {
        const auto& s = series.at(i);
        const auto dtp = detail7::dtp_spec(grid, mt, s, params.epsilon);
        const auto u_ref = ns_traj.u_hat_at(s.t);
        const auto p_ref = ns_pressure_spec(grid, mt, u_ref);
        std::vector<Complex> f(nm), g(2 * nm);
        const Complex I(0.0, 1.0);
        const double sed = std::sqrt(params.epsilon * params.delta);
        for (int m = 0; m < nm; ++m) {
            f[m] = params.delta * dtp[m] + s.comp[m] - p_ref[m];
            g[m] = sed * I * mt.g1[m] * dtp[m];
            g[nm + m] = sed * I * mt.g2[m] * dtp[m];
        }
        out[i].t = s.t;
        out[i].g = VectorField::from_coef(grid, g);
        f_spec[i] = std::move(f);
    }
    // df/dt by second-order differences on the snapshot grid
    const double h = series.count() > 1 ? series.at(1).t - series.at(0).t : 1.0;
    for (int i = 0; i < n; ++i) {
        std::vector<Complex> dtf(nm);
        for (int m = 0; m < nm; ++m) {
            if (i == 0)
                dtf[m] = (-3.0 * f_spec[0][m] + 4.0 * f_spec[1][m] - f_spec[2][m]) / (2.0 * h);
            else if (i == n - 1)
                dtf[m] = (3.0 * f_spec[n - 1][m] - 4.0 * f_spec[n - 2][m] + f_spec[n - 3][m]) /
                         (2.0 * h);
            else
                dtf[m] = (f_spec[i + 1][m] - f_spec[i - 1][m]) / (2.0 * h);
        }
        out[i].f = ScalarField::from_coef(grid, f_spec[i]);
        const double dtf_l2sq = spec::l2_sq(grid, dtf.data());
        out[i].e_fg = params.epsilon * dtf_l2sq + norms::grad_l2_sq(out[i].f) +
                      norms::l2_sq(out[i].g);
    }
    return out;
}

struct PressureOdeResidualRow {
    double t = 0.0;
    double residual_l2 = 0.0;
};

// Discrete residual of the third-order pressure equation on the snapshot
// series, optionally subsampled by an integer stride. The two interior
// derivatives are substituted exactly; only d^3t p' uses the 5-point
// centered stencil, so two rows are skipped at each end.
inline std::vector<PressureOdeResidualRow> pressure_ode_residual(const StateSeries& series,
                                                                 const NsTrajectory& ns_traj,
                                                                 const RelaxParams& params,
                                                                 int stride = 1) {
    const TorusGrid& grid = series.grid;
    const ModeTable mt(grid);
    const int nm = grid.nmodes();
    if (stride < 1) throw std::invalid_argument("stride must be >= 1");
    const int count = (series.count() - 1) / stride + 1;
    if (count < 5) throw std::invalid_argument("pressure_ode_residual needs >= 5 samples");
    const double h = (series.at(stride).t - series.at(0).t);

    std::vector<PressureOdeResidualRow> out;
    for (int i = 2; i < count - 2; ++i) {
        const auto& s = series.at(i * stride);
        std::vector<Complex> d3p(nm, Complex(0.0, 0.0));
        const int idx[5] = {(i - 2) * stride, (i - 1) * stride, i * stride, (i + 1) * stride,
                            (i + 2) * stride};
        const double w[5] = {-1.0, 2.0, 0.0, -2.0, 1.0};
        for (int a = 0; a < 5; ++a) {
            if (w[a] == 0.0) continue;
            const auto& sp = series.at(idx[a]);
            for (int m = 0; m < nm; ++m) d3p[m] += w[a] * sp.comp[m];
        }
        for (int m = 0; m < nm; ++m) d3p[m] /= 2.0 * h * h * h;

        const auto dtp = detail7::dtp_spec(grid, mt, s, params.epsilon);
        const auto d2tp = detail7::d2tp_spec(grid, mt, s, params.epsilon);
        const auto u_ref = ns_traj.u_hat_at(s.t);
        const auto p_ref = ns_pressure_spec(grid, mt, u_ref);

        std::vector<Complex> resid(nm);
        for (int ii = 0; ii < grid.n(); ++ii)
            for (int jj = 0; jj <= grid.n() / 2; ++jj) {
                const int m = grid.mode(ii, jj);
                const double a1 = kTwoPi * grid.k1(ii), a2 = kTwoPi * grid.k2(jj);
                const double lap = -(a1 * a1 + a2 * a2);
                resid[m] = params.epsilon * params.delta * d3p[m] -
                           (params.epsilon + params.delta) * lap * dtp[m] +
                           params.epsilon * d2tp[m] - lap * (s.comp[m] - p_ref[m]);
            }
        out.push_back({s.t, std::sqrt(spec::l2_sq(grid, resid.data()))});
    }
    return out;
}

struct VorticityAux {
    double t = 0.0;
    ScalarField xi;       // (omega' - omega_ref)/sqrt(delta)
    VectorField X;        // curl-flux gap with the initial layer removed
    double curl_gap_l2 = 0.0;   // |curl(u' - u_ref)|_L2
    double gap_ratio = 0.0;     // curl_gap / (eps + delta)
};

inline std::vector<VorticityAux> vorticity_aux(const StateSeries& series,
                                               const NsTrajectory& ns_traj,
                                               const RelaxParams& params) {
    const TorusGrid& grid = series.grid;
    const ModeTable mt(grid);
    const int nm = grid.nmodes();
    const Complex I(0.0, 1.0);

    auto curl_state = [&](const SpectralState7& s, std::vector<Complex>& omega,
                          std::vector<Complex>& Omega) {
        omega.resize(nm);
        Omega.resize(2 * nm);
        for (int m = 0; m < nm; ++m) {
            const double g1 = mt.g1[m], g2 = mt.g2[m];
            omega[m] = I * (g1 * s.comp[2 * nm + m] - g2 * s.comp[nm + m]);
            Omega[m] = I * (g1 * s.comp[4 * nm + m] - g2 * s.comp[3 * nm + m]);
            Omega[nm + m] = I * (g1 * s.comp[6 * nm + m] - g2 * s.comp[5 * nm + m]);
        }
    };
    auto curl_ref = [&](double t, std::vector<Complex>& omega, std::vector<Complex>& Omega) {
        const auto u = ns_traj.u_hat_at(t);
        std::vector<Complex> s3(static_cast<size_t>(3) * nm);
        spec::outer_sym_dealiased(grid, mt, u.data(), u.data(), s3.data());
        omega.resize(nm);
        Omega.resize(2 * nm);
        for (int m = 0; m < nm; ++m) {
            const double g1 = mt.g1[m], g2 = mt.g2[m];
            omega[m] = I * (g1 * u[nm + m] - g2 * u[m]);
            // U_ref = S - grad_vec u: rows (S11 - i g1 u1, S12 - i g1 u2;
            //                               S12 - i g2 u1, S22 - i g2 u2)
            const Complex U11 = s3[m] - I * g1 * u[m];
            const Complex U12 = s3[nm + m] - I * g1 * u[nm + m];
            const Complex U21 = s3[nm + m] - I * g2 * u[m];
            const Complex U22 = s3[2 * nm + m] - I * g2 * u[nm + m];
            Omega[m] = I * (g1 * U12 - g2 * U11);
            Omega[nm + m] = I * (g1 * U22 - g2 * U21);
        }
    };

    std::vector<Complex> om0, Om0, omr0, Omr0;
    curl_state(series.at(0), om0, Om0);
    curl_ref(series.at(0).t, omr0, Omr0);
    std::vector<Complex> gap0(2 * nm);
    for (int m = 0; m < 2 * nm; ++m) gap0[m] = Om0[m] - Omr0[m];

    std::vector<VorticityAux> out(series.count());
    for (int i = 0; i < series.count(); ++i) {
        const auto& s = series.at(i);
        std::vector<Complex> om, Om, omr, Omr;
        curl_state(s, om, Om);
        curl_ref(s.t, omr, Omr);
        std::vector<Complex> xi(nm), X(2 * nm);
        const double layer = std::exp(-s.t / params.delta);
        for (int m = 0; m < nm; ++m) xi[m] = (om[m] - omr[m]) / std::sqrt(params.delta);
        for (int m = 0; m < 2 * nm; ++m) X[m] = Om[m] - Omr[m] - layer * gap0[m];
        VorticityAux row;
        row.t = s.t;
        row.curl_gap_l2 = std::sqrt(params.delta * spec::l2_sq(grid, xi.data()));
        row.gap_ratio = row.curl_gap_l2 / (params.epsilon + params.delta);
        row.xi = ScalarField::from_coef(grid, std::move(xi));
        row.X = VectorField::from_coef(grid, std::move(X));
        out[i] = std::move(row);
    }
    return out;
}

struct DivergenceBoundRow {
    double t = 0.0;
    double div_l2 = 0.0;
    double ratio = 0.0;  // div_l2 / (eps + delta)
};

inline std::vector<DivergenceBoundRow> divergence_bound(const StateSeries& series,
                                                        const RelaxParams& params) {
    const TorusGrid& grid = series.grid;
    const ModeTable mt(grid);
    const int nm = grid.nmodes();
    const Complex I(0.0, 1.0);
    std::vector<DivergenceBoundRow> out(series.count());
    for (int i = 0; i < series.count(); ++i) {
        const auto& s = series.at(i);
        std::vector<Complex> div(nm);
        for (int m = 0; m < nm; ++m)
            div[m] = I * (mt.g1[m] * s.comp[nm + m] + mt.g2[m] * s.comp[2 * nm + m]);
        out[i].t = s.t;
        out[i].div_l2 = std::sqrt(spec::l2_sq(grid, div.data()));
        out[i].ratio = out[i].div_l2 / (params.epsilon + params.delta);
    }
    return out;
}

}  // namespace relaxflow

#pragma once

// Solver for the two-parameter hyperbolic relaxation system
//   eps dp/dt + div u = 0
//   du/dt + div U + grad p = 0            (-u with friction)
//   delta dU/dt + grad u = u x u - U
// and, with a forced source, for the intermediate linear system driven by
// the reference flux. Per Fourier mode the linear part is a 7x7 system
// d/dt What = -A(k) What + N; the stepper applies the exact propagator
// e^{-A dt} and integrates the source with the exponential trapezoidal rule
//   Y1    = E Y_n + h phi1 N(t_n)
//   Y_n+1 = Y1 + h phi2 (N(t_n + h, Y1) - N(t_n)),
// second order and unconditionally stable in (eps, delta).
//
// A(k) is real in the twisted variables Y = (phat, i uhat, Uhat). The
// matrix exponentials are evaluated on the symmetrized generator (the
// (sqrt(eps) p, u, sqrt(delta) U) rescaling) whose norm sits at the wave
// speed scale, then conjugated back; that keeps the scaling-and-squaring
// depth, and with it the rounding amplification, minimal.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <tuple>
#include <vector>

#include "relaxflow/expm.hpp"
#include "relaxflow/model.hpp"
#include "relaxflow/modes.hpp"
#include "relaxflow/trajectory.hpp"

namespace relaxflow {

using Mat7 = Eigen::Matrix<double, 7, 7>;

// Generator A(k) of the linearized system in the twisted variables, with
// derivative factors (g1, g2) = 2 pi k (Nyquist zeroed upstream):
// d/dt Y = -A Y + N. Component order (p, u1, u2, U11, U12, U21, U22).
inline Mat7 linear_symbol(double g1, double g2, const RelaxParams& params) {
    const double g[2] = {g1, g2};
    Mat7 A = Mat7::Zero();
    for (int i = 0; i < 2; ++i) {
        A(0, 1 + i) = g[i] / params.epsilon;
        A(1 + i, 0) = -g[i];
        for (int j = 0; j < 2; ++j) {
            A(1 + i, 3 + 2 * j + i) = -g[j];              // -div U
            A(3 + 2 * i + j, 1 + j) = g[i] / params.delta;  // grad u / delta
        }
        if (params.friction) A(1 + i, 1 + i) = 1.0;
    }
    for (int c = 3; c < 7; ++c) A(c, c) = 1.0 / params.delta;
    return A;
}

inline Mat7 linear_symbol(const TorusGrid& grid, int i, int j, const RelaxParams& params) {
    return linear_symbol(grid.deriv1(i), grid.deriv2(j), params);
}

// S A S^{-1} with S = diag(sqrt(eps), 1, 1, sqrt(delta) x4): antisymmetric
// wave part plus nonnegative relaxation diagonal.
inline Mat7 symmetrized_symbol(double g1, double g2, const RelaxParams& params) {
    const Mat7 A = linear_symbol(g1, g2, params);
    Eigen::Matrix<double, 7, 1> s;
    const double se = std::sqrt(params.epsilon), sd = std::sqrt(params.delta);
    s << se, 1, 1, sd, sd, sd, sd;
    Mat7 out;
    for (int r = 0; r < 7; ++r)
        for (int c = 0; c < 7; ++c) out(r, c) = A(r, c) * s(r) / s(c);
    return out;
}

// Exact per-mode propagators for one (params, dt): row-major 7x7 blocks
// E = e^{-A dt}, P1 = dt phi1(-A dt), P2 = dt phi2(-A dt), plain basis.
class PropagatorTable {
  public:
    PropagatorTable(const TorusGrid& grid, const RelaxParams& params, double dt)
        : grid_(grid), params_(params), dt_(dt) {
        params.validate();
        if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
        const ModeTable mt(grid);
        const int nm = grid.nmodes();
        data_.resize(static_cast<size_t>(nm) * 3 * 49);
        Eigen::Matrix<double, 7, 1> s;
        const double se = std::sqrt(params.epsilon), sd = std::sqrt(params.delta);
        s << se, 1, 1, sd, sd, sd, sd;
        for (int m = 0; m < nm; ++m) {
            const Mat7 G = -dt * symmetrized_symbol(mt.g1[m], mt.g2[m], params);
            const auto ep = expm_with_phi(G);
            store(m, 0, ep.e, s);
            store(m, 1, (dt * ep.phi1).eval(), s);
            store(m, 2, (dt * ep.phi2).eval(), s);
        }
    }

    const TorusGrid& grid() const { return grid_; }
    const RelaxParams& params() const { return params_; }
    double dt() const { return dt_; }

    const double* block(int mode, int which) const {
        return data_.data() + (static_cast<size_t>(mode) * 3 + which) * 49;
    }

    // y_out = M y_in on a twisted complex 7-vector (real matrix)
    static void apply(const double* M, const Complex* y, Complex* out) {
        for (int r = 0; r < 7; ++r) {
            double re = 0.0, im = 0.0;
            for (int c = 0; c < 7; ++c) {
                re += M[7 * r + c] * y[c].real();
                im += M[7 * r + c] * y[c].imag();
            }
            out[r] = Complex(re, im);
        }
    }

    static std::shared_ptr<const PropagatorTable> shared(const TorusGrid& grid,
                                                         const RelaxParams& params, double dt) {
        using Key = std::tuple<int, double, double, double, bool>;
        static std::mutex mu;
        static std::map<Key, std::weak_ptr<const PropagatorTable>> registry;
        const Key key{grid.n(), params.epsilon, params.delta, dt, params.friction};
        std::lock_guard<std::mutex> lock(mu);
        auto& slot = registry[key];
        if (auto p = slot.lock()) return p;
        auto p = std::make_shared<const PropagatorTable>(grid, params, dt);
        slot = p;
        return p;
    }

  private:
    void store(int mode, int which, const Mat7& sym_block, const Eigen::Matrix<double, 7, 1>& s) {
        double* dst = data_.data() + (static_cast<size_t>(mode) * 3 + which) * 49;
        for (int r = 0; r < 7; ++r)
            for (int c = 0; c < 7; ++c) dst[7 * r + c] = sym_block(r, c) * s(c) / s(r);
    }

    TorusGrid grid_;
    RelaxParams params_;
    double dt_;
    std::vector<double> data_;
};

// Full spectral state of the 7-component system, plain basis (phat, uhat,
// Uhat), component-major. This is the snapshot/diagnostics representation.
struct SpectralState7 {
    double t = 0.0;
    std::vector<Complex> comp;  // 7 * nmodes

    const Complex* p(const TorusGrid& g) const { return comp.data(); }
    const Complex* u(const TorusGrid& g, int i) const { return comp.data() + (1 + i) * g.nmodes(); }
    const Complex* U(const TorusGrid& g, int i, int j) const {
        return comp.data() + (3 + 2 * i + j) * g.nmodes();
    }

    SystemState to_system_state(const TorusGrid& grid) const {
        SystemState s;
        s.t = t;
        const int nm = grid.nmodes();
        s.p = ScalarField::from_coef(grid, {comp.begin(), comp.begin() + nm});
        s.u = VectorField::from_coef(grid, {comp.begin() + nm, comp.begin() + 3 * nm});
        s.U = TensorField::from_coef(grid, {comp.begin() + 3 * nm, comp.begin() + 7 * nm});
        return s;
    }

    static SpectralState7 from_system_state(const TorusGrid& grid, const SystemState& s) {
        if (s.grid() != grid) throw std::invalid_argument("state grid mismatch");
        SpectralState7 out;
        out.t = s.t;
        const int nm = grid.nmodes();
        out.comp.resize(static_cast<size_t>(7) * nm);
        const TensorField U = state_flux(s);
        std::copy(s.p.coef(0), s.p.coef(0) + nm, out.comp.begin());
        for (int c = 0; c < 2; ++c)
            std::copy(s.u.coef(c), s.u.coef(c) + nm, out.comp.begin() + (1 + c) * nm);
        for (int c = 0; c < 4; ++c)
            std::copy(U.coef(c), U.coef(c) + nm, out.comp.begin() + (3 + c) * nm);
        return out;
    }
};

struct StateSeries {
    TorusGrid grid;
    RelaxParams params;
    std::vector<SpectralState7> snapshots;
    std::optional<double> blowup_t;  // set when the run aborted

    const SpectralState7& at(int i) const { return snapshots[i]; }
    int count() const { return static_cast<int>(snapshots.size()); }
};

struct RelaxRunConfig {
    double T = 0.25;
    double dt = 1e-3;       // <= 0 picks the default min(1e-3, delta/4)
    double dt_out = 1e-3;
    double blowup_threshold = 1e6;
    bool disable_nonlinearity = false;
};

inline double default_relax_dt(const RelaxParams& params) {
    return std::min(1e-3, params.delta / 4.0);
}

namespace detail7 {

// Working state: twisted mode-major y (7 entries per mode).
inline void plain_to_twisted(const TorusGrid& grid, const std::vector<Complex>& comp,
                             std::vector<Complex>& y) {
    const int nm = grid.nmodes();
    y.resize(static_cast<size_t>(7) * nm);
    for (int m = 0; m < nm; ++m) {
        y[7 * m + 0] = comp[m];
        for (int c = 1; c <= 2; ++c) {
            const Complex z = comp[c * nm + m];
            y[7 * m + c] = Complex(-z.imag(), z.real());  // i * z
        }
        for (int c = 3; c < 7; ++c) y[7 * m + c] = comp[c * nm + m];
    }
}

inline void twisted_to_plain(const TorusGrid& grid, const std::vector<Complex>& y,
                             std::vector<Complex>& comp) {
    const int nm = grid.nmodes();
    comp.resize(static_cast<size_t>(7) * nm);
    for (int m = 0; m < nm; ++m) {
        comp[m] = y[7 * m + 0];
        for (int c = 1; c <= 2; ++c) {
            const Complex z = y[7 * m + c];
            comp[c * nm + m] = Complex(z.imag(), -z.real());  // -i * z
        }
        for (int c = 3; c < 7; ++c) comp[c * nm + m] = y[7 * m + c];
    }
}

// u spectrum (component-major, 2*nm) out of a twisted state.
inline void velocity_from_twisted(const TorusGrid& grid, const std::vector<Complex>& y,
                                  std::vector<Complex>& u) {
    const int nm = grid.nmodes();
    u.resize(static_cast<size_t>(2) * nm);
    for (int m = 0; m < nm; ++m)
        for (int c = 0; c < 2; ++c) {
            const Complex z = y[7 * m + 1 + c];
            u[c * nm + m] = Complex(z.imag(), -z.real());
        }
}

}  // namespace detail7

// Exponential integrator core shared by the relaxation and intermediate
// linear systems; Source supplies the dealiased tensor source spectrum
// (S11, S12, S22 stacked) at a given time and state.
template <typename Source>
class Hyper7Solver {
  public:
    Hyper7Solver(const TorusGrid& grid, const RelaxParams& params, double dt, Source source)
        : grid_(grid),
          mt_(grid),
          params_(params),
          dt_(dt),
          source_(std::move(source)),
          table_(PropagatorTable::shared(grid, params, dt)) {}

    const TorusGrid& grid() const { return grid_; }
    double dt() const { return dt_; }
    const RelaxParams& params() const { return params_; }

    // One ETD2RK step of the twisted state in place.
    void step(std::vector<Complex>& y, double t, bool disable_source) const {
        const int nm = grid_.nmodes();
        std::vector<Complex> n0, y1(static_cast<size_t>(7) * nm);
        if (!disable_source) n0 = source_(*this, y, t);
        Complex tmp1[7], tmp2[7];
        for (int m = 0; m < nm; ++m) {
            PropagatorTable::apply(table_->block(m, 0), y.data() + 7 * m, tmp1);
            if (!disable_source) {
                PropagatorTable::apply(table_->block(m, 1), n0.data() + 7 * m, tmp2);
                for (int c = 0; c < 7; ++c) y1[7 * m + c] = tmp1[c] + tmp2[c];
            } else {
                for (int c = 0; c < 7; ++c) y1[7 * m + c] = tmp1[c];
            }
        }
        if (disable_source) {
            y.swap(y1);
            return;
        }
        const auto n1 = source_(*this, y1, t + dt_);
        for (int m = 0; m < nm; ++m) {
            Complex dn[7];
            for (int c = 0; c < 7; ++c) dn[c] = n1[7 * m + c] - n0[7 * m + c];
            PropagatorTable::apply(table_->block(m, 2), dn, tmp2);
            for (int c = 0; c < 7; ++c) y[7 * m + c] = y1[7 * m + c] + tmp2[c];
        }
    }

    // Dealiased tensor source from a velocity spectrum, scaled by 1/delta
    // and scattered into the U slots of a twisted mode-major array.
    std::vector<Complex> tensor_source(const std::vector<Complex>& u_hat) const {
        const int nm = grid_.nmodes();
        std::vector<Complex> s(static_cast<size_t>(3) * nm);
        spec::outer_sym_dealiased(grid_, mt_, u_hat.data(), u_hat.data(), s.data());
        return scatter_source(s);
    }

    std::vector<Complex> scatter_source(const std::vector<Complex>& s3) const {
        const int nm = grid_.nmodes();
        std::vector<Complex> n(static_cast<size_t>(7) * nm, Complex(0.0, 0.0));
        const double inv_delta = 1.0 / params_.delta;
        for (int m = 0; m < nm; ++m) {
            n[7 * m + 3] = inv_delta * s3[m];
            n[7 * m + 4] = inv_delta * s3[nm + m];
            n[7 * m + 5] = inv_delta * s3[nm + m];
            n[7 * m + 6] = inv_delta * s3[2 * nm + m];
        }
        return n;
    }

    const ModeTable& mode_table() const { return mt_; }

  private:
    TorusGrid grid_;
    ModeTable mt_;
    RelaxParams params_;
    double dt_;
    Source source_;
    std::shared_ptr<const PropagatorTable> table_;
};

namespace detail7 {

struct SelfSource {
    template <typename Solver>
    std::vector<Complex> operator()(const Solver& solver, const std::vector<Complex>& y,
                                    double) const {
        std::vector<Complex> u;
        velocity_from_twisted(solver.grid(), y, u);
        return solver.tensor_source(u);
    }
};

struct ForcedSource {
    const NsTrajectory* traj = nullptr;
    template <typename Solver>
    std::vector<Complex> operator()(const Solver& solver, const std::vector<Complex>&,
                                    double t) const {
        const auto u = traj->u_hat_at(t);
        return solver.tensor_source(u);
    }
};

}  // namespace detail7

struct RunProgress {
    double t = 0.0;
    double max_u_inf = 0.0;
};

// Shared run loop: advance to T, snapshot every dt_out, stop on blow-up.
template <typename Solver>
StateSeries run_hyper7(const Solver& solver, const SystemState& initial,
                       const RelaxRunConfig& cfg) {
    const TorusGrid& grid = solver.grid();
    const int per = detail::exact_ratio(cfg.dt_out, solver.dt(), "dt_out / dt");
    const int nout = cfg.T > 0.0 ? detail::exact_ratio(cfg.T, cfg.dt_out, "T / dt_out") : 0;

    StateSeries series{grid, solver.params(), {}, std::nullopt};
    auto s0 = SpectralState7::from_system_state(grid, initial);
    std::vector<Complex> y;
    detail7::plain_to_twisted(grid, s0.comp, y);

    auto record = [&](double t) {
        SpectralState7 snap;
        snap.t = t;
        detail7::twisted_to_plain(grid, y, snap.comp);
        series.snapshots.push_back(std::move(snap));
    };
    auto u_inf = [&]() {
        std::vector<Complex> u;
        detail7::velocity_from_twisted(grid, y, u);
        return std::max(spec::max_abs(grid, u.data()), spec::max_abs(grid, u.data() + grid.nmodes()));
    };

    record(0.0);
    for (int out = 1; out <= nout; ++out) {
        for (int k = 0; k < per; ++k) {
            const double t = cfg.dt_out * (out - 1) + solver.dt() * k;
            solver.step(y, t, cfg.disable_nonlinearity);
        }
        // cheap finiteness scan + threshold check once per output sample
        double acc = 0.0;
        for (const Complex& z : y) acc += std::norm(z);
        const double uinf = std::isfinite(acc) ? u_inf() : cfg.blowup_threshold * 2.0;
        if (!std::isfinite(acc) || uinf > cfg.blowup_threshold) {
            series.blowup_t = series.snapshots.back().t;
            return series;
        }
        record(cfg.dt_out * out);
    }
    return series;
}

class RelaxSolver {
  public:
    RelaxSolver(const TorusGrid& grid, const RelaxParams& params, double dt)
        : core_(grid, params, dt, detail7::SelfSource{}) {}

    const TorusGrid& grid() const { return core_.grid(); }
    double dt() const { return core_.dt(); }

    // Single-step interface on full spectral states (diagnostic/test use).
    SpectralState7 step(const SpectralState7& s, bool disable_source = false) const {
        std::vector<Complex> y;
        detail7::plain_to_twisted(core_.grid(), s.comp, y);
        core_.step(y, s.t, disable_source);
        SpectralState7 out;
        out.t = s.t + core_.dt();
        detail7::twisted_to_plain(core_.grid(), y, out.comp);
        return out;
    }

    StateSeries run(const SystemState& initial, const RelaxRunConfig& cfg) const {
        return run_hyper7(core_, initial, cfg);
    }

  private:
    Hyper7Solver<detail7::SelfSource> core_;
};

inline StateSeries relax_run(const SystemState& initial, const RelaxParams& params,
                             RelaxRunConfig cfg) {
    if (cfg.dt <= 0.0) cfg.dt = default_relax_dt(params);
    RelaxSolver solver(initial.grid(), params, cfg.dt);
    return solver.run(initial, cfg);
}

}  // namespace relaxflow

#pragma once

// Domain types shared by the three PDE systems on the torus:
//   reference system        (p, u) with the derived flux U = u x u - grad u
//   relaxation system       (p, u, U) with parameters (epsilon, delta)
//   intermediate linear system (p', u', U') forced by the reference flux
// plus the scaled residual variables W = (q, v, V) the energy estimates use.

#include <cmath>
#include <optional>
#include <stdexcept>

#include "relaxflow/norms.hpp"
#include "relaxflow/operators.hpp"

namespace relaxflow {

struct RelaxParams {
    double epsilon = 1e-2;  // artificial-compressibility parameter
    double delta = 1e-2;    // flux-relaxation parameter
    double a = 1.0;         // energy exponent
    bool friction = false;  // adds -u to the momentum equation

    void validate() const {
        if (!(epsilon > 0.0) || !(delta > 0.0))
            throw std::invalid_argument("relaxation parameters must be positive");
        if (!(a >= 1.0)) throw std::invalid_argument("energy exponent a must be >= 1");
    }
    double mu() const { return std::max(std::sqrt(epsilon), std::sqrt(delta)); }
};

// State of any of the three systems at one time instant. U is absent for
// pure reference states, where the flux is derived on demand.
struct SystemState {
    double t = 0.0;
    ScalarField p;
    VectorField u;
    std::optional<TensorField> U;

    const TorusGrid& grid() const { return u.grid(); }

    void require_same_grid(const SystemState& o) const {
        if (grid() != o.grid()) throw std::invalid_argument("state grid mismatch");
    }
};

// U^NS = u x u - grad u, the equilibrium value of the relaxation flux.
inline TensorField ns_flux(const VectorField& u) {
    return outer_product_dealiased(u, u) - grad_vec(u);
}

inline TensorField state_flux(const SystemState& s) {
    return s.U ? *s.U : ns_flux(s.u);
}

enum class ResidualScaling { unit, mu };

// W = (q, v, V) = (sqrt(eps) dp, du, sqrt(delta) dU) / (1 or mu).
struct ResidualState {
    double t = 0.0;
    ScalarField q;
    VectorField v;
    TensorField V;
    ResidualScaling scaling = ResidualScaling::unit;
    double scale_factor = 1.0;  // the divisor actually applied
};

inline ResidualState residual_from(const SystemState& a, const SystemState& b,
                                   const RelaxParams& params,
                                   ResidualScaling scaling = ResidualScaling::unit) {
    a.require_same_grid(b);
    if (std::abs(a.t - b.t) > 1e-12 * (1.0 + std::abs(a.t)))
        throw std::invalid_argument("residual_from: state time mismatch");
    const double s = scaling == ResidualScaling::mu ? params.mu() : 1.0;
    ResidualState r;
    r.t = a.t;
    r.scaling = scaling;
    r.scale_factor = s;
    r.q = (std::sqrt(params.epsilon) / s) * (a.p - b.p);
    r.v = (1.0 / s) * (a.u - b.u);
    r.V = (std::sqrt(params.delta) / s) * (state_flux(a) - state_flux(b));
    return r;
}

// E(t) = |W|_{L2}^2 + (eps+delta)^a |Delta W|_{L2}^2
inline double energy_l2(const ResidualState& w, const RelaxParams& params) {
    const double wl2 = norms::l2_sq(w.q) + norms::l2_sq(w.v) + norms::l2_sq(w.V);
    const double wlap = norms::hess_l2_sq(w.q) + norms::hess_l2_sq(w.v) + norms::hess_l2_sq(w.V);
    return wl2 + std::pow(params.epsilon + params.delta, params.a) * wlap;
}

// E(t) = |W|_{H1}^2 + (eps+delta)^a |Delta W|_{L2}^2
inline double energy_h1(const ResidualState& w, const RelaxParams& params) {
    const double wh1 = norms::h1_sq(w.q) + norms::h1_sq(w.v) + norms::h1_sq(w.V);
    const double wlap = norms::hess_l2_sq(w.q) + norms::hess_l2_sq(w.v) + norms::hess_l2_sq(w.V);
    return wh1 + std::pow(params.epsilon + params.delta, params.a) * wlap;
}

}  // namespace relaxflow

#pragma once

// Norms used throughout: L2/H1/H2 and the |Delta .| seminorm by Parseval on
// the spectral coefficients, L4 and Linf by quadrature / max on a 2x
// oversampled grid (the fields are band-limited, so oversampling controls
// the quadrature error without symbolic maximization). Multi-component
// fields use the Frobenius pointwise magnitude and root-sum-of-squares
// compound norms.

#include <algorithm>
#include <cmath>

#include "relaxflow/operators.hpp"

namespace relaxflow {
namespace norms {

namespace detail {

template <int NC, typename W>
double parseval_sq(const Field<NC>& f, W&& mode_weight) {
    const TorusGrid& grid = f.grid();
    const int n = grid.n();
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= n / 2; ++j) {
            const int m = grid.mode(i, j);
            double a2 = 0.0;
            for (int c = 0; c < NC; ++c) a2 += std::norm(f.coef(c)[m]);
            acc += grid.weight(j) * mode_weight(grid.k1(i), grid.k2(j)) * a2;
        }
    return acc;
}

}  // namespace detail

template <int NC>
double l2_sq(const Field<NC>& f) {
    return detail::parseval_sq(f, [](int, int) { return 1.0; });
}

// |grad f|_{L2}^2 via the (2 pi |k|)^2 symbol (Nyquist included: the value
// is the Parseval realization of the full Hessian/gradient weight).
template <int NC>
double grad_l2_sq(const Field<NC>& f) {
    return detail::parseval_sq(f, [](int k1, int k2) {
        const double a = kTwoPi * kTwoPi * (static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2);
        return a;
    });
}

// |grad^2 f|_{L2}^2 = |Delta f|_{L2}^2, the (2 pi |k|)^4 weight.
template <int NC>
double hess_l2_sq(const Field<NC>& f) {
    return detail::parseval_sq(f, [](int k1, int k2) {
        const double a = kTwoPi * kTwoPi * (static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2);
        return a * a;
    });
}

template <int NC>
double l2(const Field<NC>& f) {
    return std::sqrt(l2_sq(f));
}
template <int NC>
double grad_l2(const Field<NC>& f) {
    return std::sqrt(grad_l2_sq(f));
}
template <int NC>
double hess_l2(const Field<NC>& f) {
    return std::sqrt(hess_l2_sq(f));
}
template <int NC>
double h1_sq(const Field<NC>& f) {
    return l2_sq(f) + grad_l2_sq(f);
}
template <int NC>
double h1(const Field<NC>& f) {
    return std::sqrt(h1_sq(f));
}
template <int NC>
double h2(const Field<NC>& f) {
    return std::sqrt(l2_sq(f) + grad_l2_sq(f) + hess_l2_sq(f));
}

template <int NC>
double l4(const Field<NC>& f) {
    const Field<NC> g = resample(f, 2 * f.grid().n());
    const int np = g.grid().npoints();
    double acc = 0.0;
    for (int m = 0; m < np; ++m) {
        double mag2 = 0.0;
        for (int c = 0; c < NC; ++c) mag2 += g.values(c)[m] * g.values(c)[m];
        acc += mag2 * mag2;
    }
    return std::pow(acc / np, 0.25);
}

namespace detail {

struct PointJet {
    double f = 0, fx = 0, fy = 0, fxx = 0, fxy = 0, fyy = 0;
};

// Value and first/second derivatives of the trigonometric interpolant of
// component c at an arbitrary point. Used only for the Linf argmax polish.
template <int NC>
PointJet eval_jet(const Field<NC>& fld, int c, double x1, double x2) {
    const TorusGrid& grid = fld.grid();
    const int n = grid.n();
    std::vector<Complex> row(n), col(n / 2 + 1);
    for (int i = 0; i < n; ++i)
        row[i] = std::polar(1.0, kTwoPi * grid.k1(i) * x1);
    for (int j = 0; j <= n / 2; ++j)
        col[j] = std::polar(1.0, kTwoPi * grid.k2(j) * x2);
    PointJet out;
    for (int i = 0; i < n; ++i) {
        const double g1 = kTwoPi * grid.k1(i);
        for (int j = 0; j <= n / 2; ++j) {
            const double g2 = kTwoPi * grid.k2(j);
            const Complex e = row[i] * col[j];
            // weight-2 modes stand for a conjugate pair, weight-1 columns
            // contain both partners explicitly; Re(.) sums both correctly
            const Complex a = fld.coef(c)[grid.mode(i, j)] * grid.weight(j);
            const double re = (a * e).real(), im = (a * e).imag();
            out.f += re;
            out.fx += -g1 * im;
            out.fy += -g2 * im;
            out.fxx += -g1 * g1 * re;
            out.fxy += -g1 * g2 * re;
            out.fyy += -g2 * g2 * re;
        }
    }
    return out;
}

}  // namespace detail

template <int NC>
double linf(const Field<NC>& f) {
    const Field<NC> g = resample(f, 2 * f.grid().n());
    const int n2 = g.grid().n();
    const int np = g.grid().npoints();
    double best = 0.0;
    int argm = 0;
    for (int m = 0; m < np; ++m) {
        double mag2 = 0.0;
        for (int c = 0; c < NC; ++c) mag2 += g.values(c)[m] * g.values(c)[m];
        if (mag2 > best) {
            best = mag2;
            argm = m;
        }
    }
    // Newton polish of |f|^2 around the grid argmax; the field is smooth and
    // band-limited, so a few damped steps reach the continuous maximum.
    double x1 = g.grid().point(argm / n2), x2 = g.grid().point(argm % n2);
    const double step_cap = 1.0 / n2;
    for (int it = 0; it < 12; ++it) {
        double m = 0, mx = 0, my = 0, mxx = 0, mxy = 0, myy = 0;
        for (int c = 0; c < NC; ++c) {
            const auto j = detail::eval_jet(f, c, x1, x2);
            m += j.f * j.f;
            mx += 2 * j.f * j.fx;
            my += 2 * j.f * j.fy;
            mxx += 2 * (j.fx * j.fx + j.f * j.fxx);
            mxy += 2 * (j.fx * j.fy + j.f * j.fxy);
            myy += 2 * (j.fy * j.fy + j.f * j.fyy);
        }
        best = std::max(best, m);
        const double det = mxx * myy - mxy * mxy;
        if (!(det > 0.0) || mxx >= 0.0) break;  // not a strict interior max
        double d1 = -(myy * mx - mxy * my) / det;
        double d2 = -(-mxy * mx + mxx * my) / det;
        const double len = std::sqrt(d1 * d1 + d2 * d2);
        if (len > step_cap) {
            d1 *= step_cap / len;
            d2 *= step_cap / len;
        }
        x1 += d1;
        x2 += d2;
        if (len < 1e-14) break;
    }
    return std::sqrt(best);
}

}  // namespace norms
}  // namespace relaxflow

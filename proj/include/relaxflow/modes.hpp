#pragma once

// Flat per-mode tables and raw array transforms used by the time steppers.
// Solvers work on component-major complex arrays (length nmodes per
// component) and only materialize Field objects at snapshot/diagnostic
// times.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "relaxflow/field.hpp"
#include "relaxflow/operators.hpp"

namespace relaxflow {

struct ModeTable {
    explicit ModeTable(const TorusGrid& grid) {
        const int n = grid.n();
        const int nm = grid.nmodes();
        g1.resize(nm);
        g2.resize(nm);
        keep.resize(nm);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j <= n / 2; ++j) {
                const int m = grid.mode(i, j);
                g1[m] = grid.deriv1(i);
                g2[m] = grid.deriv2(j);
                keep[m] = mode_kept_by_dealias(n, grid.k1(i), grid.k2(j)) ? 1 : 0;
            }
    }
    std::vector<double> g1, g2;
    std::vector<uint8_t> keep;
};

namespace detail {
inline int exact_ratio(double whole, double part, const char* what) {
    const double r = whole / part;
    const int n = static_cast<int>(std::lround(r));
    if (n < 1 || std::abs(r - n) > 1e-9)
        throw std::invalid_argument(std::string(what) + " must divide evenly");
    return n;
}
}  // namespace detail

namespace spec {

inline void to_values(const TorusGrid& grid, const Complex* coef, double* vals) {
    grid.plans().backward(coef, vals);
}
inline void to_coef(const TorusGrid& grid, const double* vals, Complex* coef) {
    grid.plans().forward(vals, coef);
}

// Symmetric tensor spectrum of u x v from two velocity spectra, 2/3
// dealiased: returns (S11, S12, S22) stacked.
inline void outer_sym_dealiased(const TorusGrid& grid, const ModeTable& mt, const Complex* u,
                                const Complex* v, Complex* s_out) {
    const int nm = grid.nmodes();
    const int np = grid.npoints();
    std::vector<double> uv(static_cast<size_t>(4) * np);
    double* u1 = uv.data();
    double* u2 = uv.data() + np;
    double* v1 = uv.data() + 2 * np;
    double* v2 = uv.data() + 3 * np;
    to_values(grid, u, u1);
    to_values(grid, u + nm, u2);
    to_values(grid, v, v1);
    to_values(grid, v + nm, v2);
    std::vector<double> prod(np);
    for (int m = 0; m < np; ++m) prod[m] = u1[m] * v1[m];
    to_coef(grid, prod.data(), s_out);
    for (int m = 0; m < np; ++m) prod[m] = 0.5 * (u1[m] * v2[m] + u2[m] * v1[m]);
    to_coef(grid, prod.data(), s_out + nm);
    for (int m = 0; m < np; ++m) prod[m] = u2[m] * v2[m];
    to_coef(grid, prod.data(), s_out + 2 * nm);
    for (int m = 0; m < nm; ++m)
        if (!mt.keep[m]) {
            s_out[m] = 0.0;
            s_out[nm + m] = 0.0;
            s_out[2 * nm + m] = 0.0;
        }
}

inline double l2_sq(const TorusGrid& grid, const Complex* coef) {
    const int n = grid.n();
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= n / 2; ++j)
            acc += grid.weight(j) * std::norm(coef[grid.mode(i, j)]);
    return acc;
}

inline double max_abs(const TorusGrid& grid, const Complex* coef) {
    std::vector<double> vals(grid.npoints());
    to_values(grid, coef, vals.data());
    double m = 0.0;
    for (double v : vals) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace spec
}  // namespace relaxflow

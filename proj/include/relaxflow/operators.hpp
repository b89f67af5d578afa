#pragma once

// Exact spectral differential operators and alias control. Conventions
// follow the tensor calculus used throughout the solvers:
//   (grad_vec u)_{ij}  = d_i u_j        (so div of it is the Laplacian and
//                                        its row-curl is grad(curl u))
//   (jacobian u)_{ij}  = d_j u_i        (rows are gradients of components,
//                                        row-curl vanishes identically)
//   (div_tensor U)_i   = d_j U_{ji}
//   curl u             = d_1 u_2 - d_2 u_1
//   (curl_tensor U)_i  = d_1 U_{i2} - d_2 U_{i1}

#include <cmath>
#include <vector>

#include "relaxflow/field.hpp"

namespace relaxflow {

namespace detail {

// out[c][m] = sum_s sym(c, s, g1, g2) * in[s][m] over stored modes.
template <int NCOUT, int NCIN, typename Sym>
Field<NCOUT> apply_symbol(const Field<NCIN>& f, Sym&& sym) {
    const TorusGrid& grid = f.grid();
    const int n = grid.n();
    std::vector<Complex> coef(static_cast<size_t>(NCOUT) * grid.nmodes());
    for (int i = 0; i < n; ++i) {
        const double g1 = grid.deriv1(i);
        for (int j = 0; j <= n / 2; ++j) {
            const double g2 = grid.deriv2(j);
            const int m = grid.mode(i, j);
            for (int c = 0; c < NCOUT; ++c) {
                Complex acc(0.0, 0.0);
                for (int s = 0; s < NCIN; ++s) acc += sym(c, s, g1, g2) * f.coef(s)[m];
                coef[static_cast<size_t>(c) * grid.nmodes() + m] = acc;
            }
        }
    }
    return Field<NCOUT>::from_coef(grid, std::move(coef));
}

}  // namespace detail

inline VectorField gradient(const ScalarField& f) {
    return detail::apply_symbol<2, 1>(f, [](int c, int, double g1, double g2) {
        return Complex(0.0, c == 0 ? g1 : g2);
    });
}

inline ScalarField divergence(const VectorField& v) {
    return detail::apply_symbol<1, 2>(v, [](int, int s, double g1, double g2) {
        return Complex(0.0, s == 0 ? g1 : g2);
    });
}

inline TensorField grad_vec(const VectorField& v) {
    return detail::apply_symbol<4, 2>(v, [](int c, int s, double g1, double g2) {
        const int i = c / 2, j = c % 2;
        if (s != j) return Complex(0.0, 0.0);
        return Complex(0.0, i == 0 ? g1 : g2);
    });
}

inline TensorField jacobian(const VectorField& v) {
    return detail::apply_symbol<4, 2>(v, [](int c, int s, double g1, double g2) {
        const int i = c / 2, j = c % 2;
        if (s != i) return Complex(0.0, 0.0);
        return Complex(0.0, j == 0 ? g1 : g2);
    });
}

inline VectorField divergence_tensor(const TensorField& U) {
    return detail::apply_symbol<2, 4>(U, [](int c, int s, double g1, double g2) {
        const int sj = s / 2, si = s % 2;  // s holds U_{sj,si}
        if (si != c) return Complex(0.0, 0.0);
        return Complex(0.0, sj == 0 ? g1 : g2);
    });
}

// div(div U) = d_i d_j U_{ji}
inline ScalarField div_div(const TensorField& U) {
    return detail::apply_symbol<1, 4>(U, [](int, int s, double g1, double g2) {
        const int j = s / 2, i = s % 2;
        const double gi = i == 0 ? g1 : g2;
        const double gj = j == 0 ? g1 : g2;
        return Complex(-gi * gj, 0.0);
    });
}

inline ScalarField curl_vector(const VectorField& v) {
    return detail::apply_symbol<1, 2>(v, [](int, int s, double g1, double g2) {
        return s == 1 ? Complex(0.0, g1) : Complex(0.0, -g2);
    });
}

inline VectorField curl_tensor(const TensorField& U) {
    return detail::apply_symbol<2, 4>(U, [](int c, int s, double g1, double g2) {
        const int i = s / 2, j = s % 2;
        if (i != c) return Complex(0.0, 0.0);
        return j == 1 ? Complex(0.0, g1) : Complex(0.0, -g2);
    });
}

// Laplacian keeps the full (2 pi |k|)^2 symbol including Nyquist.
template <int NC>
Field<NC> laplacian(const Field<NC>& f) {
    const TorusGrid& grid = f.grid();
    const int n = grid.n();
    std::vector<Complex> coef(static_cast<size_t>(NC) * grid.nmodes());
    for (int i = 0; i < n; ++i) {
        const double a1 = kTwoPi * grid.k1(i);
        for (int j = 0; j <= n / 2; ++j) {
            const double a2 = kTwoPi * grid.k2(j);
            const double sym = -(a1 * a1 + a2 * a2);
            const int m = grid.mode(i, j);
            for (int c = 0; c < NC; ++c)
                coef[static_cast<size_t>(c) * grid.nmodes() + m] = sym * f.coef(c)[m];
        }
    }
    return Field<NC>::from_coef(grid, std::move(coef));
}

inline bool mode_kept_by_dealias(int n, int k1, int k2) {
    return 3 * std::max(std::abs(k1), std::abs(k2)) <= n;
}

// 2/3-rule truncation: zero every mode with max(|k1|, |k2|) > n/3.
template <int NC>
Field<NC> dealias(const Field<NC>& f) {
    const TorusGrid& grid = f.grid();
    const int n = grid.n();
    std::vector<Complex> coef(f.raw_coef());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= n / 2; ++j)
            if (!mode_kept_by_dealias(n, grid.k1(i), grid.k2(j)))
                for (int c = 0; c < NC; ++c)
                    coef[static_cast<size_t>(c) * grid.nmodes() + grid.mode(i, j)] = 0.0;
    return Field<NC>::from_coef(grid, std::move(coef));
}

template <int NC>
Field<NC> zero_mean(const Field<NC>& f) {
    std::vector<Complex> coef(f.raw_coef());
    for (int c = 0; c < NC; ++c) coef[static_cast<size_t>(c) * f.grid().nmodes()] = 0.0;
    return Field<NC>::from_coef(f.grid(), std::move(coef));
}

// Mode-wise projection onto divergence-free fields, P = I - kk^T/|k|^2.
inline VectorField leray_project(const VectorField& v) {
    const TorusGrid& grid = v.grid();
    const int n = grid.n();
    std::vector<Complex> coef(static_cast<size_t>(2) * grid.nmodes());
    for (int i = 0; i < n; ++i) {
        const double g1 = grid.deriv1(i);
        for (int j = 0; j <= n / 2; ++j) {
            const double g2 = grid.deriv2(j);
            const int m = grid.mode(i, j);
            Complex a = v.coef(0)[m], b = v.coef(1)[m];
            const double gg = g1 * g1 + g2 * g2;
            if (gg > 0.0) {
                const Complex kdotv = (g1 * a + g2 * b) / gg;
                a -= g1 * kdotv;
                b -= g2 * kdotv;
            }
            coef[m] = a;
            coef[grid.nmodes() + m] = b;
        }
    }
    return VectorField::from_coef(grid, std::move(coef));
}

// Pointwise tensor product (u x v)_{ij} = u_i v_j, formed on the grid and
// then 2/3-dealiased as every quadratic product in the solvers.
inline TensorField outer_product_dealiased(const VectorField& u, const VectorField& v) {
    if (u.grid() != v.grid()) throw std::invalid_argument("outer product grid mismatch");
    const TorusGrid& grid = u.grid();
    const int np = grid.npoints();
    std::vector<double> vals(static_cast<size_t>(4) * np);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int m = 0; m < np; ++m)
                vals[static_cast<size_t>(2 * i + j) * np + m] = u.values(i)[m] * v.values(j)[m];
    return dealias(TensorField::from_values(grid, std::move(vals)));
}

// Re-sample a band-limited field on an m-point grid (m >= n), splitting
// Nyquist content so the trigonometric interpolant is preserved exactly.
template <int NC>
Field<NC> resample(const Field<NC>& f, int m) {
    const TorusGrid& src = f.grid();
    const int n = src.n();
    if (m == n) return f;
    if (m < n || m % 2 != 0) throw std::invalid_argument("resample target must be even and >= n");
    TorusGrid dst(m);
    std::vector<Complex> coef(static_cast<size_t>(NC) * dst.nmodes(), Complex(0.0, 0.0));
    auto dst_index = [&](int k1, int k2) {
        const int i = k1 >= 0 ? k1 : k1 + m;
        return dst.mode(i, k2);
    };
    for (int c = 0; c < NC; ++c) {
        Complex* out = coef.data() + static_cast<size_t>(c) * dst.nmodes();
        for (int i = 0; i < n; ++i) {
            const int k1 = src.k1(i);
            for (int j = 0; j <= n / 2; ++j) {
                const Complex z = f.coef(c)[src.mode(i, j)];
                const bool ny1 = (i == n / 2), ny2 = (j == n / 2);
                if (!ny1 && !ny2) {
                    out[dst_index(k1, j)] += z;
                } else if (ny1 && !ny2) {
                    out[dst_index(n / 2, j)] += 0.5 * z;
                    out[dst_index(-n / 2, j)] += 0.5 * z;
                } else if (!ny1 && ny2) {
                    // half goes to (k1, n/2); the (k1, -n/2) half is the
                    // conjugate mirror of what the stored (-k1, n/2) entry
                    // deposits, so nothing more to add here
                    out[dst_index(k1, n / 2)] += 0.5 * z;
                } else {
                    out[dst_index(n / 2, n / 2)] += 0.25 * z;
                    out[dst_index(-n / 2, n / 2)] += 0.25 * z;
                }
            }
        }
    }
    return Field<NC>::from_coef(dst, std::move(coef));
}

}  // namespace relaxflow

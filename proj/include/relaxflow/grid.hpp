#pragma once

// Uniform periodic grid on the unit torus T^2 = R^2/Z^2 with n points per
// dimension, x_j = j/n. Fourier modes k in Z^2 carry the derivative symbol
// 2 pi i k; first-derivative factors zero the Nyquist mode so d/dx stays an
// exactly antisymmetric operator on the grid.

#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "relaxflow/fft.hpp"

namespace relaxflow {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

class TorusGrid {
  public:
    TorusGrid() = default;
    explicit TorusGrid(int n) {
        if (n < 8 || n % 2 != 0) throw std::invalid_argument("grid size must be even and >= 8");
        plans_ = FftPlans::get(n);
    }

    bool valid() const { return static_cast<bool>(plans_); }
    int n() const { return plans_->n(); }
    int nmodes() const { return plans_->nmodes(); }
    int npoints() const { return n() * n(); }
    const FftPlans& plans() const { return *plans_; }

    double point(int j) const { return static_cast<double>(j) / n(); }

    // Integer wavenumber of row index i (first dimension), i in [0, n).
    int k1(int i) const { return i <= n() / 2 ? i : i - n(); }
    // Second dimension is stored in r2c half-spectrum form, j in [0, n/2].
    int k2(int j) const { return j; }

    // 2 pi k derivative factors; Nyquist zeroed.
    double deriv1(int i) const {
        const int k = k1(i);
        return k == n() / 2 ? 0.0 : kTwoPi * k;
    }
    double deriv2(int j) const { return j == n() / 2 ? 0.0 : kTwoPi * j; }

    // Parseval weight of a stored mode: columns k2=0 and k2=n/2 hold both
    // half-plane partners explicitly, the rest stand for a conjugate pair.
    double weight(int j) const { return (j == 0 || j == n() / 2) ? 1.0 : 2.0; }

    // Storage index of mode (i, j).
    int mode(int i, int j) const { return i * (n() / 2 + 1) + j; }

    bool operator==(const TorusGrid& o) const { return plans_ == o.plans_; }
    bool operator!=(const TorusGrid& o) const { return !(*this == o); }

  private:
    std::shared_ptr<const FftPlans> plans_;
};

}  // namespace relaxflow

#pragma once

// Immutable real fields on the torus with both representations held
// eagerly: grid-point samples and Fourier coefficients. Construction from
// either side runs the transform once, after which all reads are pure and
// concurrency-safe. NC = 1, 2, 4 give scalar, vector and 2x2 tensor fields;
// tensor component (i, j) lives at index 2*i + j and no symmetry is imposed.

#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include "relaxflow/grid.hpp"

namespace relaxflow {

using Complex = std::complex<double>;

template <int NC>
class Field {
  public:
    static_assert(NC == 1 || NC == 2 || NC == 4);

    Field() = default;

    explicit Field(const TorusGrid& grid)
        : grid_(grid),
          values_(static_cast<size_t>(NC) * grid.npoints(), 0.0),
          coef_(static_cast<size_t>(NC) * grid.nmodes(), Complex(0.0, 0.0)) {}

    static Field from_values(const TorusGrid& grid, std::vector<double> values) {
        Field f(grid, std::move(values), {}, true);
        return f;
    }
    static Field from_coef(const TorusGrid& grid, std::vector<Complex> coef) {
        Field f(grid, {}, std::move(coef), false);
        return f;
    }

    // Sample NC component functions of (x1, x2).
    template <typename F>
    static Field sample(const TorusGrid& grid, F&& component) {
        std::vector<double> v(static_cast<size_t>(NC) * grid.npoints());
        const int n = grid.n();
        for (int c = 0; c < NC; ++c)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    v[static_cast<size_t>(c) * grid.npoints() + static_cast<size_t>(i) * n + j] =
                        component(c, grid.point(i), grid.point(j));
        return from_values(grid, std::move(v));
    }

    const TorusGrid& grid() const { return grid_; }
    static constexpr int components() { return NC; }

    const double* values(int c) const { return values_.data() + static_cast<size_t>(c) * grid_.npoints(); }
    const Complex* coef(int c) const { return coef_.data() + static_cast<size_t>(c) * grid_.nmodes(); }
    double value(int c, int i, int j) const { return values(c)[static_cast<size_t>(i) * grid_.n() + j]; }
    Complex coef(int c, int i, int j) const { return coef(c)[grid_.mode(i, j)]; }

    const std::vector<double>& raw_values() const { return values_; }
    const std::vector<Complex>& raw_coef() const { return coef_; }

    Field operator+(const Field& o) const { return combine(o, 1.0); }
    Field operator-(const Field& o) const { return combine(o, -1.0); }
    Field operator*(double s) const {
        Field r = *this;
        for (auto& v : r.values_) v *= s;
        for (auto& c : r.coef_) c *= s;
        return r;
    }
    friend Field operator*(double s, const Field& f) { return f * s; }

  private:
    Field(const TorusGrid& grid, std::vector<double> values, std::vector<Complex> coef,
          bool from_values)
        : grid_(grid), values_(std::move(values)), coef_(std::move(coef)) {
        if (from_values) {
            if (values_.size() != static_cast<size_t>(NC) * grid_.npoints())
                throw std::invalid_argument("field values size mismatch");
            coef_.resize(static_cast<size_t>(NC) * grid_.nmodes());
            for (int c = 0; c < NC; ++c)
                grid_.plans().forward(values_.data() + static_cast<size_t>(c) * grid_.npoints(),
                                      coef_.data() + static_cast<size_t>(c) * grid_.nmodes());
        } else {
            if (coef_.size() != static_cast<size_t>(NC) * grid_.nmodes())
                throw std::invalid_argument("field coef size mismatch");
            values_.resize(static_cast<size_t>(NC) * grid_.npoints());
            for (int c = 0; c < NC; ++c)
                grid_.plans().backward(coef_.data() + static_cast<size_t>(c) * grid_.nmodes(),
                                       values_.data() + static_cast<size_t>(c) * grid_.npoints());
        }
    }

    Field combine(const Field& o, double s) const {
        if (grid_ != o.grid_) throw std::invalid_argument("field grid mismatch");
        Field r = *this;
        for (size_t m = 0; m < r.values_.size(); ++m) r.values_[m] += s * o.values_[m];
        for (size_t m = 0; m < r.coef_.size(); ++m) r.coef_[m] += s * o.coef_[m];
        return r;
    }

    TorusGrid grid_;
    std::vector<double> values_;
    std::vector<Complex> coef_;
};

using ScalarField = Field<1>;
using VectorField = Field<2>;
using TensorField = Field<4>;

}  // namespace relaxflow

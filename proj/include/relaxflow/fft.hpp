#pragma once

// Thin RAII layer over FFTW double-precision r2c/c2r transforms on n-by-n
// real grids. Plans are created once per grid size and shared; execution
// through the new-array interface is thread-safe, plan creation is not and
// is serialized here. Plans use FFTW_ESTIMATE | FFTW_UNALIGNED so the plan
// choice (and hence rounding) is reproducible run to run.

#include <fftw3.h>

#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace relaxflow {

class FftPlans {
  public:
    explicit FftPlans(int n) : n_(n) {
        std::vector<double> re(static_cast<size_t>(n) * n);
        std::vector<std::complex<double>> sp(static_cast<size_t>(n) * (n / 2 + 1));
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        fwd_ = fftw_plan_dft_r2c_2d(n, n, re.data(),
                                    reinterpret_cast<fftw_complex*>(sp.data()), flags);
        bwd_ = fftw_plan_dft_c2r_2d(n, n, reinterpret_cast<fftw_complex*>(sp.data()),
                                    re.data(), flags);
        if (!fwd_ || !bwd_) throw std::runtime_error("fftw plan creation failed");
    }
    ~FftPlans() {
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
    }
    FftPlans(const FftPlans&) = delete;
    FftPlans& operator=(const FftPlans&) = delete;

    int n() const { return n_; }
    int nmodes() const { return n_ * (n_ / 2 + 1); }

    // real (n*n) -> spectral (n*(n/2+1)), normalized so coefficients are the
    // Fourier coefficients of f(x) = sum_k fhat(k) e^{2 pi i k.x}.
    void forward(const double* values, std::complex<double>* coef) const {
        std::vector<double> tmp(values, values + static_cast<size_t>(n_) * n_);
        fftw_execute_dft_r2c(fwd_, tmp.data(), reinterpret_cast<fftw_complex*>(coef));
        const double s = 1.0 / (static_cast<double>(n_) * n_);
        for (int m = 0; m < nmodes(); ++m) coef[m] *= s;
    }

    // spectral -> real; the input copy keeps the caller's coefficients intact
    // (FFTW c2r destroys its input).
    void backward(const std::complex<double>* coef, double* values) const {
        std::vector<std::complex<double>> tmp(coef, coef + nmodes());
        fftw_execute_dft_c2r(bwd_, reinterpret_cast<fftw_complex*>(tmp.data()), values);
    }

    static std::shared_ptr<const FftPlans> get(int n) {
        static std::mutex mu;
        static std::map<int, std::weak_ptr<const FftPlans>> registry;
        std::lock_guard<std::mutex> lock(mu);
        auto& slot = registry[n];
        if (auto p = slot.lock()) return p;
        auto p = std::make_shared<const FftPlans>(n);
        slot = p;
        return p;
    }

  private:
    int n_;
    fftw_plan fwd_;
    fftw_plan bwd_;
};

}  // namespace relaxflow

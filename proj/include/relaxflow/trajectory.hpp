#pragma once

// Reference trajectory: uniformly sampled velocity spectra of the reference
// solver, evaluated at arbitrary times by 4-point Lagrange interpolation.
// Dense enough sampling makes the interpolation error negligible next to
// the relaxation errors being measured (the harness picks the cadence).
//
// File layout "RFTRAJ01" (little-endian):
//   magic[8], u32 n, u8 friction, u8 pad, u16 pad, u32 count,
//   f64 t0, f64 cadence, then count samples of 2*n*(n/2+1) complex f64.

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "relaxflow/modes.hpp"

namespace relaxflow {

class NsTrajectory {
  public:
    NsTrajectory() = default;
    NsTrajectory(const TorusGrid& grid, bool friction, double t0, double cadence)
        : grid_(grid), friction_(friction), t0_(t0), cadence_(cadence) {}

    const TorusGrid& grid() const { return grid_; }
    bool friction() const { return friction_; }
    double t0() const { return t0_; }
    double cadence() const { return cadence_; }
    int count() const { return static_cast<int>(samples_.size()); }
    double t_end() const { return t0_ + cadence_ * (count() - 1); }

    void push(std::vector<Complex> u_hat) {
        if (static_cast<int>(u_hat.size()) != 2 * grid_.nmodes())
            throw std::invalid_argument("trajectory sample size mismatch");
        samples_.push_back(std::move(u_hat));
    }

    const std::vector<Complex>& sample(int i) const { return samples_[i]; }
    double sample_time(int i) const { return t0_ + cadence_ * i; }

    bool covers(double t) const {
        return count() >= 4 && t >= t0_ - 1e-12 && t <= t_end() + 1e-12;
    }

    // 4-point Lagrange interpolation of the velocity spectrum at time t.
    std::vector<Complex> u_hat_at(double t) const {
        if (!covers(t))
            throw std::invalid_argument("reference trajectory does not cover t = " +
                                        std::to_string(t));
        const double s = (t - t0_) / cadence_;
        int j = static_cast<int>(std::floor(s));
        j = std::max(1, std::min(j, count() - 3));
        // exact hit: avoid interpolation noise entirely
        const int nearest = static_cast<int>(std::lround(s));
        if (std::abs(s - nearest) < 1e-9 && nearest >= 0 && nearest < count())
            return samples_[nearest];
        const std::array<int, 4> idx{j - 1, j, j + 1, j + 2};
        std::array<double, 4> w;
        for (int a = 0; a < 4; ++a) {
            double num = 1.0, den = 1.0;
            for (int b = 0; b < 4; ++b) {
                if (a == b) continue;
                num *= s - idx[b];
                den *= idx[a] - idx[b];
            }
            w[a] = num / den;
        }
        std::vector<Complex> out(samples_[0].size(), Complex(0.0, 0.0));
        for (int a = 0; a < 4; ++a) {
            const auto& smp = samples_[idx[a]];
            for (size_t m = 0; m < out.size(); ++m) out[m] += w[a] * smp[m];
        }
        return out;
    }

    void save(const std::string& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open trajectory for writing: " + path);
        static constexpr char magic[8] = {'R', 'F', 'T', 'R', 'A', 'J', '0', '1'};
        out.write(magic, 8);
        const uint32_t n = static_cast<uint32_t>(grid_.n());
        const uint8_t fric = friction_ ? 1 : 0;
        const uint8_t pad8 = 0;
        const uint16_t pad16 = 0;
        const uint32_t count_ = static_cast<uint32_t>(samples_.size());
        out.write(reinterpret_cast<const char*>(&n), 4);
        out.write(reinterpret_cast<const char*>(&fric), 1);
        out.write(reinterpret_cast<const char*>(&pad8), 1);
        out.write(reinterpret_cast<const char*>(&pad16), 2);
        out.write(reinterpret_cast<const char*>(&count_), 4);
        out.write(reinterpret_cast<const char*>(&t0_), 8);
        out.write(reinterpret_cast<const char*>(&cadence_), 8);
        for (const auto& s : samples_)
            out.write(reinterpret_cast<const char*>(s.data()),
                      static_cast<std::streamsize>(s.size() * sizeof(Complex)));
        if (!out) throw std::runtime_error("trajectory write failed: " + path);
    }

    static NsTrajectory load(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw std::runtime_error("cannot open trajectory: " + path);
        char magic[8];
        in.read(magic, 8);
        static constexpr char expect[8] = {'R', 'F', 'T', 'R', 'A', 'J', '0', '1'};
        if (!in || std::memcmp(magic, expect, 8) != 0)
            throw std::runtime_error("not a relaxflow trajectory: " + path);
        uint32_t n = 0, count = 0;
        uint8_t fric = 0, pad8 = 0;
        uint16_t pad16 = 0;
        double t0 = 0, cadence = 0;
        in.read(reinterpret_cast<char*>(&n), 4);
        in.read(reinterpret_cast<char*>(&fric), 1);
        in.read(reinterpret_cast<char*>(&pad8), 1);
        in.read(reinterpret_cast<char*>(&pad16), 2);
        in.read(reinterpret_cast<char*>(&count), 4);
        in.read(reinterpret_cast<char*>(&t0), 8);
        in.read(reinterpret_cast<char*>(&cadence), 8);
        if (!in) throw std::runtime_error("truncated trajectory header: " + path);
        NsTrajectory traj(TorusGrid(static_cast<int>(n)), fric != 0, t0, cadence);
        for (uint32_t i = 0; i < count; ++i) {
            std::vector<Complex> s(2 * traj.grid().nmodes());
            in.read(reinterpret_cast<char*>(s.data()),
                    static_cast<std::streamsize>(s.size() * sizeof(Complex)));
            if (!in) throw std::runtime_error("truncated trajectory data: " + path);
            traj.push(std::move(s));
        }
        return traj;
    }

  private:
    TorusGrid grid_;
    bool friction_ = false;
    double t0_ = 0.0;
    double cadence_ = 0.0;
    std::vector<std::vector<Complex>> samples_;
};

}  // namespace relaxflow

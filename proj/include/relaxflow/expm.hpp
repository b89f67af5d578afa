#pragma once

// Dense matrix exponential by Pade approximation with scaling and squaring
// (Higham 2005 parameter choices, backward error ~1e-16 <= the 1e-13 target)
// and the phi-functions needed by the exponential integrators. phi_1, phi_2
// come from one exponential of the augmented block matrix
//   M = [A I 0; 0 0 I; 0 0 0],  exp(M) = [e^A phi1(A) phi2(A); 0 I I; 0 0 I],
// which avoids inverting A and stays accurate for singular/stiff A.

#include <Eigen/Dense>

#include <array>
#include <cmath>

namespace relaxflow {

namespace detail {

inline Eigen::MatrixXd pade_expm(const Eigen::MatrixXd& A) {
    using Mat = Eigen::MatrixXd;
    const int d = static_cast<int>(A.rows());
    const double nrm = A.cwiseAbs().colwise().sum().maxCoeff();  // 1-norm

    struct PadeOrder {
        int m;
        double theta;
    };
    static constexpr std::array<PadeOrder, 4> low{{{3, 1.495585217958292e-2},
                                                   {5, 2.539398330063230e-1},
                                                   {7, 9.504178996162932e-1},
                                                   {9, 2.097847961257068e0}}};
    static constexpr double theta13 = 5.371920351148152e0;

    auto pade = [&](const Mat& X, int m) -> Mat {
        // coefficients of the [m/m] diagonal Pade approximant to exp
        std::vector<double> b(m + 1);
        b[0] = 1.0;
        for (int k = 0; k < m; ++k)
            b[k + 1] = b[k] * static_cast<double>(m - k) / ((k + 1.0) * (2.0 * m - k));
        const Mat X2 = X * X;
        Mat U = Mat::Zero(d, d), V = Mat::Zero(d, d);
        Mat P = Mat::Identity(d, d);  // X^{2j}
        for (int j = 0; 2 * j <= m; ++j) {
            V += b[2 * j] * P;
            if (2 * j + 1 <= m) U += b[2 * j + 1] * P;
            if (2 * (j + 1) <= m) P = P * X2;
        }
        U = X * U;
        return Eigen::PartialPivLU<Mat>(V - U).solve(V + U);
    };

    for (const auto& o : low)
        if (nrm <= o.theta) return pade(A, o.m);

    int s = 0;
    double scaled = nrm;
    while (scaled > theta13) {
        scaled *= 0.5;
        ++s;
    }
    Mat E = pade(A * std::ldexp(1.0, -s), 13);
    for (int k = 0; k < s; ++k) E = E * E;
    return E;
}

}  // namespace detail

inline Eigen::MatrixXd expm(const Eigen::MatrixXd& A) { return detail::pade_expm(A); }

struct ExpmPhi {
    Eigen::MatrixXd e;     // exp(A)
    Eigen::MatrixXd phi1;  // A^{-1}(e^A - I)  as a limit, defined for all A
    Eigen::MatrixXd phi2;  // A^{-2}(e^A - I - A)
};

inline ExpmPhi expm_with_phi(const Eigen::MatrixXd& A) {
    using Mat = Eigen::MatrixXd;
    const int d = static_cast<int>(A.rows());
    const double nrm = A.cwiseAbs().colwise().sum().maxCoeff();
    int s = 0;
    double scaled = nrm;
    while (scaled > 5.371920351148152) {  // theta_13: keep the squaring count low
        scaled *= 0.5;
        ++s;
    }
    Mat M = Mat::Zero(3 * d, 3 * d);
    M.topLeftCorner(d, d) = A * std::ldexp(1.0, -s);
    M.block(0, d, d, d) = Mat::Identity(d, d);
    M.block(d, 2 * d, d, d) = Mat::Identity(d, d);
    const Mat B = detail::pade_expm(M);
    ExpmPhi out;
    out.e = B.topLeftCorner(d, d);
    out.phi1 = B.block(0, d, d, d);
    out.phi2 = B.block(0, 2 * d, d, d);
    // doubling: e(2A) = e^2, phi1(2A) = (e+I) phi1 / 2,
    //           phi2(2A) = (phi1^2 + 2 phi2) / 4
    for (int k = 0; k < s; ++k) {
        const Mat phi2n = 0.25 * (out.phi1 * out.phi1 + 2.0 * out.phi2);
        const Mat phi1n = 0.5 * ((out.e + Mat::Identity(d, d)) * out.phi1);
        out.e = out.e * out.e;
        out.phi1 = phi1n;
        out.phi2 = phi2n;
    }
    return out;
}

}  // namespace relaxflow

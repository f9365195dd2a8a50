#pragma once

#include <cmath>
#include <complex>
#include <utility>

#include <Eigen/Dense>

#include "nhspec/errors.hpp"

namespace nhspec {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

/// Throws InvalidInput unless `m` is square with dim in {2, 3, 6} and finite.
void require_valid(const CMat& m, const char* who);

/// Roots of a 2x2 characteristic polynomial, larger-magnitude root first and
/// the partner via det/lambda; returned by descending real part, ties broken
/// by descending imaginary part.
std::pair<cplx, cplx> eig2(const CMat& h);
std::pair<cplx, cplx> eig2(const Eigen::Matrix2cd& h);

/// exp(-i a t) by scaling and squaring of a truncated Taylor series.
/// No eigendecomposition is involved, so defective matrices are fine.
CMat expm(const CMat& a, double t);

/// Fixed-size variant used on hot paths (3x3 probe Hamiltonians).
Eigen::Matrix3cd expm(const Eigen::Matrix3cd& a, double t);

/// expm(h, t) * psi0.
CVec evolve(const CMat& h, const CVec& psi0, double t);

namespace detail {

inline constexpr int kTaylorDegree = 18;
inline constexpr double kTaylorTheta = 1.0;

template <typename Mat>
Mat expm_minus_i(const Mat& a, double t) {
    const Eigen::Index n = a.rows();
    if (!(t >= 0.0) || !std::isfinite(t)) {
        throw InvalidInput("expm: time must be finite and non-negative");
    }
    Mat x = a * cplx(0.0, -t);
    const double norm = x.cwiseAbs().colwise().sum().maxCoeff();
    if (!std::isfinite(norm)) {
        throw NumericRange("expm: non-finite matrix norm");
    }
    int squarings = 0;
    if (norm > kTaylorTheta) {
        squarings = static_cast<int>(std::ceil(std::log2(norm / kTaylorTheta)));
        if (squarings > 1000) {
            throw NumericRange("expm: scaling exponent out of range");
        }
        x *= std::ldexp(1.0, -squarings);
    }

    // Paterson-Stockmeyer evaluation of sum_{j<=18} x^j / j!, blocks of 4.
    constexpr int q = 4;
    Mat pw[q + 1];
    pw[0] = Mat::Identity(n, n);
    pw[1] = x;
    for (int j = 2; j <= q; ++j) {
        pw[j] = pw[j - 1] * x;
    }
    double coef[kTaylorDegree + 1];
    coef[0] = 1.0;
    for (int j = 1; j <= kTaylorDegree; ++j) {
        coef[j] = coef[j - 1] / j;
    }
    const int blocks = kTaylorDegree / q;  // highest block index
    Mat acc = Mat::Zero(n, n);
    for (int b = blocks; b >= 0; --b) {
        Mat blk = Mat::Zero(n, n);
        for (int j = 0; j < q; ++j) {
            const int deg = b * q + j;
            if (deg <= kTaylorDegree) {
                blk += coef[deg] * pw[j];
            }
        }
        if (b == blocks) {
            acc = blk;
        } else {
            acc = (acc * pw[q]).eval() + blk;
        }
    }
    for (int s = 0; s < squarings; ++s) {
        acc = (acc * acc).eval();
    }
    if (!acc.allFinite()) {
        throw NumericRange("expm: overflow during squaring");
    }
    return acc;
}

}  // namespace detail
}  // namespace nhspec

// Copyright (c) 2026 the shapebie authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

namespace shapebie {

// B_1(X) = Tr(X) I - X^T, the factor that turns a tangential jacobian into the
// first derivative of the area vector W.
inline Eigen::MatrixXd coeff_B1(const Eigen::MatrixXd& X) {
    return X.trace() * Eigen::MatrixXd::Identity(X.rows(), X.cols()) - X.transpose();
}

// B_m(A) recursion for the m-th equal-direction derivative of W:
//   B_m(A) = sum_{i=1}^m (-1)^{i+1} (m-1)!/(m-i)! B_1(A^i) B_{m-i}(A),
// with B_0 = Id; identically zero for m >= d.
inline Eigen::MatrixXd coeff_Bm(const Eigen::MatrixXd& A, int m) {
    const int d = static_cast<int>(A.rows());
    if (m == 0) return Eigen::MatrixXd::Identity(d, d);
    if (m >= d) return Eigen::MatrixXd::Zero(d, d);
    Eigen::MatrixXd result = Eigen::MatrixXd::Zero(d, d);
    Eigen::MatrixXd Apow = Eigen::MatrixXd::Identity(d, d);
    double factorial_ratio = 1.0;  // (m-1)!/(m-i)!
    for (int i = 1; i <= m; ++i) {
        Apow = Apow * A;
        if (i > 1) factorial_ratio *= (m - i + 1);
        const double sign = (i % 2 == 1) ? 1.0 : -1.0;
        result += sign * factorial_ratio * coeff_B1(Apow) * coeff_Bm(A, m - i);
    }
    return result;
}

}  // namespace shapebie

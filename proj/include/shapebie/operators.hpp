// Copyright (c) 2026 the shapebie authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <string>

#include "shapebie/geometry2d.hpp"
#include "shapebie/geometry3d.hpp"
#include "shapebie/kernels.hpp"

namespace shapebie {

enum class OperatorKind { V, D, Kprime, N };
enum class LayerKind { Single, Double };

struct OperatorMatrix {
    Eigen::MatrixXcd M;
    std::string tag;
    Cplx kappa{0.0, 0.0};
    std::string shape;
    std::string deformation = "none";
    int N = 0;
};

// Quadrature weights R(2 pi k / N) for the periodic logarithmic rule:
// integrates ln(4 sin^2((t-s)/2)) f(s) spectrally on the uniform grid.
Eigen::VectorXd log_rule_weights(int N);

// Spectral differentiation matrix for 2pi-periodic data on N (even) nodes.
Eigen::MatrixXd trig_diff_matrix(int N);

// Nystrom matrices of the boundary operators on the (possibly deformed) curve
// carried by the grid. Densities are nodal values; the area element is folded
// into the matrix.
OperatorMatrix assemble_V(const Grid2& g, Cplx kappa);
OperatorMatrix assemble_D(const Grid2& g, Cplx kappa);
OperatorMatrix assemble_Kprime(const Grid2& g, Cplx kappa);
// hypersingular operator through the regularized representation
//   N = kappa^2 V_{(n.n')} + d/ds V d/ds
OperatorMatrix assemble_N(const Grid2& g, Cplx kappa);

OperatorMatrix assemble(const Grid2& g, Cplx kappa, OperatorKind which);

// tau_r K_{Gamma_r} tau_r^{-1} on the reference grid: assembles the chosen
// operator on the deformed curve at identical parameters.
OperatorMatrix assemble_pulled_back(const Grid2& g, Cplx kappa, Field2Ptr r, OperatorKind which);

// analytic first derivatives at r = 0
OperatorMatrix assemble_dV(const Grid2& g, Cplx kappa, const FieldOnCurve& xi);
OperatorMatrix assemble_dD_op(const Grid2& g, Cplx kappa, const FieldOnCurve& xi);

// multiplier of the discretized operator on the Fourier mode e^{i n theta}
Cplx matrix_fourier_multiplier(const OperatorMatrix& op, const Grid2& g, int n);

struct PotentialSample {
    Eigen::MatrixXd points;     // d x M
    Eigen::VectorXcd values;
    double min_distance = 0.0;
    bool exterior = true;       // side of the first point, from the nearest-node normal
};

inline constexpr double kPotentialClearance = 0.05;

// smooth-quadrature layer potentials off the boundary
PotentialSample eval_potential(const Grid2& g, Cplx kappa, const Eigen::VectorXcd& u,
                               const Eigen::Matrix2Xd& points, LayerKind kind);
PotentialSample eval_potential3(const Grid3& g, Cplx kappa, const Eigen::VectorXcd& u,
                                const Eigen::Matrix3Xd& points, LayerKind kind);

// single-layer potential of the family r -> P_r tau_r^{-1}, used as the FD
// family against eval_dpotential
PotentialSample eval_potential_pulled_back(const Grid2& g, Cplx kappa, const Eigen::VectorXcd& u,
                                           const Eigen::Matrix2Xd& points, const FieldOnCurve& r);

// first derivative of the single-layer potential at r = 0:
// kernel -xi(y).grad G(x-y) + G(x-y) div_Gamma xi(y)
PotentialSample eval_dpotential(const Grid2& g, Cplx kappa, const Eigen::VectorXcd& u,
                                const Eigen::Matrix2Xd& points, const FieldOnCurve& xi);

// exports: CSV rows (row, col, re, im); binary little-endian f64 quadruples;
// JSON sidecar {shape, N, kappa_re, kappa_im, deformation}
void write_matrix_csv(const OperatorMatrix& op, const std::string& path);
void write_matrix_binary(const OperatorMatrix& op, const std::string& path);
void write_matrix_sidecar(const OperatorMatrix& op, const std::string& path);
Eigen::MatrixXcd read_matrix_binary(const std::string& path, int N);

}  // namespace shapebie

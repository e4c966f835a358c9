// Copyright (c) 2026 the shapebie authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace shapebie {

using Cplx = std::complex<double>;
using CVec2 = Eigen::Vector2cd;
using CVec3 = Eigen::Vector3cd;
using CMat2 = Eigen::Matrix2cd;
using CMat3 = Eigen::Matrix3cd;

// Fundamental solution of the Helmholtz equation, kappa in C\{0}, Im >= 0:
//   d=2: (i/4) H_0^(1)(kappa |z|),   d=3: e^{i kappa |z|}/(4 pi |z|)
Cplx helmholtz_Ga2(Cplx kappa, const Eigen::Vector2d& z);
Cplx helmholtz_Ga3(Cplx kappa, const Eigen::Vector3d& z);
CVec2 grad_Ga2(Cplx kappa, const Eigen::Vector2d& z);
CVec3 grad_Ga3(Cplx kappa, const Eigen::Vector3d& z);
CMat2 hess_Ga2(Cplx kappa, const Eigen::Vector2d& z);
CMat3 hess_Ga3(Cplx kappa, const Eigen::Vector3d& z);

// Radial factors: grad G = Phi(rho) z and Hess G = Psi(rho) z z^T + Phi(rho) I.
struct Radial {
    Cplx G, Phi, Psi;
};
Radial radial2(Cplx kappa, double rho);
Radial radial3(Cplx kappa, double rho);

// Logarithmic splitting of the 2d radial factors over a parametrized curve:
// with L = ln(4 sin^2((t-s)/2)), rho = q * 2|sin((t-s)/2)|,
//   G   = aG * L + bG
//   Phi = aPhi * L + bPhi - 1/(2 pi rho^2)
//   Psi = aPsi * L + bPsi + 1/(pi rho^4) + kappa^2/(4 pi rho^2)
// The a/b parts are smooth across the diagonal; the explicit poles must be
// paired with flat factors of matching order by the caller.
struct RadialSplit2 {
    Cplx aG, bG, aPhi, bPhi, aPsi, bPsi;
};
RadialSplit2 radial_split2(Cplx kappa, double rho, double q);

// Elastodynamic fundamental solution (d = 3):
//   (1/mu) ( Ga(ks, z) I + (1/ks^2) Hess( Ga(ks,z) - Ga(kp,z) ) )
CMat3 elastic_Ge(Cplx ks, Cplx kp, double mu, const Eigen::Vector3d& z);

// Residual of the Navier equation -mu Lap u - (mu+lambda) grad div u - rho w^2 u
// applied to column j of Ge, evaluated analytically via the Helmholtz relation
// Lap Ga = -kappa^2 Ga.
CVec3 elastic_navier_residual(double omega, double rho_density, double mu, double lambda,
                              const Eigen::Vector3d& z, int column);

// kernel of the first derivative of the pulled-back boundary operator at r=0:
//   (xi(x) - xi(y)) . grad G(x-y) + G(x-y) div_Gamma xi(y)
Cplx boundary_derivative_kernel2(Cplx kappa, const Eigen::Vector2d& x, const Eigen::Vector2d& y,
                                 const Eigen::Vector2d& xi_x, const Eigen::Vector2d& xi_y,
                                 double div_xi_y);
// kernel of the first derivative of the potential at r=0 (x off the boundary):
//   -xi(y) . grad G(x-y) + G(x-y) div_Gamma xi(y)
Cplx potential_derivative_kernel2(Cplx kappa, const Eigen::Vector2d& x, const Eigen::Vector2d& y,
                                  const Eigen::Vector2d& xi_y, double div_xi_y);
Cplx potential_derivative_kernel3(Cplx kappa, const Eigen::Vector3d& x, const Eigen::Vector3d& y,
                                  const Eigen::Vector3d& xi_y, double div_xi_y);

// g(x,y)/|x-y|^2 with g = n(y).(x-y); stays bounded on smooth curves.
class Curve;  // geometry2d.hpp
double doublelayer_flatness(const Curve& c, double t_x, double t_y);

// ---- numerical certification of the pseudo-homogeneous class ----

struct SlopeCheck {
    int alpha = 0;           // derivative order |alpha|
    double nominal = 0.0;    // -(d-1) + m - |alpha|
    double fitted = 0.0;
    bool log_normalized = false;
    bool pass = false;
};

struct ClassCertifyReport {
    std::vector<SlopeCheck> slopes;
    double odd_violation = 0.0;  // max relative antipodal asymmetry of D^m G
    bool odd_pass = false;
    bool pass = false;
};

// Fits |d^alpha G| ~ rho^{nominal} over 8 dyadic radii in [1e-3, 0.128] and
// checks oddness of D^m G at antipodal sample pairs. Kernels whose nominal
// exponent is >= 0 (bounded, possibly with a log factor) are graded against
// |G|/(1 + |ln rho|) instead of a plain power.
//
// value:   z -> max-magnitude of the kernel (matrix kernels use max-entry)
// dmag:    z -> magnitudes of |alpha| = 1..A derivatives (empty -> FD of value)
// dm_flat: z -> flattened m-th derivative tensor for the oddness check
ClassCertifyReport class_certify(
    int dim, int m,
    const std::function<double(const Eigen::VectorXd&)>& value,
    const std::function<std::vector<double>(const Eigen::VectorXd&)>& dmag,
    const std::function<Eigen::VectorXcd(const Eigen::VectorXd&)>& dm_flat,
    int max_alpha, int odd_pairs, std::uint64_t seed);

// remainder of the 3d expansion  Ga - (1/4pi)(1/rho + i k - k^2 rho/2 - i k^3 rho^2/6)
Cplx acoustic3d_expansion_remainder(Cplx kappa, double rho);

void require_valid_wavenumber(Cplx kappa);

}  // namespace shapebie

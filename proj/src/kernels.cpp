// Copyright (c) 2026 the shapebie authors
// SPDX-License-Identifier: Apache-2.0
#include "shapebie/kernels.hpp"

#include <cmath>

#include "shapebie/bessel.hpp"
#include "shapebie/errors.hpp"
#include "shapebie/geometry2d.hpp"
#include "shapebie/util.hpp"

namespace shapebie {

namespace {
constexpr double kPi = 3.14159265358979323846264338;
const Cplx kI{0.0, 1.0};

double require_rho(double rho) {
    if (!(rho > 0.0)) throw SingularArgument("kernel evaluated at z = 0");
    return rho;
}
}  // namespace

void require_valid_wavenumber(Cplx kappa) {
    if (kappa == Cplx(0.0, 0.0)) throw ParameterError("kappa must be nonzero");
    if (kappa.imag() < 0.0) throw ParameterError("Im(kappa) must be >= 0");
}

Cplx helmholtz_Ga2(Cplx kappa, const Eigen::Vector2d& z) {
    require_valid_wavenumber(kappa);
    const double rho = require_rho(z.norm());
    return 0.25 * kI * bessel::h0_1(kappa * rho);
}

Cplx helmholtz_Ga3(Cplx kappa, const Eigen::Vector3d& z) {
    require_valid_wavenumber(kappa);
    const double rho = require_rho(z.norm());
    return std::exp(kI * kappa * rho) / (4.0 * kPi * rho);
}

Radial radial2(Cplx kappa, double rho) {
    require_valid_wavenumber(kappa);
    require_rho(rho);
    const Cplx w = kappa * rho;
    Radial r;
    r.G = 0.25 * kI * bessel::h0_1(w);
    r.Phi = -0.25 * kI * kappa * kappa * (bessel::h1_1(w) / w);
    r.Psi = -0.25 * kI * kappa * kappa * kappa * kappa *
            (bessel::h0_1(w) - 2.0 * bessel::h1_1(w) / w) / (w * w);
    return r;
}

Radial radial3(Cplx kappa, double rho) {
    require_valid_wavenumber(kappa);
    require_rho(rho);
    const Cplx e = std::exp(kI * kappa * rho);
    Radial r;
    r.G = e / (4.0 * kPi * rho);
    r.Phi = e * (kI * kappa * rho - 1.0) / (4.0 * kPi * rho * rho * rho);
    r.Psi = e * (3.0 - 3.0 * kI * kappa * rho - kappa * kappa * rho * rho) /
            (4.0 * kPi * rho * rho * rho * rho * rho);
    return r;
}

CVec2 grad_Ga2(Cplx kappa, const Eigen::Vector2d& z) {
    return radial2(kappa, z.norm()).Phi * z.cast<Cplx>();
}

CVec3 grad_Ga3(Cplx kappa, const Eigen::Vector3d& z) {
    return radial3(kappa, z.norm()).Phi * z.cast<Cplx>();
}

CMat2 hess_Ga2(Cplx kappa, const Eigen::Vector2d& z) {
    const Radial r = radial2(kappa, z.norm());
    const CVec2 zc = z.cast<Cplx>();
    return r.Psi * zc * zc.transpose() + r.Phi * CMat2::Identity();
}

CMat3 hess_Ga3(Cplx kappa, const Eigen::Vector3d& z) {
    const Radial r = radial3(kappa, z.norm());
    const CVec3 zc = z.cast<Cplx>();
    return r.Psi * zc * zc.transpose() + r.Phi * CMat3::Identity();
}

RadialSplit2 radial_split2(Cplx kappa, double rho, double q) {
    require_valid_wavenumber(kappa);
    if (!(q > 0.0)) throw ParameterError("q = rho/s must be positive");
    const Cplx w = kappa * rho;  // diagonal entries call with rho = 0
    const Cplx lam = std::log(0.5 * kappa * q) + bessel::kEulerGamma;
    const Cplx k2 = kappa * kappa;
    const Cplx k4 = k2 * k2;

    const Cplx J0 = (rho == 0.0) ? Cplx(1.0, 0.0) : bessel::j0(w);
    const Cplx j1o = (rho == 0.0) ? Cplx(0.5, 0.0) : bessel::j1_over(w);
    const Cplx y0r = (rho == 0.0) ? Cplx(0.0, 0.0) : bessel::y0_reg(w);
    const Cplx r1 = bessel::r1n(w.real() == 0.0 && w.imag() == 0.0 ? Cplx(0.0, 0.0) : w);

    RadialSplit2 s;
    s.aG = -J0 / (4.0 * kPi);
    s.bG = 0.25 * kI * J0 - lam * J0 / (2.0 * kPi) - 0.25 * y0r;
    s.aPhi = k2 / (4.0 * kPi) * j1o;
    s.bPhi = -0.25 * kI * k2 * j1o + k2 / (2.0 * kPi) * lam * j1o + 0.25 * k2 * r1;
    const Cplx t0 = bessel::j0t(w) - 2.0 * bessel::j1t(w);
    const Cplx t1 = bessel::y0t(w) - 2.0 * bessel::r1t(w);
    s.aPsi = k4 / (4.0 * kPi) * t0;
    s.bPsi = -0.25 * kI * k4 * (t0 * (1.0 + (2.0 * kI / kPi) * lam) + kI * t1);
    return s;
}

CMat3 elastic_Ge(Cplx ks, Cplx kp, double mu, const Eigen::Vector3d& z) {
    require_valid_wavenumber(ks);
    require_valid_wavenumber(kp);
    if (!(mu > 0.0)) throw ParameterError("mu must be positive");
    require_rho(z.norm());
    const CMat3 hess_diff = hess_Ga3(ks, z) - hess_Ga3(kp, z);
    return (helmholtz_Ga3(ks, z) * CMat3::Identity() + hess_diff / (ks * ks)) / mu;
}

CVec3 elastic_navier_residual(double omega, double rho_density, double mu, double lambda,
                              const Eigen::Vector3d& z, int column) {
    if (column < 0 || column > 2) throw ParameterError("column must be 0..2");
    const Cplx ks = omega * std::sqrt(rho_density / mu);
    const Cplx kp = omega * std::sqrt(rho_density / (lambda + 2.0 * mu));
    CVec3 ej = CVec3::Zero();
    ej[column] = 1.0;

    // Lap(Ge e_j) via Lap Ga = -kappa^2 Ga, applied inside the Hessian term
    const CMat3 hess_lap =
        -ks * ks * hess_Ga3(ks, z) + kp * kp * hess_Ga3(kp, z);
    const CVec3 lap_col =
        (-ks * ks * helmholtz_Ga3(ks, z) * ej + hess_lap * ej / (ks * ks)) / mu;
    // grad div (Ge e_j) = (kp^2 / (mu ks^2)) Hess Ga(kp) e_j
    const CVec3 graddiv_col = (kp * kp) / (mu * ks * ks) * (hess_Ga3(kp, z) * ej);
    const CVec3 u = elastic_Ge(ks, kp, mu, z) * ej;
    return -mu * lap_col - (mu + lambda) * graddiv_col - rho_density * omega * omega * u;
}

Cplx boundary_derivative_kernel2(Cplx kappa, const Eigen::Vector2d& x, const Eigen::Vector2d& y,
                                 const Eigen::Vector2d& xi_x, const Eigen::Vector2d& xi_y,
                                 double div_xi_y) {
    const Eigen::Vector2d z = x - y;
    const Radial r = radial2(kappa, z.norm());
    const Eigen::Vector2d delta = xi_x - xi_y;
    return r.Phi * (z.dot(delta)) + r.G * div_xi_y;
}

Cplx potential_derivative_kernel2(Cplx kappa, const Eigen::Vector2d& x, const Eigen::Vector2d& y,
                                  const Eigen::Vector2d& xi_y, double div_xi_y) {
    const Eigen::Vector2d z = x - y;
    const Radial r = radial2(kappa, z.norm());
    return -r.Phi * (z.dot(xi_y)) + r.G * div_xi_y;
}

Cplx potential_derivative_kernel3(Cplx kappa, const Eigen::Vector3d& x, const Eigen::Vector3d& y,
                                  const Eigen::Vector3d& xi_y, double div_xi_y) {
    const Eigen::Vector3d z = x - y;
    const Radial r = radial3(kappa, z.norm());
    return -r.Phi * (z.dot(xi_y)) + r.G * div_xi_y;
}

double doublelayer_flatness(const Curve& c, double t_x, double t_y) {
    const Vec2 x = c.position(t_x);
    const Vec2 y = c.position(t_y);
    const Vec2 z = x - y;
    const double rho2 = z.squaredNorm();
    if (!(rho2 > 0.0)) throw SingularArgument("flatness ratio at x = y");
    return c.outward_normal(t_y).dot(z) / rho2;
}

Cplx acoustic3d_expansion_remainder(Cplx kappa, double rho) {
    const Cplx G = helmholtz_Ga3(kappa, Eigen::Vector3d(rho, 0.0, 0.0));
    const Cplx k = kappa;
    const Cplx model = (1.0 / rho + kI * k - 0.5 * k * k * rho - kI * k * k * k * rho * rho / 6.0) /
                       (4.0 * kPi);
    return G - model;
}

namespace {

std::vector<Eigen::VectorXd> sample_directions(int dim, int count, std::uint64_t seed) {
    XorShift64Star rng(seed);
    std::vector<Eigen::VectorXd> dirs;
    dirs.reserve(count);
    while (static_cast<int>(dirs.size()) < count) {
        Eigen::VectorXd v(dim);
        for (int i = 0; i < dim; ++i) v[i] = 2.0 * rng.uniform() - 1.0;
        const double n = v.norm();
        if (n < 0.1 || n > 1.0) continue;
        dirs.push_back(v / n);
    }
    return dirs;
}

double fit_slope(const std::vector<double>& radii, const std::vector<double>& mags) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(radii.size());
    for (std::size_t i = 0; i < radii.size(); ++i) {
        const double x = std::log(radii[i]);
        const double y = std::log(std::max(mags[i], 1e-300));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

ClassCertifyReport class_certify(
    int dim, int m,
    const std::function<double(const Eigen::VectorXd&)>& value,
    const std::function<std::vector<double>(const Eigen::VectorXd&)>& dmag,
    const std::function<Eigen::VectorXcd(const Eigen::VectorXd&)>& dm_flat,
    int max_alpha, int odd_pairs, std::uint64_t seed) {
    ClassCertifyReport report;
    const auto dirs = sample_directions(dim, 16, seed);

    std::vector<double> radii;
    for (int k = 0; k < 8; ++k) radii.push_back(0.128 * std::pow(2.0, -k));

    // mean magnitude over directions, per radius and derivative order
    std::vector<std::vector<double>> mags(max_alpha + 1, std::vector<double>(radii.size(), 0.0));
    for (std::size_t ri = 0; ri < radii.size(); ++ri) {
        for (const auto& d : dirs) {
            const Eigen::VectorXd z = radii[ri] * d;
            mags[0][ri] += value(z);
            if (max_alpha >= 1) {
                const std::vector<double> dm = dmag(z);
                for (int a = 1; a <= max_alpha && a <= static_cast<int>(dm.size()); ++a) {
                    mags[a][ri] += dm[a - 1];
                }
            }
        }
        for (auto& row : mags) row[ri] /= dirs.size();
    }

    bool all_pass = true;
    for (int a = 0; a <= max_alpha; ++a) {
        SlopeCheck chk;
        chk.alpha = a;
        chk.nominal = -(dim - 1) + m - a;
        if (chk.nominal >= 0.0) {
            // bounded-up-to-log regime: grade |G|/(1 + |ln rho|)
            chk.log_normalized = true;
            std::vector<double> norm(radii.size());
            for (std::size_t ri = 0; ri < radii.size(); ++ri) {
                norm[ri] = mags[a][ri] / (1.0 + std::abs(std::log(radii[ri])));
            }
            chk.fitted = fit_slope(radii, norm);
            chk.pass = chk.fitted >= -0.1;
        } else {
            chk.fitted = fit_slope(radii, mags[a]);
            chk.pass = std::abs(chk.fitted - chk.nominal) <= 0.1;
        }
        all_pass = all_pass && chk.pass;
        report.slopes.push_back(chk);
    }

    // D^m G odd: D^m G(-z) = -D^m G(z)
    const auto odd_dirs = sample_directions(dim, odd_pairs, seed ^ 0xABCDEF);
    XorShift64Star rng(seed ^ 0x1234567);
    double worst = 0.0;
    for (const auto& d : odd_dirs) {
        const double rho = rng.uniform(1e-3, 0.128);
        const Eigen::VectorXd z = rho * d;
        const Eigen::VectorXcd plus = dm_flat(z);
        const Eigen::VectorXcd minus = dm_flat(-z);
        const double scale = std::max(1e-300, plus.cwiseAbs().maxCoeff());
        worst = std::max(worst, (plus + minus).cwiseAbs().maxCoeff() / scale);
    }
    report.odd_violation = worst;
    report.odd_pass = worst <= 1e-10;
    report.pass = all_pass && report.odd_pass;
    return report;
}

}  // namespace shapebie

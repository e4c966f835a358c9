// Copyright (c) 2026 the shapebie authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "shapebie/geometry2d.hpp"
#include "shapebie/geometry3d.hpp"

namespace shapebie {

// Boundary data together with the exact ambient jet of a declared smooth
// extension. The tangential operators depend only on the boundary values;
// extension independence is a tested property.
struct ScalarJet2 {
    std::string name;
    std::function<double(const Vec2&)> value;
    std::function<Vec2(const Vec2&)> grad;
};

struct VectorJet2 {
    std::string name;
    std::function<Vec2(const Vec2&)> value;
    // grad_cols(i, j) = d_i u_j  (column j is the ambient gradient of u_j)
    std::function<Mat2(const Vec2&)> grad_cols;
};

struct ScalarJet3 {
    std::string name;
    std::function<double(const Vec3&)> value;
    std::function<Vec3(const Vec3&)> grad;
};

struct VectorJet3 {
    std::string name;
    std::function<Vec3(const Vec3&)> value;
    std::function<Mat3(const Vec3&)> grad_cols;
};

// grad_Gamma u = grad u - (grad u . n) n, evaluated nodewise from the jet
Eigen::Matrix2Xd surface_gradient(const Grid2& g, const ScalarJet2& u);
Eigen::Matrix3Xd surface_gradient(const Grid3& g, const ScalarJet3& u);

// div_Gamma v = div v - ([grad v] n . n)
Eigen::VectorXd surface_divergence(const Grid2& g, const VectorJet2& v);
Eigen::VectorXd surface_divergence(const Grid3& g, const VectorJet3& v);

// Guenter derivative M v = (grad v - (div v) Id) n  (d = 3 only)
Eigen::Matrix3Xd gunter_M(const Grid3& g, const VectorJet3& v);
Eigen::Matrix2Xd gunter_M(const Grid2& g, const VectorJet2& v);  // throws DimensionError

// componentwise Guenter derivative m_jk u = n_k d_j u - n_j d_k u
Eigen::VectorXd gunter_mjk(const Grid3& g, const ScalarJet3& u, int j, int k);

// Stokes-formula residuals on the closed surface:
//   | int (m_jk u) w ds + int u (m_jk w) ds |      (scalar form)
//   | int (M v) . w ds - int v . (M w) ds |        (vector form)
double stokes_residual(const Grid3& g, const ScalarJet3& u, const ScalarJet3& w, int j, int k);
double stokes_residual(const Grid3& g, const VectorJet3& v, const VectorJet3& w);

// transported tangential gradient G(r0) u = tau grad_{Gamma_r0} tau^{-1} u
Eigen::Matrix2Xd transported_gradient(const Grid2& g, const FieldOnCurve& r0, const ScalarJet2& u);
Eigen::Matrix3Xd transported_gradient(const Grid3& g, const FieldOnSurf& r0, const ScalarJet3& u);
std::vector<Mat2> transported_gradient(const Grid2& g, const FieldOnCurve& r0, const VectorJet2& u);
std::vector<Mat3> transported_gradient(const Grid3& g, const FieldOnSurf& r0, const VectorJet3& u);
Eigen::VectorXd transported_divergence(const Grid2& g, const FieldOnCurve& r0, const VectorJet2& u);
Eigen::VectorXd transported_divergence(const Grid3& g, const FieldOnSurf& r0, const VectorJet3& u);

// First derivative of r -> tau_r grad_{Gamma_r} tau_r^{-1} applied to u:
//   -[G(r0) xi] G(r0) u + (G(r0) u . [G(r0) xi] N(r0)) N(r0)
Eigen::Matrix2Xd dG(const Grid2& g, const FieldOnCurve& r0, const FieldOnCurve& xi, const ScalarJet2& u);
Eigen::Matrix3Xd dG(const Grid3& g, const FieldOnSurf& r0, const FieldOnSurf& xi, const ScalarJet3& u);

// First derivative of r -> tau_r div_{Gamma_r} tau_r^{-1} applied to u:
//   -Tr([G(r0) xi][G(r0) u]) + ([G(r0) u] N(r0) . [G(r0) xi] N(r0))
Eigen::VectorXd dD(const Grid2& g, const FieldOnCurve& r0, const FieldOnCurve& xi, const VectorJet2& u);
Eigen::VectorXd dD(const Grid3& g, const FieldOnSurf& r0, const FieldOnSurf& xi, const VectorJet3& u);

// Max-node discrepancy between the two traction forms
//   2 mu dv/dn + lambda (div v) n + mu n x curl v
//   2 mu M v + (lambda + 2 mu)(div v) n - mu n x curl v
double traction_rewrite_check(const Grid3& g, const VectorJet3& v, double mu, double lambda);

}  // namespace shapebie

// Copyright (c) 2026 the shapebie authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace shapebie {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Closed surface given by a single sphere-like chart (u, v) = (polar, azimuth),
// u in (0, pi), v in [0, 2pi). Nodes never sit on the chart-degenerate poles.
class Surf {
  public:
    virtual ~Surf() = default;
    virtual Vec3 position(double u, double v) const = 0;
    virtual Vec3 du(double u, double v) const = 0;
    virtual Vec3 dv(double u, double v) const = 0;
    virtual Vec3 duu(double u, double v) const = 0;
    virtual Vec3 duv(double u, double v) const = 0;
    virtual Vec3 dvv(double u, double v) const = 0;
    virtual Vec3 interior_point() const { return Vec3::Zero(); }
    virtual std::string name() const = 0;
};

using SurfPtr = std::shared_ptr<const Surf>;

SurfPtr make_sphere();
SurfPtr make_ellipsoid(double a, double b, double c);

class FieldOnSurf {
  public:
    virtual ~FieldOnSurf() = default;
    virtual Vec3 value(double u, double v) const = 0;
    virtual Vec3 pdu(double u, double v) const = 0;
    virtual Vec3 pdv(double u, double v) const = 0;
    virtual std::string name() const = 0;

    virtual bool has_ambient() const { return false; }
    virtual Vec3 ambient_value(const Vec3&) const;
    virtual Mat3 ambient_jacobian(const Vec3&) const;
};

using Field3Ptr = std::shared_ptr<const FieldOnSurf>;

Field3Ptr make_constant_field3(const Vec3& v);
Field3Ptr make_normal_field3(SurfPtr s);  // ambient grad F/|grad F| of the defining level set
Field3Ptr make_poly_field3(SurfPtr s, int which);   // fixed low-order polynomial fields
Field3Ptr make_shear_field3(SurfPtr s, int axis);
Field3Ptr scale_field3(double c, Field3Ptr f);
Field3Ptr add_fields3(Field3Ptr f, Field3Ptr g);

SurfPtr deformed_surf(SurfPtr base, Field3Ptr r);
SurfPtr deform(SurfPtr base, Field3Ptr r);

std::vector<Vec3> tangent_basis(const Surf& s, int chart_index, double u, double v);

// Tensor rule: Gauss-Legendre in cos(u) x uniform in v. Exact area 4pi on the
// unit sphere; nodes avoid the poles by construction.
struct Grid3 {
    SurfPtr surf;
    int Nu = 0, Nv = 0;
    Eigen::VectorXd u, v;                  // per node (flattened, size Nu*Nv)
    Eigen::Matrix3Xd node, e1, e2, normal;
    Eigen::VectorXd area_el;               // |e1 x e2|
    Eigen::VectorXd weight;

    int size() const { return Nu * Nv; }
    static Grid3 make(SurfPtr surf, int Nu, int Nv);
};

Eigen::Matrix3Xd wedge_W(const Grid3& g, const FieldOnSurf& r);
Eigen::VectorXd surface_jacobian(const Grid3& g, const FieldOnSurf& r);
Eigen::Matrix3Xd transported_normal(const Grid3& g, const FieldOnSurf& r);
std::vector<Mat3> transported_grad(const Grid3& g, const FieldOnSurf& r0, const FieldOnSurf& xi);
Eigen::VectorXd dJ(const Grid3& g, const FieldOnSurf& r0, const FieldOnSurf& xi);
Eigen::Matrix3Xd dN(const Grid3& g, const FieldOnSurf& r0, const FieldOnSurf& xi);
Eigen::Matrix3Xd dm_W(const Grid3& g, const FieldOnSurf& r0, const FieldOnSurf& xi, int m);
Eigen::VectorXd d2J(const Grid3& g, const FieldOnSurf& xi1, const FieldOnSurf& xi2);
Eigen::Matrix3Xd d2N(const Grid3& g, const FieldOnSurf& xi1, const FieldOnSurf& xi2);

// Gauss-Legendre nodes/weights on [-1, 1]
void gauss_legendre(int n, Eigen::VectorXd& x, Eigen::VectorXd& w);

}  // namespace shapebie

// Copyright (c) 2026 the shapebie authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

namespace shapebie {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

inline Vec2 rot90cw(const Vec2& a) { return Vec2(a.y(), -a.x()); }

// Smooth closed curve given by a single chart over theta in [0, 2pi), with
// exact parametric derivatives. Orientation is counterclockwise, so
// rot90cw(x') points outward.
class Curve {
  public:
    virtual ~Curve() = default;
    virtual Vec2 position(double t) const = 0;
    virtual Vec2 d1(double t) const = 0;
    virtual Vec2 d2(double t) const = 0;
    virtual Vec2 d3(double t) const = 0;
    virtual Vec2 interior_point() const { return Vec2::Zero(); }
    virtual std::string name() const = 0;

    double speed(double t) const { return d1(t).norm(); }
    Vec2 unit_tangent(double t) const { return d1(t).normalized(); }
    Vec2 outward_normal(double t) const { return rot90cw(d1(t)).normalized(); }
    // (x1' x2'' - x2' x1'') / |x'|^3, positive for a counterclockwise circle
    double signed_curvature(double t) const;
};

using CurvePtr = std::shared_ptr<const Curve>;

// Trigonometric-polynomial chart: x_i(t) = sum_k a_{ik} cos(kt) + b_{ik} sin(kt).
// Covers circle, ellipse and the kite; derivatives of any order are exact.
class TrigCurve : public Curve {
  public:
    TrigCurve(std::string name, std::vector<double> ax, std::vector<double> bx,
              std::vector<double> ay, std::vector<double> by);

    Vec2 position(double t) const override { return eval(t, 0); }
    Vec2 d1(double t) const override { return eval(t, 1); }
    Vec2 d2(double t) const override { return eval(t, 2); }
    Vec2 d3(double t) const override { return eval(t, 3); }
    std::string name() const override { return name_; }

  private:
    Vec2 eval(double t, int order) const;
    std::string name_;
    std::vector<double> ax_, bx_, ay_, by_;
};

CurvePtr make_circle();
CurvePtr make_ellipse(double a, double b);
CurvePtr make_kite();

// Deformation field bound to a curve: values and exact parametric derivatives
// along the chart. Fields defined by an ambient formula also expose the exact
// ambient Jacobian of that extension, with rows holding component gradients:
// ambient_jacobian(i, j) = d xi_i / d x_j.
class FieldOnCurve {
  public:
    virtual ~FieldOnCurve() = default;
    virtual Vec2 value(double t) const = 0;
    virtual Vec2 pd1(double t) const = 0;
    virtual Vec2 pd2(double t) const = 0;
    virtual std::string name() const = 0;

    virtual bool has_ambient() const { return false; }
    virtual Vec2 ambient_value(const Vec2&) const;
    virtual Mat2 ambient_jacobian(const Vec2&) const;

    // sup over sampled nodes of |value| and |pd1| (the C^1 size of the field)
    double norm1(const Curve& c, int samples = 256) const;
};

using Field2Ptr = std::shared_ptr<const FieldOnCurve>;

Field2Ptr make_constant_field2(const Vec2& v);
Field2Ptr make_normal_field2(CurvePtr curve);           // parametric n(t); ambient x/|x| on the circle
Field2Ptr make_fourier_field2(int k, double a, double b);  // (a cos kt, b sin kt)
Field2Ptr make_shear_field2(CurvePtr curve, int axis);     // x -> x_{(axis+1)%2} e_axis
Field2Ptr scale_field2(double c, Field2Ptr f);
Field2Ptr add_fields2(Field2Ptr f, Field2Ptr g);

// Curve deformed by x -> x + r(x); charts and their derivatives compose
// exactly through the parametric jets of r.
CurvePtr deformed_curve(CurvePtr base, Field2Ptr r);

// deform with the admissibility check: min pairwise node distance >= 1e-10
// and Gram determinant > 1e-12 on a probe grid.
CurvePtr deform(CurvePtr base, Field2Ptr r, int check_nodes = 256);

std::vector<Vec2> tangent_basis(const Curve& c, int chart_index, double t);

// Quadrature grid: uniform theta nodes, weights (2pi/N)|x'|.
struct Grid2 {
    CurvePtr curve;
    int N = 0;
    Eigen::VectorXd theta;
    Eigen::Matrix2Xd node;
    Eigen::VectorXd speed;
    Eigen::Matrix2Xd normal;
    Eigen::VectorXd weight;

    static Grid2 make(CurvePtr curve, int N);
};

// Coefficient functions of the boundary perturbation and their directional
// derivatives, evaluated per node. All functions are pure.
Eigen::Matrix2Xd wedge_W(const Grid2& g, const FieldOnCurve& r);
Eigen::VectorXd surface_jacobian(const Grid2& g, const FieldOnCurve& r);
Eigen::Matrix2Xd transported_normal(const Grid2& g, const FieldOnCurve& r);

// first derivative of J at r0 in direction xi
Eigen::VectorXd dJ(const Grid2& g, const FieldOnCurve& r0, const FieldOnCurve& xi);
// first derivative of the transported normal at r0
Eigen::Matrix2Xd dN(const Grid2& g, const FieldOnCurve& r0, const FieldOnCurve& xi);
// m-th equal-direction derivative of W at r0 (identically zero for m >= 2)
Eigen::Matrix2Xd dm_W(const Grid2& g, const FieldOnCurve& r0, const FieldOnCurve& xi, int m);
// second derivatives at r = 0
Eigen::VectorXd d2J(const Grid2& g, const FieldOnCurve& xi1, const FieldOnCurve& xi2);
Eigen::Matrix2Xd d2N(const Grid2& g, const FieldOnCurve& xi1, const FieldOnCurve& xi2);

// tangential jacobian matrix [grad_Gamma xi] of the transported field at r0,
// per node (the building block of the formulas above)
std::vector<Mat2> transported_grad(const Grid2& g, const FieldOnCurve& r0, const FieldOnCurve& xi);

// pullback of an ambient function to the reference grid: u(x + r(x)) per node
Eigen::VectorXd pullback_values(const Grid2& g, const FieldOnCurve& r,
                                const std::function<double(const Vec2&)>& u);
// inverse transport on node values: a function on Gamma becomes the function
// on Gamma_r with the same value at the deformed node (same parameter), so
// pullback(pushforward(u)) is the identity on nodal data
Eigen::VectorXd pushforward_values(const Grid2& g, const FieldOnCurve& r,
                                   const Eigen::VectorXd& u_on_reference);

// shape derivative from material derivative: u'_0 = udot_0 - xi . grad u_0
Eigen::VectorXd material_to_shape(const Eigen::VectorXd& u_dot, const Eigen::Matrix2Xd& grad_u0,
                                  const Grid2& g, const FieldOnCurve& xi);

}  // namespace shapebie

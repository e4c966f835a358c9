// Copyright (c) 2026 the shapebie authors
// SPDX-License-Identifier: Apache-2.0
#include "shapebie/geometry3d.hpp"

#include <cmath>

#include "shapebie/coeff_core.hpp"
#include "shapebie/errors.hpp"

namespace shapebie {

namespace {
constexpr double kPi = 3.14159265358979323846264338;
constexpr double kTwoPi = 2.0 * kPi;

class EllipsoidSurf final : public Surf {
  public:
    EllipsoidSurf(double a, double b, double c, std::string name)
        : a_(a), b_(b), c_(c), name_(std::move(name)) {
        if (a <= 0 || b <= 0 || c <= 0) throw ParameterError("ellipsoid semi-axes must be positive");
    }
    Vec3 position(double u, double v) const override {
        return Vec3(a_ * std::sin(u) * std::cos(v), b_ * std::sin(u) * std::sin(v), c_ * std::cos(u));
    }
    Vec3 du(double u, double v) const override {
        return Vec3(a_ * std::cos(u) * std::cos(v), b_ * std::cos(u) * std::sin(v), -c_ * std::sin(u));
    }
    Vec3 dv(double u, double v) const override {
        return Vec3(-a_ * std::sin(u) * std::sin(v), b_ * std::sin(u) * std::cos(v), 0.0);
    }
    Vec3 duu(double u, double v) const override { return -position(u, v); }
    Vec3 duv(double u, double v) const override {
        return Vec3(-a_ * std::cos(u) * std::sin(v), b_ * std::cos(u) * std::cos(v), 0.0);
    }
    Vec3 dvv(double u, double v) const override {
        return Vec3(-a_ * std::sin(u) * std::cos(v), -b_ * std::sin(u) * std::sin(v), 0.0);
    }
    std::string name() const override { return name_; }
    double semi(int i) const { return i == 0 ? a_ : (i == 1 ? b_ : c_); }

  private:
    double a_, b_, c_;
    std::string name_;
};

class ConstantField3 final : public FieldOnSurf {
  public:
    explicit ConstantField3(const Vec3& v) : v_(v) {}
    Vec3 value(double, double) const override { return v_; }
    Vec3 pdu(double, double) const override { return Vec3::Zero(); }
    Vec3 pdv(double, double) const override { return Vec3::Zero(); }
    bool has_ambient() const override { return true; }
    Vec3 ambient_value(const Vec3&) const override { return v_; }
    Mat3 ambient_jacobian(const Vec3&) const override { return Mat3::Zero(); }
    std::string name() const override { return "constant"; }

  private:
    Vec3 v_;
};

// Field defined by an ambient closed form; parametric derivatives follow by
// the chain rule through the chart.
class AmbientField3 : public FieldOnSurf {
  public:
    explicit AmbientField3(SurfPtr s) : s_(std::move(s)) {}
    Vec3 value(double u, double v) const override { return ambient_value(s_->position(u, v)); }
    Vec3 pdu(double u, double v) const override {
        return ambient_jacobian(s_->position(u, v)) * s_->du(u, v);
    }
    Vec3 pdv(double u, double v) const override {
        return ambient_jacobian(s_->position(u, v)) * s_->dv(u, v);
    }
    bool has_ambient() const override { return true; }

  protected:
    SurfPtr s_;
};

class NormalField3 final : public AmbientField3 {
  public:
    explicit NormalField3(SurfPtr s) : AmbientField3(s) {
        auto* e = dynamic_cast<const EllipsoidSurf*>(s.get());
        if (!e) throw ParameterError("normal field needs an ellipsoid-type surface");
        for (int i = 0; i < 3; ++i) inv2_[i] = 1.0 / (e->semi(i) * e->semi(i));
    }
    Vec3 ambient_value(const Vec3& x) const override {
        const Vec3 grad(2.0 * inv2_[0] * x[0], 2.0 * inv2_[1] * x[1], 2.0 * inv2_[2] * x[2]);
        return grad / grad.norm();
    }
    Mat3 ambient_jacobian(const Vec3& x) const override {
        const Vec3 grad(2.0 * inv2_[0] * x[0], 2.0 * inv2_[1] * x[1], 2.0 * inv2_[2] * x[2]);
        const double m = grad.norm();
        const Vec3 n = grad / m;
        Mat3 Dg = Mat3::Zero();
        Dg.diagonal() = Vec3(2.0 * inv2_[0], 2.0 * inv2_[1], 2.0 * inv2_[2]);
        return (Mat3::Identity() - n * n.transpose()) * Dg / m;
    }
    std::string name() const override { return "normal"; }

  private:
    double inv2_[3];
};

class PolyField3 final : public AmbientField3 {
  public:
    PolyField3(SurfPtr s, int which) : AmbientField3(std::move(s)), which_(which) {
        if (which < 1 || which > 3) throw ParameterError("poly3d index must be 1..3");
    }
    Vec3 ambient_value(const Vec3& x) const override {
        switch (which_) {
            case 1: return Vec3(x[1] * x[2], x[0] * x[2], x[0] * x[1]);
            case 2: return Vec3(x[0] * x[1], x[1] * x[2], x[2] * x[0]);
            default: return Vec3(x[0] * x[0], x[1] * x[1], x[2] * x[2]);
        }
    }
    Mat3 ambient_jacobian(const Vec3& x) const override {
        Mat3 J;
        switch (which_) {
            case 1:
                J << 0, x[2], x[1], x[2], 0, x[0], x[1], x[0], 0;
                break;
            case 2:
                J << x[1], x[0], 0, 0, x[2], x[1], x[2], 0, x[0];
                break;
            default:
                J = Mat3::Zero();
                J.diagonal() = 2.0 * x;
        }
        return J;
    }
    std::string name() const override { return "poly3d(" + std::to_string(which_) + ")"; }

  private:
    int which_;
};

class ShearField3 final : public AmbientField3 {
  public:
    ShearField3(SurfPtr s, int axis) : AmbientField3(std::move(s)), axis_(axis) {
        if (axis < 0 || axis > 2) throw ParameterError("shear axis must be 0..2");
    }
    Vec3 ambient_value(const Vec3& x) const override {
        Vec3 v = Vec3::Zero();
        v[axis_] = x[(axis_ + 1) % 3];
        return v;
    }
    Mat3 ambient_jacobian(const Vec3&) const override {
        Mat3 J = Mat3::Zero();
        J(axis_, (axis_ + 1) % 3) = 1.0;
        return J;
    }
    std::string name() const override { return "shear(" + std::to_string(axis_) + ")"; }

  private:
    int axis_;
};

class ScaledField3 final : public FieldOnSurf {
  public:
    ScaledField3(double c, Field3Ptr f) : c_(c), f_(std::move(f)) {}
    Vec3 value(double u, double v) const override { return c_ * f_->value(u, v); }
    Vec3 pdu(double u, double v) const override { return c_ * f_->pdu(u, v); }
    Vec3 pdv(double u, double v) const override { return c_ * f_->pdv(u, v); }
    bool has_ambient() const override { return f_->has_ambient(); }
    Vec3 ambient_value(const Vec3& x) const override { return c_ * f_->ambient_value(x); }
    Mat3 ambient_jacobian(const Vec3& x) const override { return c_ * f_->ambient_jacobian(x); }
    std::string name() const override { return std::to_string(c_) + "*" + f_->name(); }

  private:
    double c_;
    Field3Ptr f_;
};

class SumField3 final : public FieldOnSurf {
  public:
    SumField3(Field3Ptr f, Field3Ptr g) : f_(std::move(f)), g_(std::move(g)) {}
    Vec3 value(double u, double v) const override { return f_->value(u, v) + g_->value(u, v); }
    Vec3 pdu(double u, double v) const override { return f_->pdu(u, v) + g_->pdu(u, v); }
    Vec3 pdv(double u, double v) const override { return f_->pdv(u, v) + g_->pdv(u, v); }
    bool has_ambient() const override { return f_->has_ambient() && g_->has_ambient(); }
    Vec3 ambient_value(const Vec3& x) const override {
        return f_->ambient_value(x) + g_->ambient_value(x);
    }
    Mat3 ambient_jacobian(const Vec3& x) const override {
        return f_->ambient_jacobian(x) + g_->ambient_jacobian(x);
    }
    std::string name() const override { return f_->name() + "+" + g_->name(); }

  private:
    Field3Ptr f_, g_;
};

class DeformedSurf final : public Surf {
  public:
    DeformedSurf(SurfPtr base, Field3Ptr r) : base_(std::move(base)), r_(std::move(r)) {}
    Vec3 position(double u, double v) const override {
        return base_->position(u, v) + r_->value(u, v);
    }
    Vec3 du(double u, double v) const override { return base_->du(u, v) + r_->pdu(u, v); }
    Vec3 dv(double u, double v) const override { return base_->dv(u, v) + r_->pdv(u, v); }
    Vec3 duu(double, double) const override {
        throw ParameterError("second derivatives of a deformed 3d chart are not available");
    }
    Vec3 duv(double, double) const override {
        throw ParameterError("second derivatives of a deformed 3d chart are not available");
    }
    Vec3 dvv(double, double) const override {
        throw ParameterError("second derivatives of a deformed 3d chart are not available");
    }
    Vec3 interior_point() const override { return base_->interior_point(); }
    std::string name() const override { return base_->name() + "+" + r_->name(); }

  private:
    SurfPtr base_;
    Field3Ptr r_;
};

}  // namespace

Vec3 FieldOnSurf::ambient_value(const Vec3&) const {
    throw ParameterError("field '" + name() + "' declares no ambient extension");
}

Mat3 FieldOnSurf::ambient_jacobian(const Vec3&) const {
    throw ParameterError("field '" + name() + "' declares no ambient extension");
}

SurfPtr make_sphere() { return std::make_shared<EllipsoidSurf>(1.0, 1.0, 1.0, "sphere"); }
SurfPtr make_ellipsoid(double a, double b, double c) {
    return std::make_shared<EllipsoidSurf>(a, b, c, "ellipsoid");
}

Field3Ptr make_constant_field3(const Vec3& v) { return std::make_shared<ConstantField3>(v); }
Field3Ptr make_normal_field3(SurfPtr s) { return std::make_shared<NormalField3>(std::move(s)); }
Field3Ptr make_poly_field3(SurfPtr s, int which) {
    return std::make_shared<PolyField3>(std::move(s), which);
}
Field3Ptr make_shear_field3(SurfPtr s, int axis) {
    return std::make_shared<ShearField3>(std::move(s), axis);
}
Field3Ptr scale_field3(double c, Field3Ptr f) { return std::make_shared<ScaledField3>(c, std::move(f)); }
Field3Ptr add_fields3(Field3Ptr f, Field3Ptr g) {
    return std::make_shared<SumField3>(std::move(f), std::move(g));
}

SurfPtr deformed_surf(SurfPtr base, Field3Ptr r) {
    return std::make_shared<DeformedSurf>(std::move(base), std::move(r));
}

SurfPtr deform(SurfPtr base, Field3Ptr r) {
    auto defo = deformed_surf(base, r);
    // probe grid for the admissibility thresholds
    const int Nu = 12, Nv = 24;
    std::vector<Vec3> pts;
    pts.reserve(Nu * Nv);
    for (int i = 0; i < Nu; ++i) {
        const double u = kPi * (i + 0.5) / Nu;
        for (int j = 0; j < Nv; ++j) {
            const double v = kTwoPi * j / Nv;
            const Vec3 a = defo->du(u, v), b = defo->dv(u, v);
            const double gram = a.squaredNorm() * b.squaredNorm() - std::pow(a.dot(b), 2);
            if (!(gram > 1e-12)) throw DeformationTooLarge("Gram determinant <= 1e-12");
            pts.push_back(defo->position(u, v));
        }
    }
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            if ((pts[i] - pts[j]).norm() < 1e-10) throw DeformationTooLarge("deformed nodes collide");
        }
    }
    return defo;
}

std::vector<Vec3> tangent_basis(const Surf& s, int chart_index, double u, double v) {
    if (chart_index != 0) throw OutOfChart("surface has a single chart");
    if (u <= 0.0 || u >= kPi || v < 0.0 || v > kTwoPi) throw OutOfChart("parameter outside chart");
    return {s.du(u, v), s.dv(u, v)};
}

void gauss_legendre(int n, Eigen::VectorXd& x, Eigen::VectorXd& w) {
    x.resize(n);
    w.resize(n);
    for (int i = 0; i < n; ++i) {
        // Newton iteration from the Chebyshev-like initial guess
        double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = t;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double dp = n * (t * p1 - p0) / (t * t - 1.0);
            const double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-15) break;
        }
        double p0 = 1.0, p1 = t;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        const double dp = n * (t * p1 - p0) / (t * t - 1.0);
        x[i] = t;
        w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
}

Grid3 Grid3::make(SurfPtr surf, int Nu, int Nv) {
    if (Nu < 2 || Nv < 4) throw ParameterError("3d grid too small");
    Grid3 g;
    g.surf = std::move(surf);
    g.Nu = Nu;
    g.Nv = Nv;
    const int M = Nu * Nv;
    g.u.resize(M);
    g.v.resize(M);
    g.node.resize(3, M);
    g.e1.resize(3, M);
    g.e2.resize(3, M);
    g.normal.resize(3, M);
    g.area_el.resize(M);
    g.weight.resize(M);

    Eigen::VectorXd xg, wg;
    gauss_legendre(Nu, xg, wg);
    for (int i = 0; i < Nu; ++i) {
        const double u = std::acos(xg[i]);
        const double su = std::sin(u);
        for (int j = 0; j < Nv; ++j) {
            const double v = kTwoPi * j / Nv;
            const int p = i * Nv + j;
            g.u[p] = u;
            g.v[p] = v;
            g.node.col(p) = g.surf->position(u, v);
            g.e1.col(p) = g.surf->du(u, v);
            g.e2.col(p) = g.surf->dv(u, v);
            const Vec3 cr = g.e1.col(p).cross(g.e2.col(p));
            g.area_el[p] = cr.norm();
            g.normal.col(p) = cr / g.area_el[p];
            // ds = |e1 x e2| du dv and du = dt/sin(u) under t = cos(u)
            g.weight[p] = wg[i] * (kTwoPi / Nv) * g.area_el[p] / su;
        }
    }
    return g;
}

Eigen::Matrix3Xd wedge_W(const Grid3& g, const FieldOnSurf& r) {
    Eigen::Matrix3Xd W(3, g.size());
    for (int p = 0; p < g.size(); ++p) {
        const Vec3 a = g.e1.col(p) + r.pdu(g.u[p], g.v[p]);
        const Vec3 b = g.e2.col(p) + r.pdv(g.u[p], g.v[p]);
        W.col(p) = a.cross(b) / g.area_el[p];
    }
    return W;
}

Eigen::VectorXd surface_jacobian(const Grid3& g, const FieldOnSurf& r) {
    return wedge_W(g, r).colwise().norm();
}

Eigen::Matrix3Xd transported_normal(const Grid3& g, const FieldOnSurf& r) {
    Eigen::Matrix3Xd W = wedge_W(g, r);
    for (int p = 0; p < g.size(); ++p) W.col(p).normalize();
    return W;
}

std::vector<Mat3> transported_grad(const Grid3& g, const FieldOnSurf& r0, const FieldOnSurf& xi) {
    std::vector<Mat3> out(g.size());
    for (int p = 0; p < g.size(); ++p) {
        const double u = g.u[p], v = g.v[p];
        Eigen::Matrix<double, 3, 2> E;
        E.col(0) = g.e1.col(p) + r0.pdu(u, v);
        E.col(1) = g.e2.col(p) + r0.pdv(u, v);
        const Eigen::Matrix2d gram = E.transpose() * E;
        const Eigen::Matrix<double, 3, 2> P = E * gram.inverse();
        Eigen::Matrix<double, 2, 3> D;
        D.row(0) = xi.pdu(u, v).transpose();
        D.row(1) = xi.pdv(u, v).transpose();
        out[p] = P * D;  // column k = tangential gradient of xi_k
    }
    return out;
}

Eigen::VectorXd dJ(const Grid3& g, const FieldOnSurf& r0, const FieldOnSurf& xi) {
    const auto J = surface_jacobian(g, r0);
    const auto grads = transported_grad(g, r0, xi);
    Eigen::VectorXd out(g.size());
    for (int p = 0; p < g.size(); ++p) out[p] = J[p] * grads[p].trace();
    return out;
}

Eigen::Matrix3Xd dN(const Grid3& g, const FieldOnSurf& r0, const FieldOnSurf& xi) {
    const auto Nr = transported_normal(g, r0);
    const auto grads = transported_grad(g, r0, xi);
    Eigen::Matrix3Xd out(3, g.size());
    for (int p = 0; p < g.size(); ++p) out.col(p) = -grads[p] * Nr.col(p);
    return out;
}

Eigen::Matrix3Xd dm_W(const Grid3& g, const FieldOnSurf& r0, const FieldOnSurf& xi, int m) {
    if (m < 1) throw ParameterError("derivative order must be >= 1");
    Eigen::Matrix3Xd out = Eigen::Matrix3Xd::Zero(3, g.size());
    if (m >= 3) return out;  // vanishes for m >= d = 3
    const auto W = wedge_W(g, r0);
    const auto grads = transported_grad(g, r0, xi);
    for (int p = 0; p < g.size(); ++p) {
        const Eigen::MatrixXd A = grads[p].transpose();
        out.col(p) = coeff_Bm(A, m) * W.col(p);
    }
    return out;
}

Eigen::VectorXd d2J(const Grid3& g, const FieldOnSurf& xi1, const FieldOnSurf& xi2) {
    auto zero = make_constant_field3(Vec3::Zero());
    const auto g1 = transported_grad(g, *zero, xi1);
    const auto g2 = transported_grad(g, *zero, xi2);
    Eigen::VectorXd out(g.size());
    for (int p = 0; p < g.size(); ++p) {
        const Vec3 n = g.normal.col(p);
        out[p] = -(g2[p] * g1[p]).trace() + g1[p].trace() * g2[p].trace() +
                 (g1[p] * n).dot(g2[p] * n);
    }
    return out;
}

Eigen::Matrix3Xd d2N(const Grid3& g, const FieldOnSurf& xi1, const FieldOnSurf& xi2) {
    auto zero = make_constant_field3(Vec3::Zero());
    const auto g1 = transported_grad(g, *zero, xi1);
    const auto g2 = transported_grad(g, *zero, xi2);
    Eigen::Matrix3Xd out(3, g.size());
    for (int p = 0; p < g.size(); ++p) {
        const Vec3 n = g.normal.col(p);
        out.col(p) = g2[p] * (g1[p] * n) + g1[p] * (g2[p] * n) - ((g1[p] * n).dot(g2[p] * n)) * n;
    }
    return out;
}

}  // namespace shapebie

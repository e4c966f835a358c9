// Copyright (c) 2026 the shapebie authors
// SPDX-License-Identifier: Apache-2.0
#include "shapebie/geometry2d.hpp"

#include <cmath>
#include <functional>

#include "shapebie/coeff_core.hpp"
#include "shapebie/errors.hpp"

namespace shapebie {

namespace {
constexpr double kTwoPi = 6.28318530717958647692529;
}

double Curve::signed_curvature(double t) const {
    const Vec2 u = d1(t), v = d2(t);
    const double s = u.norm();
    return (u.x() * v.y() - u.y() * v.x()) / (s * s * s);
}

TrigCurve::TrigCurve(std::string name, std::vector<double> ax, std::vector<double> bx,
                     std::vector<double> ay, std::vector<double> by)
    : name_(std::move(name)), ax_(std::move(ax)), bx_(std::move(bx)), ay_(std::move(ay)), by_(std::move(by)) {}

Vec2 TrigCurve::eval(double t, int order) const {
    auto comp = [&](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        const std::size_t K = std::max(a.size(), b.size());
        for (std::size_t k = 0; k < K; ++k) {
            const double ak = k < a.size() ? a[k] : 0.0;
            const double bk = k < b.size() ? b[k] : 0.0;
            const double kd = static_cast<double>(k);
            // d/dt rotates (cos, sin) by pi/2 and scales by k
            double c = std::cos(kd * t), sn = std::sin(kd * t);
            double ca = ak, cb = bk;
            for (int o = 0; o < order; ++o) {
                const double na = cb * kd, nb = -ca * kd;
                ca = na;
                cb = nb;
            }
            s += ca * c + cb * sn;
        }
        return s;
    };
    return Vec2(comp(ax_, bx_), comp(ay_, by_));
}

CurvePtr make_circle() {
    return std::make_shared<TrigCurve>("circle", std::vector<double>{0.0, 1.0}, std::vector<double>{},
                                       std::vector<double>{}, std::vector<double>{0.0, 1.0});
}

CurvePtr make_ellipse(double a, double b) {
    if (a <= 0 || b <= 0) throw ParameterError("ellipse semi-axes must be positive");
    return std::make_shared<TrigCurve>("ellipse", std::vector<double>{0.0, a}, std::vector<double>{},
                                       std::vector<double>{}, std::vector<double>{0.0, b});
}

CurvePtr make_kite() {
    // x(t) = (cos t + 0.65 cos 2t - 0.65, 1.5 sin t)
    return std::make_shared<TrigCurve>("kite", std::vector<double>{-0.65, 1.0, 0.65}, std::vector<double>{},
                                       std::vector<double>{}, std::vector<double>{0.0, 1.5});
}

Vec2 FieldOnCurve::ambient_value(const Vec2&) const {
    throw ParameterError("field '" + name() + "' declares no ambient extension");
}

Mat2 FieldOnCurve::ambient_jacobian(const Vec2&) const {
    throw ParameterError("field '" + name() + "' declares no ambient extension");
}

double FieldOnCurve::norm1(const Curve& c, int samples) const {
    double m = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double t = kTwoPi * i / samples;
        m = std::max(m, value(t).norm());
        m = std::max(m, pd1(t).norm() / std::max(1e-30, c.speed(t)));
    }
    return m;
}

namespace {

class ConstantField2 final : public FieldOnCurve {
  public:
    explicit ConstantField2(const Vec2& v) : v_(v) {}
    Vec2 value(double) const override { return v_; }
    Vec2 pd1(double) const override { return Vec2::Zero(); }
    Vec2 pd2(double) const override { return Vec2::Zero(); }
    bool has_ambient() const override { return true; }
    Vec2 ambient_value(const Vec2&) const override { return v_; }
    Mat2 ambient_jacobian(const Vec2&) const override { return Mat2::Zero(); }
    std::string name() const override { return "constant"; }

  private:
    Vec2 v_;
};

class NormalField2 final : public FieldOnCurve {
  public:
    explicit NormalField2(CurvePtr c) : c_(std::move(c)) { is_circle_ = c_->name() == "circle"; }

    Vec2 value(double t) const override {
        const Vec2 u = c_->d1(t);
        return rot90cw(u) / u.norm();
    }
    Vec2 pd1(double t) const override {
        const Vec2 u = c_->d1(t), up = c_->d2(t);
        const double s = u.norm();
        return rot90cw(up) / s - rot90cw(u) * (u.dot(up)) / (s * s * s);
    }
    Vec2 pd2(double t) const override {
        const Vec2 u = c_->d1(t), up = c_->d2(t), upp = c_->d3(t);
        const double s2 = u.squaredNorm(), s = std::sqrt(s2);
        const double a = u.dot(up);
        const double b = up.squaredNorm() + u.dot(upp);
        return rot90cw(upp) / s - 2.0 * rot90cw(up) * a / (s * s2) -
               rot90cw(u) * (b / (s * s2) - 3.0 * a * a / (s * s2 * s2));
    }
    bool has_ambient() const override { return is_circle_; }
    Vec2 ambient_value(const Vec2& x) const override {
        if (!is_circle_) return FieldOnCurve::ambient_value(x);
        return x / x.norm();
    }
    Mat2 ambient_jacobian(const Vec2& x) const override {
        if (!is_circle_) return FieldOnCurve::ambient_jacobian(x);
        const double r = x.norm();
        return (Mat2::Identity() - (x / r) * (x / r).transpose()) / r;
    }
    std::string name() const override { return "normal"; }

  private:
    CurvePtr c_;
    bool is_circle_ = false;
};

class FourierField2 final : public FieldOnCurve {
  public:
    FourierField2(int k, double a, double b) : k_(k), a_(a), b_(b) {}
    Vec2 value(double t) const override { return Vec2(a_ * std::cos(k_ * t), b_ * std::sin(k_ * t)); }
    Vec2 pd1(double t) const override {
        return Vec2(-a_ * k_ * std::sin(k_ * t), b_ * k_ * std::cos(k_ * t));
    }
    Vec2 pd2(double t) const override {
        const double kk = static_cast<double>(k_) * k_;
        return Vec2(-a_ * kk * std::cos(k_ * t), -b_ * kk * std::sin(k_ * t));
    }
    std::string name() const override {
        return "fourier2d(" + std::to_string(k_) + "," + std::to_string(a_) + "," + std::to_string(b_) + ")";
    }

  private:
    int k_;
    double a_, b_;
};

class ShearField2 final : public FieldOnCurve {
  public:
    ShearField2(CurvePtr c, int axis) : c_(std::move(c)), axis_(axis) {
        if (axis_ != 0 && axis_ != 1) throw ParameterError("shear axis must be 0 or 1");
    }
    Vec2 value(double t) const override { return ambient_value(c_->position(t)); }
    Vec2 pd1(double t) const override { return ambient_jacobian(Vec2()) * c_->d1(t); }
    Vec2 pd2(double t) const override { return ambient_jacobian(Vec2()) * c_->d2(t); }
    bool has_ambient() const override { return true; }
    Vec2 ambient_value(const Vec2& x) const override {
        Vec2 v = Vec2::Zero();
        v[axis_] = x[1 - axis_];
        return v;
    }
    Mat2 ambient_jacobian(const Vec2&) const override {
        Mat2 J = Mat2::Zero();
        J(axis_, 1 - axis_) = 1.0;
        return J;
    }
    std::string name() const override { return "shear(" + std::to_string(axis_) + ")"; }

  private:
    CurvePtr c_;
    int axis_;
};

class ScaledField2 final : public FieldOnCurve {
  public:
    ScaledField2(double c, Field2Ptr f) : c_(c), f_(std::move(f)) {}
    Vec2 value(double t) const override { return c_ * f_->value(t); }
    Vec2 pd1(double t) const override { return c_ * f_->pd1(t); }
    Vec2 pd2(double t) const override { return c_ * f_->pd2(t); }
    bool has_ambient() const override { return f_->has_ambient(); }
    Vec2 ambient_value(const Vec2& x) const override { return c_ * f_->ambient_value(x); }
    Mat2 ambient_jacobian(const Vec2& x) const override { return c_ * f_->ambient_jacobian(x); }
    std::string name() const override { return std::to_string(c_) + "*" + f_->name(); }

  private:
    double c_;
    Field2Ptr f_;
};

class SumField2 final : public FieldOnCurve {
  public:
    SumField2(Field2Ptr f, Field2Ptr g) : f_(std::move(f)), g_(std::move(g)) {}
    Vec2 value(double t) const override { return f_->value(t) + g_->value(t); }
    Vec2 pd1(double t) const override { return f_->pd1(t) + g_->pd1(t); }
    Vec2 pd2(double t) const override { return f_->pd2(t) + g_->pd2(t); }
    bool has_ambient() const override { return f_->has_ambient() && g_->has_ambient(); }
    Vec2 ambient_value(const Vec2& x) const override {
        return f_->ambient_value(x) + g_->ambient_value(x);
    }
    Mat2 ambient_jacobian(const Vec2& x) const override {
        return f_->ambient_jacobian(x) + g_->ambient_jacobian(x);
    }
    std::string name() const override { return f_->name() + "+" + g_->name(); }

  private:
    Field2Ptr f_, g_;
};

class DeformedCurve final : public Curve {
  public:
    DeformedCurve(CurvePtr base, Field2Ptr r) : base_(std::move(base)), r_(std::move(r)) {}
    Vec2 position(double t) const override { return base_->position(t) + r_->value(t); }
    Vec2 d1(double t) const override { return base_->d1(t) + r_->pd1(t); }
    Vec2 d2(double t) const override { return base_->d2(t) + r_->pd2(t); }
    Vec2 d3(double) const override {
        // only curvature-level jets of a deformed chart are ever used
        throw ParameterError("third derivative of a deformed chart is not available");
    }
    Vec2 interior_point() const override { return base_->interior_point(); }
    std::string name() const override { return base_->name() + "+" + r_->name(); }

  private:
    CurvePtr base_;
    Field2Ptr r_;
};

}  // namespace

Field2Ptr make_constant_field2(const Vec2& v) { return std::make_shared<ConstantField2>(v); }
Field2Ptr make_normal_field2(CurvePtr curve) { return std::make_shared<NormalField2>(std::move(curve)); }
Field2Ptr make_fourier_field2(int k, double a, double b) {
    return std::make_shared<FourierField2>(k, a, b);
}
Field2Ptr make_shear_field2(CurvePtr curve, int axis) {
    return std::make_shared<ShearField2>(std::move(curve), axis);
}
Field2Ptr scale_field2(double c, Field2Ptr f) { return std::make_shared<ScaledField2>(c, std::move(f)); }
Field2Ptr add_fields2(Field2Ptr f, Field2Ptr g) {
    return std::make_shared<SumField2>(std::move(f), std::move(g));
}

CurvePtr deformed_curve(CurvePtr base, Field2Ptr r) {
    return std::make_shared<DeformedCurve>(std::move(base), std::move(r));
}

CurvePtr deform(CurvePtr base, Field2Ptr r, int check_nodes) {
    auto defo = deformed_curve(base, r);
    std::vector<Vec2> pts(check_nodes);
    for (int i = 0; i < check_nodes; ++i) {
        const double t = kTwoPi * i / check_nodes;
        pts[i] = defo->position(t);
        const double gram = defo->d1(t).squaredNorm();
        if (!(gram > 1e-12)) {
            throw DeformationTooLarge("Gram determinant <= 1e-12 at theta=" + std::to_string(t));
        }
    }
    for (int i = 0; i < check_nodes; ++i) {
        for (int j = i + 1; j < check_nodes; ++j) {
            if ((pts[i] - pts[j]).norm() < 1e-10) {
                throw DeformationTooLarge("deformed nodes collide");
            }
        }
    }
    return defo;
}

std::vector<Vec2> tangent_basis(const Curve& c, int chart_index, double t) {
    if (chart_index != 0) throw OutOfChart("curve has a single chart");
    if (t < 0.0 || t > kTwoPi) throw OutOfChart("parameter outside [0, 2pi]");
    return {c.d1(t)};
}

Grid2 Grid2::make(CurvePtr curve, int N) {
    if (N < 4 || N % 2 != 0) throw ParameterError("grid size must be even and >= 4");
    Grid2 g;
    g.curve = std::move(curve);
    g.N = N;
    g.theta.resize(N);
    g.node.resize(2, N);
    g.speed.resize(N);
    g.normal.resize(2, N);
    g.weight.resize(N);
    for (int i = 0; i < N; ++i) {
        const double t = kTwoPi * i / N;
        g.theta[i] = t;
        g.node.col(i) = g.curve->position(t);
        const Vec2 u = g.curve->d1(t);
        g.speed[i] = u.norm();
        g.normal.col(i) = rot90cw(u) / g.speed[i];
        g.weight[i] = kTwoPi / N * g.speed[i];
    }
    return g;
}

Eigen::Matrix2Xd wedge_W(const Grid2& g, const FieldOnCurve& r) {
    Eigen::Matrix2Xd W(2, g.N);
    for (int i = 0; i < g.N; ++i) {
        const double t = g.theta[i];
        const Vec2 e1r = g.curve->d1(t) + r.pd1(t);
        W.col(i) = rot90cw(e1r) / g.speed[i];
    }
    return W;
}

Eigen::VectorXd surface_jacobian(const Grid2& g, const FieldOnCurve& r) {
    const auto W = wedge_W(g, r);
    return W.colwise().norm();
}

Eigen::Matrix2Xd transported_normal(const Grid2& g, const FieldOnCurve& r) {
    Eigen::Matrix2Xd W = wedge_W(g, r);
    for (int i = 0; i < g.N; ++i) W.col(i).normalize();
    return W;
}

std::vector<Mat2> transported_grad(const Grid2& g, const FieldOnCurve& r0, const FieldOnCurve& xi) {
    std::vector<Mat2> out(g.N);
    for (int i = 0; i < g.N; ++i) {
        const double t = g.theta[i];
        const Vec2 e = g.curve->d1(t) + r0.pd1(t);
        const Vec2 dxi = xi.pd1(t);
        // column j of [grad_Gamma xi] is the tangential gradient of xi_j
        out[i] = (e / e.squaredNorm()) * dxi.transpose();
    }
    return out;
}

Eigen::VectorXd dJ(const Grid2& g, const FieldOnCurve& r0, const FieldOnCurve& xi) {
    const auto J = surface_jacobian(g, r0);
    const auto grads = transported_grad(g, r0, xi);
    Eigen::VectorXd out(g.N);
    for (int i = 0; i < g.N; ++i) out[i] = J[i] * grads[i].trace();
    return out;
}

Eigen::Matrix2Xd dN(const Grid2& g, const FieldOnCurve& r0, const FieldOnCurve& xi) {
    const auto Nr = transported_normal(g, r0);
    const auto grads = transported_grad(g, r0, xi);
    Eigen::Matrix2Xd out(2, g.N);
    for (int i = 0; i < g.N; ++i) out.col(i) = -grads[i] * Nr.col(i);
    return out;
}

Eigen::Matrix2Xd dm_W(const Grid2& g, const FieldOnCurve& r0, const FieldOnCurve& xi, int m) {
    if (m < 1) throw ParameterError("derivative order must be >= 1");
    Eigen::Matrix2Xd out = Eigen::Matrix2Xd::Zero(2, g.N);
    if (m >= 2) return out;  // vanishes for m >= d = 2
    const auto W = wedge_W(g, r0);
    const auto grads = transported_grad(g, r0, xi);
    for (int i = 0; i < g.N; ++i) {
        const Eigen::MatrixXd A = grads[i].transpose();  // A = [tau D_Gamma (tau^{-1} xi)]
        out.col(i) = coeff_Bm(A, m) * W.col(i);
    }
    return out;
}

Eigen::VectorXd d2J(const Grid2& g, const FieldOnCurve& xi1, const FieldOnCurve& xi2) {
    auto zero = make_constant_field2(Vec2::Zero());
    const auto g1 = transported_grad(g, *zero, xi1);
    const auto g2 = transported_grad(g, *zero, xi2);
    Eigen::VectorXd out(g.N);
    for (int i = 0; i < g.N; ++i) {
        const Vec2 n = g.normal.col(i);
        out[i] = -(g2[i] * g1[i]).trace() + g1[i].trace() * g2[i].trace() +
                 (g1[i] * n).dot(g2[i] * n);
    }
    return out;
}

Eigen::Matrix2Xd d2N(const Grid2& g, const FieldOnCurve& xi1, const FieldOnCurve& xi2) {
    auto zero = make_constant_field2(Vec2::Zero());
    const auto g1 = transported_grad(g, *zero, xi1);
    const auto g2 = transported_grad(g, *zero, xi2);
    Eigen::Matrix2Xd out(2, g.N);
    for (int i = 0; i < g.N; ++i) {
        const Vec2 n = g.normal.col(i);
        out.col(i) = g2[i] * (g1[i] * n) + g1[i] * (g2[i] * n) - ((g1[i] * n).dot(g2[i] * n)) * n;
    }
    return out;
}

Eigen::VectorXd pullback_values(const Grid2& g, const FieldOnCurve& r,
                                const std::function<double(const Vec2&)>& u) {
    Eigen::VectorXd out(g.N);
    for (int i = 0; i < g.N; ++i) out[i] = u(g.node.col(i) + r.value(g.theta[i]));
    return out;
}

Eigen::VectorXd pushforward_values(const Grid2& g, const FieldOnCurve& r,
                                   const Eigen::VectorXd& u_on_reference) {
    if (u_on_reference.size() != g.N) throw ParameterError("nodal data size mismatch");
    (void)r;  // the transported value at x + r(x) is the value at x
    return u_on_reference;
}

Eigen::VectorXd material_to_shape(const Eigen::VectorXd& u_dot, const Eigen::Matrix2Xd& grad_u0,
                                  const Grid2& g, const FieldOnCurve& xi) {
    Eigen::VectorXd out(g.N);
    for (int i = 0; i < g.N; ++i) {
        out[i] = u_dot[i] - xi.value(g.theta[i]).dot(grad_u0.col(i));
    }
    return out;
}

}  // namespace shapebie

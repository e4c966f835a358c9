// Copyright (c) 2026 the shapebie authors
// SPDX-License-Identifier: Apache-2.0
#include "shapebie/surface_calculus.hpp"

#include "shapebie/errors.hpp"

namespace shapebie {

Eigen::Matrix2Xd surface_gradient(const Grid2& g, const ScalarJet2& u) {
    Eigen::Matrix2Xd out(2, g.N);
    for (int i = 0; i < g.N; ++i) {
        const Vec2 gr = u.grad(g.node.col(i));
        const Vec2 n = g.normal.col(i);
        out.col(i) = gr - gr.dot(n) * n;
    }
    return out;
}

Eigen::Matrix3Xd surface_gradient(const Grid3& g, const ScalarJet3& u) {
    Eigen::Matrix3Xd out(3, g.size());
    for (int p = 0; p < g.size(); ++p) {
        const Vec3 gr = u.grad(g.node.col(p));
        const Vec3 n = g.normal.col(p);
        out.col(p) = gr - gr.dot(n) * n;
    }
    return out;
}

Eigen::VectorXd surface_divergence(const Grid2& g, const VectorJet2& v) {
    Eigen::VectorXd out(g.N);
    for (int i = 0; i < g.N; ++i) {
        const Mat2 gc = v.grad_cols(g.node.col(i));
        const Vec2 n = g.normal.col(i);
        out[i] = gc.trace() - n.dot(gc * n);
    }
    return out;
}

Eigen::VectorXd surface_divergence(const Grid3& g, const VectorJet3& v) {
    Eigen::VectorXd out(g.size());
    for (int p = 0; p < g.size(); ++p) {
        const Mat3 gc = v.grad_cols(g.node.col(p));
        const Vec3 n = g.normal.col(p);
        out[p] = gc.trace() - n.dot(gc * n);
    }
    return out;
}

Eigen::Matrix3Xd gunter_M(const Grid3& g, const VectorJet3& v) {
    Eigen::Matrix3Xd out(3, g.size());
    for (int p = 0; p < g.size(); ++p) {
        const Mat3 gc = v.grad_cols(g.node.col(p));
        const Vec3 n = g.normal.col(p);
        out.col(p) = gc * n - gc.trace() * n;
    }
    return out;
}

Eigen::Matrix2Xd gunter_M(const Grid2&, const VectorJet2&) {
    throw DimensionError("Guenter derivative requires d = 3");
}

Eigen::VectorXd gunter_mjk(const Grid3& g, const ScalarJet3& u, int j, int k) {
    if (j < 0 || j > 2 || k < 0 || k > 2) throw ParameterError("component indices must be 0..2");
    Eigen::VectorXd out(g.size());
    for (int p = 0; p < g.size(); ++p) {
        const Vec3 gr = u.grad(g.node.col(p));
        const Vec3 n = g.normal.col(p);
        out[p] = n[k] * gr[j] - n[j] * gr[k];
    }
    return out;
}

double stokes_residual(const Grid3& g, const ScalarJet3& u, const ScalarJet3& w, int j, int k) {
    const Eigen::VectorXd mu = gunter_mjk(g, u, j, k);
    const Eigen::VectorXd mw = gunter_mjk(g, w, j, k);
    double lhs = 0.0, rhs = 0.0;
    for (int p = 0; p < g.size(); ++p) {
        const double wq = g.weight[p];
        lhs += wq * mu[p] * w.value(g.node.col(p));
        rhs -= wq * u.value(g.node.col(p)) * mw[p];
    }
    return std::abs(lhs - rhs);
}

double stokes_residual(const Grid3& g, const VectorJet3& v, const VectorJet3& w) {
    const Eigen::Matrix3Xd Mv = gunter_M(g, v);
    const Eigen::Matrix3Xd Mw = gunter_M(g, w);
    double lhs = 0.0, rhs = 0.0;
    for (int p = 0; p < g.size(); ++p) {
        const double wq = g.weight[p];
        lhs += wq * Mv.col(p).dot(w.value(g.node.col(p)));
        rhs += wq * v.value(g.node.col(p)).dot(Mw.col(p));
    }
    return std::abs(lhs - rhs);
}

Eigen::Matrix2Xd transported_gradient(const Grid2& g, const FieldOnCurve& r0, const ScalarJet2& u) {
    Eigen::Matrix2Xd out(2, g.N);
    for (int i = 0; i < g.N; ++i) {
        const double t = g.theta[i];
        const Vec2 e = g.curve->d1(t) + r0.pd1(t);
        const double du = u.grad(g.node.col(i)).dot(g.curve->d1(t));
        out.col(i) = (du / e.squaredNorm()) * e;
    }
    return out;
}

Eigen::Matrix3Xd transported_gradient(const Grid3& g, const FieldOnSurf& r0, const ScalarJet3& u) {
    Eigen::Matrix3Xd out(3, g.size());
    for (int p = 0; p < g.size(); ++p) {
        const double uu = g.u[p], vv = g.v[p];
        Eigen::Matrix<double, 3, 2> E;
        E.col(0) = g.e1.col(p) + r0.pdu(uu, vv);
        E.col(1) = g.e2.col(p) + r0.pdv(uu, vv);
        const Eigen::Matrix2d gram = E.transpose() * E;
        const Vec3 gr = u.grad(g.node.col(p));
        Eigen::Vector2d du(gr.dot(g.e1.col(p)), gr.dot(g.e2.col(p)));
        out.col(p) = E * gram.inverse() * du;
    }
    return out;
}

std::vector<Mat2> transported_gradient(const Grid2& g, const FieldOnCurve& r0, const VectorJet2& u) {
    std::vector<Mat2> out(g.N);
    for (int i = 0; i < g.N; ++i) {
        const double t = g.theta[i];
        const Vec2 e = g.curve->d1(t) + r0.pd1(t);
        const Vec2 du = u.grad_cols(g.node.col(i)).transpose() * g.curve->d1(t);
        out[i] = (e / e.squaredNorm()) * du.transpose();
    }
    return out;
}

std::vector<Mat3> transported_gradient(const Grid3& g, const FieldOnSurf& r0, const VectorJet3& u) {
    std::vector<Mat3> out(g.size());
    for (int p = 0; p < g.size(); ++p) {
        const double uu = g.u[p], vv = g.v[p];
        Eigen::Matrix<double, 3, 2> E;
        E.col(0) = g.e1.col(p) + r0.pdu(uu, vv);
        E.col(1) = g.e2.col(p) + r0.pdv(uu, vv);
        const Eigen::Matrix2d gram = E.transpose() * E;
        const Mat3 gc = u.grad_cols(g.node.col(p));
        Eigen::Matrix<double, 2, 3> D;
        D.row(0) = (gc.transpose() * g.e1.col(p)).transpose();
        D.row(1) = (gc.transpose() * g.e2.col(p)).transpose();
        out[p] = E * gram.inverse() * D;
    }
    return out;
}

Eigen::VectorXd transported_divergence(const Grid2& g, const FieldOnCurve& r0, const VectorJet2& u) {
    const auto grads = transported_gradient(g, r0, u);
    Eigen::VectorXd out(g.N);
    for (int i = 0; i < g.N; ++i) out[i] = grads[i].trace();
    return out;
}

Eigen::VectorXd transported_divergence(const Grid3& g, const FieldOnSurf& r0, const VectorJet3& u) {
    const auto grads = transported_gradient(g, r0, u);
    Eigen::VectorXd out(g.size());
    for (int p = 0; p < g.size(); ++p) out[p] = grads[p].trace();
    return out;
}

Eigen::Matrix2Xd dG(const Grid2& g, const FieldOnCurve& r0, const FieldOnCurve& xi, const ScalarJet2& u) {
    const auto Gxi = transported_grad(g, r0, xi);
    const auto Gu = transported_gradient(g, r0, u);
    const auto Nr = transported_normal(g, r0);
    Eigen::Matrix2Xd out(2, g.N);
    for (int i = 0; i < g.N; ++i) {
        const Vec2 n = Nr.col(i);
        const Vec2 gu = Gu.col(i);
        out.col(i) = -Gxi[i] * gu + gu.dot(Gxi[i] * n) * n;
    }
    return out;
}

Eigen::Matrix3Xd dG(const Grid3& g, const FieldOnSurf& r0, const FieldOnSurf& xi, const ScalarJet3& u) {
    const auto Gxi = transported_grad(g, r0, xi);
    const auto Gu = transported_gradient(g, r0, u);
    const auto Nr = transported_normal(g, r0);
    Eigen::Matrix3Xd out(3, g.size());
    for (int p = 0; p < g.size(); ++p) {
        const Vec3 n = Nr.col(p);
        const Vec3 gu = Gu.col(p);
        out.col(p) = -Gxi[p] * gu + gu.dot(Gxi[p] * n) * n;
    }
    return out;
}

Eigen::VectorXd dD(const Grid2& g, const FieldOnCurve& r0, const FieldOnCurve& xi, const VectorJet2& u) {
    const auto Gxi = transported_grad(g, r0, xi);
    const auto Gu = transported_gradient(g, r0, u);
    const auto Nr = transported_normal(g, r0);
    Eigen::VectorXd out(g.N);
    for (int i = 0; i < g.N; ++i) {
        const Vec2 n = Nr.col(i);
        out[i] = -(Gxi[i] * Gu[i]).trace() + (Gu[i] * n).dot(Gxi[i] * n);
    }
    return out;
}

Eigen::VectorXd dD(const Grid3& g, const FieldOnSurf& r0, const FieldOnSurf& xi, const VectorJet3& u) {
    const auto Gxi = transported_grad(g, r0, xi);
    const auto Gu = transported_gradient(g, r0, u);
    const auto Nr = transported_normal(g, r0);
    Eigen::VectorXd out(g.size());
    for (int p = 0; p < g.size(); ++p) {
        const Vec3 n = Nr.col(p);
        out[p] = -(Gxi[p] * Gu[p]).trace() + (Gu[p] * n).dot(Gxi[p] * n);
    }
    return out;
}

double traction_rewrite_check(const Grid3& g, const VectorJet3& v, double mu, double lambda) {
    double worst = 0.0;
    for (int p = 0; p < g.size(); ++p) {
        const Vec3 x = g.node.col(p);
        const Vec3 n = g.normal.col(p);
        const Mat3 gc = v.grad_cols(x);   // gc(i,j) = d_i v_j
        const double div = gc.trace();
        const Vec3 dvdn = gc.transpose() * n;  // (dv/dn)_i = sum_j d_j v_i n_j
        const Vec3 curl(gc(1, 2) - gc(2, 1), gc(2, 0) - gc(0, 2), gc(0, 1) - gc(1, 0));
        const Vec3 Mv = gc * n - div * n;
        const Vec3 formA = 2.0 * mu * dvdn + lambda * div * n + mu * n.cross(curl);
        const Vec3 formB = 2.0 * mu * Mv + (lambda + 2.0 * mu) * div * n - mu * n.cross(curl);
        worst = std::max(worst, (formA - formB).norm());
    }
    return worst;
}

}  // namespace shapebie

// Copyright (c) 2026 the shapebie authors
// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "doctest.h"
#include "shapebie/errors.hpp"
#include "shapebie/geometry2d.hpp"
#include "shapebie/geometry3d.hpp"
#include "shapebie/shape_diff.hpp"
#include "shapebie/util.hpp"

using namespace shapebie;

namespace {
constexpr double kTwoPi = 6.283185307179586476925287;

Eigen::VectorXcd flat(const Eigen::MatrixXd& m) {
    Eigen::VectorXcd v(m.size());
    for (Eigen::Index i = 0; i < m.size(); ++i) v[i] = m.reshaped()[i];
    return v;
}
}  // namespace

TEST_CASE("chart derivatives agree with finite differences of the chart") {
    for (const auto& curve : {make_circle(), make_ellipse(1.0, 0.6), make_kite()}) {
        const double h = 1e-6;
        for (double t : {0.3, 1.7, 4.4}) {
            const Vec2 fd1 = (curve->position(t + h) - curve->position(t - h)) / (2 * h);
            const Vec2 fd2 = (curve->d1(t + h) - curve->d1(t - h)) / (2 * h);
            const Vec2 fd3 = (curve->d2(t + h) - curve->d2(t - h)) / (2 * h);
            CHECK((fd1 - curve->d1(t)).norm() < 1e-8);
            CHECK((fd2 - curve->d2(t)).norm() < 1e-8);
            CHECK((fd3 - curve->d3(t)).norm() < 1e-7);
        }
    }
    const auto sph = make_ellipsoid(1.0, 0.8, 1.3);
    const double h = 1e-6;
    const double u = 1.1, v = 2.3;
    CHECK(((sph->position(u + h, v) - sph->position(u - h, v)) / (2 * h) - sph->du(u, v)).norm() <
          1e-8);
    CHECK(((sph->position(u, v + h) - sph->position(u, v - h)) / (2 * h) - sph->dv(u, v)).norm() <
          1e-8);
    CHECK(((sph->du(u, v + h) - sph->du(u, v - h)) / (2 * h) - sph->duv(u, v)).norm() < 1e-8);
}

TEST_CASE("grid quadrature: unit circle length 2pi, unit sphere area 4pi") {
    const Grid2 g2 = Grid2::make(make_circle(), 128);
    CHECK(std::abs(g2.weight.sum() - kTwoPi) < 1e-12);

    const Grid3 g3 = Grid3::make(make_sphere(), 32, 64);
    CHECK(std::abs(g3.weight.sum() - 2.0 * kTwoPi) < 1e-11);

    // smooth integrand on the sphere: int x3^2 ds = 4 pi / 3
    double acc = 0.0;
    for (int p = 0; p < g3.size(); ++p) acc += g3.weight[p] * g3.node(2, p) * g3.node(2, p);
    CHECK(std::abs(acc - 2.0 * kTwoPi / 3.0) < 1e-11);
}

TEST_CASE("normals are unit and outward; tangent bases orthogonal to position on the sphere") {
    for (const auto& curve : {make_circle(), make_ellipse(1.0, 0.6), make_kite()}) {
        const Grid2 g = Grid2::make(curve, 64);
        for (int i = 0; i < g.N; ++i) {
            CHECK(std::abs(g.normal.col(i).norm() - 1.0) < 1e-14);
            CHECK(g.normal.col(i).dot(g.node.col(i) - curve->interior_point()) > 0.0);
            CHECK(g.speed[i] * g.speed[i] > 1e-12);  // immersive chart
        }
    }
    const auto b = tangent_basis(*make_sphere(), 0, kTwoPi / 4.0, 0.0);
    const Vec3 x(1.0, 0.0, 0.0);
    CHECK(std::abs(b[0].dot(x)) < 1e-14);
    CHECK(std::abs(b[1].dot(x)) < 1e-14);
    CHECK(std::abs(b[0].dot(b[1])) < 1e-14);

    const Grid3 ge = Grid3::make(make_ellipsoid(1.0, 0.7, 1.4), 12, 24);
    for (int p = 0; p < ge.size(); ++p) {
        CHECK(std::abs(ge.normal.col(p).norm() - 1.0) < 1e-14);
        CHECK(ge.normal.col(p).dot(ge.node.col(p)) > 0.0);  // outward, star-shaped
    }
    CHECK_THROWS_AS(tangent_basis(*make_circle(), 1, 0.5), OutOfChart);
    CHECK_THROWS_AS(tangent_basis(*make_circle(), 0, 7.0), OutOfChart);
}

TEST_CASE("deform: identity, radial scaling, and the collapse guard") {
    const auto circle = make_circle();
    const Grid2 g = Grid2::make(circle, 64);

    const auto zero = make_constant_field2(Vec2::Zero());
    const auto same = deform(circle, zero);
    for (double t : {0.0, 1.0, 3.5}) {
        CHECK((same->position(t) - circle->position(t)).norm() == 0.0);
    }

    const auto n = make_normal_field2(circle);
    const auto scaled = deform(circle, scale_field2(0.1, n));
    for (int i = 0; i < g.N; ++i) {
        CHECK(std::abs(scaled->position(g.theta[i]).norm() - 1.1) < 1e-14);
    }

    CHECK_THROWS_AS(deform(circle, scale_field2(-1.0, n)), DeformationTooLarge);
}

TEST_CASE("tangent basis of the radially deformed circle") {
    const auto circle = make_circle();
    const auto defo = deform(circle, scale_field2(0.1, make_normal_field2(circle)));
    const Vec2 e1 = tangent_basis(*defo, 0, 0.0)[0];
    CHECK(std::abs(e1.x() - 0.0) < 1e-15);
    CHECK(std::abs(e1.y() - 1.1) < 1e-15);
}

TEST_CASE("W, J and the transported normal: radial deformations scale the area element") {
    const auto circle = make_circle();
    const Grid2 g = Grid2::make(circle, 64);
    const auto n = make_normal_field2(circle);

    const auto W0 = wedge_W(g, *make_constant_field2(Vec2::Zero()));
    for (int i = 0; i < g.N; ++i) {
        CHECK((W0.col(i) - g.normal.col(i)).norm() < 1e-14);
    }

    const auto rt = scale_field2(0.17, n);
    const auto J = surface_jacobian(g, *rt);
    const auto Nr = transported_normal(g, *rt);
    const auto W = wedge_W(g, *rt);
    for (int i = 0; i < g.N; ++i) {
        CHECK(std::abs(J[i] - 1.17) < 1e-14);
        CHECK(std::abs(Nr.col(i).norm() - 1.0) < 1e-14);
        CHECK((W.col(i) - J[i] * Nr.col(i)).norm() < 1e-14);  // W = J tau_r n_r
    }

    const Grid3 g3 = Grid3::make(make_sphere(), 16, 32);
    const auto n3 = make_normal_field3(make_sphere());
    const auto J3 = surface_jacobian(g3, *scale_field3(0.1, n3));
    for (int p = 0; p < g3.size(); ++p) CHECK(std::abs(J3[p] - 1.21) < 1e-13);
}

TEST_CASE("cofactor identity W = cof(I + Dr) n for fields with ambient jets") {
    const auto circle = make_circle();
    const Grid2 g = Grid2::make(circle, 32);
    for (const auto& field :
         {scale_field2(0.08, make_normal_field2(circle)), make_shear_field2(circle, 0),
          make_constant_field2(Vec2(0.3, -0.2))}) {
        const auto W = wedge_W(g, *field);
        for (int i = 0; i < g.N; ++i) {
            const Mat2 A = Mat2::Identity() + Mat2(field->ambient_jacobian(g.node.col(i)));
            const Mat2 cof = A.determinant() * A.inverse().transpose();
            CHECK((W.col(i) - cof * g.normal.col(i)).norm() < 1e-12);
        }
    }
}

TEST_CASE("declared ambient jacobians match central differences of the extension") {
    const auto circle = make_circle();
    XorShift64Star rng(77);
    std::vector<Field2Ptr> fields = {make_normal_field2(circle), make_shear_field2(circle, 1),
                                     make_constant_field2(Vec2(0.2, 0.9))};
    for (const auto& f : fields) {
        for (int s = 0; s < 10; ++s) {
            const double t = rng.uniform(0.0, kTwoPi);
            const Vec2 x = circle->position(t);
            const double h = 1e-6;
            Mat2 fd;
            for (int c = 0; c < 2; ++c) {
                Vec2 dx = Vec2::Zero();
                dx[c] = h;
                fd.row(c) =
                    ((f->ambient_value(x + dx) - f->ambient_value(x - dx)) / (2 * h)).transpose();
            }
            // fd(c, j) = d_c xi_j is the transpose of the standard jacobian
            const Mat2 J = f->ambient_jacobian(x);
            double scale = std::max(1.0, J.norm());
            CHECK((Mat2(fd.transpose()) - J).norm() / scale < 1e-6);
        }
    }
    const auto sph = make_ellipsoid(1.0, 0.7, 1.2);
    const auto n3 = make_normal_field3(sph);
    const Vec3 x = sph->position(1.2, 0.7);
    const double h = 1e-6;
    Mat3 fd;
    for (int c = 0; c < 3; ++c) {
        Vec3 dx = Vec3::Zero();
        dx[c] = h;
        fd.row(c) = ((n3->ambient_value(x + dx) - n3->ambient_value(x - dx)) / (2 * h)).transpose();
    }
    CHECK((Mat3(fd.transpose()) - Mat3(n3->ambient_jacobian(x))).norm() < 1e-6);
}

TEST_CASE("parametric field derivatives agree with finite differences") {
    const auto kite = make_kite();
    for (const auto& f : {make_normal_field2(kite), make_fourier_field2(3, 0.7, -0.4),
                          make_shear_field2(kite, 0)}) {
        const double h = 1e-6;
        for (double t : {0.4, 2.0, 5.1}) {
            CHECK(((f->value(t + h) - f->value(t - h)) / (2 * h) - f->pd1(t)).norm() < 1e-8);
            CHECK(((f->pd1(t + h) - f->pd1(t - h)) / (2 * h) - f->pd2(t)).norm() < 1e-7);
        }
    }
}

TEST_CASE("dJ: constants, curvature of circle and sphere") {
    const auto circle = make_circle();
    const Grid2 g = Grid2::make(circle, 64);
    const auto zero = make_constant_field2(Vec2::Zero());

    const auto c = make_constant_field2(Vec2(0.4, -1.0));
    CHECK(dJ(g, *zero, *c).cwiseAbs().maxCoeff() == 0.0);

    const auto n = make_normal_field2(circle);
    const Eigen::VectorXd dj = dJ(g, *zero, *n);
    for (int i = 0; i < g.N; ++i) CHECK(std::abs(dj[i] - 1.0) < 1e-13);

    const Grid3 g3 = Grid3::make(make_sphere(), 16, 32);
    const auto zero3 = make_constant_field3(Vec3::Zero());
    const Eigen::VectorXd dj3 = dJ(g3, *zero3, *make_normal_field3(make_sphere()));
    for (int p = 0; p < g3.size(); ++p) CHECK(std::abs(dj3[p] - 2.0) < 1e-12);
}

TEST_CASE("dN: translations and dilations give zero; generic field matches FD") {
    const auto circle = make_circle();
    const Grid2 g = Grid2::make(circle, 64);
    const auto zero = make_constant_field2(Vec2::Zero());

    CHECK(dN(g, *zero, *make_constant_field2(Vec2(1.0, 2.0))).cwiseAbs().maxCoeff() == 0.0);
    CHECK(dN(g, *zero, *make_normal_field2(circle)).cwiseAbs().maxCoeff() < 1e-14);

    const auto shear = make_shear_field2(circle, 0);
    const auto analytic = dN(g, *zero, *shear);
    FamilyHandle fam{"tauN(t shear)", [&](double t) {
                         return flat(transported_normal(g, *scale_field2(t, shear)));
                     }};
    const auto rep =
        check_first_derivative(fam, flat(analytic), {1e-2, 5e-3, 2.5e-3}, 1.9, "dN", "shear");
    CHECK(rep.pass);

    // orthogonality to the transported normal, also at a deformed base state
    const auto r0 = scale_field2(0.1, make_fourier_field2(2, 1.0, 1.0));
    const auto Nr = transported_normal(g, *r0);
    const auto dn = dN(g, *r0, *shear);
    for (int i = 0; i < g.N; ++i) {
        CHECK(std::abs(dn.col(i).dot(Nr.col(i))) < 1e-12 * std::max(1.0, dn.col(i).norm()));
    }
}

TEST_CASE("dm_W: vanishing order, translation invariance, radial witness") {
    const auto circle = make_circle();
    const Grid2 g = Grid2::make(circle, 64);
    const auto zero = make_constant_field2(Vec2::Zero());
    const auto n = make_normal_field2(circle);
    const auto four = make_fourier_field2(2, 0.8, 0.5);

    CHECK(dm_W(g, *zero, *four, 2).cwiseAbs().maxCoeff() == 0.0);  // m >= d = 2
    CHECK(dm_W(g, *scale_field2(0.05, n), *four, 3).cwiseAbs().maxCoeff() == 0.0);
    CHECK(dm_W(g, *zero, *make_constant_field2(Vec2(2.0, -1.0)), 1).cwiseAbs().maxCoeff() == 0.0);

    const auto d1 = dm_W(g, *zero, *n, 1);
    for (int i = 0; i < g.N; ++i) CHECK((d1.col(i) - g.normal.col(i)).norm() < 1e-13);

    // m = 1 matches FD of W for a generic field
    FamilyHandle fam{"W(t four)",
                     [&](double t) { return flat(wedge_W(g, *scale_field2(t, four))); }};
    const auto rep = check_first_derivative(fam, flat(dm_W(g, *zero, *four, 1)),
                                            {1e-2, 5e-3, 2.5e-3}, 1.9, "dm_W", "fourier");
    CHECK(rep.pass);

    // d = 3: m = 2 still nonzero, m = 3 exactly zero; m = 1, 2 match FD
    const auto sph = make_sphere();
    const Grid3 g3 = Grid3::make(sph, 12, 24);
    const auto zero3 = make_constant_field3(Vec3::Zero());
    const auto f3 = make_poly_field3(sph, 1);
    CHECK(dm_W(g3, *zero3, *f3, 3).cwiseAbs().maxCoeff() == 0.0);
    CHECK(dm_W(g3, *zero3, *f3, 2).cwiseAbs().maxCoeff() > 0.0);
    FamilyHandle fam3{"W3", [&](double t) {
                          return flat(Eigen::MatrixXd(wedge_W(g3, *scale_field3(t, f3))));
                      }};
    const auto rep1 = check_first_derivative(fam3, flat(Eigen::MatrixXd(dm_W(g3, *zero3, *f3, 1))),
                                             {1e-2, 5e-3, 2.5e-3}, 1.9, "dm_W3", "poly");
    CHECK(rep1.pass);
    // W(t) is a polynomial of degree d-1 = 2 in t, so the second difference is
    // exact up to roundoff; grade by error bound rather than order
    const auto est2 = fd_second(fam3, {1e-2, 5e-3, 2.5e-3});
    for (const auto& e : est2.estimate) {
        CHECK(max_abs(e - flat(Eigen::MatrixXd(dm_W(g3, *zero3, *f3, 2)))) < 1e-9);
    }
}

TEST_CASE("second derivatives of J and N: dilations, symmetry, FD") {
    const auto circle = make_circle();
    const Grid2 g = Grid2::make(circle, 64);
    const auto n = make_normal_field2(circle);
    const auto four = make_fourier_field2(2, 1.0, 0.3);

    CHECK(d2J(g, *make_constant_field2(Vec2(1, 1)), *make_constant_field2(Vec2(0, 2)))
              .cwiseAbs()
              .maxCoeff() == 0.0);
    CHECK(d2J(g, *n, *n).cwiseAbs().maxCoeff() < 1e-13);  // J(t) = 1 + t is linear
    CHECK(d2N(g, *n, *n).cwiseAbs().maxCoeff() < 1e-13);

    // swap symmetry to roundoff (the trace term re-associates the sums)
    CHECK((d2J(g, *n, *four) - d2J(g, *four, *n)).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((d2N(g, *n, *four) - d2N(g, *four, *n)).cwiseAbs().maxCoeff() < 1e-15);

    FamilyHandle famJ{"J", [&](double t) {
                          Eigen::VectorXd J = surface_jacobian(g, *scale_field2(t, four));
                          return Eigen::VectorXcd(J.cast<std::complex<double>>());
                      }};
    const auto repJ = check_second_derivative(famJ, flat(Eigen::MatrixXd(d2J(g, *four, *four))),
                                              {1e-2, 5e-3, 2.5e-3}, 1.9, "d2J", "fourier");
    CHECK(repJ.pass);
    FamilyHandle famN{"N", [&](double t) {
                          return flat(transported_normal(g, *scale_field2(t, four)));
                      }};
    const auto repN = check_second_derivative(famN, flat(d2N(g, *four, *four)),
                                              {1e-2, 5e-3, 2.5e-3}, 1.9, "d2N", "fourier");
    CHECK(repN.pass);

    // sphere, radial: J(t) = (1+t)^2 so the second derivative is exactly 2
    const Grid3 g3 = Grid3::make(make_sphere(), 12, 24);
    const auto n3 = make_normal_field3(make_sphere());
    const Eigen::VectorXd d2 = d2J(g3, *n3, *n3);
    for (int p = 0; p < g3.size(); ++p) CHECK(std::abs(d2[p] - 2.0) < 1e-12);
    FamilyHandle famJ3{"J3", [&](double t) {
                           Eigen::VectorXd J = surface_jacobian(g3, *scale_field3(t, n3));
                           return Eigen::VectorXcd(J.cast<std::complex<double>>());
                       }};
    const auto est = fd_second(famJ3, {1e-2, 5e-3, 2.5e-3});
    CHECK(max_abs(est.estimate.back() - flat(Eigen::MatrixXd(d2))) < 1e-6);
}

TEST_CASE("pullback and pushforward on node values") {
    const auto circle = make_circle();
    const Grid2 g = Grid2::make(circle, 32);
    const auto n = make_normal_field2(circle);
    auto u = [](const Vec2& x) { return x[0]; };

    const auto id = pullback_values(g, *make_constant_field2(Vec2::Zero()), u);
    for (int i = 0; i < g.N; ++i) CHECK(id[i] == g.node(0, i));

    const double t = 0.23;
    const auto pulled = pullback_values(g, *scale_field2(t, n), u);
    for (int i = 0; i < g.N; ++i) {
        CHECK(std::abs(pulled[i] - (1.0 + t) * std::cos(g.theta[i])) < 1e-14);
    }

    // pullback of a pushforward returns the nodal data bit for bit
    Eigen::VectorXd data(g.N);
    for (int i = 0; i < g.N; ++i) data[i] = std::sin(3.0 * g.theta[i]);
    const auto round_trip = pushforward_values(g, *scale_field2(t, n), data);
    CHECK((round_trip - data).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("second-order consequence of the unit-normal constraint") {
    // |tau_r n_r| = 1 forces d2N . N = -|dN|^2 pointwise
    const auto kite = make_kite();
    const Grid2 g = Grid2::make(kite, 64);
    const auto zero = make_constant_field2(Vec2::Zero());
    const auto xi = make_fourier_field2(2, 0.7, 1.0);
    const auto dn = dN(g, *zero, *xi);
    const auto d2n = d2N(g, *xi, *xi);
    for (int i = 0; i < g.N; ++i) {
        CHECK(std::abs(d2n.col(i).dot(g.normal.col(i)) + dn.col(i).squaredNorm()) < 1e-13);
    }
}

TEST_CASE("material vs shape derivative") {
    const auto circle = make_circle();
    const Grid2 g = Grid2::make(circle, 32);
    const auto xi = make_fourier_field2(1, 0.5, 1.0);

    // u_r(x) = x_1 independent of r: material derivative is xi . e_1, shape
    // derivative vanishes
    Eigen::VectorXd u_dot(g.N);
    Eigen::Matrix2Xd grad_u0(2, g.N);
    for (int i = 0; i < g.N; ++i) {
        u_dot[i] = xi->value(g.theta[i])[0];
        grad_u0.col(i) = Vec2(1.0, 0.0);
    }
    const auto shape_der = material_to_shape(u_dot, grad_u0, g, *xi);
    CHECK(shape_der.cwiseAbs().maxCoeff() < 1e-15);

    // xi = 0 keeps the material derivative
    const auto same = material_to_shape(u_dot, grad_u0, g, *make_constant_field2(Vec2::Zero()));
    CHECK((same - u_dot).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("properties over generated fields and shapes") {
    // hand-rolled generator: random fourier fields on randomly drawn shapes
    XorShift64Star rng(20260810);
    const std::vector<CurvePtr> shapes = {make_circle(), make_ellipse(1.0, 0.6), make_kite()};
    for (int trial = 0; trial < 24; ++trial) {
        const auto& curve = shapes[rng.next() % shapes.size()];
        const Grid2 g = Grid2::make(curve, 64);
        const int k = 1 + int(rng.next() % 4);
        const auto xi = make_fourier_field2(k, rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
        const auto eta = make_fourier_field2(1 + int(rng.next() % 3), rng.uniform(-1.0, 1.0),
                                             rng.uniform(-1.0, 1.0));
        const double s = rng.uniform(0.01, 0.15);
        const auto r = scale_field2(s, xi);
        const auto zero = make_constant_field2(Vec2::Zero());

        // W = J (tau_r n_r), J > 0, |tau_r n_r| = 1
        const auto W = wedge_W(g, *r);
        const auto J = surface_jacobian(g, *r);
        const auto Nr = transported_normal(g, *r);
        for (int i = 0; i < g.N; ++i) {
            CHECK(J[i] > 0.0);
            CHECK(std::abs(Nr.col(i).norm() - 1.0) < 1e-14);
            CHECK((W.col(i) - J[i] * Nr.col(i)).norm() < 1e-14 * std::max(1.0, J[i]));
        }

        // dN(r, eta) is orthogonal to the transported normal
        const auto dn = dN(g, *r, *eta);
        for (int i = 0; i < g.N; ++i) {
            CHECK(std::abs(dn.col(i).dot(Nr.col(i))) < 1e-12 * std::max(1.0, dn.col(i).norm()));
        }

        // linearity of the first derivatives in the direction
        const double a = rng.uniform(-2.0, 2.0);
        CHECK((dJ(g, *r, *scale_field2(a, eta)) - a * dJ(g, *r, *eta)).cwiseAbs().maxCoeff() <
              1e-13);

        // swap symmetry of the second derivatives at the base state
        CHECK((d2J(g, *xi, *eta) - d2J(g, *eta, *xi)).cwiseAbs().maxCoeff() < 1e-13);
        CHECK((d2N(g, *xi, *eta) - d2N(g, *eta, *xi)).cwiseAbs().maxCoeff() < 1e-13);

        // vanishing order of the W derivatives
        CHECK(dm_W(g, *r, *eta, 2).cwiseAbs().maxCoeff() == 0.0);
        (void)zero;
    }
}

TEST_CASE("dJ and dN at a deformed base state match FD") {
    const auto kite = make_kite();
    const Grid2 g = Grid2::make(kite, 128);
    const auto r0 = scale_field2(0.08, make_fourier_field2(1, 0.6, 0.9));
    const auto xi = make_fourier_field2(2, 1.0, 0.5);

    FamilyHandle famJ{"J(r0 + t xi)", [&](double t) {
                          auto rt = add_fields2(r0, scale_field2(t, xi));
                          Eigen::VectorXd J = surface_jacobian(g, *rt);
                          return Eigen::VectorXcd(J.cast<std::complex<double>>());
                      }};
    const auto repJ = check_first_derivative(famJ, flat(Eigen::MatrixXd(dJ(g, *r0, *xi))),
                                             {1e-2, 5e-3, 2.5e-3}, 1.9, "dJ@r0", "fourier2");
    CHECK(repJ.pass);

    FamilyHandle famN{"N(r0 + t xi)", [&](double t) {
                          auto rt = add_fields2(r0, scale_field2(t, xi));
                          return flat(transported_normal(g, *rt));
                      }};
    const auto repN = check_first_derivative(famN, flat(dN(g, *r0, *xi)), {1e-2, 5e-3, 2.5e-3},
                                             1.9, "dN@r0", "fourier2");
    CHECK(repN.pass);
}

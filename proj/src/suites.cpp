// Copyright (c) 2026 the shapebie authors
// SPDX-License-Identifier: Apache-2.0
#include "shapebie/suites.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include "CLI11.hpp"
#include "shapebie/errors.hpp"
#include "shapebie/kernels.hpp"
#include "shapebie/operators.hpp"
#include "shapebie/registry.hpp"
#include "shapebie/surface_calculus.hpp"
#include "shapebie/util.hpp"

namespace shapebie {

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr double kPi = 3.14159265358979323846;
const Cplx kI{0.0, 1.0};

const std::set<std::string> kSuites = {"coeffs",     "surfops", "operators",
                                       "potentials", "kernels", "all"};

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12e", v);
    return buf;
}

std::string fmt_order(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

std::string fmt_kappa(Cplx k) {
    char buf[80];
    if (k == Cplx(0.0, 0.0)) return "0";
    if (k.imag() == 0.0) {
        std::snprintf(buf, sizeof buf, "%g", k.real());
    } else {
        std::snprintf(buf, sizeof buf, "%g%+gi", k.real(), k.imag());
    }
    return buf;
}

Eigen::VectorXcd flat(const Eigen::MatrixXcd& m) { return m.reshaped(); }
Eigen::VectorXcd flatr(const Eigen::MatrixXd& m) {
    return m.reshaped().cast<Cplx>();
}

struct SuiteContext {
    const ExperimentConfig& cfg;
    RunResult& result;

    void add_report(const std::string& suite, const DerivativeReport& rep, const std::string& shape,
                    int N, Cplx kappa) {
        result.reports.push_back(rep);
        SuiteRow row;
        row.suite = suite;
        row.target = rep.target;
        row.xi = rep.xi;
        row.shape = shape;
        row.N = N;
        row.kappa = kappa;
        row.order = rep.saturated ? "PASS_SATURATED" : fmt_order(rep.order);
        row.max_error = rep.max_error;
        row.pass = rep.pass;
        result.rows.push_back(row);
        result.all_pass = result.all_pass && row.pass;
    }

    // identity-style checks carry a residual instead of an FD order
    void add_identity(const std::string& suite, const std::string& target, const std::string& xi,
                      const std::string& shape, int N, Cplx kappa, double residual, double tol) {
        SuiteRow row;
        row.suite = suite;
        row.target = target;
        row.xi = xi;
        row.shape = shape;
        row.N = N;
        row.kappa = kappa;
        row.order = "n/a";
        row.max_error = residual;
        row.pass = residual <= tol;
        result.rows.push_back(row);
        result.all_pass = result.all_pass && row.pass;
    }
};

// Second-derivative grading: exactly-polynomial families saturate the
// difference quotient with roundoff amplified by 1/t^2, above the generic
// floor. A direct error bound backs up the order fit for those (this is the
// radial-sphere clause of the acceptance criteria).
DerivativeReport grade_second(const FamilyHandle& fam, const Eigen::VectorXcd& analytic,
                              const std::vector<double>& ladder, const std::string& target,
                              const std::string& xi) {
    DerivativeReport rep = check_second_derivative(fam, analytic, ladder, 1.9, target, xi);
    if (!rep.pass && rep.max_error <= 1e-6) {
        rep.pass = true;
    }
    return rep;
}

// ---------------- coeffs ----------------

void run_coeffs2(SuiteContext& ctx, const std::string& shape_id) {
    const auto& cfg = ctx.cfg;
    const CurvePtr curve = parse_shape2(shape_id);
    const Grid2 g = Grid2::make(curve, cfg.N);
    const auto zero = make_constant_field2(Vec2::Zero());
    const Cplx nok{0.0, 0.0};

    std::vector<Field2Ptr> fields;
    for (const auto& id : cfg.fields) fields.push_back(parse_field2(id, curve));

    for (std::size_t fi = 0; fi < fields.size(); ++fi) {
        const auto& xi = fields[fi];
        const std::string xname = cfg.fields[fi];

        FamilyHandle famJ{"J", [&](double t) {
                              return flatr(surface_jacobian(g, *scale_field2(t, xi)));
                          }};
        ctx.add_report("coeffs",
                       check_first_derivative(famJ, flatr(dJ(g, *zero, *xi)), cfg.ladder, 1.9,
                                              "dJ", xname),
                       shape_id, cfg.N, nok);

        FamilyHandle famN{"N", [&](double t) {
                              return flat(transported_normal(g, *scale_field2(t, xi))
                                              .cast<Cplx>());
                          }};
        ctx.add_report("coeffs",
                       check_first_derivative(famN, flat(dN(g, *zero, *xi).cast<Cplx>()),
                                              cfg.ladder, 1.9, "dN", xname),
                       shape_id, cfg.N, nok);

        ctx.add_report("coeffs",
                       grade_second(famJ, flatr(d2J(g, *xi, *xi)), cfg.ladder, "d2J", xname),
                       shape_id, cfg.N, nok);
        ctx.add_report("coeffs",
                       grade_second(famN, flat(d2N(g, *xi, *xi).cast<Cplx>()), cfg.ladder, "d2N",
                                    xname),
                       shape_id, cfg.N, nok);

        FamilyHandle famW{"W", [&](double t) {
                              return flat(wedge_W(g, *scale_field2(t, xi)).cast<Cplx>());
                          }};
        ctx.add_report("coeffs",
                       check_first_derivative(famW, flat(dm_W(g, *zero, *xi, 1).cast<Cplx>()),
                                              cfg.ladder, 1.9, "dmW_m1", xname),
                       shape_id, cfg.N, nok);

        ctx.add_identity("coeffs", "dmW_vanish_m2", xname, shape_id, cfg.N, nok,
                         dm_W(g, *zero, *xi, 2).cwiseAbs().maxCoeff(), 0.0);

        if (xname.rfind("constant", 0) == 0) {
            ctx.add_identity("coeffs", "dJ_exact_zero", xname, shape_id, cfg.N, nok,
                             dJ(g, *zero, *xi).cwiseAbs().maxCoeff(), 0.0);
            ctx.add_identity("coeffs", "dN_exact_zero", xname, shape_id, cfg.N, nok,
                             dN(g, *zero, *xi).cwiseAbs().maxCoeff(), 0.0);
        }
    }

    if (fields.size() >= 2) {
        const auto &a = fields[0], &b = fields[1];
        ctx.add_identity("coeffs", "d2J_swap", cfg.fields[0] + "|" + cfg.fields[1], shape_id,
                         cfg.N, nok, (d2J(g, *a, *b) - d2J(g, *b, *a)).cwiseAbs().maxCoeff(),
                         1e-13);
        std::function<Eigen::VectorXcd(const Field2Ptr&)> d2 = [&](const Field2Ptr& eta) {
            return flatr(d2J(g, *eta, *eta));
        };
        std::function<Field2Ptr(const Field2Ptr&, const Field2Ptr&)> add =
            [](const Field2Ptr& x, const Field2Ptr& y) { return add_fields2(x, y); };
        const double polar_err =
            max_abs(polarize<Field2Ptr>(d2, a, b, add) - flatr(d2J(g, *a, *b)));
        ctx.add_identity("coeffs", "polarization_d2J", cfg.fields[0] + "|" + cfg.fields[1],
                         shape_id, cfg.N, nok, polar_err, 1e-10);
        std::function<Eigen::VectorXcd(const Field2Ptr&)> d2n = [&](const Field2Ptr& eta) {
            return flat(d2N(g, *eta, *eta).cast<Cplx>());
        };
        const double polar_err_n =
            max_abs(polarize<Field2Ptr>(d2n, a, b, add) - flat(d2N(g, *a, *b).cast<Cplx>()));
        ctx.add_identity("coeffs", "polarization_d2N", cfg.fields[0] + "|" + cfg.fields[1],
                         shape_id, cfg.N, nok, polar_err_n, 1e-10);
    }
}

void run_coeffs3(SuiteContext& ctx, const std::string& shape_id) {
    const auto& cfg = ctx.cfg;
    const SurfPtr surf = parse_shape3(shape_id);
    const Grid3 g = Grid3::make(surf, 32, 64);
    const auto zero = make_constant_field3(Vec3::Zero());
    const Cplx nok{0.0, 0.0};

    std::vector<Field3Ptr> fields;
    for (const auto& id : cfg.fields) fields.push_back(parse_field3(id, surf));

    for (std::size_t fi = 0; fi < fields.size(); ++fi) {
        const auto& xi = fields[fi];
        const std::string xname = cfg.fields[fi];

        FamilyHandle famJ{"J", [&](double t) {
                              return flatr(surface_jacobian(g, *scale_field3(t, xi)));
                          }};
        ctx.add_report("coeffs",
                       check_first_derivative(famJ, flatr(dJ(g, *zero, *xi)), cfg.ladder, 1.9,
                                              "dJ", xname),
                       shape_id, g.size(), nok);

        FamilyHandle famN{"N", [&](double t) {
                              return flat(transported_normal(g, *scale_field3(t, xi))
                                              .cast<Cplx>());
                          }};
        ctx.add_report("coeffs",
                       check_first_derivative(famN, flat(dN(g, *zero, *xi).cast<Cplx>()),
                                              cfg.ladder, 1.9, "dN", xname),
                       shape_id, g.size(), nok);

        ctx.add_report("coeffs",
                       grade_second(famJ, flatr(d2J(g, *xi, *xi)), cfg.ladder, "d2J", xname),
                       shape_id, g.size(), nok);
        ctx.add_report("coeffs",
                       grade_second(famN, flat(d2N(g, *xi, *xi).cast<Cplx>()), cfg.ladder, "d2N",
                                    xname),
                       shape_id, g.size(), nok);

        FamilyHandle famW{"W", [&](double t) {
                              return flat(wedge_W(g, *scale_field3(t, xi)).cast<Cplx>());
                          }};
        ctx.add_report("coeffs",
                       check_first_derivative(famW, flat(dm_W(g, *zero, *xi, 1).cast<Cplx>()),
                                              cfg.ladder, 1.9, "dmW_m1", xname),
                       shape_id, g.size(), nok);
        ctx.add_identity("coeffs", "dmW_vanish_m3", xname, shape_id, g.size(), nok,
                         dm_W(g, *zero, *xi, 3).cwiseAbs().maxCoeff(), 0.0);

        if (xname.rfind("constant", 0) == 0) {
            ctx.add_identity("coeffs", "dJ_exact_zero", xname, shape_id, g.size(), nok,
                             dJ(g, *zero, *xi).cwiseAbs().maxCoeff(), 0.0);
            ctx.add_identity("coeffs", "dN_exact_zero", xname, shape_id, g.size(), nok,
                             dN(g, *zero, *xi).cwiseAbs().maxCoeff(), 0.0);
        }
    }

    if (fields.size() >= 2) {
        const auto &a = fields[0], &b = fields[1];
        ctx.add_identity("coeffs", "d2J_swap", cfg.fields[0] + "|" + cfg.fields[1], shape_id,
                         g.size(), nok, (d2J(g, *a, *b) - d2J(g, *b, *a)).cwiseAbs().maxCoeff(),
                         1e-13);
        std::function<Eigen::VectorXcd(const Field3Ptr&)> d2 = [&](const Field3Ptr& eta) {
            return flatr(d2J(g, *eta, *eta));
        };
        std::function<Field3Ptr(const Field3Ptr&, const Field3Ptr&)> add =
            [](const Field3Ptr& x, const Field3Ptr& y) { return add_fields3(x, y); };
        ctx.add_identity("coeffs", "polarization_d2J", cfg.fields[0] + "|" + cfg.fields[1],
                         shape_id, g.size(), nok,
                         max_abs(polarize<Field3Ptr>(d2, a, b, add) - flatr(d2J(g, *a, *b))),
                         1e-10);
        std::function<Eigen::VectorXcd(const Field3Ptr&)> d2n = [&](const Field3Ptr& eta) {
            return flat(d2N(g, *eta, *eta).cast<Cplx>());
        };
        ctx.add_identity("coeffs", "polarization_d2N", cfg.fields[0] + "|" + cfg.fields[1],
                         shape_id, g.size(), nok,
                         max_abs(polarize<Field3Ptr>(d2n, a, b, add) -
                                 flat(d2N(g, *a, *b).cast<Cplx>())),
                         1e-10);
    }
}

// ---------------- surfops ----------------

void run_surfops2(SuiteContext& ctx, const std::string& shape_id) {
    const auto& cfg = ctx.cfg;
    const CurvePtr curve = parse_shape2(shape_id);
    const Grid2 g = Grid2::make(curve, cfg.N);
    const auto zero = make_constant_field2(Vec2::Zero());
    const Cplx nok{0.0, 0.0};

    const std::vector<ScalarJet2> scalars = {parse_scalar_jet2("coord(0)"),
                                             parse_scalar_jet2("poly(1)")};
    const std::vector<VectorJet2> vectors = {parse_vector_jet2("normal-ext"),
                                             parse_vector_jet2("coordv(0)")};

    for (std::size_t fi = 0; fi < cfg.fields.size(); ++fi) {
        const auto xi = parse_field2(cfg.fields[fi], curve);
        const std::string xname = cfg.fields[fi];

        for (const auto& u : scalars) {
            FamilyHandle fam{"G(t xi) u", [&](double t) {
                                 return flat(
                                     transported_gradient(g, *scale_field2(t, xi), u).cast<Cplx>());
                             }};
            ctx.add_report("surfops",
                           check_first_derivative(fam, flat(dG(g, *zero, *xi, u).cast<Cplx>()),
                                                  cfg.ladder, 1.9, "dG[" + u.name + "]", xname),
                           shape_id, cfg.N, nok);
        }
        for (const auto& u : vectors) {
            FamilyHandle fam{"D(t xi) u", [&](double t) {
                                 return flatr(transported_divergence(g, *scale_field2(t, xi), u));
                             }};
            ctx.add_report("surfops",
                           check_first_derivative(fam, flatr(dD(g, *zero, *xi, u)), cfg.ladder,
                                                  1.9, "dD[" + u.name + "]", xname),
                           shape_id, cfg.N, nok);
        }

        const auto direct = dN(g, *zero, *xi);
        const auto Gxi = transported_grad(g, *zero, *xi);
        Eigen::Matrix2Xd via(2, g.N);
        for (int i = 0; i < g.N; ++i) via.col(i) = -Gxi[i] * g.normal.col(i);
        ctx.add_identity("surfops", "dN_closure", xname, shape_id, cfg.N, nok,
                         (direct - via).cwiseAbs().maxCoeff(), 1e-12);
    }

    if (shape_id == "circle") {
        ScalarJet2 ext1 = parse_scalar_jet2("coord(0)");
        ScalarJet2 ext2{"x1/|x|^2", [](const Vec2& x) { return x[0] / x.squaredNorm(); },
                        [](const Vec2& x) {
                            const double r2 = x.squaredNorm();
                            return Vec2(1.0 / r2 - 2.0 * x[0] * x[0] / (r2 * r2),
                                        -2.0 * x[0] * x[1] / (r2 * r2));
                        }};
        ctx.add_identity("surfops", "extension_independence", "coord(0)", shape_id, cfg.N, nok,
                         (surface_gradient(g, ext1) - surface_gradient(g, ext2))
                             .cwiseAbs()
                             .maxCoeff(),
                         1e-10);
    }
}

void run_surfops3(SuiteContext& ctx, const std::string& shape_id) {
    const auto& cfg = ctx.cfg;
    const SurfPtr surf = parse_shape3(shape_id);
    const Grid3 g = Grid3::make(surf, 32, 64);
    const auto zero = make_constant_field3(Vec3::Zero());
    const Cplx nok{0.0, 0.0};

    const std::vector<ScalarJet3> scalars = {parse_scalar_jet3("coord(2)"),
                                             parse_scalar_jet3("poly(2)")};
    const std::vector<VectorJet3> vectors = {parse_vector_jet3("normal-ext"),
                                             parse_vector_jet3("vpoly(1)")};

    for (std::size_t fi = 0; fi < cfg.fields.size(); ++fi) {
        const auto xi = parse_field3(cfg.fields[fi], surf);
        const std::string xname = cfg.fields[fi];

        for (const auto& u : scalars) {
            FamilyHandle fam{"G3", [&](double t) {
                                 return flat(
                                     transported_gradient(g, *scale_field3(t, xi), u).cast<Cplx>());
                             }};
            ctx.add_report("surfops",
                           check_first_derivative(fam, flat(dG(g, *zero, *xi, u).cast<Cplx>()),
                                                  cfg.ladder, 1.9, "dG[" + u.name + "]", xname),
                           shape_id, g.size(), nok);
        }
        for (const auto& u : vectors) {
            FamilyHandle fam{"D3", [&](double t) {
                                 return flatr(transported_divergence(g, *scale_field3(t, xi), u));
                             }};
            ctx.add_report("surfops",
                           check_first_derivative(fam, flatr(dD(g, *zero, *xi, u)), cfg.ladder,
                                                  1.9, "dD[" + u.name + "]", xname),
                           shape_id, g.size(), nok);
        }

        const auto direct = dN(g, *zero, *xi);
        const auto Gxi = transported_grad(g, *zero, *xi);
        Eigen::Matrix3Xd via(3, g.size());
        for (int p = 0; p < g.size(); ++p) via.col(p) = -Gxi[p] * g.normal.col(p);
        ctx.add_identity("surfops", "dN_closure", xname, shape_id, g.size(), nok,
                         (direct - via).cwiseAbs().maxCoeff(), 1e-12);
    }

    ScalarJet3 u1 = parse_scalar_jet3("coord(0)");
    ScalarJet3 u2 = parse_scalar_jet3("poly(2)");
    const auto m12 = gunter_mjk(g, u1, 1, 2);
    const auto m21 = gunter_mjk(g, u1, 2, 1);
    ctx.add_identity("surfops", "gunter_antisymmetry", "coord(0)", shape_id, g.size(), nok,
                     (m12 + m21).cwiseAbs().maxCoeff(), 1e-13);
    ctx.add_identity("surfops", "stokes_scalar_m01", "coord(0)|poly(2)", shape_id, g.size(), nok,
                     stokes_residual(g, u1, u2, 0, 1), 1e-8);
    ctx.add_identity("surfops", "stokes_scalar_m12", "poly(2)|coord(0)", shape_id, g.size(), nok,
                     stokes_residual(g, u2, u1, 1, 2), 1e-8);
    const VectorJet3 vn = parse_vector_jet3("normal-ext");
    const VectorJet3 vp = parse_vector_jet3("vpoly(1)");
    ctx.add_identity("surfops", "stokes_vector", "normal-ext|vpoly(1)", shape_id, g.size(), nok,
                     stokes_residual(g, vn, vp), 1e-8);
    ctx.add_identity("surfops", "traction_rewrite", "vpoly(1)", shape_id, g.size(), nok,
                     traction_rewrite_check(g, vp, 1.3, 0.8), 1e-12);
}

// ---------------- operators ----------------

void run_operators(SuiteContext& ctx, const std::string& shape_id) {
    const auto& cfg = ctx.cfg;
    if (shape_is_3d(shape_id)) {
        throw ConfigError("operators suite requires a 2d shape (got '" + shape_id + "')");
    }
    const KernelId kid = parse_kernel(cfg.kernel);
    if (kid.type != KernelId::Type::Helmholtz2d) {
        throw ConfigError("operators suite requires a helmholtz2d kernel");
    }
    const Cplx kappa = kid.kappa;
    const CurvePtr curve = parse_shape2(shape_id);
    const Grid2 g = Grid2::make(curve, cfg.N);

    for (std::size_t fi = 0; fi < cfg.fields.size(); ++fi) {
        const auto xi = parse_field2(cfg.fields[fi], curve);
        const std::string xname = cfg.fields[fi];

        const OperatorMatrix dV = assemble_dV(g, kappa, *xi);
        FamilyHandle famV{"V family", [&](double t) {
                              return flat(assemble_pulled_back(g, kappa, scale_field2(t, xi),
                                                               OperatorKind::V)
                                              .M);
                          }};
        ctx.add_report("operators",
                       check_first_derivative(famV, flat(dV.M), cfg.ladder, 1.9, "dV", xname),
                       shape_id, cfg.N, kappa);

        {
            const auto one = fd_first_onesided(famV, cfg.ladder);
            std::vector<double> errs;
            for (const auto& e : one.estimate) errs.push_back(max_abs(e - flat(dV.M)));
            const auto fit = order_fit(errs, cfg.ladder);
            DerivativeReport rep;
            rep.target = "dV_onesided";
            rep.xi = xname;
            rep.ladder = cfg.ladder;
            rep.errors = errs;
            rep.order = fit.order;
            rep.saturated = fit.saturated;
            rep.threshold = 0.9;
            rep.max_error = errs.empty() ? 0.0 : *std::max_element(errs.begin(), errs.end());
            rep.pass = fit.saturated || fit.order >= 0.9;
            ctx.add_report("operators", rep, shape_id, cfg.N, kappa);
        }

        const OperatorMatrix dD = assemble_dD_op(g, kappa, *xi);
        FamilyHandle famD{"D family", [&](double t) {
                              return flat(assemble_pulled_back(g, kappa, scale_field2(t, xi),
                                                               OperatorKind::D)
                                              .M);
                          }};
        ctx.add_report("operators",
                       check_first_derivative(famD, flat(dD.M), cfg.ladder, 1.9, "dD_op", xname),
                       shape_id, cfg.N, kappa);

        // || pulled_back(t xi) - base - t * analytic ||_max fits order >= 1.9
        auto remainder_row = [&](const char* target, const FamilyHandle& fam,
                                 const Eigen::MatrixXcd& analytic) {
            std::vector<double> rem;
            for (double t : cfg.ladder) {
                rem.push_back(taylor_remainder(fam, flat(analytic), std::nullopt, t));
            }
            DerivativeReport rep;
            rep.target = target;
            rep.xi = xname;
            rep.ladder = cfg.ladder;
            rep.errors = rem;
            rep.threshold = 1.9;
            rep.max_error = rem.empty() ? 0.0 : *std::max_element(rem.begin(), rem.end());
            OrderFit fit;
            try {
                fit = order_fit(rem, cfg.ladder);
            } catch (const InsufficientData&) {
                fit.saturated = rep.max_error <= 100.0 * kRoundoffFloor;
            }
            rep.order = fit.order;
            rep.saturated = fit.saturated;
            rep.pass = fit.saturated || fit.order >= 1.9;
            ctx.add_report("operators", rep, shape_id, cfg.N, kappa);
        };
        remainder_row("dV_remainder", famV, dV.M);
        remainder_row("dD_remainder", famD, dD.M);

        if (xname.rfind("constant", 0) == 0) {
            ctx.add_identity("operators", "dV_exact_zero", xname, shape_id, cfg.N, kappa,
                             dV.M.cwiseAbs().maxCoeff(), 0.0);
            ctx.add_identity("operators", "dD_exact_zero", xname, shape_id, cfg.N, kappa,
                             dD.M.cwiseAbs().maxCoeff(), 0.0);
        }
    }

    const OperatorMatrix D = assemble_D(g, kappa);
    const OperatorMatrix Kp = assemble_Kprime(g, kappa);
    const Eigen::MatrixXcd adjD =
        g.weight.cwiseInverse().asDiagonal() * D.M.transpose() * g.weight.asDiagonal();
    ctx.add_identity("operators", "Kprime_adjoint", "-", shape_id, cfg.N, kappa,
                     (Kp.M - adjD).cwiseAbs().maxCoeff(), 1e-10);

    const OperatorMatrix V = assemble_V(g, kappa);
    const OperatorMatrix Vt = assemble_pulled_back(
        g, kappa, make_constant_field2(Vec2(0.37, -0.61)), OperatorKind::V);
    ctx.add_identity("operators", "translation_invariance", "constant", shape_id, cfg.N, kappa,
                     (Vt.M - V.M).cwiseAbs().maxCoeff(), 1e-12);

    if (shape_id == "circle") {
        const auto n = make_normal_field2(curve);
        const OperatorMatrix Vr =
            assemble_pulled_back(g, kappa, scale_field2(0.1, n), OperatorKind::V);
        const Grid2 gbig = Grid2::make(make_ellipse(1.1, 1.1), cfg.N);
        ctx.add_identity("operators", "two_route_radial", "normal", shape_id, cfg.N, kappa,
                         (Vr.M - assemble_V(gbig, kappa).M).cwiseAbs().maxCoeff(), 1e-10);
    }
}

// ---------------- potentials ----------------

void run_potentials(SuiteContext& ctx, const std::string& shape_id) {
    const auto& cfg = ctx.cfg;
    if (shape_is_3d(shape_id)) {
        throw ConfigError("potentials suite requires a 2d shape (got '" + shape_id + "')");
    }
    const KernelId kid = parse_kernel(cfg.kernel);
    if (kid.type != KernelId::Type::Helmholtz2d) {
        throw ConfigError("potentials suite requires a helmholtz2d kernel");
    }
    const Cplx kappa = kid.kappa;
    const CurvePtr curve = parse_shape2(shape_id);
    const Grid2 g = Grid2::make(curve, cfg.N);
    const Eigen::VectorXcd one = Eigen::VectorXcd::Ones(g.N);

    // seeded sample points at distances in [0.5, 3] from the outermost node
    XorShift64Star rng(cfg.seed);
    Eigen::Matrix2Xd pts(2, 4);
    double rmax = 0.0;
    for (int i = 0; i < g.N; ++i) rmax = std::max(rmax, g.node.col(i).norm());
    for (int p = 0; p < pts.cols(); ++p) {
        const double ang = rng.uniform(0.0, 2.0 * kPi);
        const double rad = rmax + rng.uniform(0.5, 3.0);
        pts.col(p) = rad * Vec2(std::cos(ang), std::sin(ang));
    }

    for (std::size_t fi = 0; fi < cfg.fields.size(); ++fi) {
        const auto xi = parse_field2(cfg.fields[fi], curve);
        const std::string xname = cfg.fields[fi];
        const auto analytic = eval_dpotential(g, kappa, one, pts, *xi);
        FamilyHandle fam{"potential family", [&](double t) {
                             return Eigen::VectorXcd(
                                 eval_potential_pulled_back(g, kappa, one, pts,
                                                            *scale_field2(t, xi))
                                     .values);
                         }};
        ctx.add_report("potentials",
                       check_first_derivative(fam, analytic.values, cfg.ladder, 1.9, "dP", xname),
                       shape_id, cfg.N, kappa);
        if (xname == "normal") {
            const auto est = fd_first(fam, cfg.ladder);
            ctx.add_identity("potentials", "dP_err_bound", xname, shape_id, cfg.N, kappa,
                             max_abs(est.estimate.back() - analytic.values), 1e-6);
        }
    }

    const auto dzero = eval_dpotential(g, kappa, one, pts, *make_constant_field2(Vec2::Zero()));
    ctx.add_identity("potentials", "dP_zero_field", "0", shape_id, cfg.N, kappa,
                     dzero.values.cwiseAbs().maxCoeff(), 0.0);

    if (shape_id == "circle") {
        const auto cfield = make_constant_field2(Vec2(0.8, 0.6));
        auto fd_err_at = [&](double dist) {
            Eigen::Matrix2Xd p(2, 1);
            p.col(0) = Vec2(1.0 + dist, 0.0);
            const auto da = eval_dpotential(g, kappa, one, p, *cfield);
            FamilyHandle f{"pf", [&](double t) {
                               return Eigen::VectorXcd(
                                   eval_potential_pulled_back(g, kappa, one, p,
                                                              *scale_field2(t, cfield))
                                       .values);
                           }};
            return max_abs(fd_first(f, cfg.ladder).richardson - da.values);
        };
        const double near = fd_err_at(0.1), far = fd_err_at(3.0);
        SuiteRow row;
        row.suite = "potentials";
        row.target = "regularity_loss_ratio";
        row.xi = "constant";
        row.shape = shape_id;
        row.N = cfg.N;
        row.kappa = kappa;
        row.order = "n/a";
        row.max_error = far > 0 ? near / far : 0.0;
        row.pass = near > 10.0 * far;
        ctx.result.rows.push_back(row);
        ctx.result.all_pass = ctx.result.all_pass && row.pass;

        Eigen::Matrix2Xd decay(2, 2);
        decay.col(0) = Vec2(10.0, 0.0);
        decay.col(1) = Vec2(0.0, 100.0);
        const auto ps = eval_potential(g, kappa, one, decay, LayerKind::Single);
        const double ratio = std::abs(ps.values[0]) / std::abs(ps.values[1]);
        ctx.add_identity("potentials", "radiating_decay", "u=1", shape_id, cfg.N, kappa,
                         std::abs(ratio - std::sqrt(10.0)), 0.4 * std::sqrt(10.0));
    }
}

// ---------------- kernels ----------------

void run_kernels(SuiteContext& ctx) {
    const auto& cfg = ctx.cfg;
    const Cplx kappa{1.5, 0.0};
    const Cplx nok{0.0, 0.0};

    const auto rep2 = class_certify(
        2, 1,
        [&](const Eigen::VectorXd& z) {
            return std::abs(helmholtz_Ga2(kappa, Eigen::Vector2d(z[0], z[1])));
        },
        [&](const Eigen::VectorXd& z) {
            const Eigen::Vector2d zz(z[0], z[1]);
            return std::vector<double>{grad_Ga2(kappa, zz).cwiseAbs().maxCoeff(),
                                       hess_Ga2(kappa, zz).cwiseAbs().maxCoeff()};
        },
        [&](const Eigen::VectorXd& z) {
            return Eigen::VectorXcd(grad_Ga2(kappa, Eigen::Vector2d(z[0], z[1])));
        },
        2, 100, cfg.seed);
    ctx.add_identity("kernels", "class_acoustic2d", "-", "-", 0, kappa, rep2.pass ? 0.0 : 1.0,
                     0.5);

    const auto rep3 = class_certify(
        3, 1,
        [&](const Eigen::VectorXd& z) {
            return std::abs(helmholtz_Ga3(kappa, Eigen::Vector3d(z[0], z[1], z[2])));
        },
        [&](const Eigen::VectorXd& z) {
            const Eigen::Vector3d zz(z[0], z[1], z[2]);
            return std::vector<double>{grad_Ga3(kappa, zz).cwiseAbs().maxCoeff(),
                                       hess_Ga3(kappa, zz).cwiseAbs().maxCoeff()};
        },
        [&](const Eigen::VectorXd& z) {
            return Eigen::VectorXcd(grad_Ga3(kappa, Eigen::Vector3d(z[0], z[1], z[2])));
        },
        2, 100, cfg.seed + 1);
    ctx.add_identity("kernels", "class_acoustic3d", "-", "-", 0, kappa, rep3.pass ? 0.0 : 1.0,
                     0.5);

    const KernelId kid = parse_kernel(cfg.kernel);
    Cplx ks{2.0, 0.0}, kp{1.2, 0.0};
    double mu = 1.0;
    if (kid.type == KernelId::Type::Elastic3d) {
        ks = kid.omega * std::sqrt(kid.rho / kid.mu);
        kp = kid.omega * std::sqrt(kid.rho / (kid.lambda + 2.0 * kid.mu));
        mu = kid.mu;
    }
    auto ge_grad_flat = [&](const Eigen::VectorXd& z) {
        const Eigen::Vector3d zz(z[0], z[1], z[2]);
        const double h = 1e-4 * zz.norm();
        Eigen::VectorXcd out(27);
        int idx = 0;
        for (int c = 0; c < 3; ++c) {
            Eigen::Vector3d dz = Eigen::Vector3d::Zero();
            dz[c] = h;
            const CMat3 d =
                (elastic_Ge(ks, kp, mu, zz + dz) - elastic_Ge(ks, kp, mu, zz - dz)) / (2.0 * h);
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) out[idx++] = d(i, j);
        }
        return out;
    };
    const auto repE = class_certify(
        3, 1,
        [&](const Eigen::VectorXd& z) {
            return elastic_Ge(ks, kp, mu, Eigen::Vector3d(z[0], z[1], z[2])).cwiseAbs().maxCoeff();
        },
        [&](const Eigen::VectorXd& z) {
            return std::vector<double>{ge_grad_flat(z).cwiseAbs().maxCoeff()};
        },
        ge_grad_flat, 1, 100, cfg.seed + 2);
    ctx.add_identity("kernels", "class_elastic", "-", "-", 0, nok, repE.pass ? 0.0 : 1.0, 0.5);

    double worst = 0.0;
    for (double r : {0.3, 1.0, 3.0}) {
        const Eigen::Vector2d z2 = r * Eigen::Vector2d(0.6, 0.8);
        const double h = 1e-6;
        for (int c = 0; c < 2; ++c) {
            Eigen::Vector2d dz = Eigen::Vector2d::Zero();
            dz[c] = h;
            const Cplx fd = (helmholtz_Ga2(kappa, z2 + dz) - helmholtz_Ga2(kappa, z2 - dz)) /
                            (2.0 * h);
            worst = std::max(worst, std::abs(grad_Ga2(kappa, z2)[c] - fd) /
                                        std::max(1e-30, std::abs(fd)));
        }
    }
    ctx.add_identity("kernels", "grad_fd_consistency", "-", "-", 0, kappa, worst, 1e-7);

    double pde = 0.0;
    for (double r : {0.5, 1.0, 2.0}) {
        const Eigen::Vector3d z3(0.1, r, -0.4);
        const Cplx res = hess_Ga3(kappa, z3).trace() + kappa * kappa * helmholtz_Ga3(kappa, z3);
        pde = std::max(pde, std::abs(res) / std::abs(kappa * kappa * helmholtz_Ga3(kappa, z3)));
    }
    ctx.add_identity("kernels", "helmholtz_residual", "-", "-", 0, kappa, pde, 1e-6);

    double navier = 0.0;
    for (int col = 0; col < 3; ++col) {
        const Eigen::Vector3d z(0.5, -0.3, 0.8);
        const CVec3 res = elastic_navier_residual(2.0, 1.0, 1.0, 0.7, z, col);
        const Cplx ks2 = 2.0;
        const Cplx kp2 = 2.0 / std::sqrt(2.7);
        const double scale = 4.0 * (elastic_Ge(ks2, kp2, 1.0, z) * CVec3::Unit(col)).norm();
        navier = std::max(navier, res.norm() / scale);
    }
    ctx.add_identity("kernels", "navier_residual", "-", "-", 0, nok, navier, 1e-6);

    {
        std::vector<double> lr, lm;
        for (int k = 0; k < 8; ++k) {
            const double r = 0.128 * std::pow(2.0, -k);
            lr.push_back(std::log(r));
            lm.push_back(std::log(std::abs(acoustic3d_expansion_remainder(kappa, r))));
        }
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < lr.size(); ++i) {
            sx += lr[i];
            sy += lm[i];
            sxx += lr[i] * lr[i];
            sxy += lr[i] * lm[i];
        }
        const double n = double(lr.size());
        const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        SuiteRow row;
        row.suite = "kernels";
        row.target = "expansion_remainder_slope";
        row.xi = "-";
        row.shape = "-";
        row.N = 0;
        row.kappa = kappa;
        row.order = fmt_order(slope);
        row.max_error = 0.0;
        row.pass = slope >= 2.9;
        ctx.result.rows.push_back(row);
        ctx.result.all_pass = ctx.result.all_pass && row.pass;
    }

    {
        const auto circle = make_circle();
        const auto defo = deform(circle, scale_field2(0.1, make_fourier_field2(2, 1.0, 1.0)));
        double worst_ratio = 0.0;
        for (const auto& curve : {circle, defo}) {
            for (double hh = 1e-4; hh <= 0.1; hh *= 2.0) {
                worst_ratio =
                    std::max(worst_ratio, std::abs(doublelayer_flatness(*curve, 1.0 + hh, 1.0)));
            }
        }
        ctx.add_identity("kernels", "doublelayer_flatness", "fourier2d(2,1,1)", "circle", 0, nok,
                         worst_ratio, 10.0);
    }
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    ExperimentConfig cfg;
    try {
        if (!j.contains("suite")) throw ConfigError("config: missing required field 'suite'");
        cfg.suite = j.at("suite").get<std::string>();
        if (!kSuites.count(cfg.suite)) throw ConfigError("config: unknown suite '" + cfg.suite + "'");
        if (j.contains("shape")) cfg.shape = j.at("shape").get<std::string>();
        if (j.contains("fields")) {
            cfg.fields = j.at("fields").get<std::vector<std::string>>();
            if (cfg.fields.empty()) throw ConfigError("config: 'fields' must be non-empty");
        }
        if (j.contains("kernel")) cfg.kernel = j.at("kernel").get<std::string>();
        if (j.contains("N")) cfg.N = j.at("N").get<int>();
        if (j.contains("ladder")) {
            cfg.ladder = j.at("ladder").get<std::vector<double>>();
        }
        if (j.contains("out")) cfg.out_dir = j.at("out").get<std::string>();
        if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("inject_failure")) cfg.inject_failure = j.at("inject_failure").get<bool>();
        if (j.contains("N_list")) cfg.N_list = j.at("N_list").get<std::vector<int>>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }

    if (cfg.ladder.size() < 2) throw ConfigError("config: ladder needs at least two entries");
    for (std::size_t i = 0; i < cfg.ladder.size(); ++i) {
        if (!(cfg.ladder[i] > 0.0)) throw ConfigError("config: ladder entries must be positive");
        if (i > 0 && !(cfg.ladder[i] < cfg.ladder[i - 1])) {
            throw ConfigError("config: ladder must be strictly decreasing");
        }
    }
    if (!shape_is_3d(cfg.shape) && !power_of_two(cfg.N)) {
        throw ConfigError("config: N must be a power of two for 2d shapes");
    }
    if (shape_is_3d(cfg.shape)) {
        auto s = parse_shape3(cfg.shape);
        for (const auto& f : cfg.fields) (void)parse_field3(f, s);
    } else {
        auto s = parse_shape2(cfg.shape);
        for (const auto& f : cfg.fields) (void)parse_field2(f, s);
    }
    (void)parse_kernel(cfg.kernel);
    return cfg;
}

nlohmann::json ExperimentConfig::to_json() const {
    nlohmann::json j;
    j["suite"] = suite;
    j["shape"] = shape;
    j["fields"] = fields;
    j["kernel"] = kernel;
    j["N"] = N;
    j["ladder"] = ladder;
    j["out"] = out_dir;
    j["seed"] = seed;
    j["inject_failure"] = inject_failure;
    if (!N_list.empty()) j["N_list"] = N_list;
    return j;
}

RunResult run_suites(const ExperimentConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    RunResult result;
    SuiteContext ctx{cfg, result};

    const bool is3d = shape_is_3d(cfg.shape);
    auto want = [&](const char* s) { return cfg.suite == s || cfg.suite == "all"; };

    if (want("coeffs")) {
        if (is3d) {
            run_coeffs3(ctx, cfg.shape);
        } else {
            run_coeffs2(ctx, cfg.shape);
        }
    }
    if (want("surfops")) {
        if (is3d) {
            run_surfops3(ctx, cfg.shape);
        } else {
            run_surfops2(ctx, cfg.shape);
        }
    }
    if (want("operators")) {
        run_operators(ctx, is3d ? "circle" : cfg.shape);
    }
    if (want("potentials")) {
        run_potentials(ctx, is3d ? "circle" : cfg.shape);
    }
    if (want("kernels")) {
        run_kernels(ctx);
    }

    if (cfg.inject_failure) {
        SuiteRow row;
        row.suite = cfg.suite;
        row.target = "injected_failure";
        row.xi = "-";
        row.shape = cfg.shape;
        row.N = cfg.N;
        row.order = "n/a";
        row.max_error = 1.0;
        row.pass = false;
        result.rows.push_back(row);
        result.all_pass = false;
    }

    result.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

std::string summary_csv(const RunResult& result) {
    std::string out = "suite,target,xi,shape,N,kappa,order,max_error,pass\n";
    for (const auto& r : result.rows) {
        out += r.suite + "," + r.target + "," + r.xi + "," + r.shape + "," + std::to_string(r.N) +
               "," + fmt_kappa(r.kappa) + "," + r.order + "," + fmt_double(r.max_error) + "," +
               (r.pass ? "true" : "false") + "\n";
    }
    return out;
}

int write_outputs(const ExperimentConfig& cfg, const RunResult& result, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);

    nlohmann::json reports = nlohmann::json::array();
    for (const auto& rep : result.reports) reports.push_back(rep.to_json());
    {
        std::ofstream f(out_dir + "/report.json");
        f << reports.dump(2) << "\n";
    }
    {
        std::ofstream f(out_dir + "/summary.csv");
        f << summary_csv(result);
    }
    {
        nlohmann::json manifest;
        manifest["config"] = cfg.to_json();
        manifest["version"] = kVersion;
        manifest["wall_ms"] = result.wall_ms;
        manifest["all_pass"] = result.all_pass;
        std::ofstream f(out_dir + "/MANIFEST.json");
        f << manifest.dump(2) << "\n";
    }
    return result.all_pass ? 0 : 1;
}

TableResult run_table(const ExperimentConfig& cfg) {
    if (cfg.suite != "operators") throw ConfigError("table: suite must be 'operators'");
    if (cfg.N_list.empty()) throw ConfigError("table: N_list must be non-empty");
    const KernelId kid = parse_kernel(cfg.kernel);
    if (kid.type != KernelId::Type::Helmholtz2d) {
        throw ConfigError("table: requires a helmholtz2d kernel");
    }
    const Cplx kappa = kid.kappa;
    const CurvePtr curve = parse_shape2(cfg.shape);

    TableResult out;
    out.csv = "N,self_error,fd_order\n";
    double prev = 1e300;
    for (int N : cfg.N_list) {
        if (!power_of_two(N)) throw ConfigError("table: every N must be a power of two");
        const Grid2 g = Grid2::make(curve, N);
        const Grid2 gf = Grid2::make(curve, 2 * N);
        const OperatorMatrix V = assemble_V(g, kappa);
        const OperatorMatrix Vf = assemble_V(gf, kappa);
        Eigen::VectorXcd u(g.N), uf(gf.N);
        for (int j = 0; j < g.N; ++j) u[j] = std::exp(kI * g.theta[j]) + 0.5;
        for (int j = 0; j < gf.N; ++j) uf[j] = std::exp(kI * gf.theta[j]) + 0.5;
        const Eigen::VectorXcd a = V.M * u, b = Vf.M * uf;
        double self_err = 0.0;
        for (int j = 0; j < g.N; ++j) self_err = std::max(self_err, std::abs(a[j] - b[2 * j]));
        // monotone decrease is only meaningful above the roundoff floor
        if (self_err >= prev && self_err > kRoundoffFloor) out.monotone = false;
        prev = self_err;

        const auto xi = parse_field2(cfg.fields.front(), curve);
        const OperatorMatrix dV = assemble_dV(g, kappa, *xi);
        FamilyHandle fam{"V family", [&](double t) {
                             return flat(
                                 assemble_pulled_back(g, kappa, scale_field2(t, xi), OperatorKind::V)
                                     .M);
                         }};
        const auto rep = check_first_derivative(fam, flat(dV.M), cfg.ladder, 1.9, "dV",
                                                cfg.fields.front());
        out.csv += std::to_string(N) + "," + fmt_double(self_err) + "," +
                   (rep.saturated ? std::string("PASS_SATURATED") : fmt_order(rep.order)) + "\n";
    }
    return out;
}

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"shape calculus verification suites for boundary integral operators"};
    app.require_subcommand(1);

    std::string config_path, suite_override, out_override;

    CLI::App* run = app.add_subcommand("run", "run a verification suite");
    run->add_option("--config", config_path, "JSON config file")->required();
    run->add_option("--suite", suite_override, "override the configured suite");
    run->add_option("--out", out_override, "override the output directory");

    CLI::App* table = app.add_subcommand("table", "operator convergence table");
    table->add_option("--config", config_path, "JSON config file")->required();
    table->add_option("--out", out_override, "override the output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        nlohmann::json j;
        {
            std::ifstream f(config_path);
            if (!f) throw ConfigError("cannot open config file: " + config_path);
            try {
                f >> j;
            } catch (const nlohmann::json::exception& e) {
                throw ConfigError(std::string("config parse error: ") + e.what());
            }
        }
        if (!suite_override.empty()) j["suite"] = suite_override;
        ExperimentConfig cfg = ExperimentConfig::from_json(j);
        const std::string out_dir = out_override.empty() ? cfg.out_dir : out_override;

        if (run->parsed()) {
            const RunResult result = run_suites(cfg);
            const int code = write_outputs(cfg, result, out_dir);
            if (code != 0) {
                for (const auto& r : result.rows) {
                    if (!r.pass) {
                        std::cerr << "FAIL " << r.suite << "/" << r.target << " xi=" << r.xi
                                  << " shape=" << r.shape << " max_error=" << r.max_error << "\n";
                    }
                }
            }
            return code;
        }
        const TableResult tr = run_table(cfg);
        std::filesystem::create_directories(out_dir);
        std::ofstream f(out_dir + "/table.csv");
        f << tr.csv;
        if (!tr.monotone) {
            std::cerr << "FAIL table: self-convergence errors are not monotonically decreasing\n";
            return 1;
        }
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace shapebie

// Copyright (c) 2026 the shapebie authors
// SPDX-License-Identifier: Apache-2.0
#include "shapebie/operators.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "json.hpp"
#include "shapebie/errors.hpp"
#include "shapebie/util.hpp"

namespace shapebie {

namespace {

constexpr double kPi = 3.14159265358979323846264338;
constexpr double kTwoPi = 2.0 * kPi;
const Cplx kI{0.0, 1.0};

// per-node curve jets shared by the assemblers
struct Jets {
    Eigen::Matrix2Xd x, x1, x2, n;
    Eigen::VectorXd speed;
};

Jets curve_jets(const Grid2& g) {
    Jets j;
    const int N = g.N;
    j.x = g.node;
    j.x1.resize(2, N);
    j.x2.resize(2, N);
    j.n = g.normal;
    j.speed = g.speed;
    for (int i = 0; i < N; ++i) {
        j.x1.col(i) = g.curve->d1(g.theta[i]);
        j.x2.col(i) = g.curve->d2(g.theta[i]);
    }
    return j;
}

// s = 2 |sin((theta_i - theta_j)/2)| depends only on i - j on the uniform grid
Eigen::VectorXd chord_table(int N) {
    Eigen::VectorXd s(N);
    for (int k = 0; k < N; ++k) s[k] = 2.0 * std::abs(std::sin(kPi * k / N));
    return s;
}

struct LogRule {
    Eigen::VectorXd R;   // R(2 pi k / N)
    double trapez;       // 2 pi / N
};

LogRule log_rule(int N) { return {log_rule_weights(N), kTwoPi / N}; }

// Generic assembler: the caller provides A(i,j), B(i,j) with the kernel equal
// to A log(4 sin^2((t-s)/2)) + B including the area element.
template <typename FA, typename FB>
Eigen::MatrixXcd assemble_split(const Grid2& g, FA&& A, FB&& B) {
    const int N = g.N;
    const LogRule rule = log_rule(N);
    Eigen::MatrixXcd M(N, N);
    parallel_for(N, [&](int i) {
        for (int j = 0; j < N; ++j) {
            const int k = (i - j + N) % N;
            M(i, j) = rule.R[k] * A(i, j) + rule.trapez * B(i, j);
        }
    });
    return M;
}

struct PairData {
    Eigen::Vector2d z;
    double rho, q;
    RadialSplit2 split;
};

}  // namespace

Eigen::VectorXd log_rule_weights(int N) {
    if (N < 4 || N % 2 != 0) throw ParameterError("log rule needs even N >= 4");
    const int n = N / 2;
    Eigen::VectorXd R(N);
    for (int k = 0; k < N; ++k) {
        const double t = kTwoPi * k / N;
        double sum = 0.0;
        for (int m = 1; m < n; ++m) sum += std::cos(m * t) / m;
        R[k] = -(kTwoPi / n) * sum - (kPi / (n * n)) * std::cos(n * t);
    }
    return R;
}

Eigen::MatrixXd trig_diff_matrix(int N) {
    if (N % 2 != 0) throw ParameterError("trig differentiation needs even N");
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(N, N);
    for (int i = 0; i < N; ++i) {
        for (int j = 0; j < N; ++j) {
            if (i == j) continue;
            const double t = kPi * (i - j) / N;
            const double sign = ((i - j) % 2 == 0) ? 1.0 : -1.0;
            D(i, j) = 0.5 * sign / std::tan(t);
        }
    }
    return D;
}

namespace {

OperatorMatrix make_op(const Grid2& g, Cplx kappa, std::string tag, Eigen::MatrixXcd M) {
    OperatorMatrix op;
    op.M = std::move(M);
    op.tag = std::move(tag);
    op.kappa = kappa;
    op.shape = g.curve->name();
    op.N = g.N;
    return op;
}

}  // namespace

OperatorMatrix assemble_V(const Grid2& g, Cplx kappa) {
    require_valid_wavenumber(kappa);
    const Jets jets = curve_jets(g);
    const Eigen::VectorXd chord = chord_table(g.N);
    auto pair = [&](int i, int j) {
        PairData p;
        p.z = jets.x.col(i) - jets.x.col(j);
        p.rho = (i == j) ? 0.0 : p.z.norm();
        p.q = (i == j) ? jets.speed[i] : p.rho / chord[(i - j + g.N) % g.N];
        p.split = radial_split2(kappa, p.rho, p.q);
        return p;
    };
    auto M = assemble_split(
        g,
        [&](int i, int j) { return pair(i, j).split.aG * jets.speed[j]; },
        [&](int i, int j) { return pair(i, j).split.bG * jets.speed[j]; });
    return make_op(g, kappa, "V", std::move(M));
}

namespace {

// shared assembler for D (normal at the target point) and K' (normal at the
// source point), differing only in the flat factor g and its diagonal limit
Eigen::MatrixXcd assemble_doublelayer(const Grid2& g, Cplx kappa, bool normal_at_target) {
    const Jets jets = curve_jets(g);
    const Eigen::VectorXd chord = chord_table(g.N);
    const int N = g.N;
    const LogRule rule = log_rule(N);
    Eigen::MatrixXcd M(N, N);
    parallel_for(N, [&](int i) {
        for (int j = 0; j < N; ++j) {
            const int k = (i - j + N) % N;
            Cplx A, B;
            if (i == j) {
                const double curv = jets.n.col(i).dot(jets.x2.col(i)) /
                                    (2.0 * jets.speed[i] * jets.speed[i]);
                // n(theta).z expands to -curv, n(sigma).z to +curv
                const double glim = normal_at_target ? -curv : curv;
                A = 0.0;
                const double sign = normal_at_target ? -1.0 : 1.0;
                // K = sign * Phi * g; pole part of Phi is -1/(2 pi rho^2)
                B = sign * (-1.0 / (2.0 * kPi)) * glim * jets.speed[i];
            } else {
                const Eigen::Vector2d z = jets.x.col(i) - jets.x.col(j);
                const double rho = z.norm();
                const double q = rho / chord[k];
                const RadialSplit2 s = radial_split2(kappa, rho, q);
                const double gx = normal_at_target ? jets.n.col(i).dot(z) : jets.n.col(j).dot(z);
                const double sign = normal_at_target ? -1.0 : 1.0;
                A = sign * s.aPhi * gx * jets.speed[j];
                B = sign * (s.bPhi * gx - gx / (2.0 * kPi * rho * rho)) * jets.speed[j];
            }
            M(i, j) = rule.R[k] * A + rule.trapez * B;
        }
    });
    return M;
}

}  // namespace

OperatorMatrix assemble_D(const Grid2& g, Cplx kappa) {
    require_valid_wavenumber(kappa);
    return make_op(g, kappa, "D", assemble_doublelayer(g, kappa, /*normal_at_target=*/true));
}

OperatorMatrix assemble_Kprime(const Grid2& g, Cplx kappa) {
    require_valid_wavenumber(kappa);
    return make_op(g, kappa, "Kp", assemble_doublelayer(g, kappa, /*normal_at_target=*/false));
}

OperatorMatrix assemble_N(const Grid2& g, Cplx kappa) {
    require_valid_wavenumber(kappa);
    const Jets jets = curve_jets(g);
    const Eigen::VectorXd chord = chord_table(g.N);
    auto pair = [&](int i, int j) {
        PairData p;
        p.z = jets.x.col(i) - jets.x.col(j);
        p.rho = (i == j) ? 0.0 : p.z.norm();
        p.q = (i == j) ? jets.speed[i] : p.rho / chord[(i - j + g.N) % g.N];
        p.split = radial_split2(kappa, p.rho, p.q);
        return p;
    };
    // weighted single layer V_{(n.n')}
    auto Vnn = assemble_split(
        g,
        [&](int i, int j) {
            return pair(i, j).split.aG * jets.n.col(i).dot(jets.n.col(j)) * jets.speed[j];
        },
        [&](int i, int j) {
            return pair(i, j).split.bG * jets.n.col(i).dot(jets.n.col(j)) * jets.speed[j];
        });
    const Eigen::MatrixXcd V = assemble_V(g, kappa).M;
    const Eigen::MatrixXd Dtheta = trig_diff_matrix(g.N);
    const Eigen::MatrixXd Ds = jets.speed.cwiseInverse().asDiagonal() * Dtheta;
    Eigen::MatrixXcd M = kappa * kappa * Vnn + Ds * V * Ds;
    return make_op(g, kappa, "N", std::move(M));
}

OperatorMatrix assemble(const Grid2& g, Cplx kappa, OperatorKind which) {
    switch (which) {
        case OperatorKind::V: return assemble_V(g, kappa);
        case OperatorKind::D: return assemble_D(g, kappa);
        case OperatorKind::Kprime: return assemble_Kprime(g, kappa);
        case OperatorKind::N: return assemble_N(g, kappa);
    }
    throw ParameterError("unknown operator kind");
}

OperatorMatrix assemble_pulled_back(const Grid2& g, Cplx kappa, Field2Ptr r, OperatorKind which) {
    CurvePtr defo = deform(g.curve, std::move(r), g.N);
    const Grid2 gr = Grid2::make(defo, g.N);
    OperatorMatrix op = assemble(gr, kappa, which);
    op.shape = g.curve->name();
    op.deformation = defo->name();
    return op;
}

OperatorMatrix assemble_dV(const Grid2& g, Cplx kappa, const FieldOnCurve& xi) {
    require_valid_wavenumber(kappa);
    const Jets jets = curve_jets(g);
    const Eigen::VectorXd chord = chord_table(g.N);
    const int N = g.N;

    Eigen::Matrix2Xd xiv(2, N), xid(2, N);
    Eigen::VectorXd divxi(N);
    for (int i = 0; i < N; ++i) {
        xiv.col(i) = xi.value(g.theta[i]);
        xid.col(i) = xi.pd1(g.theta[i]);
        divxi[i] = xid.col(i).dot(jets.x1.col(i)) / (jets.speed[i] * jets.speed[i]);
    }

    const LogRule rule = log_rule(N);
    Eigen::MatrixXcd M(N, N);
    parallel_for(N, [&](int i) {
        for (int j = 0; j < N; ++j) {
            const int k = (i - j + N) % N;
            Cplx A, B;
            if (i == j) {
                const RadialSplit2 s = radial_split2(kappa, 0.0, jets.speed[i]);
                A = s.aG * divxi[i] * jets.speed[i];
                B = (-divxi[i] / (2.0 * kPi) + s.bG * divxi[i]) * jets.speed[i];
            } else {
                const Eigen::Vector2d z = jets.x.col(i) - jets.x.col(j);
                const double rho = z.norm();
                const RadialSplit2 s = radial_split2(kappa, rho, rho / chord[k]);
                const double zdelta = z.dot(xiv.col(i) - xiv.col(j));
                A = (s.aPhi * zdelta + s.aG * divxi[j]) * jets.speed[j];
                B = (s.bPhi * zdelta - zdelta / (2.0 * kPi * rho * rho) + s.bG * divxi[j]) *
                    jets.speed[j];
            }
            M(i, j) = rule.R[k] * A + rule.trapez * B;
        }
    });
    OperatorMatrix op = make_op(g, kappa, "dV", std::move(M));
    op.deformation = xi.name();
    return op;
}

OperatorMatrix assemble_dD_op(const Grid2& g, Cplx kappa, const FieldOnCurve& xi) {
    require_valid_wavenumber(kappa);
    const Jets jets = curve_jets(g);
    const Eigen::VectorXd chord = chord_table(g.N);
    const int N = g.N;

    Eigen::Matrix2Xd xiv(2, N), xid(2, N), xidd(2, N), dn(2, N);
    Eigen::VectorXd divxi(N);
    for (int i = 0; i < N; ++i) {
        const double t = g.theta[i];
        xiv.col(i) = xi.value(t);
        xid.col(i) = xi.pd1(t);
        xidd.col(i) = xi.pd2(t);
        divxi[i] = xid.col(i).dot(jets.x1.col(i)) / (jets.speed[i] * jets.speed[i]);
        // dN[0, xi] = -[grad_Gamma xi] n
        const Mat2 grad = (jets.x1.col(i) / (jets.speed[i] * jets.speed[i])) * xid.col(i).transpose();
        dn.col(i) = -grad * jets.n.col(i);
    }

    const LogRule rule = log_rule(N);
    Eigen::MatrixXcd M(N, N);
    parallel_for(N, [&](int i) {
        for (int j = 0; j < N; ++j) {
            const int k = (i - j + N) % N;
            Cplx A, B;
            if (i == j) {
                const double s2 = jets.speed[i] * jets.speed[i];
                const double ncurv = jets.n.col(i).dot(jets.x2.col(i));
                const double Lg2 = -ncurv / (2.0 * s2);
                const double Ldg2 =
                    -(dn.col(i).dot(jets.x2.col(i)) + jets.n.col(i).dot(xidd.col(i))) / (2.0 * s2);
                const double Ldzg4 = -(jets.x1.col(i).dot(xid.col(i))) * ncurv / (2.0 * s2 * s2);
                A = 0.0;
                B = -(Ldzg4 / kPi - (Ldg2 + Lg2 * divxi[i]) / (2.0 * kPi)) * jets.speed[i];
            } else {
                const Eigen::Vector2d z = jets.x.col(i) - jets.x.col(j);
                const double rho = z.norm();
                const double rho2 = rho * rho;
                const RadialSplit2 s = radial_split2(kappa, rho, rho / chord[k]);
                const double gx = jets.n.col(i).dot(z);
                const double zdelta = z.dot(xiv.col(i) - xiv.col(j));
                const double dg = dn.col(i).dot(z) + jets.n.col(i).dot(xiv.col(i) - xiv.col(j));
                const double dgd = dg + gx * divxi[j];
                A = -(s.aPsi * zdelta * gx + s.aPhi * dgd) * jets.speed[j];
                B = -(s.bPsi * zdelta * gx + zdelta * gx / (kPi * rho2 * rho2) +
                      kappa * kappa * zdelta * gx / (4.0 * kPi * rho2) + s.bPhi * dgd -
                      dgd / (2.0 * kPi * rho2)) *
                    jets.speed[j];
            }
            M(i, j) = rule.R[k] * A + rule.trapez * B;
        }
    });
    OperatorMatrix op = make_op(g, kappa, "dD", std::move(M));
    op.deformation = xi.name();
    return op;
}

Cplx matrix_fourier_multiplier(const OperatorMatrix& op, const Grid2& g, int n) {
    Eigen::VectorXcd u(g.N);
    for (int j = 0; j < g.N; ++j) u[j] = std::exp(kI * double(n) * g.theta[j]);
    const Eigen::VectorXcd v = op.M * u;
    return v[0] / u[0];
}

namespace {

struct Clearance {
    double min_distance = 1e300;
    bool exterior = true;
};

// nearest-node distance; the side flag comes from the normal at the node
// nearest to the first point (valid within the reach of the curve)
Clearance clearance_to_grid(const Eigen::MatrixXd& points, const Eigen::MatrixXd& nodes,
                            const Eigen::MatrixXd& normals) {
    Clearance c;
    int nearest_first = 0;
    double best_first = 1e300;
    for (int p = 0; p < points.cols(); ++p) {
        for (int j = 0; j < nodes.cols(); ++j) {
            const double d = (points.col(p) - nodes.col(j)).norm();
            c.min_distance = std::min(c.min_distance, d);
            if (p == 0 && d < best_first) {
                best_first = d;
                nearest_first = j;
            }
        }
    }
    if (points.cols() > 0) {
        c.exterior =
            normals.col(nearest_first).dot(points.col(0) - nodes.col(nearest_first)) > 0.0;
    }
    return c;
}

}  // namespace

PotentialSample eval_potential(const Grid2& g, Cplx kappa, const Eigen::VectorXcd& u,
                               const Eigen::Matrix2Xd& points, LayerKind kind) {
    require_valid_wavenumber(kappa);
    PotentialSample out;
    out.points = points;
    const Clearance c = clearance_to_grid(points, g.node, g.normal);
    out.min_distance = c.min_distance;
    out.exterior = c.exterior;
    if (out.min_distance < kPotentialClearance) {
        throw TooCloseToBoundary("potential point within the smooth-quadrature clearance");
    }
    out.values.resize(points.cols());
    for (int p = 0; p < points.cols(); ++p) {
        Cplx acc{0.0, 0.0};
        for (int j = 0; j < g.N; ++j) {
            const Eigen::Vector2d z = points.col(p) - g.node.col(j);
            if (kind == LayerKind::Single) {
                acc += helmholtz_Ga2(kappa, z) * u[j] * g.weight[j];
            } else {
                const Radial r = radial2(kappa, z.norm());
                acc += r.Phi * g.normal.col(j).dot(z) * u[j] * g.weight[j];
            }
        }
        out.values[p] = acc;
    }
    return out;
}

PotentialSample eval_potential3(const Grid3& g, Cplx kappa, const Eigen::VectorXcd& u,
                                const Eigen::Matrix3Xd& points, LayerKind kind) {
    require_valid_wavenumber(kappa);
    PotentialSample out;
    out.points = points;
    const Clearance c = clearance_to_grid(points, g.node, g.normal);
    out.min_distance = c.min_distance;
    out.exterior = c.exterior;
    if (out.min_distance < kPotentialClearance) {
        throw TooCloseToBoundary("potential point within the smooth-quadrature clearance");
    }
    out.values.resize(points.cols());
    for (int p = 0; p < points.cols(); ++p) {
        Cplx acc{0.0, 0.0};
        for (int j = 0; j < g.size(); ++j) {
            const Eigen::Vector3d z = points.col(p) - g.node.col(j);
            if (kind == LayerKind::Single) {
                acc += helmholtz_Ga3(kappa, z) * u[j] * g.weight[j];
            } else {
                const Radial r = radial3(kappa, z.norm());
                acc += r.Phi * g.normal.col(j).dot(z) * u[j] * g.weight[j];
            }
        }
        out.values[p] = acc;
    }
    return out;
}

PotentialSample eval_potential_pulled_back(const Grid2& g, Cplx kappa, const Eigen::VectorXcd& u,
                                           const Eigen::Matrix2Xd& points, const FieldOnCurve& r) {
    require_valid_wavenumber(kappa);
    PotentialSample out;
    out.points = points;
    out.values.resize(points.cols());
    out.min_distance = 1e300;
    // surface jacobian of the deformation, J_r = |x' + r'| / |x'|
    Eigen::VectorXd jr(g.N);
    Eigen::Matrix2Xd ynode(2, g.N);
    for (int j = 0; j < g.N; ++j) {
        const double t = g.theta[j];
        jr[j] = (g.curve->d1(t) + r.pd1(t)).norm() / g.speed[j];
        ynode.col(j) = g.node.col(j) + r.value(t);
    }
    {
        Eigen::Matrix2Xd ynormal(2, g.N);
        for (int j = 0; j < g.N; ++j) {
            ynormal.col(j) = rot90cw(g.curve->d1(g.theta[j]) + r.pd1(g.theta[j])).normalized();
        }
        const Clearance c = clearance_to_grid(points, ynode, ynormal);
        out.min_distance = c.min_distance;
        out.exterior = c.exterior;
    }
    if (out.min_distance < kPotentialClearance) {
        throw TooCloseToBoundary("potential point within the smooth-quadrature clearance");
    }
    for (int p = 0; p < points.cols(); ++p) {
        Cplx acc{0.0, 0.0};
        for (int j = 0; j < g.N; ++j) {
            const Eigen::Vector2d z = points.col(p) - ynode.col(j);
            acc += helmholtz_Ga2(kappa, z) * u[j] * jr[j] * g.weight[j];
        }
        out.values[p] = acc;
    }
    return out;
}

PotentialSample eval_dpotential(const Grid2& g, Cplx kappa, const Eigen::VectorXcd& u,
                                const Eigen::Matrix2Xd& points, const FieldOnCurve& xi) {
    require_valid_wavenumber(kappa);
    PotentialSample out;
    out.points = points;
    const Clearance c = clearance_to_grid(points, g.node, g.normal);
    out.min_distance = c.min_distance;
    out.exterior = c.exterior;
    if (out.min_distance < kPotentialClearance) {
        throw TooCloseToBoundary("potential point within the smooth-quadrature clearance");
    }
    out.values.resize(points.cols());
    for (int p = 0; p < points.cols(); ++p) {
        Cplx acc{0.0, 0.0};
        for (int j = 0; j < g.N; ++j) {
            const double t = g.theta[j];
            const double divxi =
                xi.pd1(t).dot(g.curve->d1(t)) / (g.speed[j] * g.speed[j]);
            acc += potential_derivative_kernel2(kappa, points.col(p), g.node.col(j), xi.value(t),
                                                divxi) *
                   u[j] * g.weight[j];
        }
        out.values[p] = acc;
    }
    return out;
}

void write_matrix_csv(const OperatorMatrix& op, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw EvaluationFailed("cannot open " + path);
    f << "row,col,re,im\n";
    char buf[96];
    for (int i = 0; i < op.M.rows(); ++i) {
        for (int j = 0; j < op.M.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g\n", i, j, op.M(i, j).real(),
                          op.M(i, j).imag());
            f << buf;
        }
    }
}

void write_matrix_binary(const OperatorMatrix& op, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw EvaluationFailed("cannot open " + path);
    for (int i = 0; i < op.M.rows(); ++i) {
        for (int j = 0; j < op.M.cols(); ++j) {
            const double quad[4] = {double(i), double(j), op.M(i, j).real(), op.M(i, j).imag()};
            f.write(reinterpret_cast<const char*>(quad), sizeof quad);
        }
    }
}

void write_matrix_sidecar(const OperatorMatrix& op, const std::string& path) {
    nlohmann::json j;
    j["shape"] = op.shape;
    j["N"] = op.N;
    j["kappa_re"] = op.kappa.real();
    j["kappa_im"] = op.kappa.imag();
    j["deformation"] = op.deformation;
    std::ofstream f(path);
    if (!f) throw EvaluationFailed("cannot open " + path);
    f << j.dump(2) << "\n";
}

Eigen::MatrixXcd read_matrix_binary(const std::string& path, int N) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw EvaluationFailed("cannot open " + path);
    Eigen::MatrixXcd M(N, N);
    double quad[4];
    while (f.read(reinterpret_cast<char*>(quad), sizeof quad)) {
        M(int(quad[0]), int(quad[1])) = Cplx(quad[2], quad[3]);
    }
    return M;
}

}  // namespace shapebie

// Copyright (c) 2026 the shapebie authors
// SPDX-License-Identifier: Apache-2.0
#include "shapebie/registry.hpp"

#include <cstdlib>

#include "shapebie/errors.hpp"

namespace shapebie {

namespace {

struct ParsedId {
    std::string head;
    std::vector<std::string> args;
};

ParsedId split_id(const std::string& id) {
    ParsedId out;
    const auto open = id.find('(');
    if (open == std::string::npos) {
        out.head = id;
        return out;
    }
    if (id.back() != ')') throw ConfigError("malformed identifier: " + id);
    out.head = id.substr(0, open);
    std::string args = id.substr(open + 1, id.size() - open - 2);
    std::size_t start = 0;
    while (start <= args.size()) {
        const auto comma = args.find(',', start);
        if (comma == std::string::npos) {
            if (!args.empty()) out.args.push_back(args.substr(start));
            break;
        }
        out.args.push_back(args.substr(start, comma - start));
        start = comma + 1;
    }
    return out;
}

double parse_double(const std::string& s, const std::string& context) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') throw ConfigError("bad number '" + s + "' in " + context);
    return v;
}

int parse_int(const std::string& s, const std::string& context) {
    const double v = parse_double(s, context);
    const int i = static_cast<int>(v);
    if (v != i) throw ConfigError("expected integer '" + s + "' in " + context);
    return i;
}

void expect_args(const ParsedId& p, std::size_t n) {
    if (p.args.size() != n) {
        throw ConfigError("identifier '" + p.head + "' expects " + std::to_string(n) + " argument(s)");
    }
}

}  // namespace

std::complex<double> parse_complex(const std::string& text) {
    // forms: "1", "-2.5", "2+0.5i", "1-0.25i", "0.5i"
    std::string s = text;
    if (s.empty()) throw ConfigError("empty complex literal");
    if (s.back() == 'i') {
        s.pop_back();
        // split the imaginary tail from an optional real head
        for (std::size_t pos = s.size(); pos-- > 1;) {
            if ((s[pos] == '+' || s[pos] == '-') && s[pos - 1] != 'e' && s[pos - 1] != 'E') {
                const double re = parse_double(s.substr(0, pos), "complex literal");
                std::string imtxt = s.substr(pos);
                if (imtxt == "+") imtxt = "1";
                if (imtxt == "-") imtxt = "-1";
                return {re, parse_double(imtxt, "complex literal")};
            }
        }
        if (s.empty() || s == "+") return {0.0, 1.0};
        if (s == "-") return {0.0, -1.0};
        return {0.0, parse_double(s, "complex literal")};
    }
    return {parse_double(s, "complex literal"), 0.0};
}

bool shape_is_3d(const std::string& id) {
    const auto head = split_id(id).head;
    return head == "sphere" || head == "ellipsoid";
}

CurvePtr parse_shape2(const std::string& id) {
    const ParsedId p = split_id(id);
    if (p.head == "circle") {
        expect_args(p, 0);
        return make_circle();
    }
    if (p.head == "ellipse") {
        expect_args(p, 2);
        return make_ellipse(parse_double(p.args[0], id), parse_double(p.args[1], id));
    }
    if (p.head == "kite") {
        expect_args(p, 0);
        return make_kite();
    }
    throw ConfigError("unknown 2d shape id: " + id);
}

SurfPtr parse_shape3(const std::string& id) {
    const ParsedId p = split_id(id);
    if (p.head == "sphere") {
        expect_args(p, 0);
        return make_sphere();
    }
    if (p.head == "ellipsoid") {
        expect_args(p, 3);
        return make_ellipsoid(parse_double(p.args[0], id), parse_double(p.args[1], id),
                              parse_double(p.args[2], id));
    }
    throw ConfigError("unknown 3d shape id: " + id);
}

Field2Ptr parse_field2(const std::string& id, CurvePtr curve) {
    const ParsedId p = split_id(id);
    if (p.head == "normal") {
        expect_args(p, 0);
        return make_normal_field2(std::move(curve));
    }
    if (p.head == "constant") {
        if (p.args.size() == 0) return make_constant_field2(Vec2(1.0, 0.5));
        expect_args(p, 2);
        return make_constant_field2(Vec2(parse_double(p.args[0], id), parse_double(p.args[1], id)));
    }
    if (p.head == "fourier2d") {
        expect_args(p, 3);
        return make_fourier_field2(parse_int(p.args[0], id), parse_double(p.args[1], id),
                                   parse_double(p.args[2], id));
    }
    if (p.head == "shear") {
        expect_args(p, 1);
        return make_shear_field2(std::move(curve), parse_int(p.args[0], id));
    }
    throw ConfigError("unknown 2d field id: " + id);
}

Field3Ptr parse_field3(const std::string& id, SurfPtr surf) {
    const ParsedId p = split_id(id);
    if (p.head == "normal") {
        expect_args(p, 0);
        return make_normal_field3(std::move(surf));
    }
    if (p.head == "constant") {
        if (p.args.size() == 0) return make_constant_field3(Vec3(1.0, 0.5, -0.25));
        expect_args(p, 3);
        return make_constant_field3(Vec3(parse_double(p.args[0], id), parse_double(p.args[1], id),
                                         parse_double(p.args[2], id)));
    }
    if (p.head == "poly3d") {
        expect_args(p, 1);
        return make_poly_field3(std::move(surf), parse_int(p.args[0], id));
    }
    if (p.head == "shear") {
        expect_args(p, 1);
        return make_shear_field3(std::move(surf), parse_int(p.args[0], id));
    }
    throw ConfigError("unknown 3d field id: " + id);
}

KernelId parse_kernel(const std::string& id) {
    const ParsedId p = split_id(id);
    KernelId k;
    if (p.head == "helmholtz2d" || p.head == "helmholtz3d") {
        expect_args(p, 1);
        k.type = p.head == "helmholtz2d" ? KernelId::Type::Helmholtz2d : KernelId::Type::Helmholtz3d;
        k.kappa = parse_complex(p.args[0]);
        return k;
    }
    if (p.head == "elastic3d") {
        expect_args(p, 4);
        k.type = KernelId::Type::Elastic3d;
        k.omega = parse_double(p.args[0], id);
        k.rho = parse_double(p.args[1], id);
        k.mu = parse_double(p.args[2], id);
        k.lambda = parse_double(p.args[3], id);
        return k;
    }
    throw ConfigError("unknown kernel id: " + id);
}

ScalarJet2 parse_scalar_jet2(const std::string& id) {
    const ParsedId p = split_id(id);
    if (p.head == "coord") {
        expect_args(p, 1);
        const int i = parse_int(p.args[0], id);
        if (i < 0 || i > 1) throw ConfigError("coord index out of range for d=2");
        return {id, [i](const Vec2& x) { return x[i]; },
                [i](const Vec2&) { Vec2 e = Vec2::Zero(); e[i] = 1.0; return e; }};
    }
    if (p.head == "poly") {
        expect_args(p, 1);
        const int k = parse_int(p.args[0], id);
        if (k == 1) {
            return {id, [](const Vec2& x) { return x[0] * x[1]; },
                    [](const Vec2& x) { return Vec2(x[1], x[0]); }};
        }
        if (k == 2) {
            return {id, [](const Vec2& x) { return x[0] * x[0] - x[1] * x[1]; },
                    [](const Vec2& x) { return Vec2(2.0 * x[0], -2.0 * x[1]); }};
        }
        throw ConfigError("poly index out of range for d=2");
    }
    throw ConfigError("unknown scalar jet id: " + id);
}

ScalarJet3 parse_scalar_jet3(const std::string& id) {
    const ParsedId p = split_id(id);
    if (p.head == "coord") {
        expect_args(p, 1);
        const int i = parse_int(p.args[0], id);
        if (i < 0 || i > 2) throw ConfigError("coord index out of range for d=3");
        return {id, [i](const Vec3& x) { return x[i]; },
                [i](const Vec3&) { Vec3 e = Vec3::Zero(); e[i] = 1.0; return e; }};
    }
    if (p.head == "poly") {
        expect_args(p, 1);
        const int k = parse_int(p.args[0], id);
        if (k == 1) {
            return {id, [](const Vec3& x) { return x[0] * x[1]; },
                    [](const Vec3& x) { return Vec3(x[1], x[0], 0.0); }};
        }
        if (k == 2) {
            return {id, [](const Vec3& x) { return x[1] * x[2]; },
                    [](const Vec3& x) { return Vec3(0.0, x[2], x[1]); }};
        }
        throw ConfigError("poly index out of range for d=3");
    }
    throw ConfigError("unknown scalar jet id: " + id);
}

VectorJet2 parse_vector_jet2(const std::string& id) {
    const ParsedId p = split_id(id);
    if (p.head == "normal-ext") {
        // x/|x|, the exact extension of the circle normal
        return {id,
                [](const Vec2& x) { return Vec2(x / x.norm()); },
                [](const Vec2& x) {
                    const double r = x.norm();
                    const Vec2 n = x / r;
                    // grad_cols(i,j) = d_i (x_j/|x|)
                    return Mat2((Mat2::Identity() - n * n.transpose()) / r);
                }};
    }
    if (p.head == "coordv") {
        expect_args(p, 1);
        const int i = parse_int(p.args[0], id);
        if (i < 0 || i > 1) throw ConfigError("coordv index out of range for d=2");
        return {id,
                [i](const Vec2& x) { Vec2 v = Vec2::Zero(); v[i] = x[1 - i]; return v; },
                [i](const Vec2&) { Mat2 gc = Mat2::Zero(); gc(1 - i, i) = 1.0; return gc; }};
    }
    throw ConfigError("unknown vector jet id: " + id);
}

VectorJet3 parse_vector_jet3(const std::string& id) {
    const ParsedId p = split_id(id);
    if (p.head == "normal-ext") {
        return {id,
                [](const Vec3& x) { return Vec3(x / x.norm()); },
                [](const Vec3& x) {
                    const double r = x.norm();
                    const Vec3 n = x / r;
                    return Mat3((Mat3::Identity() - n * n.transpose()) / r);
                }};
    }
    if (p.head == "vpoly") {
        expect_args(p, 1);
        const int k = parse_int(p.args[0], id);
        if (k == 1) {
            return {id,
                    [](const Vec3& x) { return Vec3(x[1] * x[2], x[0] * x[2], x[0] * x[1]); },
                    [](const Vec3& x) {
                        Mat3 gc;
                        // gc(i,j) = d_i v_j
                        gc << 0, x[2], x[1], x[2], 0, x[0], x[1], x[0], 0;
                        return gc;
                    }};
        }
        if (k == 2) {
            return {id,
                    [](const Vec3& x) { return Vec3(x[0] * x[0], x[1] * x[1], x[2] * x[2]); },
                    [](const Vec3& x) {
                        Mat3 gc = Mat3::Zero();
                        gc.diagonal() = 2.0 * x;
                        return gc;
                    }};
        }
        throw ConfigError("vpoly index out of range");
    }
    throw ConfigError("unknown vector jet id: " + id);
}

}  // namespace shapebie

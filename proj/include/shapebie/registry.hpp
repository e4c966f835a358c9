// Copyright (c) 2026 the shapebie authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <string>
#include <vector>

#include "shapebie/geometry2d.hpp"
#include "shapebie/geometry3d.hpp"
#include "shapebie/surface_calculus.hpp"

namespace shapebie {

// String identifiers used in CLI configs. Unknown ids raise ConfigError.
//   shapes:  circle | ellipse(a,b) | kite | sphere | ellipsoid(a,b,c)
//   fields:  normal | constant(vx,vy[,vz]) | fourier2d(k,a,b) | shear(axis) | poly3d(k)
//   kernels: helmholtz2d(kappa) | helmholtz3d(kappa) | elastic3d(omega,rho,mu,lambda)
// kappa accepts "1", "2.5", or "2+0.5i".

bool shape_is_3d(const std::string& id);
CurvePtr parse_shape2(const std::string& id);
SurfPtr parse_shape3(const std::string& id);
Field2Ptr parse_field2(const std::string& id, CurvePtr curve);
Field3Ptr parse_field3(const std::string& id, SurfPtr surf);

struct KernelId {
    enum class Type { Helmholtz2d, Helmholtz3d, Elastic3d } type;
    std::complex<double> kappa{0.0, 0.0};
    double omega = 0.0, rho = 0.0, mu = 0.0, lambda = 0.0;
};
KernelId parse_kernel(const std::string& id);

std::complex<double> parse_complex(const std::string& text);

// jet-field registry for the surface-calculus suites:
//   coord(i) | poly(k) | normal-ext  (scalars and vectors per dimension)
ScalarJet2 parse_scalar_jet2(const std::string& id);
ScalarJet3 parse_scalar_jet3(const std::string& id);
VectorJet2 parse_vector_jet2(const std::string& id);
VectorJet3 parse_vector_jet3(const std::string& id);

}  // namespace shapebie

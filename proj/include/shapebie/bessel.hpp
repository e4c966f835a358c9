// Copyright (c) 2026 the shapebie authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>

namespace shapebie::bessel {

using Cplx = std::complex<double>;

inline constexpr double kEulerGamma = 0.57721566490153286060651209;

// Cylinder functions of complex argument, arg(z) in (-pi, pi].
// Ascending series for |z| <= 8, Hankel asymptotic expansion beyond.
Cplx j0(Cplx z);
Cplx j1(Cplx z);
Cplx y0(Cplx z);
Cplx y1(Cplx z);
Cplx jn(int n, Cplx z);
Cplx yn(int n, Cplx z);

// Hankel functions of the first kind.
Cplx h0_1(Cplx z);
Cplx h1_1(Cplx z);

// Entire pieces of the small-argument structure, needed to separate the
// logarithmic singularity of kernels built on H_0^(1) and H_1^(1):
//
//   Y0(w) = (2/pi)(ln(w/2)+gamma) J0(w) + y0_reg(w)
//   Y1(w) = (2/pi)(ln(w/2)+gamma) J1(w) - 2/(pi w) + w * r1n(w)
//
// and the regularized quotients
//
//   j1_over(w) = J1(w)/w
//   j0t(w)  = (J0(w) - 1)/w^2
//   j1t(w)  = (J1(w)/w - 1/2)/w^2
//   y0t(w)  = y0_reg(w)/w^2
//   r1t(w)  = (r1n(w) + 1/(2 pi))/w^2
//
// All are evaluated by their power series; intended for |w| up to ~12
// (the operator assembly range), where they hold ~1e-13 accuracy.
Cplx y0_reg(Cplx w);
Cplx j1_over(Cplx w);
Cplx r1n(Cplx w);
Cplx j0t(Cplx w);
Cplx j1t(Cplx w);
Cplx y0t(Cplx w);
Cplx r1t(Cplx w);

}  // namespace shapebie::bessel

// Copyright (c) 2026 the shapebie authors
// SPDX-License-Identifier: Apache-2.0
#include "shapebie/bessel.hpp"

#include <cmath>
#include <vector>

#include "shapebie/errors.hpp"

namespace shapebie::bessel {

namespace {

constexpr double kPi = 3.14159265358979323846264338;
constexpr double kSeriesAsymptoticCrossover = 8.0;
constexpr int kMaxSeriesTerms = 64;

double harmonic(int k) {
    static const std::vector<double> table = [] {
        std::vector<double> h(kMaxSeriesTerms + 2, 0.0);
        for (int i = 1; i < static_cast<int>(h.size()); ++i) h[i] = h[i - 1] + 1.0 / i;
        return h;
    }();
    return table[k];
}

Cplx series_j0(Cplx z) {
    // sum (-1)^k (z^2/4)^k / (k!)^2
    const Cplx q = -z * z * 0.25;
    Cplx term{1.0, 0.0}, sum{1.0, 0.0};
    for (int k = 1; k < kMaxSeriesTerms; ++k) {
        term *= q / double(k * k);
        sum += term;
        if (std::abs(term) < 1e-18 * (1.0 + std::abs(sum))) break;
    }
    return sum;
}

Cplx series_j1_over(Cplx z) {
    // J1(z)/z = (1/2) sum (-1)^k (z^2/4)^k / (k! (k+1)!)
    const Cplx q = -z * z * 0.25;
    Cplx term{0.5, 0.0}, sum{0.5, 0.0};
    for (int k = 1; k < kMaxSeriesTerms; ++k) {
        term *= q / double(k * (k + 1));
        sum += term;
        if (std::abs(term) < 1e-18 * (1.0 + std::abs(sum))) break;
    }
    return sum;
}

Cplx series_y0_reg(Cplx z) {
    // (2/pi) sum_{k>=1} (-1)^{k+1} H_k (z^2/4)^k / (k!)^2
    const Cplx q = -z * z * 0.25;
    Cplx base{1.0, 0.0}, sum{0.0, 0.0};
    for (int k = 1; k < kMaxSeriesTerms; ++k) {
        base *= q / double(k * k);
        const Cplx contrib = -base * harmonic(k);  // (-1)^{k+1} (z^2/4)^k = -(q)^k
        sum += contrib;
        if (std::abs(contrib) < 1e-18 * (1.0 + std::abs(sum)) && k > 2) break;
    }
    return (2.0 / kPi) * sum;
}

Cplx series_r1n(Cplx z) {
    // -(1/(2 pi)) sum_{k>=0} (-1)^k (H_k + H_{k+1}) (z^2/4)^k / (k! (k+1)!)
    const Cplx q = -z * z * 0.25;
    Cplx base{1.0, 0.0}, sum{harmonic(0) + harmonic(1), 0.0};
    for (int k = 1; k < kMaxSeriesTerms; ++k) {
        base *= q / double(k * (k + 1));
        const Cplx contrib = base * (harmonic(k) + harmonic(k + 1));
        sum += contrib;
        if (std::abs(contrib) < 1e-18 * (1.0 + std::abs(sum))) break;
    }
    return -sum / (2.0 * kPi);
}

// Asymptotic Hankel sum: H_nu^{(1,2)}(z) = sqrt(2/(pi z)) e^{+-i omega} S(+-i/z)
// with omega = z - nu pi/2 - pi/4 and S(t) = sum a_k(nu) t^k, truncated at the
// smallest term.
Cplx hankel_asymptotic(int nu, Cplx z, int sign) {
    const Cplx iz = Cplx(0.0, sign) / z;
    Cplx ak{1.0, 0.0}, t{1.0, 0.0}, sum{1.0, 0.0};
    double last = 1.0;
    for (int k = 1; k <= 25; ++k) {
        ak *= (4.0 * nu * nu - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (8.0 * k);
        t *= iz;
        const Cplx contrib = ak * t;
        const double mag = std::abs(contrib);
        if (mag > last) break;  // divergent tail reached
        sum += contrib;
        last = mag;
        if (mag < 1e-18) break;
    }
    const Cplx omega = z - Cplx(nu * kPi / 2.0 + kPi / 4.0, 0.0);
    const Cplx phase = std::exp(Cplx(0.0, sign) * omega);
    return std::sqrt(2.0 / (kPi * z)) * phase * sum;
}

void check_arg(Cplx z) {
    if (z == Cplx(0.0, 0.0)) throw SingularArgument("cylinder function at z = 0");
}

}  // namespace

Cplx j0(Cplx z) {
    check_arg(z);
    if (std::abs(z) <= kSeriesAsymptoticCrossover) return series_j0(z);
    return 0.5 * (hankel_asymptotic(0, z, +1) + hankel_asymptotic(0, z, -1));
}

Cplx j1(Cplx z) {
    check_arg(z);
    if (std::abs(z) <= kSeriesAsymptoticCrossover) return z * series_j1_over(z);
    return 0.5 * (hankel_asymptotic(1, z, +1) + hankel_asymptotic(1, z, -1));
}

Cplx y0(Cplx z) {
    check_arg(z);
    if (std::abs(z) <= kSeriesAsymptoticCrossover) {
        return (2.0 / kPi) * (std::log(0.5 * z) + kEulerGamma) * series_j0(z) + series_y0_reg(z);
    }
    return (hankel_asymptotic(0, z, +1) - hankel_asymptotic(0, z, -1)) / Cplx(0.0, 2.0);
}

Cplx y1(Cplx z) {
    check_arg(z);
    if (std::abs(z) <= kSeriesAsymptoticCrossover) {
        return (2.0 / kPi) * (std::log(0.5 * z) + kEulerGamma) * (z * series_j1_over(z)) -
               2.0 / (kPi * z) + z * series_r1n(z);
    }
    return (hankel_asymptotic(1, z, +1) - hankel_asymptotic(1, z, -1)) / Cplx(0.0, 2.0);
}

Cplx jn(int n, Cplx z) {
    check_arg(z);
    if (n < 0) {
        const Cplx v = jn(-n, z);
        return (-n) % 2 ? -v : v;
    }
    if (n == 0) return j0(z);
    if (n == 1) return j1(z);
    // Miller downward recurrence, normalized by J0 + 2 sum J_{2k} = 1.
    const double az = std::abs(z);
    const int start = std::max(n, static_cast<int>(az)) + 26;
    Cplx fp{0.0, 0.0}, f{1e-30, 0.0};
    Cplx norm{0.0, 0.0}, result{0.0, 0.0};
    for (int k = start; k >= 0; --k) {
        const Cplx fm = (2.0 * (k + 1)) / z * f - fp;
        fp = f;
        f = fm;
        if (k == n) result = f;
        if (k > 0 && k % 2 == 0) norm += 2.0 * f;
    }
    norm += f;
    return result / norm;
}

Cplx yn(int n, Cplx z) {
    check_arg(z);
    if (n < 0) {
        const Cplx v = yn(-n, z);
        return (-n) % 2 ? -v : v;
    }
    if (n == 0) return y0(z);
    if (n == 1) return y1(z);
    Cplx ym = y0(z), yk = y1(z);
    for (int k = 1; k < n; ++k) {
        const Cplx yp = (2.0 * k) / z * yk - ym;
        ym = yk;
        yk = yp;
    }
    return yk;
}

Cplx h0_1(Cplx z) { return j0(z) + Cplx(0.0, 1.0) * y0(z); }
Cplx h1_1(Cplx z) { return j1(z) + Cplx(0.0, 1.0) * y1(z); }

Cplx y0_reg(Cplx w) {
    return series_y0_reg(w);
}

Cplx j1_over(Cplx w) { return series_j1_over(w); }

Cplx r1n(Cplx w) { return series_r1n(w); }

// The four regularized quotients below are written as shifted power series in
// q = -w^2/4, so they stay finite at w = 0 (diagonal of operator assembly).

Cplx j0t(Cplx w) {
    // t_0 = -1/4, t_m = t_{m-1} q / (m+1)^2
    const Cplx q = -w * w * 0.25;
    Cplx term{-0.25, 0.0}, sum{-0.25, 0.0};
    for (int m = 1; m < kMaxSeriesTerms; ++m) {
        term *= q / double((m + 1) * (m + 1));
        sum += term;
        if (std::abs(term) < 1e-18 * (1.0 + std::abs(sum))) break;
    }
    return sum;
}

Cplx j1t(Cplx w) {
    // t_0 = -1/16, t_m = t_{m-1} q / ((m+1)(m+2))
    const Cplx q = -w * w * 0.25;
    Cplx term{-1.0 / 16.0, 0.0}, sum{-1.0 / 16.0, 0.0};
    for (int m = 1; m < kMaxSeriesTerms; ++m) {
        term *= q / double((m + 1) * (m + 2));
        sum += term;
        if (std::abs(term) < 1e-18 * (1.0 + std::abs(sum))) break;
    }
    return sum;
}

Cplx y0t(Cplx w) {
    // p_0 = 1/(2 pi), p_m = p_{m-1} q / (m+1)^2, t_m = p_m H_{m+1}
    const Cplx q = -w * w * 0.25;
    Cplx p{1.0 / (2.0 * kPi), 0.0};
    Cplx sum = p * harmonic(1);
    for (int m = 1; m < kMaxSeriesTerms; ++m) {
        p *= q / double((m + 1) * (m + 1));
        const Cplx contrib = p * harmonic(m + 1);
        sum += contrib;
        if (std::abs(contrib) < 1e-18 * (1.0 + std::abs(sum))) break;
    }
    return sum;
}

Cplx r1t(Cplx w) {
    // p_0 = 1/(16 pi), p_m = p_{m-1} q / ((m+1)(m+2)), t_m = p_m (H_{m+1}+H_{m+2})
    const Cplx q = -w * w * 0.25;
    Cplx p{1.0 / (16.0 * kPi), 0.0};
    Cplx sum = p * (harmonic(1) + harmonic(2));
    for (int m = 1; m < kMaxSeriesTerms; ++m) {
        p *= q / double((m + 1) * (m + 2));
        const Cplx contrib = p * (harmonic(m + 1) + harmonic(m + 2));
        sum += contrib;
        if (std::abs(contrib) < 1e-18 * (1.0 + std::abs(sum))) break;
    }
    return sum;
}

}  // namespace shapebie::bessel

#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <utility>

#include "charges.hpp"
#include "errors.hpp"

namespace twocenters {

// Elliptic coordinates: q1 + i q2 = cosh(xi + i eta), foci at (+-1, 0).
// Separated coordinates: x = cosh(xi), y = cos(eta).

struct Point {
    double q1 = 0.0;
    double q2 = 0.0;
};

struct EllipticPoint {
    double xi = 0.0;
    double eta = 0.0;
};

struct CartesianState {
    double q1 = 0.0;
    double q2 = 0.0;
    double p1 = 0.0;
    double p2 = 0.0;
};

/// Half-plane of the configuration space: sign of q2 (q2 = 0 counts as upper).
enum class Sheet { upper, lower };

/**
 * Phase-space point in elliptic coordinates.
 *
 * On the extended strip xi may be negative. The points (xi, eta) and
 * (-xi, -eta) are the two preimages of one Cartesian point, see involution().
 */
struct EllipticState {
    double xi = 0.0;
    double eta = 0.0;
    double p_xi = 0.0;
    double p_eta = 0.0;

    Sheet sheet() const noexcept
    {
        return std::sinh(xi) * std::sin(eta) < 0.0 ? Sheet::lower : Sheet::upper;
    }
};

struct SeparatedState {
    double x = 1.0;
    double y = 0.0;
    double p_x = 0.0;
    double p_y = 0.0;
    Sheet sheet = Sheet::upper;
};

inline Point elliptic_to_cartesian(double xi, double eta) noexcept
{
    return {std::cosh(xi) * std::cos(eta), std::sinh(xi) * std::sin(eta)};
}

/// Distances (r1, r2) to the centers at (+1, 0) and (-1, 0), free of cancellation.
inline std::pair<double, double> focus_distances(double xi, double eta) noexcept
{
    const double sh = std::sinh(0.5 * xi);
    const double sn = std::sin(0.5 * eta);
    const double cs = std::cos(0.5 * eta);
    return {2.0 * (sh * sh + sn * sn), 2.0 * (sh * sh + cs * cs)};
}

inline std::pair<double, double> center_distances(double q1, double q2) noexcept
{
    return {std::hypot(q1 - 1.0, q2), std::hypot(q1 + 1.0, q2)};
}

inline void check_not_at_focus(double q1, double q2, double guard = kChartEpsilon)
{
    const auto [r1, r2] = center_distances(q1, q2);
    if (r1 < guard || r2 < guard) {
        throw FocusCollision("position (" + std::to_string(q1) + ", " + std::to_string(q2) +
                             ") is within " + std::to_string(guard) + " of a center");
    }
}

/**
 * Inverse elliptic chart with xi >= 0 and eta in (-pi, pi].
 *
 * Axis points are accepted: the outer axis maps to eta = 0 or eta = +pi,
 * the segment between the centers to xi = 0.
 */
inline EllipticPoint cartesian_to_elliptic(double q1, double q2)
{
    check_not_at_focus(q1, q2);
    // acosh on the principal branch is accurate near the cut, unlike
    // arccosh((r1 + r2) / 2) which loses half the digits next to the segment.
    const std::complex<double> w = std::acosh(std::complex<double>(q1, q2 == 0.0 ? 0.0 : q2));
    double xi = w.real();
    double eta = w.imag();
    if (xi < 0.0) {
        xi = -xi;
        eta = -eta;
    }
    if (eta == -kPi) eta = kPi;
    return {xi, eta};
}

/// Jacobian determinant of the elliptic chart.
inline double jacobian_F(double xi, double eta) noexcept
{
    const double sh = std::sinh(xi);
    const double sn = std::sin(eta);
    return sh * sh + sn * sn;
}

struct EllipticMomenta {
    double p_xi = 0.0;
    double p_eta = 0.0;
};

struct CartesianMomenta {
    double p1 = 0.0;
    double p2 = 0.0;
};

/// (p_xi, p_eta) = DG^T (p1, p2). Refused where the lift cannot be inverted.
inline EllipticMomenta lift_momenta_to_elliptic(double xi, double eta, double p1, double p2)
{
    if (jacobian_F(xi, eta) < kChartEpsilon) {
        throw DegenerateChart("momentum lift is singular at a center");
    }
    const double a = std::sinh(xi) * std::cos(eta);
    const double b = std::cosh(xi) * std::sin(eta);
    return {a * p1 + b * p2, -b * p1 + a * p2};
}

/// (p1, p2) = DG^{-T} (p_xi, p_eta) = DG (p_xi, p_eta) / F.
inline CartesianMomenta lower_momenta_to_cartesian(double xi, double eta, double p_xi, double p_eta)
{
    const double f = jacobian_F(xi, eta);
    if (f < kChartEpsilon) {
        throw DegenerateChart("momentum lift is singular at a center");
    }
    const double a = std::sinh(xi) * std::cos(eta);
    const double b = std::cosh(xi) * std::sin(eta);
    return {(a * p_xi - b * p_eta) / f, (b * p_xi + a * p_eta) / f};
}

inline EllipticState to_elliptic(const CartesianState& s)
{
    const auto [xi, eta] = cartesian_to_elliptic(s.q1, s.q2);
    const auto [p_xi, p_eta] = lift_momenta_to_elliptic(xi, eta, s.p1, s.p2);
    return {xi, eta, p_xi, p_eta};
}

inline CartesianState to_cartesian(const EllipticState& s)
{
    const auto [q1, q2] = elliptic_to_cartesian(s.xi, s.eta);
    const auto [p1, p2] = lower_momenta_to_cartesian(s.xi, s.eta, s.p_xi, s.p_eta);
    return {q1, q2, p1, p2};
}

/// Symplectic lift of (xi, eta) -> (-xi, -eta), exchanging the two sheets of the cover.
inline EllipticState involution(const EllipticState& s) noexcept
{
    return {-s.xi, -s.eta, -s.p_xi, -s.p_eta};
}

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double eta) noexcept
{
    double w = std::remainder(eta, 2.0 * kPi);
    if (w <= -kPi) w += 2.0 * kPi;
    return w;
}

/**
 * Canonical transformation to x = cosh(xi), y = cos(eta),
 * p_x = p_xi / sinh(xi), p_y = p_eta / sin(eta).
 *
 * The formulas are invariant under involution(), so states on the xi < 0
 * sheet of the extended strip are accepted. The sheet records the sign of q2;
 * (x, y, p_x, p_y) are given by the same formulas in both half-planes.
 */
inline SeparatedState elliptic_to_separated(const EllipticState& in)
{
    EllipticState s = in.xi < 0.0 ? involution(in) : in;
    s.eta = wrap_angle(s.eta);
    const double sh = std::sinh(s.xi);
    const double sn = std::sin(s.eta);
    if (std::abs(sh) < kChartEpsilon || std::abs(sn) < kChartEpsilon) {
        throw DegenerateChart("separated chart is degenerate on the q1-axis");
    }
    return {std::cosh(s.xi), std::cos(s.eta), s.p_xi / sh, s.p_eta / sn,
            sn < 0.0 ? Sheet::lower : Sheet::upper};
}

/// Inverse of elliptic_to_separated with xi >= 0 and eta in [-pi, pi].
inline EllipticState separated_to_elliptic(const SeparatedState& s)
{
    if (!(s.x >= 1.0) || !(std::abs(s.y) <= 1.0)) {
        throw DomainError("separated coordinates need x >= 1 and |y| <= 1");
    }
    const double xi = std::acosh(s.x);
    const double eta = s.sheet == Sheet::upper ? std::acos(s.y) : -std::acos(s.y);
    return {xi, eta, std::sinh(xi) * s.p_x, std::sin(eta) * s.p_y};
}

} // namespace twocenters

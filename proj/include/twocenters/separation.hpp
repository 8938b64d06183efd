#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "charges.hpp"
#include "coords.hpp"
#include "diagnostics.hpp"
#include "errors.hpp"

namespace twocenters {

/// H = |p|^2 / 2 - z1 / |q - a| - z2 / |q + a| with a = (1, 0).
inline double hamiltonian(const CartesianState& s, const ChargeConfig& c)
{
    check_not_at_focus(s.q1, s.q2);
    const auto [r1, r2] = center_distances(s.q1, s.q2);
    return 0.5 * (s.p1 * s.p1 + s.p2 * s.p2) - c.z1() / r1 - c.z2() / r2;
}

// Effective potentials of the two separated one-degree-of-freedom systems.

inline double potential_v_xi(double xi, double e, const ChargeConfig& c) noexcept
{
    const double ch = std::cosh(xi);
    return -c.z_plus() * ch - e * ch * ch;
}

inline double potential_v_eta(double eta, double e, const ChargeConfig& c) noexcept
{
    const double cs = std::cos(eta);
    return c.z_minus() * cs + e * cs * cs;
}

inline double potential_v_x(double x, double e, const ChargeConfig& c)
{
    if (!(x >= 1.0)) throw DomainError("V_x needs x >= 1");
    return -c.z_plus() * x - e * x * x;
}

inline double potential_v_y(double y, double e, const ChargeConfig& c)
{
    if (!(std::abs(y) <= 1.0)) throw DomainError("V_y needs |y| <= 1");
    return c.z_minus() * y + e * y * y;
}

/// H_1 = p_xi^2 / 2 - Z+ cosh(xi).
inline double h1(double p_xi, double xi, const ChargeConfig& c) noexcept
{
    return 0.5 * p_xi * p_xi - c.z_plus() * std::cosh(xi);
}

/// H_2 = p_eta^2 / 2 + Z- cos(eta).
inline double h2(double p_eta, double eta, const ChargeConfig& c) noexcept
{
    return 0.5 * p_eta * p_eta + c.z_minus() * std::cos(eta);
}

inline double h_xi(double p_xi, double xi, double e, const ChargeConfig& c) noexcept
{
    return 0.5 * p_xi * p_xi + potential_v_xi(xi, e, c);
}

inline double h_eta(double p_eta, double eta, double e, const ChargeConfig& c) noexcept
{
    return 0.5 * p_eta * p_eta + potential_v_eta(eta, e, c);
}

inline double h_x(double p_x, double x, double e, const ChargeConfig& c)
{
    return 0.5 * (x * x - 1.0) * p_x * p_x + potential_v_x(x, e, c);
}

inline double h_y(double p_y, double y, double e, const ChargeConfig& c)
{
    return 0.5 * (1.0 - y * y) * p_y * p_y + potential_v_y(y, e, c);
}

/// Energy of an elliptic phase-space point, (H_1 + H_2) / F.
inline double energy_of(const EllipticState& s, const ChargeConfig& c)
{
    const double f = jacobian_F(s.xi, s.eta);
    if (f < kChartEpsilon) throw FocusCollision("energy is undefined at a center");
    return (h1(s.p_xi, s.xi, c) + h2(s.p_eta, s.eta, c)) / f;
}

/**
 * The two closed forms of K at a given energy,
 *   K = H_1 - cosh^2(xi) E   and   K = -(H_2 + cos^2(eta) E),
 * with the magnitude of the terms each one sums.
 */
struct DualK {
    double k_xi = 0.0;
    double k_eta = 0.0;
    double scale_xi = 0.0;
    double scale_eta = 0.0;

    /// The form that suffers less cancellation.
    double best() const noexcept { return scale_eta < scale_xi ? k_eta : k_xi; }

    /// Agreement up to 1e-10 (scaled) plus the rounding the worse form can carry.
    bool consistent() const noexcept
    {
        const double tol = 1e-10 * std::max({1.0, std::abs(k_xi), std::abs(k_eta)}) +
                           64.0 * std::numeric_limits<double>::epsilon() * std::max(scale_xi, scale_eta);
        return std::abs(k_xi - k_eta) <= tol;
    }
};

inline DualK dual_k(const EllipticState& s, double e, const ChargeConfig& c) noexcept
{
    const double ch = std::cosh(s.xi);
    const double cs = std::cos(s.eta);
    const double kin_xi = 0.5 * s.p_xi * s.p_xi;
    const double kin_eta = 0.5 * s.p_eta * s.p_eta;
    DualK d;
    d.k_xi = kin_xi - c.z_plus() * ch - ch * ch * e;
    d.k_eta = -(kin_eta + c.z_minus() * cs + cs * cs * e);
    d.scale_xi = kin_xi + std::abs(c.z_plus() * ch) + std::abs(ch * ch * e);
    d.scale_eta = kin_eta + std::abs(c.z_minus() * cs) + std::abs(cs * cs * e);
    return d;
}

namespace detail {
inline EnergyMomentum finish_energy_momentum(const EllipticState& s, double e, const ChargeConfig& c)
{
    const DualK d = dual_k(s, e, c);
    if (!d.consistent()) {
        report_diagnostic("energy_momentum_map",
                          "K forms disagree: " + std::to_string(d.k_xi) + " vs " + std::to_string(d.k_eta));
    }
    return {e, d.best()};
}
} // namespace detail

/**
 * The energy-momentum map (H, H_xi).
 *
 * E comes from the Cartesian Hamiltonian. K is evaluated in both closed forms;
 * the better conditioned one is returned and a disagreement beyond rounding
 * raises a diagnostic.
 */
inline EnergyMomentum energy_momentum_map(const CartesianState& s, const ChargeConfig& c)
{
    const double e = hamiltonian(s, c);
    return detail::finish_energy_momentum(to_elliptic(s), e, c);
}

/// Same map evaluated on the extended elliptic strip.
inline EnergyMomentum energy_momentum_map(const EllipticState& s, const ChargeConfig& c)
{
    return detail::finish_energy_momentum(s, energy_of(s, c), c);
}

/**
 * P(s) = 2 (s^2 - 1) (E s^2 + Z s + K) with Z = Z+ for x, Z- for y.
 *
 * Evaluated in factored form so the fixed roots at +-1 are exact zeros.
 */
struct MotionPolynomial {
    Branch branch = Branch::plus;
    double e = 0.0;
    double z = 0.0;
    double k = 0.0;

    /// Coefficients in ascending powers of s.
    std::array<double, 5> coefficients() const noexcept
    {
        return {-2.0 * k, -2.0 * z, 2.0 * (k - e), 2.0 * z, 2.0 * e};
    }

    double quadratic(double s) const noexcept { return (e * s + z) * s + k; }

    double quadratic_derivative(double s) const noexcept { return 2.0 * e * s + z; }

    double operator()(double s) const noexcept { return 2.0 * (s * s - 1.0) * quadratic(s); }
};

inline MotionPolynomial motion_polynomial(Branch b, const EnergyMomentum& em, const ChargeConfig& c) noexcept
{
    return {b, em.e, branch_strength(b, c), em.k};
}

/**
 * Squared momentum p_x^2 (branch plus, s = x >= 1) or p_y^2 (branch minus, |s| <= 1)
 * on the level set (E, K). Negative values mark forbidden points.
 *
 * At the fixed roots s = +-1 the formula is 0/0 or c/0. When the quadratic
 * factor vanishes there too the finite limit is returned; otherwise the
 * one-sided limit from inside the domain, +inf or -inf.
 */
inline double momentum_squared(double s, Branch b, const EnergyMomentum& em, const ChargeConfig& c)
{
    const MotionPolynomial p = motion_polynomial(b, em, c);
    const double zero_tol = 4.0 * std::numeric_limits<double>::epsilon() *
                            (std::abs(p.e) + std::abs(p.z) + std::abs(p.k));
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (b == Branch::plus) {
        if (!(s >= 1.0)) throw DomainError("x-branch momentum needs x >= 1");
        if (s == 1.0) {
            const double q = p.quadratic(1.0);
            if (std::abs(q) <= zero_tol) return p.quadratic_derivative(1.0);
            return q > 0.0 ? inf : -inf;
        }
        return 2.0 * p.quadratic(s) / (s * s - 1.0);
    }
    if (!(std::abs(s) <= 1.0)) throw DomainError("y-branch momentum needs |y| <= 1");
    if (std::abs(s) == 1.0) {
        const double q = p.quadratic(s);
        if (std::abs(q) <= zero_tol) return s * p.quadratic_derivative(s);
        return q < 0.0 ? inf : -inf;
    }
    return -2.0 * p.quadratic(s) / (1.0 - s * s);
}

} // namespace twocenters

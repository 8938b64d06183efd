#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "twocenters/coords.hpp"
#include "twocenters/separation.hpp"

using namespace twocenters;

namespace {

// Oracle for the inverse chart: confocal distances give x = (r1 + r2) / 2,
// y = (r2 - r1) / 2 (center 1 at +1), then xi = acosh x, eta = +-acos y.
EllipticPoint confocal_oracle(double q1, double q2)
{
    const double r1 = std::hypot(q1 - 1.0, q2);
    const double r2 = std::hypot(q1 + 1.0, q2);
    const double x = std::max(1.0, 0.5 * (r1 + r2));
    const double y = std::clamp(0.5 * (r2 - r1), -1.0, 1.0);
    return {std::acosh(x), std::copysign(std::acos(y), q2)};
}

} // namespace

TEST(EllipticToCartesian, Foci)
{
    const auto a = elliptic_to_cartesian(0.0, 0.0);
    EXPECT_EQ(a.q1, 1.0);
    EXPECT_EQ(a.q2, 0.0);
    const auto b = elliptic_to_cartesian(0.0, kPi);
    EXPECT_DOUBLE_EQ(b.q1, -1.0);
    EXPECT_NEAR(b.q2, 0.0, 1e-300);
}

TEST(EllipticToCartesian, PointOnSymmetryAxis)
{
    const auto p = elliptic_to_cartesian(std::asinh(1.0), kPi / 2);
    EXPECT_NEAR(p.q1, 0.0, 1e-15);
    EXPECT_NEAR(p.q2, 1.0, 1e-15);
}

TEST(CartesianToElliptic, Examples)
{
    auto e = cartesian_to_elliptic(0.0, 1.0);
    EXPECT_NEAR(e.xi, std::asinh(1.0), 1e-15);
    EXPECT_NEAR(e.eta, kPi / 2, 1e-15);

    e = cartesian_to_elliptic(std::cosh(2.0), 0.0);
    EXPECT_NEAR(e.xi, 2.0, 1e-14);
    EXPECT_EQ(e.eta, 0.0);

    e = cartesian_to_elliptic(0.5, 0.0);
    EXPECT_EQ(e.xi, 0.0);
    EXPECT_NEAR(e.eta, std::acos(0.5), 1e-15);
}

TEST(CartesianToElliptic, NegativeAxisUsesPlusPi)
{
    const auto e = cartesian_to_elliptic(-3.0, 0.0);
    EXPECT_DOUBLE_EQ(std::abs(e.eta), kPi);
    EXPECT_NEAR(e.xi, std::acosh(3.0), 1e-15);
}

TEST(CartesianToElliptic, FocusCollision)
{
    EXPECT_THROW(cartesian_to_elliptic(1.0, 0.0), FocusCollision);
    EXPECT_THROW(cartesian_to_elliptic(-1.0, 5e-11), FocusCollision);
    EXPECT_NO_THROW(cartesian_to_elliptic(-1.0, 1e-9));
}

TEST(CartesianToElliptic, RoundTripAndConfocalOracle)
{
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    double worst_round_trip = 0.0;
    double worst_oracle = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double q1 = u(rng);
        const double q2 = u(rng);
        const auto [r1, r2] = center_distances(q1, q2);
        if (std::min(r1, r2) < 1e-6) continue;
        const auto e = cartesian_to_elliptic(q1, q2);
        const auto back = elliptic_to_cartesian(e.xi, e.eta);
        worst_round_trip = std::max({worst_round_trip, std::abs(back.q1 - q1), std::abs(back.q2 - q2)});
        // The oracle is well conditioned away from the axis.
        if (std::abs(q2) > 0.1) {
            const auto o = confocal_oracle(q1, q2);
            worst_oracle = std::max({worst_oracle, std::abs(o.xi - e.xi), std::abs(o.eta - e.eta)});
        }
    }
    EXPECT_LT(worst_round_trip, 1e-12);
    EXPECT_LT(worst_oracle, 1e-10);
}

TEST(CartesianToElliptic, RoundTripNextToTheSegment)
{
    for (double q1 : {-0.999, -0.3, 0.0, 0.7, 0.9999}) {
        for (double q2 : {1e-12, -1e-9, 1e-6}) {
            const auto e = cartesian_to_elliptic(q1, q2);
            const auto back = elliptic_to_cartesian(e.xi, e.eta);
            EXPECT_NEAR(back.q1, q1, 1e-12);
            EXPECT_NEAR(back.q2, q2, 1e-12);
        }
    }
}

TEST(JacobianF, Examples)
{
    EXPECT_EQ(jacobian_F(0.0, 0.0), 0.0);
    EXPECT_NEAR(jacobian_F(1.0, kPi / 2), std::sinh(1.0) * std::sinh(1.0) + 1.0, 1e-15);
    EXPECT_NEAR(jacobian_F(1.0, kPi / 2), 2.3811, 1e-4);
    EXPECT_EQ(jacobian_F(2.0, 0.0), std::sinh(2.0) * std::sinh(2.0));
}

TEST(JacobianF, TwoClosedFormsAgree)
{
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> uxi(-3.0, 3.0);
    std::uniform_real_distribution<double> ueta(-kPi, kPi);
    for (int i = 0; i < 10000; ++i) {
        const double xi = uxi(rng);
        const double eta = ueta(rng);
        const double f = jacobian_F(xi, eta);
        const double alt = std::cosh(xi) * std::cosh(xi) - std::cos(eta) * std::cos(eta);
        // cosh^2 - cos^2 cancels next to the centers; compare where it is well conditioned.
        if (std::cosh(xi) * std::cosh(xi) > 10.0 * f) continue;
        ASSERT_LE(std::abs(f - alt), 1e-14 * f) << xi << ' ' << eta;
    }
}

TEST(MomentumLift, Examples)
{
    const auto m = lift_momenta_to_elliptic(std::asinh(1.0), kPi / 2, 2.0, 0.0);
    EXPECT_NEAR(m.p_xi, 0.0, 1e-15);
    EXPECT_NEAR(m.p_eta, -2.0 * std::sqrt(2.0), 1e-14);

    const auto z = lift_momenta_to_elliptic(0.7, 1.1, 0.0, 0.0);
    EXPECT_EQ(z.p_xi, 0.0);
    EXPECT_EQ(z.p_eta, 0.0);

    const auto ax = lift_momenta_to_elliptic(1.0, 0.0, 1.0, 0.0);
    EXPECT_NEAR(ax.p_xi, std::sinh(1.0), 1e-15);
    EXPECT_EQ(ax.p_eta, 0.0);

    EXPECT_THROW(lift_momenta_to_elliptic(0.0, 0.0, 1.0, 1.0), DegenerateChart);
}

TEST(MomentumLift, AgreesWithJacobianMatrixProduct)
{
    // DG = [[sinh xi cos eta, -cosh xi sin eta], [cosh xi sin eta, sinh xi cos eta]]
    // acting as d(q1, q2) = DG d(xi, eta); the lift is DG^T p, computed here by finite differences.
    const double xi = 0.8, eta = 2.1, p1 = 0.3, p2 = -1.7, h = 1e-6;
    auto q = [](double a, double b) { return elliptic_to_cartesian(a, b); };
    const auto dxi_p = q(xi + h, eta), dxi_m = q(xi - h, eta);
    const auto deta_p = q(xi, eta + h), deta_m = q(xi, eta - h);
    const double p_xi = ((dxi_p.q1 - dxi_m.q1) * p1 + (dxi_p.q2 - dxi_m.q2) * p2) / (2 * h);
    const double p_eta = ((deta_p.q1 - deta_m.q1) * p1 + (deta_p.q2 - deta_m.q2) * p2) / (2 * h);
    const auto m = lift_momenta_to_elliptic(xi, eta, p1, p2);
    EXPECT_NEAR(m.p_xi, p_xi, 1e-8);
    EXPECT_NEAR(m.p_eta, p_eta, 1e-8);
}

TEST(MomentumLift, KineticEnergyIsPreserved)
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int i = 0; i < 10000; ++i) {
        const CartesianState s{u(rng), u(rng), u(rng), u(rng)};
        const auto e = to_elliptic(s);
        const double f = jacobian_F(e.xi, e.eta);
        if (f <= 1e-6) continue;
        const double cart = 0.5 * (s.p1 * s.p1 + s.p2 * s.p2);
        const double ell = (e.p_xi * e.p_xi + e.p_eta * e.p_eta) / (2.0 * f);
        ASSERT_NEAR(ell, cart, 1e-12 * std::max(1.0, cart));
        const auto back = to_cartesian(e);
        ASSERT_NEAR(back.p1, s.p1, 1e-10 * (1 + std::abs(s.p1)));
        ASSERT_NEAR(back.p2, s.p2, 1e-10 * (1 + std::abs(s.p2)));
    }
}

TEST(Involution, Examples)
{
    const EllipticState s{0.5, 0.3, 1.0, 2.0};
    const auto i = involution(s);
    EXPECT_EQ(i.xi, -0.5);
    EXPECT_EQ(i.eta, -0.3);
    EXPECT_EQ(i.p_xi, -1.0);
    EXPECT_EQ(i.p_eta, -2.0);
    const auto z = involution(EllipticState{});
    EXPECT_EQ(z.xi, 0.0);
    EXPECT_EQ(z.p_eta, 0.0);
}

TEST(Involution, IsAnExactSymmetryOfTheChart)
{
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int i = 0; i < 100; ++i) {
        const EllipticState s{u(rng), u(rng), u(rng), u(rng)};
        const auto twice = involution(involution(s));
        ASSERT_EQ(twice.xi, s.xi);
        ASSERT_EQ(twice.eta, s.eta);
        ASSERT_EQ(twice.p_xi, s.p_xi);
        ASSERT_EQ(twice.p_eta, s.p_eta);
        const auto a = elliptic_to_cartesian(s.xi, s.eta);
        const auto b = elliptic_to_cartesian(-s.xi, -s.eta);
        ASSERT_EQ(a.q1, b.q1);
        ASSERT_EQ(a.q2, b.q2);
        if (jacobian_F(s.xi, s.eta) > 1e-6) {
            const auto ca = to_cartesian(s);
            const auto cb = to_cartesian(involution(s));
            ASSERT_EQ(ca.p1, cb.p1);
            ASSERT_EQ(ca.p2, cb.p2);
        }
    }
}

TEST(SeparatedChart, Examples)
{
    const auto s = elliptic_to_separated({std::asinh(1.0), kPi / 2, 0.0, -2.0 * std::sqrt(2.0)});
    EXPECT_NEAR(s.x, std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(s.y, 0.0, 1e-15);
    EXPECT_EQ(s.p_x, 0.0);
    EXPECT_NEAR(s.p_y, -2.0 * std::sqrt(2.0), 1e-15);
    EXPECT_EQ(s.sheet, Sheet::upper);

    const auto z = elliptic_to_separated({0.9, kPi / 2, 0.0, 0.0});
    EXPECT_EQ(z.x, std::cosh(0.9));
    EXPECT_EQ(z.p_x, 0.0);
    EXPECT_EQ(z.p_y, 0.0);

    EXPECT_THROW(elliptic_to_separated({0.0, 1.0, 1.0, 1.0}), DegenerateChart);
    EXPECT_THROW(elliptic_to_separated({1.0, kPi, 1.0, 1.0}), DegenerateChart);
    EXPECT_THROW(separated_to_elliptic({0.5, 0.0, 0.0, 0.0, Sheet::upper}), DomainError);
}

TEST(SeparatedChart, RoundTripBothSheets)
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> uxi(0.01, 3.0);
    std::uniform_real_distribution<double> ueta(0.01, kPi - 0.01);
    std::uniform_real_distribution<double> up(-3.0, 3.0);
    for (int i = 0; i < 1000; ++i) {
        const double sign = i % 2 ? 1.0 : -1.0;
        const EllipticState s{uxi(rng), sign * ueta(rng), up(rng), up(rng)};
        const auto sep = elliptic_to_separated(s);
        EXPECT_EQ(sep.sheet, sign > 0 ? Sheet::upper : Sheet::lower);
        const auto back = separated_to_elliptic(sep);
        ASSERT_NEAR(back.xi, s.xi, 1e-12);
        ASSERT_NEAR(back.eta, s.eta, 1e-12);
        ASSERT_NEAR(back.p_xi, s.p_xi, 1e-12 * (1 + std::abs(s.p_xi)));
        ASSERT_NEAR(back.p_eta, s.p_eta, 1e-12 * (1 + std::abs(s.p_eta)));
        // The other sheet of the cover gives the same separated point.
        const auto mirrored = elliptic_to_separated(involution(s));
        ASSERT_EQ(mirrored.x, sep.x);
        ASSERT_EQ(mirrored.p_y, sep.p_y);
    }
}

TEST(SeparatedChart, MirrorImageHasSameSeparatedCoordinates)
{
    // Reflection q2 -> -q2, p2 -> -p2 maps eta -> -eta and leaves (x, y, p_x, p_y) unchanged.
    const CartesianState up{0.3, 0.8, -0.4, 1.1};
    const CartesianState down{0.3, -0.8, -0.4, -1.1};
    const auto a = elliptic_to_separated(to_elliptic(up));
    const auto b = elliptic_to_separated(to_elliptic(down));
    EXPECT_EQ(a.sheet, Sheet::upper);
    EXPECT_EQ(b.sheet, Sheet::lower);
    EXPECT_NEAR(a.x, b.x, 1e-15);
    EXPECT_NEAR(a.y, b.y, 1e-15);
    EXPECT_NEAR(a.p_x, b.p_x, 1e-14);
    EXPECT_NEAR(a.p_y, b.p_y, 1e-14);
}

TEST(SeparatedChart, PreservesOneDegreeHamiltonians)
{
    const ChargeConfig c(0.7, -1.3);
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> uxi(0.05, 3.0);
    std::uniform_real_distribution<double> ueta(0.05, kPi - 0.05);
    std::uniform_real_distribution<double> up(-3.0, 3.0);
    for (int i = 0; i < 1000; ++i) {
        const EllipticState s{uxi(rng), ueta(rng), up(rng), up(rng)};
        const double e = 1.7;
        const auto sep = elliptic_to_separated(s);
        const double hx = h_xi(s.p_xi, s.xi, e, c);
        const double hy = h_eta(s.p_eta, s.eta, e, c);
        ASSERT_NEAR(h_x(sep.p_x, sep.x, e, c), hx, 1e-12 * std::max(1.0, std::abs(hx)));
        ASSERT_NEAR(h_y(sep.p_y, sep.y, e, c), hy, 1e-12 * std::max(1.0, std::abs(hy)));
    }
}

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "twocenters/diagnostics.hpp"
#include "twocenters/separation.hpp"

using namespace twocenters;

TEST(ChargeConfig, DerivedSumsAreExact)
{
    const ChargeConfig c(0.3, -1.7);
    EXPECT_EQ(c.z_plus(), -1.7 + 0.3);
    EXPECT_EQ(c.z_minus(), -1.7 - 0.3);
    EXPECT_THROW(ChargeConfig(0.0, 1.0), InvalidCharges);
    EXPECT_THROW(ChargeConfig(1.0, 0.0), InvalidCharges);
    EXPECT_THROW(ChargeConfig(NAN, 1.0), InvalidCharges);
}

TEST(ChargeConfig, CanonicalFrameSwapsCenters)
{
    const ChargeConfig c(2.0, 1.0);
    EXPECT_FALSE(c.is_canonical());
    const auto k = c.canonical();
    EXPECT_EQ(k.z1(), 1.0);
    EXPECT_EQ(k.z2(), 2.0);
    EXPECT_EQ(k.z_plus(), c.z_plus());
    EXPECT_EQ(k.z_minus(), -c.z_minus());
}

TEST(Hamiltonian, Examples)
{
    EXPECT_NEAR(hamiltonian({0.0, 1.0, 2.0, 0.0}, ChargeConfig(1, 1)), 2.0 - std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(hamiltonian({0.0, 1.0, 0.0, 0.0}, ChargeConfig(1, -1)), 0.0, 1e-15);
    EXPECT_NEAR(hamiltonian({10.0, 0.0, 0.0, 0.0}, ChargeConfig(1, 1)), -1.0 / 9.0 - 1.0 / 11.0, 1e-15);
    EXPECT_THROW(hamiltonian({1.0, 0.0, 0.0, 0.0}, ChargeConfig(1, 1)), FocusCollision);
}

TEST(Potentials, Examples)
{
    EXPECT_EQ(potential_v_xi(0.0, 1.0, ChargeConfig(1, 1)), -3.0);
    EXPECT_NEAR(potential_v_eta(kPi / 2, 2.7, ChargeConfig(-0.4, 1.1)), 0.0, 1e-15);
    EXPECT_EQ(potential_v_eta(0.0, 3.0, ChargeConfig(-1, 1)), 5.0);
    EXPECT_EQ(potential_v_x(1.0, 1.3, ChargeConfig(0.2, 0.9)), potential_v_xi(0.0, 1.3, ChargeConfig(0.2, 0.9)));
    EXPECT_EQ(potential_v_y(0.0, 5.0, ChargeConfig(-1, 1)), 0.0);
    EXPECT_EQ(potential_v_x(2.0, 1.0, ChargeConfig(-1, -1)), 0.0);
    EXPECT_THROW(potential_v_x(0.5, 1.0, ChargeConfig(1, 1)), DomainError);
    EXPECT_THROW(potential_v_y(1.5, 1.0, ChargeConfig(1, 1)), DomainError);
}

TEST(EnergyMomentumMap, Examples)
{
    const auto a = energy_momentum_map(CartesianState{0.0, 1.0, 2.0, 0.0}, ChargeConfig(1, 1));
    EXPECT_NEAR(a.e, 2.0 - std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(a.k, -4.0, 1e-14);

    const auto b = energy_momentum_map(CartesianState{0.0, 1.0, 0.0, 0.0}, ChargeConfig(1, -1));
    EXPECT_NEAR(b.e, 0.0, 1e-15);
    EXPECT_NEAR(b.k, 0.0, 1e-15);
}

TEST(EnergyMomentumMap, OnTheAxisUsesTheRegularForm)
{
    // q2 = 0 outside the centers: sin(eta) = 0, both forms stay finite.
    const ChargeConfig c(1.0, 0.5);
    const CartesianState s{2.5, 0.0, 0.3, 0.8};
    const auto em = energy_momentum_map(s, c);
    const auto e = to_elliptic(s);
    EXPECT_NEAR(em.k, h1(e.p_xi, e.xi, c) - std::cosh(e.xi) * std::cosh(e.xi) * em.e, 1e-12);
    EXPECT_NEAR(em.k, -(h2(e.p_eta, e.eta, c) + std::cos(e.eta) * std::cos(e.eta) * em.e), 1e-12);
}

TEST(EnergyMomentumMap, ChartBugsRaiseDiagnostics)
{
    static int seen = 0;
    const auto previous = set_diagnostic_handler([](const Diagnostic&) { ++seen; });
    const std::uint64_t before = diagnostic_count();
    // A state that is not a lift of any Cartesian point with this energy.
    const EllipticState s{0.7, 1.2, 0.4, -0.9};
    (void)detail::finish_energy_momentum(s, energy_of(s, ChargeConfig(1, 1)) + 0.5, ChargeConfig(1, 1));
    EXPECT_EQ(diagnostic_count(), before + 1);
    EXPECT_EQ(seen, 1);
    set_diagnostic_handler(previous);
}

// Properties on random non-degenerate states.
class RandomStates : public ::testing::TestWithParam<std::pair<double, double>> {};

TEST_P(RandomStates, SeparationIdentityAndDualK)
{
    const ChargeConfig c(GetParam().first, GetParam().second);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> uq(-4.0, 4.0);
    std::uniform_real_distribution<double> up(-3.0, 3.0);
    int used = 0;
    while (used < 10000) {
        const CartesianState s{uq(rng), uq(rng), up(rng), up(rng)};
        const auto [r1, r2] = center_distances(s.q1, s.q2);
        if (std::min(r1, r2) < 1e-3) continue;
        const auto e = to_elliptic(s);
        if (jacobian_F(e.xi, e.eta) < 1e-6) continue;
        ++used;
        const double energy = hamiltonian(s, c);
        for (double trial : {0.0, 0.7, energy}) {
            const double lhs = jacobian_F(e.xi, e.eta) * (energy - trial);
            const double rhs = h_xi(e.p_xi, e.xi, trial, c) + h_eta(e.p_eta, e.eta, trial, c);
            ASSERT_LT(std::abs(lhs - rhs), 1e-9);
        }

        const DualK d = dual_k(e, energy, c);
        ASSERT_LE(std::abs(d.k_xi - d.k_eta), 1e-10 * std::max({1.0, std::abs(d.k_xi), std::abs(d.k_eta)}));
        ASSERT_TRUE(d.consistent());
        const auto em = energy_momentum_map(s, c);
        ASSERT_EQ(em.e, energy);
        ASSERT_NEAR(em.k, d.k_xi, 1e-10 * std::max(1.0, std::abs(d.k_xi)));
    }
}

TEST_P(RandomStates, MomentumSquaredMatchesPolynomial)
{
    const ChargeConfig c(GetParam().first, GetParam().second);
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> ue(0.0, 5.0);
    std::uniform_real_distribution<double> uk(-6.0, 6.0);
    std::uniform_real_distribution<double> ux(1.0, 20.0);
    std::uniform_real_distribution<double> uy(-1.0, 1.0);
    for (int i = 0; i < 2000; ++i) {
        const EnergyMomentum em{ue(rng), uk(rng)};
        const double x = ux(rng);
        const double y = uy(rng);
        const auto px = motion_polynomial(Branch::plus, em, c);
        const auto py = motion_polynomial(Branch::minus, em, c);
        if (x > 1.0) {
            const double lhs = (x * x - 1) * (x * x - 1) * momentum_squared(x, Branch::plus, em, c);
            ASSERT_NEAR(lhs, px(x), 1e-12 * std::max(1.0, std::abs(px(x))));
        }
        const double lhs = (1 - y * y) * (1 - y * y) * momentum_squared(y, Branch::minus, em, c);
        ASSERT_NEAR(lhs, py(y), 1e-12 * std::max(1.0, std::abs(py(y))));
        // Expanded coefficients evaluate to the factored form.
        const auto co = px.coefficients();
        const double horner = (((co[4] * x + co[3]) * x + co[2]) * x + co[1]) * x + co[0];
        ASSERT_NEAR(horner, px(x), 1e-9 * std::max(1.0, std::abs(px(x))));
    }
}

INSTANTIATE_TEST_SUITE_P(Charges, RandomStates,
                         ::testing::Values(std::pair{1.0, 1.0}, std::pair{-1.0, 1.0}, std::pair{1.0, 3.0},
                                           std::pair{-1.0, 0.5}, std::pair{2.0, -0.7}));

TEST(MotionPolynomial, FixedRootsAreExact)
{
    const ChargeConfig c(0.37, -1.91);
    for (double e : {0.0, 0.3, 7.1}) {
        for (double k : {-3.3, 0.0, 2.2}) {
            for (Branch b : {Branch::plus, Branch::minus}) {
                const auto p = motion_polynomial(b, {e, k}, c);
                EXPECT_EQ(p(1.0), 0.0);
                EXPECT_EQ(p(-1.0), 0.0);
            }
        }
    }
}

TEST(MotionPolynomial, ExampleRoots)
{
    // E = 1, Z+ = -2, K = 0: 2 (s^2 - 1)(s^2 - 2 s), roots {-1, 0, 1, 2}.
    const ChargeConfig c(-1.0, -1.0);
    const auto p = motion_polynomial(Branch::plus, {1.0, 0.0}, c);
    for (double r : {-1.0, 0.0, 1.0, 2.0}) EXPECT_EQ(p(r), 0.0);
    EXPECT_NE(p(0.5), 0.0);
    EXPECT_EQ(momentum_squared(2.0, Branch::plus, {1.0, 0.0}, c), 0.0);
}

TEST(MotionPolynomial, NoMovableRootsInsideForLargeEnergy)
{
    // E = 3, Z- = 0, K = -4: movable roots at y^2 = 4/3, outside [-1, 1].
    const ChargeConfig c(1.0, 1.0);
    const EnergyMomentum em{3.0, -4.0};
    for (int i = 0; i <= 200; ++i) {
        const double y = -1.0 + i / 100.0;
        EXPECT_GE(momentum_squared(y, Branch::minus, em, c), 0.0);
        EXPECT_GE(motion_polynomial(Branch::minus, em, c)(y), 0.0);
    }
}

TEST(MomentumSquared, Examples)
{
    const ChargeConfig c(0.4, 1.3);
    for (double k : {-2.0, 0.0, 0.7}) {
        EXPECT_DOUBLE_EQ(momentum_squared(0.0, Branch::minus, {1.1, k}, c), -2.0 * k);
    }
    // E x^2 + Z+ x + K > 0 with x > 1 gives a positive value.
    EXPECT_GT(momentum_squared(3.0, Branch::plus, {1.0, 0.5}, c), 0.0);
    EXPECT_THROW(momentum_squared(0.9, Branch::plus, {1.0, 0.5}, c), DomainError);
    EXPECT_THROW(momentum_squared(1.1, Branch::minus, {1.0, 0.5}, c), DomainError);
}

TEST(MomentumSquared, FixedRootLimits)
{
    // Quadratic factor vanishing at s = 1 (on Lp2): finite limit equal to the derivative value.
    const ChargeConfig c(1.0, 1.0); // Z+ = 2
    const EnergyMomentum on_curve{3.0, -5.0};
    const double limit = momentum_squared(1.0, Branch::plus, on_curve, c);
    const double near = momentum_squared(1.0 + 1e-7, Branch::plus, on_curve, c);
    EXPECT_NEAR(limit, near, 1e-5);
    EXPECT_EQ(limit, 2 * 3.0 + 2.0);
    // Off the curve the value diverges with the sign of the quadratic.
    EXPECT_EQ(momentum_squared(1.0, Branch::plus, {3.0, -4.0}, c), INFINITY);
    EXPECT_EQ(momentum_squared(1.0, Branch::plus, {3.0, -6.0}, c), -INFINITY);

    // y = +1 and y = -1 with Z- = 1.5.
    const ChargeConfig d(-1.0, 0.5);
    const EnergyMomentum lm2{0.1, -1.5 - 0.1};
    EXPECT_NEAR(momentum_squared(1.0, Branch::minus, lm2, d), momentum_squared(1.0 - 1e-8, Branch::minus, lm2, d),
                1e-6);
    const EnergyMomentum lm1{0.1, 1.5 - 0.1};
    EXPECT_NEAR(momentum_squared(-1.0, Branch::minus, lm1, d),
                momentum_squared(-1.0 + 1e-8, Branch::minus, lm1, d), 1e-6);
}

#pragma once

#include <array>
#include <cmath>
#include <algorithm>
#include <cstddef>
#include <utility>

namespace twocenters {

/// Dormand-Prince 5(4) embedded pair on a fixed-size state.
template <std::size_t N>
struct DormandPrince {
    using State = std::array<double, N>;

    struct Step {
        State value;
        State error;
    };

    template <typename Rhs>
    static Step step(const Rhs& f, const State& u, double h)
    {
        constexpr double a21 = 1.0 / 5.0;
        constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
        constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
        constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                         a54 = -212.0 / 729.0;
        constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                         a65 = -5103.0 / 18656.0;
        constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0, b5 = -2187.0 / 6784.0,
                         b6 = 11.0 / 84.0;
        constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                         e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

        auto comb = [&](auto... terms) {
            State r = u;
            for (std::size_t i = 0; i < N; ++i) {
                double acc = 0.0;
                ((acc += terms.first * (*terms.second)[i]), ...);
                r[i] += h * acc;
            }
            return r;
        };
        using P = std::pair<double, const State*>;

        const State k1 = f(u);
        const State k2 = f(comb(P{a21, &k1}));
        const State k3 = f(comb(P{a31, &k1}, P{a32, &k2}));
        const State k4 = f(comb(P{a41, &k1}, P{a42, &k2}, P{a43, &k3}));
        const State k5 = f(comb(P{a51, &k1}, P{a52, &k2}, P{a53, &k3}, P{a54, &k4}));
        const State k6 = f(comb(P{a61, &k1}, P{a62, &k2}, P{a63, &k3}, P{a64, &k4}, P{a65, &k5}));
        const State y5 = comb(P{b1, &k1}, P{b3, &k3}, P{b4, &k4}, P{b5, &k5}, P{b6, &k6});
        const State k7 = f(y5);

        Step out{y5, {}};
        for (std::size_t i = 0; i < N; ++i) {
            out.error[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        }
        return out;
    }

    /// Mixed absolute/relative error norm; a step is acceptable when <= 1.
    static double error_norm(const State& u, const Step& s, double tol) noexcept
    {
        double worst = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double scale = tol * (1.0 + std::max(std::abs(u[i]), std::abs(s.value[i])));
            worst = std::max(worst, std::abs(s.error[i]) / scale);
        }
        return worst;
    }
};

} // namespace twocenters

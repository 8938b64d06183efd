#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "errors.hpp"

namespace twocenters {

/// Guard distance for focus collisions and chart degeneracies.
inline constexpr double kChartEpsilon = 1e-10;

inline constexpr double kPi = std::numbers::pi;

/**
 * Strengths of the two fixed centers.
 *
 * Center 1 (strength z1) sits at (+1, 0), center 2 (strength z2) at (-1, 0).
 * The sum and difference are always recomputed from the stored pair.
 */
class ChargeConfig {
public:
    ChargeConfig(double z1, double z2) : z1_(z1), z2_(z2)
    {
        if (!std::isfinite(z1) || !std::isfinite(z2) || z1 == 0.0 || z2 == 0.0) {
            throw InvalidCharges("center strengths must be finite and nonzero, got z1=" +
                                 std::to_string(z1) + ", z2=" + std::to_string(z2));
        }
    }

    double z1() const noexcept { return z1_; }
    double z2() const noexcept { return z2_; }
    double z_plus() const noexcept { return z2_ + z1_; }
    double z_minus() const noexcept { return z2_ - z1_; }

    /// True when z_minus >= 0, the frame the region analysis is written in.
    bool is_canonical() const noexcept { return z2_ >= z1_; }

    /**
     * The same physical system with the centers relabeled so that z_minus >= 0.
     *
     * Relabeling is the reflection q1 -> -q1. It maps eta -> pi - eta (y -> -y)
     * and leaves both E and K unchanged.
     */
    ChargeConfig canonical() const { return is_canonical() ? *this : ChargeConfig(z2_, z1_); }

    friend bool operator==(const ChargeConfig&, const ChargeConfig&) = default;

private:
    double z1_;
    double z2_;
};

/// Values (E, K) of the two constants of motion H and H_xi.
struct EnergyMomentum {
    double e = 0.0;
    double k = 0.0;
};

/// Both branches of the separated problem: plus drives x, minus drives y.
enum class Branch { plus, minus };

inline double branch_strength(Branch b, const ChargeConfig& c) noexcept
{
    return b == Branch::plus ? c.z_plus() : c.z_minus();
}

/// |a - b| measured against max(1, |a|, |b|).
inline double scaled_gap(double a, double b) noexcept
{
    return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

} // namespace twocenters

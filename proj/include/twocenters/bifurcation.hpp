#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "charges.hpp"
#include "errors.hpp"
#include "separation.hpp"

namespace twocenters {

/// Lines and hyperbolas of the (E, K) plane; Lp1 only appears as a discriminant factor.
enum class CurveId { L0, Lm1, Lm2, Lm3, Lp1, Lp2, Lp3 };

inline const char* to_string(CurveId c) noexcept
{
    switch (c) {
    case CurveId::L0: return "L0";
    case CurveId::Lm1: return "Lm1";
    case CurveId::Lm2: return "Lm2";
    case CurveId::Lm3: return "Lm3";
    case CurveId::Lp1: return "Lp1";
    case CurveId::Lp2: return "Lp2";
    case CurveId::Lp3: return "Lp3";
    }
    return "?";
}

using CurveSet = std::set<CurveId>;

enum class ChargeCase {
    ZminusZero,
    ZplusZero,
    SameSign,                 ///< |Z+| > Z-
    OppositeSignPlusPositive, ///< |Z+| < Z-, Z+ > 0
    OppositeSignPlusNegative, ///< |Z+| < Z-, Z+ < 0
};

inline const char* to_string(ChargeCase c) noexcept
{
    switch (c) {
    case ChargeCase::ZminusZero: return "ZminusZero";
    case ChargeCase::ZplusZero: return "ZplusZero";
    case ChargeCase::SameSign: return "SameSign";
    case ChargeCase::OppositeSignPlusPositive: return "OppositeSignPlusPositive";
    case ChargeCase::OppositeSignPlusNegative: return "OppositeSignPlusNegative";
    }
    return "?";
}

/// Decided from the signs of z1, z2 so that no rounding of Z+- can move a config across cases.
inline ChargeCase charge_case(const ChargeConfig& c) noexcept
{
    if (c.z1() == c.z2()) return ChargeCase::ZminusZero;
    if (c.z1() == -c.z2()) return ChargeCase::ZplusZero;
    if ((c.z1() > 0.0) == (c.z2() > 0.0)) return ChargeCase::SameSign;
    return c.z_plus() > 0.0 ? ChargeCase::OppositeSignPlusPositive : ChargeCase::OppositeSignPlusNegative;
}

/// Lower edge of the image of (H, H_xi): K >= K+(E). Returns -inf where unbounded.
inline double k_plus(double e, const ChargeConfig& c) noexcept
{
    constexpr double minus_inf = -std::numeric_limits<double>::infinity();
    const double zp = c.z_plus();
    if (e > 0.0) return minus_inf;
    if (e <= std::min(-0.5 * zp, 0.0)) return -(zp + e);
    // 0 >= e > -Z+/2: the vertex of V_x lies inside x > 1.
    if (e == 0.0) return minus_inf;
    return zp * zp / (4.0 * e);
}

/// Upper edge of the image of (H, H_xi): K <= K-(E), with Z- taken >= 0.
inline double k_minus(double e, const ChargeConfig& c) noexcept
{
    const double zm = c.canonical().z_minus();
    if (e <= 0.5 * zm) return zm - e;
    return zm * zm / (4.0 * e);
}

/// K on the given curve at energy e; absent for the vertical L0 and for hyperbolas at e = 0.
inline std::optional<double> curve_k(CurveId curve, double e, const ChargeConfig& charges) noexcept
{
    const ChargeConfig c = charges.canonical();
    const double zp = c.z_plus();
    const double zm = c.z_minus();
    switch (curve) {
    case CurveId::L0: return std::nullopt;
    case CurveId::Lm1: return zm - e;
    case CurveId::Lm2: return -zm - e;
    case CurveId::Lp1: return zp - e;
    case CurveId::Lp2: return -zp - e;
    case CurveId::Lm3:
        if (e == 0.0) return std::nullopt;
        return zm * zm / (4.0 * e);
    case CurveId::Lp3:
        if (e == 0.0) return std::nullopt;
        return zp * zp / (4.0 * e);
    }
    return std::nullopt;
}

/// (Z^2 - 4EK)(E + K - Z)^2 (E + K + Z)^2, proportional to the discriminant of P+-.
inline double discriminant(const EnergyMomentum& em, Branch b, const ChargeConfig& c) noexcept
{
    const double z = branch_strength(b, c);
    const double s = em.e + em.k;
    const double u = s - z;
    const double v = s + z;
    return (z * z - 4.0 * em.e * em.k) * u * u * v * v;
}

/// Real roots of E s^2 + Z s + K in ascending order.
struct MovableRoots {
    std::vector<double> roots;
    bool double_root = false;
};

inline MovableRoots movable_roots(const EnergyMomentum& em, Branch b, const ChargeConfig& c)
{
    const double a = em.e;
    const double bq = branch_strength(b, c);
    const double cq = em.k;
    MovableRoots out;
    if (a == 0.0) {
        if (bq != 0.0) out.roots.push_back(-cq / bq);
        return out;
    }
    const double disc = bq * bq - 4.0 * a * cq;
    const double disc_tol = 8.0 * std::numeric_limits<double>::epsilon() * (bq * bq + 4.0 * std::abs(a * cq));
    if (std::abs(disc) <= disc_tol) {
        out.roots.push_back(-bq / (2.0 * a));
        out.double_root = true;
        return out;
    }
    if (disc < 0.0) return out;
    // Cancellation-free form: q = -(b + sign(b) sqrt(disc)) / 2, roots q/a and c/q.
    const double sq = std::sqrt(disc);
    const double q = -0.5 * (bq + std::copysign(sq, bq));
    double r1 = q / a;
    double r2 = cq / q;
    if (r1 > r2) std::swap(r1, r2);
    out.roots = {r1, r2};
    return out;
}

/// Curves of the bifurcation set for E >= 0, per charge case.
inline CurveSet bifurcation_curve_set(const ChargeConfig& c)
{
    using enum CurveId;
    switch (charge_case(c)) {
    case ChargeCase::ZminusZero: return {L0, Lm1, Lp2};
    case ChargeCase::ZplusZero:
    case ChargeCase::SameSign:
    case ChargeCase::OppositeSignPlusPositive: return {L0, Lm1, Lm2, Lm3, Lp2};
    case ChargeCase::OppositeSignPlusNegative: return {L0, Lm1, Lm2, Lm3, Lp2, Lp3};
    }
    return {};
}

inline constexpr double kCurveTolerance = 1e-9;

inline bool in_hill_region(const EnergyMomentum& em, const ChargeConfig& c, double tol = 0.0) noexcept
{
    return em.k >= k_plus(em.e, c) - tol && em.k <= k_minus(em.e, c) + tol;
}

/**
 * K of the part of a curve that belongs to the bifurcation set at energy e.
 *
 * Besides the Hill-region clip, the hyperbolas only count while their double
 * root is inside the coordinate range: Lp3 needs x = -Z+ / 2E >= 1 (it ends
 * where it touches Lp2), Lm3 needs |y| = |Z-| / 2E <= 1.
 */
inline std::optional<double> bifurcation_k(CurveId id, double e, const ChargeConfig& c, double tol = kCurveTolerance)
{
    const auto k = curve_k(id, e, c);
    if (!k || !std::isfinite(*k) || !in_hill_region({e, *k}, c, tol)) return std::nullopt;
    if (id == CurveId::Lp3 && -c.z_plus() < 2.0 * e) return std::nullopt;
    if (id == CurveId::Lm3 && std::abs(c.z_minus()) > 2.0 * e) return std::nullopt;
    return k;
}

/**
 * Curves of the bifurcation set passing within tol of (E, K): distance in K at
 * fixed E, and in E for L0. Absent for regular points and outside the Hill region.
 */
inline std::optional<CurveSet> in_bifurcation_set(const EnergyMomentum& em, const ChargeConfig& c,
                                                  double tol = kCurveTolerance)
{
    if (em.e < 0.0) throw OutOfScope("negative energies are not classified");
    if (!in_hill_region(em, c, tol)) return std::nullopt;
    CurveSet hits;
    for (CurveId id : bifurcation_curve_set(c)) {
        if (id == CurveId::L0) {
            if (std::abs(em.e) <= tol) hits.insert(id);
            continue;
        }
        if (const auto k = bifurcation_k(id, em.e, c, tol); k && std::abs(em.k - *k) <= tol) hits.insert(id);
    }
    if (hits.empty()) return std::nullopt;
    return hits;
}

/// Closed interval; hi may be +inf.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    bool bounded() const noexcept { return std::isfinite(hi); }
    bool degenerate() const noexcept { return lo == hi; }
    bool contains(double v, double slack = 0.0) const noexcept { return v >= lo - slack && v <= hi + slack; }

    friend bool operator==(const Interval&, const Interval&) = default;
};

struct RegionClassification {
    /// Region name ("I_>", "III_0^*", "I_<^a", ...),
    /// "forbidden" outside the Hill region, "boundary" on a bifurcation curve.
    std::string label;
    /// Interval pattern with symbolic endpoints, e.g. "x[1,r3]u[r4,inf);y[-1,r4]".
    std::string pattern;
    std::vector<Interval> x_intervals;
    std::vector<Interval> y_intervals;
    bool bounded_component = false;
    CurveSet on_curves;

    bool forbidden() const noexcept { return x_intervals.empty() || y_intervals.empty(); }
};

namespace detail {

/// Closure of {s in (lo, hi) : sign * q(s) >= 0} plus isolated zeros of q.
inline std::vector<Interval> allowed_intervals(const MotionPolynomial& p, const MovableRoots& mr, double lo,
                                               double hi, double sign)
{
    const double scale = std::abs(p.e) + std::abs(p.z) + std::abs(p.k);
    const double zero_tol = 16.0 * std::numeric_limits<double>::epsilon() * std::max(scale, 1e-300);
    std::vector<double> cuts{lo};
    for (double r : mr.roots) {
        if (r > lo && r < hi) cuts.push_back(r);
    }
    cuts.push_back(hi);

    auto allowed_at = [&](double s) { return sign * p.quadratic(s) >= 0.0; };
    std::vector<Interval> out;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i];
        const double b = cuts[i + 1];
        const double mid = std::isfinite(b) ? 0.5 * (a + b) : 2.0 * std::abs(a) + 1.0;
        if (!allowed_at(mid)) continue;
        if (!out.empty() && out.back().hi == a) {
            out.back().hi = b;
        } else {
            out.push_back({a, b});
        }
    }
    // Isolated admissible points: zeros of the quadratic not inside an allowed interval.
    std::vector<double> candidates{lo};
    for (double r : mr.roots) {
        if (r > lo && r < hi) candidates.push_back(r);
    }
    if (std::isfinite(hi)) candidates.push_back(hi);
    for (double v : candidates) {
        const bool zero = std::abs(p.quadratic(v)) <= zero_tol || (mr.double_root && v == mr.roots.front());
        if (!zero) continue;
        const bool covered = std::any_of(out.begin(), out.end(), [&](const Interval& iv) { return iv.contains(v); });
        if (!covered) out.push_back({v, v});
    }
    std::sort(out.begin(), out.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    return out;
}

inline std::string endpoint_name(double v, const MovableRoots& mr)
{
    if (v == 1.0) return "1";
    if (v == -1.0) return "-1";
    if (std::isinf(v)) return "inf";
    if (mr.double_root) return "r34";
    if (mr.roots.size() == 1) return "r";
    return v == mr.roots.front() ? "r3" : "r4";
}

inline std::string pattern_of(const char* var, const std::vector<Interval>& ivs, const MovableRoots& mr)
{
    std::string s = var;
    if (ivs.empty()) return s + "[]";
    for (std::size_t i = 0; i < ivs.size(); ++i) {
        if (i) s += "u";
        const bool open_hi = std::isinf(ivs[i].hi);
        s += "[" + endpoint_name(ivs[i].lo, mr) + "," + endpoint_name(ivs[i].hi, mr) + (open_hi ? ")" : "]");
    }
    return s;
}

// Shape codes of the canonical-frame intervals used to look up region names.
enum class XShape { crossing, outside, two_components, other };
enum class YShape { full, touches_minus, touches_plus, interior, other };

inline XShape x_shape(const std::vector<Interval>& ivs)
{
    std::vector<Interval> v;
    std::copy_if(ivs.begin(), ivs.end(), std::back_inserter(v), [](const Interval& i) { return !i.degenerate(); });
    if (v.size() == 1 && !v[0].bounded()) return v[0].lo == 1.0 ? XShape::crossing : XShape::outside;
    if (v.size() == 2 && v[0].lo == 1.0 && v[0].bounded() && !v[1].bounded()) return XShape::two_components;
    return XShape::other;
}

inline YShape y_shape(const std::vector<Interval>& ivs)
{
    if (ivs.size() != 1 || ivs[0].degenerate()) return YShape::other;
    const bool lo = ivs[0].lo == -1.0;
    const bool hi = ivs[0].hi == 1.0;
    if (lo && hi) return YShape::full;
    if (lo) return YShape::touches_minus;
    if (hi) return YShape::touches_plus;
    return YShape::interior;
}

inline std::string region_label(ChargeCase cc, double z_plus, double k, XShape xs, YShape ys)
{
    const std::string sub = z_plus > 0.0 ? "_>" : (z_plus < 0.0 ? "_<" : "_0");
    const std::string star = k > 0.0 ? "^*" : "";
    using X = XShape;
    using Y = YShape;
    auto is = [&](Y y, X x) { return ys == y && xs == x; };

    switch (cc) {
    case ChargeCase::ZminusZero:
        if (is(Y::full, X::outside)) return "I" + sub;
        if (is(Y::full, X::crossing) || is(Y::interior, X::outside)) return "II" + sub;
        if (is(Y::interior, X::crossing)) return "III" + sub;
        break;
    case ChargeCase::SameSign:
        if (is(Y::full, X::outside)) return "I" + sub;
        if (is(Y::full, X::crossing)) return "II" + sub;
        if (is(Y::touches_minus, X::crossing)) return "II'" + sub;
        if (is(Y::touches_minus, X::outside)) return "I'" + sub;
        if (is(Y::interior, X::outside)) return "II" + sub;
        if (is(Y::interior, X::crossing)) return "III" + sub;
        break;
    case ChargeCase::ZplusZero:
    case ChargeCase::OppositeSignPlusPositive:
    case ChargeCase::OppositeSignPlusNegative:
        if (is(Y::full, X::outside)) return "I" + sub;
        if (is(Y::touches_minus, X::outside)) return "II" + sub;
        if (is(Y::touches_minus, X::crossing)) return "III" + sub + star;
        if (is(Y::interior, X::crossing)) return "IV" + sub + star;
        if (is(Y::touches_minus, X::two_components)) return "I" + sub + "^a";
        break;
    }
    return "unlabeled";
}

} // namespace detail

/**
 * Allowed x- and y-intervals at (E, K), with a region name.
 *
 * The intervals are in the frame of the given charges. Region names assume
 * Z- >= 0 and are looked up in the relabeled frame (y -> -y).
 */
inline RegionClassification classify(const EnergyMomentum& em, const ChargeConfig& c)
{
    if (em.e < 0.0) throw OutOfScope("negative energies are not classified");
    constexpr double inf = std::numeric_limits<double>::infinity();

    const MotionPolynomial px = motion_polynomial(Branch::plus, em, c);
    const MotionPolynomial py = motion_polynomial(Branch::minus, em, c);
    const MovableRoots rx = movable_roots(em, Branch::plus, c);
    const MovableRoots ry = movable_roots(em, Branch::minus, c);

    RegionClassification out;
    out.x_intervals = detail::allowed_intervals(px, rx, 1.0, inf, +1.0);
    out.y_intervals = detail::allowed_intervals(py, ry, -1.0, 1.0, -1.0);
    out.pattern = detail::pattern_of("x", out.x_intervals, rx) + ";" + detail::pattern_of("y", out.y_intervals, ry);
    out.bounded_component = std::any_of(out.x_intervals.begin(), out.x_intervals.end(),
                                        [](const Interval& i) { return i.bounded(); });
    if (out.forbidden()) {
        out.label = "forbidden";
        out.bounded_component = false;
        return out;
    }
    if (auto curves = in_bifurcation_set(em, c)) {
        out.on_curves = *curves;
        out.label = "boundary";
        return out;
    }

    std::vector<Interval> y_canonical = out.y_intervals;
    if (!c.is_canonical()) {
        for (auto& iv : y_canonical) iv = {-iv.hi, -iv.lo};
        std::reverse(y_canonical.begin(), y_canonical.end());
    }
    out.label = detail::region_label(charge_case(c), c.z_plus(), em.k, detail::x_shape(out.x_intervals),
                                     detail::y_shape(y_canonical));
    return out;
}

} // namespace twocenters

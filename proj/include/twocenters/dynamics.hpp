#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "bifurcation.hpp"
#include "charges.hpp"
#include "coords.hpp"
#include "errors.hpp"
#include "integrator.hpp"
#include "parallel.hpp"
#include "separation.hpp"

namespace twocenters {

// Motion is integrated in fictitious time s (dt/ds = F) as the two decoupled
// flows of H_xi and H_eta on the extended strip xi in R, eta in R. Turning
// points and crossings of the q1-axis are regular points there: the sheet
// change through the segment between the centers is xi -> -xi, the crossing
// of the outer axis is eta passing 0 or pi.

struct IntegrationOptions {
    double s_max = 100.0;
    /// Local error tolerance of the adaptive stepper (absolute + relative).
    double step_tol = 1e-10;
    /// Integration stops once x = cosh(xi) exceeds this value.
    double x_escape = 1e3;
    /// Integration stops when the distance to a center drops below this value.
    double collision_radius = 1e-8;
    double initial_step = 1e-3;
    std::size_t max_steps = 20'000'000;
};

enum class EventKind { x_turning, y_turning, axis_crossing, section_hit, collision_stop };

inline const char* to_string(EventKind k) noexcept
{
    switch (k) {
    case EventKind::x_turning: return "x_turning";
    case EventKind::y_turning: return "y_turning";
    case EventKind::axis_crossing: return "axis_crossing";
    case EventKind::section_hit: return "section_hit";
    case EventKind::collision_stop: return "collision_stop";
    }
    return "?";
}

struct Event {
    double s = 0.0;
    EventKind kind = EventKind::x_turning;
};

enum class Termination { s_max, escape, collision };

inline const char* to_string(Termination t) noexcept
{
    switch (t) {
    case Termination::s_max: return "s_max";
    case Termination::escape: return "escape";
    case Termination::collision: return "collision";
    }
    return "?";
}

struct Sample {
    double s = 0.0;
    double t = 0.0;
    EllipticState elliptic;
    /// x = cosh(xi), y = cos(eta); momenta are NaN on the q1-axis.
    SeparatedState separated;
    /// Momenta are NaN at a center.
    CartesianState cartesian;
    double e_drift = 0.0;
    double k_drift = 0.0;
};

/// Which one-degree-of-freedom flow is held at its fixed point (special axis orbits).
struct FrozenFlows {
    bool xi = false;
    bool eta = false;
};

struct Trajectory {
    ChargeConfig charges{1.0, 1.0};
    EnergyMomentum em;
    FrozenFlows frozen;
    std::vector<Sample> samples;
    std::vector<Event> events;
    Termination termination = Termination::s_max;

    double max_e_drift() const noexcept
    {
        double m = 0.0;
        for (const auto& s : samples) {
            if (std::isfinite(s.e_drift)) m = std::max(m, s.e_drift);
        }
        return m;
    }

    double max_k_drift() const noexcept
    {
        double m = 0.0;
        for (const auto& s : samples) m = std::max(m, s.k_drift);
        return m;
    }

    double max_x() const noexcept
    {
        double m = 1.0;
        for (const auto& s : samples) m = std::max(m, s.separated.x);
        return m;
    }
};

namespace detail {

using FlowState = std::array<double, 4>; // xi, p_xi, eta, p_eta

/// Vector field of H_xi + H_eta at fixed energy e.
struct SeparatedFlow {
    double e;
    double z_plus;
    double z_minus;
    FrozenFlows frozen;

    FlowState operator()(const FlowState& u) const noexcept
    {
        FlowState d{};
        if (!frozen.xi) {
            d[0] = u[1];
            d[1] = std::sinh(u[0]) * (z_plus + 2.0 * e * std::cosh(u[0]));
        }
        if (!frozen.eta) {
            d[2] = u[3];
            d[3] = std::sin(u[2]) * (z_minus + 2.0 * e * std::cos(u[2]));
        }
        return d;
    }
};

inline SeparatedFlow flow_of(const Trajectory& tr)
{
    return {tr.em.e, tr.charges.z_plus(), tr.charges.z_minus(), tr.frozen};
}

inline FlowState pack(const EllipticState& s) noexcept { return {s.xi, s.p_xi, s.eta, s.p_eta}; }

inline EllipticState unpack(const FlowState& u) noexcept { return {u[0], u[2], u[1], u[3]}; }

using Stepper = DormandPrince<4>;

inline FlowState advance(const SeparatedFlow& f, const FlowState& u, double h)
{
    return h == 0.0 ? u : Stepper::step(f, u, h).value;
}

inline double min_center_distance(const FlowState& u) noexcept
{
    const auto [r1, r2] = focus_distances(u[0], u[2]);
    return std::min(r1, r2);
}

/**
 * Step length in (0, h) where the path u -> v passes closest to a center, or -1.
 * Centers sit at (xi, eta) = (0, n pi); endpoint checks alone miss a path that
 * runs straight through one within a single step.
 */
inline double grazing_step(const SeparatedFlow& f, const FlowState& u, const FlowState& v, double h,
                           double collision_radius)
{
    const double dx = v[0] - u[0];
    const double de = v[2] - u[2];
    const double len2 = dx * dx + de * de;
    if (len2 == 0.0) return -1.0;
    const double eta_c = kPi * std::round(0.5 * (u[2] + v[2]) / kPi);
    const double t = -(u[0] * dx + (u[2] - eta_c) * de) / len2;
    if (!(t > 0.0 && t < 1.0)) return -1.0;
    const double gap = std::hypot(u[0] + t * dx, u[2] - eta_c + t * de);
    if (gap > std::sqrt(len2) + 10.0 * std::sqrt(2.0 * collision_radius)) return -1.0;
    // Golden-section search for the minimum distance along the actual path.
    constexpr double g = 0.6180339887498949;
    double a = 0.0;
    double b = h;
    double c = b - g * (b - a);
    double d = a + g * (b - a);
    double fc = min_center_distance(advance(f, u, c));
    double fd = min_center_distance(advance(f, u, d));
    for (int it = 0; it < 80 && b - a > 1e-14 * (1.0 + h); ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = min_center_distance(advance(f, u, c));
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = min_center_distance(advance(f, u, d));
        }
    }
    return fc < fd ? c : d;
}

inline SeparatedState separated_no_throw(const EllipticState& s) noexcept
{
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    const EllipticState c = s.xi < 0.0 ? involution(s) : s;
    const double sh = std::sinh(c.xi);
    const double sn = std::sin(c.eta);
    return {std::cosh(c.xi), std::cos(c.eta), sh != 0.0 ? c.p_xi / sh : nan, sn != 0.0 ? c.p_eta / sn : nan,
            s.sheet()};
}

inline CartesianState cartesian_no_throw(const EllipticState& s) noexcept
{
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    const auto [q1, q2] = elliptic_to_cartesian(s.xi, s.eta);
    const double f = jacobian_F(s.xi, s.eta);
    if (f == 0.0) return {q1, q2, nan, nan};
    const double a = std::sinh(s.xi) * std::cos(s.eta);
    const double b = std::cosh(s.xi) * std::sin(s.eta);
    return {q1, q2, (a * s.p_xi - b * s.p_eta) / f, (b * s.p_xi + a * s.p_eta) / f};
}

inline Sample make_sample(double s, const FlowState& u, const ChargeConfig& c, const EnergyMomentum& em0)
{
    Sample out;
    out.s = s;
    out.elliptic = unpack(u);
    out.separated = separated_no_throw(out.elliptic);
    out.cartesian = cartesian_no_throw(out.elliptic);
    const double f = jacobian_F(u[0], u[2]);
    double e = em0.e;
    if (f >= 1e-8) {
        e = (h1(u[1], u[0], c) + h2(u[3], u[2], c)) / f;
        out.e_drift = scaled_gap(e, em0.e);
    } else {
        out.e_drift = std::numeric_limits<double>::quiet_NaN();
    }
    out.k_drift = scaled_gap(dual_k(out.elliptic, e, c).best(), em0.k);
    return out;
}

/// Smallest h in (0, h_max] where g(advance(u, h)) has left the sign of g(u); bisection.
template <typename G>
double locate_sign_change(const SeparatedFlow& f, const FlowState& u, double h_max, G&& g, double s_tol = 1e-13)
{
    const bool start_positive = g(u) > 0.0;
    double lo = 0.0;
    double hi = h_max;
    for (int it = 0; it < 200 && hi - lo > s_tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        if ((g(advance(f, u, mid)) > 0.0) == start_positive) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return hi;
}

inline bool crosses(double g0, double g1, double noise = 0.0) noexcept
{
    if (std::max(std::abs(g0), std::abs(g1)) <= noise) return false;
    return (g0 > 0.0 && g1 <= 0.0) || (g0 < 0.0 && g1 >= 0.0);
}

struct EventProbe {
    EventKind kind;
    double (*g)(const FlowState&);
    bool needs_xi;
    bool needs_eta;
};

inline constexpr std::array<EventProbe, 4> kEventProbes{{
    {EventKind::x_turning, [](const FlowState& u) { return u[1]; }, true, false},
    {EventKind::y_turning, [](const FlowState& u) { return u[3]; }, false, true},
    {EventKind::axis_crossing, [](const FlowState& u) { return u[0]; }, true, false},
    {EventKind::axis_crossing, [](const FlowState& u) { return std::sin(u[2]); }, false, true},
}};

/// Larger corrections are left in place so that a poor step tolerance stays visible as drift.
inline constexpr double kProjectionTrust = 1e-6;

/// Rescales |p_xi| and |p_eta| onto H_xi = K, H_eta = -K. Recomputing E = (H1 + H2) / F
/// divides the accumulated defect by F, which is tiny next to a center.
inline void project_to_level(FlowState& u, const SeparatedFlow& f, double k) noexcept
{
    auto fix = [](double& p, double target_sq) {
        if (!(target_sq > 0.0)) return;
        const double q = std::copysign(std::sqrt(target_sq), p);
        if (std::abs(q - p) <= kProjectionTrust * (1.0 + std::abs(p))) p = q;
    };
    if (!f.frozen.xi) {
        const double ch = std::cosh(u[0]);
        fix(u[1], 2.0 * (k + f.z_plus * ch + f.e * ch * ch));
    }
    if (!f.frozen.eta) {
        const double cs = std::cos(u[2]);
        fix(u[3], 2.0 * (-k - f.z_minus * cs - f.e * cs * cs));
    }
}

/// Momentum sign changes below this level are rounding noise around an equilibrium.
inline constexpr double kEventNoise = 1e-12;

inline Trajectory run(const FlowState& u0, const ChargeConfig& c, const EnergyMomentum& em0, FrozenFlows frozen,
                      const IntegrationOptions& opt, bool stop_on_collision)
{
    if (!(opt.s_max >= 0.0) || !(opt.step_tol > 0.0) || !(opt.initial_step > 0.0)) {
        throw DomainError("integration options need s_max >= 0 and positive tolerances");
    }
    Trajectory tr{c, em0, frozen, {}, {}, Termination::s_max};
    const SeparatedFlow f = flow_of(tr);
    const double xi_escape = std::acosh(opt.x_escape);

    FlowState u = u0;
    double s = 0.0;
    double h = std::min(opt.initial_step, opt.s_max);
    tr.samples.push_back(make_sample(0.0, u, c, em0));
    if (stop_on_collision && min_center_distance(u) < opt.collision_radius) {
        tr.termination = Termination::collision;
        tr.events.push_back({0.0, EventKind::collision_stop});
        return tr;
    }

    std::size_t steps = 0;
    while (s < opt.s_max) {
        if (++steps > opt.max_steps) throw IntegrationFailure("step budget exhausted at s=" + std::to_string(s));
        h = std::min(h, opt.s_max - s);
        const auto st = Stepper::step(f, u, h);
        const double err = Stepper::error_norm(u, st, opt.step_tol);
        const bool finite = std::all_of(st.value.begin(), st.value.end(), [](double v) { return std::isfinite(v); });
        if (!finite || !(err <= 1.0)) {
            h *= finite ? std::max(0.1, 0.9 * std::pow(err, -0.2)) : 0.25;
            if (h < 1e-14 * (1.0 + s)) throw IntegrationFailure("step size underflow at s=" + std::to_string(s));
            continue;
        }

        FlowState next = st.value;
        double h_taken = h;
        std::optional<Termination> stop;

        // Truncate the step at escape or collision.
        if (std::abs(next[0]) > xi_escape) {
            h_taken = locate_sign_change(f, u, h, [&](const FlowState& v) { return xi_escape - std::abs(v[0]); });
            stop = Termination::escape;
        }
        if (stop_on_collision) {
            auto gap = [&](const FlowState& v) { return min_center_distance(v) - opt.collision_radius; };
            const FlowState probe = h_taken == h ? next : advance(f, u, h_taken);
            double reach = h_taken;
            if (gap(probe) >= 0.0) {
                const double hm = grazing_step(f, u, probe, h_taken, opt.collision_radius);
                reach = hm > 0.0 && gap(advance(f, u, hm)) < 0.0 ? hm : -1.0;
            }
            if (reach > 0.0) {
                h_taken = locate_sign_change(f, u, reach, gap);
                stop = Termination::collision;
            }
        }
        if (h_taken != h) next = advance(f, u, h_taken);

        std::vector<Event> found;
        for (const auto& probe : kEventProbes) {
            if ((probe.needs_xi && frozen.xi) || (probe.needs_eta && frozen.eta)) continue;
            if (!crosses(probe.g(u), probe.g(next), kEventNoise)) continue;
            const double at = locate_sign_change(f, u, h_taken, probe.g);
            found.push_back({s + at, probe.kind});
        }
        std::sort(found.begin(), found.end(), [](const Event& a, const Event& b) { return a.s < b.s; });
        tr.events.insert(tr.events.end(), found.begin(), found.end());

        project_to_level(next, f, em0.k);
        s = (h_taken == h && s + h >= opt.s_max) ? opt.s_max : s + h_taken;
        u = next;
        tr.samples.push_back(make_sample(s, u, c, em0));
        if (stop) {
            tr.termination = *stop;
            if (*stop == Termination::collision) tr.events.push_back({s, EventKind::collision_stop});
            break;
        }
        h *= std::min(5.0, 0.9 * std::pow(std::max(err, 1e-10), -0.2));
    }
    return tr;
}

} // namespace detail

enum class QuadratureRule { trapezoid, midpoint, simpson };

/**
 * Fills t(s) = integral of F along the path, t(0) = 0.
 *
 * Each sample interval is split into `subdivisions` pieces whose states are
 * recomputed by single steps from the left sample.
 */
inline void physical_time(Trajectory& tr, QuadratureRule rule = QuadratureRule::simpson, int subdivisions = 8)
{
    if (tr.samples.empty()) return;
    const auto f = detail::flow_of(tr);
    auto jac = [](const detail::FlowState& u) { return jacobian_F(u[0], u[2]); };
    const int n = std::max(1, subdivisions);
    tr.samples[0].t = 0.0;
    for (std::size_t i = 0; i + 1 < tr.samples.size(); ++i) {
        const detail::FlowState u = detail::pack(tr.samples[i].elliptic);
        const double ds = tr.samples[i + 1].s - tr.samples[i].s;
        const double d = ds / n;
        double trap = 0.0;
        double mid = 0.0;
        double left = jac(u);
        for (int j = 0; j < n; ++j) {
            const double right = j + 1 == n ? jac(detail::pack(tr.samples[i + 1].elliptic))
                                            : jac(detail::advance(f, u, (j + 1) * d));
            trap += 0.5 * (left + right) * d;
            if (rule != QuadratureRule::trapezoid) mid += jac(detail::advance(f, u, (j + 0.5) * d)) * d;
            left = right;
        }
        double dt = trap;
        if (rule == QuadratureRule::midpoint) dt = mid;
        if (rule == QuadratureRule::simpson) dt = (trap + 2.0 * mid) / 3.0;
        tr.samples[i + 1].t = tr.samples[i].t + dt;
    }
}

/// Integrates from a phase-space point on the extended elliptic strip.
inline Trajectory integrate(const EllipticState& initial, const ChargeConfig& c, const IntegrationOptions& opt = {})
{
    const double e = energy_of(initial, c);
    if (e < 0.0) throw NonPositiveEnergy("trajectory integration needs E >= 0, got E=" + std::to_string(e));
    const EnergyMomentum em = energy_momentum_map(initial, c);
    Trajectory tr = detail::run(detail::pack(initial), c, em, {}, opt, true);
    physical_time(tr);
    return tr;
}

/// Integrates a Cartesian initial condition; E and K are taken from the energy-momentum map.
inline Trajectory integrate(const CartesianState& initial, const ChargeConfig& c, const IntegrationOptions& opt = {})
{
    const EnergyMomentum em = energy_momentum_map(initial, c);
    if (em.e < 0.0) throw NonPositiveEnergy("trajectory integration needs E >= 0, got E=" + std::to_string(em.e));
    Trajectory tr = detail::run(detail::pack(to_elliptic(initial)), c, em, {}, opt, true);
    physical_time(tr);
    return tr;
}

/// Integrates many initial conditions concurrently.
inline std::vector<Trajectory> integrate_batch(const std::vector<CartesianState>& initial, const ChargeConfig& c,
                                               const IntegrationOptions& opt = {},
                                               unsigned threads = default_thread_count())
{
    std::vector<Trajectory> out(initial.size());
    parallel_for(initial.size(), threads, [&](std::size_t i) { out[i] = integrate(initial[i], c, opt); });
    return out;
}

/**
 * Phase-space point on the level set (E, K) at separated position (x, y).
 *
 * Momentum signs are chosen by px_sign / py_sign. Throws DomainError if the
 * point is classically forbidden.
 */
inline EllipticState state_on_level(const EnergyMomentum& em, const ChargeConfig& c, double x, double y,
                                    double px_sign = 1.0, double py_sign = 1.0, Sheet sheet = Sheet::upper)
{
    const double px2 = momentum_squared(x, Branch::plus, em, c);
    const double py2 = momentum_squared(y, Branch::minus, em, c);
    if (!(px2 >= 0.0) || !(py2 >= 0.0) || !std::isfinite(px2) || !std::isfinite(py2)) {
        throw DomainError("(x, y) = (" + std::to_string(x) + ", " + std::to_string(y) +
                          ") is not an interior allowed point of the level set");
    }
    const SeparatedState sep{x, y, std::copysign(std::sqrt(px2), px_sign), std::copysign(std::sqrt(py2), py_sign),
                             sheet};
    return separated_to_elliptic(sep);
}

/**
 * Orbit on the segment between the centers, x = 1 for all s, existing for
 * (E, K) on the line K = -Z+ - E. Collisions with the centers are passed
 * through (regularized bounce).
 */
inline Trajectory interfocal_orbit(const ChargeConfig& c, double e, const IntegrationOptions& opt = {})
{
    if (e < 0.0) throw NonPositiveEnergy("special orbits are built for E >= 0");
    const EnergyMomentum em{e, -c.z_plus() - e};
    const auto cls = classify(em, c);
    const auto y_it = std::find_if(cls.y_intervals.begin(), cls.y_intervals.end(),
                                   [](const Interval& iv) { return !iv.degenerate(); });
    if (y_it == cls.y_intervals.end()) throw DomainError("no motion along the segment at this energy");
    const double eta = std::acos(0.5 * (y_it->lo + y_it->hi));
    const double p_eta2 = 2.0 * (-em.k - potential_v_eta(eta, e, c));
    const EllipticState s0{0.0, eta, 0.0, std::sqrt(std::max(0.0, p_eta2))};
    Trajectory tr = detail::run(detail::pack(s0), c, em, {true, false}, opt, false);
    physical_time(tr);
    return tr;
}

enum class AxisSide { negative, positive };

/**
 * Orbit on the q1-axis outside the centers: y = -1 (q1 < -1, K = Z- - E) or
 * y = +1 (q1 > 1, K = -Z- - E). The particle falls into the center and is
 * reflected back.
 */
inline Trajectory axis_orbit(const ChargeConfig& c, double e, AxisSide side, const IntegrationOptions& opt = {})
{
    if (e < 0.0) throw NonPositiveEnergy("special orbits are built for E >= 0");
    const bool neg = side == AxisSide::negative;
    const EnergyMomentum em{e, neg ? c.z_minus() - e : -c.z_minus() - e};
    const auto cls = classify(em, c);
    const auto x_it = std::find_if(cls.x_intervals.begin(), cls.x_intervals.end(),
                                   [](const Interval& iv) { return !iv.degenerate(); });
    if (x_it == cls.x_intervals.end()) throw DomainError("no motion along the axis at this energy");
    const double x0 = x_it->bounded() ? 0.5 * (x_it->lo + x_it->hi) : x_it->lo + 1.0;
    const double xi = std::acosh(x0);
    const double p_xi2 = 2.0 * (em.k - potential_v_xi(xi, e, c));
    const EllipticState s0{xi, neg ? kPi : 0.0, -std::sqrt(std::max(0.0, p_xi2)), 0.0};
    Trajectory tr = detail::run(detail::pack(s0), c, em, {false, true}, opt, false);
    physical_time(tr);
    return tr;
}

enum class SectionKind { inter_focal_segment, outer_axis_segment };

inline const char* to_string(SectionKind k) noexcept
{
    return k == SectionKind::inter_focal_segment ? "inter_focal_segment" : "outer_axis_segment";
}

/// A piece of the q1-axis; clip is the admitted q1 range.
struct SectionSpec {
    SectionKind kind = SectionKind::inter_focal_segment;
    Interval clip{-1.0, 1.0};
};

/**
 * Transversal section crossed by the motion at (E, K).
 *
 * Orbits whose x-range reaches 1 cross the segment between the centers, provided
 * y does not cover all of [-1, 1]; orbits kept at x >= x4 > 1 whose y-interval
 * touches exactly one of y = -1, y = +1 cross the q1-axis beyond that center.
 * With two x-components the section belongs to the one starting at x = 1.
 */
inline SectionSpec choose_section(const EnergyMomentum& em, const ChargeConfig& c, double x_escape = 1e3)
{
    if (in_bifurcation_set(em, c)) throw OnBifurcationCurve("(E, K) lies on a bifurcation curve");
    const auto cls = classify(em, c);
    if (cls.forbidden()) throw NoSectionRule("(E, K) is outside the Hill region");
    if (cls.y_intervals.size() != 1) throw NoSectionRule("y-motion has no single allowed interval");
    const Interval y = cls.y_intervals.front();
    const double x_lo = cls.x_intervals.front().lo;
    const bool touches_minus = y.lo == -1.0;
    const bool touches_plus = y.hi == 1.0;
    if (x_lo == 1.0 && !(touches_minus && touches_plus)) {
        return {SectionKind::inter_focal_segment, y};
    }
    if (x_lo > 1.0 && touches_minus != touches_plus) {
        if (touches_minus) return {SectionKind::outer_axis_segment, {-x_escape, -x_lo}};
        return {SectionKind::outer_axis_segment, {x_lo, x_escape}};
    }
    throw NoSectionRule("no section rule for interval pattern " + cls.pattern);
}

struct SectionHit {
    double s = 0.0;
    /// Crossing point on the q1-axis.
    double q1 = 0.0;
    double p1 = 0.0;
    double p2 = 0.0;
};

/// Crossings of the section, located by bisection on the signed distance to the axis.
inline std::vector<SectionHit> poincare_hits(const Trajectory& tr, const SectionSpec& section)
{
    const auto f = detail::flow_of(tr);
    const bool inter = section.kind == SectionKind::inter_focal_segment;
    auto g = [inter](const detail::FlowState& u) { return inter ? u[0] : std::sin(u[2]); };

    std::vector<SectionHit> hits;
    for (std::size_t i = 0; i + 1 < tr.samples.size(); ++i) {
        const detail::FlowState u = detail::pack(tr.samples[i].elliptic);
        const detail::FlowState v = detail::pack(tr.samples[i + 1].elliptic);
        if (!detail::crosses(g(u), g(v))) continue;
        const double ds = tr.samples[i + 1].s - tr.samples[i].s;
        const double at = detail::locate_sign_change(f, u, ds, g, 1e-12);
        const detail::FlowState w = at >= ds ? v : detail::advance(f, u, at);
        const CartesianState cs = detail::cartesian_no_throw(detail::unpack(w));
        const bool on_segment = inter ? std::abs(cs.q1) < 1.0 : std::abs(cs.q1) > 1.0;
        if (!on_segment || !section.clip.contains(cs.q1)) continue;
        hits.push_back({tr.samples[i].s + at, cs.q1, cs.p1, cs.p2});
    }
    return hits;
}

/// Adds section_hit events for the given crossings, keeping events ordered by s.
inline void record_section_hits(Trajectory& tr, const std::vector<SectionHit>& hits)
{
    for (const auto& h : hits) tr.events.push_back({h.s, EventKind::section_hit});
    std::stable_sort(tr.events.begin(), tr.events.end(), [](const Event& a, const Event& b) { return a.s < b.s; });
}

enum class Boundedness { Bounded, Scattering };

inline const char* to_string(Boundedness b) noexcept { return b == Boundedness::Bounded ? "Bounded" : "Scattering"; }

struct BoundednessReport {
    Boundedness verdict = Boundedness::Scattering;
    /// Integration run used for the cross-check.
    Termination termination = Termination::s_max;
    double max_x = 1.0;
};

/**
 * Bounded iff the x-component is a finite interval. The verdict is
 * cross-checked by integrating from inside the component over s in [0, s_max];
 * disagreement throws IntegratorDefect.
 */
inline BoundednessReport detect_boundedness(const EnergyMomentum& em, const ChargeConfig& c, const Interval& component,
                                            double s_max = 1e3)
{
    const auto cls = classify(em, c);
    if (std::find(cls.x_intervals.begin(), cls.x_intervals.end(), component) == cls.x_intervals.end()) {
        throw DomainError("component is not one of the allowed x-intervals at (E, K)");
    }
    if (component.degenerate()) throw DomainError("component has no interior");
    const auto y_it = std::find_if(cls.y_intervals.begin(), cls.y_intervals.end(),
                                   [](const Interval& iv) { return !iv.degenerate(); });
    if (y_it == cls.y_intervals.end()) throw DomainError("y-motion has no interior");

    BoundednessReport rep;
    rep.verdict = component.bounded() ? Boundedness::Bounded : Boundedness::Scattering;
    const double x0 = component.bounded() ? 0.5 * (component.lo + component.hi) : component.lo + 1.0;

    IntegrationOptions opt;
    opt.s_max = s_max;
    // A start that happens to run into a center is retried at other y.
    for (double frac : {0.5, 0.3, 0.7, 0.15, 0.85}) {
        const double y0 = y_it->lo + frac * (y_it->hi - y_it->lo);
        const Trajectory tr = integrate(state_on_level(em, c, x0, y0), c, opt);
        rep.termination = tr.termination;
        rep.max_x = tr.max_x();
        if (tr.termination == Termination::collision) continue;
        const bool contained = tr.termination == Termination::s_max && rep.max_x <= component.hi + 1e-6;
        const bool escaped = tr.termination == Termination::escape;
        if (rep.verdict == Boundedness::Bounded && !contained) {
            throw IntegratorDefect("bounded component left by integration, max x=" + std::to_string(rep.max_x));
        }
        if (rep.verdict == Boundedness::Scattering && !escaped) {
            throw IntegratorDefect("unbounded component did not escape within s=" + std::to_string(s_max));
        }
        return rep;
    }
    throw IntegratorDefect("every cross-check run ended in a collision");
}

} // namespace twocenters

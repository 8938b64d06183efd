#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "bifurcation.hpp"
#include "charges.hpp"
#include "coords.hpp"
#include "dynamics.hpp"
#include "parallel.hpp"
#include "separation.hpp"

namespace twocenters {

struct CheckResult {
    int id = 0;
    std::string name;
    bool passed = false;
    /// Worst measured value and the bound it is compared against.
    double measured = 0.0;
    double tolerance = 0.0;
    std::string detail;
    double seconds = 0.0;
    double budget_seconds = 0.0;
};

struct VerifyOptions {
    /// (z1, z2) pairs the suite runs on.
    std::vector<ChargeConfig> presets = default_presets();
    double step_tol = 1e-10;
    std::uint64_t seed = 20240611;
    unsigned threads = default_thread_count();
    /// Checks exceeding their time budget fail.
    bool enforce_budgets = true;

    static std::vector<ChargeConfig> default_presets()
    {
        return {{1.0, 1.0}, {-1.0, -1.0}, {-1.0, 1.0}, {1.0, 2.0}, {1.0, 3.0}, {-1.0, 0.5}};
    }
};

namespace verify_detail {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline std::string format_double(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

inline std::string describe(const ChargeConfig& c)
{
    return "(" + format_double(c.z1()) + "," + format_double(c.z2()) + ")";
}

/// Random physical state with E in (0, e_max]; q in a box, away from the centers.
inline CartesianState random_state(Rng& rng, const ChargeConfig& c, double box, double e_max, double min_dist = 1e-3)
{
    for (;;) {
        const double q1 = uniform(rng, -box, box);
        const double q2 = uniform(rng, -box, box);
        const auto [r1, r2] = center_distances(q1, q2);
        if (std::min(r1, r2) < min_dist) continue;
        const double v = -c.z1() / r1 - c.z2() / r2;
        const double e = uniform(rng, 0.0, e_max);
        if (e <= 0.0 || e < v) continue;
        const double p = std::sqrt(2.0 * (e - v));
        const double ang = uniform(rng, -kPi, kPi);
        return {q1, q2, p * std::cos(ang), p * std::sin(ang)};
    }
}

/// Curve list per charge signs, written out case by case.
inline CurveSet expected_curves(double zp, double zm)
{
    using enum CurveId;
    if (zm == 0.0) return {L0, Lm1, Lp2};
    if (zp < 0.0 && std::abs(zp) < std::abs(zm)) return {L0, Lm1, Lm2, Lm3, Lp2, Lp3};
    return {L0, Lm1, Lm2, Lm3, Lp2};
}

inline Branch branch_of(CurveId id) { return to_string(id)[1] == 'p' ? Branch::plus : Branch::minus; }

template <typename Fn>
CheckResult timed(int id, std::string name, double tolerance, double budget, Fn&& fn)
{
    CheckResult r;
    r.id = id;
    r.name = std::move(name);
    r.tolerance = tolerance;
    r.budget_seconds = budget;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        fn(r);
    } catch (const std::exception& e) {
        r.passed = false;
        r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

} // namespace verify_detail

/// 1. Curve lists per charge case.
inline CheckResult check_curve_sets(const VerifyOptions& opt)
{
    return verify_detail::timed(1, "curve_set", 0.0, 1.0, [&](CheckResult& r) {
        int mismatches = 0;
        for (const auto& c : opt.presets) {
            const CurveSet expected = verify_detail::expected_curves(c.z_plus(), c.z_minus());
            const CurveSet got = bifurcation_curve_set(c);
            const bool lp3_rule = got.count(CurveId::Lp3) == (charge_case(c) == ChargeCase::OppositeSignPlusNegative);
            if (got != expected || !lp3_rule || got.count(CurveId::Lp1)) {
                ++mismatches;
                r.detail += "mismatch at " + verify_detail::describe(c) + "; ";
            }
        }
        r.measured = mismatches;
        r.passed = mismatches == 0;
        if (r.detail.empty()) r.detail = std::to_string(opt.presets.size()) + " presets";
    });
}

/// 2. Discriminant on 1e3 points of every curve inside the Hill region.
inline CheckResult check_discriminant(const VerifyOptions& opt)
{
    return verify_detail::timed(2, "discriminant", 1e-9, 1.0, [&](CheckResult& r) {
        verify_detail::Rng rng(opt.seed + 2);
        double worst = 0.0;
        std::size_t points = 0;
        for (const auto& c : opt.presets) {
            for (CurveId id : bifurcation_curve_set(c)) {
                if (id == CurveId::L0) continue;
                const Branch b = verify_detail::branch_of(id);
                const double z = branch_strength(b, c);
                // Lm1 leaves the Hill region at E = |Z-| / 2 and Lp3 ends at E = |Z+| / 2.
                double e_hi = 10.0;
                if (id == CurveId::Lm1 && c.z_minus() != 0.0) e_hi = 0.5 * std::abs(c.z_minus());
                if (id == CurveId::Lp3) e_hi = 0.5 * std::abs(c.z_plus());
                int kept = 0;
                for (int tries = 0; kept < 1000 && tries < 100000; ++tries) {
                    const double e = verify_detail::uniform(rng, 0.0, e_hi);
                    const auto k = bifurcation_k(id, e, c);
                    if (e <= 0.0 || !k) continue;
                    worst = std::max(worst, std::abs(discriminant({e, *k}, b, c)) / (1.0 + std::pow(std::abs(z), 6)));
                    ++kept;
                }
                points += kept;
                if (kept < 1000) r.detail += std::string("few points on ") + to_string(id) + "; ";
            }
        }
        r.measured = worst;
        r.passed = worst <= r.tolerance && r.detail.empty();
        r.detail += std::to_string(points) + " curve points";
    });
}

/// 3. K+(E) <= K <= K-(E) on random physical states.
inline CheckResult check_hill_bounds(const VerifyOptions& opt)
{
    return verify_detail::timed(3, "hill_bounds", 1e-10, 5.0, [&](CheckResult& r) {
        double worst = 0.0;
        for (std::size_t p = 0; p < opt.presets.size(); ++p) {
            const auto& c = opt.presets[p];
            verify_detail::Rng rng(opt.seed + 3 + 1000 * p);
            for (int i = 0; i < 10000; ++i) {
                const CartesianState s = verify_detail::random_state(rng, c, 5.0, 5.0);
                if (std::abs(s.q2) < 1e-6) continue;
                const EnergyMomentum em = energy_momentum_map(s, c);
                const double scale = std::max(1.0, std::abs(em.k));
                const double over = (em.k - k_minus(em.e, c)) / scale;
                const double under = (k_plus(em.e, c) - em.k) / scale;
                worst = std::max({worst, over, under});
            }
        }
        r.measured = worst;
        r.passed = worst <= r.tolerance;
        r.detail = "max violation (scaled); 1e4 states per preset";
    });
}

/// 4. The two closed forms of K agree on random states off the axis.
inline CheckResult check_dual_k(const VerifyOptions& opt)
{
    return verify_detail::timed(4, "dual_k", 1e-10, 5.0, [&](CheckResult& r) {
        verify_detail::Rng rng(opt.seed + 4);
        double worst = 0.0;
        for (int i = 0; i < 10000; ++i) {
            const auto& c = opt.presets[static_cast<std::size_t>(i) % opt.presets.size()];
            const CartesianState s = verify_detail::random_state(rng, c, 5.0, 5.0);
            const EllipticState es = to_elliptic(s);
            if (jacobian_F(es.xi, es.eta) < 1e-6) continue;
            const DualK d = dual_k(es, hamiltonian(s, c), c);
            worst = std::max(worst, std::abs(d.k_xi - d.k_eta) / std::max({1.0, std::abs(d.k_xi), std::abs(d.k_eta)}));
        }
        r.measured = worst;
        r.passed = worst <= r.tolerance;
        r.detail = "max relative gap over 1e4 states";
    });
}

/// Pattern changes along K at fixed E, each located by bisection.
inline std::vector<double> pattern_changes(const ChargeConfig& c, double e, double k_lo, double k_hi, int steps = 4000)
{
    auto pattern = [&](double k) { return classify({e, k}, c).pattern; };
    // Off-grid nodes: a node falling exactly on a curve would show a one-point pattern.
    const double h = (k_hi - k_lo) / steps;
    auto node = [&](int i) { return k_lo + (i + 0.381966011250105) * h; };
    std::vector<double> out;
    double prev_k = node(0);
    std::string prev = pattern(prev_k);
    for (int i = 1; i < steps; ++i) {
        const double k = node(i);
        std::string cur = pattern(k);
        if (cur != prev) {
            double a = prev_k;
            double b = k;
            while (b - a > 0.0) {
                const double mid = 0.5 * (a + b);
                if (mid <= a || mid >= b) break;
                (pattern(mid) == prev ? a : b) = mid;
            }
            out.push_back(0.5 * (a + b));
        }
        prev = cur;
        prev_k = k;
    }
    return out;
}

/// 5. Along E = 3 and E = 0.1 the interval pattern changes exactly at the curve values and at K-(E).
inline CheckResult check_region_walks(const VerifyOptions& opt)
{
    return verify_detail::timed(5, "region_walk", 1e-12, 1.0, [&](CheckResult& r) {
        double worst = 0.0;
        bool ok = true;
        std::size_t walks = 0;
        for (const auto& c : opt.presets) {
          for (double e : {3.0, 0.1}) {
            ++walks;
            std::vector<double> predicted{k_minus(e, c)};
            for (CurveId id : bifurcation_curve_set(c)) {
                if (const auto k = bifurcation_k(id, e, c)) predicted.push_back(*k);
            }
            std::sort(predicted.begin(), predicted.end());
            predicted.erase(std::unique(predicted.begin(), predicted.end(),
                                        [](double a, double b) { return std::abs(a - b) < 1e-9; }),
                            predicted.end());
            const double k_lo = predicted.front() - 3.0;
            const double k_hi = predicted.back() + 1.0;
            const auto found = pattern_changes(c, e, k_lo, k_hi);
            if (found.size() != predicted.size()) {
                ok = false;
                r.detail += verify_detail::describe(c) + " at E=" + verify_detail::format_double(e) + ": " +
                            std::to_string(found.size()) + " changes vs " +
                            std::to_string(predicted.size()) + " curves; ";
                continue;
            }
            for (std::size_t i = 0; i < found.size(); ++i) {
                worst = std::max(worst, std::abs(found[i] - predicted[i]) / std::max(1.0, std::abs(predicted[i])));
            }
          }
        }
        r.measured = worst;
        r.passed = ok && worst <= r.tolerance;
        if (r.detail.empty()) r.detail = std::to_string(walks) + " walks at E=3 and E=0.1";
    });
}

/// 6. Two-component x-motion at (E, K) = (0.1, 0.5) for (z1, z2) = (-1, 0.5); inner orbits stay inside.
inline CheckResult check_bounded_orbit(const VerifyOptions& opt)
{
    return verify_detail::timed(6, "bounded_orbit", 1e-10, 30.0, [&](CheckResult& r) {
        const ChargeConfig c(-1.0, 0.5);
        const EnergyMomentum em{0.1, 0.5};
        const auto cls = classify(em, c);
        if (cls.x_intervals.size() != 2 || !cls.bounded_component) {
            r.detail = "expected two x-intervals, got pattern " + cls.pattern;
            return;
        }
        const double x3 = 2.5 - std::sqrt(1.25);
        const Interval inner = cls.x_intervals.front();
        r.measured = std::abs(inner.hi - x3);
        double overshoot = 0.0;
        IntegrationOptions io;
        io.s_max = 1e3;
        io.step_tol = opt.step_tol;
        const auto& y = cls.y_intervals.front();
        int runs = 0;
        for (double fx : {0.2, 0.5, 0.8}) {
            for (double fy : {0.3, 0.6}) {
                const EllipticState s0 = state_on_level(em, c, inner.lo + fx * (inner.hi - inner.lo),
                                                        y.lo + fy * (y.hi - y.lo), fx < 0.5 ? 1.0 : -1.0);
                const Trajectory tr = integrate(s0, c, io);
                if (tr.termination == Termination::collision) continue;
                ++runs;
                if (tr.termination != Termination::s_max) overshoot = INFINITY;
                for (const auto& smp : tr.samples) {
                    overshoot = std::max({overshoot, smp.separated.x - (x3 + 1e-6), 1.0 - smp.separated.x});
                }
            }
        }
        r.passed = r.measured <= r.tolerance && overshoot <= 0.0 && runs > 0 &&
                   detect_boundedness(em, c, inner).verdict == Boundedness::Bounded;
        r.detail = "x3 error; " + std::to_string(runs) + " runs to s=1e3, label " + cls.label +
                   (overshoot <= 0.0 ? ", contained" : ", left [1, x3+1e-6]");
    });
}

/// Drift of one random run per (preset, index); scattering initial data only.
inline double conservation_run(const ChargeConfig& c, std::uint64_t seed, double step_tol)
{
    verify_detail::Rng rng(seed);
    for (;;) {
        const CartesianState s = verify_detail::random_state(rng, c, 3.0, 5.0, 1e-2);
        if (std::abs(s.q2) < 1e-6) continue;
        const EnergyMomentum em = energy_momentum_map(s, c);
        if (!(em.e > 0.0)) continue;
        const auto cls = classify(em, c);
        const double x0 = std::cosh(to_elliptic(s).xi);
        const auto comp = std::find_if(cls.x_intervals.begin(), cls.x_intervals.end(),
                                       [&](const Interval& iv) { return iv.contains(x0, 1e-9); });
        if (comp == cls.x_intervals.end() || comp->bounded()) continue;
        IntegrationOptions io;
        io.s_max = 100.0;
        io.step_tol = step_tol;
        const Trajectory tr = integrate(s, c, io);
        return std::max(tr.max_e_drift(), tr.max_k_drift());
    }
}

/// 7. 100 scattering runs per preset conserve E and K.
inline CheckResult check_conservation(const VerifyOptions& opt)
{
    return verify_detail::timed(7, "conservation", 1e-8, 60.0, [&](CheckResult& r) {
        const std::size_t per = 100;
        std::vector<double> drift(opt.presets.size() * per);
        parallel_for(drift.size(), opt.threads, [&](std::size_t i) {
            drift[i] = conservation_run(opt.presets[i / per], opt.seed + 7 + 7919 * i, opt.step_tol);
        });
        r.measured = *std::max_element(drift.begin(), drift.end());
        r.passed = r.measured < r.tolerance;
        r.detail = std::to_string(drift.size()) + " runs, s<=100, step_tol=" + verify_detail::format_double(opt.step_tol);
    });
}

/// Real roots of e s^2 + z s + k in [lo, hi] by a sign scan over n points refined by bisection.
inline std::vector<double> scan_roots(double e, double z, double k, double lo = -10.0, double hi = 10.0,
                                      std::size_t n = 200'001)
{
    auto q = [&](double s) { return (e * s + z) * s + k; };
    std::vector<double> out;
    const double h = (hi - lo) / static_cast<double>(n - 1);
    double a = lo;
    double qa = q(a);
    for (std::size_t i = 1; i < n; ++i) {
        const double b = lo + h * static_cast<double>(i);
        const double qb = q(b);
        if (qa == 0.0) {
            out.push_back(a);
        } else if ((qa < 0.0) != (qb < 0.0) && qb != 0.0) {
            double l = a, u = b;
            for (int it = 0; it < 100 && u - l > 1e-15; ++it) {
                const double m = 0.5 * (l + u);
                ((q(m) < 0.0) == (qa < 0.0) ? l : u) = m;
            }
            out.push_back(0.5 * (l + u));
        }
        a = b;
        qa = qb;
    }
    return out;
}

/// 8. movable_roots against the sign-scan oracle.
inline CheckResult check_root_oracle(const VerifyOptions& opt)
{
    return verify_detail::timed(8, "root_oracle", 1e-6, 5.0, [&](CheckResult& r) {
        struct Case {
            double e, z, k;
        };
        verify_detail::Rng rng(opt.seed + 8);
        std::vector<Case> cases(1000);
        for (auto& cs : cases) {
            cs = {verify_detail::uniform(rng, 0.05, 5.0), verify_detail::uniform(rng, -5.0, 5.0),
                  verify_detail::uniform(rng, -10.0, 10.0)};
        }
        std::vector<double> dev(cases.size());
        std::vector<char> count_ok(cases.size());
        parallel_for(cases.size(), opt.threads, [&](std::size_t i) {
            const auto& cs = cases[i];
            const double z1 = cs.z == 1.0 ? 0.5 : 1.0;
            const ChargeConfig c(z1, cs.z - z1);
            const auto mr = movable_roots({cs.e, cs.k}, Branch::plus, c);
            std::vector<double> expected;
            for (double v : mr.roots) {
                if (v > -10.0 && v < 10.0) expected.push_back(v);
            }
            const auto found = scan_roots(cs.e, cs.z, cs.k);
            count_ok[i] = found.size() == expected.size() || mr.double_root;
            double d = 0.0;
            for (std::size_t j = 0; j < std::min(found.size(), expected.size()); ++j) {
                d = std::max(d, std::abs(found[j] - expected[j]));
            }
            dev[i] = d;
        });
        r.measured = *std::max_element(dev.begin(), dev.end());
        const auto bad = std::count(count_ok.begin(), count_ok.end(), 0);
        r.passed = r.measured <= r.tolerance && bad == 0;
        r.detail = std::to_string(cases.size()) + " quadratics, " + std::to_string(bad) + " root-count mismatches";
    });
}

/// 9. Involution equivariance (sample-wise) and time reversal on 20 runs.
inline CheckResult check_symmetry(const VerifyOptions& opt)
{
    return verify_detail::timed(9, "symmetry", 1e-9, 30.0, [&](CheckResult& r) {
        constexpr double reversal_tol = 1e-6;
        verify_detail::Rng rng(opt.seed + 9);
        double inv_worst = 0.0;
        double rev_worst = 0.0;
        int runs = 0;
        while (runs < 20) {
            const auto& c = opt.presets[static_cast<std::size_t>(runs) % opt.presets.size()];
            const CartesianState s = verify_detail::random_state(rng, c, 3.0, 3.0, 1e-2);
            if (std::abs(s.q2) < 1e-6) continue;
            const EllipticState s0 = to_elliptic(s);
            IntegrationOptions io;
            io.s_max = 20.0;
            io.step_tol = opt.step_tol;
            const Trajectory fwd = integrate(s0, c, io);
            if (fwd.termination == Termination::collision) continue;

            const Trajectory mirrored = integrate(involution(s0), c, io);
            if (mirrored.samples.size() != fwd.samples.size()) {
                inv_worst = INFINITY;
            } else {
                for (std::size_t i = 0; i < fwd.samples.size(); ++i) {
                    const auto a = involution(fwd.samples[i].elliptic);
                    const auto& b = mirrored.samples[i].elliptic;
                    inv_worst = std::max({inv_worst, std::abs(a.xi - b.xi), std::abs(a.eta - b.eta),
                                          std::abs(a.p_xi - b.p_xi) / (1.0 + std::abs(a.p_xi)),
                                          std::abs(a.p_eta - b.p_eta) / (1.0 + std::abs(a.p_eta)),
                                          std::abs(fwd.samples[i].s - mirrored.samples[i].s)});
                }
            }

            EllipticState back = fwd.samples.back().elliptic;
            back.p_xi = -back.p_xi;
            back.p_eta = -back.p_eta;
            io.s_max = fwd.samples.back().s;
            const Trajectory rev = integrate(back, c, io);
            const auto& e = rev.samples.back().elliptic;
            const double scale = 1.0 + std::max(std::abs(s0.p_xi), std::abs(s0.p_eta));
            rev_worst = std::max({rev_worst, std::abs(e.xi - s0.xi), std::abs(e.eta - s0.eta),
                                  std::abs(-e.p_xi - s0.p_xi) / scale, std::abs(-e.p_eta - s0.p_eta) / scale});
            ++runs;
        }
        r.measured = inv_worst;
        r.passed = inv_worst <= r.tolerance && rev_worst <= reversal_tol;
        r.detail = "reversal error " + verify_detail::format_double(rev_worst) + " (bound 1e-06), 20 runs";
    });
}

/// 10. With Z- = 0 and K = 0 the orbit on the q2-axis keeps y = 0.
inline CheckResult check_vertical_orbit(const VerifyOptions& opt)
{
    return verify_detail::timed(10, "vertical_orbit", 1e-9, 5.0, [&](CheckResult& r) {
        double worst = 0.0;
        int runs = 0;
        for (const auto& c : opt.presets) {
            if (c.z_minus() != 0.0) continue;
            for (double e : {0.5, 1.0, 3.0}) {
                for (double q2 : {0.5, 2.0}) {
                    const double v = -(c.z1() + c.z2()) / std::hypot(1.0, q2);
                    if (e <= v) continue;
                    const CartesianState s{0.0, q2, 0.0, -std::sqrt(2.0 * (e - v))};
                    if (std::abs(energy_momentum_map(s, c).k) > 1e-12) worst = INFINITY;
                    IntegrationOptions io;
                    io.s_max = 100.0;
                    io.step_tol = opt.step_tol;
                    const Trajectory tr = integrate(s, c, io);
                    for (const auto& smp : tr.samples) worst = std::max(worst, std::abs(smp.separated.y));
                    ++runs;
                }
            }
        }
        r.measured = worst;
        r.passed = runs > 0 && worst < r.tolerance;
        r.detail = std::to_string(runs) + " runs on presets with z1 = z2";
    });
}

inline std::vector<CheckResult> run_acceptance(const VerifyOptions& opt = {})
{
    std::vector<std::function<CheckResult(const VerifyOptions&)>> checks{
        check_curve_sets,  check_discriminant, check_hill_bounds,  check_dual_k,    check_region_walks,
        check_bounded_orbit, check_conservation, check_root_oracle, check_symmetry, check_vertical_orbit};
    std::vector<CheckResult> out;
    for (const auto& check : checks) {
        CheckResult r = check(opt);
        if (opt.enforce_budgets && r.seconds > r.budget_seconds) {
            r.passed = false;
            r.detail += "; over time budget";
        }
        out.push_back(std::move(r));
    }
    return out;
}

} // namespace twocenters

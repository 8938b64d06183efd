#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "bifurcation.hpp"
#include "charges.hpp"
#include "errors.hpp"
#include "parallel.hpp"

namespace twocenters {

struct DiagramCell {
    EnergyMomentum em;
    RegionClassification region;
};

struct CurvePoint {
    double e = 0.0;
    double k = 0.0;
};

struct Polyline {
    CurveId curve = CurveId::L0;
    std::vector<CurvePoint> points;
};

struct Diagram {
    ChargeConfig charges{1.0, 1.0};
    Interval e_range;
    Interval k_range;
    std::size_t nx = 0;
    std::size_t ny = 0;
    /// Row-major, E varying fastest.
    std::vector<DiagramCell> cells;
    /// Pieces of each curve inside the Hill region and the K window; a curve may split.
    std::vector<Polyline> curves;
    /// Hill-region boundary K-(E) sampled on the E grid of the curves.
    std::vector<CurvePoint> upper_boundary;

    const DiagramCell& at(std::size_t i, std::size_t j) const { return cells.at(j * nx + i); }
};

/**
 * Classifies an nx x ny grid of (E, K) nodes and traces every curve of the
 * bifurcation set as polylines with `curve_samples` vertices per curve.
 */
inline Diagram sample_diagram(const Interval& e_range, const Interval& k_range, std::size_t nx, std::size_t ny,
                              const ChargeConfig& charges, std::size_t curve_samples = 400,
                              unsigned threads = default_thread_count())
{
    if (!(e_range.lo >= 0.0) || !(e_range.hi > e_range.lo) || !std::isfinite(e_range.hi)) {
        throw DomainError("energy range must be a nonempty finite subset of [0, inf)");
    }
    if (!(k_range.hi > k_range.lo) || !std::isfinite(k_range.lo) || !std::isfinite(k_range.hi)) {
        throw DomainError("K range must be nonempty and finite");
    }
    if (nx < 2 || ny < 2) throw DomainError("grid resolution must be at least 2 x 2");
    if (curve_samples < 2) throw DomainError("curves need at least 2 samples");

    Diagram d{charges, e_range, k_range, nx, ny, std::vector<DiagramCell>(nx * ny), {}, {}};
    auto lerp = [](const Interval& iv, std::size_t i, std::size_t n) {
        return iv.lo + (iv.hi - iv.lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    };
    parallel_for(nx * ny, threads, [&](std::size_t idx) {
        const EnergyMomentum em{lerp(e_range, idx % nx, nx), lerp(k_range, idx / nx, ny)};
        RegionClassification r;
        try {
            r = classify(em, charges);
        } catch (const Error&) {
            r.label = "forbidden";
        }
        d.cells[idx] = {em, std::move(r)};
    });

    for (CurveId id : bifurcation_curve_set(charges)) {
        if (id == CurveId::L0) {
            if (e_range.lo == 0.0) {
                const double top = std::min(k_range.hi, k_minus(0.0, charges));
                const double bottom = std::max(k_range.lo, k_plus(0.0, charges));
                if (top >= bottom) d.curves.push_back({id, {{0.0, bottom}, {0.0, top}}});
            }
            continue;
        }
        Polyline piece{id, {}};
        for (std::size_t i = 0; i < curve_samples; ++i) {
            const double e = lerp(e_range, i, curve_samples);
            const auto k = bifurcation_k(id, e, charges);
            const bool keep = k && *k >= k_range.lo && *k <= k_range.hi;
            if (keep) {
                piece.points.push_back({e, *k});
            } else if (!piece.points.empty()) {
                d.curves.push_back(std::move(piece));
                piece = {id, {}};
            }
        }
        if (!piece.points.empty()) d.curves.push_back(std::move(piece));
    }
    for (std::size_t i = 0; i < curve_samples; ++i) {
        const double e = lerp(e_range, i, curve_samples);
        d.upper_boundary.push_back({e, k_minus(e, charges)});
    }
    return d;
}

} // namespace twocenters

// geomphase.hpp — gauge-invariant geometric phase along the contour
// eta = const, alpha: 0 -> alpha_span, and phase-vs-interaction sweeps.
//
// The phase splits into a global endpoint term arg<Psi_0|Psi_N> and a discrete
// Pancharatnam connection term -sum_j arg<Psi_j|Psi_{j+1}>; the sum converges
// to the Berry-connection integral and each summand is gauge-invariant only in
// combination, so theta_g = global + connection (mod 2pi) is the invariant.

#pragma once

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "ringdefect/errors.hpp"
#include "ringdefect/spectrum.hpp"
#include "ringdefect/wavefun.hpp"

namespace ringdefect {

struct ContourSpec {
    std::pair<int, int> state{1, 3};
    double eta = 0.0;
    double c = 0.0;
    double L = 1.0;
    int steps = 256;
    double alpha_span = 2.0 * M_PI;
};

inline void validate(const ContourSpec& spec) {
    if (spec.state.first < 1 || spec.state.second < 1)
        throw invalid_parameter_error("state indices must be >= 1");
    if (spec.steps < 8) throw invalid_parameter_error("steps must be >= 8");
    if (!(spec.alpha_span > 0.0)) throw invalid_parameter_error("alpha span must be > 0");
    SystemConfig cfg{spec.c, spec.L, DefectParams{spec.eta, 0.0}};
    validate(cfg);
}

struct PhaseResult {
    double theta_g = 0.0;           // radians, reported in [0, 2pi)
    double global_term = 0.0;       // arg<Psi_0|Psi_N>
    double connection_term = 0.0;   // -sum_j arg<Psi_j|Psi_{j+1}>
    double endpoint_overlap_mag = 0.0;
    int steps_used = 0;
    bool converged = false;
};

inline double wrap_2pi(double x) {
    double y = std::fmod(x, 2.0 * M_PI);
    if (y < 0.0) y += 2.0 * M_PI;
    return y;
}

// Distance on the circle of circumference 2pi.
inline double circle_distance(double a, double b) {
    const double d = wrap_2pi(a - b);
    return std::min(d, 2.0 * M_PI - d);
}

// Normalized states on the uniform alpha grid of spec.steps + 1 samples.
inline std::vector<Wavefunction> state_path(const ContourSpec& spec) {
    validate(spec);
    SystemConfig cfg{spec.c, spec.L, DefectParams{spec.eta, 0.0}};
    std::vector<double> grid(spec.steps + 1);
    for (int m = 0; m <= spec.steps; ++m)
        grid[m] = spec.alpha_span * static_cast<double>(m) / spec.steps;
    const RootPath path = track_alpha(spec.state, cfg, grid);
    std::vector<Wavefunction> states;
    states.reserve(path.points.size());
    for (std::size_t m = 0; m < path.points.size(); ++m) {
        SystemConfig sample_cfg = cfg;
        sample_cfg.defect.alpha = path.alphas[m];
        try {
            states.push_back(build_state(path.points[m], sample_cfg));
        } catch (const error& e) {
            throw path_error("state build failed at alpha = " + std::to_string(path.alphas[m]) +
                                 ": " + e.what(),
                             path.alphas[m]);
        }
    }
    return states;
}

// Discrete Pancharatnam accumulation over an ordered path of normalized states.
// converged is left false; phase_converged performs the step-doubling check.
inline PhaseResult geometric_phase(const std::vector<Wavefunction>& path) {
    if (path.size() < 2) throw invalid_parameter_error("path must contain at least 2 states");
    PhaseResult r;
    r.steps_used = static_cast<int>(path.size()) - 1;
    double conn = 0.0;
    for (std::size_t j = 0; j + 1 < path.size(); ++j) {
        const cplx ov = inner_product(path[j], path[j + 1]);
        if (std::abs(ov) < 1e-6)
            throw path_too_coarse_error(
                "consecutive overlap magnitude below 1e-6 at segment " + std::to_string(j),
                std::abs(ov));
        conn -= std::arg(ov);
    }
    const cplx end = inner_product(path.front(), path.back());
    r.endpoint_overlap_mag = std::abs(end);
    if (r.endpoint_overlap_mag < 1e-6)
        throw ill_defined_phase_error("endpoint overlap magnitude below 1e-6",
                                      r.endpoint_overlap_mag);
    r.global_term = std::arg(end);
    r.connection_term = conn;
    r.theta_g = wrap_2pi(r.global_term + r.connection_term);
    return r;
}

// Runs geometric_phase at spec.steps and 2*spec.steps; accepts when the two
// values agree to 1e-4 on the circle, doubling up to 4 times.
inline PhaseResult phase_converged(const ContourSpec& spec) {
    validate(spec);
    ContourSpec cur = spec;
    PhaseResult prev = geometric_phase(state_path(cur));
    prev.steps_used = cur.steps;
    for (int attempt = 0; attempt < 4; ++attempt) {
        ContourSpec finer = cur;
        finer.steps = 2 * cur.steps;
        PhaseResult next = geometric_phase(state_path(finer));
        next.steps_used = finer.steps;
        if (circle_distance(next.theta_g, prev.theta_g) < 1e-4) {
            next.converged = true;
            return next;
        }
        cur = finer;
        prev = next;
    }
    prev.converged = false;
    return prev;
}

// Reference value of the free-limit global term at large eta:
// -arccos(1/cosh eta) + pi/2.
inline double global_phase_limit(double eta) {
    if (!(eta > 0.0)) throw invalid_parameter_error("eta must be > 0");
    return 0.5 * M_PI - std::acos(1.0 / std::cosh(eta));
}

struct SweepRow {
    double eta = 0.0;
    double c = 0.0;
    double theta_g = 0.0;  // NaN when status != "ok"
    bool converged = false;
    std::string status = "ok";
};

namespace detail {

inline int sweep_thread_count(std::size_t cells) {
    if (const char* env = std::getenv("RINGDEFECT_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return std::min<std::size_t>(n, cells);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return static_cast<int>(std::min<std::size_t>(hw ? hw : 1, cells));
}

}  // namespace detail

// One phase_converged evaluation per (eta, c) cell, rows in eta-major order.
// Cells run concurrently; per-cell failures are recorded in the status column.
inline std::vector<SweepRow> sweep(std::pair<int, int> state, const std::vector<double>& etas,
                                   const std::vector<double>& c_grid, double L, int steps) {
    if (etas.empty() || c_grid.empty()) throw invalid_parameter_error("sweep grids are empty");
    for (std::size_t m = 1; m < c_grid.size(); ++m)
        if (c_grid[m] < c_grid[m - 1])
            throw invalid_parameter_error("c grid must be ascending");
    std::vector<SweepRow> rows(etas.size() * c_grid.size());
    std::atomic<std::size_t> cursor{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t idx = cursor.fetch_add(1);
            if (idx >= rows.size()) return;
            const double eta = etas[idx / c_grid.size()];
            const double c = c_grid[idx % c_grid.size()];
            SweepRow row;
            row.eta = eta;
            row.c = c;
            try {
                ContourSpec spec{state, eta, c, L, steps, 2.0 * M_PI};
                const PhaseResult r = phase_converged(spec);
                row.theta_g = r.theta_g;
                row.converged = r.converged;
            } catch (const ill_defined_phase_error& e) {
                row.theta_g = std::nan("");
                row.status = std::string("ill-defined-phase: ") + e.what();
            } catch (const error& e) {
                row.theta_g = std::nan("");
                row.status = std::string("error: ") + e.what();
            }
            rows[idx] = std::move(row);
        }
    };
    const int nthreads = detail::sweep_thread_count(rows.size());
    if (nthreads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(nthreads);
        for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return rows;
}

}  // namespace ringdefect

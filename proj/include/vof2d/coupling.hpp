#pragma once

// IMPES time loop: per step, solve the Stokes constraint from (T^k, C^k),
// advance the temperature implicitly with u^k, advance the composition
// geometrically with the time-centered (u^{k-1} + u^k)/2, and remesh the
// interface band on its schedule. Also the bounded DG-Q1 view of the
// composition used as an alternative buoyancy coupling.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "vof2d/advect.hpp"
#include "vof2d/amr.hpp"
#include "vof2d/stokes.hpp"
#include "vof2d/thermal.hpp"

namespace vof2d {

// Bounded bilinear composition view on the unit cell:
//   C(x) = f + grad . (x - xc)
// with the gradient along -n (down the interface normal, toward C1), the
// largest magnitude keeping all four corner values in [0, 1], and cell mean
// exactly f.
struct DgQ1Cell {
    double value = 0.0;
    Vec2 grad{0.0, 0.0};

    double eval(const Vec2& offset_from_center) const {
        return value + grad.dot(offset_from_center);
    }
};

inline DgQ1Cell project_dg_q1(double f_e, const InterfaceLine* line) {
    DgQ1Cell out;
    out.value = f_e;
    if (line == nullptr)
        return out;
    const double n1 = line->normal.norm1();
    if (n1 <= 0.0)
        return out;
    // ghat has unit L1 norm, so corner extremes are value +- s/2; the
    // largest admissible slope is s = 2 min(f, 1-f).
    const Vec2 ghat{-line->normal.x / n1, -line->normal.y / n1};
    const double s = 2.0 * std::min(f_e, 1.0 - f_e);
    out.grad = s * ghat;
    return out;
}

struct CouplingParams {
    double ra = 0.0;      // Rayleigh number (nondimensional runs)
    double bratio = 0.0;  // buoyancy ratio B
    bool dimensional = false;
    double delta_rho_g = 0.0;  // (rho1 - rho0) * g for dimensional runs
    bool thermal_on = true;
    bool dgq1 = false;  // DG-Q1 composition view in the buoyancy term
    double sigma = 0.5;
    double dt_max = std::numeric_limits<double>::infinity();
    RefinementParams amr;
    int remesh_period = 1;
    ThermalParams thermal;
    AdvectParams advect;
};

struct SimulationState {
    double t = 0.0;
    long step = 0;
    AmrComposition comp;
    TemperatureField T;
    StaggeredFlow flow_old;
    StaggeredFlow flow_new;
    bool has_flow = false;  // false until the first Stokes solve
};

struct StepReport {
    double dt = 0.0;
    SweepStats sweep;
    StokesResidual stokes;
    bool band_ok = true;
    bool remeshed = false;
    int cfl_retries = 0;
};

namespace detail {

// Base-cell composition means (the P0 coupling view).
inline std::vector<double> base_composition(const AmrComposition& c) {
    std::vector<double> out(static_cast<size_t>(c.base.cells()), 0.0);
    for (int jb = 0; jb < c.base.ny; ++jb)
        for (int ib = 0; ib < c.base.nx; ++ib)
            out[static_cast<size_t>(c.base.index(ib, jb))] = c.base_mean(ib, jb);
    return out;
}

}  // namespace detail

// Buoyancy force RHS on the base grid. The DG-Q1 option evaluates the
// bounded bilinear composition at the shared face midpoint from both sides;
// the P0 default averages cell means (the two agree at cell centers).
inline StokesRhs buoyancy_rhs(const SimulationState& state, const CouplingParams& p) {
    const StructuredGrid& g = state.comp.base;
    const std::vector<double> comp = detail::base_composition(state.comp);
    StokesRhs rhs(g);

    std::vector<double> cface;  // composition at horizontal faces
    cface.assign(static_cast<size_t>(g.nx * (g.ny + 1)), 0.0);
    if (!p.dgq1) {
        for (int j = 1; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                cface[static_cast<size_t>(j * g.nx + i)] =
                    0.5 * (comp[static_cast<size_t>(g.index(i, j - 1))] +
                           comp[static_cast<size_t>(g.index(i, j))]);
    } else {
        const ReconstructionMap recon = reconstruct_grid(
            g.nx, g.ny, [&comp, &g](int i, int j) { return comp[static_cast<size_t>(g.index(i, j))]; },
            p.amr.eps_vof);
        auto view = [&](int i, int j) {
            const int e = g.index(i, j);
            return project_dg_q1(comp[static_cast<size_t>(e)],
                                 recon.present(e) ? &recon.line(e) : nullptr);
        };
        for (int j = 1; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                const double below = view(i, j - 1).eval({0.0, 0.5});
                const double above = view(i, j).eval({0.0, -0.5});
                cface[static_cast<size_t>(j * g.nx + i)] = 0.5 * (below + above);
            }
    }

    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double cf = cface[static_cast<size_t>(j * g.nx + i)];
            double b;
            if (p.dimensional) {
                b = p.delta_rho_g * cf;
            } else {
                const double tf = 0.5 * (state.T.at(i, j - 1) + state.T.at(i, j));
                b = -p.ra * tf + p.ra * p.bratio * cf;
            }
            rhs.fy_at(i, j) = -b;
        }
    return rhs;
}

// CFL-limited step size from the current velocity pair.
inline double select_dt(const SimulationState& state, const CouplingParams& p,
                        double t_remaining) {
    double speed = 0.0;
    const StaggeredFlow& a = state.flow_old;
    const StaggeredFlow& b = state.flow_new;
    for (size_t k = 0; k < b.u.size(); ++k)
        speed = std::max(speed, std::abs(0.5 * (a.u[k] + b.u[k])));
    for (size_t k = 0; k < b.v.size(); ++k)
        speed = std::max(speed, std::abs(0.5 * (a.v[k] + b.v[k])));
    speed = std::max(speed, b.max_speed());  // thermal advection uses u^k
    double dt = p.dt_max;
    if (speed > 0.0)
        dt = std::min(dt, p.sigma * state.comp.fine.h / speed);
    return std::min(dt, t_remaining);
}

// One IMPES step with the already-selected dt. Retries with halved dt if the
// advection reports a CFL violation (restoring T and f first).
inline StepReport impes_step(SimulationState& state, StokesSolver& stokes,
                             const CouplingParams& p, double dt) {
    StepReport report;
    if (dt == 0.0)
        return report;
    if (!(dt > 0.0))
        throw std::invalid_argument("impes_step: negative step");

    // (1) Stokes constraint from (T^k, C^k).
    state.flow_old = state.has_flow ? state.flow_new : StaggeredFlow(state.comp.base);
    state.flow_new = stokes.solve(buoyancy_rhs(state, p));
    if (!state.has_flow) {
        state.flow_old = state.flow_new;
        state.has_flow = true;
    }
    report.stokes = stokes.last_residual();

    // Snapshot for CFL retries.
    const std::vector<double> f_snapshot = state.comp.f;
    const std::vector<double> t_snapshot = state.T.t;
    const std::vector<double> tp_snapshot = state.T.t_prev;
    const double dtp_snapshot = state.T.dt_prev;

    for (int attempt = 0;; ++attempt) {
        try {
            // (2) temperature with u^k.
            if (p.thermal_on)
                advance_temperature(state.T, state.flow_new, dt, p.thermal);

            // (3) composition with the time-centered velocity.
            StaggeredFlow mid(state.comp.base);
            for (size_t k = 0; k < mid.u.size(); ++k)
                mid.u[k] = 0.5 * (state.flow_old.u[k] + state.flow_new.u[k]);
            for (size_t k = 0; k < mid.v.size(); ++k)
                mid.v[k] = 0.5 * (state.flow_old.v[k] + state.flow_new.v[k]);
            const FineFaceVelocity vel = interpolate_to_fine(mid, state.comp.ratio);
            report.sweep = strang_step(state.comp, vel, dt, state.step, p.advect);
            break;
        } catch (const std::runtime_error&) {
            if (attempt >= 3)
                throw;
            state.comp.f = f_snapshot;
            state.T.t = t_snapshot;
            state.T.t_prev = tp_snapshot;
            state.T.dt_prev = dtp_snapshot;
            dt *= 0.5;
            ++report.cfl_retries;
        }
    }
    report.dt = dt;

    state.t += dt;
    state.step += 1;

    // (4) remesh on schedule.
    if (state.comp.max_level > 0 && state.step % p.remesh_period == 0) {
        remesh(state.comp, p.amr);
        report.remeshed = true;
    }
    report.band_ok = state.comp.band_invariant_holds(p.amr.eps_vof);
    return report;
}

}  // namespace vof2d

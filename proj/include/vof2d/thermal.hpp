#pragma once

// Temperature advection-diffusion with variable-step BDF2 in time, centered
// diffusion, and first-order upwind advection (standing in for the entropy
// viscosity stabilization; the advection operator is isolated here so a
// different stabilization can replace it).
//
// Boundary conditions: T = 1 at y = y0, T = 0 at y = y0 + Ly (Dirichlet via
// ghost linear extrapolation), insulated side walls (mirror ghosts).
//
// The implicit system is strictly diagonally dominant (reaction + upwind +
// diffusion M-matrix), solved by lexicographic Gauss-Seidel with a fixed
// sweep order.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "vof2d/fields.hpp"

namespace vof2d {

struct Bdf2Coefficients {
    double a;  // weight of T^{k+1}
    double b;  // weight of T^k
    double c;  // weight of T^{k-1}
};

// Weights of the discrete time derivative a T^{k+1} + b T^k + c T^{k-1}.
// dt_old == 0 means no history: backward Euler.
inline Bdf2Coefficients bdf2_coefficients(double dt_new, double dt_old) {
    if (!(dt_new > 0.0))
        throw std::invalid_argument("bdf2_coefficients: nonpositive new step");
    if (dt_old < 0.0)
        throw std::invalid_argument("bdf2_coefficients: negative old step");
    if (dt_old == 0.0)
        return {1.0 / dt_new, -1.0 / dt_new, 0.0};
    const double s = dt_new + dt_old;
    return {(2.0 * dt_new + dt_old) / (dt_new * s), -s / (dt_new * dt_old),
            dt_new / (dt_old * s)};
}

struct ThermalParams {
    double tol = 1e-10;
    long max_iter = 100000;
    double t_bottom = 1.0;
    double t_top = 0.0;
};

// Advances T by one implicit step with face velocities from `flow` (the
// current-level velocity). Updates the BDF2 history in place.
inline void advance_temperature(TemperatureField& T, const StaggeredFlow& flow, double dt,
                                const ThermalParams& params = {}) {
    const StructuredGrid& g = T.grid;
    const int nx = g.nx, ny = g.ny;
    const double h = g.h;
    const bool have_history = !T.t_prev.empty();
    const Bdf2Coefficients w = bdf2_coefficients(dt, have_history ? T.dt_prev : 0.0);

    // dt-scaled coefficient stencil: diag*T_e + sum(off*T_nb) = rhs.
    const size_t n = static_cast<size_t>(g.cells());
    std::vector<double> diag(n, 0.0), aw(n, 0.0), ae(n, 0.0), as(n, 0.0), an(n, 0.0), rhs(n, 0.0);

    const double dl = dt / (h * h);  // scaled diffusion weight
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const size_t e = static_cast<size_t>(g.index(i, j));
            double d = w.a * dt;
            double r = -w.b * dt * T.t[e];
            if (have_history)
                r -= w.c * dt * T.t_prev[e];

            // Diffusion with BC ghosts.
            d += 4.0 * dl;
            if (i > 0)
                aw[e] = -dl;
            else
                d -= dl;  // insulated side
            if (i < nx - 1)
                ae[e] = -dl;
            else
                d -= dl;
            if (j > 0)
                as[e] = -dl;
            else {
                d += dl;  // Dirichlet bottom: ghost = 2 T_wall - T_e
                r += 2.0 * dl * params.t_bottom;
            }
            if (j < ny - 1)
                an[e] = -dl;
            else {
                d += dl;
                r += 2.0 * dl * params.t_top;
            }

            // Upwind advection in advective form:
            // (1/h) sum_faces min(w_out, 0) (T_nb - T_e).
            const double cadv = dt / h;
            const double wW = -flow.u_at(i, j);      // outward at the west face
            const double wE = flow.u_at(i + 1, j);   // east
            const double wS = -flow.v_at(i, j);      // south
            const double wN = flow.v_at(i, j + 1);   // north
            if (wW < 0.0) {
                d += cadv * (-wW);
                aw[e] += cadv * wW;
            }
            if (wE < 0.0) {
                d += cadv * (-wE);
                ae[e] += cadv * wE;
            }
            if (wS < 0.0) {
                d += cadv * (-wS);
                as[e] += cadv * wS;
            }
            if (wN < 0.0) {
                d += cadv * (-wN);
                an[e] += cadv * wN;
            }
            diag[e] = d;
            rhs[e] = r;
        }

    // Gauss-Seidel, fixed lexicographic order.
    std::vector<double> x = T.t;  // warm start
    double res = 0.0;
    long it = 0;
    for (; it < params.max_iter; ++it) {
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                const size_t e = static_cast<size_t>(g.index(i, j));
                double s = rhs[e];
                if (i > 0)
                    s -= aw[e] * x[e - 1];
                if (i < nx - 1)
                    s -= ae[e] * x[e + 1];
                if (j > 0)
                    s -= as[e] * x[e - static_cast<size_t>(nx)];
                if (j < ny - 1)
                    s -= an[e] * x[e + static_cast<size_t>(nx)];
                x[e] = s / diag[e];
            }
        res = 0.0;
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                const size_t e = static_cast<size_t>(g.index(i, j));
                double s = diag[e] * x[e];
                if (i > 0)
                    s += aw[e] * x[e - 1];
                if (i < nx - 1)
                    s += ae[e] * x[e + 1];
                if (j > 0)
                    s += as[e] * x[e - static_cast<size_t>(nx)];
                if (j < ny - 1)
                    s += an[e] * x[e + static_cast<size_t>(nx)];
                res = std::max(res, std::abs(s - rhs[e]));
            }
        if (res <= params.tol)
            break;
    }
    if (res > params.tol)
        throw std::runtime_error("advance_temperature: linear solve did not converge, residual " +
                                 std::to_string(res));

    T.t_prev = T.t;
    T.t = x;
    T.dt_prev = dt;
}

// Diffusive heat inflow through the top and bottom walls (per unit length
// integrated over the wall), using the Dirichlet ghost closure.
struct WallHeatFlux {
    double bottom_in = 0.0;  // positive into the domain
    double top_in = 0.0;
};

inline WallHeatFlux wall_heat_flux(const TemperatureField& T, const ThermalParams& params = {}) {
    const StructuredGrid& g = T.grid;
    WallHeatFlux out;
    for (int i = 0; i < g.nx; ++i) {
        out.bottom_in += 2.0 * (params.t_bottom - T.at(i, 0));
        out.top_in += 2.0 * (params.t_top - T.at(i, g.ny - 1));
    }
    return out;  // already flux density * h summed: (2 dT / h) * h = 2 dT
}

}  // namespace vof2d

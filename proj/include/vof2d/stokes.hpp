#pragma once

// Incompressible Stokes solve on the MAC-staggered base grid with no-flow /
// free-slip walls and Boussinesq buoyancy.
//
//   -mu lap(u) + grad P = F,   div u = 0
//
// The discrete saddle system is assembled once in an equilibrated form
// (momentum rows scaled by h^2/mu, pressure unknown q = P h / mu, continuity
// rows scaled by h) and factored with Eigen's sparse LU; each step is a pair
// of triangular solves plus iterative refinement on the physical residuals.
// A bordering row/column pins the pressure gauge (sum q = 0) without
// perturbing any continuity equation; with no-flow walls the multiplier is
// analytically zero.

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <cmath>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "vof2d/fields.hpp"

namespace vof2d {

// Cell-centered buoyancy magnitude b: the force density is b * (0, -1).
// Nondimensional runs use b = -Ra T + Ra B C; the dimensional sinking-box
// case uses b = (rho - rho0) g.
struct BuoyancySource {
    StructuredGrid grid;
    std::vector<double> b;

    BuoyancySource() = default;
    explicit BuoyancySource(const StructuredGrid& g)
        : grid(g), b(static_cast<size_t>(g.cells()), 0.0) {}

    double& at(int i, int j) { return b[static_cast<size_t>(grid.index(i, j))]; }
    double at(int i, int j) const { return b[static_cast<size_t>(grid.index(i, j))]; }
};

inline BuoyancySource assemble_buoyancy(const TemperatureField& T,
                                        const std::vector<double>& composition, double ra,
                                        double bratio) {
    BuoyancySource out(T.grid);
    for (int e = 0; e < T.grid.cells(); ++e)
        out.b[static_cast<size_t>(e)] =
            -ra * T.t[static_cast<size_t>(e)] + ra * bratio * composition[static_cast<size_t>(e)];
    return out;
}

// Face-sampled force; buoyancy fills fy from cell means, manufactured
// solutions may set both components directly.
struct StokesRhs {
    StructuredGrid grid;
    std::vector<double> fx;  // interior vertical faces, (nx+1)*ny layout
    std::vector<double> fy;  // horizontal faces, nx*(ny+1) layout

    explicit StokesRhs(const StructuredGrid& g)
        : grid(g),
          fx(static_cast<size_t>((g.nx + 1) * g.ny), 0.0),
          fy(static_cast<size_t>(g.nx * (g.ny + 1)), 0.0) {}

    double& fx_at(int i, int j) { return fx[static_cast<size_t>(j * (grid.nx + 1) + i)]; }
    double fx_at(int i, int j) const { return fx[static_cast<size_t>(j * (grid.nx + 1) + i)]; }
    double& fy_at(int i, int j) { return fy[static_cast<size_t>(j * grid.nx + i)]; }
    double fy_at(int i, int j) const { return fy[static_cast<size_t>(j * grid.nx + i)]; }
};

inline StokesRhs rhs_from_buoyancy(const BuoyancySource& b) {
    StokesRhs rhs(b.grid);
    const StructuredGrid& g = b.grid;
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            rhs.fy_at(i, j) = -0.5 * (b.at(i, j - 1) + b.at(i, j));
    return rhs;
}

struct StokesResidual {
    double momentum = 0.0;  // max norm of F - (-mu lap u + grad P)
    double divergence = 0.0;
};

class StokesSolver {
  public:
    StokesSolver(const StructuredGrid& g, double mu, double tol = 1e-10, int max_refine = 40)
        : grid_(g), mu_(mu), tol_(tol), max_refine_(max_refine) {
        build();
    }

    const StructuredGrid& grid() const { return grid_; }
    double viscosity() const { return mu_; }
    const StokesResidual& last_residual() const { return last_residual_; }

    StaggeredFlow solve(const StokesRhs& rhs) const {
        StaggeredFlow flow(grid_);
        Eigen::VectorXd x = Eigen::VectorXd::Zero(ntot_);
        StokesResidual res{};
        std::vector<StokesResidual> history;
        for (int pass = 0; pass <= max_refine_; ++pass) {
            scatter(x, flow);
            res = residual(rhs, flow);
            history.push_back(res);
            const double fscale = std::max(1.0, rhs_scale(rhs));
            if (res.momentum <= tol_ * fscale && res.divergence <= tol_)
                break;
            if (pass == max_refine_) {
                std::ostringstream msg;
                msg << "StokesSolver: no convergence after " << max_refine_
                    << " refinement passes; residual history (momentum, divergence):";
                for (const auto& r : history)
                    msg << " (" << r.momentum << ", " << r.divergence << ")";
                throw std::runtime_error(msg.str());
            }
            x += lu_->solve(scaled_residual_rhs(rhs, flow));
        }
        last_residual_ = res;

        // Mean-zero pressure gauge.
        double mean = 0.0;
        for (double p : flow.p)
            mean += p;
        mean /= flow.p.size();
        for (double& p : flow.p)
            p -= mean;
        return flow;
    }

    StokesResidual residual(const StokesRhs& rhs, const StaggeredFlow& w) const {
        StokesResidual r{};
        const int nx = grid_.nx, ny = grid_.ny;
        const double h = grid_.h;
        for (int j = 0; j < ny; ++j)
            for (int i = 1; i < nx; ++i) {
                const double lap = lap_u(w, i, j);
                const double gp = (w.p_at(i, j) - w.p_at(i - 1, j)) / h;
                r.momentum = std::max(r.momentum, std::abs(rhs.fx_at(i, j) + mu_ * lap - gp));
            }
        for (int j = 1; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                const double lap = lap_v(w, i, j);
                const double gp = (w.p_at(i, j) - w.p_at(i, j - 1)) / h;
                r.momentum = std::max(r.momentum, std::abs(rhs.fy_at(i, j) + mu_ * lap - gp));
            }
        r.divergence = w.max_divergence();
        return r;
    }

  private:
    StructuredGrid grid_;
    double mu_;
    double tol_;
    int max_refine_;
    int nu_ = 0, nv_ = 0, np_ = 0, ntot_ = 0;
    std::shared_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> lu_;
    mutable StokesResidual last_residual_{};

    int iu(int i, int j) const { return (i - 1) + j * (grid_.nx - 1); }
    int iv(int i, int j) const { return nu_ + i + (j - 1) * grid_.nx; }
    int ip(int i, int j) const { return nu_ + nv_ + grid_.index(i, j); }

    // 5-point Laplacians with wall values zero (no-flow) and mirrored
    // tangential ghosts (free slip).
    double lap_u(const StaggeredFlow& w, int i, int j) const {
        const int nx = grid_.nx, ny = grid_.ny;
        const double h2 = grid_.h * grid_.h;
        const double uc = w.u_at(i, j);
        const double uw = (i - 1 >= 0) ? w.u_at(i - 1, j) : 0.0;   // includes wall face value
        const double ue = (i + 1 <= nx) ? w.u_at(i + 1, j) : 0.0;  // (never out of range here)
        const double us = (j - 1 >= 0) ? w.u_at(i, j - 1) : uc;
        const double un = (j + 1 < ny) ? w.u_at(i, j + 1) : uc;
        return (uw + ue + us + un - 4.0 * uc) / h2;
    }
    double lap_v(const StaggeredFlow& w, int i, int j) const {
        const int nx = grid_.nx, ny = grid_.ny;
        const double h2 = grid_.h * grid_.h;
        const double vc = w.v_at(i, j);
        const double vs = (j - 1 >= 0) ? w.v_at(i, j - 1) : 0.0;
        const double vn = (j + 1 <= ny) ? w.v_at(i, j + 1) : 0.0;
        const double vw = (i - 1 >= 0) ? w.v_at(i - 1, j) : vc;
        const double ve = (i + 1 < nx) ? w.v_at(i + 1, j) : vc;
        return (vw + ve + vs + vn - 4.0 * vc) / h2;
    }

    double rhs_scale(const StokesRhs& rhs) const {
        double s = 0.0;
        for (double v : rhs.fx)
            s = std::max(s, std::abs(v));
        for (double v : rhs.fy)
            s = std::max(s, std::abs(v));
        return s;
    }

    // RHS of the equilibrated system for the physical residual of `w`.
    Eigen::VectorXd scaled_residual_rhs(const StokesRhs& rhs, const StaggeredFlow& w) const {
        const int nx = grid_.nx, ny = grid_.ny;
        const double h = grid_.h;
        const double h2mu = h * h / mu_;
        Eigen::VectorXd b = Eigen::VectorXd::Zero(ntot_);
        for (int j = 0; j < ny; ++j)
            for (int i = 1; i < nx; ++i) {
                const double r =
                    rhs.fx_at(i, j) + mu_ * lap_u(w, i, j) - (w.p_at(i, j) - w.p_at(i - 1, j)) / h;
                b[iu(i, j)] = r * h2mu;
            }
        for (int j = 1; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                const double r =
                    rhs.fy_at(i, j) + mu_ * lap_v(w, i, j) - (w.p_at(i, j) - w.p_at(i, j - 1)) / h;
                b[iv(i, j)] = r * h2mu;
            }
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i)
                b[ip(i, j)] = -(w.u_at(i + 1, j) - w.u_at(i, j) + w.v_at(i, j + 1) - w.v_at(i, j));
        return b;
    }

    // Adds the solution increment (scaled variables) into the flow fields.
    void scatter(const Eigen::VectorXd& x, StaggeredFlow& flow) const {
        const int nx = grid_.nx, ny = grid_.ny;
        for (int j = 0; j < ny; ++j)
            for (int i = 1; i < nx; ++i)
                flow.u_at(i, j) = x[iu(i, j)];
        for (int j = 1; j < ny; ++j)
            for (int i = 0; i < nx; ++i)
                flow.v_at(i, j) = x[iv(i, j)];
        const double pscale = mu_ / grid_.h;
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i)
                flow.p_at(i, j) = x[ip(i, j)] * pscale;
    }

    void build() {
        const int nx = grid_.nx, ny = grid_.ny;
        nu_ = (nx - 1) * ny;
        nv_ = nx * (ny - 1);
        np_ = nx * ny;
        ntot_ = nu_ + nv_ + np_ + 1;  // + pressure gauge multiplier
        const int gauge = ntot_ - 1;

        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(static_cast<size_t>(ntot_) * 7);

        // Momentum x (scaled by h^2/mu): h^2(-lap u) + (q_E - q_W) = fx h^2 / mu.
        for (int j = 0; j < ny; ++j)
            for (int i = 1; i < nx; ++i) {
                const int row = iu(i, j);
                double diag = 4.0;
                if (i - 1 >= 1)
                    trip.emplace_back(row, iu(i - 1, j), -1.0);
                if (i + 1 <= nx - 1)
                    trip.emplace_back(row, iu(i + 1, j), -1.0);
                if (j - 1 >= 0)
                    trip.emplace_back(row, iu(i, j - 1), -1.0);
                else
                    diag -= 1.0;  // mirrored ghost
                if (j + 1 < ny)
                    trip.emplace_back(row, iu(i, j + 1), -1.0);
                else
                    diag -= 1.0;
                trip.emplace_back(row, row, diag);
                trip.emplace_back(row, ip(i, j), 1.0);
                trip.emplace_back(row, ip(i - 1, j), -1.0);
            }

        // Momentum y.
        for (int j = 1; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                const int row = iv(i, j);
                double diag = 4.0;
                if (j - 1 >= 1)
                    trip.emplace_back(row, iv(i, j - 1), -1.0);
                if (j + 1 <= ny - 1)
                    trip.emplace_back(row, iv(i, j + 1), -1.0);
                if (i - 1 >= 0)
                    trip.emplace_back(row, iv(i - 1, j), -1.0);
                else
                    diag -= 1.0;
                if (i + 1 < nx)
                    trip.emplace_back(row, iv(i + 1, j), -1.0);
                else
                    diag -= 1.0;
                trip.emplace_back(row, row, diag);
                trip.emplace_back(row, ip(i, j), 1.0);
                trip.emplace_back(row, ip(i, j - 1), -1.0);
            }

        // Continuity (scaled by h): u_E - u_W + v_N - v_S + lambda = 0.
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                const int row = ip(i, j);
                if (i + 1 <= nx - 1)
                    trip.emplace_back(row, iu(i + 1, j), 1.0);
                if (i >= 1)
                    trip.emplace_back(row, iu(i, j), -1.0);
                if (j + 1 <= ny - 1)
                    trip.emplace_back(row, iv(i, j + 1), 1.0);
                if (j >= 1)
                    trip.emplace_back(row, iv(i, j), -1.0);
                trip.emplace_back(row, gauge, 1.0);
                trip.emplace_back(gauge, row, 1.0);  // sum q = 0
            }

        Eigen::SparseMatrix<double> K(ntot_, ntot_);
        K.setFromTriplets(trip.begin(), trip.end());
        K.makeCompressed();
        lu_ = std::make_shared<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
        lu_->analyzePattern(K);
        lu_->factorize(K);
        if (lu_->info() != Eigen::Success)
            throw std::runtime_error("StokesSolver: factorization failed");
    }
};

// Spec-level convenience: solve for the flow driven by a buoyancy field.
inline StaggeredFlow solve_stokes(StokesSolver& solver, const BuoyancySource& b) {
    return solver.solve(rhs_from_buoyancy(b));
}

}  // namespace vof2d

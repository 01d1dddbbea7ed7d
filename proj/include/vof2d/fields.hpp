#pragma once

// Cell- and face-centered field containers on the structured grid.

#include <stdexcept>
#include <vector>

#include "vof2d/core.hpp"
#include "vof2d/grid.hpp"

namespace vof2d {

// Volume fraction of Composition 1, one value per cell.
struct VofField {
    StructuredGrid grid;
    std::vector<double> f;

    VofField() = default;
    explicit VofField(const StructuredGrid& g, double fill = 0.0)
        : grid(g), f(static_cast<size_t>(g.cells()), fill) {}

    double& at(int i, int j) { return f[static_cast<size_t>(grid.index(i, j))]; }
    double at(int i, int j) const { return f[static_cast<size_t>(grid.index(i, j))]; }

    // Sigma f_e V_e in fixed cell order with compensated summation.
    double total_c1() const {
        KahanSum s;
        for (double v : f)
            s.add(v);
        return s.value() * grid.cell_volume();
    }

    double min_value() const {
        double m = f.empty() ? 0.0 : f[0];
        for (double v : f)
            m = std::min(m, v);
        return m;
    }
    double max_value() const {
        double m = f.empty() ? 0.0 : f[0];
        for (double v : f)
            m = std::max(m, v);
        return m;
    }
};

// MAC-staggered velocity + cell pressure. u lives on vertical faces
// ((nx+1) x ny), v on horizontal faces (nx x (ny+1)); wall-normal entries
// are identically zero for the no-flow boundaries.
struct StaggeredFlow {
    StructuredGrid grid;
    std::vector<double> u;  // (nx+1)*ny, index j*(nx+1)+i
    std::vector<double> v;  // nx*(ny+1), index j*nx+i
    std::vector<double> p;  // nx*ny

    StaggeredFlow() = default;
    explicit StaggeredFlow(const StructuredGrid& g)
        : grid(g),
          u(static_cast<size_t>((g.nx + 1) * g.ny), 0.0),
          v(static_cast<size_t>(g.nx * (g.ny + 1)), 0.0),
          p(static_cast<size_t>(g.cells()), 0.0) {}

    double& u_at(int i, int j) { return u[static_cast<size_t>(j * (grid.nx + 1) + i)]; }
    double u_at(int i, int j) const { return u[static_cast<size_t>(j * (grid.nx + 1) + i)]; }
    double& v_at(int i, int j) { return v[static_cast<size_t>(j * grid.nx + i)]; }
    double v_at(int i, int j) const { return v[static_cast<size_t>(j * grid.nx + i)]; }
    double& p_at(int i, int j) { return p[static_cast<size_t>(grid.index(i, j))]; }
    double p_at(int i, int j) const { return p[static_cast<size_t>(grid.index(i, j))]; }

    double divergence(int i, int j) const {
        return (u_at(i + 1, j) - u_at(i, j) + v_at(i, j + 1) - v_at(i, j)) / grid.h;
    }

    double max_divergence() const {
        double m = 0.0;
        for (int j = 0; j < grid.ny; ++j)
            for (int i = 0; i < grid.nx; ++i)
                m = std::max(m, std::abs(divergence(i, j)));
        return m;
    }

    double max_speed() const {
        double m = 0.0;
        for (double x : u)
            m = std::max(m, std::abs(x));
        for (double x : v)
            m = std::max(m, std::abs(x));
        return m;
    }
};

// Cell-centered temperature with the two previous levels for variable-step
// BDF2.
struct TemperatureField {
    StructuredGrid grid;
    std::vector<double> t;
    std::vector<double> t_prev;  // T^{k-1}; empty before the second step
    double dt_prev = 0.0;        // step that led to t (0 before the first step)

    TemperatureField() = default;
    explicit TemperatureField(const StructuredGrid& g, double fill = 0.0)
        : grid(g), t(static_cast<size_t>(g.cells()), fill) {}

    double& at(int i, int j) { return t[static_cast<size_t>(grid.index(i, j))]; }
    double at(int i, int j) const { return t[static_cast<size_t>(grid.index(i, j))]; }
};

inline std::set<int> flag_refinement(const VofField& f, const RefinementParams& params) {
    return flag_refinement(f.grid, f.f, params);
}

}  // namespace vof2d

#pragma once

// Structured rectangular grid of square cells plus the interface-band
// refinement bookkeeping: the two-pass flagging rule, the remesh-interval
// bound, and a graded per-cell level map.

#include <cmath>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <vector>

namespace vof2d {

struct StructuredGrid {
    int nx = 0;
    int ny = 0;
    double x0 = 0.0;
    double y0 = 0.0;
    double lx = 0.0;
    double ly = 0.0;
    double h = 0.0;

    StructuredGrid() = default;
    StructuredGrid(int nx_, int ny_, double x0_, double y0_, double lx_, double ly_)
        : nx(nx_), ny(ny_), x0(x0_), y0(y0_), lx(lx_), ly(ly_) {
        if (nx < 3 || ny < 3)
            throw std::invalid_argument("StructuredGrid: need at least 3 cells per axis");
        h = lx / nx;
        if (std::abs(lx / nx - ly / ny) > 1e-14 * h)
            throw std::invalid_argument("StructuredGrid: cells are not square");
    }

    int cells() const { return nx * ny; }
    int index(int i, int j) const { return j * nx + i; }
    bool in_bounds(int i, int j) const { return i >= 0 && i < nx && j >= 0 && j < ny; }
    double cx(int i) const { return x0 + (i + 0.5) * h; }
    double cy(int j) const { return y0 + (j + 0.5) * h; }
    double cell_volume() const { return h * h; }
};

struct RefinementParams {
    double eps_vof = 1e-6;
    int band_width = 4;  // W, in finest-level cells
    int levels = 2;      // L_max

    void validate() const {
        if (!(eps_vof > 0.0 && eps_vof < 0.5))
            throw std::invalid_argument("RefinementParams: eps_vof outside (0, 0.5)");
        if (band_width < 4)
            throw std::invalid_argument("RefinementParams: band width below 4");
        if (levels < 0)
            throw std::invalid_argument("RefinementParams: negative level count");
    }
};

// Two-pass interface flagging. Pass 1 marks cells with an interface fraction
// or a face-neighbor fraction jump above eps; pass 2 adds every cell sharing
// a vertex with a pass-1 cell.
inline std::set<int> flag_refinement(const StructuredGrid& g, const std::vector<double>& f,
                                     const RefinementParams& params) {
    params.validate();
    const double eps = params.eps_vof;
    std::vector<std::uint8_t> pass1(static_cast<size_t>(g.cells()), 0);
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const double fe = f[static_cast<size_t>(g.index(i, j))];
            if (fe > eps && fe < 1.0 - eps) {
                pass1[static_cast<size_t>(g.index(i, j))] = 1;
                continue;
            }
            const int di[4] = {1, -1, 0, 0};
            const int dj[4] = {0, 0, 1, -1};
            for (int k = 0; k < 4; ++k) {
                const int ii = i + di[k], jj = j + dj[k];
                if (!g.in_bounds(ii, jj))
                    continue;
                if (std::abs(fe - f[static_cast<size_t>(g.index(ii, jj))]) > eps) {
                    pass1[static_cast<size_t>(g.index(i, j))] = 1;
                    break;
                }
            }
        }
    }
    std::set<int> flags;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            if (!pass1[static_cast<size_t>(g.index(i, j))])
                continue;
            for (int dj = -1; dj <= 1; ++dj)
                for (int di = -1; di <= 1; ++di) {
                    const int ii = i + di, jj = j + dj;
                    if (g.in_bounds(ii, jj))
                        flags.insert(g.index(ii, jj));
                }
        }
    return flags;
}

// Largest integer N >= 1 with N < (W - 2) / (2 sigma). When no such N
// exists the caller must remesh every step, which N = 1 already encodes.
inline int remesh_interval(int band_width, double sigma) {
    if (!(sigma > 0.0))
        throw std::invalid_argument("remesh_interval: CFL number must be positive");
    if (band_width < 4)
        throw std::invalid_argument("remesh_interval: band width below 4");
    const double bound = (band_width - 2) / (2.0 * sigma);
    const int n = static_cast<int>(std::ceil(bound)) - 1;
    return n >= 1 ? n : 1;
}

// Per-base-cell refinement level map, graded so face-adjacent cells differ
// by at most one level (leaf cells then satisfy 2:1 face balance).
struct RefinementMap {
    int max_level = 0;
    std::vector<int> level;  // per base cell

    static RefinementMap build(const StructuredGrid& g, const std::set<int>& flags,
                               int max_level) {
        RefinementMap m;
        m.max_level = max_level;
        m.level.assign(static_cast<size_t>(g.cells()), 0);
        if (max_level == 0)
            return m;
        for (int e : flags)
            m.level[static_cast<size_t>(e)] = max_level;
        // Grade outward: a neighbor of a level-l cell is at least l-1.
        for (int l = max_level; l >= 2; --l) {
            for (int j = 0; j < g.ny; ++j)
                for (int i = 0; i < g.nx; ++i) {
                    if (m.level[static_cast<size_t>(g.index(i, j))] != l)
                        continue;
                    const int di[4] = {1, -1, 0, 0};
                    const int dj[4] = {0, 0, 1, -1};
                    for (int k = 0; k < 4; ++k) {
                        const int ii = i + di[k], jj = j + dj[k];
                        if (!g.in_bounds(ii, jj))
                            continue;
                        int& lv = m.level[static_cast<size_t>(g.index(ii, jj))];
                        if (lv < l - 1)
                            lv = l - 1;
                    }
                }
        }
        return m;
    }

    bool is_graded(const StructuredGrid& g) const {
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                const int l = level[static_cast<size_t>(g.index(i, j))];
                if (i + 1 < g.nx && std::abs(l - level[static_cast<size_t>(g.index(i + 1, j))]) > 1)
                    return false;
                if (j + 1 < g.ny && std::abs(l - level[static_cast<size_t>(g.index(i, j + 1))]) > 1)
                    return false;
            }
        return true;
    }
};

}  // namespace vof2d

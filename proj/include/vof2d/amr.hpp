#pragma once

// Interface-band adaptive composition field. The base grid carries a graded
// per-cell level map; fractions are stored in a flat array at the finest
// resolution with coarse leaves replicated, so accessors and sweeps see one
// uniform fine index space while reconstruction and updates are restricted
// to the maximally refined band. Levels act on the composition only; the
// flow and temperature always live on the base grid.
//
// Transfer rules across level changes:
//   coarsen: leaf value = volume average of its fine block (replicated back)
//   refine a uniform leaf: children copy the value
//   refine an interface leaf: children take the exact sub-cell fractions of
//     the leaf's reconstructed line
// Both directions preserve the block sum, so Sigma f V is unchanged by a
// remesh up to the reconstruction's volume-constraint tolerance.

#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

#include "vof2d/elvira.hpp"
#include "vof2d/fields.hpp"
#include "vof2d/grid.hpp"
#include "vof2d/plic.hpp"

namespace vof2d {

struct AmrComposition {
    StructuredGrid base;
    StructuredGrid fine;
    int max_level = 0;
    int ratio = 1;  // 2^max_level
    RefinementMap levels;
    std::vector<double> f;  // fine-resolution fractions, coarse leaves replicated

    AmrComposition() = default;
    AmrComposition(const StructuredGrid& base_grid, int levels_)
        : base(base_grid), max_level(levels_), ratio(1 << levels_) {
        fine = StructuredGrid(base.nx * ratio, base.ny * ratio, base.x0, base.y0, base.lx,
                              base.ly);
        levels.max_level = max_level;
        levels.level.assign(static_cast<size_t>(base.cells()), 0);
        f.assign(static_cast<size_t>(fine.cells()), 0.0);
    }

    double& at(int i, int j) { return f[static_cast<size_t>(fine.index(i, j))]; }
    double at(int i, int j) const { return f[static_cast<size_t>(fine.index(i, j))]; }

    int base_level(int ib, int jb) const {
        return levels.level[static_cast<size_t>(base.index(ib, jb))];
    }
    int level_of_fine(int i, int j) const { return base_level(i / ratio, j / ratio); }
    bool active(int i, int j) const { return level_of_fine(i, j) == max_level; }

    // Volume average over the base cell (exact for replicated leaves).
    double base_mean(int ib, int jb) const {
        double s = 0.0;
        for (int v = 0; v < ratio; ++v)
            for (int u = 0; u < ratio; ++u)
                s += at(ib * ratio + u, jb * ratio + v);
        return s / (ratio * ratio);
    }

    // Sigma f V over leaves == Sigma over the fine array since coarse
    // leaves are replicated. Fixed order, compensated.
    double total_c1() const {
        KahanSum s;
        for (double v : f)
            s.add(v);
        return s.value() * fine.cell_volume();
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

    int interface_cell_count(double eps) const {
        int n = 0;
        for (int j = 0; j < fine.ny; ++j)
            for (int i = 0; i < fine.nx; ++i) {
                const double v = at(i, j);
                if (v > eps && v < 1.0 - eps)
                    ++n;
            }
        return n;
    }

    // Every interface fine cell, and both sides of every significant
    // fraction jump, must sit in the maximally refined band.
    bool band_invariant_holds(double eps) const {
        if (max_level == 0)
            return true;
        for (int j = 0; j < fine.ny; ++j)
            for (int i = 0; i < fine.nx; ++i) {
                const double v = at(i, j);
                if (v > eps && v < 1.0 - eps && !active(i, j))
                    return false;
                if (i + 1 < fine.nx && std::abs(v - at(i + 1, j)) > eps &&
                    (!active(i, j) || !active(i + 1, j)))
                    return false;
                if (j + 1 < fine.ny && std::abs(v - at(i, j + 1)) > eps &&
                    (!active(i, j) || !active(i, j + 1)))
                    return false;
            }
        return true;
    }
};

// Base-cell flags from the fine data: the two-pass rule evaluated on leaf
// values, collected at base granularity.
inline std::set<int> flag_base_cells(const AmrComposition& c, const RefinementParams& params) {
    params.validate();
    const double eps = params.eps_vof;
    const StructuredGrid& fg = c.fine;
    std::vector<std::uint8_t> pass1(static_cast<size_t>(c.base.cells()), 0);
    for (int j = 0; j < fg.ny; ++j)
        for (int i = 0; i < fg.nx; ++i) {
            const double v = c.at(i, j);
            const int be = c.base.index(i / c.ratio, j / c.ratio);
            if (v > eps && v < 1.0 - eps) {
                pass1[static_cast<size_t>(be)] = 1;
                continue;
            }
            if (i + 1 < fg.nx && std::abs(v - c.at(i + 1, j)) > eps) {
                pass1[static_cast<size_t>(be)] = 1;
                pass1[static_cast<size_t>(c.base.index((i + 1) / c.ratio, j / c.ratio))] = 1;
            }
            if (j + 1 < fg.ny && std::abs(v - c.at(i, j + 1)) > eps) {
                pass1[static_cast<size_t>(be)] = 1;
                pass1[static_cast<size_t>(c.base.index(i / c.ratio, (j + 1) / c.ratio))] = 1;
            }
        }
    std::set<int> flags;
    for (int j = 0; j < c.base.ny; ++j)
        for (int i = 0; i < c.base.nx; ++i) {
            if (!pass1[static_cast<size_t>(c.base.index(i, j))])
                continue;
            for (int dj = -1; dj <= 1; ++dj)
                for (int di = -1; di <= 1; ++di)
                    if (c.base.in_bounds(i + di, j + dj))
                        flags.insert(c.base.index(i + di, j + dj));
        }
    return flags;
}

namespace detail {

// Replicated restriction: every leaf block of 2^(L-l) fine cells is replaced
// by its average.
inline void canonicalize_leaf(AmrComposition& c, int ib, int jb) {
    const int lvl = c.base_level(ib, jb);
    const int leaf = c.ratio >> lvl;  // fine cells per leaf side
    if (leaf == 1)
        return;
    for (int v0 = 0; v0 < c.ratio; v0 += leaf)
        for (int u0 = 0; u0 < c.ratio; u0 += leaf) {
            double s = 0.0;
            for (int v = 0; v < leaf; ++v)
                for (int u = 0; u < leaf; ++u)
                    s += c.at(ib * c.ratio + u0 + u, jb * c.ratio + v0 + v);
            s /= leaf * leaf;
            for (int v = 0; v < leaf; ++v)
                for (int u = 0; u < leaf; ++u)
                    c.at(ib * c.ratio + u0 + u, jb * c.ratio + v0 + v) = s;
        }
}

// Geometric prolongation of one leaf: fill its fine block with the exact
// sub-cell fractions of `line` (given in the leaf's unit frame).
inline void split_leaf_by_line(AmrComposition& c, int i0, int j0, int leaf,
                               const InterfaceLine& line) {
    for (int v = 0; v < leaf; ++v)
        for (int u = 0; u < leaf; ++u) {
            const double cx_off = (u + 0.5) / leaf - 0.5;
            const double cy_off = (v + 0.5) / leaf - 0.5;
            const double d_child = leaf * (line.distance - line.normal.dot({cx_off, cy_off}));
            c.at(i0 + u, j0 + v) =
                detail::fraction_below_raw(line.normal, d_child);
        }
}

}  // namespace detail

// Applies a new level map: coarsened leaves are volume-averaged, refined
// interface leaves are split along their reconstructed line. Values on
// leaves whose level is unchanged are untouched.
inline void apply_refinement(AmrComposition& c, const RefinementMap& new_levels,
                             const RefinementParams& params) {
    const double eps = params.eps_vof;
    for (int jb = 0; jb < c.base.ny; ++jb)
        for (int ib = 0; ib < c.base.nx; ++ib) {
            const int be = c.base.index(ib, jb);
            const int old_lvl = c.levels.level[static_cast<size_t>(be)];
            const int new_lvl = new_levels.level[static_cast<size_t>(be)];
            if (new_lvl == old_lvl)
                continue;
            if (new_lvl > old_lvl) {
                // Refinement. Uniform leaves are already replicated;
                // interface leaves get split geometrically along their
                // reconstructed line before re-replication at the new level.
                const int leaf = c.ratio >> old_lvl;
                for (int v0 = 0; v0 < c.ratio; v0 += leaf)
                    for (int u0 = 0; u0 < c.ratio; u0 += leaf) {
                        const int i0 = ib * c.ratio + u0;
                        const int j0 = jb * c.ratio + v0;
                        const double fv = c.at(i0, j0);
                        if (!(fv > eps && fv < 1.0 - eps))
                            continue;
                        // Same-level 3x3 stencil by averaging neighbors at
                        // this leaf's resolution (clamped at domain walls).
                        const int li = i0 / leaf;
                        const int lj = j0 / leaf;
                        const int lnx = c.fine.nx / leaf;
                        const int lny = c.fine.ny / leaf;
                        Stencil3x3 s;
                        for (int dr = -1; dr <= 1; ++dr)
                            for (int dc = -1; dc <= 1; ++dc) {
                                int ci = std::clamp(li + dc, 0, lnx - 1);
                                int cj = std::clamp(lj + dr, 0, lny - 1);
                                double sum = 0.0;
                                for (int v = 0; v < leaf; ++v)
                                    for (int u = 0; u < leaf; ++u)
                                        sum += c.at(ci * leaf + u, cj * leaf + v);
                                s.f[dr + 1][dc + 1] = sum / (leaf * leaf);
                            }
                        const InterfaceLine line = reconstruct_cell(s, fv, params.eps_vof);
                        detail::split_leaf_by_line(c, i0, j0, leaf, line);
                    }
            }
            c.levels.level[static_cast<size_t>(be)] = new_lvl;
            detail::canonicalize_leaf(c, ib, jb);
        }
}

// Builds the level map for freshly initialized fine-resolution data and
// replicates the coarse leaves. Unlike apply_refinement this never splits:
// the stored values are already exact at the finest resolution.
inline void initialize_levels(AmrComposition& c, const RefinementParams& params) {
    if (c.max_level == 0)
        return;
    const auto flags = flag_base_cells(c, params);
    c.levels = RefinementMap::build(c.base, flags, c.max_level);
    for (int jb = 0; jb < c.base.ny; ++jb)
        for (int ib = 0; ib < c.base.nx; ++ib)
            detail::canonicalize_leaf(c, ib, jb);
}

// Full remesh: flag, grade, transfer.
inline void remesh(AmrComposition& c, const RefinementParams& params) {
    if (c.max_level == 0)
        return;
    const auto flags = flag_base_cells(c, params);
    const RefinementMap levels = RefinementMap::build(c.base, flags, c.max_level);
    apply_refinement(c, levels, params);
}

}  // namespace vof2d

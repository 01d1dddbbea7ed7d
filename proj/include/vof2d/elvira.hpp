#pragma once

// ELVIRA interface reconstruction. Candidate slopes come from the three ways
// of differencing the column sums and the three ways of differencing the row
// sums of a 3x3 block of volume fractions; each slope is tried with both
// orientations of Composition 1, the offset is fixed so the target cell's
// fraction is matched exactly, and the candidate minimizing the squared
// fraction mismatch over the neighborhood wins.
//
// Interior cells use the block centered on the target cell. Cells in the
// outermost ring have no centered block; there the slopes are generated from
// every fully-in-domain 3x3 window containing the cell and the mismatch is
// evaluated on the in-domain part of the cell's own neighborhood. Mirrored
// ghost stencils were rejected: they only reproduce straight lines that meet
// a wall orthogonally, and the translation benchmark requires exactness for
// oblique lines through wall cells.

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "vof2d/core.hpp"
#include "vof2d/fields.hpp"
#include "vof2d/plic.hpp"

namespace vof2d {

struct Stencil3x3 {
    // f[row][col], row increasing with y, col with x; center is f[1][1].
    double f[3][3] = {};
};

struct ColumnRowSums {
    std::array<double, 3> col;  // S_{i-1}, S_i, S_{i+1}
    std::array<double, 3> row;  // R_{j-1}, R_j, R_{j+1}
};

inline ColumnRowSums column_row_sums(const Stencil3x3& s) {
    ColumnRowSums out{};
    for (int c = 0; c < 3; ++c)
        out.col[static_cast<size_t>(c)] = s.f[0][c] + s.f[1][c] + s.f[2][c];
    for (int r = 0; r < 3; ++r)
        out.row[static_cast<size_t>(r)] = s.f[r][0] + s.f[r][1] + s.f[r][2];
    return out;
}

enum class SlopeSource : std::uint8_t {
    x_left,
    x_centered,
    x_right,
    y_left,
    y_centered,
    y_right,
};

struct CandidateSlope {
    double value = 0.0;
    SlopeSource source = SlopeSource::x_left;
};

inline std::array<CandidateSlope, 6> candidate_slopes(const ColumnRowSums& sums) {
    const auto& s = sums.col;
    const auto& r = sums.row;
    return {{
        {s[1] - s[0], SlopeSource::x_left},
        {0.5 * (s[2] - s[0]), SlopeSource::x_centered},
        {s[2] - s[1], SlopeSource::x_right},
        {r[1] - r[0], SlopeSource::y_left},
        {0.5 * (r[2] - r[0]), SlopeSource::y_centered},
        {r[2] - r[1], SlopeSource::y_right},
    }};
}

namespace detail {

// Candidate normals for one slope, first orientation first. For an x-family
// slope d the line is y = d x + b: C1 below gives n ~ (-d, 1), C1 above
// (note the column sums then measure 3 - height, flipping the recovered
// slope sign) gives n ~ (-d, -1). The y-family is the sideways analog.
inline std::array<Vec2, 2> candidate_normals(const CandidateSlope& cs) {
    const double d = cs.value;
    switch (cs.source) {
        case SlopeSource::x_left:
        case SlopeSource::x_centered:
        case SlopeSource::x_right:
            return {{{-d, 1.0}, {-d, -1.0}}};
        default:
            return {{{1.0, -d}, {-1.0, -d}}};
    }
}

inline Vec2 normalized(const Vec2& v) {
    const double len = v.norm2();
    return {v.x / len, v.y / len};
}

// Error of one candidate line over the comparison offsets: the sum of
// squared differences between given and line-implied fractions.
template <class FractionAt>
double candidate_error(const InterfaceLine& line, const FractionAt& frac,
                       const std::vector<std::pair<int, int>>& offsets) {
    double e = 0.0;
    for (const auto& [dc, dr] : offsets) {
        const double implied = fraction_at_offset(line, dc, dr);
        const double diff = frac(dc, dr) - implied;
        e += diff * diff;
    }
    return e;
}

// Core minimization: slopes from each window in `windows` (a list of 3x3
// fraction blocks), constraint on f_target, error over `offsets` relative to
// the target cell. First strict minimum wins, in candidate order.
template <class FractionAt>
InterfaceLine reconstruct_from_windows(const std::vector<Stencil3x3>& windows, double f_target,
                                       const FractionAt& frac,
                                       const std::vector<std::pair<int, int>>& offsets) {
    InterfaceLine best;
    double best_e = -1.0;
    for (const Stencil3x3& w : windows) {
        const auto slopes = candidate_slopes(column_row_sums(w));
        for (const CandidateSlope& cs : slopes) {
            for (const Vec2& raw : candidate_normals(cs)) {
                const Vec2 n = normalized(raw);
                const InterfaceLine line{n, distance_from_fraction(n, f_target)};
                const double e = candidate_error(line, frac, offsets);
                if (best_e < 0.0 || e < best_e) {
                    best_e = e;
                    best = line;
                }
            }
        }
    }
    return best;
}

}  // namespace detail

// Reconstruction in the center cell of a 3x3 stencil. The returned line
// satisfies volume_fraction(n, d) == f_center to the inversion tolerance.
inline InterfaceLine reconstruct_cell(const Stencil3x3& s, double f_center,
                                      double eps_vof = 1e-6) {
    if (!(f_center > eps_vof && f_center < 1.0 - eps_vof))
        throw std::invalid_argument("reconstruct_cell: center fraction not an interface value");
    std::vector<std::pair<int, int>> offsets;
    offsets.reserve(9);
    for (int dr = -1; dr <= 1; ++dr)
        for (int dc = -1; dc <= 1; ++dc)
            offsets.emplace_back(dc, dr);
    auto frac = [&s](int dc, int dr) { return s.f[dr + 1][dc + 1]; };
    return detail::reconstruct_from_windows({s}, f_center, frac, offsets);
}

// Per-cell reconstruction map for a whole field.
struct ReconstructionMap {
    std::vector<InterfaceLine> lines;
    std::vector<std::uint8_t> has_line;

    bool present(int idx) const { return has_line[static_cast<size_t>(idx)] != 0; }
    const InterfaceLine& line(int idx) const { return lines[static_cast<size_t>(idx)]; }
};

// Reconstructs every cell of a uniform grid with eps < f < 1 - eps and
// active(i, j) true, given an accessor frac(i, j) valid on [0,nx) x [0,ny).
// Near the domain boundary the candidate windows are every fully-interior
// 3x3 block containing the cell.
template <class FractionAt, class ActiveAt>
ReconstructionMap reconstruct_grid(int nx, int ny, const FractionAt& frac, double eps_vof,
                                   const ActiveAt& active) {
    ReconstructionMap out;
    out.lines.assign(static_cast<size_t>(nx) * ny, InterfaceLine{});
    out.has_line.assign(static_cast<size_t>(nx) * ny, 0);

    parallel_chunks(static_cast<std::int64_t>(nx) * ny, [&](std::int64_t b, std::int64_t e) {
        for (std::int64_t idx = b; idx < e; ++idx) {
            const int i = static_cast<int>(idx % nx);
            const int j = static_cast<int>(idx / nx);
            if (!active(i, j))
                continue;
            const double fc = frac(i, j);
            if (!(fc > eps_vof && fc < 1.0 - eps_vof))
                continue;

            // Candidate windows. Interior cells use exactly the centered
            // block. A wall cell needs shifted windows in both axes: the
            // window that brackets the line (and so has exact sum
            // differences) may be offset along the wall, not just away
            // from it.
            std::vector<int> xi, yj;
            const bool at_wall = (i == 0 || i == nx - 1 || j == 0 || j == ny - 1);
            if (!at_wall) {
                xi = {i - 1};
                yj = {j - 1};
            } else {
                for (int w = std::max(0, i - 2); w <= std::min(nx - 3, i); ++w)
                    xi.push_back(w);
                for (int w = std::max(0, j - 2); w <= std::min(ny - 3, j); ++w)
                    yj.push_back(w);
            }

            std::vector<Stencil3x3> windows;
            windows.reserve(xi.size() * yj.size());
            for (int wj : yj)
                for (int wi : xi) {
                    Stencil3x3 s;
                    for (int r = 0; r < 3; ++r)
                        for (int c = 0; c < 3; ++c)
                            s.f[r][c] = frac(wi + c, wj + r);
                    windows.push_back(s);
                }

            std::vector<std::pair<int, int>> offsets;
            offsets.reserve(9);
            for (int dr = -1; dr <= 1; ++dr)
                for (int dc = -1; dc <= 1; ++dc)
                    if (i + dc >= 0 && i + dc < nx && j + dr >= 0 && j + dr < ny)
                        offsets.emplace_back(dc, dr);

            auto local = [&](int dc, int dr) { return frac(i + dc, j + dr); };
            out.lines[static_cast<size_t>(idx)] =
                detail::reconstruct_from_windows(windows, fc, local, offsets);
            out.has_line[static_cast<size_t>(idx)] = 1;
        }
    });
    return out;
}

template <class FractionAt>
ReconstructionMap reconstruct_grid(int nx, int ny, const FractionAt& frac, double eps_vof) {
    return reconstruct_grid(nx, ny, frac, eps_vof, [](int, int) { return true; });
}

inline ReconstructionMap reconstruct_field(const VofField& field, const RefinementParams& params) {
    return reconstruct_grid(
        field.grid.nx, field.grid.ny, [&field](int i, int j) { return field.at(i, j); },
        params.eps_vof);
}

}  // namespace vof2d

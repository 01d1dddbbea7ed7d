#pragma once

// Piecewise-linear interface geometry on the unit cell [0,1]^2.
//
// An interface line is stored as n.(x - xc) = d with xc = (1/2, 1/2) the
// cell center and n a unit normal pointing away from Composition 1, so the
// C1 region is { x : n.(x - xc) <= d }. The volume fraction therefore grows
// from 0 at dbar = -1/2 to 1 at dbar = +1/2 (dbar = d / |n|_1), which is the
// orientation the clipping oracle confirms.

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "vof2d/core.hpp"

namespace vof2d {

struct InterfaceLine {
    Vec2 normal;      // unit Euclidean norm, points away from C1
    double distance;  // signed offset in unit-cell coordinates

    InterfaceLine() = default;
    InterfaceLine(const Vec2& n, double d) : normal(n), distance(d) {}
};

namespace detail {

// Scale-invariant core of the volume-fraction formula: works for any
// nonzero n because only |n|_1 and |n|_inf enter.
inline double fraction_below_raw(const Vec2& n, double d) {
    const double n1 = n.norm1();
    if (!(n1 > 0.0))
        throw std::invalid_argument("volume_fraction: zero normal");
    const double dbar = d / n1;
    const double m = 1.0 - n.norm_inf() / n1;  // smaller L1-normalized component, in [0, 1/2]

    if (dbar >= 0.5)
        return 1.0;
    if (dbar <= -0.5)
        return 0.0;
    if (dbar > 0.5 - m) {
        const double t = dbar - 0.5;
        return 1.0 - t * t / (2.0 * m * (1.0 - m));
    }
    if (dbar < m - 0.5) {
        const double t = dbar + 0.5;
        return t * t / (2.0 * m * (1.0 - m));
    }
    return 0.5 + dbar / (1.0 - m);
}

}  // namespace detail

// Area fraction of the unit cell occupied by C1 for the line n.(x-xc) = d.
// n must be a unit vector; monotone nondecreasing and continuous in d.
inline double volume_fraction(const Vec2& n, double d) {
    const double len = n.norm2();
    if (!(len > 0.0))
        throw std::invalid_argument("volume_fraction: zero normal");
    if (std::abs(len - 1.0) > 1e-9)
        throw std::invalid_argument("volume_fraction: normal is not unit length");
    return detail::fraction_below_raw(n, d);
}

// Analytic inverse of volume_fraction in d (exact branch inversion, no
// iteration). For f in {0, 1} the distance is not unique; the boundary
// value +-|n|_1 / 2 is returned.
inline double distance_from_fraction(const Vec2& n, double f) {
    const double len = n.norm2();
    if (!(len > 0.0))
        throw std::invalid_argument("distance_from_fraction: zero normal");
    if (std::abs(len - 1.0) > 1e-9)
        throw std::invalid_argument("distance_from_fraction: normal is not unit length");
    if (f < 0.0 || f > 1.0)
        throw std::invalid_argument("distance_from_fraction: fraction outside [0,1]");

    const double n1 = n.norm1();
    const double m = 1.0 - n.norm_inf() / n1;
    double dbar;
    if (f <= 0.0) {
        dbar = -0.5;
    } else if (f >= 1.0) {
        dbar = 0.5;
    } else {
        const double f_corner = (m > 0.0) ? m / (2.0 * (1.0 - m)) : 0.0;
        if (f < f_corner)
            dbar = -0.5 + std::sqrt(2.0 * m * (1.0 - m) * f);
        else if (f > 1.0 - f_corner)
            dbar = 0.5 - std::sqrt(2.0 * m * (1.0 - m) * (1.0 - f));
        else
            dbar = (f - 0.5) * (1.0 - m);
    }
    return dbar * n1;
}

// Interface parameters of the flux strip adjacent to the face with outward
// unit normal face_n, after the strip of thickness vf/ve (along face_n) is
// stretched back to a unit cell. Derived by substituting the strip-to-cell
// affine map into n.(x-xc) = d:
//   n_I = n + (vf/ve - 1) (n.face_n) face_n
//   d_I = d - ((1 - vf/ve)/2) (n.face_n)
// The C1 volume crossing the face is then fraction_in_flux(...) * vf.
struct RemappedLine {
    Vec2 normal;  // generally not unit length
    double distance;
};

inline RemappedLine flux_interface_remap(const InterfaceLine& line, const Vec2& face_n,
                                         double vf, double ve) {
    if (vf < 0.0 || vf > ve)
        throw std::invalid_argument("flux_interface_remap: flux volume outside [0, cell volume]");
    const double phi = vf / ve;
    const double nk = line.normal.dot(face_n);
    RemappedLine r;
    r.normal = line.normal + (phi - 1.0) * nk * face_n;
    r.distance = line.distance - 0.5 * (1.0 - phi) * nk;
    return r;
}

// C1 fraction of the flux strip (vf > 0). The degenerate normal case
// (n parallel to face_n with phi == 0) cannot occur because vf > 0 keeps
// n_I nonzero whenever n is nonzero.
inline double fraction_in_flux(const InterfaceLine& line, const Vec2& face_n, double vf,
                               double ve) {
    if (vf == 0.0)
        return 0.0;
    const RemappedLine r = flux_interface_remap(line, face_n, vf, ve);
    return detail::fraction_below_raw(r.normal, r.distance);
}

// Fraction of C1 in a neighbor cell offset by (di, dj) cell widths, for the
// same physical line. Exact: only the signed distance changes frame.
inline double fraction_at_offset(const InterfaceLine& line, double di, double dj) {
    return detail::fraction_below_raw(line.normal, line.distance - line.normal.dot({di, dj}));
}

// Endpoints of the interface segment inside the unit cell, if the line
// actually crosses it. Used by the snapshot writer.
inline std::optional<std::pair<Vec2, Vec2>> segment_in_unit_cell(const InterfaceLine& line) {
    const Vec2 n = line.normal;
    const double c = line.distance + 0.5 * (n.x + n.y);  // n.x_ = c in corner coordinates
    Vec2 pts[4];
    int np = 0;
    auto push = [&](double x, double y) {
        for (int k = 0; k < np; ++k)
            if (std::abs(pts[k].x - x) < 1e-13 && std::abs(pts[k].y - y) < 1e-13)
                return;
        if (np < 4)
            pts[np++] = {x, y};
    };
    // Intersections with the four edges.
    if (std::abs(n.x) > 0.0) {
        for (double y : {0.0, 1.0}) {
            double x = (c - n.y * y) / n.x;
            if (x >= -1e-13 && x <= 1.0 + 1e-13)
                push(std::clamp(x, 0.0, 1.0), y);
        }
    }
    if (std::abs(n.y) > 0.0) {
        for (double x : {0.0, 1.0}) {
            double y = (c - n.x * x) / n.y;
            if (y >= -1e-13 && y <= 1.0 + 1e-13)
                push(x, std::clamp(y, 0.0, 1.0));
        }
    }
    if (np < 2)
        return std::nullopt;
    // With more than two hits (corner touches) take the farthest pair.
    int a = 0, b = 1;
    double best = -1.0;
    for (int i = 0; i < np; ++i)
        for (int j = i + 1; j < np; ++j) {
            double d2 = (pts[i] - pts[j]).dot(pts[i] - pts[j]);
            if (d2 > best) {
                best = d2;
                a = i;
                b = j;
            }
        }
    if (best <= 0.0)
        return std::nullopt;
    return std::make_pair(pts[a], pts[b]);
}

}  // namespace vof2d

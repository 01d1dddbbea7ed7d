#pragma once

// Benchmark definitions: exact geometric initialization of volume fractions,
// prescribed velocity fields, and the ready-to-run experiment setups.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vof2d/amr.hpp"
#include "vof2d/fields.hpp"
#include "vof2d/grid.hpp"
#include "vof2d/plic.hpp"

namespace vof2d {

// A global straight interface N.x = c with C1 = { x : N.x <= c }, N unit.
struct HalfPlane {
    Vec2 normal;  // points away from C1
    double offset;

    double cell_fraction(const StructuredGrid& g, int i, int j) const {
        const double d = (offset - normal.dot({g.cx(i), g.cy(j)})) / g.h;
        return detail::fraction_below_raw(normal, d);
    }
};

inline void init_halfplane(VofField& field, const HalfPlane& hp) {
    const StructuredGrid& g = field.grid;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            field.at(i, j) = hp.cell_fraction(g, i, j);
}

namespace detail {

inline double sqrt_clamped(double v) { return std::sqrt(std::max(v, 0.0)); }

// Antiderivative of sqrt(r^2 - x^2).
inline double circ_int(double x, double r) {
    x = std::clamp(x, -r, r);
    return 0.5 * (x * sqrt_clamped(r * r - x * x) + r * r * std::asin(x / r));
}

}  // namespace detail

// Exact area of disk(center, r) within [ax,bx] x [ay,by], by piecewise
// analytic integration of the chord length in x. Breakpoints are where the
// chord's top/bottom switch between the rectangle edges and the circle.
inline double circle_rect_area(const Vec2& center, double r, double ax, double ay, double bx,
                               double by) {
    ax -= center.x;
    bx -= center.x;
    ay -= center.y;
    by -= center.y;
    ax = std::max(ax, -r);
    bx = std::min(bx, r);
    if (ax >= bx || ay >= r || by <= -r)
        return 0.0;

    std::vector<double> xs = {ax, bx};
    for (double yy : {ay, by}) {
        if (std::abs(yy) < r) {
            const double xb = detail::sqrt_clamped(r * r - yy * yy);
            for (double cand : {-xb, xb})
                if (cand > ax && cand < bx)
                    xs.push_back(cand);
        }
    }
    std::sort(xs.begin(), xs.end());

    double area = 0.0;
    for (size_t k = 0; k + 1 < xs.size(); ++k) {
        const double x0 = xs[k], x1 = xs[k + 1];
        if (x1 - x0 <= 0.0)
            continue;
        const double xm = 0.5 * (x0 + x1);
        const double sm = detail::sqrt_clamped(r * r - xm * xm);
        const double top_is_rect = (by < sm) ? 1.0 : 0.0;
        const double bot_is_rect = (ay > -sm) ? 1.0 : 0.0;
        if (std::min(by, sm) <= std::max(ay, -sm))
            continue;  // empty chord on this interval
        double piece = 0.0;
        if (top_is_rect != 0.0)
            piece += by * (x1 - x0);
        else
            piece += detail::circ_int(x1, r) - detail::circ_int(x0, r);
        if (bot_is_rect != 0.0)
            piece -= ay * (x1 - x0);
        else
            piece += detail::circ_int(x1, r) - detail::circ_int(x0, r);
        area += piece;
    }
    return area;
}

// Exact circle-cell intersection fractions; C1 is the disk interior.
inline void init_circle(VofField& field, const Vec2& center, double r) {
    const StructuredGrid& g = field.grid;
    if (center.x - r <= g.x0 || center.x + r >= g.x0 + g.lx || center.y - r <= g.y0 ||
        center.y + r >= g.y0 + g.ly)
        throw std::invalid_argument("init_circle: circle touches the domain boundary");
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double x0 = g.x0 + i * g.h, y0 = g.y0 + j * g.h;
            const double dx = std::max(std::abs(center.x - (x0 + 0.5 * g.h)) - 0.5 * g.h, 0.0);
            const double dy = std::max(std::abs(center.y - (y0 + 0.5 * g.h)) - 0.5 * g.h, 0.0);
            const double dmax = std::hypot(std::abs(center.x - (x0 + 0.5 * g.h)) + 0.5 * g.h,
                                           std::abs(center.y - (y0 + 0.5 * g.h)) + 0.5 * g.h);
            if (std::hypot(dx, dy) >= r)
                field.at(i, j) = 0.0;
            else if (dmax <= r)
                field.at(i, j) = 1.0;
            else
                field.at(i, j) =
                    circle_rect_area(center, r, x0, y0, x0 + g.h, y0 + g.h) / g.cell_volume();
        }
}

}  // namespace vof2d

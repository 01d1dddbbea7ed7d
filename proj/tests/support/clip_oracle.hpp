#pragma once

// Brute-force geometric oracles used only by tests. Independent of the
// closed-form kernel in vof2d/plic.hpp: areas come from half-plane clipping
// of explicit polygons and the shoelace formula.

#include <cmath>
#include <vector>

#include "vof2d/core.hpp"
#include "vof2d/plic.hpp"

namespace vof2d::testing {

struct Rect {
    double x0, y0, x1, y1;
    double area() const { return (x1 - x0) * (y1 - y0); }
};

using Polygon = std::vector<Vec2>;

inline double polygon_area(const Polygon& p) {
    double a = 0.0;
    const size_t n = p.size();
    for (size_t i = 0; i < n; ++i) {
        const Vec2& u = p[i];
        const Vec2& v = p[(i + 1) % n];
        a += u.x * v.y - v.x * u.y;
    }
    return 0.5 * std::abs(a);
}

// Sutherland-Hodgman clip of polygon p against the half-plane keep(x) <= c
// where keep(x) = n.x.
inline Polygon clip_halfplane(const Polygon& p, const Vec2& n, double c) {
    Polygon out;
    const size_t cnt = p.size();
    for (size_t i = 0; i < cnt; ++i) {
        const Vec2& a = p[i];
        const Vec2& b = p[(i + 1) % cnt];
        const double fa = n.dot(a) - c;
        const double fb = n.dot(b) - c;
        const bool ina = fa <= 0.0;
        const bool inb = fb <= 0.0;
        if (ina)
            out.push_back(a);
        if (ina != inb) {
            const double t = fa / (fa - fb);
            out.push_back(a + t * (b - a));
        }
    }
    return out;
}

// Exact area of { x : n.(x - (1/2,1/2)) <= d } intersected with rect
// (rect given in unit-cell coordinates, rect must lie inside [0,1]^2).
inline double clip_area_oracle(const InterfaceLine& line, const Rect& rect) {
    if (rect.area() <= 0.0)
        return 0.0;
    Polygon poly = {{rect.x0, rect.y0}, {rect.x1, rect.y0}, {rect.x1, rect.y1}, {rect.x0, rect.y1}};
    const double c = line.distance + line.normal.dot({0.5, 0.5});
    return polygon_area(clip_halfplane(poly, line.normal, c));
}

// Area of disk(center, r) within an axis-aligned rectangle, computed by
// clipping a fine polygonal approximation of the circle. With nseg vertices
// the missing lens area is O(r^2 / nseg^2); nseg = 2e5 gives ~1e-10 for
// r <= 1. Used to validate the analytic circle initializer.
inline double circle_rect_area_oracle(const Vec2& center, double r, const Rect& rect,
                                      int nseg = 200000) {
    Polygon poly;
    poly.reserve(static_cast<size_t>(nseg));
    for (int k = 0; k < nseg; ++k) {
        const double th = 2.0 * M_PI * k / nseg;
        poly.push_back({center.x + r * std::cos(th), center.y + r * std::sin(th)});
    }
    poly = clip_halfplane(poly, {1.0, 0.0}, rect.x1);
    poly = clip_halfplane(poly, {-1.0, 0.0}, -rect.x0);
    poly = clip_halfplane(poly, {0.0, 1.0}, rect.y1);
    poly = clip_halfplane(poly, {0.0, -1.0}, -rect.y0);
    if (poly.size() < 3)
        return 0.0;
    return polygon_area(poly);
}

}  // namespace vof2d::testing

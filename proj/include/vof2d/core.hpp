#pragma once

// Small shared utilities: 2-vectors, deterministic reductions, and a
// chunked parallel-for whose results do not depend on the thread count.

#include <cmath>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace vof2d {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator-() const { return {-x, -y}; }

    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double norm1() const { return std::abs(x) + std::abs(y); }
    double norm2() const { return std::hypot(x, y); }
    double norm_inf() const { return std::max(std::abs(x), std::abs(y)); }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

// Neumaier-compensated accumulator. Used for the conservation sums so the
// result does not depend on intermediate rounding of long loops; the visit
// order is always fixed (cell index order).
class KahanSum {
  public:
    void add(double v) {
        double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// Global worker count. Purely a speed knob; loop results are identical for
// any value because chunk boundaries are fixed (see parallel_chunks).
inline int& thread_count() {
    static int n = 1;
    return n;
}

// Runs fn(chunk_begin, chunk_end) over [0, n) split into fixed-size chunks.
// Chunks are assigned round-robin to workers, so every chunk covers the same
// index range no matter how many threads execute them. Callers must only
// write to disjoint per-index outputs (or per-chunk partials combined in
// index order afterwards).
inline void parallel_chunks(std::int64_t n, const std::function<void(std::int64_t, std::int64_t)>& fn) {
    if (n <= 0)
        return;
    const std::int64_t chunk = 256;
    const std::int64_t nchunks = (n + chunk - 1) / chunk;
    const int workers = std::max(1, thread_count());
    if (workers == 1 || nchunks == 1) {
        for (std::int64_t c = 0; c < nchunks; ++c)
            fn(c * chunk, std::min(n, (c + 1) * chunk));
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<size_t>(workers));
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([=, &fn, &errors]() {
            try {
                for (std::int64_t c = w; c < nchunks; c += workers)
                    fn(c * chunk, std::min(n, (c + 1) * chunk));
            } catch (...) {
                errors[static_cast<size_t>(w)] = std::current_exception();
            }
        });
    }
    for (auto& t : pool)
        t.join();
    for (const auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

}  // namespace vof2d

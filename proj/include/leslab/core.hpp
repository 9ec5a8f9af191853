#ifndef LESLAB_CORE_HPP
#define LESLAB_CORE_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace leslab {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double norm() const { return std::hypot(x, y); }
    // z-component of the 2D cross product
    double cross(const Vec2& o) const { return x * o.y - y * o.x; }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

/// Execution mode for element-loop kernels. Serial iterates elements in
/// order; Parallel computes per-element work concurrently and merges in
/// element order, so both modes produce bitwise-identical results. The
/// process-wide default can be overridden per call site.
enum class ExecMode { Serial, Parallel };

namespace exec {
void set_default_mode(ExecMode m);
ExecMode default_mode();
}  // namespace exec

/// Thrown when an operation's precondition is violated (bad sizes, invalid
/// parameter ranges, mismatched meshes).
class precondition_error : public std::invalid_argument {
public:
    explicit precondition_error(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Thrown when a solve or mesh construction fails numerically
/// (singular factorization, degenerate elements, non-manifold carving).
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace leslab

#endif

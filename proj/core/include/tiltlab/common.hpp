#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace tiltlab {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2& operator+=(const Vec2& o) {
        x += o.x;
        y += o.y;
        return *this;
    }
    Vec2& operator-=(const Vec2& o) {
        x -= o.x;
        y -= o.y;
        return *this;
    }
    bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }

    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double norm() const { return std::sqrt(x * x + y * y); }
    double norm_sq() const { return x * x + y * y; }

    // Zero-safe: returns (0,0) for the zero vector.
    Vec2 normalized() const {
        double n = norm();
        return n > 0.0 ? Vec2{x / n, y / n} : Vec2{};
    }
};

inline Vec2 operator*(double s, const Vec2& v) { return {v.x * s, v.y * s}; }

inline double clamp(double v, double lo, double hi) { return std::min(hi, std::max(lo, v)); }
inline float clampf(float v, float lo, float hi) { return std::min(hi, std::max(lo, v)); }
inline double lerp(double a, double b, double t) { return a + (b - a) * t; }

/// Small grayscale image, row 0 = top (north), values in [0,1].
struct Image {
    int width = 0;
    int height = 0;
    std::vector<float> pixels;  // row-major

    Image() = default;
    Image(int w, int h) : width(w), height(h), pixels(static_cast<size_t>(w) * h, 0.0f) {}

    float& at(int row, int col) { return pixels[static_cast<size_t>(row) * width + col]; }
    float at(int row, int col) const { return pixels[static_cast<size_t>(row) * width + col]; }
};

}  // namespace tiltlab

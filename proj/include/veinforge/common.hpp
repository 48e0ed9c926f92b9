#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace veinforge {

// Base class for all library failures. CLI maps IoError to exit 2 and
// everything else to exit 1.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// File / stream level problems (missing file, short read, ...).
class IoError : public Error {
public:
    using Error::Error;
};

// Malformed input bytes (bad PGM header, bad manifest line, ...).
class FormatError : public Error {
public:
    using Error::Error;
};

// Parameter outside its documented range.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Violated geometric or numeric contract (containment, saturation, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double cross(const Vec2& o) const { return x * o.y - y * o.x; }
    double norm() const { return std::sqrt(x * x + y * y); }
};

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm() const { return std::sqrt(dot(*this)); }
    Vec3 normalized() const {
        double n = norm();
        return n > 0.0 ? Vec3{x / n, y / n, z / n} : Vec3{};
    }
};

constexpr double kPi = 3.14159265358979323846;

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

} // namespace veinforge

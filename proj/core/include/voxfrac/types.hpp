#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace voxfrac {

using Vec3d = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Mat9 = Eigen::Matrix<double, 9, 9>;
using Vec9 = Eigen::Matrix<double, 9, 1>;

using Index3 = std::array<int, 3>;

/// Axis-aligned integer box, [lo, hi) per axis.
struct Box3i {
    Index3 lo{0, 0, 0};
    Index3 hi{0, 0, 0};

    int extent(int axis) const { return hi[axis] - lo[axis]; }
    long volume() const {
        return static_cast<long>(extent(0)) * extent(1) * extent(2);
    }
    bool contains(const Index3& p) const {
        for (int a = 0; a < 3; ++a)
            if (p[a] < lo[a] || p[a] >= hi[a]) return false;
        return true;
    }
};

/// Axis-aligned box in physical coordinates (mm), [lo, hi] closed.
struct Box3d {
    Vec3d lo = Vec3d::Zero();
    Vec3d hi = Vec3d::Zero();

    Vec3d extent() const { return hi - lo; }
    double volume() const {
        const Vec3d e = extent();
        return e.x() * e.y() * e.z();
    }
    Vec3d center() const { return 0.5 * (lo + hi); }
};

/// Error for invalid user input (files, configuration, scheme tags).
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// Error for violated numerical preconditions or failed solves.
class NumericsError : public std::runtime_error {
public:
    explicit NumericsError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace voxfrac

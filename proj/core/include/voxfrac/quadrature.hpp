#pragma once

#include <vector>

#include "voxfrac/types.hpp"

namespace voxfrac {

/// Tensor-product Gauss-Legendre rule on [-1,1]^3.
struct QuadratureRule {
    std::vector<Vec3d> points;
    std::vector<double> weights;
};

/// 1D Gauss-Legendre abscissae / weights on [-1,1]; n in [1,4].
const std::vector<double>& gauss_points_1d(int n);
const std::vector<double>& gauss_weights_1d(int n);

/// Tensor-product rule with n points per axis (x fastest).
const QuadratureRule& gauss_rule(int points_per_axis);

/// Points per axis used to integrate elements of the given shape order.
inline int rule_for_order(int order) { return order + 1; }

}  // namespace voxfrac

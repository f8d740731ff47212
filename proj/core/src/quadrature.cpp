#include <array>
#include <cmath>

#include "voxfrac/quadrature.hpp"

namespace voxfrac {

namespace {

std::array<std::vector<double>, 5> make_points() {
    std::array<std::vector<double>, 5> p;
    p[1] = {0.0};
    const double a2 = 1.0 / std::sqrt(3.0);
    p[2] = {-a2, a2};
    const double a3 = std::sqrt(3.0 / 5.0);
    p[3] = {-a3, 0.0, a3};
    const double b = 2.0 / 7.0 * std::sqrt(6.0 / 5.0);
    const double a4o = std::sqrt(3.0 / 7.0 + b);
    const double a4i = std::sqrt(3.0 / 7.0 - b);
    p[4] = {-a4o, -a4i, a4i, a4o};
    return p;
}

std::array<std::vector<double>, 5> make_weights() {
    std::array<std::vector<double>, 5> w;
    w[1] = {2.0};
    w[2] = {1.0, 1.0};
    w[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
    const double wo = (18.0 - std::sqrt(30.0)) / 36.0;
    const double wi = (18.0 + std::sqrt(30.0)) / 36.0;
    w[4] = {wo, wi, wi, wo};
    return w;
}

int checked(int n) {
    if (n < 1 || n > 4)
        throw InputError("quadrature: points per axis must lie in [1,4]");
    return n;
}

}  // namespace

const std::vector<double>& gauss_points_1d(int n) {
    static const auto pts = make_points();
    return pts[static_cast<std::size_t>(checked(n))];
}

const std::vector<double>& gauss_weights_1d(int n) {
    static const auto wts = make_weights();
    return wts[static_cast<std::size_t>(checked(n))];
}

const QuadratureRule& gauss_rule(int points_per_axis) {
    static std::array<QuadratureRule, 5> rules = [] {
        std::array<QuadratureRule, 5> r;
        for (int n = 1; n <= 4; ++n) {
            const auto& x = gauss_points_1d(n);
            const auto& w = gauss_weights_1d(n);
            QuadratureRule& rule = r[static_cast<std::size_t>(n)];
            for (int k = 0; k < n; ++k)
                for (int j = 0; j < n; ++j)
                    for (int i = 0; i < n; ++i) {
                        rule.points.emplace_back(x[static_cast<std::size_t>(i)],
                                                 x[static_cast<std::size_t>(j)],
                                                 x[static_cast<std::size_t>(k)]);
                        rule.weights.push_back(w[static_cast<std::size_t>(i)] *
                                               w[static_cast<std::size_t>(j)] *
                                               w[static_cast<std::size_t>(k)]);
                    }
        }
        return r;
    }();
    return rules[static_cast<std::size_t>(checked(points_per_axis))];
}

}  // namespace voxfrac

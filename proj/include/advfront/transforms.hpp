#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "advfront/matrix.hpp"

namespace advfront {

/// Input-transformation defense applied in front of the classifier.
///
/// Attacks see the transform through a straight-through gradient: the
/// Jacobian of the transform is taken to be the identity (BPDA).
struct InputTransform {
    enum class Kind { identity, bit_depth, median_smooth };

    Kind kind = Kind::identity;
    int bits = 8;                 // bit_depth: 1..8
    std::size_t window = 3;       // median_smooth: odd
    std::size_t image_side = 0;   // median_smooth: d == image_side^2

    static InputTransform identity() { return {}; }
    static InputTransform bit_depth(int bits);
    static InputTransform median_smooth(std::size_t window, std::size_t image_side);

    /// Parses `identity`, `bits:<k>` or `median:<w>`. The image side of a
    /// median transform is derived from `feature_dim`, which must be a
    /// perfect square.
    static InputTransform parse(std::string_view text, std::size_t feature_dim);

    /// Throws ConfigError when the parameters are invalid for inputs of
    /// width `feature_dim`.
    void validate(std::size_t feature_dim) const;

    std::string describe() const;

    friend bool operator==(const InputTransform&, const InputTransform&) = default;
};

/// Applies the transform row by row. Output stays in [0,1]^d.
Matrix apply(const InputTransform& transform, const Matrix& batch);

/// Gradient rule used by attacks when differentiating through a transform.
enum class GradientRule { exact, straight_through };

/// Identity is differentiated exactly; every other transform uses the
/// straight-through rule.
GradientRule gradient_passthrough(const InputTransform& transform);

const char* to_string(GradientRule rule);

}  // namespace advfront

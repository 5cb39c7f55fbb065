#include "advfront/transforms.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <vector>

#include "advfront/error.hpp"

namespace advfront {

namespace {

std::size_t parse_count(std::string_view text, std::string_view what) {
    std::size_t value = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end) {
        throw ConfigError("--transform: cannot parse " + std::string(what) + " from '" + std::string(text) + "'");
    }
    return value;
}

std::size_t exact_sqrt(std::size_t d) {
    auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(d))));
    return side * side == d ? side : 0;
}

void median_rows(const InputTransform& t, const Matrix& in, Matrix& out) {
    const std::size_t side = t.image_side;
    const auto half = static_cast<std::ptrdiff_t>(t.window / 2);
    const auto last = static_cast<std::ptrdiff_t>(side) - 1;
    std::vector<double> window;
    window.reserve(t.window * t.window);
    for (std::size_t r = 0; r < in.rows(); ++r) {
        const auto src = in.row(r);
        auto dst = out.row(r);
        for (std::ptrdiff_t y = 0; y <= last; ++y) {
            for (std::ptrdiff_t x = 0; x <= last; ++x) {
                window.clear();
                for (std::ptrdiff_t dy = -half; dy <= half; ++dy) {
                    const auto yy = std::clamp(y + dy, std::ptrdiff_t{0}, last);
                    for (std::ptrdiff_t dx = -half; dx <= half; ++dx) {
                        const auto xx = std::clamp(x + dx, std::ptrdiff_t{0}, last);
                        window.push_back(src[static_cast<std::size_t>(yy) * side + static_cast<std::size_t>(xx)]);
                    }
                }
                auto mid = window.begin() + static_cast<std::ptrdiff_t>(window.size() / 2);
                std::nth_element(window.begin(), mid, window.end());
                dst[static_cast<std::size_t>(y) * side + static_cast<std::size_t>(x)] = *mid;
            }
        }
    }
}

}  // namespace

InputTransform InputTransform::bit_depth(int bits) {
    InputTransform t;
    t.kind = Kind::bit_depth;
    t.bits = bits;
    if (bits < 1 || bits > 8) {
        throw ConfigError("--transform: bit depth must be in 1..8, got " + std::to_string(bits));
    }
    return t;
}

InputTransform InputTransform::median_smooth(std::size_t window, std::size_t image_side) {
    InputTransform t;
    t.kind = Kind::median_smooth;
    t.window = window;
    t.image_side = image_side;
    if (window == 0 || window % 2 == 0) {
        throw ConfigError("--transform: median window must be odd, got " + std::to_string(window));
    }
    return t;
}

InputTransform InputTransform::parse(std::string_view text, std::size_t feature_dim) {
    if (text == "identity" || text.empty()) {
        return identity();
    }
    const auto colon = text.find(':');
    const auto head = text.substr(0, colon);
    const auto arg = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
    if (head == "bits") {
        return bit_depth(static_cast<int>(parse_count(arg, "bit depth")));
    }
    if (head == "median") {
        const std::size_t side = exact_sqrt(feature_dim);
        if (side == 0) {
            throw ConfigError("--transform: median smoothing needs square images, but feature dimension " +
                              std::to_string(feature_dim) + " is not a perfect square");
        }
        auto t = median_smooth(parse_count(arg, "median window"), side);
        t.validate(feature_dim);
        return t;
    }
    throw ConfigError("--transform: unknown transform '" + std::string(text) +
                      "' (expected identity|bits:<k>|median:<w>)");
}

void InputTransform::validate(std::size_t feature_dim) const {
    switch (kind) {
        case Kind::identity:
            return;
        case Kind::bit_depth:
            if (bits < 1 || bits > 8) {
                throw ConfigError("--transform: bit depth must be in 1..8");
            }
            return;
        case Kind::median_smooth:
            if (window == 0 || window % 2 == 0) {
                throw ConfigError("--transform: median window must be odd");
            }
            if (image_side * image_side != feature_dim) {
                throw ConfigError("--transform: median smoothing needs d = side^2, got d=" +
                                  std::to_string(feature_dim) + " side=" + std::to_string(image_side));
            }
            return;
    }
}

std::string InputTransform::describe() const {
    switch (kind) {
        case Kind::identity:
            return "identity";
        case Kind::bit_depth:
            return "bits:" + std::to_string(bits);
        case Kind::median_smooth:
            return "median:" + std::to_string(window);
    }
    return "identity";
}

Matrix apply(const InputTransform& transform, const Matrix& batch) {
    transform.validate(batch.cols());
    switch (transform.kind) {
        case InputTransform::Kind::identity:
            return batch;
        case InputTransform::Kind::bit_depth: {
            const double levels = std::ldexp(1.0, transform.bits) - 1.0;
            Matrix out = batch;
            for (double& v : out.data()) {
                v = std::clamp(std::round(std::clamp(v, 0.0, 1.0) * levels) / levels, 0.0, 1.0);
            }
            return out;
        }
        case InputTransform::Kind::median_smooth: {
            Matrix out(batch.rows(), batch.cols());
            median_rows(transform, batch, out);
            return out;
        }
    }
    return batch;
}

GradientRule gradient_passthrough(const InputTransform& transform) {
    return transform.kind == InputTransform::Kind::identity ? GradientRule::exact : GradientRule::straight_through;
}

const char* to_string(GradientRule rule) {
    return rule == GradientRule::exact ? "exact" : "straight-through";
}

}  // namespace advfront

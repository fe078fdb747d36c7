// Copyright 2026 The vpattack Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vpattack/core.hpp"
#include "vpattack/dictionary.hpp"
#include "vpattack/font.hpp"

namespace vpattack {

using Mat3 = Eigen::Matrix3d;

struct SignSpec {
    std::string text;
    Rgb letter_color = kBlack;
    Rgb background_color = kWhite;
    int font_scale = 1;  ///< integer glyph multiplier, keeps rasters bit-exact
    int padding = 3;     ///< margin around the text block, in unscaled pixels

    void validate() const {
        if (text.empty()) {
            throw InvalidParameter("sign text must not be empty");
        }
        if (font_scale < 1) {
            throw InvalidParameter("font_scale must be >= 1");
        }
        if (padding < 0) {
            throw InvalidParameter("padding must be >= 0");
        }
    }
};

/// Similarity transform of the sign about its own center, anchored at the
/// top-left corner of the scenario placement region.
struct PlacementSpec {
    double scale = 1.0;
    double rotation = 0.0;  ///< radians
    double tx = 0.0;        ///< pixels
    double ty = 0.0;
};

/// Per-pixel coverage in [0, 1].
class AttackMask {
public:
    AttackMask() = default;
    AttackMask(int width, int height, double fill = 0.0) : width_(width), height_(height) {
        if (width <= 0 || height <= 0) {
            throw InvalidParameter("mask dimensions must be positive");
        }
        values_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
    }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    double at(int x, int y) const { return values_[index(x, y)]; }
    void set(int x, int y, double v) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw InvalidParameter("mask value outside [0, 1]");
        }
        values_[index(x, y)] = v;
    }
    const std::vector<double>& values() const noexcept { return values_; }

    /// Number of pixels with nonzero coverage.
    std::size_t support() const noexcept {
        return static_cast<std::size_t>(std::count_if(values_.begin(), values_.end(), [](double v) { return v > 0.0; }));
    }

    friend bool operator==(const AttackMask&, const AttackMask&) = default;

private:
    std::size_t index(int x, int y) const {
        if (x < 0 || y < 0 || x >= width_ || y >= height_) {
            throw InvalidParameter("mask coordinate out of bounds");
        }
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<double> values_;
};

/// pi: one dictionary phrase plus the perceptual features applied to it.
struct AttackParams {
    std::size_t vp_index = 0;
    SignSpec sign;
    PlacementSpec placement;
    double blend_weight = 1.0;  ///< lambda in (0, 1]

    /// Checks that vp_index is valid and that sign.text is the phrase it names.
    void validate(const Dictionary& dictionary) const {
        if (vp_index >= dictionary.size()) {
            throw InvalidParameter("vp_index " + std::to_string(vp_index) + " outside dictionary of size " +
                                   std::to_string(dictionary.size()));
        }
        if (sign.text != dictionary.at(vp_index).phrase) {
            throw InvalidParameter("sign text '" + sign.text + "' does not match dictionary phrase '" +
                                   dictionary.at(vp_index).phrase + "'");
        }
        if (!(blend_weight > 0.0 && blend_weight <= 1.0)) {
            throw InvalidParameter("blend weight must lie in (0, 1]");
        }
        if (!(placement.scale > 0.0)) {
            throw InvalidParameter("placement scale must be positive");
        }
        sign.validate();
    }
};

// ---------------------------------------------------------------------------
// Geometry
// ---------------------------------------------------------------------------

inline Mat3 similarity_matrix(double s, double theta, double tx, double ty) {
    if (!(s > 0.0)) {
        throw InvalidParameter("similarity scale must be positive");
    }
    const double c = std::cos(theta);
    const double n = std::sin(theta);
    Mat3 a;
    a << s * c, -s * n, tx,
         s * n,  s * c, ty,
         0.0,    0.0,   1.0;
    return a;
}

inline Mat3 translation_matrix(double tx, double ty) {
    Mat3 t = Mat3::Identity();
    t(0, 2) = tx;
    t(1, 2) = ty;
    return t;
}

namespace detail {

inline Mat3 checked_inverse(const Mat3& m) {
    const double det = m.determinant();
    if (!std::isfinite(det) || std::abs(det) < 1e-12) {
        throw InvalidParameter("transform matrix is singular");
    }
    return m.inverse();
}

/// Calls fn(u, v, sx, sy) for every output pixel whose pre-image sample
/// (nearest neighbour on pixel centres) falls inside the src_w x src_h source.
template <typename Fn>
void for_each_preimage(const Mat3& matrix, int src_w, int src_h, int out_w, int out_h, Fn&& fn) {
    const Mat3 inv = checked_inverse(matrix);
    for (int v = 0; v < out_h; ++v) {
        for (int u = 0; u < out_w; ++u) {
            const Eigen::Vector3d p = inv * Eigen::Vector3d(u + 0.5, v + 0.5, 1.0);
            const double x = p.x() / p.z();
            const double y = p.y() / p.z();
            if (!(x >= 0.0 && y >= 0.0 && x < src_w && y < src_h)) {
                continue;
            }
            fn(u, v, static_cast<int>(std::floor(x)), static_cast<int>(std::floor(y)));
        }
    }
}

}  // namespace detail

/// Output value at x is mask(A^-1 x), nearest neighbour; outside samples are 0.
inline AttackMask warp_mask(const AttackMask& mask, const Mat3& matrix, int out_w, int out_h) {
    AttackMask out(out_w, out_h, 0.0);
    detail::for_each_preimage(matrix, mask.width(), mask.height(), out_w, out_h,
                              [&](int u, int v, int sx, int sy) { out.set(u, v, mask.at(sx, sy)); });
    return out;
}

inline AttackMask warp_mask(const AttackMask& mask, const Mat3& matrix) {
    return warp_mask(mask, matrix, mask.width(), mask.height());
}

inline Image warp_image(const Image& img, const Mat3& matrix, int out_w, int out_h) {
    Image out(out_w, out_h, kBlack);
    detail::for_each_preimage(matrix, img.width(), img.height(), out_w, out_h,
                              [&](int u, int v, int sx, int sy) { out.set(u, v, img.at(sx, sy)); });
    return out;
}

// ---------------------------------------------------------------------------
// Sign rasterization
// ---------------------------------------------------------------------------

/// Natural sign size for `spec`: text block plus padding. Always even.
inline std::pair<int, int> sign_canvas_size(const SignSpec& spec) {
    spec.validate();
    const int s = spec.font_scale;
    const int w = (static_cast<int>(spec.text.size()) * font::kGlyphWidth + 2 * spec.padding) * s;
    const int h = (font::kGlyphHeight + 2 * spec.padding) * s;
    return {w + (w % 2), h + (h % 2)};
}

/// Background-filled sign with the text centred in letter_color; the mask
/// covers the full sign rectangle.
inline std::pair<Image, AttackMask> rasterize_sign(const SignSpec& spec, int canvas_w, int canvas_h) {
    spec.validate();
    std::string missing;
    for (const char c : spec.text) {
        if (!font::has_glyph(c) && missing.find(c) == std::string::npos) {
            missing.push_back(c);
        }
    }
    if (!missing.empty()) {
        throw UnsupportedGlyph(missing);
    }
    const int s = spec.font_scale;
    const int text_w = static_cast<int>(spec.text.size()) * font::kGlyphWidth * s;
    const int text_h = font::kGlyphHeight * s;
    if (canvas_w < text_w || canvas_h < text_h) {
        throw InvalidParameter("canvas " + std::to_string(canvas_w) + "x" + std::to_string(canvas_h) +
                               " too small for text block " + std::to_string(text_w) + "x" + std::to_string(text_h));
    }

    Image img(canvas_w, canvas_h, spec.background_color);
    const int ox = (canvas_w - text_w) / 2;
    const int oy = (canvas_h - text_h) / 2;
    for (std::size_t i = 0; i < spec.text.size(); ++i) {
        const auto g = *font::glyph(spec.text[i]);
        const int gx = ox + static_cast<int>(i) * font::kGlyphWidth * s;
        for (int row = 0; row < font::kGlyphHeight; ++row) {
            for (int col = 0; col < font::kGlyphWidth; ++col) {
                if (!font::glyph_bit(g, col, row)) {
                    continue;
                }
                for (int dy = 0; dy < s; ++dy) {
                    for (int dx = 0; dx < s; ++dx) {
                        img.set(gx + col * s + dx, oy + row * s + dy, spec.letter_color);
                    }
                }
            }
        }
    }
    return {std::move(img), AttackMask(canvas_w, canvas_h, 1.0)};
}

inline std::pair<Image, AttackMask> rasterize_sign(const SignSpec& spec) {
    const auto [w, h] = sign_canvas_size(spec);
    return rasterize_sign(spec, w, h);
}

// ---------------------------------------------------------------------------
// Compositing
// ---------------------------------------------------------------------------

namespace detail {

inline std::uint8_t round_half_up(double v) {
    return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
}

}  // namespace detail

/// out = (1-m)*[(1-lambda*r)*base + lambda*r*blend] + m*sign, with r the optional
/// blend region (0 everywhere when absent).
inline Image composite(const Image& base, const Image& sign, const AttackMask& mask, double lambda,
                       Rgb blend_target, const AttackMask* blend_region = nullptr) {
    const auto same_shape = [&](int w, int h) { return w == base.width() && h == base.height(); };
    if (!same_shape(sign.width(), sign.height()) || !same_shape(mask.width(), mask.height()) ||
        (blend_region != nullptr && !same_shape(blend_region->width(), blend_region->height()))) {
        throw InvalidParameter("composite: base, sign and mask shapes differ");
    }
    if (!(lambda > 0.0 && lambda <= 1.0)) {
        throw InvalidParameter("composite: lambda must lie in (0, 1]");
    }
    Image out = base;
    const double bt[3] = {double(blend_target.r), double(blend_target.g), double(blend_target.b)};
    for (int y = 0; y < base.height(); ++y) {
        for (int x = 0; x < base.width(); ++x) {
            const double m = mask.at(x, y);
            const double r = blend_region != nullptr ? blend_region->at(x, y) : 0.0;
            if (m == 0.0 && r == 0.0) {
                continue;
            }
            const Rgb b = base.at(x, y);
            const Rgb s = sign.at(x, y);
            const double bc[3] = {double(b.r), double(b.g), double(b.b)};
            const double sc[3] = {double(s.r), double(s.g), double(s.b)};
            std::uint8_t o[3];
            for (int c = 0; c < 3; ++c) {
                const double outside = (1.0 - lambda * r) * bc[c] + lambda * r * bt[c];
                o[c] = detail::round_half_up((1.0 - m) * outside + m * sc[c]);
            }
            out.set(x, y, {o[0], o[1], o[2]});
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Full attack rendering
// ---------------------------------------------------------------------------

/// What an observer can tell about the rendered sign.
struct SignObservation {
    std::string text;
    Rgb letter_color;
    Rgb background_color;
    double area_fraction = 0.0;     ///< visible sign pixels / image pixels
    double clipped_fraction = 0.0;  ///< part of the footprint cut off by the image border
};

struct RenderedAttack {
    Image image;
    AttackMask mask;  ///< warped sign footprint in image coordinates
    SignObservation observation;
};

/// Sign-local -> image transform: rotate/scale about the sign centre, then
/// translate to the placement anchor plus (tx, ty).
inline Mat3 placement_matrix(const Rect& region, int sign_w, int sign_h, const PlacementSpec& p) {
    const double cx = sign_w / 2.0;
    const double cy = sign_h / 2.0;
    return translation_matrix(region.x, region.y) * translation_matrix(cx, cy) *
           similarity_matrix(p.scale, p.rotation, p.tx, p.ty) * translation_matrix(-cx, -cy);
}

/// Renders a sign spec onto the scenario image; does not consult a dictionary.
inline RenderedAttack render_sign_on(const Scenario& scenario, const SignSpec& sign, const PlacementSpec& placement,
                                     double blend_weight = 1.0) {
    const auto [sign_img, sign_mask] = rasterize_sign(sign);
    const Mat3 m = placement_matrix(scenario.placement_region, sign_img.width(), sign_img.height(), placement);
    const int W = scenario.image.width();
    const int H = scenario.image.height();

    AttackMask warped = warp_mask(sign_mask, m, W, H);
    const std::size_t visible = warped.support();
    if (visible == 0) {
        throw PlacementError("scenario " + scenario.id + ": sign footprint lies entirely outside the image");
    }
    bool hits_region = false;
    const auto& r = scenario.placement_region;
    for (int y = r.y; y < r.y + r.h && !hits_region; ++y) {
        for (int x = r.x; x < r.x + r.w; ++x) {
            if (warped.at(x, y) > 0.0) {
                hits_region = true;
                break;
            }
        }
    }
    if (!hits_region) {
        throw PlacementError("scenario " + scenario.id + ": sign footprint misses the placement region");
    }

    // Unclipped footprint: warp into a canvas covering the transformed corners.
    double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
    for (const auto& [cx, cy] : {std::pair{0.0, 0.0}, std::pair{double(sign_img.width()), 0.0},
                                 std::pair{0.0, double(sign_img.height())},
                                 std::pair{double(sign_img.width()), double(sign_img.height())}}) {
        const Eigen::Vector3d p = m * Eigen::Vector3d(cx, cy, 1.0);
        x0 = std::min(x0, p.x());
        y0 = std::min(y0, p.y());
        x1 = std::max(x1, p.x());
        y1 = std::max(y1, p.y());
    }
    const double fx = std::floor(x0);
    const double fy = std::floor(y0);
    const int fw = std::max(1, static_cast<int>(std::ceil(x1) - fx));
    const int fh = std::max(1, static_cast<int>(std::ceil(y1) - fy));
    const std::size_t total =
        warp_mask(sign_mask, translation_matrix(-fx, -fy) * m, fw, fh).support();

    const Image warped_sign = warp_image(sign_img, m, W, H);
    RenderedAttack out{composite(scenario.image, warped_sign, warped, blend_weight, sign.background_color),
                       std::move(warped),
                       {sign.text, sign.letter_color, sign.background_color,
                        static_cast<double>(visible) / (static_cast<double>(W) * H),
                        total > visible ? 1.0 - static_cast<double>(visible) / static_cast<double>(total) : 0.0}};
    return out;
}

inline RenderedAttack render_attack_detailed(const Scenario& scenario, const AttackParams& pi,
                                             const Dictionary& dictionary) {
    pi.validate(dictionary);
    return render_sign_on(scenario, pi.sign, pi.placement, pi.blend_weight);
}

/// I' = g(I; pi).
inline Image render_attack(const Scenario& scenario, const AttackParams& pi, const Dictionary& dictionary) {
    return render_attack_detailed(scenario, pi, dictionary).image;
}

}  // namespace vpattack

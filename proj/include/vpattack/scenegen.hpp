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

// Synthetic scenario generation: a drone trajectory from a linear
// time-invariant model with Gaussian pose noise, and a flat-shaded top-down
// rasterizer that turns each noisy pose into an annotated Scenario.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "vpattack/ceopt.hpp"
#include "vpattack/core.hpp"

namespace vpattack::scenegen {

using Vec3 = Eigen::Vector3d;
using Mat3d = Eigen::Matrix3d;

struct TrajectoryModel {
    Mat3d A = Mat3d::Identity();
    Mat3d B = Mat3d::Zero();
    Vec3 x0 = Vec3::Zero();
    int steps = 1;
    /// Exogenous inputs u_k. When set, x_{k+1} = A x_k + B u_k; otherwise the
    /// recurrence is x_{k+1} = A x_k + B x_k.
    std::optional<std::vector<Vec3>> inputs;

    void validate() const {
        if (steps < 1) {
            throw InvalidParameter("trajectory needs steps >= 1");
        }
        if (!A.allFinite() || !B.allFinite() || !x0.allFinite()) {
            throw InvalidParameter("trajectory matrices must be finite");
        }
        if (inputs && inputs->size() + 1 < static_cast<std::size_t>(steps)) {
            throw InvalidParameter("trajectory needs steps - 1 exogenous inputs");
        }
    }
};

struct NoiseModel {
    Vec3 mu = Vec3::Zero();
    Mat3d sigma = Mat3d::Zero();
};

struct Pose {
    Vec3 position = Vec3::Zero();  ///< meters; z is altitude
    Vec3 tilt = Vec3::Zero();      ///< roll, pitch, yaw in radians
};

struct EllipsoidAxis {
    Vec3 direction;
    double length = 0.0;  ///< sqrt of the eigenvalue
};

namespace detail {

inline void check_covariance(const Mat3d& sigma) {
    if (!sigma.allFinite()) {
        throw InvalidParameter("covariance must be finite");
    }
    if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-9) {
        throw InvalidParameter("covariance must be symmetric");
    }
    const Eigen::SelfAdjointEigenSolver<Mat3d> es(sigma);
    const double scale = std::max(1.0, sigma.cwiseAbs().maxCoeff());
    if (es.eigenvalues().minCoeff() < -1e-9 * scale) {
        throw InvalidParameter("covariance must be positive semi-definite");
    }
}

/// L with L L^T = sigma, valid for singular sigma.
inline Mat3d psd_factor(const Mat3d& sigma) {
    const Eigen::SelfAdjointEigenSolver<Mat3d> es(sigma);
    return es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

/// Box-Muller on the portable unit generator.
class Gaussian {
public:
    explicit Gaussian(std::mt19937_64 g) : g_(std::move(g)) {}
    double operator()() {
        if (spare_) {
            const double v = *spare_;
            spare_.reset();
            return v;
        }
        double u1 = 0.0;
        while (u1 <= 0.0) {
            u1 = ce::detail::unit(g_);
        }
        const double u2 = ce::detail::unit(g_);
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
        return r * std::cos(2.0 * std::numbers::pi * u2);
    }
    Vec3 vec3() {
        const double a = (*this)();
        const double b = (*this)();
        const double c = (*this)();
        return {a, b, c};
    }

private:
    std::mt19937_64 g_;
    std::optional<double> spare_;
};

}  // namespace detail

/// Principal axes of the noise cloud, longest first.
inline std::array<EllipsoidAxis, 3> noise_ellipsoid(const Mat3d& sigma) {
    detail::check_covariance(sigma);
    const Eigen::SelfAdjointEigenSolver<Mat3d> es(sigma);
    std::array<EllipsoidAxis, 3> axes;
    for (int i = 0; i < 3; ++i) {
        // eigenvalues ascend
        axes[static_cast<std::size_t>(i)] = {es.eigenvectors().col(2 - i).normalized(),
                                             std::sqrt(std::max(0.0, es.eigenvalues()(2 - i)))};
    }
    return axes;
}

/// Noisy observed poses z_k = x_k + w_k, w_k ~ N(mu, sigma), with an
/// independent zero-mean Gaussian tilt of per-axis std `tilt_std`.
inline std::vector<Pose> simulate_trajectory(const TrajectoryModel& model, const NoiseModel& noise,
                                             std::uint64_t seed, const Vec3& tilt_std = Vec3::Zero()) {
    model.validate();
    detail::check_covariance(noise.sigma);
    if ((tilt_std.array() < 0.0).any()) {
        throw InvalidParameter("tilt std must be non-negative");
    }
    const Mat3d L = detail::psd_factor(noise.sigma);
    detail::Gaussian pos_noise(ce::detail::stream(seed, 1, 0));
    detail::Gaussian tilt_noise(ce::detail::stream(seed, 2, 0));
    std::vector<Pose> poses;
    poses.reserve(static_cast<std::size_t>(model.steps));
    Vec3 x = model.x0;
    for (int k = 0; k < model.steps; ++k) {
        Pose p;
        p.position = x + noise.mu + L * pos_noise.vec3();
        p.tilt = tilt_std.cwiseProduct(tilt_noise.vec3());
        poses.push_back(p);
        if (k + 1 == model.steps) {
            break;
        }
        const Vec3 drive = model.inputs ? (*model.inputs)[static_cast<std::size_t>(k)] : x;
        x = model.A * x + model.B * drive;
    }
    return poses;
}

// ---------------------------------------------------------------------------
// Scenes
// ---------------------------------------------------------------------------

/// Ground-plane rectangle in meters.
struct Primitive {
    std::string name;
    double x = 0.0;
    double y = 0.0;
    double w = 1.0;
    double h = 1.0;
    Rgb color{128, 128, 128};
    bool attack_surface = false;
    bool crowded = false;  ///< sprinkle people dots on it
};

struct CameraModel {
    int width = 160;
    int height = 120;
    double pixels_per_meter = 4.0;  ///< at the reference altitude
    double reference_altitude = 50.0;
};

struct SceneSpec {
    std::string application = "landing";
    Rgb ground{96, 120, 80};
    std::vector<Primitive> primitives;
    CameraModel camera;
    int crowd_dots = 14;
    Rgb crowd_color{200, 60, 40};
    int noise_amplitude = 0;  ///< per-pixel uniform jitter, +/- this many levels
    std::string benign_label;
    std::string target_label;

    const Primitive& attack_surface() const {
        const Primitive* found = nullptr;
        for (const auto& p : primitives) {
            if (p.attack_surface) {
                if (found != nullptr) {
                    throw ConfigError("scene spec has more than one attack surface");
                }
                found = &p;
            }
        }
        if (found == nullptr) {
            throw ConfigError("scene spec has no attack surface");
        }
        return *found;
    }

    void validate() const {
        attack_surface();
        if (camera.width <= 0 || camera.height <= 0 || !(camera.pixels_per_meter > 0.0) ||
            !(camera.reference_altitude > 0.0)) {
            throw ConfigError("invalid camera model");
        }
        for (const auto& p : primitives) {
            if (!(p.w > 0.0 && p.h > 0.0)) {
                throw ConfigError("primitive '" + p.name + "' needs positive size");
            }
        }
    }
};

/// Two rooftops seen from above: an empty safe one and a crowded one that
/// carries the attack surface.
inline SceneSpec landing_scene(std::string benign_label, std::string target_label) {
    SceneSpec s;
    s.application = "landing";
    s.primitives = {
        {"road", -40.0, -3.0, 80.0, 6.0, {70, 70, 74}, false, false},
        {"safe_roof", -17.0, -10.0, 12.0, 20.0, {150, 150, 155}, false, false},
        {"crowded_roof", 5.0, -10.0, 12.0, 20.0, {160, 140, 120}, true, true},
    };
    s.benign_label = std::move(benign_label);
    s.target_label = std::move(target_label);
    return s;
}

/// World (meters) <-> image (pixels) for one pose.
class Projection {
public:
    Projection(const CameraModel& cam, const Pose& pose) : cam_(cam), pose_(pose) {
        if (!(pose.position.z() > 0.0)) {
            throw InvalidParameter("camera altitude must be positive");
        }
        const double scale = cam.pixels_per_meter * cam.reference_altitude / pose.position.z();
        const double yaw = pose.tilt.z();
        Eigen::Matrix2d rot;
        rot << std::cos(yaw), -std::sin(yaw), std::sin(yaw), std::cos(yaw);
        Eigen::Matrix2d shear;
        shear << 1.0, std::tan(pose.tilt.x()), std::tan(pose.tilt.y()), 1.0;
        linear_ = shear * rot * scale;
        if (std::abs(linear_.determinant()) < 1e-12) {
            throw InvalidParameter("degenerate camera tilt");
        }
        inverse_ = linear_.inverse();
        centre_ = {cam.width / 2.0, cam.height / 2.0};
    }

    Eigen::Vector2d to_image(double wx, double wy) const {
        return centre_ + linear_ * Eigen::Vector2d(wx - pose_.position.x(), wy - pose_.position.y());
    }
    Eigen::Vector2d to_world(double u, double v) const {
        return Eigen::Vector2d(pose_.position.x(), pose_.position.y()) + inverse_ * (Eigen::Vector2d(u, v) - centre_);
    }

    /// Pixel bounding box of a primitive, clipped to the frame (may be empty).
    Rect footprint(const Primitive& p) const {
        double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
        for (const auto& [cx, cy] : {std::pair{p.x, p.y}, std::pair{p.x + p.w, p.y}, std::pair{p.x, p.y + p.h},
                                     std::pair{p.x + p.w, p.y + p.h}}) {
            const auto q = to_image(cx, cy);
            x0 = std::min(x0, q.x());
            y0 = std::min(y0, q.y());
            x1 = std::max(x1, q.x());
            y1 = std::max(y1, q.y());
        }
        const int ix0 = std::clamp(static_cast<int>(std::floor(x0 + 1e-9)), 0, cam_.width);
        const int iy0 = std::clamp(static_cast<int>(std::floor(y0 + 1e-9)), 0, cam_.height);
        const int ix1 = std::clamp(static_cast<int>(std::ceil(x1 - 1e-9)), 0, cam_.width);
        const int iy1 = std::clamp(static_cast<int>(std::ceil(y1 - 1e-9)), 0, cam_.height);
        return {ix0, iy0, std::max(0, ix1 - ix0), std::max(0, iy1 - iy0)};
    }

private:
    CameraModel cam_;
    Pose pose_;
    Eigen::Matrix2d linear_;
    Eigen::Matrix2d inverse_;
    Eigen::Vector2d centre_;
};

struct GeneratedScene {
    Scenario scenario;
    Pose pose;             ///< pose actually rendered
    bool clamped = false;  ///< pose was re-centred on the attack surface
};

inline constexpr int kMinRegionPixels = 4;

/// Rasterizes the layout from `pose` and annotates the attack surface.
/// Labels must already belong to `space`.
inline GeneratedScene generate_synthetic_scene(const SceneSpec& spec, const Pose& pose, std::uint64_t seed,
                                               const LabelSpace& space, std::string id = "scene") {
    spec.validate();
    const auto& surface = spec.attack_surface();

    GeneratedScene out{{}, pose, false};
    Rect region = Projection(spec.camera, pose).footprint(surface);
    if (region.w < kMinRegionPixels || region.h < kMinRegionPixels) {
        out.pose.position.x() = surface.x + surface.w / 2.0;
        out.pose.position.y() = surface.y + surface.h / 2.0;
        out.clamped = true;
        region = Projection(spec.camera, out.pose).footprint(surface);
        if (region.w < kMinRegionPixels || region.h < kMinRegionPixels) {
            throw ConfigError("attack surface too small to annotate even from a centred pose");
        }
    }
    const Projection proj(spec.camera, out.pose);

    struct Dot {
        double x, y;
    };
    std::vector<Dot> dots;
    auto g = ce::detail::stream(seed, 3, 0);
    for (const auto& p : spec.primitives) {
        if (!p.crowded) {
            continue;
        }
        for (int i = 0; i < spec.crowd_dots; ++i) {
            dots.push_back({p.x + 0.8 + (p.w - 1.6) * ce::detail::unit(g), p.y + 0.8 + (p.h - 1.6) * ce::detail::unit(g)});
        }
    }
    constexpr double kDotRadius = 0.6;

    Image img(spec.camera.width, spec.camera.height, spec.ground);
    auto jitter = ce::detail::stream(seed, 4, 0);
    for (int v = 0; v < img.height(); ++v) {
        for (int u = 0; u < img.width(); ++u) {
            const auto w = proj.to_world(u + 0.5, v + 0.5);
            Rgb c = spec.ground;
            for (const auto& p : spec.primitives) {
                if (w.x() >= p.x && w.x() < p.x + p.w && w.y() >= p.y && w.y() < p.y + p.h) {
                    c = p.color;
                }
            }
            for (const auto& d : dots) {
                if ((w.x() - d.x) * (w.x() - d.x) + (w.y() - d.y) * (w.y() - d.y) <= kDotRadius * kDotRadius) {
                    c = spec.crowd_color;
                }
            }
            if (spec.noise_amplitude > 0) {
                const auto n = static_cast<int>(ce::detail::below(jitter, 2 * spec.noise_amplitude + 1)) - spec.noise_amplitude;
                const auto add = [n](std::uint8_t ch) { return static_cast<std::uint8_t>(std::clamp(ch + n, 0, 255)); };
                c = {add(c.r), add(c.g), add(c.b)};
            }
            img.set(u, v, c);
        }
    }

    out.scenario.id = std::move(id);
    out.scenario.image = std::move(img);
    out.scenario.placement_region = region;
    out.scenario.benign_label = space.label(spec.benign_label);
    out.scenario.target_label = space.label(spec.target_label);
    out.scenario.validate();
    return out;
}

}  // namespace vpattack::scenegen

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

#include "wiggle/homography.hpp"
#include "wiggle/image.hpp"
#include "wiggle/plant.hpp"
#include "wiggle/tracker.hpp"

namespace wiggle {

/// Synthetic gel-pad imaging: a seeded procedural texture warped by the
/// plant's contact reaction so the homography tracker sees displacement that
/// is an affine function of the plant strain.
struct GelRenderConfig {
    std::uint64_t texture_seed = 7;
    /// Pixels of corner displacement per pixel-equivalent strain unit.
    double displacement_gain = 0.5;
    int width = kFrameWidth;
    int height = kFrameHeight;
    /// Must match the lock's strain gain for a calibrated loop.
    double strain_px_per_unit = 10.0;

    void validate() const {
        if (!(displacement_gain > 0.0))
            throw std::invalid_argument("render: displacement gain must be > 0");
        if (width <= 4 || height <= 4) throw std::invalid_argument("render: image too small");
    }
};

namespace render_detail {

inline double uniform01(std::mt19937_64& rng) {
    // Exact 53-bit mantissa mapping; identical on every platform.
    return double(rng() >> 11) * (1.0 / 9007199254740992.0);
}

inline Frame make_texture(const GelRenderConfig& cfg) {
    std::mt19937_64 rng(cfg.texture_seed);
    Frame tex(cfg.width, cfg.height);
    for (auto& p : tex.pixels) p = float(uniform01(rng));

    // Separable box blur, two passes, radius 3: smooth enough for sub-pixel
    // alignment, textured enough for a well-conditioned normal matrix.
    const int radius = 3;
    Frame tmp(cfg.width, cfg.height);
    for (int pass = 0; pass < 2; ++pass) {
        for (int y = 0; y < cfg.height; ++y) {
            for (int x = 0; x < cfg.width; ++x) {
                double acc = 0.0;
                for (int k = -radius; k <= radius; ++k) {
                    const int xx = std::clamp(x + k, 0, cfg.width - 1);
                    acc += tex.at(xx, y);
                }
                tmp.at(x, y) = float(acc / (2 * radius + 1));
            }
        }
        for (int x = 0; x < cfg.width; ++x) {
            for (int y = 0; y < cfg.height; ++y) {
                double acc = 0.0;
                for (int k = -radius; k <= radius; ++k) {
                    const int yy = std::clamp(y + k, 0, cfg.height - 1);
                    acc += tmp.at(x, yy);
                }
                tex.at(x, y) = float(acc / (2 * radius + 1));
            }
        }
    }

    float lo = 1.0f, hi = 0.0f;
    for (float p : tex.pixels) {
        lo = std::min(lo, p);
        hi = std::max(hi, p);
    }
    const float span = std::max(hi - lo, 1e-6f);
    for (auto& p : tex.pixels) p = 0.05f + 0.9f * (p - lo) / span;
    return tex;
}

}  // namespace render_detail

class GelRenderer {
  public:
    explicit GelRenderer(const GelRenderConfig& cfg)
        : cfg_(cfg), texture_(render_detail::make_texture(cfg)) {
        cfg.validate();
        patch_ = patch_corners(cfg.width, cfg.height);
        center_ = Vec2{0.5 * (patch_[0].u + patch_[2].u), 0.5 * (patch_[0].v + patch_[2].v)};
        corner_radius_ = (patch_[0] - center_).norm();
    }

    const Frame& texture() const { return texture_; }

    /// Corner positions of the tracked patch under the given contact reaction:
    /// lateral reaction translates the patch, torque about the insertion axis
    /// rotates it, normal load scales it. Tilt reactions fold into translation
    /// so every mixed-norm component moves the corners at the same gain.
    CornerQuad displaced_corners(const PlantState& state) const {
        const ContactReaction& r = state.reaction;
        const double g = cfg_.displacement_gain * cfg_.strain_px_per_unit;
        const double tu = g * (r.dx_mm + r.dgamma_deg);
        const double tv = g * (r.dz_mm + r.dalpha_deg);
        const double rot = g * r.dbeta_deg / corner_radius_;
        const double scale = 1.0 + g * r.dy_mm / corner_radius_;
        const double c = std::cos(rot), s = std::sin(rot);

        CornerQuad out;
        for (int i = 0; i < 4; ++i) {
            const Vec2 d = patch_[i] - center_;
            out[i] = Vec2{center_.u + scale * (c * d.u - s * d.v) + tu,
                          center_.v + scale * (s * d.u + c * d.v) + tv};
        }
        return out;
    }

    Frame render(const PlantState& state) const {
        const CornerQuad moved = displaced_corners(state);
        if (moved == patch_) return texture_;

        // Features at the patch corners move to `moved`, so the output image
        // pulls texture through the inverse warp.
        const Eigen::Matrix3d H = dlt_from_corners(patch_, moved);
        const Eigen::Matrix3d Hinv = H.inverse();
        Frame out(cfg_.width, cfg_.height);
        for (int y = 0; y < cfg_.height; ++y) {
            for (int x = 0; x < cfg_.width; ++x) {
                const double w = Hinv(2, 0) * x + Hinv(2, 1) * y + Hinv(2, 2);
                const double u = (Hinv(0, 0) * x + Hinv(0, 1) * y + Hinv(0, 2)) / w;
                const double v = (Hinv(1, 0) * x + Hinv(1, 1) * y + Hinv(1, 2)) / w;
                out.at(x, y) = sample_bilinear(texture_, u, v);
            }
        }
        return out;
    }

  private:
    GelRenderConfig cfg_;
    Frame texture_;
    CornerQuad patch_;
    Vec2 center_;
    double corner_radius_ = 1.0;
};

/// Single-shot convenience wrapper; trials keep a GelRenderer instead.
inline Frame render_gel_frame(const GelRenderConfig& cfg, const PlantState& state) {
    return GelRenderer(cfg).render(state);
}

}  // namespace wiggle

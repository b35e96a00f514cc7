#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "wiggle/homography.hpp"
#include "wiggle/image.hpp"

namespace wiggle {

inline constexpr double kStrainDeadbandPx = 3.0;

class UntrackableFrameError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class TrackingLostError : public std::runtime_error {
  public:
    explicit TrackingLostError(const std::string& what,
                               std::size_t frame = std::numeric_limits<std::size_t>::max())
        : std::runtime_error(what), frame_index(frame) {}
    std::size_t frame_index;
};

struct TrackerLimits {
    int max_iterations = 50;
    double epsilon_px = 0.03;  // stop when the largest corner update falls below this
    int grid_stride = 2;       // template sampling stride inside the patch
};

/// Tracked patch: the full frame with 10% margins on every side.
inline CornerQuad patch_corners(int width, int height) {
    const double x0 = 0.1 * width, x1 = 0.9 * width;
    const double y0 = 0.1 * height, y1 = 0.9 * height;
    return {Vec2{x0, y0}, Vec2{x1, y0}, Vec2{x1, y1}, Vec2{x0, y1}};
}

/// Gauss-Newton homography tracker, inverse-compositional formulation on the
/// 4-corner parameterization. Template gradients, steepest-descent images and
/// the 8x8 normal matrix are precomputed on the reference frame; each track()
/// warm-starts from the previous solution.
struct TrackerState {
    Frame reference;
    Homography current_warp;
    TrackerLimits limits;
    bool tracked_once = false;

    // Precomputed alignment tables (reference-frame quantities).
    std::vector<float> template_values;
    std::vector<std::array<float, 2>> grid_points;
    std::vector<std::array<double, 8>> steepest_descent;
    Eigen::LDLT<Eigen::Matrix<double, 8, 8>> hessian;
};

namespace detail {

/// d(warped point)/d(matrix increment params) at the identity warp.
/// Params q parameterize H = [[1+q0, q1, q2], [q3, 1+q4, q5], [q6, q7, 1]].
inline void identity_warp_jacobian(double x, double y, std::array<double, 8>& du,
                                   std::array<double, 8>& dv) {
    du = {x, y, 1.0, 0.0, 0.0, 0.0, -x * x, -x * y};
    dv = {0.0, 0.0, 0.0, x, y, 1.0, -x * y, -y * y};
}

inline Eigen::Matrix<double, 8, 8> corner_from_matrix_params(const CornerQuad& ref) {
    Eigen::Matrix<double, 8, 8> M;
    std::array<double, 8> du, dv;
    for (int i = 0; i < 4; ++i) {
        identity_warp_jacobian(ref[i].u, ref[i].v, du, dv);
        for (int j = 0; j < 8; ++j) {
            M(2 * i, j) = du[j];
            M(2 * i + 1, j) = dv[j];
        }
    }
    return M;
}

}  // namespace detail

inline TrackerState init_tracker(const Frame& first_frame) {
    TrackerState state;
    state.reference = ingest(first_frame);
    const Frame& ref = state.reference;
    const CornerQuad patch = patch_corners(ref.width, ref.height);
    state.current_warp = Homography::identity(patch);

    const int x0 = int(std::lround(patch[0].u)), x1 = int(std::lround(patch[1].u));
    const int y0 = int(std::lround(patch[0].v)), y1 = int(std::lround(patch[2].v));
    const int stride = std::max(1, state.limits.grid_stride);

    // Mean/variance gate: a constant patch has no alignment gradient.
    double sum = 0.0, sum2 = 0.0;
    long n = 0;
    for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
            const double v = ref.at(x, y);
            sum += v;
            sum2 += v * v;
            ++n;
        }
    }
    const double var = sum2 / n - (sum / n) * (sum / n);
    if (var < 1e-6) throw UntrackableFrameError("reference patch has no texture");

    const Eigen::Matrix<double, 8, 8> M = detail::corner_from_matrix_params(patch);
    const Eigen::Matrix<double, 8, 8> M_inv_t = M.inverse().transpose();

    Eigen::Matrix<double, 8, 8> hess = Eigen::Matrix<double, 8, 8>::Zero();
    std::array<double, 8> du, dv;
    for (int y = y0 + 1; y < y1 - 1; y += stride) {
        for (int x = x0 + 1; x < x1 - 1; x += stride) {
            const double gx = 0.5 * (ref.at(x + 1, y) - ref.at(x - 1, y));
            const double gy = 0.5 * (ref.at(x, y + 1) - ref.at(x, y - 1));
            detail::identity_warp_jacobian(x, y, du, dv);
            Eigen::Matrix<double, 8, 1> sd_m;
            for (int j = 0; j < 8; ++j) sd_m(j) = gx * du[j] + gy * dv[j];
            const Eigen::Matrix<double, 8, 1> sd_c = M_inv_t * sd_m;

            state.grid_points.push_back({float(x), float(y)});
            state.template_values.push_back(ref.at(x, y));
            std::array<double, 8> sd;
            for (int j = 0; j < 8; ++j) sd[j] = sd_c(j);
            state.steepest_descent.push_back(sd);
            hess.noalias() += sd_c * sd_c.transpose();
        }
    }

    state.hessian = hess.ldlt();
    if (state.hessian.info() != Eigen::Success ||
        state.hessian.vectorD().minCoeff() < 1e-12) {
        throw UntrackableFrameError("alignment normal matrix is singular");
    }
    return state;
}

/// Register `frame` against the reference; returns the updated warp.
/// Throws TrackingLostError on divergence; the stored warp is left at its
/// pre-call value so the caller can decide policy.
inline Homography track(TrackerState& state, const Frame& frame) {
    if (state.grid_points.empty()) throw std::logic_error("tracker not initialized");
    const Frame img = ingest(frame);
    if (img.width != state.reference.width || img.height != state.reference.height)
        throw std::invalid_argument("frame dimensions do not match reference");

    const CornerQuad entry_corners = state.current_warp.corners;
    const CornerQuad& ref = state.current_warp.reference_corners;
    CornerQuad corners = entry_corners;
    const double patch_width = ref[1].u - ref[0].u;

    auto lose = [&](const char* why) {
        state.current_warp.corners = entry_corners;
        return TrackingLostError(why);
    };

    for (int iter = 0; iter < state.limits.max_iterations; ++iter) {
        Eigen::Matrix3d H;
        try {
            H = dlt_from_corners(ref, corners);
        } catch (const std::runtime_error&) {
            throw lose("tracking lost: degenerate warp");
        }

        std::array<double, 8> g{};
        long valid = 0;
        const std::size_t npts = state.grid_points.size();
        for (std::size_t k = 0; k < npts; ++k) {
            const double x = state.grid_points[k][0];
            const double y = state.grid_points[k][1];
            const double w = H(2, 0) * x + H(2, 1) * y + H(2, 2);
            const double u = (H(0, 0) * x + H(0, 1) * y + H(0, 2)) / w;
            const double v = (H(1, 0) * x + H(1, 1) * y + H(1, 2)) / w;
            if (u < 0.0 || v < 0.0 || u > img.width - 1 || v > img.height - 1) continue;
            const double r = sample_bilinear(img, u, v) - state.template_values[k];
            const auto& sd = state.steepest_descent[k];
            for (int j = 0; j < 8; ++j) g[j] += sd[j] * r;
            ++valid;
        }
        if (valid < long(npts / 4)) throw lose("tracking lost: patch left the frame");

        Eigen::Matrix<double, 8, 1> gvec;
        for (int j = 0; j < 8; ++j) gvec(j) = g[j];
        const Eigen::Matrix<double, 8, 1> delta = state.hessian.solve(gvec);
        if (!delta.allFinite()) throw lose("tracking lost: non-finite update");

        // Inverse composition: current <- current o increment^-1, carried out
        // on the corner positions so the 4-corner state stays exact.
        CornerQuad ref_shifted = ref;
        double step = 0.0;
        for (int i = 0; i < 4; ++i) {
            ref_shifted[i].u += delta(2 * i);
            ref_shifted[i].v += delta(2 * i + 1);
            step = std::max(step, std::hypot(delta(2 * i), delta(2 * i + 1)));
        }
        Eigen::Matrix3d H_inc;
        try {
            H_inc = dlt_from_corners(ref, ref_shifted);
        } catch (const std::runtime_error&) {
            throw lose("tracking lost: degenerate increment");
        }
        const Eigen::Matrix3d H_new = H * H_inc.inverse();
        for (int i = 0; i < 4; ++i) corners[i] = apply_homography(H_new, ref[i]);

        if (step < state.limits.epsilon_px) break;
    }

    Homography result{corners, ref};
    if (result.max_corner_motion(entry_corners) > patch_width)
        throw lose("tracking lost: corner jump exceeds patch width");
    if (!result.well_formed()) throw lose("tracking lost: corners not convex");

    state.current_warp = result;
    state.tracked_once = true;
    return result;
}

/// Raw strain: root of summed squared corner displacements, in pixels.
inline double raw_strain(const TrackerState& state) {
    if (!state.tracked_once) return 0.0;
    return state.current_warp.corner_displacement();
}

inline double apply_deadband(double strain_px) {
    return strain_px < kStrainDeadbandPx ? 0.0 : strain_px;
}

/// Strain with the sub-3px deadband applied.
inline double strain(const TrackerState& state) { return apply_deadband(raw_strain(state)); }

/// Initialize on the first frame, then track each subsequent frame and
/// return the strain time series. Tracking loss is rethrown with the index
/// of the offending frame.
inline std::vector<double> replay(const std::vector<Frame>& frames) {
    if (frames.empty()) throw std::invalid_argument("replay: empty frame sequence");
    TrackerState state = init_tracker(frames[0]);
    std::vector<double> series;
    series.reserve(frames.size() - 1);
    for (std::size_t i = 1; i < frames.size(); ++i) {
        try {
            track(state, frames[i]);
        } catch (const TrackingLostError& e) {
            throw TrackingLostError(std::string(e.what()) + " at frame " + std::to_string(i), i);
        }
        series.push_back(strain(state));
    }
    return series;
}

}  // namespace wiggle

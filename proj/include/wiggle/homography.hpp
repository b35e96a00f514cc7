#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <stdexcept>

namespace wiggle {

struct Vec2 {
    double u = 0.0;
    double v = 0.0;
    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.u + b.u, a.v + b.v}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.u - b.u, a.v - b.v}; }
    double norm() const { return std::hypot(u, v); }
    friend bool operator==(Vec2 a, Vec2 b) { return a.u == b.u && a.v == b.v; }
};

using CornerQuad = std::array<Vec2, 4>;

inline Vec2 apply_homography(const Eigen::Matrix3d& H, Vec2 p) {
    const double w = H(2, 0) * p.u + H(2, 1) * p.v + H(2, 2);
    if (std::abs(w) < 1e-14) throw std::runtime_error("homography maps point to infinity");
    return {(H(0, 0) * p.u + H(0, 1) * p.v + H(0, 2)) / w,
            (H(1, 0) * p.u + H(1, 1) * p.v + H(1, 2)) / w};
}

/// Direct linear transform from 4 point correspondences, normalized H(2,2)=1.
/// Valid for warps that do not move the plane at infinity through the patch,
/// which holds for the near-identity warps the tracker handles.
inline Eigen::Matrix3d dlt_from_corners(const CornerQuad& src, const CornerQuad& dst) {
    Eigen::Matrix<double, 8, 8> A;
    Eigen::Matrix<double, 8, 1> b;
    for (int i = 0; i < 4; ++i) {
        const double x = src[i].u, y = src[i].v;
        const double u = dst[i].u, v = dst[i].v;
        A.row(2 * i) << x, y, 1, 0, 0, 0, -u * x, -u * y;
        A.row(2 * i + 1) << 0, 0, 0, x, y, 1, -v * x, -v * y;
        b(2 * i) = u;
        b(2 * i + 1) = v;
    }
    Eigen::PartialPivLU<Eigen::Matrix<double, 8, 8>> lu(A);
    const Eigen::Matrix<double, 8, 1> h = lu.solve(b);
    if (!h.allFinite() || (A * h - b).cwiseAbs().maxCoeff() > 1e-6)
        throw std::runtime_error("degenerate corner correspondence");
    Eigen::Matrix3d H;
    H << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), 1.0;
    return H;
}

/// Signed double-area of the quad (shoelace, image coordinates).
inline double quad_signed_area(const CornerQuad& q) {
    double a = 0.0;
    for (int i = 0; i < 4; ++i) {
        const Vec2& p = q[i];
        const Vec2& n = q[(i + 1) % 4];
        a += p.u * n.v - n.u * p.v;
    }
    return a;
}

/// True if the quad is strictly convex with the same winding as `ref`.
inline bool quad_convex_same_orientation(const CornerQuad& q, const CornerQuad& ref) {
    const double ref_sign = quad_signed_area(ref) > 0 ? 1.0 : -1.0;
    for (int i = 0; i < 4; ++i) {
        const Vec2 a = q[(i + 1) % 4] - q[i];
        const Vec2 b = q[(i + 2) % 4] - q[(i + 1) % 4];
        const double cross = a.u * b.v - a.v * b.u;
        if (cross * ref_sign <= 0.0) return false;
    }
    return true;
}

/// Planar warp in the 4-corner parameterization: the patch corners'
/// reference positions and their current positions fully determine the
/// implied 3x3 matrix.
struct Homography {
    CornerQuad corners;
    CornerQuad reference_corners;

    static Homography identity(const CornerQuad& ref) { return {ref, ref}; }

    bool is_identity() const { return corners == reference_corners; }

    Eigen::Matrix3d matrix() const { return dlt_from_corners(reference_corners, corners); }

    /// Root of summed squared corner displacements (pixels).
    double corner_displacement() const {
        double s = 0.0;
        for (int i = 0; i < 4; ++i) {
            const Vec2 d = corners[i] - reference_corners[i];
            s += d.u * d.u + d.v * d.v;
        }
        return std::sqrt(s);
    }

    double max_corner_motion(const CornerQuad& from) const {
        double m = 0.0;
        for (int i = 0; i < 4; ++i) m = std::max(m, (corners[i] - from[i]).norm());
        return m;
    }

    bool well_formed() const { return quad_convex_same_orientation(corners, reference_corners); }
};

}  // namespace wiggle

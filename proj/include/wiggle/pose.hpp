#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace wiggle {

inline constexpr std::size_t kPoseDims = 6;

/// 6-DoF key-tip pose. Translation in meters; orientation as x-y-z intrinsic
/// Euler angles in radians. Channel order: x, y, z, alpha, beta, gamma.
struct Pose6 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;

    double& operator[](std::size_t i) {
        switch (i) {
            case 0: return x;
            case 1: return y;
            case 2: return z;
            case 3: return alpha;
            case 4: return beta;
            case 5: return gamma;
        }
        throw std::out_of_range("Pose6 index");
    }

    double operator[](std::size_t i) const {
        return const_cast<Pose6&>(*this)[i];
    }

    std::array<double, kPoseDims> to_array() const {
        return {x, y, z, alpha, beta, gamma};
    }

    static Pose6 from_array(const std::array<double, kPoseDims>& a) {
        return {a[0], a[1], a[2], a[3], a[4], a[5]};
    }

    bool all_finite() const {
        for (std::size_t i = 0; i < kPoseDims; ++i) {
            if (!std::isfinite((*this)[i])) return false;
        }
        return true;
    }

    friend Pose6 operator+(const Pose6& a, const Pose6& b) {
        Pose6 r;
        for (std::size_t i = 0; i < kPoseDims; ++i) r[i] = a[i] + b[i];
        return r;
    }

    friend Pose6 operator-(const Pose6& a, const Pose6& b) {
        Pose6 r;
        for (std::size_t i = 0; i < kPoseDims; ++i) r[i] = a[i] - b[i];
        return r;
    }

    friend bool operator==(const Pose6& a, const Pose6& b) {
        for (std::size_t i = 0; i < kPoseDims; ++i) {
            if (a[i] != b[i]) return false;
        }
        return true;
    }
};

inline double inf_norm(const Pose6& p) {
    double m = 0.0;
    for (std::size_t i = 0; i < kPoseDims; ++i) m = std::max(m, std::abs(p[i]));
    return m;
}

}  // namespace wiggle

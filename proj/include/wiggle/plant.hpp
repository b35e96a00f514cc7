#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wiggle/lock.hpp"
#include "wiggle/pose.hpp"
#include "wiggle/units.hpp"

namespace wiggle {

/// Commanded-minus-achieved pose split per axis, in the mixed contact units
/// (millimeters / degrees). Feeds the strain model and the gel renderer.
struct ContactReaction {
    double dx_mm = 0.0;
    double dy_mm = 0.0;
    double dz_mm = 0.0;
    double dalpha_deg = 0.0;
    double dbeta_deg = 0.0;
    double dgamma_deg = 0.0;

    double mixed_norm() const {
        return std::sqrt(dx_mm * dx_mm + dy_mm * dy_mm + dz_mm * dz_mm +
                         dalpha_deg * dalpha_deg + dbeta_deg * dbeta_deg +
                         dgamma_deg * dgamma_deg);
    }
};

struct PlantState {
    Pose6 achieved;
    double contact_strain_px = 0.0;
    double inserted_depth = 0.0;  // canal penetration, meters
    bool wedged = false;
    ContactReaction reaction{};
};

namespace plant_detail {

struct LateralExcess {
    double e = 0.0;       // distance outside the clearance footprint (m)
    double px = 0.0;      // nearest footprint point
    double pz = 0.0;
    double nx = 0.0;      // outward unit direction (valid when e > 0)
    double nz = 0.0;
};

inline LateralExcess lateral_excess(const LockModel& lock, double x, double z) {
    LateralExcess r;
    if (lock.key_shape == KeyShape::Cylinder) {
        // Radial clearance; clearance_x is the radius.
        const double dx = x - lock.center_x, dz = z - lock.center_z;
        const double rho = std::hypot(dx, dz);
        if (rho <= lock.clearance_x) {
            r.px = x;
            r.pz = z;
            return r;
        }
        r.e = rho - lock.clearance_x;
        r.nx = dx / rho;
        r.nz = dz / rho;
        r.px = lock.center_x + lock.clearance_x * r.nx;
        r.pz = lock.center_z + lock.clearance_x * r.nz;
        return r;
    }
    const double px = std::clamp(x, lock.center_x - lock.clearance_x,
                                 lock.center_x + lock.clearance_x);
    const double pz = std::clamp(z, lock.center_z - lock.clearance_z,
                                 lock.center_z + lock.clearance_z);
    const double dx = x - px, dz = z - pz;
    const double e = std::hypot(dx, dz);
    r.px = px;
    r.pz = pz;
    if (e > 0.0) {
        r.e = e;
        r.nx = dx / e;
        r.nz = dz / e;
    }
    return r;
}

/// Face level outside the chamfer ring: flat face or raised plateau.
inline double face_beyond_chamfer(const LockModel& lock, double e) {
    if (lock.plateau_height > 0.0 && e <= lock.plateau_extent) return lock.plateau_height;
    return 0.0;
}

/// Admissible canal depth for a tilted key: full depth inside the angular
/// tolerance, then shrinking as tol/|err| per axis (tightest axis binds).
inline double depth_limit(const LockModel& lock, double alpha, double beta, double gamma) {
    const double errs[3] = {std::abs(alpha), std::abs(beta), std::abs(gamma)};
    double factor = 1.0;
    for (int i = 0; i < 3; ++i) {
        if (errs[i] > lock.orientation_tol[i]) {
            factor = std::min(factor, lock.orientation_tol[i] / errs[i]);
        }
    }
    return lock.depth * factor;
}

/// Solid-surface height at lateral excess e > 0.
inline double surface_height(const LockModel& lock, double e) {
    if (lock.chamfer_width > 0.0 && e <= lock.chamfer_width) {
        const double top = face_beyond_chamfer(lock, lock.chamfer_width);
        const double slope = (top + lock.chamfer_depth) / lock.chamfer_width;
        return -lock.chamfer_depth + slope * e;
    }
    return face_beyond_chamfer(lock, e);
}

}  // namespace plant_detail

/// One quasi-static plant update: project the commanded key-tip pose onto the
/// free space defined by the lock geometry. Strain is proportional to the
/// mixed-norm gap between commanded and achieved pose. Wedging (sharp-edged
/// locks only) latches when the canal walls clamp the orientation while the
/// command keeps pressing; while wedged, downward progress stays blocked
/// until the contact strain drops below the release threshold.
inline PlantState plant_step(const LockModel& lock, const PlantState& prev,
                             const Pose6& commanded, double dt) {
    using namespace plant_detail;
    if (!(dt > 0.0)) throw std::invalid_argument("plant_step requires dt > 0");
    if (!commanded.all_finite()) throw std::invalid_argument("plant_step: non-finite command");

    Pose6 achieved = commanded;
    bool wedged = false;
    bool handled = false;

    if (prev.inserted_depth > 0.0) {
        // Inside the canal: walls clamp lateral position and orientation.
        double ax, az;
        if (lock.key_shape == KeyShape::Cylinder) {
            const double dx = commanded.x - lock.center_x, dz = commanded.z - lock.center_z;
            const double rho = std::hypot(dx, dz);
            if (rho > lock.clearance_x && rho > 0.0) {
                ax = lock.center_x + lock.clearance_x * dx / rho;
                az = lock.center_z + lock.clearance_x * dz / rho;
            } else {
                ax = commanded.x;
                az = commanded.z;
            }
        } else {
            ax = std::clamp(commanded.x, lock.center_x - lock.clearance_x,
                            lock.center_x + lock.clearance_x);
            az = std::clamp(commanded.z, lock.center_z - lock.clearance_z,
                            lock.center_z + lock.clearance_z);
        }

        bool ori_clamped = false;
        double ori_a[3];
        const double ori_c[3] = {commanded.alpha, commanded.beta, commanded.gamma};
        for (int i = 0; i < 3; ++i) {
            const double box = std::min(
                kPi, lock.orientation_tol[i] * lock.depth / std::max(prev.inserted_depth, 1e-9));
            ori_a[i] = std::clamp(ori_c[i], -box, box);
            if (ori_a[i] != ori_c[i]) ori_clamped = true;
        }

        const double dl = std::min(lock.depth, depth_limit(lock, ori_a[0], ori_a[1], ori_a[2]));
        const double floor_y = -dl;
        const double y_t = std::max(commanded.y, floor_y);
        if (y_t < 0.0) {
            const bool pressing = commanded.y < floor_y - 1e-12;
            const bool trigger = lock.wedging_enabled && ori_clamped && pressing;
            const bool released =
                prev.wedged && prev.contact_strain_px < lock.wedge_release_strain_px;
            wedged = trigger || (prev.wedged && !released);
            double y_a = y_t;
            if (wedged) y_a = std::max(y_a, prev.achieved.y);
            achieved = Pose6{ax, y_a, az, ori_a[0], ori_a[1], ori_a[2]};
            handled = true;
        }
        // Otherwise the key rises out of the canal this tick; resolve below.
    }

    if (!handled) {
        const LateralExcess ex = lateral_excess(lock, commanded.x, commanded.z);
        if (ex.e <= 0.0) {
            // Over the keyhole: free descent down to the tilt-limited depth.
            const double dl = std::min(
                lock.depth, depth_limit(lock, commanded.alpha, commanded.beta, commanded.gamma));
            achieved.y = std::max(commanded.y, -dl);
        } else {
            const double fl = surface_height(lock, ex.e);
            if (commanded.y >= fl) {
                // Free space above the face.
            } else if (lock.chamfer_width > 0.0 && ex.e <= lock.chamfer_width) {
                // Pressing into the funnel: the tip slides down the bevel, so
                // blocked -Y motion converts into centering. Projection of the
                // commanded (excess, y) point onto the bevel line.
                const double top = face_beyond_chamfer(lock, lock.chamfer_width);
                const double slope = (top + lock.chamfer_depth) / lock.chamfer_width;
                const double len2 = 1.0 + slope * slope;
                double e_star =
                    (ex.e + slope * (commanded.y + lock.chamfer_depth)) / len2;
                if (e_star <= 0.0) {
                    // Slid off the bevel into the keyhole mouth.
                    achieved.x = ex.px;
                    achieved.z = ex.pz;
                    const double dl =
                        std::min(lock.depth, depth_limit(lock, commanded.alpha,
                                                         commanded.beta, commanded.gamma));
                    achieved.y = std::max(commanded.y, -dl);
                } else {
                    e_star = std::min(e_star, lock.chamfer_width);
                    achieved.x = ex.px + ex.nx * e_star;
                    achieved.z = ex.pz + ex.nz * e_star;
                    achieved.y = -lock.chamfer_depth + slope * e_star;
                }
            } else {
                // Flat face or plateau: vertical block only. Plateau cliff
                // sides are not modeled as lateral walls.
                achieved.y = fl;
            }
        }
    }

    PlantState next;
    next.achieved = achieved;
    const LateralExcess ach_ex = lateral_excess(lock, achieved.x, achieved.z);
    next.inserted_depth = (ach_ex.e <= 0.0) ? std::max(0.0, -achieved.y) : 0.0;
    next.wedged = wedged;
    next.reaction = ContactReaction{
        m_to_mm(commanded.x - achieved.x),      m_to_mm(commanded.y - achieved.y),
        m_to_mm(commanded.z - achieved.z),      rad_to_deg(commanded.alpha - achieved.alpha),
        rad_to_deg(commanded.beta - achieved.beta),
        rad_to_deg(commanded.gamma - achieved.gamma)};
    next.contact_strain_px = lock.strain_px_per_unit * next.reaction.mixed_norm();
    return next;
}

/// Aligned start pose for a lock: centered over the keyhole, tip above the
/// face by the configured start height.
inline Pose6 aligned_pose(const LockModel& lock) {
    return Pose6{lock.center_x, lock.start_height, lock.center_z, 0.0, 0.0, 0.0};
}

/// Plant state at trial start: the commanded pose projected from rest.
inline PlantState make_initial_state(const LockModel& lock, const Pose6& commanded) {
    return plant_step(lock, PlantState{}, commanded, 1.0);
}

}  // namespace wiggle

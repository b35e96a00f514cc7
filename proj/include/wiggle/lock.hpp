#pragma once

#include <array>
#include <stdexcept>
#include <string>

#include "wiggle/units.hpp"

namespace wiggle {

enum class Archetype { PinTumbler, Dimpled, Tubular, DiscDetainer };
enum class KeyShape { Prism, Cylinder };

inline const char* archetype_name(Archetype a) {
    switch (a) {
        case Archetype::PinTumbler: return "pin-tumbler";
        case Archetype::Dimpled: return "dimpled";
        case Archetype::Tubular: return "tubular";
        case Archetype::DiscDetainer: return "disc-detainer";
    }
    return "?";
}

inline Archetype archetype_from_name(const std::string& s) {
    if (s == "pin-tumbler") return Archetype::PinTumbler;
    if (s == "dimpled") return Archetype::Dimpled;
    if (s == "tubular") return Archetype::Tubular;
    if (s == "disc-detainer") return Archetype::DiscDetainer;
    throw std::invalid_argument("unknown lock archetype: " + s);
}

/// Geometric and contact description of one lock face. The lock face lies in
/// the y = 0 plane; the keyhole canal extends to y = -depth. Insertion runs
/// along -Y. A prism key sees per-axis lateral clearances, a cylinder key a
/// radial clearance (clearance_x).
struct LockModel {
    Archetype archetype = Archetype::PinTumbler;
    KeyShape key_shape = KeyShape::Prism;

    double center_x = 0.0;  // keyhole center in the face plane (m)
    double center_z = 0.0;
    double clearance_x = 0.3e-3;  // admissible tip offset inside the keyhole (m)
    double clearance_z = 0.3e-3;

    // Chamfer funnel around the keyhole mouth: surface slopes from the
    // surrounding face level down to -chamfer_depth at the keyhole edge.
    double chamfer_width = 0.0;  // lateral extent beyond the clearance edge (m)
    double chamfer_depth = 0.0;

    // Raised plateau around the keyhole (dimpled cam locks).
    double plateau_height = 0.0;
    double plateau_extent = 0.0;  // lateral extent beyond the clearance edge (m)

    double depth = 0.018;  // keyhole depth along -Y (m)

    // Angular clearance per axis (alpha, beta, gamma). Beyond it the key only
    // enters to a tilt-limited depth.
    std::array<double, 3> orientation_tol{deg_to_rad(4.0), deg_to_rad(4.0), deg_to_rad(4.0)};

    bool wedging_enabled = false;
    double wedge_release_strain_px = 2.0;

    // Contact stiffness: pixels of strain per mixed-norm unit of blocked
    // command (1 mm translation == 1 deg rotation == 1 unit).
    double strain_px_per_unit = 10.0;

    // Aligned trials start with the tip this far above the face.
    double start_height = 1.5e-3;

    void validate() const {
        if (!(clearance_x > 0.0) || !(clearance_z > 0.0))
            throw std::invalid_argument("lock: clearances must be > 0");
        if (!(depth > 0.0)) throw std::invalid_argument("lock: depth must be > 0");
        if (chamfer_width < 0.0) throw std::invalid_argument("lock: chamfer width must be >= 0");
        if (chamfer_width > 0.0 && !(chamfer_depth > 0.0))
            throw std::invalid_argument("lock: chamfer depth must be > 0 when chamfered");
        for (double tol : orientation_tol) {
            if (!(tol > 0.0)) throw std::invalid_argument("lock: orientation tolerance must be > 0");
        }
        if (!(strain_px_per_unit > 0.0))
            throw std::invalid_argument("lock: strain gain must be > 0");
        if (plateau_height < 0.0 || plateau_extent < 0.0)
            throw std::invalid_argument("lock: plateau must be >= 0");
        if (!(start_height >= plateau_height))
            throw std::invalid_argument("lock: start height must clear the plateau");
    }
};

/// Archetype presets. Funnel convexity is ordered
/// DiscDetainer >= PinTumbler > Dimpled > Tubular (tubular faces are flat).
inline LockModel preset(Archetype a) {
    LockModel m;
    m.archetype = a;
    switch (a) {
        case Archetype::PinTumbler:
            m.key_shape = KeyShape::Prism;
            m.depth = mm_to_m(18.0);
            m.clearance_x = mm_to_m(0.3);
            m.clearance_z = mm_to_m(0.3);
            m.chamfer_width = mm_to_m(2.6);
            m.chamfer_depth = mm_to_m(1.5);
            m.orientation_tol = {deg_to_rad(4.0), deg_to_rad(4.0), deg_to_rad(4.0)};
            m.wedging_enabled = true;
            break;
        case Archetype::Dimpled:
            m.key_shape = KeyShape::Prism;
            m.depth = mm_to_m(19.0);
            m.clearance_x = mm_to_m(0.3);
            m.clearance_z = mm_to_m(0.3);
            m.chamfer_width = mm_to_m(1.5);
            m.chamfer_depth = mm_to_m(0.9);
            m.plateau_height = mm_to_m(1.0);
            m.plateau_extent = mm_to_m(3.0);
            m.orientation_tol = {deg_to_rad(4.0), deg_to_rad(4.0), deg_to_rad(4.0)};
            m.wedging_enabled = true;
            break;
        case Archetype::Tubular:
            m.key_shape = KeyShape::Cylinder;
            m.depth = mm_to_m(7.0);
            m.clearance_x = mm_to_m(1.0);
            m.clearance_z = mm_to_m(1.0);
            m.chamfer_width = 0.0;  // flat face
            m.chamfer_depth = 0.0;
            // Orientation about the insertion axis is 4x tighter than elsewhere.
            m.orientation_tol = {deg_to_rad(4.0), deg_to_rad(1.0), deg_to_rad(4.0)};
            m.wedging_enabled = false;
            break;
        case Archetype::DiscDetainer:
            m.key_shape = KeyShape::Prism;
            m.depth = mm_to_m(14.0);
            m.clearance_x = mm_to_m(0.5);
            m.clearance_z = mm_to_m(0.5);
            m.chamfer_width = mm_to_m(3.5);
            m.chamfer_depth = mm_to_m(2.0);
            m.orientation_tol = {deg_to_rad(6.0), deg_to_rad(6.0), deg_to_rad(6.0)};
            m.wedging_enabled = false;
            break;
    }
    m.validate();
    return m;
}

}  // namespace wiggle

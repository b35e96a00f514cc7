#pragma once

#include <cmath>
#include <stdexcept>

namespace wiggle {

/// Composite insertion objective: depth error plus weighted strain.
struct ObjectiveConfig {
    double lambda = 0.0005;          // objective units per strain pixel
    double keyhole_depth = 0.018;    // meters of travel to full insertion
    double start_y = 0.0;            // tip Y latched at trial start (meters)
    double success_epsilon = 0.5e-3; // meters
    double strain_abort_px = 40.0;   // trial aborts as failure above this

    void validate() const {
        if (!(lambda >= 0.0) || !std::isfinite(lambda))
            throw std::invalid_argument("objective: lambda must be >= 0");
        if (!(keyhole_depth > 0.0)) throw std::invalid_argument("objective: depth must be > 0");
        if (!(success_epsilon > 0.0))
            throw std::invalid_argument("objective: success epsilon must be > 0");
        if (!(strain_abort_px > 0.0))
            throw std::invalid_argument("objective: strain abort limit must be > 0");
        // Keep the strain term commensurate with the depth term.
        if (lambda * strain_abort_px > 10.0 * keyhole_depth)
            throw std::invalid_argument(
                "objective: lambda puts the max strain contribution beyond 10x depth");
    }
};

/// Distance of tip Y from the fully inserted target (insertion runs along -Y).
inline double insertion_loss(double y, const ObjectiveConfig& cfg) {
    return std::abs(y - (cfg.start_y - cfg.keyhole_depth));
}

inline double total_loss(double insertion, double strain_px, const ObjectiveConfig& cfg) {
    return insertion + cfg.lambda * strain_px;
}

/// Strict comparison: the trial halts as soon as the depth error is inside epsilon.
inline bool check_success(double insertion, const ObjectiveConfig& cfg) {
    return insertion < cfg.success_epsilon;
}

}  // namespace wiggle

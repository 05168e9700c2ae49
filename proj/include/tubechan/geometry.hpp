// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 tubechan contributors
#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "tubechan/vec3.hpp"

namespace tubechan {

inline constexpr double kSpeedOfLight = 299792458.0; // m/s

// Cylindrical tube scene. The tube axis runs along x at height `axis_height`
// above z = 0; the wall is y^2 + (z - axis_height)^2 = radius^2. Antennas may
// sit on the wall itself (the access point is mounted on the wall top).
struct TubeScene {
    double radius = 2.0;      // m
    double axis_height = 2.0; // m
    Vec3 tx_reference;        // Tx array center
    Vec3 rx_initial;          // Rx array center at t = 0

    // Scalar initial Tx-Rx distance ||rx_initial - tx_reference||.
    double initial_distance() const { return norm(rx_initial - tx_reference); }

    // Throws std::invalid_argument on violated invariants (non-positive
    // radius or distance, antenna outside the tube).
    void validate() const;

    // True if the point is inside the tube or on its wall (relative
    // tolerance 1e-9 on the squared radius).
    bool contains(const Vec3 &point) const;
};

// Uniform linear array along the tube (x) axis, centered on `center`.
struct AntennaArray {
    std::size_t element_count = 1;
    double spacing = 0.0; // m
    std::vector<Vec3> element_positions;
};

AntennaArray make_linear_array(const Vec3 &center, std::size_t count, double spacing);

// Receiver motion; velocity is constant over a run.
struct MotionState {
    Vec3 velocity; // m/s
    double time = 0.0;
};

// Azimuth/elevation pair, radians. Azimuth is measured in the xy plane from
// +x, elevation from the xy plane toward +z.
struct RayAngles {
    double azimuth = 0.0;
    double elevation = 0.0;
};

// Vector from a Tx element to an Rx element (Rx minus Tx).
Vec3 los_vector(const Vec3 &tx_element, const Vec3 &rx_element);

// Propagation delay ||d|| / c.
double los_delay(const Vec3 &d);

/// Signed projection Doppler (1/lambda) <d, v> / ||d||.
///
/// Note the sign convention: with d pointing from Tx to Rx and the Rx moving
/// toward the Tx, the result is negative. Statistics use the convention
/// consistently.
double los_doppler(const Vec3 &d, const Vec3 &v, double wavelength);

/// Point where the ray with the given angles meets the cylinder wall, in the
/// local frame whose origin lies on the tube axis.
///
/// The scale factor is R / sqrt(1 - cos^2(el) * cos^2(az)); the returned
/// point satisfies y^2 + z^2 = R^2 exactly. Throws NoWallIntersectionError
/// for axis-parallel rays.
Vec3 wall_point_from_angles(double azimuth, double elevation, double radius);

// Wall anchor in global coordinates for a Tx-side bounce: the local wall
// point translated to the axis frame at the Tx array center.
Vec3 wall_anchor_tx(const RayAngles &angles, const TubeScene &scene, const Vec3 &tx_center);

// Wall anchor for an Rx-side bounce: the Tx-frame wall point shifted by the
// Tx-to-Rx displacement at anchor time, so the bounce sits near the Rx.
Vec3 wall_anchor_rx(const RayAngles &angles, const TubeScene &scene, const Vec3 &tx_center,
                    const Vec3 &rx_center_at_anchor);

// (D^T, D^R) displacement pair for one ray: Tx-side wall point minus the Tx
// element, and Rx-side wall point (offset by the initial displacement D)
// minus the Rx element.
std::pair<Vec3, Vec3> ray_displacements(const RayAngles &angles_tx, const RayAngles &angles_rx,
                                        const TubeScene &scene, const Vec3 &tx_element,
                                        const Vec3 &rx_element);

// Rigid-array position update: position + v * dt.
Vec3 advance_rx(const Vec3 &position, const Vec3 &velocity, double dt);

// Azimuth/elevation of direction vector d (must be nonzero).
RayAngles direction_angles(const Vec3 &d);

} // namespace tubechan

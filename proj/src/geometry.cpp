// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 tubechan contributors

#include "tubechan/geometry.hpp"

#include <cmath>
#include <stdexcept>

#include "tubechan/errors.hpp"

namespace tubechan {

void TubeScene::validate() const
{
    if (radius <= 0.0)
        throw std::invalid_argument("TubeScene: radius must be positive");
    if (initial_distance() <= 0.0)
        throw std::invalid_argument("TubeScene: Tx and Rx must not coincide");
    if (!contains(tx_reference))
        throw std::invalid_argument("TubeScene: Tx reference outside the tube");
    if (!contains(rx_initial))
        throw std::invalid_argument("TubeScene: Rx initial position outside the tube");
}

bool TubeScene::contains(const Vec3 &point) const
{
    const double dy = point.y;
    const double dz = point.z - axis_height;
    return dy * dy + dz * dz <= radius * radius * (1.0 + 1e-9);
}

AntennaArray make_linear_array(const Vec3 &center, std::size_t count, double spacing)
{
    if (count == 0)
        throw std::invalid_argument("make_linear_array: element count must be positive");
    AntennaArray array;
    array.element_count = count;
    array.spacing = spacing;
    array.element_positions.reserve(count);
    const double half = 0.5 * static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) {
        const double offset = (static_cast<double>(i) - half) * spacing;
        array.element_positions.push_back(center + Vec3{offset, 0.0, 0.0});
    }
    return array;
}

Vec3 los_vector(const Vec3 &tx_element, const Vec3 &rx_element) { return rx_element - tx_element; }

double los_delay(const Vec3 &d) { return norm(d) / kSpeedOfLight; }

double los_doppler(const Vec3 &d, const Vec3 &v, double wavelength)
{
    if (wavelength <= 0.0)
        throw std::invalid_argument("los_doppler: wavelength must be positive");
    const double d_norm = norm(d);
    if (d_norm <= 0.0)
        throw DegenerateGeometryError("los_doppler: zero-length displacement vector");
    return dot(d, v) / (d_norm * wavelength);
}

Vec3 wall_point_from_angles(double azimuth, double elevation, double radius)
{
    const double ce = std::cos(elevation);
    const double ca = std::cos(azimuth);
    const double denom_sq = 1.0 - ce * ce * ca * ca;
    if (denom_sq <= 1e-12)
        throw NoWallIntersectionError("wall_point_from_angles: ray is parallel to the tube axis");
    const double s = radius / std::sqrt(denom_sq);
    return {s * ce * ca, s * ce * std::sin(azimuth), s * std::sin(elevation)};
}

Vec3 wall_anchor_tx(const RayAngles &angles, const TubeScene &scene, const Vec3 &tx_center)
{
    const Vec3 local = wall_point_from_angles(angles.azimuth, angles.elevation, scene.radius);
    return local + Vec3{tx_center.x, tx_center.y, scene.axis_height};
}

Vec3 wall_anchor_rx(const RayAngles &angles, const TubeScene &scene, const Vec3 &tx_center,
                    const Vec3 &rx_center_at_anchor)
{
    // Same Tx-anchored axis frame, shifted by the Tx-to-Rx displacement.
    return wall_anchor_tx(angles, scene, tx_center) + (rx_center_at_anchor - tx_center);
}

std::pair<Vec3, Vec3> ray_displacements(const RayAngles &angles_tx, const RayAngles &angles_rx,
                                        const TubeScene &scene, const Vec3 &tx_element,
                                        const Vec3 &rx_element)
{
    const Vec3 wall_tx = wall_anchor_tx(angles_tx, scene, scene.tx_reference);
    const Vec3 wall_rx = wall_anchor_rx(angles_rx, scene, scene.tx_reference, scene.rx_initial);
    return {wall_tx - tx_element, wall_rx - rx_element};
}

Vec3 advance_rx(const Vec3 &position, const Vec3 &velocity, double dt)
{
    if (dt < 0.0)
        throw std::invalid_argument("advance_rx: dt must be non-negative");
    return position + velocity * dt;
}

RayAngles direction_angles(const Vec3 &d)
{
    const double d_norm = norm(d);
    if (d_norm <= 0.0)
        throw DegenerateGeometryError("direction_angles: zero-length vector");
    const double horizontal = std::sqrt(d.x * d.x + d.y * d.y);
    return {std::atan2(d.y, d.x), std::atan2(d.z, horizontal)};
}

} // namespace tubechan

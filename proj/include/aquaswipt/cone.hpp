#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include <Eigen/Core>

namespace aquaswipt
{
//---------------------------------------------------------------------------//
/*!
 * Right circular cone opening downward (+z is depth) from its apex.
 *
 * The field of view of the vehicle: a point is seen when it lies strictly
 * below the apex, no deeper than \c height_h, and within the half angle.
 */
struct ConeGeometry
{
    Eigen::Vector3d apex = Eigen::Vector3d::Zero();
    double apex_angle_deg = 60;
    double height_h = 1;
    double base_radius_r = std::tan(std::numbers::pi / 6);

    static ConeGeometry downward(Eigen::Vector3d const& apex, double apex_angle_deg, double height)
    {
        return {apex, apex_angle_deg, height,
                height * std::tan(apex_angle_deg * std::numbers::pi / 360)};
    }

    double tan_half_angle() const { return std::tan(apex_angle_deg * std::numbers::pi / 360); }

    bool valid() const
    {
        return apex_angle_deg > 0 && apex_angle_deg < 180 && height_h >= 0
               && std::abs(base_radius_r - height_h * tan_half_angle())
                      <= 1e-9 * std::max(1.0, base_radius_r);
    }

    template<class Derived>
    bool contains(Eigen::MatrixBase<Derived> const& p) const
    {
        double const depth = double(p[2]) - apex[2];
        if (!(depth > 0) || depth > height_h)
        {
            return false;
        }
        double const dx = double(p[0]) - apex[0];
        double const dy = double(p[1]) - apex[1];
        double const reach = depth * tan_half_angle();
        return dx * dx + dy * dy <= reach * reach;
    }
};

struct VolumeEstimate
{
    double value;
    double std_error;
};

//! Unclipped cone volume, pi r^2 h / 3.
inline double cone_volume(ConeGeometry const& g)
{
    if (!(g.height_h > 0))
    {
        return 0;
    }
    return std::numbers::pi * g.base_radius_r * g.base_radius_r * g.height_h / 3;
}

//! Monte-Carlo volume of the cone clipped to the box [0,L]x[0,W]x[0,H].
VolumeEstimate clipped_cone_volume_mc(ConeGeometry const& g,
                                      Eigen::Vector3d const& cube,
                                      std::int64_t samples,
                                      std::uint64_t seed);

}  // namespace aquaswipt

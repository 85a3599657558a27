#pragma once

#include <algorithm>

#include <Eigen/Core>

#include "swipt_harvest.hpp"

namespace aquaswipt
{
//! Hydrodynamic and propulsion constants of the vehicle.
template<class Scalar>
struct BasicAuvSpec
{
    Scalar drag_coefficient_cd = Scalar(0.3);
    Scalar frontal_area_m2 = Scalar(0.2);
    Scalar water_density = 1025;
    Scalar motor_efficiency_beta = Scalar(0.5);
    Scalar speed_mps = 1;
    Scalar hotel_load_w = 40;
    BasicEnergyStore<Scalar> battery{Scalar(2e6), Scalar(2e6), 1};
    //! Full apex angle of the downward coverage cone [deg]
    Scalar cone_apex_angle_deg = 60;

    bool valid() const
    {
        return drag_coefficient_cd > 0 && frontal_area_m2 > 0 && water_density > 0
               && motor_efficiency_beta > 0 && motor_efficiency_beta <= 1 && speed_mps > 0
               && hotel_load_w >= 0 && battery.valid() && cone_apex_angle_deg > 0
               && cone_apex_angle_deg < 180;
    }
};

template<class Scalar>
struct BasicDrainResult
{
    BasicAuvSpec<Scalar> spec;
    bool depleted;
};

using AuvSpec = BasicAuvSpec<double>;
using DrainResult = BasicDrainResult<double>;

template<class Scalar>
Scalar drag_force(BasicAuvSpec<Scalar> const& s)
{
    return s.drag_coefficient_cd * s.frontal_area_m2 * s.water_density * s.speed_mps
           * s.speed_mps / (2 * s.motor_efficiency_beta);
}

template<class Scalar>
Scalar propulsion_power(BasicAuvSpec<Scalar> const& s)
{
    return drag_force(s) * s.speed_mps;
}

//! Total electrical draw while under way: propulsion plus hotel load.
template<class Scalar>
Scalar electrical_power(BasicAuvSpec<Scalar> const& s)
{
    return propulsion_power(s) + s.hotel_load_w;
}

//! Energy [J] to travel in a straight line between two points.
template<class Scalar, class DerivedA, class DerivedB>
Scalar move_energy(BasicAuvSpec<Scalar> const& s,
                   Eigen::MatrixBase<DerivedA> const& from,
                   Eigen::MatrixBase<DerivedB> const& to)
{
    Scalar const d = (to.template cast<Scalar>() - from.template cast<Scalar>()).norm();
    return electrical_power(s) * d / s.speed_mps;
}

//! Station keeping draws the hotel load only.
template<class Scalar>
Scalar hover_energy(BasicAuvSpec<Scalar> const& s, Scalar dwell_s)
{
    return s.hotel_load_w * dwell_s;
}

template<class Scalar>
BasicDrainResult<Scalar> drain_battery(BasicAuvSpec<Scalar> s, Scalar energy_j)
{
    s.battery.level_j = std::max(Scalar(0), s.battery.level_j - energy_j);
    return {s, !(s.battery.level_j > 0)};
}

}  // namespace aquaswipt

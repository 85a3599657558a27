#pragma once

#include <array>
#include <cstdint>
#include <string_view>

#include <Eigen/Core>

namespace aquaswipt
{
//! Unit moves along the grid axes; z grows with depth.
enum class Action : std::uint8_t
{
    plus_x,
    minus_x,
    plus_y,
    minus_y,
    plus_z,
    minus_z,
};

inline constexpr int kNumActions = 6;

inline constexpr std::array<Action, kNumActions> kAllActions{
    Action::plus_x, Action::minus_x, Action::plus_y,
    Action::minus_y, Action::plus_z, Action::minus_z};

inline Eigen::Vector3i action_delta(Action a)
{
    switch (a)
    {
        case Action::plus_x: return {1, 0, 0};
        case Action::minus_x: return {-1, 0, 0};
        case Action::plus_y: return {0, 1, 0};
        case Action::minus_y: return {0, -1, 0};
        case Action::plus_z: return {0, 0, 1};
        case Action::minus_z: return {0, 0, -1};
    }
    return Eigen::Vector3i::Zero();
}

constexpr std::string_view to_string(Action a)
{
    constexpr std::array<std::string_view, kNumActions> names{"+x", "-x", "+y", "-y", "+z", "-z"};
    return names[static_cast<int>(a)];
}

}  // namespace aquaswipt

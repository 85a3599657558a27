#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "acoustic_channel.hpp"
#include "action.hpp"
#include "auv_dynamics.hpp"
#include "rng.hpp"
#include "swipt_harvest.hpp"

namespace aquaswipt
{
//---------------------------------------------------------------------------//
// CONFIGURATION
//---------------------------------------------------------------------------//

struct EnvConfig
{
    //! Cube extent L x W x H [m]; grid points run 0..L etc.
    Eigen::Vector3i dims{100, 100, 50};
    std::optional<int> node_count{25};
    std::optional<double> node_density_lambda{};
    int episode_length = 50;
    double step_duration_s = 1;
    std::uint64_t rng_seed = 42;

    ChannelParams channel{};
    AuvSpec auv{};
    //! Sensor uplink modem (Table-style 170 dB source level)
    ModemSpec node_modem{1, 1, 0, 170.0, 0};
    //! AUV projector used for SWIPT downlink and surface relay
    ModemSpec auv_modem{1000, 0.5, 0, std::nullopt, 0};
    HarvestSpec node_harvest = HarvestSpec::from_sensitivity_db(-160);
    //! Initial state of every node's storage at reset
    EnergyStore node_store{100, 50, 1};
    //! Initial backlog per node: 200 packets of 100 bytes
    double node_buffer_bits = 200 * 100 * 8;

    Eigen::Vector2d surface_station_xy{50, 50};
    Eigen::Vector2i start_xy{50, 50};

    double reward_gamma = 0.5;
    //! When set, the receiver split ratio tracks reward_gamma
    bool split_follows_gamma = true;
    std::optional<double> throughput_scale{};
    std::optional<double> power_scale{};
    std::optional<double> motion_scale{};

    //! Offending field paths; empty when valid.
    std::vector<std::string> validate() const;

    double volume() const { return double(dims[0]) * dims[1] * dims[2]; }
    double effective_split_ratio() const
    {
        return split_follows_gamma ? reward_gamma : node_harvest.split_ratio;
    }
};

//---------------------------------------------------------------------------//
// STATE
//---------------------------------------------------------------------------//

struct NodeState
{
    Eigen::Vector3i position;
    EnergyStore store;
    double data_buffer_bits;
    ModemSpec modem;
    HarvestSpec harvest;
};

struct AuvState
{
    Eigen::Vector3i position;
    AuvSpec spec;
};

//! Finite table key: position plus clamped coverage summaries.
struct StateKey
{
    Eigen::Vector3i auv_pos = Eigen::Vector3i::Zero();
    int covered_with_data = 0;
    int covered_undercharged = 0;
    int gain_bin = 0;

    friend bool operator==(StateKey const& a, StateKey const& b)
    {
        return a.auv_pos == b.auv_pos && a.covered_with_data == b.covered_with_data
               && a.covered_undercharged == b.covered_undercharged && a.gain_bin == b.gain_bin;
    }
};

struct StateKeyHash
{
    std::size_t operator()(StateKey const& k) const noexcept
    {
        std::uint64_t h = std::uint64_t(std::uint32_t(k.auv_pos[0]));
        h = h * 1000003u + std::uint32_t(k.auv_pos[1]);
        h = h * 1000003u + std::uint32_t(k.auv_pos[2]);
        h = h * 64u + std::uint32_t(k.covered_with_data * 16 + k.covered_undercharged * 4 + k.gain_bin);
        return std::size_t(mix_seed(h));
    }
};

struct StepOutcome
{
    StateKey next_state;
    double reward = 0;
    double throughput_bits = 0;
    double harvested_j = 0;
    double motion_energy_j = 0;
    //! AUV projector energy spent on SWIPT this step
    double swipt_energy_j = 0;
    double throughput_term = 0;
    double harvest_term = 0;
    double motion_term = 0;
    std::vector<std::size_t> covered_nodes;
    Eigen::Vector3i position = Eigen::Vector3i::Zero();
    //! Episode over: step limit reached or battery depleted
    bool done = false;
    //! Episode ended by depletion (no bootstrapping past it)
    bool terminal = false;
};

//---------------------------------------------------------------------------//
/*!
 * Underwater sensor field with a single SWIPT-capable AUV.
 *
 * Node and AUV positions live on the integer grid, so every link depends
 * only on the squared separation; link budgets are tabulated once per
 * deployment and looked up during stepping.
 */
class Environment
{
  public:
    using State = StateKey;
    using Outcome = StepOutcome;

    //! Place nodes uniformly at random; throws ConfigError.
    static Environment deploy(EnvConfig const& config);

    //! Rebuild from a snapshot produced by \c snapshot().
    static Environment from_snapshot(nlohmann::json const& snap);

    nlohmann::json snapshot() const;

    EnvConfig const& config() const { return config_; }
    std::span<NodeState const> nodes() const { return nodes_; }
    AuvState const& auv() const { return auv_; }
    int step_index() const { return step_; }
    bool done() const { return done_; }

    double throughput_scale() const { return throughput_scale_; }
    double power_scale() const { return power_scale_; }
    double motion_scale() const { return motion_scale_; }

    std::vector<std::size_t> covered() const;
    StateKey encode_state() const;
    StateKey reset(bool randomize_start = false);
    StepOutcome step(Action action);

    //! Uplink SNR [dB] between the AUV at \c auv_pos and node \c i.
    double uplink_snr_db(std::size_t i, Eigen::Vector3i const& auv_pos) const;

  private:
    explicit Environment(EnvConfig config);

    void build_link_tables();
    std::size_t squared_range(Eigen::Vector3i const& a, Eigen::Vector3i const& b) const;
    bool in_view(Eigen::Vector3i const& apex, Eigen::Vector3i const& p) const;
    double relay_bits(Eigen::Vector3i const& auv_pos) const;

    EnvConfig config_;
    std::vector<NodeState> nodes_;
    std::vector<NodeState> initial_nodes_;
    AuvState auv_;
    AuvSpec initial_auv_;
    int step_ = 0;
    bool done_ = false;
    Rng episode_rng_;

    double split_ratio_ = 0;
    double tan2_half_ = 0;
    double throughput_scale_ = 1;
    double power_scale_ = 1;
    double motion_scale_ = 1;
    double gain_edges_[2] = {0, 0};

    // Indexed by squared integer range
    std::vector<double> up_snr_;
    std::vector<double> up_bits_;
    std::vector<double> received_w_;
    std::vector<char> poll_ok_;
};

}  // namespace aquaswipt

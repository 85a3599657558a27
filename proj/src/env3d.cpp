#include "aquaswipt/env3d.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "aquaswipt/config_io.hpp"
#include "aquaswipt/errors.hpp"

namespace aquaswipt
{
namespace
{
// Arrival counting with unit-rate exponential gaps; O(mean) but exact and
// independent of the standard library's distribution implementation.
int sample_poisson(Rng& rng, double mean)
{
    int k = 0;
    double t = -std::log1p(-rng.uniform());
    while (t < mean)
    {
        ++k;
        t += -std::log1p(-rng.uniform());
    }
    return k;
}

bool inside(Eigen::Vector3i const& p, Eigen::Vector3i const& dims)
{
    return (p.array() >= 0).all() && (p.array() <= dims.array()).all();
}

Eigen::Vector3i vec3i(json const& j)
{
    return {j.at(0).get<int>(), j.at(1).get<int>(), j.at(2).get<int>()};
}

}  // namespace

//---------------------------------------------------------------------------//
// CONFIG
//---------------------------------------------------------------------------//

std::vector<std::string> EnvConfig::validate() const
{
    std::vector<std::string> bad;
    if (!(dims.array() > 0).all())
    {
        bad.emplace_back("dims_lwh_m: every extent must be positive");
    }
    if (node_count.has_value() == node_density_lambda.has_value())
    {
        bad.emplace_back("node_count/node_density_lambda: exactly one must be given");
    }
    if (node_count && *node_count <= 0)
    {
        bad.emplace_back("node_count: must be positive");
    }
    if (node_density_lambda && !(*node_density_lambda > 0))
    {
        bad.emplace_back("node_density_lambda: must be positive");
    }
    if (episode_length <= 0)
    {
        bad.emplace_back("episode_length: must be positive");
    }
    if (!(step_duration_s > 0))
    {
        bad.emplace_back("step_duration_s: must be positive");
    }
    if (!channel.valid())
    {
        bad.emplace_back("channel: parameter out of range");
    }
    if (!auv.valid())
    {
        bad.emplace_back("auv: parameter out of range");
    }
    if (!node_modem.valid())
    {
        bad.emplace_back("node_modem: parameter out of range");
    }
    if (!auv_modem.valid())
    {
        bad.emplace_back("auv_modem: parameter out of range");
    }
    if (!node_harvest.valid())
    {
        bad.emplace_back("node_harvest: parameter out of range");
    }
    if (!node_store.valid())
    {
        bad.emplace_back("node_store: parameter out of range");
    }
    if (!(node_buffer_bits >= 0))
    {
        bad.emplace_back("node_buffer_bits: must be non-negative");
    }
    if (start_xy[0] < 0 || start_xy[1] < 0 || start_xy[0] > dims[0] || start_xy[1] > dims[1])
    {
        bad.emplace_back("start_xy: outside the deployment area");
    }
    if (!(reward_gamma >= 0 && reward_gamma <= 1))
    {
        bad.emplace_back("reward_gamma: must lie in [0, 1]");
    }
    for (auto [name, v] : {std::pair{"throughput_scale", throughput_scale},
                           std::pair{"power_scale", power_scale},
                           std::pair{"motion_scale", motion_scale}})
    {
        if (v && !(*v > 0))
        {
            bad.emplace_back(std::string(name) + ": must be positive");
        }
    }
    return bad;
}

//---------------------------------------------------------------------------//
// CONSTRUCTION
//---------------------------------------------------------------------------//

Environment::Environment(EnvConfig config)
    : config_(std::move(config)),
      auv_{Eigen::Vector3i(config_.start_xy[0], config_.start_xy[1], 0), config_.auv},
      initial_auv_(config_.auv),
      episode_rng_(mix_seed(config_.rng_seed, 0x5eedULL))
{
    this->build_link_tables();
}

Environment Environment::deploy(EnvConfig const& config)
{
    if (auto bad = config.validate(); !bad.empty())
    {
        throw ConfigError(std::move(bad));
    }
    Environment env(config);
    Rng rng(config.rng_seed);
    int const count = config.node_count ? *config.node_count
                                        : sample_poisson(rng, *config.node_density_lambda
                                                                  * config.volume());
    if (count <= 0)
    {
        throw ConfigError({"node_density_lambda: deployment realised no nodes"});
    }
    env.nodes_.reserve(count);
    for (int i = 0; i < count; ++i)
    {
        Eigen::Vector3i p;
        for (int d = 0; d < 3; ++d)
        {
            p[d] = rng.between(0, config.dims[d]);
        }
        env.nodes_.push_back(
            {p, config.node_store, config.node_buffer_bits, config.node_modem, config.node_harvest});
    }
    env.initial_nodes_ = env.nodes_;
    return env;
}

void Environment::build_link_tables()
{
    auto const& c = config_;
    split_ratio_ = c.effective_split_ratio();
    double const half = c.auv.cone_apex_angle_deg * std::numbers::pi / 360;
    tan2_half_ = std::tan(half) * std::tan(half);

    std::size_t const max_d2 = std::size_t(c.dims.cast<std::int64_t>().squaredNorm());
    Eigen::ArrayXd const range
        = Eigen::ArrayXd::LinSpaced(Eigen::Index(max_d2 + 1), 0.0, double(max_d2))
              .sqrt()
              .max(1.0);
    Eigen::ArrayXd const tl = transmission_loss_db(range, c.channel);
    double const nl = noise_level_db(c.channel);
    Eigen::ArrayXd const up = source_level(c.node_modem) - tl - nl
                              + c.node_modem.directivity_index_db;
    Eigen::ArrayXd const down = source_level(c.auv_modem) - tl - nl
                                + c.auv_modem.directivity_index_db;

    double const gamma_th = c.node_modem.min_snr_db;
    double const info_db = split_ratio_ > 0 ? 10 * std::log10(split_ratio_) : -INFINITY;

    up_snr_.resize(max_d2 + 1);
    up_bits_.resize(max_d2 + 1);
    received_w_.resize(max_d2 + 1);
    poll_ok_.resize(max_d2 + 1);
    for (std::size_t i = 0; i <= max_d2; ++i)
    {
        up_snr_[i] = up[i];
        up_bits_[i] = shannon_throughput_bps(up[i], c.channel, gamma_th) * c.step_duration_s;
        received_w_[i] = harvestable_power(down[i], c.node_harvest);
        poll_ok_[i] = down[i] + info_db >= gamma_th;
    }

    // Gain bins: mean uplink SNR beyond 25 m, 10-25 m, or within 10 m
    gain_edges_[0] = received_snr_db(c.node_modem, 25.0, c.channel);
    gain_edges_[1] = received_snr_db(c.node_modem, 10.0, c.channel);

    double const gamma_th_lin = std::pow(10.0, gamma_th / 10);
    throughput_scale_ = c.throughput_scale.value_or(
        c.channel.bandwidth_hz * std::log2(1 + gamma_th_lin + 1) * c.step_duration_s);
    power_scale_ = c.power_scale.value_or(received_w_[0] > 0 ? received_w_[0] : 1.0);
    motion_scale_ = c.motion_scale.value_or(electrical_power(c.auv) / c.auv.speed_mps);
}

//---------------------------------------------------------------------------//
// QUERIES
//---------------------------------------------------------------------------//

std::size_t Environment::squared_range(Eigen::Vector3i const& a, Eigen::Vector3i const& b) const
{
    return std::size_t((a - b).squaredNorm());
}

bool Environment::in_view(Eigen::Vector3i const& apex, Eigen::Vector3i const& p) const
{
    int const depth = p[2] - apex[2];
    if (depth <= 0)
    {
        return false;
    }
    int const dx = p[0] - apex[0];
    int const dy = p[1] - apex[1];
    return double(dx * dx + dy * dy) <= double(depth * depth) * tan2_half_;
}

double Environment::uplink_snr_db(std::size_t i, Eigen::Vector3i const& auv_pos) const
{
    return up_snr_[this->squared_range(nodes_[i].position, auv_pos)];
}

double Environment::relay_bits(Eigen::Vector3i const& pos) const
{
    Eigen::Vector3d const station(config_.surface_station_xy[0], config_.surface_station_xy[1], 0);
    double const range = std::max(1.0, (pos.cast<double>() - station).norm());
    double const snr = received_snr_db(config_.auv_modem, range, config_.channel);
    return shannon_throughput_bps(snr, config_.channel, config_.auv_modem.min_snr_db)
           * config_.step_duration_s;
}

std::vector<std::size_t> Environment::covered() const
{
    std::vector<std::size_t> result;
    double const gamma_th = config_.node_modem.min_snr_db;
    for (std::size_t i = 0; i < nodes_.size(); ++i)
    {
        auto const& p = nodes_[i].position;
        if (this->in_view(auv_.position, p)
            && up_snr_[this->squared_range(p, auv_.position)] >= gamma_th)
        {
            result.push_back(i);
        }
    }
    return result;
}

StateKey Environment::encode_state() const
{
    StateKey key;
    key.auv_pos = auv_.position;
    auto const seen = this->covered();
    if (seen.empty())
    {
        return key;
    }
    int with_data = 0;
    int undercharged = 0;
    double snr_sum = 0;
    for (auto i : seen)
    {
        auto const& n = nodes_[i];
        with_data += n.data_buffer_bits > 0;
        undercharged += !n.store.full();
        snr_sum += up_snr_[this->squared_range(n.position, auv_.position)];
    }
    double const mean_snr = snr_sum / double(seen.size());
    key.covered_with_data = std::min(with_data, 3);
    key.covered_undercharged = std::min(undercharged, 3);
    key.gain_bin = mean_snr >= gain_edges_[1] ? 3 : mean_snr >= gain_edges_[0] ? 2 : 1;
    return key;
}

//---------------------------------------------------------------------------//
// DYNAMICS
//---------------------------------------------------------------------------//

StateKey Environment::reset(bool randomize_start)
{
    nodes_ = initial_nodes_;
    auv_.spec = initial_auv_;
    if (randomize_start)
    {
        auv_.position = {episode_rng_.between(0, config_.dims[0]),
                         episode_rng_.between(0, config_.dims[1]), 0};
    }
    else
    {
        auv_.position = {config_.start_xy[0], config_.start_xy[1], 0};
    }
    step_ = 0;
    done_ = false;
    return this->encode_state();
}

StepOutcome Environment::step(Action action)
{
    if (done_)
    {
        throw StateError("step: episode already finished; call reset()");
    }
    auto const& c = config_;
    double const dt = c.step_duration_s;
    StepOutcome out;

    Eigen::Vector3i const target = auv_.position + action_delta(action);
    if (inside(target, c.dims))
    {
        out.motion_energy_j = move_energy(auv_.spec, auv_.position, target);
        auv_.position = target;
    }
    else
    {
        out.motion_energy_j = hover_energy(auv_.spec, dt);
    }
    auto drained = drain_battery(auv_.spec, out.motion_energy_j);
    auv_.spec = drained.spec;

    out.covered_nodes = this->covered();
    if (!out.covered_nodes.empty())
    {
        out.swipt_energy_j = c.auv_modem.electrical_power_w * dt;
    }

    double relay_left = this->relay_bits(auv_.position);
    double harvested_power = 0;
    bool eligible = false;
    for (auto i : out.covered_nodes)
    {
        auto& node = nodes_[i];
        std::size_t const d2 = this->squared_range(node.position, auv_.position);
        bool const headroom = !node.store.full();
        bool const has_data = node.data_buffer_bits > 0 && poll_ok_[d2] && up_bits_[d2] > 0;
        eligible = eligible || headroom || has_data;

        auto const split = split_power(received_w_[d2], split_ratio_);
        auto const charged = charge(node.store, split.harvest_w, dt);
        node.store = charged.store;
        out.harvested_j += charged.accepted_j;
        harvested_power += charged.accepted_j / dt;

        if (has_data && relay_left > 0)
        {
            double const bits = std::min({node.data_buffer_bits, up_bits_[d2], relay_left});
            node.data_buffer_bits -= bits;
            relay_left -= bits;
            out.throughput_bits += bits;
        }
    }

    double const gamma = c.reward_gamma;
    out.motion_term = out.motion_energy_j / motion_scale_;
    if (eligible)
    {
        out.throughput_term = gamma * (out.throughput_bits / throughput_scale_);
        out.harvest_term = (1 - gamma) * (harvested_power / power_scale_);
    }
    out.reward = out.throughput_term + out.harvest_term - out.motion_term;

    ++step_;
    out.terminal = drained.depleted;
    done_ = step_ >= c.episode_length || drained.depleted;
    out.done = done_;
    out.position = auv_.position;
    out.next_state = this->encode_state();
    return out;
}

//---------------------------------------------------------------------------//
// SNAPSHOT
//---------------------------------------------------------------------------//

json Environment::snapshot() const
{
    json nodes = json::array();
    for (auto const& n : nodes_)
    {
        nodes.push_back({{"position", {n.position[0], n.position[1], n.position[2]}},
                         {"store_level_j", n.store.level_j},
                         {"buffer_bits", n.data_buffer_bits}});
    }
    return {{"format", "aquaswipt-env/1"},
            {"config", to_json(config_)},
            {"nodes", std::move(nodes)},
            {"auv",
             {{"position", {auv_.position[0], auv_.position[1], auv_.position[2]}},
              {"battery_j", auv_.spec.battery.level_j}}},
            {"step", step_},
            {"done", done_}};
}

Environment Environment::from_snapshot(json const& snap)
{
    if (!snap.is_object() || snap.value("format", "") != "aquaswipt-env/1")
    {
        throw ConfigError({"snapshot.format: expected \"aquaswipt-env/1\""});
    }
    EnvConfig const config = env_config_from_json(snap.at("config"));
    Environment env(config);
    try
    {
        for (auto const& n : snap.at("nodes"))
        {
            Eigen::Vector3i const p = vec3i(n.at("position"));
            if (!inside(p, config.dims))
            {
                throw ConfigError({"snapshot.nodes: position outside the cube"});
            }
            NodeState initial{p, config.node_store, config.node_buffer_bits, config.node_modem,
                              config.node_harvest};
            env.initial_nodes_.push_back(initial);
            initial.store.level_j = n.at("store_level_j").get<double>();
            initial.data_buffer_bits = n.at("buffer_bits").get<double>();
            env.nodes_.push_back(initial);
        }
        auto const& auv = snap.at("auv");
        env.auv_.position = vec3i(auv.at("position"));
        env.auv_.spec.battery.level_j = auv.at("battery_j").get<double>();
        env.step_ = snap.at("step").get<int>();
        env.done_ = snap.at("done").get<bool>();
    }
    catch (json::exception const& e)
    {
        throw ConfigError({std::string("snapshot: ") + e.what()});
    }
    if (env.nodes_.empty())
    {
        throw ConfigError({"snapshot.nodes: no nodes"});
    }
    return env;
}

}  // namespace aquaswipt

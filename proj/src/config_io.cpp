#include "aquaswipt/config_io.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "aquaswipt/errors.hpp"

namespace aquaswipt
{
namespace
{
//---------------------------------------------------------------------------//
/*!
 * Reads optional fields from one JSON object, collecting every problem
 * (type mismatch, unknown key) under its dotted path instead of stopping at
 * the first.
 */
class Reader
{
  public:
    Reader(json const* j, std::string prefix, std::vector<std::string>& errors)
        : j_(j), prefix_(std::move(prefix)), errors_(errors)
    {
        if (j_ && !j_->is_object())
        {
            errors_.push_back(prefix_ + ": expected an object");
            j_ = nullptr;
        }
    }

    ~Reader()
    {
        if (!j_)
            return;
        for (auto const& [key, value] : j_->items())
        {
            if (!seen_.count(key))
                errors_.push_back(path(key.c_str()) + ": unknown field");
        }
    }

    bool has(char const* key) const { return j_ && j_->contains(key); }

    json const* raw(char const* key)
    {
        seen_.insert(key);
        if (!j_ || !j_->contains(key))
            return nullptr;
        return &j_->at(key);
    }

    template<class T>
    void get(char const* key, T& out)
    {
        if (auto const* v = raw(key))
            convert(key, *v, out);
    }

    template<class T>
    void get(char const* key, std::optional<T>& out)
    {
        if (auto const* v = raw(key))
        {
            if (v->is_null())
            {
                out.reset();
                return;
            }
            T tmp{};
            if (convert(key, *v, tmp))
                out = tmp;
        }
    }

    template<class T>
    void get_list(char const* key, std::vector<T>& out)
    {
        auto const* v = raw(key);
        if (!v)
            return;
        if (v->is_number())
        {
            T tmp{};
            if (convert(key, *v, tmp))
                out = {tmp};
            return;
        }
        if (!v->is_array())
        {
            errors_.push_back(path(key) + ": expected a list");
            return;
        }
        std::vector<T> result;
        for (auto const& item : *v)
        {
            T tmp{};
            if (!convert(key, item, tmp))
                return;
            result.push_back(tmp);
        }
        out = std::move(result);
    }

    template<int N, class T>
    void get_vec(char const* key, Eigen::Matrix<T, N, 1>& out)
    {
        auto const* v = raw(key);
        if (!v)
            return;
        if (!v->is_array() || v->size() != N)
        {
            errors_.push_back(path(key) + ": expected " + std::to_string(N) + " numbers");
            return;
        }
        for (int i = 0; i < N; ++i)
        {
            if (!convert(key, v->at(i), out[i]))
                return;
        }
    }

    Reader child(char const* key) { return Reader(raw(key), path(key), errors_); }

    std::string path(char const* key) const
    {
        return prefix_.empty() ? std::string(key) : prefix_ + "." + key;
    }

    std::vector<std::string>& errors() { return errors_; }

  private:
    template<class T>
    bool convert(char const* key, json const& v, T& out)
    {
        try
        {
            if constexpr (std::is_same_v<T, bool>)
            {
                if (!v.is_boolean())
                    throw std::invalid_argument("expected a boolean");
            }
            else if constexpr (std::is_arithmetic_v<T>)
            {
                if (!v.is_number())
                    throw std::invalid_argument("expected a number");
                if constexpr (std::is_integral_v<T>)
                {
                    if (!v.is_number_integer())
                        throw std::invalid_argument("expected an integer");
                }
            }
            out = v.get<T>();
            return true;
        }
        catch (std::exception const& e)
        {
            errors_.push_back(path(key) + ": " + e.what());
            return false;
        }
    }

    json const* j_;
    std::string prefix_;
    std::vector<std::string>& errors_;
    std::set<std::string> seen_;
};

json vec_json(auto const& v)
{
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        a.push_back(v[i]);
    return a;
}

json optional_json(std::optional<double> const& v)
{
    return v ? json(*v) : json(nullptr);
}

//---------------------------------------------------------------------------//

json modem_json(ModemSpec const& m)
{
    return {{"electrical_power_w", m.electrical_power_w},
            {"ea_efficiency", m.ea_efficiency},
            {"directivity_index_db", m.directivity_index_db},
            {"source_level_db", optional_json(m.source_level_db)},
            {"min_snr_db", m.min_snr_db}};
}

void read_modem(Reader r, ModemSpec& m)
{
    r.get("electrical_power_w", m.electrical_power_w);
    r.get("ea_efficiency", m.ea_efficiency);
    r.get("directivity_index_db", m.directivity_index_db);
    r.get("source_level_db", m.source_level_db);
    r.get("min_snr_db", m.min_snr_db);
}

json store_json(EnergyStore const& s)
{
    return {{"capacity_j", s.capacity_j},
            {"level_j", s.level_j},
            {"charge_efficiency", s.charge_efficiency}};
}

void read_store(Reader r, EnergyStore& s)
{
    r.get("capacity_j", s.capacity_j);
    r.get("level_j", s.level_j);
    r.get("charge_efficiency", s.charge_efficiency);
}

void read_channel(Reader r, ChannelParams& c)
{
    r.get("frequency_khz", c.frequency_khz);
    r.get("bandwidth_hz", c.bandwidth_hz);
    r.get("spreading_factor_k", c.spreading_factor_k);
    r.get("wind_speed_w", c.wind_speed_w);
    r.get("shipping_factor_s", c.shipping_factor_s);
    r.get("sound_speed_c", c.sound_speed_c);
    if (auto const* nm = r.raw("noise_model"))
    {
        if (nm->is_string() && nm->get<std::string>() == "composite")
        {
            c.noise_model = {};
        }
        else if (nm->is_object() && nm->contains("constant_override_db")
                 && nm->at("constant_override_db").is_number() && nm->size() == 1)
        {
            c.noise_model = NoiseModel::constant(nm->at("constant_override_db").get<double>());
        }
        else
        {
            r.errors().push_back(r.path("noise_model")
                                 + ": expected \"composite\" or {\"constant_override_db\": x}");
        }
    }
}

void read_auv(Reader r, AuvSpec& a)
{
    r.get("drag_coefficient_cd", a.drag_coefficient_cd);
    r.get("frontal_area_m2", a.frontal_area_m2);
    r.get("water_density", a.water_density);
    r.get("motor_efficiency_beta", a.motor_efficiency_beta);
    r.get("speed_mps", a.speed_mps);
    r.get("hotel_load_w", a.hotel_load_w);
    r.get("cone_apex_angle_deg", a.cone_apex_angle_deg);
    read_store(r.child("battery"), a.battery);
}

void read_harvest(Reader r, HarvestSpec& h)
{
    std::optional<double> rho, m;
    r.get("sensitivity_rho_db", rho);
    r.get("sensitivity_m", m);
    if (rho && m)
    {
        r.errors().push_back(r.path("sensitivity_m")
                             + ": give either sensitivity_rho_db or sensitivity_m");
    }
    else if (rho)
    {
        auto const fresh = HarvestSpec::from_sensitivity_db(*rho);
        h.sensitivity_rho_db = fresh.sensitivity_rho_db;
        h.sensitivity_m = fresh.sensitivity_m;
    }
    else if (m)
    {
        if (*m > 0)
        {
            auto const fresh = HarvestSpec::from_sensitivity_linear(*m);
            h.sensitivity_rho_db = fresh.sensitivity_rho_db;
            h.sensitivity_m = fresh.sensitivity_m;
        }
        else
        {
            r.errors().push_back(r.path("sensitivity_m") + ": must be positive");
        }
    }
    r.get("load_resistance_ohm", h.load_resistance_ohm);
    r.get("array_elements_n", h.array_elements_n);
    r.get("ae_efficiency", h.ae_efficiency);
    r.get("split_ratio", h.split_ratio);
}

void read_env(Reader r, EnvConfig& c)
{
    r.get_vec("dims_lwh_m", c.dims);
    if (r.has("node_density_lambda") && !r.has("node_count"))
    {
        c.node_count.reset();
    }
    r.get("node_count", c.node_count);
    r.get("node_density_lambda", c.node_density_lambda);
    r.get("episode_length", c.episode_length);
    r.get("step_duration_s", c.step_duration_s);
    r.get("rng_seed", c.rng_seed);
    read_channel(r.child("channel"), c.channel);
    read_auv(r.child("auv"), c.auv);
    read_modem(r.child("node_modem"), c.node_modem);
    read_modem(r.child("auv_modem"), c.auv_modem);
    read_harvest(r.child("node_harvest"), c.node_harvest);
    read_store(r.child("node_store"), c.node_store);
    r.get("node_buffer_bits", c.node_buffer_bits);
    r.get_vec("surface_station_xy", c.surface_station_xy);
    r.get_vec("start_xy", c.start_xy);
    r.get("reward_gamma", c.reward_gamma);
    r.get("split_follows_gamma", c.split_follows_gamma);
    r.get("throughput_scale", c.throughput_scale);
    r.get("power_scale", c.power_scale);
    r.get("motion_scale", c.motion_scale);
}

void read_learn(Reader r, LearnConfig& c)
{
    r.get("learning_rate", c.learning_rate);
    r.get("discount_kappa", c.discount_kappa);
    r.get("epsilon0", c.epsilon0);
    r.get("epsilon_decay", c.epsilon_decay);
    r.get("epsilon_min", c.epsilon_min);
    r.get("episodes", c.episodes);
    r.get("seed", c.seed);
    r.get("learning_rate_decay", c.learning_rate_decay);
    r.get("learning_rate_min", c.learning_rate_min);
    r.get("initial_q", c.initial_q);
    r.get("randomize_start", c.randomize_start);
    r.get("keep_step_traces", c.keep_step_traces);
    r.get("replay_memory_size", c.replay_memory_size);
    r.get("batch_size", c.batch_size);
}

void read_campaign(Reader r, CampaignConfig& c)
{
    read_env(r.child("env"), c.env);
    read_learn(r.child("learn"), c.learn);
    if (auto const* algos = r.raw("algorithms"))
    {
        c.algorithms.clear();
        if (!algos->is_array())
        {
            r.errors().push_back("algorithms: expected a list");
        }
        else
        {
            for (auto const& a : *algos)
            {
                auto parsed = a.is_string() ? parse_algorithm(a.get<std::string>()) : std::nullopt;
                if (parsed)
                    c.algorithms.push_back(*parsed);
                else
                    r.errors().push_back("algorithms: unknown algorithm " + a.dump());
            }
        }
    }
    r.get_list("node_counts", c.node_counts);
    r.get("throughput_gamma", c.throughput_gamma);
    r.get("harvest_gamma", c.harvest_gamma);
    r.get_list("gamma_sweep", c.gamma_sweep);
    r.get("gamma_sweep_nodes", c.gamma_sweep_nodes);
    r.get("mc_runs", c.mc_runs);
    r.get("master_seed", c.master_seed);
    std::string out = c.output_dir.string();
    r.get("output_dir", out);
    c.output_dir = out;
    r.get_list("target_throughput_bits", c.target_throughput_bits);
    r.get_list("target_harvest_j", c.target_harvest_j);
    r.get("bootstrap_resamples", c.bootstrap_resamples);
    r.get("save_checkpoints", c.save_checkpoints);

    Reader cov = r.child("coverage");
    if (auto const* starts = cov.raw("starts"))
    {
        c.coverage.starts.clear();
        bool ok = starts->is_array();
        for (std::size_t i = 0; ok && i < starts->size(); ++i)
        {
            auto const& s = starts->at(i);
            ok = s.is_array() && s.size() == 2 && s[0].is_number() && s[1].is_number();
            if (ok)
                c.coverage.starts.emplace_back(s[0].get<double>(), s[1].get<double>());
        }
        if (!ok)
            cov.errors().push_back("coverage.starts: expected a list of [x, y] pairs");
    }
    cov.get_list("node_counts", c.coverage.node_counts);
    cov.get_list("k_values", c.coverage.k_values);
    cov.get("trials", c.coverage.trials);
    cov.get("volume_samples", c.coverage.volume_samples);
}

}  // namespace

//---------------------------------------------------------------------------//
// SERIALISATION
//---------------------------------------------------------------------------//

json to_json(EnvConfig const& c)
{
    auto const& ch = c.channel;
    json noise = ch.noise_model.kind == NoiseKind::composite
                     ? json("composite")
                     : json{{"constant_override_db", ch.noise_model.nl_db}};
    auto const& a = c.auv;
    auto const& h = c.node_harvest;
    return {
        {"dims_lwh_m", vec_json(c.dims)},
        {"node_count", c.node_count ? json(*c.node_count) : json(nullptr)},
        {"node_density_lambda", optional_json(c.node_density_lambda)},
        {"episode_length", c.episode_length},
        {"step_duration_s", c.step_duration_s},
        {"rng_seed", c.rng_seed},
        {"channel",
         {{"frequency_khz", ch.frequency_khz},
          {"bandwidth_hz", ch.bandwidth_hz},
          {"spreading_factor_k", ch.spreading_factor_k},
          {"wind_speed_w", ch.wind_speed_w},
          {"shipping_factor_s", ch.shipping_factor_s},
          {"sound_speed_c", ch.sound_speed_c},
          {"noise_model", noise}}},
        {"auv",
         {{"drag_coefficient_cd", a.drag_coefficient_cd},
          {"frontal_area_m2", a.frontal_area_m2},
          {"water_density", a.water_density},
          {"motor_efficiency_beta", a.motor_efficiency_beta},
          {"speed_mps", a.speed_mps},
          {"hotel_load_w", a.hotel_load_w},
          {"cone_apex_angle_deg", a.cone_apex_angle_deg},
          {"battery", store_json(a.battery)}}},
        {"node_modem", modem_json(c.node_modem)},
        {"auv_modem", modem_json(c.auv_modem)},
        {"node_harvest",
         {{"sensitivity_rho_db", h.sensitivity_rho_db},
          {"load_resistance_ohm", h.load_resistance_ohm},
          {"array_elements_n", h.array_elements_n},
          {"ae_efficiency", h.ae_efficiency},
          {"split_ratio", h.split_ratio}}},
        {"node_store", store_json(c.node_store)},
        {"node_buffer_bits", c.node_buffer_bits},
        {"surface_station_xy", vec_json(c.surface_station_xy)},
        {"start_xy", vec_json(c.start_xy)},
        {"reward_gamma", c.reward_gamma},
        {"split_follows_gamma", c.split_follows_gamma},
        {"throughput_scale", optional_json(c.throughput_scale)},
        {"power_scale", optional_json(c.power_scale)},
        {"motion_scale", optional_json(c.motion_scale)},
    };
}

json to_json(LearnConfig const& c)
{
    return {{"learning_rate", c.learning_rate},
            {"discount_kappa", c.discount_kappa},
            {"epsilon0", c.epsilon0},
            {"epsilon_decay", c.epsilon_decay},
            {"epsilon_min", c.epsilon_min},
            {"episodes", c.episodes},
            {"seed", c.seed},
            {"learning_rate_decay", c.learning_rate_decay},
            {"learning_rate_min", c.learning_rate_min},
            {"initial_q", c.initial_q},
            {"randomize_start", c.randomize_start},
            {"keep_step_traces", c.keep_step_traces},
            {"replay_memory_size", c.replay_memory_size},
            {"batch_size", c.batch_size}};
}

json to_json(CampaignConfig const& c)
{
    json algos = json::array();
    for (auto a : c.algorithms)
        algos.push_back(std::string(to_string(a)));
    json starts = json::array();
    for (auto const& s : c.coverage.starts)
        starts.push_back({s[0], s[1]});
    return {{"env", to_json(c.env)},
            {"learn", to_json(c.learn)},
            {"algorithms", algos},
            {"node_counts", c.node_counts},
            {"throughput_gamma", c.throughput_gamma},
            {"harvest_gamma", c.harvest_gamma},
            {"gamma_sweep", c.gamma_sweep},
            {"gamma_sweep_nodes", c.gamma_sweep_nodes},
            {"mc_runs", c.mc_runs},
            {"master_seed", c.master_seed},
            {"output_dir", c.output_dir.string()},
            {"target_throughput_bits", c.target_throughput_bits},
            {"target_harvest_j", c.target_harvest_j},
            {"bootstrap_resamples", c.bootstrap_resamples},
            {"save_checkpoints", c.save_checkpoints},
            {"coverage",
             {{"starts", starts},
              {"node_counts", c.coverage.node_counts},
              {"k_values", c.coverage.k_values},
              {"trials", c.coverage.trials},
              {"volume_samples", c.coverage.volume_samples}}}};
}

EnvConfig env_config_from_json(json const& j)
{
    std::vector<std::string> errors;
    EnvConfig c;
    read_env(Reader(&j, "", errors), c);
    if (errors.empty())
        errors = c.validate();
    if (!errors.empty())
        throw ConfigError(std::move(errors));
    return c;
}

LearnConfig learn_config_from_json(json const& j)
{
    std::vector<std::string> errors;
    LearnConfig c;
    read_learn(Reader(&j, "learn", errors), c);
    if (errors.empty())
        errors = c.validate();
    if (!errors.empty())
        throw ConfigError(std::move(errors));
    return c;
}

CampaignConfig campaign_config_from_json(json const& j)
{
    // A run manifest embeds the complete config under "config"
    json const& doc = j.is_object() && j.value("format", "") == "aquaswipt-manifest/1"
                          ? j.at("config")
                          : j;
    std::vector<std::string> errors;
    CampaignConfig c;
    read_campaign(Reader(&doc, "", errors), c);
    if (errors.empty())
        errors = c.validate();
    if (!errors.empty())
        throw ConfigError(std::move(errors));
    return c;
}

json load_json_file(std::filesystem::path const& path)
{
    std::ifstream in(path);
    if (!in)
    {
        throw IoError(path, "cannot open for reading");
    }
    try
    {
        return json::parse(in);
    }
    catch (json::parse_error const& e)
    {
        throw ConfigError({path.string() + ": " + e.what()});
    }
}

void apply_override(json& doc, std::string_view dotted_path, std::string_view value)
{
    if (dotted_path.empty())
    {
        throw ConfigError({"override: empty field path"});
    }
    json* node = &doc;
    std::size_t pos = 0;
    while (true)
    {
        auto const dot = dotted_path.find('.', pos);
        std::string const key(dotted_path.substr(pos, dot - pos));
        if (key.empty())
        {
            throw ConfigError({std::string(dotted_path) + ": malformed field path"});
        }
        if (!node->is_object())
        {
            if (!node->is_null())
                throw ConfigError({std::string(dotted_path) + ": not an object"});
            *node = json::object();
        }
        node = &(*node)[key];
        if (dot == std::string_view::npos)
            break;
        pos = dot + 1;
    }
    json parsed = json::parse(value, nullptr, false);
    *node = parsed.is_discarded() ? json(std::string(value)) : std::move(parsed);
}

std::string format_number(double v)
{
    if (v == 0)
        return "0";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace aquaswipt

#include "aquaswipt/rl.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "aquaswipt/errors.hpp"

namespace aquaswipt
{
std::string_view to_string(Algorithm a)
{
    switch (a)
    {
        case Algorithm::q_learning: return "qlearning";
        case Algorithm::sarsa: return "sarsa";
        case Algorithm::random: return "random";
    }
    return "?";
}

std::optional<Algorithm> parse_algorithm(std::string_view name)
{
    if (name == "qlearning" || name == "q_learning" || name == "QLearning")
        return Algorithm::q_learning;
    if (name == "sarsa" || name == "SARSA")
        return Algorithm::sarsa;
    if (name == "random" || name == "Random")
        return Algorithm::random;
    return std::nullopt;
}

std::vector<std::string> LearnConfig::validate() const
{
    std::vector<std::string> bad;
    if (!(learning_rate > 0 && learning_rate <= 1))
        bad.emplace_back("learn.learning_rate: must lie in (0, 1]");
    if (!(discount_kappa > 0 && discount_kappa <= 1))
        bad.emplace_back("learn.discount_kappa: must lie in (0, 1]");
    if (!(epsilon0 >= 0 && epsilon0 <= 1))
        bad.emplace_back("learn.epsilon0: must lie in [0, 1]");
    if (!(epsilon_decay > 0 && epsilon_decay <= 1))
        bad.emplace_back("learn.epsilon_decay: must lie in (0, 1]");
    if (!(epsilon_min >= 0 && epsilon_min <= epsilon0))
        bad.emplace_back("learn.epsilon_min: must lie in [0, epsilon0]");
    if (episodes <= 0)
        bad.emplace_back("learn.episodes: must be positive");
    if (!(learning_rate_decay > 0 && learning_rate_decay <= 1))
        bad.emplace_back("learn.learning_rate_decay: must lie in (0, 1]");
    if (!(learning_rate_min >= 0 && learning_rate_min <= learning_rate))
        bad.emplace_back("learn.learning_rate_min: must lie in [0, learning_rate]");
    if (!std::isfinite(initial_q))
        bad.emplace_back("learn.initial_q: must be finite");
    return bad;
}

//---------------------------------------------------------------------------//

namespace
{
std::string exact(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template<class Policy>
Rollout run_episode(Environment& env, Policy&& policy)
{
    Rollout r;
    StateKey s = env.reset(false);
    r.start = env.auv().position;
    r.trajectory.reserve(env.config().episode_length);
    while (!env.done())
    {
        auto const out = env.step(kAllActions[policy(s)]);
        record(r.metrics, out);
        r.trajectory.push_back(out.position);
        s = out.next_state;
    }
    return r;
}
}  // namespace

Rollout greedy_rollout(Environment& env, EnvQTable const& q)
{
    return run_episode(env, [&q](StateKey const& s) { return q.greedy_action(s); });
}

Rollout random_rollout(Environment& env, Rng& rng)
{
    return run_episode(env, [&rng](StateKey const&) { return int(rng.below(kNumActions)); });
}

//---------------------------------------------------------------------------//

void write_qtable(std::ostream& os, EnvQTable const& q)
{
    // Sorted so the file is independent of hash-map iteration order
    std::vector<std::pair<StateKey, EnvQTable::Values>> rows(q.begin(), q.end());
    std::sort(rows.begin(), rows.end(), [](auto const& a, auto const& b) {
        auto key = [](StateKey const& k) {
            return std::array{k.auv_pos[0], k.auv_pos[1], k.auv_pos[2], k.covered_with_data,
                              k.covered_undercharged, k.gain_bin};
        };
        return key(a.first) < key(b.first);
    });
    os << "# aquaswipt-qtable/1 default " << exact(q.default_value()) << " rows " << rows.size()
       << '\n';
    for (auto const& [k, v] : rows)
    {
        os << k.auv_pos[0] << ' ' << k.auv_pos[1] << ' ' << k.auv_pos[2] << ' '
           << k.covered_with_data << ' ' << k.covered_undercharged << ' ' << k.gain_bin;
        for (int a = 0; a < kNumActions; ++a)
        {
            os << ' ' << exact(v[a]);
        }
        os << '\n';
    }
}

EnvQTable read_qtable(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line))
    {
        throw ConfigError({"qtable: empty input"});
    }
    std::istringstream header(line);
    std::string hash, tag, word;
    double def = 0;
    std::size_t count = 0;
    if (!(header >> hash >> tag >> word >> def) || hash != "#" || tag != "aquaswipt-qtable/1"
        || word != "default")
    {
        throw ConfigError({"qtable: missing 'aquaswipt-qtable/1' header"});
    }
    header >> word >> count;

    EnvQTable q(def);
    std::size_t lineno = 1;
    while (std::getline(is, line))
    {
        ++lineno;
        if (line.empty())
            continue;
        std::istringstream row(line);
        StateKey k;
        EnvQTable::Values v;
        row >> k.auv_pos[0] >> k.auv_pos[1] >> k.auv_pos[2] >> k.covered_with_data
            >> k.covered_undercharged >> k.gain_bin;
        for (int a = 0; a < kNumActions; ++a)
        {
            row >> v[a];
        }
        if (!row || !v.allFinite())
        {
            throw ConfigError({"qtable: malformed row at line " + std::to_string(lineno)});
        }
        q.row(k) = v;
    }
    if (count != 0 && q.size() != count)
    {
        throw ConfigError({"qtable: row count does not match header"});
    }
    return q;
}

}  // namespace aquaswipt

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "action.hpp"
#include "env3d.hpp"
#include "rng.hpp"

namespace aquaswipt
{
//---------------------------------------------------------------------------//
// CONFIGURATION
//---------------------------------------------------------------------------//

enum class Algorithm
{
    q_learning,
    sarsa,
    random,
};

std::string_view to_string(Algorithm a);
std::optional<Algorithm> parse_algorithm(std::string_view name);

struct LearnConfig
{
    double learning_rate = 0.75;
    double discount_kappa = 0.99;
    double epsilon0 = 1.0;
    double epsilon_decay = 0.999;
    double epsilon_min = 0.001;
    int episodes = 40000;
    std::uint64_t seed = 7;

    //! Per-episode multiplicative learning-rate annealing (1 = constant)
    double learning_rate_decay = 1.0;
    double learning_rate_min = 0.0;
    //! Initial value of every table entry
    double initial_q = 0.0;
    bool randomize_start = false;
    //! Keep per-step traces of training episodes (memory heavy)
    bool keep_step_traces = false;

    // Accepted for completeness of published parameter sets; tabular
    // methods have no replay buffer.
    int replay_memory_size = 1000;
    int batch_size = 4;

    std::vector<std::string> validate() const;

    //! Exploration rate in effect during episode t (0-based).
    double epsilon_at(int t) const
    {
        return std::max(epsilon_min, epsilon0 * std::pow(epsilon_decay, t));
    }
    double learning_rate_at(int t) const
    {
        return std::max(learning_rate_min, learning_rate * std::pow(learning_rate_decay, t));
    }
};

//---------------------------------------------------------------------------//
// Q TABLE
//---------------------------------------------------------------------------//

template<class Key>
struct KeyHash : std::hash<Key>
{
};

template<>
struct KeyHash<StateKey> : StateKeyHash
{
};

//! Sparse action-value table; absent keys read as the default value.
template<class Key>
class QTable
{
  public:
    using key_type = Key;
    using Values = Eigen::Matrix<double, kNumActions, 1>;
    using Map = std::unordered_map<Key, Values, KeyHash<Key>>;

    explicit QTable(double default_value = 0) : default_(default_value) {}

    double default_value() const { return default_; }
    std::size_t size() const { return entries_.size(); }
    bool contains(Key const& k) const { return entries_.count(k) != 0; }

    Values values(Key const& k) const
    {
        auto it = entries_.find(k);
        return it == entries_.end() ? Values::Constant(default_) : it->second;
    }

    double value(Key const& k, int a) const
    {
        auto it = entries_.find(k);
        return it == entries_.end() ? default_ : it->second[a];
    }

    //! Mutable row, inserted at the default value when absent.
    Values& row(Key const& k)
    {
        auto [it, inserted] = entries_.try_emplace(k, Values::Constant(default_));
        return it->second;
    }

    double max_value(Key const& k) const
    {
        auto it = entries_.find(k);
        return it == entries_.end() ? default_ : it->second.maxCoeff();
    }

    //! Argmax with ties resolved to the lowest action index.
    int greedy_action(Key const& k) const
    {
        auto it = entries_.find(k);
        if (it == entries_.end())
        {
            return 0;
        }
        return greedy_index(it->second);
    }

    static int greedy_index(Values const& v)
    {
        int best = 0;
        for (int a = 1; a < kNumActions; ++a)
        {
            if (v[a] > v[best])
            {
                best = a;
            }
        }
        return best;
    }

    typename Map::const_iterator begin() const { return entries_.begin(); }
    typename Map::const_iterator end() const { return entries_.end(); }

  private:
    Map entries_;
    double default_;
};

using EnvQTable = QTable<StateKey>;

//---------------------------------------------------------------------------//
// ACTION SELECTION AND UPDATES
//---------------------------------------------------------------------------//

//! Epsilon-greedy: uniform random action with probability epsilon.
template<class Key>
int select_action(QTable<Key> const& q, Key const& s, double epsilon, Rng& rng)
{
    if (epsilon > 0 && rng.uniform() < epsilon)
    {
        return static_cast<int>(rng.below(kNumActions));
    }
    return q.greedy_action(s);
}

//! Off-policy TD update toward r + kappa * max_a' Q(s', a').
template<class Key>
void q_update(QTable<Key>& q,
              Key const& s,
              int a,
              double r,
              Key const& s_next,
              double rate,
              double kappa,
              bool terminal = false)
{
    double const target = r + (terminal ? 0.0 : kappa * q.max_value(s_next));
    double& cell = q.row(s)[a];
    cell += rate * (target - cell);
}

template<class Key>
void q_update(QTable<Key>& q, Key const& s, int a, double r, Key const& s_next, LearnConfig const& cfg)
{
    q_update(q, s, a, r, s_next, cfg.learning_rate, cfg.discount_kappa);
}

//! On-policy TD update toward r + kappa * Q(s', a').
template<class Key>
void sarsa_update(QTable<Key>& q,
                  Key const& s,
                  int a,
                  double r,
                  Key const& s_next,
                  int a_next,
                  double rate,
                  double kappa,
                  bool terminal = false)
{
    double const target = r + (terminal ? 0.0 : kappa * q.value(s_next, a_next));
    double& cell = q.row(s)[a];
    cell += rate * (target - cell);
}

template<class Key>
void sarsa_update(QTable<Key>& q,
                  Key const& s,
                  int a,
                  double r,
                  Key const& s_next,
                  int a_next,
                  LearnConfig const& cfg)
{
    sarsa_update(q, s, a, r, s_next, a_next, cfg.learning_rate, cfg.discount_kappa);
}

//---------------------------------------------------------------------------//
// EPISODES
//---------------------------------------------------------------------------//

struct EpisodeMetrics
{
    double total_reward = 0;
    double throughput_bits = 0;
    double harvested_j = 0;
    double motion_energy_j = 0;
    double swipt_energy_j = 0;
    double throughput_term = 0;
    double harvest_term = 0;
    double motion_term = 0;
    int actions = 0;
    std::vector<double> reward_trace;
    std::vector<double> throughput_trace;
    std::vector<double> harvest_trace;

    void clear_traces()
    {
        reward_trace = {};
        throughput_trace = {};
        harvest_trace = {};
    }
};

template<class Outcome>
void record(EpisodeMetrics& m, Outcome const& out)
{
    m.total_reward += out.reward;
    m.actions += 1;
    m.reward_trace.push_back(out.reward);
    if constexpr (requires { out.throughput_bits; })
    {
        m.throughput_bits += out.throughput_bits;
        m.harvested_j += out.harvested_j;
        m.motion_energy_j += out.motion_energy_j;
        m.swipt_energy_j += out.swipt_energy_j;
        m.throughput_term += out.throughput_term;
        m.harvest_term += out.harvest_term;
        m.motion_term += out.motion_term;
        m.throughput_trace.push_back(out.throughput_bits);
        m.harvest_trace.push_back(out.harvested_j);
    }
}

template<class Env>
struct TrainResult
{
    QTable<typename Env::State> table;
    std::vector<EpisodeMetrics> episodes;
};

//---------------------------------------------------------------------------//
/*!
 * Run \c cfg.episodes episodes of tabular control on \c env.
 *
 * Exploration and learning rate follow the per-episode schedules of
 * LearnConfig. Time-limit endings bootstrap; depletion endings do not.
 * The random baseline selects uniformly and never writes to the table.
 */
template<class Env>
TrainResult<Env> train(Env& env, Algorithm algo, LearnConfig const& cfg)
{
    using State = typename Env::State;
    TrainResult<Env> result{QTable<State>(cfg.initial_q), {}};
    auto& q = result.table;
    result.episodes.reserve(cfg.episodes);
    Rng rng(cfg.seed);

    for (int ep = 0; ep < cfg.episodes; ++ep)
    {
        double const eps = algo == Algorithm::random ? 1.0 : cfg.epsilon_at(ep);
        double const rate = cfg.learning_rate_at(ep);
        EpisodeMetrics m;
        State s = env.reset(cfg.randomize_start);
        int a = select_action(q, s, eps, rng);
        while (true)
        {
            auto const out = env.step(kAllActions[a]);
            record(m, out);
            int a_next = 0;
            switch (algo)
            {
                case Algorithm::q_learning:
                    q_update(q, s, a, out.reward, out.next_state, rate, cfg.discount_kappa,
                             out.terminal);
                    if (!out.done)
                    {
                        a_next = select_action(q, out.next_state, eps, rng);
                    }
                    break;
                case Algorithm::sarsa:
                    a_next = select_action(q, out.next_state, eps, rng);
                    sarsa_update(q, s, a, out.reward, out.next_state, a_next, rate,
                                 cfg.discount_kappa, out.terminal);
                    break;
                case Algorithm::random:
                    if (!out.done)
                    {
                        a_next = select_action(q, out.next_state, 1.0, rng);
                    }
                    break;
            }
            if (out.done)
            {
                break;
            }
            s = out.next_state;
            a = a_next;
        }
        if (!cfg.keep_step_traces)
        {
            m.clear_traces();
        }
        result.episodes.push_back(std::move(m));
    }
    return result;
}

//! One evaluation episode of an AUV policy.
struct Rollout
{
    EpisodeMetrics metrics;
    Eigen::Vector3i start = Eigen::Vector3i::Zero();
    //! Position after each action
    std::vector<Eigen::Vector3i> trajectory;
};

//! Follow argmax Q with no exploration from the fixed start.
Rollout greedy_rollout(Environment& env, EnvQTable const& q);

//! Uniformly random actions from the fixed start.
Rollout random_rollout(Environment& env, Rng& rng);

//---------------------------------------------------------------------------//
// PERSISTENCE
//---------------------------------------------------------------------------//

/*!
 * Plain-text table: a header line, then one line per state
 * "x y z with_data undercharged gain_bin q0 .. q5" (17 significant digits).
 */
void write_qtable(std::ostream& os, EnvQTable const& q);
EnvQTable read_qtable(std::istream& is);

}  // namespace aquaswipt

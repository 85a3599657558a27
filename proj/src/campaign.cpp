#include "aquaswipt/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <map>
#include <mutex>
#include <numeric>
#include <thread>

#include "aquaswipt/errors.hpp"

namespace aquaswipt
{
//---------------------------------------------------------------------------//
// CONFIGURATION
//---------------------------------------------------------------------------//

std::vector<std::string> CampaignConfig::validate() const
{
    std::vector<std::string> bad = env.validate();
    for (auto& s : learn.validate())
        bad.push_back(std::move(s));
    if (algorithms.empty())
        bad.emplace_back("algorithms: at least one algorithm required");
    if (node_counts.empty() && gamma_sweep.empty())
        bad.emplace_back("node_counts: nothing to run");
    for (int n : node_counts)
    {
        if (n <= 0)
            bad.emplace_back("node_counts: counts must be positive");
    }
    for (double g : {throughput_gamma, harvest_gamma})
    {
        if (!(g >= 0 && g <= 1))
            bad.emplace_back("throughput_gamma/harvest_gamma: must lie in [0, 1]");
    }
    for (double g : gamma_sweep)
    {
        if (!(g >= 0 && g <= 1))
            bad.emplace_back("gamma_sweep: values must lie in [0, 1]");
    }
    if (!gamma_sweep.empty() && gamma_sweep_nodes <= 0)
        bad.emplace_back("gamma_sweep_nodes: must be positive");
    if (mc_runs <= 0)
        bad.emplace_back("mc_runs: must be positive");
    for (double t : target_throughput_bits)
    {
        if (!(t > 0))
            bad.emplace_back("target_throughput_bits: targets must be positive");
    }
    for (double t : target_harvest_j)
    {
        if (!(t > 0))
            bad.emplace_back("target_harvest_j: targets must be positive");
    }
    if (bootstrap_resamples < 100)
        bad.emplace_back("bootstrap_resamples: at least 100 required");
    if (coverage.trials < 100)
        bad.emplace_back("coverage.trials: at least 100 required");
    if (coverage.volume_samples < 1000)
        bad.emplace_back("coverage.volume_samples: at least 1000 required");
    for (int k : coverage.k_values)
    {
        if (k < 1)
            bad.emplace_back("coverage.k_values: values must be at least 1");
    }
    for (int n : coverage.node_counts)
    {
        if (n < 0)
            bad.emplace_back("coverage.node_counts: counts must be non-negative");
    }
    return bad;
}

std::string_view to_string(CellKind k)
{
    switch (k)
    {
        case CellKind::throughput: return "throughput";
        case CellKind::harvest: return "harvest";
        case CellKind::gamma: return "gamma";
    }
    return "?";
}

//---------------------------------------------------------------------------//
// METRICS
//---------------------------------------------------------------------------//

double energy_efficiency(double throughput_bits, double total_energy_j)
{
    if (!(total_energy_j > 0))
    {
        throw DomainError("energy_efficiency: total energy must be positive");
    }
    if (!(throughput_bits >= 0))
    {
        throw DomainError("energy_efficiency: negative throughput");
    }
    return throughput_bits / total_energy_j;
}

std::optional<int> actions_to_target(std::span<double const> per_step, double target)
{
    double total = 0;
    for (std::size_t i = 0; i < per_step.size(); ++i)
    {
        total += per_step[i];
        if (total >= target)
            return int(i + 1);
    }
    return std::nullopt;
}

std::optional<int> actions_to_target(EpisodeMetrics const& m, double target, Quantity q)
{
    return actions_to_target(q == Quantity::throughput ? m.throughput_trace : m.harvest_trace,
                             target);
}

std::optional<Quantity> target_quantity(CellKind kind)
{
    switch (kind)
    {
        case CellKind::throughput: return Quantity::throughput;
        case CellKind::harvest: return Quantity::harvest;
        case CellKind::gamma: return std::nullopt;
    }
    return std::nullopt;
}

std::vector<double> campaign_targets(CampaignConfig const& config,
                                     std::span<RunResult const> runs,
                                     CellKind kind,
                                     int nodes)
{
    auto const q = target_quantity(kind);
    if (!q)
        return {};
    auto const& fixed
        = *q == Quantity::throughput ? config.target_throughput_bits : config.target_harvest_j;
    std::vector<double> targets;
    if (!fixed.empty())
    {
        targets = fixed;
    }
    else
    {
        for (auto a : config.algorithms)
        {
            double sum = 0;
            int count = 0;
            for (auto const& r : runs)
            {
                if (r.key.kind != kind || r.key.nodes != nodes || r.key.algorithm != a)
                    continue;
                sum += *q == Quantity::throughput ? r.rollout.throughput_bits
                                                  : r.rollout.harvested_j;
                ++count;
            }
            if (count > 0 && sum > 0)
                targets.push_back(sum / count);
        }
    }
    std::sort(targets.begin(), targets.end());
    targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
    return targets;
}

void assign_targets(CampaignConfig const& config, std::span<RunResult> runs)
{
    std::map<std::pair<int, int>, std::vector<double>> cache;
    for (auto& r : runs)
    {
        auto const q = target_quantity(r.key.kind);
        if (!q)
            continue;
        auto [it, fresh] = cache.try_emplace({int(r.key.kind), r.key.nodes});
        if (fresh)
            it->second = campaign_targets(config, runs, r.key.kind, r.key.nodes);
        r.targets = it->second;
        r.actions.clear();
        for (double t : r.targets)
            r.actions.push_back(actions_to_target(r.rollout, t, *q));
    }
}

std::pair<double, double> bootstrap_mean_ci(std::span<double const> samples,
                                            int resamples,
                                            double confidence,
                                            std::uint64_t seed)
{
    if (samples.empty())
    {
        throw DomainError("bootstrap_mean_ci: no samples");
    }
    if (resamples < 1 || !(confidence > 0 && confidence < 1))
    {
        throw DomainError("bootstrap_mean_ci: bad resample count or confidence");
    }
    Rng rng(seed);
    std::vector<double> means(resamples);
    for (auto& m : means)
    {
        double sum = 0;
        for (std::size_t i = 0; i < samples.size(); ++i)
            sum += samples[rng.below(samples.size())];
        m = sum / double(samples.size());
    }
    std::sort(means.begin(), means.end());
    double const tail = (1 - confidence) / 2;
    auto at = [&](double q) {
        auto const i = std::size_t(std::floor(q * double(resamples - 1) + 0.5));
        return means[std::min(i, means.size() - 1)];
    };
    return {at(tail), at(1 - tail)};
}

//---------------------------------------------------------------------------//
// CELLS
//---------------------------------------------------------------------------//

std::vector<CellKey> campaign_cells(CampaignConfig const& config)
{
    std::vector<CellKey> cells;
    auto add = [&](CellKind kind, Algorithm a, int nodes, int gi, double gamma) {
        for (int run = 0; run < config.mc_runs; ++run)
        {
            // Deployments depend only on (nodes, run): every algorithm and
            // weighting faces the same node fields.
            std::uint64_t const deploy
                = mix_seed(config.master_seed, mix_seed(std::uint64_t(nodes), std::uint64_t(run)));
            std::uint64_t const tag = std::uint64_t(a) << 40 | std::uint64_t(kind) << 32
                                      | std::uint64_t(std::uint32_t(gi));
            cells.push_back({kind, a, nodes, gi, gamma, run, deploy, mix_seed(deploy, tag)});
        }
    };
    for (auto a : config.algorithms)
    {
        for (int n : config.node_counts)
            add(CellKind::throughput, a, n, -1, config.throughput_gamma);
    }
    for (auto a : config.algorithms)
    {
        for (int n : config.node_counts)
            add(CellKind::harvest, a, n, -1, config.harvest_gamma);
    }
    for (auto a : config.algorithms)
    {
        for (std::size_t g = 0; g < config.gamma_sweep.size(); ++g)
            add(CellKind::gamma, a, config.gamma_sweep_nodes, int(g), config.gamma_sweep[g]);
    }
    return cells;
}

TrainedCell train_cell(CampaignConfig const& config, CellKey const& key)
{
    EnvConfig ec = config.env;
    ec.node_count = key.nodes;
    ec.node_density_lambda.reset();
    ec.rng_seed = key.deploy_seed;
    ec.reward_gamma = key.gamma;

    LearnConfig lc = config.learn;
    lc.seed = key.learn_seed;
    if (key.algorithm == Algorithm::random)
    {
        // Random never learns; its "converged" reward covers the same
        // window of episodes the learners are judged on.
        lc.episodes = std::max(1, lc.episodes / 10);
    }

    TrainedCell cell{Environment::deploy(ec), EnvQTable(lc.initial_q), {}};
    auto trained = train(cell.env, key.algorithm, lc);
    cell.table = std::move(trained.table);
    for (auto const& m : trained.episodes)
        cell.training_rewards.push_back(m.total_reward);
    return cell;
}

RunResult run_cell(CampaignConfig const& config, CellKey const& key)
{
    auto cell = train_cell(config, key);
    RunResult r;
    r.key = key;
    r.training_rewards = std::move(cell.training_rewards);
    if (key.algorithm == Algorithm::random)
    {
        Rng rng(mix_seed(key.learn_seed, 0xe7a1ULL));
        r.rollout = random_rollout(cell.env, rng).metrics;
    }
    else
    {
        r.rollout = greedy_rollout(cell.env, cell.table).metrics;
    }

    double const energy = r.rollout.swipt_energy_j + r.rollout.motion_energy_j;
    r.energy_efficiency = energy > 0 ? energy_efficiency(r.rollout.throughput_bits, energy) : 0;
    return r;
}

int default_thread_count()
{
    if (char const* v = std::getenv("AQUASWIPT_THREADS"))
    {
        int const n = std::atoi(v);
        if (n > 0)
            return n;
    }
    return std::max(1, int(std::thread::hardware_concurrency()));
}

//---------------------------------------------------------------------------//
// EXECUTION
//---------------------------------------------------------------------------//

namespace
{
std::vector<RunResult> run_cells(CampaignConfig const& config,
                                 std::vector<CellKey> const& cells,
                                 int threads,
                                 ProgressFn const& progress)
{
    std::vector<RunResult> results(cells.size());
    std::atomic<std::size_t> next{0};
    std::size_t finished = 0;
    std::mutex mutex;
    std::exception_ptr failure;

    auto worker = [&] {
        while (true)
        {
            std::size_t const i = next.fetch_add(1);
            if (i >= cells.size())
                return;
            try
            {
                results[i] = run_cell(config, cells[i]);
            }
            catch (...)
            {
                std::lock_guard lock(mutex);
                if (!failure)
                    failure = std::current_exception();
                next = cells.size();
                return;
            }
            std::lock_guard lock(mutex);
            ++finished;
            if (progress)
                progress(finished, cells.size());
        }
    };

    int const n = std::clamp(threads > 0 ? threads : default_thread_count(), 1,
                             std::max(1, int(cells.size())));
    if (n == 1)
    {
        worker();
    }
    else
    {
        std::vector<std::jthread> pool;
        for (int t = 0; t < n; ++t)
            pool.emplace_back(worker);
    }
    if (failure)
        std::rethrow_exception(failure);
    return results;
}

std::vector<CoverageCell> run_coverage(CampaignConfig const& config)
{
    auto const& cov = config.coverage;
    if (cov.starts.empty() || cov.node_counts.empty())
        return {};
    CoverageSweepOptions options;
    options.k_values = cov.k_values;
    options.volume_samples = cov.volume_samples;
    options.seed = mix_seed(config.master_seed, 0xc0feULL);
    return coverage_sweep(config.env, cov.node_counts, cov.starts, cov.trials, options);
}

double mean_of(std::span<double const> v)
{
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
}

}  // namespace

AggregateResult run_campaign(CampaignConfig const& config, int threads, ProgressFn progress)
{
    if (auto bad = config.validate(); !bad.empty())
    {
        throw ConfigError(std::move(bad));
    }
    AggregateResult result;
    result.config = config;
    result.runs = run_cells(config, campaign_cells(config), threads, progress);
    assign_targets(config, result.runs);
    result.groups = aggregate(config, result.runs);
    result.coverage = run_coverage(config);
    return result;
}

std::vector<GroupSummary> aggregate(CampaignConfig const& config, std::span<RunResult const> runs)
{
    // Canonical order: sort indices by cell identity, never by completion
    std::vector<std::size_t> order(runs.size());
    std::iota(order.begin(), order.end(), std::size_t(0));
    auto ident = [&](std::size_t i) {
        auto const& k = runs[i].key;
        return std::tuple(int(k.kind), int(k.algorithm), k.nodes, k.gamma_index, k.run);
    };
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return ident(a) < ident(b); });

    std::vector<GroupSummary> groups;
    std::size_t begin = 0;
    while (begin < order.size())
    {
        auto same = [&](std::size_t i) {
            auto const a = ident(order[begin]);
            auto const b = ident(i);
            return std::get<0>(a) == std::get<0>(b) && std::get<1>(a) == std::get<1>(b)
                   && std::get<2>(a) == std::get<2>(b) && std::get<3>(a) == std::get<3>(b);
        };
        std::size_t end = begin;
        while (end < order.size() && same(order[end]))
            ++end;

        auto const& key = runs[order[begin]].key;
        GroupSummary g{key.kind, key.algorithm, key.nodes, key.gamma};
        g.runs = int(end - begin);
        std::vector<double> tp, hv, ee, rw, tt, ht, mt, fin;
        for (std::size_t j = begin; j < end; ++j)
        {
            auto const& r = runs[order[j]];
            tp.push_back(r.rollout.throughput_bits);
            hv.push_back(r.rollout.harvested_j);
            ee.push_back(r.energy_efficiency);
            rw.push_back(r.rollout.total_reward);
            tt.push_back(r.rollout.throughput_term);
            ht.push_back(r.rollout.harvest_term);
            mt.push_back(r.rollout.motion_term);
            auto const& tr = r.training_rewards;
            std::size_t const window = std::max<std::size_t>(1, tr.size() / 10);
            fin.push_back(tr.empty() ? 0.0
                                     : mean_of(std::span(tr).subspan(tr.size() - window)));
        }
        auto fill = [](std::vector<double> const& v, double& mean, double& lo, double& hi) {
            mean = mean_of(v);
            auto [mn, mx] = std::minmax_element(v.begin(), v.end());
            lo = *mn;
            hi = *mx;
        };
        fill(tp, g.mean_throughput, g.min_throughput, g.max_throughput);
        fill(hv, g.mean_harvest, g.min_harvest, g.max_harvest);
        fill(ee, g.mean_ee, g.min_ee, g.max_ee);
        auto const& first = runs[order[begin]];
        g.mean_actions.assign(first.targets.size(), 0.0);
        g.not_reached.assign(first.targets.size(), 0);
        for (std::size_t j = begin; j < end; ++j)
        {
            auto const& acts = runs[order[j]].actions;
            for (std::size_t t = 0; t < acts.size() && t < g.mean_actions.size(); ++t)
            {
                g.mean_actions[t] += acts[t] ? *acts[t] : config.env.episode_length + 1;
                g.not_reached[t] += !acts[t];
            }
        }
        for (double& m : g.mean_actions)
            m /= double(g.runs);
        std::uint64_t const ci_seed = mix_seed(
            config.master_seed,
            mix_seed(std::uint64_t(key.kind) << 8 | std::uint64_t(key.algorithm),
                     std::uint64_t(key.nodes) << 16 | std::uint64_t(key.gamma_index + 1)));
        std::tie(g.ci_low_throughput, g.ci_high_throughput)
            = bootstrap_mean_ci(tp, config.bootstrap_resamples, 0.95, ci_seed);
        g.mean_reward = mean_of(rw);
        g.mean_throughput_term = mean_of(tt);
        g.mean_harvest_term = mean_of(ht);
        g.mean_motion_term = mean_of(mt);
        g.final_training_reward = mean_of(fin);
        double ss = 0;
        for (double f : fin)
            ss += (f - g.final_training_reward) * (f - g.final_training_reward);
        g.final_training_reward_sd = fin.size() > 1 ? std::sqrt(ss / double(fin.size() - 1)) : 0;
        groups.push_back(g);
        begin = end;
    }
    return groups;
}

GroupSummary const*
AggregateResult::find(CellKind kind, Algorithm a, int nodes, double gamma) const
{
    for (auto const& g : groups)
    {
        if (g.kind == kind && g.algorithm == a && g.nodes == nodes && g.gamma == gamma)
            return &g;
    }
    return nullptr;
}

std::vector<GammaRow> gamma_sweep_report(AggregateResult const& result)
{
    std::vector<GammaRow> rows;
    for (auto const& g : result.groups)
    {
        if (g.kind != CellKind::gamma)
            continue;
        rows.push_back({g.algorithm, g.gamma, g.nodes, g.mean_reward, g.mean_throughput_term,
                        g.mean_harvest_term, g.mean_motion_term});
    }
    return rows;
}

std::vector<GammaRow> gamma_sweep_report(CampaignConfig const& config, int threads)
{
    if (config.gamma_sweep.empty())
    {
        throw ConfigError({"gamma_sweep: at least one value required"});
    }
    if (auto bad = config.validate(); !bad.empty())
    {
        throw ConfigError(std::move(bad));
    }
    std::vector<CellKey> cells;
    for (auto const& c : campaign_cells(config))
    {
        if (c.kind == CellKind::gamma)
            cells.push_back(c);
    }
    AggregateResult result;
    result.config = config;
    result.runs = run_cells(config, cells, threads, {});
    result.groups = aggregate(config, result.runs);
    return gamma_sweep_report(result);
}

}  // namespace aquaswipt

#include <cstdio>
#include <fstream>
#include <sstream>

#include "aquaswipt/campaign.hpp"
#include "aquaswipt/config_io.hpp"
#include "aquaswipt/errors.hpp"

namespace aquaswipt
{
namespace
{
constexpr char kVersion[] = "0.1.0";

std::string num(double v)
{
    return format_number(v);
}

std::string u64(std::uint64_t v)
{
    return std::to_string(v);
}

void write_text(std::filesystem::path const& path, std::string const& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
    {
        throw IoError(path, "cannot open for writing");
    }
    out << text;
    out.flush();
    if (!out)
    {
        throw IoError(path, "write failed");
    }
}

std::string throughput_csv(AggregateResult const& r)
{
    std::ostringstream os;
    os << "algorithm,nodes,runs,mean_throughput_bits,min_throughput_bits,max_throughput_bits,"
          "ci95_low_bits,ci95_high_bits\n";
    for (auto const& g : r.groups)
    {
        if (g.kind != CellKind::throughput)
            continue;
        os << to_string(g.algorithm) << ',' << g.nodes << ',' << g.runs << ','
           << num(g.mean_throughput) << ',' << num(g.min_throughput) << ','
           << num(g.max_throughput) << ',' << num(g.ci_low_throughput) << ','
           << num(g.ci_high_throughput) << '\n';
    }
    return os.str();
}

std::string harvest_csv(AggregateResult const& r)
{
    std::ostringstream os;
    os << "algorithm,nodes,runs,mean_harvest_j,min_harvest_j,max_harvest_j\n";
    for (auto const& g : r.groups)
    {
        if (g.kind != CellKind::harvest)
            continue;
        os << to_string(g.algorithm) << ',' << g.nodes << ',' << g.runs << ','
           << num(g.mean_harvest) << ',' << num(g.min_harvest) << ',' << num(g.max_harvest)
           << '\n';
    }
    return os.str();
}

std::string ee_csv(AggregateResult const& r)
{
    std::ostringstream os;
    os << "algorithm,nodes,runs,mean_ee_bits_per_j,min_ee_bits_per_j,max_ee_bits_per_j,"
          "ratio_vs_random\n";
    for (auto const& g : r.groups)
    {
        if (g.kind != CellKind::throughput)
            continue;
        os << to_string(g.algorithm) << ',' << g.nodes << ',' << g.runs << ',' << num(g.mean_ee)
           << ',' << num(g.min_ee) << ',' << num(g.max_ee) << ',';
        auto const* base = r.find(CellKind::throughput, Algorithm::random, g.nodes, g.gamma);
        if (base && base->mean_ee > 0)
            os << num(g.mean_ee / base->mean_ee);
        os << '\n';
    }
    return os.str();
}

std::string gamma_csv(AggregateResult const& r)
{
    std::ostringstream os;
    os << "algorithm,gamma,nodes,runs,mean_reward,throughput_term,harvest_term,motion_term,"
          "final_training_reward,final_training_reward_sd\n";
    for (auto const& g : r.groups)
    {
        if (g.kind != CellKind::gamma)
            continue;
        os << to_string(g.algorithm) << ',' << num(g.gamma) << ',' << g.nodes << ',' << g.runs
           << ',' << num(g.mean_reward) << ',' << num(g.mean_throughput_term) << ','
           << num(g.mean_harvest_term) << ',' << num(g.mean_motion_term) << ','
           << num(g.final_training_reward) << ',' << num(g.final_training_reward_sd) << '\n';
    }
    return os.str();
}

std::string actions_csv(AggregateResult const& r, Quantity q)
{
    CellKind const kind = q == Quantity::throughput ? CellKind::throughput : CellKind::harvest;
    std::vector<RunResult const*> rows;
    for (auto const& run : r.runs)
    {
        if (run.key.kind == kind)
            rows.push_back(&run);
    }
    std::stable_sort(rows.begin(), rows.end(), [](auto const* a, auto const* b) {
        return std::tuple(int(a->key.algorithm), a->key.nodes, a->key.run)
               < std::tuple(int(b->key.algorithm), b->key.nodes, b->key.run);
    });

    std::ostringstream os;
    os << "algorithm,nodes,run,deploy_seed,learn_seed,target,actions,reached\n";
    for (auto const* run : rows)
    {
        for (std::size_t t = 0; t < run->targets.size() && t < run->actions.size(); ++t)
        {
            auto const& hit = run->actions[t];
            os << to_string(run->key.algorithm) << ',' << run->key.nodes << ',' << run->key.run
               << ',' << u64(run->key.deploy_seed) << ',' << u64(run->key.learn_seed) << ','
               << num(run->targets[t]) << ',';
            if (hit)
                os << *hit;
            os << ',' << (hit ? "true" : "false") << '\n';
        }
    }
    return os.str();
}

json targets_json(AggregateResult const& r, CellKind kind)
{
    json out = json::object();
    for (int n : r.config.node_counts)
        out[std::to_string(n)] = campaign_targets(r.config, r.runs, kind, n);
    return out;
}

json manifest(AggregateResult const& r)
{
    json cells = json::array();
    for (auto const& run : r.runs)
    {
        auto const& k = run.key;
        cells.push_back({{"kind", std::string(to_string(k.kind))},
                         {"algorithm", std::string(to_string(k.algorithm))},
                         {"nodes", k.nodes},
                         {"gamma", k.gamma},
                         {"run", k.run},
                         {"deploy_seed", k.deploy_seed},
                         {"learn_seed", k.learn_seed}});
    }
    return {{"format", "aquaswipt-manifest/1"},
            {"versions",
             {{"aquaswipt", kVersion},
              {"eigen",
               std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION)
                   + "." + std::to_string(EIGEN_MINOR_VERSION)},
              {"nlohmann_json",
               std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "."
                   + std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "."
                   + std::to_string(NLOHMANN_JSON_VERSION_PATCH)}}},
            {"config", to_json(r.config)},
            {"throughput_targets_bits", targets_json(r, CellKind::throughput)},
            {"harvest_targets_j", targets_json(r, CellKind::harvest)},
            {"cells", cells}};
}

constexpr char kDatasetsReadme[] = R"(# Datasets

Every file is regenerated by `aquaswipt run`. Identical configs give
byte-identical files.

## fig_coverage.csv
One row per (start column, node count n, threshold k).
- `start_x`, `start_y`: AUV position at the surface [m]
- `n`, `k`: deployed nodes and minimum number in view
- `p_node`: clipped cone volume over cube volume
- `p_node_unclipped`: unclipped cone volume over cube volume
- `p_analytic`: binomial probability that at least k of n nodes are in view
- `p_empirical`: fraction of seeded deployments with at least k in view
- `std_error`: combined standard error of the difference
- `z`: (p_analytic - p_empirical) / std_error

## fig_throughput.csv
Greedy-rollout throughput per (algorithm, node count) at the throughput weighting.
- `mean_throughput_bits`, `min_throughput_bits`, `max_throughput_bits`
- `ci95_low_bits`, `ci95_high_bits`: percentile bootstrap interval of the mean

## fig_harvest.csv
Energy harvested by all nodes per rollout at the harvest weighting [J].

## fig_ee.csv
Energy efficiency (delivered bits over AUV SWIPT plus navigation energy) at the
throughput weighting. `ratio_vs_random` divides by the random baseline at the
same node count; it is empty when no baseline was run.

## fig_gamma.csv
Reward decomposition of the greedy rollout per weighting gamma.
- `mean_reward`: total episode reward
- `throughput_term`, `harvest_term`, `motion_term`: summed contributions
- `final_training_reward`, `final_training_reward_sd`: mean and spread over
  runs of the training reward in the last tenth of episodes

## fig_actions_throughput.csv, fig_actions_harvest.csv
One row per (run, target). Unless fixed targets are configured, the targets at
a node count are the mean episode totals of each algorithm there, as plotted
in fig_throughput.csv and fig_harvest.csv.
- `deploy_seed`, `learn_seed`: seeds that reproduce the run
- `target`: cumulative bits or joules
- `actions`: first step at which the target is met; empty when never met
- `reached`: `true` or `false`

## run_manifest.json
Config echo, library versions, targets per node count and the seeds of every cell. Passing it
back as `--config` reproduces the run.
)";

}  // namespace

std::string coverage_csv(std::span<CoverageCell const> cells)
{
    std::ostringstream os;
    os << "start_x,start_y,n,k,p_node,p_node_unclipped,p_analytic,p_empirical,std_error,z\n";
    for (auto const& c : cells)
    {
        double const z = c.std_error > 0 ? (c.p_analytic - c.p_empirical) / c.std_error : 0.0;
        os << num(c.start[0]) << ',' << num(c.start[1]) << ',' << c.n << ',' << c.k << ','
           << num(c.p_node) << ',' << num(c.p_node_unclipped) << ',' << num(c.p_analytic) << ','
           << num(c.p_empirical) << ',' << num(c.std_error) << ',' << num(z) << '\n';
    }
    return os.str();
}

std::vector<std::filesystem::path> emit_datasets(AggregateResult const& result,
                                                 std::filesystem::path const& output_dir)
{
    std::error_code ec;
    std::filesystem::create_directories(output_dir, ec);
    if (ec || !std::filesystem::is_directory(output_dir))
    {
        throw IoError(output_dir, "cannot create output directory");
    }

    std::vector<std::pair<char const*, std::string>> files{
        {"fig_coverage.csv", coverage_csv(result.coverage)},
        {"fig_gamma.csv", gamma_csv(result)},
        {"fig_throughput.csv", throughput_csv(result)},
        {"fig_actions_throughput.csv", actions_csv(result, Quantity::throughput)},
        {"fig_ee.csv", ee_csv(result)},
        {"fig_harvest.csv", harvest_csv(result)},
        {"fig_actions_harvest.csv", actions_csv(result, Quantity::harvest)},
        {"run_manifest.json", manifest(result).dump(2) + "\n"},
        {"DATASETS.md", kDatasetsReadme},
    };
    std::vector<std::filesystem::path> written;
    for (auto const& [name, text] : files)
    {
        auto const path = output_dir / name;
        write_text(path, text);
        written.push_back(path);
    }
    return written;
}

}  // namespace aquaswipt

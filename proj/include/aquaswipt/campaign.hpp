#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "coverage.hpp"
#include "env3d.hpp"
#include "rl.hpp"

namespace aquaswipt
{
//---------------------------------------------------------------------------//
// CONFIGURATION
//---------------------------------------------------------------------------//

struct CoverageSweepSpec
{
    std::vector<Eigen::Vector2d> starts{{50, 50}, {25, 25}, {10, 10}, {0, 0}};
    std::vector<int> node_counts{10, 25, 50};
    std::vector<int> k_values{1, 2, 3, 4};
    int trials = 2000;
    std::int64_t volume_samples = 400000;
};

struct CampaignConfig
{
    EnvConfig env{};
    LearnConfig learn{};
    std::vector<Algorithm> algorithms{Algorithm::q_learning, Algorithm::sarsa, Algorithm::random};
    std::vector<int> node_counts{10, 25, 50};
    //! Reward weights for the throughput- and harvest-priority campaigns
    double throughput_gamma = 1.0;
    double harvest_gamma = 0.0;
    std::vector<double> gamma_sweep{0.0, 0.25, 0.5, 0.75, 1.0};
    int gamma_sweep_nodes = 25;
    int mc_runs = 20;
    std::uint64_t master_seed = 2024;
    std::filesystem::path output_dir = "results";
    //! Fixed targets for every node count; empty lists use the mean
    //! episode totals each algorithm reached at that node count
    std::vector<double> target_throughput_bits{};
    std::vector<double> target_harvest_j{};
    CoverageSweepSpec coverage{};
    int bootstrap_resamples = 2000;
    bool save_checkpoints = false;

    std::vector<std::string> validate() const;
};

//---------------------------------------------------------------------------//
// RESULTS
//---------------------------------------------------------------------------//

enum class CellKind
{
    throughput,  //!< throughput_gamma, every node count
    harvest,     //!< harvest_gamma, every node count
    gamma,       //!< gamma_sweep values at gamma_sweep_nodes
};

std::string_view to_string(CellKind k);

struct CellKey
{
    CellKind kind;
    Algorithm algorithm;
    int nodes;
    int gamma_index;
    double gamma;
    int run;
    std::uint64_t deploy_seed;
    std::uint64_t learn_seed;
};

struct RunResult
{
    CellKey key;
    EpisodeMetrics rollout;
    double energy_efficiency = 0;
    //! Ascending targets of the cell's quantity and the step reaching each
    std::vector<double> targets;
    std::vector<std::optional<int>> actions;
    //! Total reward of every training episode
    std::vector<double> training_rewards;
};

struct GroupSummary
{
    CellKind kind;
    Algorithm algorithm;
    int nodes;
    double gamma;
    int runs = 0;
    double mean_throughput = 0, min_throughput = 0, max_throughput = 0;
    double ci_low_throughput = 0, ci_high_throughput = 0;
    double mean_harvest = 0, min_harvest = 0, max_harvest = 0;
    double mean_ee = 0, min_ee = 0, max_ee = 0;
    //! Per target; NotReached counts as episode_length + 1
    std::vector<double> mean_actions{};
    std::vector<int> not_reached{};
    double mean_reward = 0;
    double mean_throughput_term = 0, mean_harvest_term = 0, mean_motion_term = 0;
    //! Mean and deviation of training reward over the last tenth of episodes
    double final_training_reward = 0, final_training_reward_sd = 0;
};

struct AggregateResult
{
    CampaignConfig config;
    std::vector<RunResult> runs;
    std::vector<GroupSummary> groups;
    std::vector<CoverageCell> coverage;

    GroupSummary const* find(CellKind kind, Algorithm a, int nodes, double gamma) const;
};

struct GammaRow
{
    Algorithm algorithm;
    double gamma;
    int nodes;
    double mean_reward;
    double throughput_term;
    double harvest_term;
    double motion_term;
};

//---------------------------------------------------------------------------//
// OPERATIONS
//---------------------------------------------------------------------------//

enum class Quantity
{
    throughput,
    harvest,
};

//! Delivered bits per joule; total energy must be positive.
double energy_efficiency(double throughput_bits, double total_energy_j);

//! 1-based step at which the cumulative quantity first reaches target.
std::optional<int> actions_to_target(std::span<double const> per_step, double target);
std::optional<int> actions_to_target(EpisodeMetrics const& m, double target, Quantity q);

//! Quantity tracked by a cell kind's targets; gamma cells have none.
std::optional<Quantity> target_quantity(CellKind kind);

/*!
 * Targets for the cells of one kind and node count: the configured list, or
 * else the distinct positive mean episode totals of each algorithm there.
 */
std::vector<double> campaign_targets(CampaignConfig const& config,
                                     std::span<RunResult const> runs,
                                     CellKind kind,
                                     int nodes);

//! Fill targets and actions of every throughput and harvest run.
void assign_targets(CampaignConfig const& config, std::span<RunResult> runs);

//! Percentile bootstrap interval of the mean.
std::pair<double, double> bootstrap_mean_ci(std::span<double const> samples,
                                            int resamples,
                                            double confidence,
                                            std::uint64_t seed);

//! Enumerate every campaign cell in canonical order, with derived seeds.
std::vector<CellKey> campaign_cells(CampaignConfig const& config);

struct TrainedCell
{
    Environment env;
    EnvQTable table;
    std::vector<double> training_rewards;
};

//! Deploy the cell's field and train its agent (Random only plays).
TrainedCell train_cell(CampaignConfig const& config, CellKey const& key);

//! Deploy, train and evaluate one cell.
RunResult run_cell(CampaignConfig const& config, CellKey const& key);

//! Worker count: AQUASWIPT_THREADS when set, else hardware concurrency.
int default_thread_count();

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

/*!
 * Execute the full campaign.
 *
 * Cells run concurrently on \c threads workers; results are stored by
 * canonical cell index so aggregation never depends on completion order.
 * Throws ConfigError before doing any work when the config is invalid.
 */
AggregateResult run_campaign(CampaignConfig const& config,
                             int threads = 0,
                             ProgressFn progress = {});

//! Summaries per (kind, algorithm, nodes, gamma) in canonical order.
std::vector<GroupSummary> aggregate(CampaignConfig const& config, std::span<RunResult const> runs);

//! Converged reward decomposition per gamma value.
std::vector<GammaRow> gamma_sweep_report(AggregateResult const& result);
std::vector<GammaRow> gamma_sweep_report(CampaignConfig const& config, int threads = 0);

//! Write every figure dataset, the manifest and a column README.
std::vector<std::filesystem::path> emit_datasets(AggregateResult const& result,
                                                 std::filesystem::path const& output_dir);

//! Coverage table as CSV text.
std::string coverage_csv(std::span<CoverageCell const> cells);

}  // namespace aquaswipt

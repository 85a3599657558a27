#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "aquaswipt/campaign.hpp"
#include "aquaswipt/config_io.hpp"
#include "aquaswipt/errors.hpp"

namespace aquaswipt
{
namespace
{
namespace fs = std::filesystem;

CampaignConfig tiny()
{
    CampaignConfig c;
    c.node_counts = {5, 10};
    c.gamma_sweep = {0, 1};
    c.gamma_sweep_nodes = 5;
    c.mc_runs = 2;
    c.learn.episodes = 40;
    c.coverage.trials = 200;
    c.coverage.volume_samples = 20000;
    c.coverage.node_counts = {10};
    c.coverage.starts = {{50, 50}};
    c.bootstrap_resamples = 200;
    return c;
}

std::string slurp(fs::path const& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(std::string const& name)
{
    auto const dir = fs::temp_directory_path() / ("aquaswipt_test_" + name);
    fs::remove_all(dir);
    return dir;
}

TEST(EnergyEfficiency, Values)
{
    EXPECT_EQ(energy_efficiency(0, 10), 0);
    EXPECT_DOUBLE_EQ(energy_efficiency(10000, 50), 200);
    EXPECT_DOUBLE_EQ(energy_efficiency(3 * 10000, 3 * 50), energy_efficiency(10000, 50));
    EXPECT_THROW(energy_efficiency(1, 0), DomainError);
}

TEST(ActionsToTarget, FirstCrossing)
{
    std::vector<double> const steps{0, 5, 0, 10, 1};
    EXPECT_EQ(actions_to_target(steps, 1e-9), 2);
    EXPECT_EQ(actions_to_target(steps, 15), 4);
    EXPECT_EQ(actions_to_target(steps, 16), 5);
    EXPECT_FALSE(actions_to_target(steps, 17));
    std::vector<double> const first{3};
    EXPECT_EQ(actions_to_target(first, 1e-12), 1);
}

TEST(Bootstrap, CoversMeanAndIsDeterministic)
{
    std::vector<double> v;
    for (int i = 0; i < 40; ++i)
        v.push_back(i % 7);
    auto const [lo, hi] = bootstrap_mean_ci(v, 2000, 0.95, 5);
    double const mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    EXPECT_LT(lo, mean);
    EXPECT_GT(hi, mean);
    EXPECT_EQ(bootstrap_mean_ci(v, 2000, 0.95, 5), std::pair(lo, hi));
    std::vector<double> const constant(10, 3.0);
    EXPECT_EQ(bootstrap_mean_ci(constant, 100, 0.95, 1), std::pair(3.0, 3.0));
}

TEST(Cells, MatchedDeploymentsAcrossAlgorithms)
{
    auto const c = tiny();
    auto const cells = campaign_cells(c);
    EXPECT_EQ(cells.size(), std::size_t(3 * (2 + 2 + 2) * 2));
    for (auto const& a : cells)
    {
        for (auto const& b : cells)
        {
            if (a.nodes == b.nodes && a.run == b.run)
            {
                EXPECT_EQ(a.deploy_seed, b.deploy_seed);
            }
            if (&a != &b)
            {
                EXPECT_NE(a.learn_seed, b.learn_seed);
            }
        }
    }
}

TEST(Validation, ListsOffendingFields)
{
    auto c = tiny();
    c.algorithms.clear();
    c.mc_runs = 0;
    c.env.reward_gamma = -1;
    auto const bad = c.validate();
    EXPECT_EQ(bad.size(), 3u);
    auto const dir = scratch("invalid");
    c.output_dir = dir;
    EXPECT_THROW(run_campaign(c, 1), ConfigError);
    EXPECT_FALSE(fs::exists(dir));
}

TEST(Campaign, SmokeRandomOnly)
{
    auto c = tiny();
    c.algorithms = {Algorithm::random};
    c.mc_runs = 1;
    auto const result = run_campaign(c, 1);
    auto const dir = scratch("smoke");
    auto const files = emit_datasets(result, dir);
    EXPECT_EQ(files.size(), 9u);
    for (auto const& f : files)
        EXPECT_TRUE(fs::exists(f)) << f;
    std::istringstream tp(slurp(dir / "fig_throughput.csv"));
    std::string line;
    int rows = -1;
    while (std::getline(tp, line))
        ++rows;
    EXPECT_EQ(rows, 1 * 2);
    fs::remove_all(dir);
}

TEST(Campaign, ByteIdenticalAcrossThreadCounts)
{
    auto const c = tiny();
    auto const a = run_campaign(c, 1);
    auto const b = run_campaign(c, 3);
    auto const da = scratch("det_a");
    auto const db = scratch("det_b");
    emit_datasets(a, da);
    emit_datasets(b, db);
    for (auto const& entry : fs::directory_iterator(da))
    {
        auto const name = entry.path().filename();
        EXPECT_EQ(slurp(da / name), slurp(db / name)) << name;
    }
    fs::remove_all(da);
    fs::remove_all(db);
}

TEST(Campaign, AggregationIgnoresCompletionOrder)
{
    auto const c = tiny();
    auto const result = run_campaign(c, 1);
    std::vector<RunResult> shuffled(result.runs.rbegin(), result.runs.rend());
    std::rotate(shuffled.begin(), shuffled.begin() + 5, shuffled.end());
    auto const groups = aggregate(c, shuffled);
    ASSERT_EQ(groups.size(), result.groups.size());
    for (std::size_t i = 0; i < groups.size(); ++i)
    {
        EXPECT_EQ(groups[i].mean_throughput, result.groups[i].mean_throughput);
        EXPECT_EQ(groups[i].ci_low_throughput, result.groups[i].ci_low_throughput);
        EXPECT_EQ(groups[i].final_training_reward, result.groups[i].final_training_reward);
    }
}

TEST(Campaign, ManifestReproducesCsvs)
{
    auto const c = tiny();
    auto const da = scratch("manifest_a");
    auto const db = scratch("manifest_b");
    emit_datasets(run_campaign(c, 1), da);
    auto again = campaign_config_from_json(load_json_file(da / "run_manifest.json"));
    emit_datasets(run_campaign(again, 1), db);
    for (auto const* name : {"fig_coverage.csv", "fig_gamma.csv", "fig_throughput.csv",
                             "fig_actions_throughput.csv", "fig_ee.csv", "fig_harvest.csv",
                             "fig_actions_harvest.csv"})
    {
        EXPECT_EQ(slurp(da / name), slurp(db / name)) << name;
    }
    fs::remove_all(da);
    fs::remove_all(db);
}

TEST(Campaign, GammaExtremesZeroTheExcludedTerm)
{
    auto const c = tiny();
    auto const rows = gamma_sweep_report(c, 1);
    ASSERT_EQ(rows.size(), 3u * 2u);
    for (auto const& r : rows)
    {
        if (r.gamma == 0)
        {
            EXPECT_EQ(r.throughput_term, 0);
        }
        if (r.gamma == 1)
        {
            EXPECT_EQ(r.harvest_term, 0);
        }
    }
}

TEST(Datasets, NotReachedIsEmptyCell)
{
    auto c = tiny();
    c.algorithms = {Algorithm::random};
    c.target_throughput_bits = {1e12};
    auto const dir = scratch("notreached");
    emit_datasets(run_campaign(c, 1), dir);
    std::istringstream in(slurp(dir / "fig_actions_throughput.csv"));
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "algorithm,nodes,run,deploy_seed,learn_seed,target,actions,reached");
    while (std::getline(in, line))
    {
        EXPECT_NE(line.find(",,false"), std::string::npos) << line;
    }
    fs::remove_all(dir);
}

TEST(Campaign, DerivedTargetsAreAlgorithmMeans)
{
    auto const c = tiny();
    auto const result = run_campaign(c, 1);
    for (int n : c.node_counts)
    {
        auto const targets = campaign_targets(c, result.runs, CellKind::throughput, n);
        std::vector<double> expected;
        for (auto a : c.algorithms)
        {
            auto const* g = result.find(CellKind::throughput, a, n, c.throughput_gamma);
            ASSERT_NE(g, nullptr);
            if (g->mean_throughput > 0)
                expected.push_back(g->mean_throughput);
        }
        std::sort(expected.begin(), expected.end());
        expected.erase(std::unique(expected.begin(), expected.end()), expected.end());
        ASSERT_EQ(targets.size(), expected.size());
        for (std::size_t i = 0; i < targets.size(); ++i)
            EXPECT_NEAR(targets[i], expected[i], 1e-9 * expected[i]);
    }
    EXPECT_TRUE(campaign_targets(c, result.runs, CellKind::gamma, 25).empty());
}

TEST(Campaign, MeanActionsPenalizeNotReached)
{
    auto c = tiny();
    c.target_throughput_bits = {1e12, 1e-9};
    auto const result = run_campaign(c, 1);
    for (auto const& g : result.groups)
    {
        if (g.kind != CellKind::throughput)
            continue;
        ASSERT_EQ(g.mean_actions.size(), 2u);
        EXPECT_EQ(g.not_reached[1], g.runs);
        EXPECT_DOUBLE_EQ(g.mean_actions[1], c.env.episode_length + 1);
        EXPECT_LE(g.mean_actions[0], c.env.episode_length + 1);
    }
    for (auto const& r : result.runs)
    {
        if (r.key.kind == CellKind::gamma)
        {
            EXPECT_TRUE(r.targets.empty());
        }
        else if (r.key.kind == CellKind::throughput)
        {
            EXPECT_EQ(r.targets, (std::vector<double>{1e-9, 1e12}));
        }
    }
}

TEST(Datasets, UnwritableDirectoryNamesPath)
{
    auto const result = run_campaign([] {
        auto c = tiny();
        c.algorithms = {Algorithm::random};
        c.mc_runs = 1;
        return c;
    }(), 1);
    auto const blocker = scratch("blocker");
    std::ofstream(blocker) << "file";
    try
    {
        emit_datasets(result, blocker / "sub");
        FAIL();
    }
    catch (IoError const& e)
    {
        EXPECT_EQ(e.path(), blocker / "sub");
    }
    fs::remove(blocker);
}

TEST(ConfigIo, RoundTrip)
{
    auto c = tiny();
    c.env.channel.noise_model = NoiseModel::constant(-50);
    c.env.node_count.reset();
    c.env.node_density_lambda = 2e-5;
    c.target_harvest_j = {1e-7, 2e-7};
    auto const j = to_json(c);
    auto const back = campaign_config_from_json(j);
    EXPECT_EQ(to_json(back), j);
    EXPECT_EQ(back.env.channel.noise_model.kind, NoiseKind::constant_override);
    EXPECT_FALSE(back.env.node_count);
}

TEST(ConfigIo, MissingKeysKeepDefaults)
{
    auto const c = campaign_config_from_json(json::object());
    EXPECT_EQ(to_json(c), to_json(CampaignConfig{}));
    auto const d = campaign_config_from_json(json{{"env", {{"node_density_lambda", 1e-5}}}});
    EXPECT_FALSE(d.env.node_count);
}

TEST(ConfigIo, CollectsEveryProblem)
{
    json j{{"mc_runs", "many"},
           {"colour", "blue"},
           {"env", {{"episode_length", 2.5}, {"channel", {{"noise_model", "loud"}}}}},
           {"algorithms", {"qlearning", "dqn"}}};
    try
    {
        campaign_config_from_json(j);
        FAIL();
    }
    catch (ConfigError const& e)
    {
        EXPECT_EQ(e.fields().size(), 5u);
        std::string const all = e.what();
        for (auto const* field : {"mc_runs", "colour", "env.episode_length",
                                  "env.channel.noise_model", "algorithms"})
        {
            EXPECT_NE(all.find(field), std::string::npos) << field;
        }
    }
}

TEST(ConfigIo, DottedOverrides)
{
    json doc = json::object();
    apply_override(doc, "learn.episodes", "250");
    apply_override(doc, "env.channel.noise_model", "{\"constant_override_db\": -40}");
    apply_override(doc, "output_dir", "out/dir");
    auto const c = campaign_config_from_json(doc);
    EXPECT_EQ(c.learn.episodes, 250);
    EXPECT_EQ(c.env.channel.noise_model.nl_db, -40);
    EXPECT_EQ(c.output_dir, "out/dir");
    EXPECT_THROW(apply_override(doc, "a..b", "1"), ConfigError);
    EXPECT_THROW(apply_override(doc, "learn.episodes.x", "1"), ConfigError);
}

TEST(ConfigIo, FileErrors)
{
    EXPECT_THROW(load_json_file("/nonexistent/config.json"), IoError);
    auto const p = scratch("bad.json");
    std::ofstream(p) << "{ not json";
    EXPECT_THROW(load_json_file(p), ConfigError);
    fs::remove(p);
}

TEST(ConfigIo, NumberFormat)
{
    EXPECT_EQ(format_number(0.0), "0");
    EXPECT_EQ(format_number(-0.0), "0");
    EXPECT_EQ(format_number(1.5), "1.5");
    EXPECT_EQ(format_number(160000), "160000");
    EXPECT_EQ(format_number(1.0 / 3), "0.333333333333");
}

}  // namespace
}  // namespace aquaswipt

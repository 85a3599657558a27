#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "aquaswipt/campaign.hpp"
#include "aquaswipt/config_io.hpp"
#include "aquaswipt/errors.hpp"

namespace
{
using namespace aquaswipt;

enum ExitCode
{
    kOk = 0,
    kConfig = 2,
    kIo = 3,
};

struct Options
{
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> runs;
    std::vector<std::string> algos;
    std::vector<int> nodes;
    std::vector<double> gamma;
    std::vector<std::string> overrides;
    bool quiet = false;
    bool checkpoints = false;
    std::optional<int> trials;
    std::string snapshot_path;
    std::string qtable_path;
};

void add_config_flags(CLI::App* cmd, Options& o)
{
    cmd->add_option("--config", o.config_path, "JSON config or run manifest");
    cmd->add_option("--set", o.overrides, "Override a field, e.g. --set learn.episodes=500")
        ->type_name("KEY=VALUE");
    cmd->add_option("--seed", o.seed, "Master seed");
}

json assemble(Options const& o)
{
    json doc = o.config_path.empty() ? json::object() : load_json_file(o.config_path);
    if (doc.is_object() && doc.value("format", "") == "aquaswipt-manifest/1")
    {
        doc = doc.at("config");
    }
    for (auto const& kv : o.overrides)
    {
        auto const eq = kv.find('=');
        if (eq == std::string::npos)
            throw ConfigError({"--set " + kv + ": expected KEY=VALUE"});
        apply_override(doc, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (o.seed)
        doc["master_seed"] = *o.seed;
    if (o.runs)
        doc["mc_runs"] = *o.runs;
    if (!o.algos.empty())
        doc["algorithms"] = o.algos;
    if (!o.nodes.empty())
        doc["node_counts"] = o.nodes;
    if (!o.gamma.empty())
        doc["gamma_sweep"] = o.gamma;
    if (!o.out_dir.empty())
        doc["output_dir"] = o.out_dir;
    if (o.checkpoints)
        doc["save_checkpoints"] = true;
    return doc;
}

void save_checkpoints(CampaignConfig const& config)
{
    auto const dir = config.output_dir / "checkpoints";
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw IoError(dir, "cannot create checkpoint directory");
    for (auto const& key : campaign_cells(config))
    {
        if (key.run != 0 || key.algorithm == Algorithm::random || key.kind == CellKind::gamma)
            continue;
        auto cell = train_cell(config, key);
        cell.env.reset(false);
        std::string const stem = std::string(to_string(key.kind)) + "_"
                                 + std::string(to_string(key.algorithm)) + "_n"
                                 + std::to_string(key.nodes);
        auto const snap = dir / (stem + "_env.json");
        std::ofstream s(snap);
        s << cell.env.snapshot().dump(2) << '\n';
        auto const table = dir / (stem + "_q.txt");
        std::ofstream t(table);
        write_qtable(t, cell.table);
        if (!s || !t)
            throw IoError(!s ? snap : table, "write failed");
    }
}

int cmd_run(Options const& o)
{
    auto const config = campaign_config_from_json(assemble(o));
    ProgressFn progress;
    if (!o.quiet)
    {
        progress = [](std::size_t done, std::size_t total) {
            if (done == total || done % 20 == 0)
                std::fprintf(stderr, "\r%zu/%zu cells", done, total);
            if (done == total)
                std::fputc('\n', stderr);
        };
    }
    auto const result = run_campaign(config, default_thread_count(), progress);
    auto const files = emit_datasets(result, config.output_dir);
    if (config.save_checkpoints)
        save_checkpoints(config);
    if (!o.quiet)
    {
        for (auto const& g : result.groups)
        {
            if (g.kind != CellKind::throughput)
                continue;
            std::printf("%-9s n=%-3d throughput %.0f bits [%.0f, %.0f]  EE %.3f bit/J\n",
                        std::string(to_string(g.algorithm)).c_str(), g.nodes, g.mean_throughput,
                        g.ci_low_throughput, g.ci_high_throughput, g.mean_ee);
        }
        for (auto const& f : files)
            std::printf("wrote %s\n", f.string().c_str());
    }
    return kOk;
}

int cmd_coverage(Options const& o)
{
    auto config = campaign_config_from_json(assemble(o));
    if (o.trials)
        config.coverage.trials = *o.trials;
    if (!o.nodes.empty())
        config.coverage.node_counts = o.nodes;
    if (auto bad = config.validate(); !bad.empty())
        throw ConfigError(std::move(bad));
    CoverageSweepOptions options;
    options.k_values = config.coverage.k_values;
    options.volume_samples = config.coverage.volume_samples;
    options.seed = mix_seed(config.master_seed, 0xc0feULL);
    auto const cells = coverage_sweep(config.env, config.coverage.node_counts,
                                      config.coverage.starts, config.coverage.trials, options);
    auto const csv = coverage_csv(cells);
    if (o.out_dir.empty())
    {
        std::fputs(csv.c_str(), stdout);
        return kOk;
    }
    std::filesystem::path const dir = o.out_dir;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    auto const path = dir / "fig_coverage.csv";
    std::ofstream out(path);
    out << csv;
    if (!out)
        throw IoError(path, "write failed");
    if (!o.quiet)
        std::printf("wrote %s\n", path.string().c_str());
    return kOk;
}

int cmd_validate(Options const& o)
{
    auto const config = campaign_config_from_json(assemble(o));
    if (!o.quiet)
    {
        std::printf("config ok: %zu cells\n", campaign_cells(config).size());
    }
    return kOk;
}

int cmd_replay(Options const& o)
{
    auto env = Environment::from_snapshot(load_json_file(o.snapshot_path));
    std::ifstream in(o.qtable_path);
    if (!in)
        throw IoError(o.qtable_path, "cannot open for reading");
    auto const table = read_qtable(in);

    StateKey s = env.reset(false);
    std::printf("step,action,x,y,z,covered,throughput_bits,harvested_j,motion_energy_j,reward\n");
    double bits = 0, harvested = 0, reward = 0;
    while (!env.done())
    {
        int const a = table.greedy_action(s);
        auto const out = env.step(kAllActions[a]);
        std::printf("%d,%s,%d,%d,%d,%zu,%s,%s,%s,%s\n", env.step_index(),
                    std::string(to_string(kAllActions[a])).c_str(), out.position[0],
                    out.position[1], out.position[2], out.covered_nodes.size(),
                    format_number(out.throughput_bits).c_str(),
                    format_number(out.harvested_j).c_str(),
                    format_number(out.motion_energy_j).c_str(), format_number(out.reward).c_str());
        bits += out.throughput_bits;
        harvested += out.harvested_j;
        reward += out.reward;
        s = out.next_state;
    }
    if (!o.quiet)
    {
        std::fprintf(stderr, "total throughput %s bits, harvested %s J, reward %s\n",
                     format_number(bits).c_str(), format_number(harvested).c_str(),
                     format_number(reward).c_str());
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Underwater SWIPT sensor network simulator with tabular RL"};
    app.require_subcommand(1);
    Options o;

    auto* run = app.add_subcommand("run", "Run the training and evaluation campaign");
    add_config_flags(run, o);
    run->add_option("--out", o.out_dir, "Output directory");
    run->add_option("--runs", o.runs, "Monte-Carlo runs per cell");
    run->add_option("--algos", o.algos, "Algorithms (qlearning, sarsa, random)")->delimiter(',');
    run->add_option("--nodes", o.nodes, "Node counts")->delimiter(',');
    run->add_option("--gamma", o.gamma, "Reward weights for the gamma sweep")->delimiter(',');
    run->add_flag("--checkpoints", o.checkpoints, "Save Q-tables and env snapshots of run 0");
    run->add_flag("--quiet", o.quiet, "Suppress progress and summary");

    auto* cov = app.add_subcommand("coverage", "Coverage probability sweep");
    add_config_flags(cov, o);
    cov->add_option("--out", o.out_dir, "Output directory (stdout when omitted)");
    cov->add_option("--nodes", o.nodes, "Node counts")->delimiter(',');
    cov->add_option("--trials", o.trials, "Monte-Carlo deployments");
    cov->add_flag("--quiet", o.quiet);

    auto* val = app.add_subcommand("validate", "Check a config");
    add_config_flags(val, o);
    val->add_option("--runs", o.runs);
    val->add_option("--algos", o.algos)->delimiter(',');
    val->add_option("--nodes", o.nodes)->delimiter(',');
    val->add_option("--gamma", o.gamma)->delimiter(',');
    val->add_flag("--quiet", o.quiet);

    auto* rep = app.add_subcommand("replay", "Greedy rollout from a saved Q-table and snapshot");
    rep->add_option("--snapshot", o.snapshot_path, "Environment snapshot JSON")->required();
    rep->add_option("--qtable", o.qtable_path, "Q-table text file")->required();
    rep->add_flag("--quiet", o.quiet);

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (run->parsed())
            return cmd_run(o);
        if (cov->parsed())
            return cmd_coverage(o);
        if (val->parsed())
            return cmd_validate(o);
        return cmd_replay(o);
    }
    catch (ConfigError const& e)
    {
        std::fprintf(stderr, "config error:\n");
        for (auto const& f : e.fields())
            std::fprintf(stderr, "  %s\n", f.c_str());
        return kConfig;
    }
    catch (IoError const& e)
    {
        std::fprintf(stderr, "i/o error: %s\n", e.what());
        return kIo;
    }
    catch (std::exception const& e)
    {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

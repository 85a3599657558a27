// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 when
// any criterion fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>

#include "aquaswipt/campaign.hpp"
#include "aquaswipt/config_io.hpp"
#include "oracles.hpp"
#include "toy_mdp.hpp"

namespace
{
using namespace aquaswipt;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

// Pinned tolerances
constexpr double kCoverageSigmas = 3.0;
constexpr int kCoverageTrials = 2000;
constexpr double kCoverageSeconds = 60;
constexpr double kOrderingSeconds = 600;
constexpr double kEeRatio = 2.0;
constexpr double kToyQError = 1e-3;
constexpr double kToySeconds = 10;
constexpr double kPhysicsRel = 1e-9;
constexpr double kVoltageFormRel = 1e-12;
constexpr int kPhysicsInputs = 25;
constexpr int kFuzzSteps = 100000;

struct Verdict
{
    bool pass = true;
    std::string detail;

    void require(bool ok, std::string const& why)
    {
        if (!ok)
        {
            pass = false;
            if (!detail.empty())
                detail += "; ";
            detail += why;
        }
    }
};

std::string fmt(char const* f, double a, double b = 0, double c = 0, double d = 0)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

int g_failures = 0;

void report(int id, char const* name, Verdict const& v, std::string const& summary)
{
    std::printf("%s [%d] %s: %s%s%s\n", v.pass ? "PASS" : "FAIL", id, name, summary.c_str(),
                v.detail.empty() ? "" : " | ", v.detail.c_str());
    std::fflush(stdout);
    g_failures += !v.pass;
}

//---------------------------------------------------------------------------//

void coverage_claims()
{
    auto const t0 = Clock::now();
    EnvConfig const env;
    CoverageSweepSpec const spec;
    auto const cells = coverage_sweep(env, spec.node_counts, spec.starts, kCoverageTrials);
    double const elapsed = seconds_since(t0);

    Verdict v;
    double worst = 0;
    for (auto const& c : cells)
    {
        double const z = std::abs(c.p_analytic - c.p_empirical) / c.std_error;
        worst = std::max(worst, z);
        v.require(z <= kCoverageSigmas, fmt("start (%g,%g) n=%g k=%g disagrees", c.start[0],
                                            c.start[1], c.n, c.k));
    }
    auto cell = [&](int n, int k) {
        for (auto const& c : cells)
        {
            if (c.start == Eigen::Vector2d(50, 50) && c.n == n && c.k == k)
                return c;
        }
        throw std::logic_error("missing coverage cell");
    };
    auto const one = cell(10, 1);
    auto const four = cell(50, 4);
    v.require(one.p_analytic > 0.5 && one.p_empirical > 0.5, "central P(>=1 | n=10) <= 0.5");
    v.require(four.p_analytic > 0.5 && four.p_empirical > 0.5, "central P(>=4 | n=50) <= 0.5");
    v.require(elapsed < kCoverageSeconds, "too slow");
    report(1, "coverage", v,
           fmt("%g cells, worst |z| %.2f; P(>=1|10) %.3f, P(>=4|50) %.3f", double(cells.size()),
               worst, one.p_analytic, four.p_analytic)
               + fmt(", %.1f s", elapsed));
}

//---------------------------------------------------------------------------//

struct CampaignRun
{
    CampaignConfig config;
    AggregateResult result;
    double throughput_seconds = 0;
};

CampaignRun run_default_campaign()
{
    CampaignRun run;
    run.config = CampaignConfig{};
    auto const cells = campaign_cells(run.config);
    run.result.config = run.config;
    run.result.runs.resize(cells.size());

    // Throughput cells first, so the ordering criterion has its own clock
    auto t0 = Clock::now();
    for (std::size_t i = 0; i < cells.size(); ++i)
    {
        if (cells[i].kind == CellKind::throughput)
            run.result.runs[i] = run_cell(run.config, cells[i]);
    }
    run.throughput_seconds = seconds_since(t0);
    for (std::size_t i = 0; i < cells.size(); ++i)
    {
        if (cells[i].kind != CellKind::throughput)
            run.result.runs[i] = run_cell(run.config, cells[i]);
    }
    assign_targets(run.config, run.result.runs);
    run.result.groups = aggregate(run.config, run.result.runs);
    return run;
}

std::vector<Algorithm> learners()
{
    return {Algorithm::q_learning, Algorithm::sarsa};
}

void algorithm_ordering(CampaignRun const& run)
{
    Verdict v;
    std::string summary;
    for (int n : run.config.node_counts)
    {
        auto const* r = run.result.find(CellKind::throughput, Algorithm::random, n,
                                        run.config.throughput_gamma);
        summary += fmt("n=%g random [%.0f,%.0f]", n, r->ci_low_throughput, r->ci_high_throughput);
        for (auto a : learners())
        {
            auto const* g = run.result.find(CellKind::throughput, a, n, run.config.throughput_gamma);
            summary += " " + std::string(to_string(a))
                       + fmt(" [%.0f,%.0f]", g->ci_low_throughput, g->ci_high_throughput);
            v.require(g->runs >= 20, "fewer than 20 runs");
            v.require(g->ci_low_throughput > r->ci_high_throughput,
                      std::string(to_string(a)) + fmt(" overlaps random at n=%g", n));
        }
        summary += "; ";
    }
    v.require(run.throughput_seconds < kOrderingSeconds, "too slow");
    report(2, "algorithm ordering", v, summary + fmt("%.0f s", run.throughput_seconds));
}

void energy_efficiency_gain(CampaignRun const& run)
{
    Verdict v;
    std::string summary;
    double best = 0;
    for (int n : run.config.node_counts)
    {
        auto const* r = run.result.find(CellKind::throughput, Algorithm::random, n,
                                        run.config.throughput_gamma);
        for (auto a : learners())
        {
            auto const* g = run.result.find(CellKind::throughput, a, n, run.config.throughput_gamma);
            double const ratio = r->mean_ee > 0 ? g->mean_ee / r->mean_ee : 0;
            best = std::max(best, ratio);
            summary += std::string(to_string(a)) + fmt(" n=%g %.2fx; ", n, ratio);
            v.require(g->mean_ee > r->mean_ee,
                      std::string(to_string(a)) + fmt(" EE not above random at n=%g", n));
        }
    }
    v.require(best >= kEeRatio, fmt("best ratio %.2f below %.1f", best, kEeRatio));
    report(3, "energy efficiency", v, summary + fmt("best %.2fx", best));
}

void actions_to_target_claims(CampaignRun const& run)
{
    Verdict v;
    std::string summary;
    for (auto kind : {CellKind::throughput, CellKind::harvest})
    {
        std::string const label(to_string(kind));
        for (int n : run.config.node_counts)
        {
            auto const targets = campaign_targets(run.config, run.result.runs, kind, n);
            auto const* r = run.result.find(kind, Algorithm::random, n, kind == CellKind::throughput ? run.config.throughput_gamma
                                                                  : run.config.harvest_gamma);
            std::size_t const top = targets.size() - 1;
            v.require(!targets.empty() && r->mean_actions.size() == targets.size(),
                      label + fmt(" n=%g: targets missing", n));
            if (targets.empty())
                continue;
            v.require(r->not_reached[top] > 0,
                      label + fmt(" n=%g: random reaches the top target in every run", n));
            summary += label + fmt(" n=%g top %.3g: random %.1f (%g missed)", n, targets[top],
                                   r->mean_actions[top], r->not_reached[top]);
            for (auto a : learners())
            {
                std::string const name(to_string(a));
                auto const* g = run.result.find(kind, a, n, r->gamma);
                for (std::size_t t = 0; t < targets.size(); ++t)
                {
                    v.require(g->mean_actions[t] < r->mean_actions[t],
                              label + " " + name
                                  + fmt(" n=%g target %.3g: %.1f vs random %.1f", n, targets[t],
                                        g->mean_actions[t], r->mean_actions[t]));
                }
                v.require(g->not_reached[top] < g->runs,
                          label + " " + name + fmt(" never reaches the top target at n=%g", n));
                summary += ", " + name
                           + fmt(" %.1f (%g missed)", g->mean_actions[top], g->not_reached[top]);
            }
            summary += "; ";
        }
    }
    report(4, "actions to target", v, summary);
}

void gamma_sweep_claims(CampaignRun const& run)
{
    Verdict v;
    auto const rows = gamma_sweep_report(run.result);
    std::string summary;
    bool saw_half = false;
    for (auto const& row : rows)
    {
        if (row.gamma == 0)
            v.require(row.throughput_term == 0, "throughput term nonzero at gamma 0");
        if (row.gamma == 1)
            v.require(row.harvest_term == 0, "harvest term nonzero at gamma 1");
        if (row.gamma == 0.5 && row.algorithm != Algorithm::random)
        {
            saw_half = true;
            summary += std::string(to_string(row.algorithm))
                       + fmt(" throughput %.3f vs harvest %.3f; ", row.throughput_term,
                             row.harvest_term);
            v.require(row.nodes == 25, "gamma sweep not at 25 nodes");
            v.require(row.throughput_term > row.harvest_term,
                      std::string(to_string(row.algorithm)) + ": harvest term dominates");
        }
    }
    for (auto const& r : run.result.runs)
    {
        if (r.key.kind != CellKind::gamma)
            continue;
        if (r.key.gamma == 0)
            v.require(r.rollout.throughput_term == 0, "run with throughput term at gamma 0");
        if (r.key.gamma == 1)
            v.require(r.rollout.harvest_term == 0, "run with harvest term at gamma 1");
    }
    v.require(saw_half, "gamma 0.5 missing from the sweep");
    report(5, "gamma sweep", v, summary);
}

//---------------------------------------------------------------------------//

void rl_oracle()
{
    auto const t0 = Clock::now();
    Verdict v;
    std::string summary;
    int mdp_index = 0;
    for (auto const& [states, seed] : {std::pair{12, 8ULL}, std::pair{20, 21ULL}, std::pair{6, 3ULL}})
    {
        ++mdp_index;
        auto const mdp = toy::random_deterministic(states, seed);
        double const kappa = 0.9;
        auto const q_star = value_iteration_oracle(mdp, kappa, 1e-12);
        auto const pi_star = greedy_policy(q_star);

        MdpEnvironment env(mdp, 30, 0, seed + 1);
        LearnConfig q_cfg;
        q_cfg.discount_kappa = kappa;
        q_cfg.episodes = 3000;
        q_cfg.epsilon0 = 1;
        q_cfg.epsilon_min = 1;
        q_cfg.epsilon_decay = 1;
        q_cfg.randomize_start = true;
        q_cfg.learning_rate_decay = 0.999;
        q_cfg.learning_rate_min = 0.2;
        q_cfg.seed = seed;
        auto const ql = train(env, Algorithm::q_learning, q_cfg);

        // Greedy limit: no exploration, exact backups, optimistic start
        LearnConfig s_cfg;
        s_cfg.discount_kappa = kappa;
        s_cfg.episodes = 3000;
        s_cfg.epsilon0 = 0;
        s_cfg.epsilon_min = 0;
        s_cfg.learning_rate = 1;
        s_cfg.initial_q = mdp.reward.maxCoeff() / (1 - kappa);
        s_cfg.randomize_start = true;
        s_cfg.seed = seed;
        auto const sarsa = train(env, Algorithm::sarsa, s_cfg);

        double err = 0;
        int q_mismatch = 0, s_mismatch = 0;
        for (int s = 0; s < states; ++s)
        {
            for (int a = 0; a < kNumActions; ++a)
                err = std::max(err, std::abs(ql.table.value(s, a) - q_star(s, a)));
            q_mismatch += ql.table.greedy_action(s) != pi_star[s];
            s_mismatch += sarsa.table.greedy_action(s) != pi_star[s];
        }
        v.require(err < kToyQError, fmt("mdp %g: sup error %.2e", mdp_index, err));
        v.require(q_mismatch == 0, fmt("mdp %g: q-learning policy differs in %g states",
                                       mdp_index, q_mismatch));
        v.require(s_mismatch == 0, fmt("mdp %g: sarsa policy differs in %g states", mdp_index,
                                       s_mismatch));
        summary += fmt("%g states: sup err %.1e, mismatches %g/%g; ", states, err, q_mismatch,
                       s_mismatch);
    }
    double const elapsed = seconds_since(t0);
    v.require(elapsed < kToySeconds, "too slow");
    report(6, "rl oracle", v, summary + fmt("%.1f s", elapsed));
}

//---------------------------------------------------------------------------//

void physics_suite()
{
    Verdict v;
    std::mt19937_64 gen(0xacce55);
    std::uniform_real_distribution<double> freq(0.5, 100), range(1, 20000), kd(1, 2),
        wind(0, 30), ship(0, 1), pw(0.01, 5000), eta(0.05, 1), di(0, 20), snr(-20, 200),
        rho(-220, -120), rp(1, 500), cd(0.05, 1.5), area(0.01, 3), dens(990, 1050),
        beta(0.1, 1), speed(0.1, 5);
    std::uniform_int_distribution<int> elements(1, 16);
    double worst = 0, worst_form = 0;
    auto check = [&](char const* what, long double got, long double want) {
        // Relative, with a 1-unit floor for dB quantities that cross zero
        long double const err = std::fabs(got - want) / std::fmax(std::fabs(want), 1.0L);
        worst = std::max(worst, double(err));
        v.require(err <= kPhysicsRel, what);
    };
    auto check_rel = [&](char const* what, long double got, long double want) {
        long double const err = oracle::rel_err(got, want);
        worst = std::max(worst, double(err));
        v.require(err <= kPhysicsRel, what);
    };
    for (int i = 0; i < kPhysicsInputs; ++i)
    {
        ChannelParams p;
        p.frequency_khz = freq(gen);
        p.spreading_factor_k = kd(gen);
        p.wind_speed_w = wind(gen);
        p.shipping_factor_s = ship(gen);
        double const r = range(gen);
        check_rel("thorp_absorption", thorp_absorption(p.frequency_khz), oracle::thorp(p.frequency_khz));
        check_rel("transmission_loss_db", transmission_loss_db(r, p),
                  oracle::tl(r, p.spreading_factor_k, p.frequency_khz));
        auto const n = noise_psd_db(p.frequency_khz, p);
        auto const o = oracle::psd(p.frequency_khz, p.wind_speed_w, p.shipping_factor_s);
        check("noise_psd_db turbulence", n.turbulence, o.nt);
        check("noise_psd_db shipping", n.shipping, o.ns);
        check("noise_psd_db wind", n.wind, o.nw);
        check("noise_psd_db thermal", n.thermal, o.nth);
        check("noise_psd_db total", n.total_db, o.total);

        ModemSpec const m{pw(gen), eta(gen), di(gen), std::nullopt, 0};
        check_rel("source_level", source_level(m),
                  oracle::source_level(m.electrical_power_w, m.ea_efficiency,
                                       m.directivity_index_db));

        HarvestSpec h = HarvestSpec::from_sensitivity_db(rho(gen));
        h.ae_efficiency = eta(gen);
        h.load_resistance_ohm = rp(gen);
        h.array_elements_n = elements(gen);
        double const g = snr(gen);
        double const vi = induced_voltage(g, h);
        double const ph = harvestable_power(g, h);
        check_rel("induced_voltage", vi, oracle::induced_voltage(g, h.sensitivity_rho_db));
        check_rel("harvestable_power", ph,
                  oracle::harvest_power(g, h.sensitivity_rho_db, h.array_elements_n,
                                        h.ae_efficiency, h.load_resistance_ohm));
        double const via_v
            = h.array_elements_n * h.ae_efficiency * vi * vi / (4 * h.load_resistance_ohm);
        double const form = std::abs(via_v - ph) / ph;
        worst_form = std::max(worst_form, form);
        v.require(form <= kVoltageFormRel, "voltage and power forms disagree");

        AuvSpec a;
        a.drag_coefficient_cd = cd(gen);
        a.frontal_area_m2 = area(gen);
        a.water_density = dens(gen);
        a.motor_efficiency_beta = beta(gen);
        a.speed_mps = speed(gen);
        check_rel("propulsion_power", propulsion_power(a),
                  oracle::propulsion(a.drag_coefficient_cd, a.frontal_area_m2, a.water_density,
                                     a.motor_efficiency_beta, a.speed_mps));
    }
    report(7, "physics", v,
           fmt("%g inputs per function, worst rel %.1e, voltage/power form %.1e",
               kPhysicsInputs, worst, worst_form));
}

//---------------------------------------------------------------------------//

std::string slurp(fs::path const& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void conservation_and_determinism()
{
    Verdict v;
    EnvConfig c;
    c.node_count = 60;
    c.dims = {40, 40, 20};
    c.start_xy = {20, 20};
    c.surface_station_xy = {20, 20};
    c.reward_gamma = 0.5;
    c.node_buffer_bits = 120000;
    auto env = Environment::deploy(c);
    Rng rng(2718);
    env.reset(true);
    auto total = [&](auto field) {
        double s = 0;
        for (auto const& n : env.nodes())
            s += field(n);
        return s;
    };
    auto buffers = [](NodeState const& n) { return n.data_buffer_bits; };
    auto stores = [](NodeState const& n) { return n.store.level_j; };
    int violations = 0, episodes = 0;
    double bits = 0;
    for (int i = 0; i < kFuzzSteps; ++i)
    {
        double const b0 = total(buffers), e0 = total(stores);
        double const batt0 = env.auv().spec.battery.level_j;
        auto const out = env.step(kAllActions[rng.below(kNumActions)]);
        bits += out.throughput_bits;
        bool ok = std::abs((b0 - total(buffers)) - out.throughput_bits) <= 1e-6
                  && std::abs((total(stores) - e0) - out.harvested_j) <= 1e-9
                  && std::abs((batt0 - env.auv().spec.battery.level_j) - out.motion_energy_j)
                         <= 1e-6
                  && out.throughput_bits >= 0 && out.harvested_j >= 0
                  && std::abs(out.reward - (out.throughput_term + out.harvest_term
                                            - out.motion_term))
                         <= 1e-12
                  && (out.covered_nodes.empty() ? out.swipt_energy_j == 0
                                                : out.swipt_energy_j > 0);
        for (auto const& n : env.nodes())
        {
            ok = ok && n.data_buffer_bits >= 0 && n.store.level_j <= n.store.capacity_j + 1e-12;
        }
        violations += !ok;
        if (out.done)
        {
            ++episodes;
            env.reset(true);
        }
    }
    v.require(violations == 0, fmt("%g steps violated an invariant", violations));
    v.require(bits > 0, "fuzz never collected data");

    CampaignConfig small;
    small.node_counts = {10, 25};
    small.gamma_sweep = {0, 0.5};
    small.mc_runs = 3;
    small.learn.episodes = 200;
    small.coverage.trials = 300;
    small.coverage.volume_samples = 50000;
    auto const base = fs::temp_directory_path() / "aquaswipt_acceptance";
    fs::remove_all(base);
    emit_datasets(run_campaign(small, 1), base / "a");
    emit_datasets(run_campaign(small, 2), base / "b");
    int differing = 0, files = 0;
    for (auto const& entry : fs::directory_iterator(base / "a"))
    {
        ++files;
        differing += slurp(entry.path()) != slurp(base / "b" / entry.path().filename());
    }
    fs::remove_all(base);
    v.require(files == 9 && differing == 0, fmt("%g of %g files differ", differing, files));
    report(8, "conservation and determinism", v,
           fmt("%g fuzzed steps over %g episodes, %g violations; %g files compared",
               kFuzzSteps, episodes, violations, files));
}

}  // namespace

int main()
{
    auto const t0 = Clock::now();
    coverage_claims();
    std::fprintf(stderr, "running the default campaign...\n");
    auto const campaign = run_default_campaign();
    algorithm_ordering(campaign);
    energy_efficiency_gain(campaign);
    actions_to_target_claims(campaign);
    gamma_sweep_claims(campaign);
    rl_oracle();
    physics_suite();
    conservation_and_determinism();
    std::printf("%d of 8 criteria failed (%.0f s)\n", g_failures, seconds_since(t0));
    return g_failures == 0 ? 0 : 1;
}

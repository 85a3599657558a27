#include "aquaswipt/coverage.hpp"

#include <algorithm>
#include <cmath>

#include "aquaswipt/errors.hpp"
#include "aquaswipt/rng.hpp"

namespace aquaswipt
{
VolumeEstimate clipped_cone_volume_mc(ConeGeometry const& g,
                                      Eigen::Vector3d const& cube,
                                      std::int64_t samples,
                                      std::uint64_t seed)
{
    if (samples < 1000)
    {
        throw DomainError("clipped_cone_volume_mc: at least 1000 samples required");
    }
    if (!(g.height_h > 0))
    {
        return {0, 0};
    }
    // Sample the cone's bounding box clipped to the cube; unbiased for the
    // intersection volume and far tighter than sampling the whole cube.
    double const r = g.height_h * g.tan_half_angle();
    Eigen::Vector3d const lo = (g.apex - Eigen::Vector3d(r, r, 0)).cwiseMax(0.0);
    Eigen::Vector3d const hi
        = (g.apex + Eigen::Vector3d(r, r, g.height_h)).cwiseMin(cube);
    if (!((hi - lo).array() > 0).all())
    {
        return {0, 0};
    }
    double const box = (hi - lo).prod();

    Rng rng(seed);
    std::int64_t hits = 0;
    for (std::int64_t i = 0; i < samples; ++i)
    {
        Eigen::Vector3d const p(rng.uniform(lo[0], hi[0]), rng.uniform(lo[1], hi[1]),
                                rng.uniform(lo[2], hi[2]));
        hits += g.contains(p);
    }
    double const f = double(hits) / double(samples);
    return {box * f, box * std::sqrt(f * (1 - f) / double(samples))};
}

//---------------------------------------------------------------------------//

double coverage_pmf(int n, double p, int k)
{
    if (n < 0 || k < 0 || k > n)
    {
        throw DomainError("coverage_pmf: need 0 <= k <= n");
    }
    if (!(p >= 0 && p <= 1))
    {
        throw DomainError("coverage_pmf: probability outside [0, 1]");
    }
    if (p == 0)
    {
        return k == 0 ? 1.0 : 0.0;
    }
    if (p == 1)
    {
        return k == n ? 1.0 : 0.0;
    }
    double log_choose;
    if (n <= 1000)
    {
        double c = 1;
        int const m = std::min(k, n - k);
        for (int i = 1; i <= m; ++i)
        {
            c = c * double(n - m + i) / double(i);
        }
        log_choose = std::log(c);
    }
    else
    {
        log_choose = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
    }
    return std::exp(log_choose + k * std::log(p) + (n - k) * std::log1p(-p));
}

double coverage_tail(int n, double p, int k)
{
    if (n < 0)
    {
        throw DomainError("coverage_tail: negative node count");
    }
    if (k <= 0)
    {
        return 1.0;
    }
    double sum = 0;
    for (int i = n; i >= k; --i)
    {
        sum += coverage_pmf(n, p, i);
    }
    return std::min(sum, 1.0);
}

double coverage_tail_dp(int n, double p, int k)
{
    if (k <= 0 || k > n)
    {
        return 0;
    }
    return n * coverage_pmf(n - 1, p, k - 1);
}

//---------------------------------------------------------------------------//

std::vector<CoverageCell> coverage_sweep(EnvConfig const& config,
                                         std::span<int const> n_values,
                                         std::span<Eigen::Vector2d const> starts,
                                         int trials,
                                         CoverageSweepOptions const& options)
{
    if (trials < 100)
    {
        throw DomainError("coverage_sweep: at least 100 trials required");
    }
    for (int n : n_values)
    {
        if (n < 0)
        {
            throw DomainError("coverage_sweep: negative node count");
        }
    }
    Eigen::Vector3d const cube = config.dims.cast<double>();
    double const cube_volume = cube.prod();
    double const apex_angle = config.auv.cone_apex_angle_deg;

    std::vector<ConeGeometry> cones;
    std::vector<VolumeEstimate> volumes;
    for (std::size_t s = 0; s < starts.size(); ++s)
    {
        cones.push_back(ConeGeometry::downward({starts[s][0], starts[s][1], 0}, apex_angle, cube[2]));
        volumes.push_back(clipped_cone_volume_mc(cones.back(), cube, options.volume_samples,
                                                 mix_seed(options.seed, s)));
    }

    // hits[s][ni][ki]: trials where start s saw at least k_values[ki] of n_values[ni]
    int const max_n = n_values.empty() ? 0 : *std::max_element(n_values.begin(), n_values.end());
    std::size_t const nk = n_values.size() * options.k_values.size();
    std::vector<std::vector<int>> hits(starts.size(), std::vector<int>(nk, 0));
    std::vector<Eigen::Vector3d> points(max_n);
    std::vector<int> prefix(max_n + 1);
    for (int t = 0; t < trials; ++t)
    {
        Rng rng(mix_seed(options.seed, 0x100000ULL + std::uint64_t(t)));
        for (auto& p : points)
        {
            p = {rng.uniform(0, cube[0]), rng.uniform(0, cube[1]), rng.uniform(0, cube[2])};
        }
        for (std::size_t s = 0; s < starts.size(); ++s)
        {
            prefix[0] = 0;
            for (int i = 0; i < max_n; ++i)
            {
                prefix[i + 1] = prefix[i] + cones[s].contains(points[i]);
            }
            for (std::size_t ni = 0; ni < n_values.size(); ++ni)
            {
                int const seen = prefix[n_values[ni]];
                for (std::size_t ki = 0; ki < options.k_values.size(); ++ki)
                {
                    hits[s][ni * options.k_values.size() + ki] += seen >= options.k_values[ki];
                }
            }
        }
    }

    std::vector<CoverageCell> cells;
    for (std::size_t s = 0; s < starts.size(); ++s)
    {
        double const p = std::clamp(volumes[s].value / cube_volume, 0.0, 1.0);
        double const p_se = volumes[s].std_error / cube_volume;
        double const p_unclipped = std::min(1.0, cone_volume(cones[s]) / cube_volume);
        for (std::size_t ni = 0; ni < n_values.size(); ++ni)
        {
            int const n = n_values[ni];
            for (std::size_t ki = 0; ki < options.k_values.size(); ++ki)
            {
                int const k = options.k_values[ki];
                double const pa = coverage_tail(n, p, k);
                double const pe = double(hits[s][ni * options.k_values.size() + ki]) / trials;
                double const dp = coverage_tail_dp(n, p, k) * p_se;
                cells.push_back({starts[s], n, k, p, p_unclipped, pa, pe,
                                 std::sqrt(pa * (1 - pa) / trials + dp * dp)});
            }
        }
    }
    return cells;
}

}  // namespace aquaswipt

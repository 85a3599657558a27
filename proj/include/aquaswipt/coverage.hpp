#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "cone.hpp"
#include "env3d.hpp"

namespace aquaswipt
{
//! Probability that exactly k of n uniformly placed nodes fall in view.
double coverage_pmf(int n, double p, int k);

//! Probability that at least k of n nodes fall in view.
double coverage_tail(int n, double p, int k);

//! Derivative of coverage_tail with respect to p.
double coverage_tail_dp(int n, double p, int k);

struct CoverageCell
{
    Eigen::Vector2d start;
    int n;
    int k;
    //! Clipped and unclipped cone-to-cube volume ratios
    double p_node;
    double p_node_unclipped;
    double p_analytic;
    double p_empirical;
    //! Combined standard error of analytic minus empirical
    double std_error;
};

struct CoverageSweepOptions
{
    std::vector<int> k_values{1, 2, 3, 4};
    std::int64_t volume_samples = 400000;
    std::uint64_t seed = 1;
};

//---------------------------------------------------------------------------//
/*!
 * Coverage probability table over start columns and network sizes.
 *
 * For each start (x, y) at the surface, the view cone extends to the floor.
 * The analytic value uses the binomial tail with the clipped cone volume;
 * the empirical value counts nodes in view over \c trials seeded uniform
 * deployments in the continuous cube.
 */
std::vector<CoverageCell> coverage_sweep(EnvConfig const& config,
                                         std::span<int const> n_values,
                                         std::span<Eigen::Vector2d const> starts,
                                         int trials,
                                         CoverageSweepOptions const& options = {});

}  // namespace aquaswipt

#pragma once

#include <vector>

#include <Eigen/Core>

#include "action.hpp"
#include "rng.hpp"

namespace aquaswipt
{
//---------------------------------------------------------------------------//
/*!
 * Explicit finite MDP.
 *
 * transition[a](s, s') = P(s' | s, a) with rows summing to one;
 * reward(s, a) is the expected immediate reward. Terminal states end the
 * episode and have zero value.
 */
struct TabularMdp
{
    std::vector<Eigen::MatrixXd> transition;
    Eigen::MatrixXd reward;
    std::vector<bool> terminal;

    int num_states() const { return static_cast<int>(reward.rows()); }
    int num_actions() const { return static_cast<int>(reward.cols()); }
    void validate() const;
};

//! Optimal action values by Bellman optimality iteration, sup-norm tol.
Eigen::MatrixXd value_iteration_oracle(TabularMdp const& mdp,
                                       double kappa,
                                       double tol,
                                       int max_iterations = 1000000);

//! Sup-norm of T*Q - Q for the Bellman optimality operator T*.
double bellman_residual(TabularMdp const& mdp, Eigen::MatrixXd const& q, double kappa);

//! Greedy policy of a value matrix, ties to lowest action.
std::vector<int> greedy_policy(Eigen::MatrixXd const& q);

struct MdpTransition
{
    int next_state;
    double reward;
    bool done;
    bool terminal;
};

//! Episodic simulator over a six-action TabularMdp, for the same trainers.
class MdpEnvironment
{
  public:
    using State = int;
    using Outcome = MdpTransition;

    MdpEnvironment(TabularMdp mdp, int horizon, int start_state, std::uint64_t seed);

    int reset(bool randomize_start);
    MdpTransition step(Action action);

    TabularMdp const& mdp() const { return mdp_; }

  private:
    TabularMdp mdp_;
    int horizon_;
    int start_;
    int state_ = 0;
    int t_ = 0;
    Rng rng_;
    std::vector<int> starts_;
};

}  // namespace aquaswipt

#include "aquaswipt/value_iteration.hpp"

#include <cmath>
#include <string>

#include "aquaswipt/errors.hpp"

namespace aquaswipt
{
void TabularMdp::validate() const
{
    int const s = num_states();
    if (s == 0 || num_actions() == 0 || int(transition.size()) != num_actions())
    {
        throw DomainError("TabularMdp: need one transition matrix per action");
    }
    if (!terminal.empty() && int(terminal.size()) != s)
    {
        throw DomainError("TabularMdp: terminal flags must cover every state");
    }
    for (auto const& p : transition)
    {
        if (p.rows() != s || p.cols() != s || (p.array() < 0).any()
            || ((p.rowwise().sum().array() - 1).abs() > 1e-9).any())
        {
            throw DomainError("TabularMdp: transition matrices must be row-stochastic");
        }
    }
}

namespace
{
Eigen::VectorXd state_values(TabularMdp const& mdp, Eigen::MatrixXd const& q)
{
    Eigen::VectorXd v = q.rowwise().maxCoeff();
    for (int s = 0; s < int(mdp.terminal.size()); ++s)
    {
        if (mdp.terminal[s])
            v[s] = 0;
    }
    return v;
}

Eigen::MatrixXd bellman_apply(TabularMdp const& mdp, Eigen::MatrixXd const& q, double kappa)
{
    Eigen::VectorXd const v = state_values(mdp, q);
    Eigen::MatrixXd next(mdp.num_states(), mdp.num_actions());
    for (int a = 0; a < mdp.num_actions(); ++a)
    {
        next.col(a) = mdp.reward.col(a) + kappa * (mdp.transition[a] * v);
    }
    for (int s = 0; s < int(mdp.terminal.size()); ++s)
    {
        if (mdp.terminal[s])
            next.row(s).setZero();
    }
    return next;
}
}  // namespace

Eigen::MatrixXd value_iteration_oracle(TabularMdp const& mdp, double kappa, double tol, int max_iterations)
{
    mdp.validate();
    if (!(tol > 0) || !(kappa >= 0 && kappa <= 1))
    {
        throw DomainError("value_iteration_oracle: need tol > 0 and kappa in [0, 1]");
    }
    // A step change below tol (1 - kappa) / kappa bounds the error to tol.
    double const stop = kappa < 1 && kappa > 0 ? tol * (1 - kappa) / kappa : tol;
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(mdp.num_states(), mdp.num_actions());
    for (int it = 0; it < max_iterations; ++it)
    {
        Eigen::MatrixXd next = bellman_apply(mdp, q, kappa);
        double const delta = (next - q).cwiseAbs().maxCoeff();
        q = std::move(next);
        if (delta <= stop)
        {
            return q;
        }
    }
    throw ConvergenceError("value_iteration_oracle: no convergence after "
                           + std::to_string(max_iterations) + " sweeps");
}

double bellman_residual(TabularMdp const& mdp, Eigen::MatrixXd const& q, double kappa)
{
    return (bellman_apply(mdp, q, kappa) - q).cwiseAbs().maxCoeff();
}

std::vector<int> greedy_policy(Eigen::MatrixXd const& q)
{
    std::vector<int> policy(q.rows(), 0);
    for (Eigen::Index s = 0; s < q.rows(); ++s)
    {
        for (Eigen::Index a = 1; a < q.cols(); ++a)
        {
            if (q(s, a) > q(s, policy[s]))
                policy[s] = int(a);
        }
    }
    return policy;
}

//---------------------------------------------------------------------------//

MdpEnvironment::MdpEnvironment(TabularMdp mdp, int horizon, int start_state, std::uint64_t seed)
    : mdp_(std::move(mdp)), horizon_(horizon), start_(start_state), rng_(seed)
{
    mdp_.validate();
    if (mdp_.num_actions() != kNumActions)
    {
        throw DomainError("MdpEnvironment: the trainers expect six actions");
    }
    if (mdp_.terminal.empty())
    {
        mdp_.terminal.assign(mdp_.num_states(), false);
    }
    for (int s = 0; s < mdp_.num_states(); ++s)
    {
        if (!mdp_.terminal[s])
            starts_.push_back(s);
    }
    if (horizon_ <= 0 || start_ < 0 || start_ >= mdp_.num_states() || starts_.empty())
    {
        throw DomainError("MdpEnvironment: invalid horizon or start state");
    }
}

int MdpEnvironment::reset(bool randomize_start)
{
    state_ = randomize_start ? starts_[rng_.below(starts_.size())] : start_;
    t_ = 0;
    return state_;
}

MdpTransition MdpEnvironment::step(Action action)
{
    int const a = static_cast<int>(action);
    auto const row = mdp_.transition[a].row(state_);
    double u = rng_.uniform();
    int next = -1;
    for (int s = 0; s < mdp_.num_states(); ++s)
    {
        if (row[s] <= 0)
            continue;
        next = s;
        u -= row[s];
        if (u < 0)
            break;
    }
    double const r = mdp_.reward(state_, a);
    state_ = next;
    ++t_;
    bool const terminal = mdp_.terminal[next];
    return {next, r, terminal || t_ >= horizon_, terminal};
}

}  // namespace aquaswipt

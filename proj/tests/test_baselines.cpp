#include <gtest/gtest.h>

#include <cmath>

#include "bwrk/baselines.hpp"
#include "bwrk/rng.hpp"

using namespace bwrk;

namespace {

LpInstance random_feasible_instance(SplitMix64& rng) {
    LpInstance inst;
    const int K = 2 + static_cast<int>(rng.below(4));
    const int m = 1 + static_cast<int>(rng.below(3));
    inst.f_bar.resize(K);
    inst.c_bar = Mat(K, m);
    for (int a = 1; a < K; ++a) {
        inst.f_bar[a] = rng.uniform01();
        for (int i = 0; i < m; ++i) inst.c_bar(a, i) = rng.uniform(-1.0, 1.0);
    }
    inst.f_bar[0] = rng.uniform(0.0, 0.3);
    for (int i = 0; i < m; ++i) {
        double cmin = 0.0;
        for (int a = 1; a < K; ++a) cmin = std::min(cmin, inst.c_bar(a, i));
        inst.c_bar(0, i) = std::max(-1.0, cmin - rng.uniform(0.0, 0.2));
    }
    inst.rho = rng.uniform(0.0, 0.5);
    return inst;
}

} // namespace

// ---------------------------------------------------------------------------
// Best fixed action in hindsight
// ---------------------------------------------------------------------------

TEST(OptAdversarial, ConstantScript) {
    AdversarialScript s;
    s.T = 40;
    s.K = 2;
    s.m = 1;
    s.beta = 0.25;
    s.void_index = 0;
    s.rewards = Mat(40, 2, 0.7);
    for (int t = 0; t < 40; ++t) s.rewards(t, 0) = 0.0;
    s.costs.assign(40 * 2, 0.0);
    for (long t = 0; t < 40; ++t) s.cost(t, 0, 0) = -0.25;
    s.validate();
    const auto [arm, value] = opt_adversarial(s);
    EXPECT_EQ(arm, 1);
    EXPECT_NEAR(value, 0.7 * 40, 1e-9);
}

TEST(OptAdversarial, TwoPhaseTieGoesToLowestIndex) {
    const auto [arm, value] = opt_adversarial(adversarial_two_phase(1000, 3, 1, 0.1));
    EXPECT_EQ(arm, 1);
    EXPECT_EQ(value, 500.0);
}

TEST(OptAdversarial, SingleArm) {
    AdversarialScript s;
    s.T = 5;
    s.K = 1;
    s.m = 1;
    s.beta = 0.0;
    s.void_index = 0;
    s.rewards = Mat(5, 1, 0.4);
    s.costs.assign(5, 0.0);
    s.validate();
    const auto [arm, value] = opt_adversarial(s);
    EXPECT_EQ(arm, 0);
    EXPECT_NEAR(value, 2.0, 1e-12);
}

TEST(OptAdversarial, DominatesEveryFixedArm) {
    SplitMix64 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        AdversarialScript s;
        s.T = 50;
        s.K = 4;
        s.m = 1;
        s.beta = 0.0;
        s.void_index = 0;
        s.rewards = Mat(50, 4);
        s.costs.assign(50 * 4, 0.0);
        for (int t = 0; t < 50; ++t)
            for (int a = 0; a < 4; ++a) {
                s.rewards(t, a) = a == 0 ? 0.0 : rng.uniform01();
                s.cost(t, a, 0) = a == 0 ? 0.0 : rng.uniform(-1.0, 1.0);
            }
        s.validate();
        const double best = opt_adversarial(s).second;
        for (int a = 0; a < 4; ++a) {
            double sum = 0.0;
            for (int t = 0; t < 50; ++t) sum += s.rewards(t, a);
            EXPECT_GE(best, sum - 1e-12);
        }
    }
}

// ---------------------------------------------------------------------------
// LP optimum
// ---------------------------------------------------------------------------

TEST(OptLp, AnalyticBindingInstance) {
    // binding constraint mixes the rewarding arm with the replenishing one at
    // (rho + beta) / (1 + beta)
    LpInstance inst;
    inst.f_bar = {1.0, 0.0};
    inst.c_bar = Mat(2, 1);
    inst.c_bar(0, 0) = 1.0;
    inst.c_bar(1, 0) = -0.25;
    inst.rho = 0.25;
    const LpSolution sol = opt_lp(inst);
    ASSERT_EQ(sol.status, LpStatus::Optimal);
    EXPECT_NEAR(sol.value, 0.4, 1e-9);
    EXPECT_NEAR(sol.mixture[0], 0.4, 1e-9);
    EXPECT_NEAR(sol.mixture[1], 0.6, 1e-9);
}

TEST(OptLp, SlackConstraintsGivePointMass) {
    LpInstance inst;
    inst.f_bar = {0.2, 0.9, 0.5};
    inst.c_bar = Mat(3, 2);
    for (int a = 0; a < 3; ++a)
        for (int i = 0; i < 2; ++i) inst.c_bar(a, i) = 0.1;
    inst.rho = 0.5;
    const LpSolution sol = opt_lp(inst);
    ASSERT_EQ(sol.status, LpStatus::Optimal);
    EXPECT_NEAR(sol.value, 0.9, 1e-9);
    EXPECT_NEAR(sol.mixture[1], 1.0, 1e-9);
}

TEST(OptLp, InfeasibleWithoutReplenishment) {
    LpInstance inst;
    inst.f_bar = {1.0};
    inst.c_bar = Mat(1, 1);
    inst.c_bar(0, 0) = 0.8;
    inst.rho = 0.25;
    EXPECT_EQ(opt_lp(inst).status, LpStatus::Infeasible);
}

TEST(OptLp, MatchesGridOracleOnRandomInstances) {
    SplitMix64 rng(2024);
    for (int trial = 0; trial < 40; ++trial) {
        const LpInstance inst = random_feasible_instance(rng);
        const LpSolution sol = opt_lp(inst);
        ASSERT_EQ(sol.status, LpStatus::Optimal);
        const auto oracle = opt_lp_oracle(inst, 0.01);
        ASSERT_TRUE(oracle.has_value());
        EXPECT_GE(sol.value, *oracle - 1e-9); // LP dominates any grid point
        EXPECT_NEAR(sol.value, *oracle, 0.02);
    }
}

TEST(OptLp, ReturnsFeasibleVertexMixtures) {
    SplitMix64 rng(4);
    for (int trial = 0; trial < 40; ++trial) {
        const LpInstance inst = random_feasible_instance(rng);
        const LpSolution sol = opt_lp(inst);
        ASSERT_EQ(sol.status, LpStatus::Optimal);
        double mass = 0.0;
        int nonzero = 0;
        for (double w : sol.mixture) {
            EXPECT_GE(w, -1e-12);
            mass += w;
            if (w > 1e-9) ++nonzero;
        }
        EXPECT_NEAR(mass, 1.0, 1e-9);
        EXPECT_LE(nonzero, inst.num_resources() + 1);
        for (int i = 0; i < inst.num_resources(); ++i) {
            double c = 0.0;
            for (int a = 0; a < inst.num_actions(); ++a)
                c += inst.c_bar(a, i) * sol.mixture[a];
            EXPECT_LE(c, inst.rho + 1e-9);
        }
    }
}

TEST(OptLp, ObjectiveEquivariantUnderAffineRewardMaps) {
    SplitMix64 rng(6);
    for (int trial = 0; trial < 20; ++trial) {
        const LpInstance inst = random_feasible_instance(rng);
        const double a = rng.uniform(0.6, 0.9);
        const double b = rng.uniform(0.0, 0.1);
        LpInstance mapped = inst;
        for (double& f : mapped.f_bar) f = a * f + b;
        const LpSolution s1 = opt_lp(inst);
        const LpSolution s2 = opt_lp(mapped);
        ASSERT_EQ(s1.status, LpStatus::Optimal);
        ASSERT_EQ(s2.status, LpStatus::Optimal);
        // value maps by the same affine transform (mixtures sum to one)
        EXPECT_NEAR(s2.value, a * s1.value + b, 1e-9);
        // s1's argmax mixture stays optimal for the mapped instance
        double v = 0.0;
        for (int k = 0; k < mapped.num_actions(); ++k) v += mapped.f_bar[k] * s1.mixture[k];
        EXPECT_NEAR(v, s2.value, 1e-9);
    }
}

// ---------------------------------------------------------------------------
// Grid oracle
// ---------------------------------------------------------------------------

TEST(OptLpOracle, ExactOnSlackInstance) {
    LpInstance inst;
    inst.f_bar = {0.3, 0.8};
    inst.c_bar = Mat(2, 1);
    inst.c_bar(0, 0) = 0.0;
    inst.c_bar(1, 0) = 0.1;
    inst.rho = 0.9;
    const auto v = opt_lp_oracle(inst, 0.01);
    ASSERT_TRUE(v.has_value());
    EXPECT_NEAR(*v, 0.8, 1e-12); // optimum sits at a grid vertex
}

TEST(OptLpOracle, InfeasibleFindsNothing) {
    LpInstance inst;
    inst.f_bar = {1.0};
    inst.c_bar = Mat(1, 1);
    inst.c_bar(0, 0) = 0.8;
    inst.rho = 0.25;
    EXPECT_FALSE(opt_lp_oracle(inst, 0.01).has_value());
}

TEST(OptLpOracle, RejectsLargeK) {
    LpInstance inst;
    inst.f_bar.assign(6, 0.5);
    inst.c_bar = Mat(6, 1, 0.0);
    inst.rho = 0.5;
    EXPECT_THROW(opt_lp_oracle(inst, 0.01), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Empirical means
// ---------------------------------------------------------------------------

TEST(EmpiricalMeans, SmallSamples) {
    Mat c1(1, 1), c2(1, 1);
    c1(0, 0) = 0.5;
    c2(0, 0) = -0.5;
    const InputPair p1{{0.2}, c1, 0};
    const InputPair p2{{0.4}, c2, 0};
    {
        const auto [f, c] = empirical_means({p1});
        EXPECT_EQ(f[0], 0.2);
        EXPECT_EQ(c(0, 0), 0.5);
    }
    {
        const auto [f, c] = empirical_means({p1, p2});
        EXPECT_NEAR(f[0], 0.3, 1e-12);
        EXPECT_NEAR(c(0, 0), 0.0, 1e-12);
    }
    EXPECT_THROW(empirical_means({}), std::invalid_argument);
}

TEST(EmpiricalMeans, ConvergesToDeclaredMeans) {
    StochasticSpec spec;
    spec.K = 2;
    spec.m = 2;
    spec.void_index = 0;
    spec.beta = 0.2;
    spec.mean_rewards = {0.3, 0.7};
    spec.mean_costs = Mat(2, 2);
    spec.mean_costs(0, 0) = -0.3;
    spec.mean_costs(0, 1) = -0.25;
    spec.mean_costs(1, 0) = 0.5;
    spec.mean_costs(1, 1) = 0.1;
    spec.reward_noise = {Noise::bernoulli(), Noise::uniform(0.2)};
    spec.cost_noise = {Noise::uniform(0.2), Noise::bernoulli()};
    StochasticEnv env(spec);
    SplitMix64 rng(123);
    std::vector<InputPair> sample;
    sample.reserve(100000);
    for (int t = 0; t < 100000; ++t) sample.push_back(env.round(t, rng));
    const auto [f, c] = empirical_means(sample);
    for (int a = 0; a < 2; ++a) {
        EXPECT_NEAR(f[a], spec.mean_rewards[a], 0.01);
        for (int i = 0; i < 2; ++i) EXPECT_NEAR(c(a, i), spec.mean_costs(a, i), 0.01);
    }
}

TEST(LpFromEnv, UsesDeclaredMeans) {
    StochasticSpec spec;
    spec.K = 2;
    spec.m = 1;
    spec.void_index = 0;
    spec.beta = 0.25;
    spec.mean_rewards = {0.0, 1.0};
    spec.mean_costs = Mat(2, 1);
    spec.mean_costs(0, 0) = -0.25;
    spec.mean_costs(1, 0) = 1.0;
    spec.reward_noise = {Noise::point(), Noise::point()};
    spec.cost_noise = {Noise::point(), Noise::point()};
    StochasticEnv env(spec);
    const LpInstance inst = lp_from_env(env, 0.25);
    const LpSolution sol = opt_lp(inst);
    ASSERT_EQ(sol.status, LpStatus::Optimal);
    EXPECT_NEAR(sol.value, 0.4, 1e-9);
}

#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "bwrk/baselines.hpp"
#include "bwrk/environments.hpp"

using namespace bwrk;

namespace {

StochasticSpec two_arm_spec(double beta, Noise void_noise = Noise::point(),
                            double void_cost = -0.5) {
    StochasticSpec spec;
    spec.K = 2;
    spec.m = 1;
    spec.void_index = 0;
    spec.beta = beta;
    spec.mean_rewards = {0.1, 0.8};
    spec.mean_costs = Mat(2, 1);
    spec.mean_costs(0, 0) = void_cost;
    spec.mean_costs(1, 0) = 0.6;
    spec.reward_noise = {Noise::point(), Noise::point()};
    spec.cost_noise = {void_noise, Noise::point()};
    return spec;
}

} // namespace

// ---------------------------------------------------------------------------
// Stochastic i.i.d. environment
// ---------------------------------------------------------------------------

TEST(StochasticEnv, ZeroNoiseEqualsMeansEveryRound) {
    StochasticEnv env(two_arm_spec(0.5));
    SplitMix64 rng(1);
    for (int t = 0; t < 20; ++t) {
        const InputPair p = env.round(t, rng);
        EXPECT_EQ(p.reward[0], 0.1);
        EXPECT_EQ(p.reward[1], 0.8);
        EXPECT_EQ(p.cost(0, 0), -0.5);
        EXPECT_EQ(p.cost(1, 0), 0.6);
        EXPECT_EQ(p.void_action, 0);
    }
}

TEST(StochasticEnv, BernoulliVoidCostMonteCarlo) {
    // two-point cost on {-1, 0} with mean -0.5
    StochasticEnv env(two_arm_spec(0.5, Noise::bernoulli()));
    SplitMix64 rng(123);
    double sum = 0.0;
    const int n = 100000;
    for (int t = 0; t < n; ++t) {
        const InputPair p = env.round(t, rng);
        const double c = p.cost(0, 0);
        EXPECT_TRUE(c == 0.0 || c == -1.0);
        sum += c;
    }
    EXPECT_NEAR(sum / n, -0.5, 0.01);
}

TEST(StochasticEnv, SeededStreamReplays) {
    StochasticSpec spec = two_arm_spec(0.3, Noise::uniform(0.2), -0.4);
    spec.reward_noise = {Noise::uniform(0.1), Noise::bernoulli()};
    StochasticEnv env1(spec), env2(spec);
    SplitMix64 r1(99), r2(99);
    for (int t = 0; t < 200; ++t) {
        const InputPair a = env1.round(t, r1);
        const InputPair b = env2.round(t, r2);
        EXPECT_EQ(a.reward, b.reward);
        EXPECT_TRUE(a.cost == b.cost);
    }
}

TEST(StochasticEnv, DrawsStayInDeclaredRanges) {
    StochasticSpec spec = two_arm_spec(0.3, Noise::uniform(0.4), -0.4);
    spec.reward_noise = {Noise::uniform(0.1), Noise::bernoulli()};
    spec.cost_noise[1] = Noise::uniform(0.4);
    StochasticEnv env(spec);
    SplitMix64 rng(7);
    for (int t = 0; t < 100000; ++t) {
        const InputPair p = env.round(t, rng);
        for (double r : p.reward) {
            EXPECT_GE(r, 0.0);
            EXPECT_LE(r, 1.0);
        }
        for (double c : p.cost.data) {
            EXPECT_GE(c, -1.0);
            EXPECT_LE(c, 1.0);
        }
    }
}

TEST(StochasticSpec, ValidationRejectsBadSpecs) {
    StochasticSpec spec = two_arm_spec(0.5);
    spec.beta = 0.6; // void mean -0.5 no longer <= -beta
    EXPECT_THROW(StochasticEnv{spec}, std::invalid_argument);
    spec = two_arm_spec(0.5);
    spec.mean_rewards[1] = 1.2;
    EXPECT_THROW(StochasticEnv{spec}, std::invalid_argument);
    spec = two_arm_spec(0.5);
    spec.cost_noise[1] = Noise::uniform(0.6); // support escapes [-1, 1]
    EXPECT_THROW(StochasticEnv{spec}, std::invalid_argument);
    spec = two_arm_spec(0.5);
    spec.void_index = 5;
    EXPECT_THROW(StochasticEnv{spec}, std::invalid_argument);
}

TEST(StochasticRound, MatchesEnvSemantics) {
    const StochasticSpec spec = two_arm_spec(0.5);
    SplitMix64 rng(5);
    const InputPair p = stochastic_round(spec, rng);
    EXPECT_EQ(p.num_actions(), 2);
    EXPECT_EQ(p.reward[1], 0.8);
}

// ---------------------------------------------------------------------------
// Adversarial scripts
// ---------------------------------------------------------------------------

TEST(TwoPhaseScript, ConstructionMatchesContract) {
    const AdversarialScript s = adversarial_two_phase(100, 2, 1, 0.25);
    EXPECT_EQ(s.K, 3);
    EXPECT_EQ(s.void_index, 0);
    for (long t = 0; t < 100; ++t) {
        EXPECT_EQ(s.rewards(static_cast<int>(t), 0), 0.0);
        EXPECT_EQ(s.cost(t, 0, 0), -0.25);
        const int good = t < 50 ? 1 : 2;
        const int idle = t < 50 ? 2 : 1;
        EXPECT_EQ(s.rewards(static_cast<int>(t), good), 1.0);
        EXPECT_EQ(s.cost(t, good, 0), 1.0);
        EXPECT_EQ(s.rewards(static_cast<int>(t), idle), 0.0);
        EXPECT_EQ(s.cost(t, idle, 0), 0.0);
    }
    // each phase arm collects T/2; lowest index wins the tie
    const auto [arm, value] = opt_adversarial(s);
    EXPECT_EQ(arm, 1);
    EXPECT_EQ(value, 50.0);
    EXPECT_THROW(adversarial_two_phase(101, 2, 1, 0.25), std::invalid_argument);
}

TEST(AdversarialScript, JsonRoundTripIsBitExact) {
    const AdversarialScript s = adversarial_two_phase(24, 3, 2, 0.3);
    const std::string path =
        (std::filesystem::temp_directory_path() / "bwrk_script_roundtrip.json").string();
    save_script(s, path);
    const AdversarialScript r = load_script(path);
    EXPECT_EQ(r.T, s.T);
    EXPECT_EQ(r.K, s.K);
    EXPECT_EQ(r.m, s.m);
    EXPECT_EQ(r.beta, s.beta);
    EXPECT_EQ(r.void_index, s.void_index);
    EXPECT_TRUE(r.rewards == s.rewards);
    EXPECT_EQ(r.costs, s.costs);
    std::remove(path.c_str());
}

TEST(AdversarialScript, LoadValidatesVoidBoundAndInfersColumn) {
    AdversarialScript s = adversarial_two_phase(10, 2, 1, 0.25);
    nlohmann::json j = s;
    j.erase("void"); // inference should find column 0
    const AdversarialScript inferred = j.get<AdversarialScript>();
    EXPECT_EQ(inferred.void_index, 0);

    j["beta"] = 0.5; // column 0 only replenishes at 0.25 per round
    EXPECT_THROW(j.get<AdversarialScript>(), std::invalid_argument);

    nlohmann::json bad = s;
    bad["costs"][3][0][0] = 0.1; // void bound broken in one round
    EXPECT_THROW(bad.get<AdversarialScript>(), std::invalid_argument);
}

TEST(AdversarialEnv, ReplaysScriptAndExhausts) {
    const AdversarialScript s = adversarial_two_phase(10, 2, 1, 0.25);
    AdversarialEnv env(s);
    EXPECT_EQ(env.horizon(), 10);
    SplitMix64 rng(3);
    const InputPair p = env.round(0, rng);
    EXPECT_EQ(p.reward[1], 1.0);
    EXPECT_THROW(env.round(10, rng), std::runtime_error);
}

// ---------------------------------------------------------------------------
// Inventory management
// ---------------------------------------------------------------------------

TEST(Inventory, DeterministicSpecExamples) {
    InventorySpec spec;
    spec.open_reward = {0.8, Noise::point()};
    spec.open_cost = {0.6, Noise::point()};
    spec.supplier_reward = {-0.2, Noise::point()};
    spec.supplier_cost = {-0.5, Noise::point()};
    SplitMix64 rng(1);
    const auto open = inventory_round(spec, rng, InventorySpec::kOpen);
    EXPECT_EQ(open.first, 0.8);
    EXPECT_EQ(open.second, 0.6);
    const auto supplier = inventory_round(spec, rng, InventorySpec::kSupplier);
    EXPECT_EQ(supplier.first, -0.2);
    EXPECT_EQ(supplier.second, -0.5);
    EXPECT_EQ(spec.beta(), 0.5);
    EXPECT_THROW(inventory_round(spec, rng, 2), std::invalid_argument);
}

TEST(Inventory, SupplierCostMonteCarlo) {
    InventorySpec spec;
    spec.supplier_cost = {-0.5, Noise::uniform(0.3)};
    SplitMix64 rng(44);
    double sum = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) sum += inventory_round(spec, rng, InventorySpec::kSupplier).second;
    EXPECT_NEAR(sum / n, -spec.beta(), 0.01);
}

TEST(Inventory, WrappedEnvEmitsUnitRangeRewards) {
    InventorySpec spec;
    spec.open_reward = {1.0, Noise::point()}; // raw endpoints map to exactly 1 and ...
    spec.supplier_reward = {-1.0, Noise::point()};
    spec.supplier_cost = {-0.5, Noise::point()};
    auto env = make_inventory_env(spec);
    EXPECT_EQ(env->raw_reward_range(), (std::pair{-1.0, 1.0}));
    EXPECT_EQ(env->reward_range(), (std::pair{0.0, 1.0}));
    EXPECT_EQ(env->void_action(), InventorySpec::kSupplier);
    EXPECT_EQ(env->beta(), 0.5);
    SplitMix64 rng(2);
    const InputPair p = env->round(0, rng);
    EXPECT_EQ(p.reward[InventorySpec::kOpen], 1.0);
    EXPECT_EQ(p.reward[InventorySpec::kSupplier], 0.0);
    EXPECT_EQ(p.cost(InventorySpec::kSupplier, 0), -0.5); // costs untouched
}

TEST(Inventory, SpecValidation) {
    InventorySpec spec;
    spec.supplier_cost = {0.2, Noise::point()}; // must be in [-1, 0]
    EXPECT_THROW(spec.validate(), std::invalid_argument);
    spec = InventorySpec{};
    spec.open_reward = {0.95, Noise::uniform(0.2)}; // support escapes [0, 1]
    EXPECT_THROW(spec.validate(), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Bilateral trade
// ---------------------------------------------------------------------------

TEST(BilateralTrade, VoidPairAlwaysBuysNeverSells) {
    BilateralTradeSpec spec;
    SplitMix64 rng(5);
    for (int i = 0; i < 1000; ++i) {
        const auto [rev, cost] = bilateral_round(spec, rng, 1.0, spec.void_q);
        EXPECT_EQ(rev, -1.0);
        EXPECT_EQ(cost, -1.0);
    }
}

TEST(BilateralTrade, RevenueExamples) {
    BilateralTradeSpec spec;
    spec.seller = {0.3, Noise::point()};
    spec.buyer = {0.9, Noise::point()};
    SplitMix64 rng(1);
    { // no buy (0.3 > 0.2), sell (0.8 <= 0.9)
        const auto [rev, cost] = bilateral_round(spec, rng, 0.2, 0.8);
        EXPECT_EQ(rev, 0.8);
        EXPECT_EQ(cost, 1.0);
    }
    spec.buyer = {0.5, Noise::point()};
    { // buy only (0.3 <= 0.4), no sell (0.7 > 0.5)
        const auto [rev, cost] = bilateral_round(spec, rng, 0.4, 0.7);
        EXPECT_EQ(rev, -0.4);
        EXPECT_EQ(cost, -1.0);
    }
}

TEST(BilateralTrade, CostsAreStockDeltas) {
    BilateralTradeSpec spec;
    BilateralTradeRawEnv env(spec);
    SplitMix64 rng(31);
    for (int t = 0; t < 2000; ++t) {
        const InputPair p = env.round(t, rng);
        for (int a = 0; a < p.num_actions(); ++a) {
            const double c = p.cost(a, 0);
            EXPECT_TRUE(c == -1.0 || c == 0.0 || c == 1.0);
            EXPECT_GE(p.reward[a], -1.0);
            EXPECT_LE(p.reward[a], 1.0);
        }
    }
}

TEST(BilateralTrade, AnalyticMeansMatchMonteCarlo) {
    BilateralTradeSpec spec;
    spec.grid_points = 5;
    BilateralTradeRawEnv env(spec);
    Vec f_bar;
    Mat c_bar;
    env.means(f_bar, c_bar);

    SplitMix64 rng(8);
    std::vector<InputPair> sample;
    for (int t = 0; t < 60000; ++t) sample.push_back(env.round(t, rng));
    const auto [f_emp, c_emp] = empirical_means(sample);
    for (int a = 0; a < env.num_actions(); ++a) {
        EXPECT_NEAR(f_emp[a], f_bar[a], 0.015);
        EXPECT_NEAR(c_emp(a, 0), c_bar(a, 0), 0.015);
    }
    // the void pair is deterministic
    EXPECT_EQ(f_bar[env.void_action()], -1.0);
    EXPECT_EQ(c_bar(env.void_action(), 0), -1.0);
}

TEST(BilateralTrade, GridGeometry) {
    BilateralTradeSpec spec;
    spec.grid_points = 21;
    EXPECT_EQ(spec.num_actions(), 442);
    EXPECT_EQ(spec.void_action(), 441);
    const auto [p0, q0] = spec.action_prices(0);
    EXPECT_EQ(p0, 0.0);
    EXPECT_EQ(q0, 0.0);
    const auto [pv, qv] = spec.action_prices(441);
    EXPECT_EQ(pv, 1.0);
    EXPECT_EQ(qv, 1.5);
    EXPECT_THROW((BilateralTradeSpec{{0.5, Noise::bernoulli()}, {0.5, Noise::point()}, 5, 1.5}
                      .validate()),
                 std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Translate/rescale wrapper
// ---------------------------------------------------------------------------

TEST(TranslateRescale, EndpointsAndRefusal) {
    InventorySpec spec;
    spec.open_reward = {1.0, Noise::point()};
    spec.supplier_reward = {-1.0, Noise::point()};
    auto env = translate_rescale_env(std::make_shared<InventoryRawEnv>(spec), -1.0, 1.0);
    SplitMix64 rng(3);
    const InputPair p = env->round(0, rng);
    EXPECT_EQ(p.reward[0], 1.0);
    EXPECT_EQ(p.reward[1], 0.0);

    auto adversarial = std::make_shared<AdversarialEnv>(adversarial_two_phase(10, 2, 1, 0.25));
    EXPECT_THROW(translate_rescale_env(adversarial, -1.0, 1.0), std::invalid_argument);
}

TEST(TranslateRescale, MeansTransformLinearly) {
    InventorySpec spec;
    auto raw = std::make_shared<InventoryRawEnv>(spec);
    Vec f_raw;
    Mat c_raw;
    raw->means(f_raw, c_raw);
    auto wrapped = translate_rescale_env(raw, -1.0, 1.0);
    Vec f_scaled;
    Mat c_scaled;
    wrapped->means(f_scaled, c_scaled);
    for (std::size_t a = 0; a < f_raw.size(); ++a)
        EXPECT_NEAR(f_scaled[a], (f_raw[a] + 1.0) / 2.0, 1e-12);
    EXPECT_TRUE(c_scaled == c_raw);
}

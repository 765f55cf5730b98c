#pragma once

#include <cmath>
#include <fstream>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "bwrk/core.hpp"
#include "bwrk/rng.hpp"

namespace bwrk {

enum class InputKind { Stochastic, Adversarial };

// ---------------------------------------------------------------------------
// Bounded scalar distributions. Everything here has bounded support; that is
// load-bearing for every concentration argument downstream.
// ---------------------------------------------------------------------------

struct Noise {
    enum class Kind { Point, Uniform, Bernoulli };
    Kind kind = Kind::Point;
    double halfwidth = 0.0; // Uniform: mean +/- halfwidth

    static Noise point() { return Noise{Kind::Point, 0.0}; }
    static Noise uniform(double hw) {
        if (!(hw >= 0.0)) throw std::invalid_argument("Noise::uniform: halfwidth must be >= 0");
        return Noise{Kind::Uniform, hw};
    }
    // Two-point distribution on {0, sign(mean)} hitting the mean exactly.
    static Noise bernoulli() { return Noise{Kind::Bernoulli, 0.0}; }
};

struct ScalarDist {
    double mean = 0.0;
    Noise noise = Noise::point();

    double support_lo() const {
        switch (noise.kind) {
            case Noise::Kind::Point: return mean;
            case Noise::Kind::Uniform: return mean - noise.halfwidth;
            case Noise::Kind::Bernoulli: return std::min(0.0, mean >= 0.0 ? 0.0 : -1.0);
        }
        return mean;
    }
    double support_hi() const {
        switch (noise.kind) {
            case Noise::Kind::Point: return mean;
            case Noise::Kind::Uniform: return mean + noise.halfwidth;
            case Noise::Kind::Bernoulli: return std::max(0.0, mean >= 0.0 ? 1.0 : 0.0);
        }
        return mean;
    }

    void validate_support(double lo, double hi, const char* what) const {
        if (noise.kind == Noise::Kind::Bernoulli && std::abs(mean) > 1.0 + 1e-12)
            throw std::invalid_argument(std::string(what) + ": bernoulli mean must be in [-1, 1]");
        if (support_lo() < lo - 1e-12 || support_hi() > hi + 1e-12)
            throw std::invalid_argument(std::string(what) + ": support outside declared range");
    }

    double sample(SplitMix64& rng) const {
        switch (noise.kind) {
            case Noise::Kind::Point:
                return mean;
            case Noise::Kind::Uniform:
                return rng.uniform(mean - noise.halfwidth, mean + noise.halfwidth);
            case Noise::Kind::Bernoulli: {
                const double sgn = mean >= 0.0 ? 1.0 : -1.0;
                return rng.uniform01() < std::abs(mean) ? sgn : 0.0;
            }
        }
        return mean;
    }

    // P(X <= x) and P(X >= x); needed for the analytic trade means.
    double prob_le(double x) const {
        switch (noise.kind) {
            case Noise::Kind::Point:
                return x >= mean ? 1.0 : 0.0;
            case Noise::Kind::Uniform: {
                const double a = mean - noise.halfwidth, b = mean + noise.halfwidth;
                if (b <= a) return x >= mean ? 1.0 : 0.0;
                return std::clamp((x - a) / (b - a), 0.0, 1.0);
            }
            case Noise::Kind::Bernoulli: {
                const double sgn = mean >= 0.0 ? 1.0 : -1.0;
                const double p_sgn = std::abs(mean);
                double p = 0.0;
                if (x >= 0.0) p += 1.0 - p_sgn;
                if (x >= sgn) p += p_sgn;
                if (sgn < 0.0) { // support {-1, 0}
                    p = (x >= -1.0 ? p_sgn : 0.0) + (x >= 0.0 ? 1.0 - p_sgn : 0.0);
                }
                return std::min(p, 1.0);
            }
        }
        return 0.0;
    }

    double prob_ge(double x) const {
        switch (noise.kind) {
            case Noise::Kind::Point:
                return x <= mean ? 1.0 : 0.0;
            case Noise::Kind::Uniform: {
                const double a = mean - noise.halfwidth, b = mean + noise.halfwidth;
                if (b <= a) return x <= mean ? 1.0 : 0.0;
                return std::clamp((b - x) / (b - a), 0.0, 1.0);
            }
            case Noise::Kind::Bernoulli: {
                const double sgn = mean >= 0.0 ? 1.0 : -1.0;
                const double p_sgn = std::abs(mean);
                double p = 0.0;
                if (x <= 0.0) p += 1.0 - p_sgn;
                if (x <= sgn) p += p_sgn;
                return std::min(p, 1.0);
            }
        }
        return 0.0;
    }
};

// ---------------------------------------------------------------------------
// Environment interface. round(t, rng) materializes the full input pair; the
// bandit restriction (learner sees only the played action) is enforced by the
// driver, while the full vectors feed the trace and offline baselines.
// ---------------------------------------------------------------------------

class Environment {
public:
    virtual ~Environment() = default;
    virtual InputKind kind() const = 0;
    virtual int num_actions() const = 0;
    virtual int num_resources() const = 0;
    virtual int void_action() const = 0;
    virtual double beta() const = 0;
    virtual long horizon() const { return -1; } // -1: unbounded
    virtual InputPair round(long t, SplitMix64& rng) = 0;
    virtual std::pair<double, double> reward_range() const { return {0.0, 1.0}; }
    // Original reward scale before any rescaling wrapper (for report inversion).
    virtual std::pair<double, double> raw_reward_range() const { return reward_range(); }
    virtual bool has_means() const { return false; }
    virtual void means(Vec& /*f_bar*/, Mat& /*c_bar*/) const {
        throw std::logic_error("Environment: means unavailable");
    }
    virtual void set_range_policy(RangePolicy policy, WarnCounters* warn) {
        policy_ = policy;
        warn_ = warn;
    }

protected:
    RangePolicy policy_ = RangePolicy::Strict;
    WarnCounters* warn_ = nullptr;
};

// ---------------------------------------------------------------------------
// Stochastic i.i.d. environment (BwRK).
// ---------------------------------------------------------------------------

struct StochasticSpec {
    int K = 0;
    int m = 0;
    Vec mean_rewards;                 // K, in [0,1]
    Mat mean_costs;                   // K x m, in [-1,1]
    std::vector<Noise> reward_noise;  // per arm
    std::vector<Noise> cost_noise;    // per arm, applied to each resource entry
    int void_index = 0;
    double beta = 0.0; // declared: E[c(void)] <= -beta componentwise

    void validate() const {
        if (K < 1 || m < 1) throw std::invalid_argument("StochasticSpec: K and m must be >= 1");
        if (static_cast<int>(mean_rewards.size()) != K ||
            mean_costs.rows != K || mean_costs.cols != m)
            throw std::invalid_argument("StochasticSpec: dimension mismatch");
        if (static_cast<int>(reward_noise.size()) != K ||
            static_cast<int>(cost_noise.size()) != K)
            throw std::invalid_argument("StochasticSpec: need one noise descriptor per arm");
        if (void_index < 0 || void_index >= K)
            throw std::invalid_argument("StochasticSpec: void index out of range");
        if (!(beta >= 0.0)) throw std::invalid_argument("StochasticSpec: beta must be >= 0");
        for (int a = 0; a < K; ++a) {
            ScalarDist r{mean_rewards[a], reward_noise[a]};
            r.validate_support(0.0, 1.0, "StochasticSpec reward");
            for (int i = 0; i < m; ++i) {
                ScalarDist c{mean_costs(a, i), cost_noise[a]};
                c.validate_support(-1.0, 1.0, "StochasticSpec cost");
            }
        }
        for (int i = 0; i < m; ++i)
            if (mean_costs(void_index, i) > -beta + 1e-12)
                throw std::invalid_argument(
                    "StochasticSpec: void arm mean cost must be <= -beta on every resource");
    }
};

class StochasticEnv : public Environment {
public:
    explicit StochasticEnv(StochasticSpec spec) : spec_(std::move(spec)) { spec_.validate(); }

    InputKind kind() const override { return InputKind::Stochastic; }
    int num_actions() const override { return spec_.K; }
    int num_resources() const override { return spec_.m; }
    int void_action() const override { return spec_.void_index; }
    double beta() const override { return spec_.beta; }

    InputPair round(long /*t*/, SplitMix64& rng) override {
        Vec reward(spec_.K);
        Mat cost(spec_.K, spec_.m);
        for (int a = 0; a < spec_.K; ++a) {
            reward[a] = ScalarDist{spec_.mean_rewards[a], spec_.reward_noise[a]}.sample(rng);
            for (int i = 0; i < spec_.m; ++i)
                cost(a, i) = ScalarDist{spec_.mean_costs(a, i), spec_.cost_noise[a]}.sample(rng);
        }
        return make_input_pair(std::move(reward), std::move(cost), spec_.void_index,
                               policy_, warn_);
    }

    bool has_means() const override { return true; }
    void means(Vec& f_bar, Mat& c_bar) const override {
        f_bar = spec_.mean_rewards;
        c_bar = spec_.mean_costs;
    }

    const StochasticSpec& spec() const { return spec_; }

private:
    StochasticSpec spec_;
};

inline InputPair stochastic_round(const StochasticSpec& spec, SplitMix64& rng) {
    StochasticEnv env(spec);
    return env.round(0, rng);
}

// ---------------------------------------------------------------------------
// Adversarial scripts: fully materialized input tables.
// ---------------------------------------------------------------------------

struct AdversarialScript {
    long T = 0;
    int K = 0;
    int m = 0;
    double beta = 0.0;
    int void_index = 0;
    Mat rewards;              // T x K
    std::vector<double> costs; // flat, index (t*K + a)*m + i

    double cost(long t, int a, int i) const {
        return costs[(static_cast<std::size_t>(t) * K + a) * m + i];
    }
    double& cost(long t, int a, int i) {
        return costs[(static_cast<std::size_t>(t) * K + a) * m + i];
    }

    void validate() const {
        if (T < 1 || K < 1 || m < 1)
            throw std::invalid_argument("AdversarialScript: T, K, m must be >= 1");
        if (rewards.rows != static_cast<int>(T) || rewards.cols != K ||
            costs.size() != static_cast<std::size_t>(T) * K * m)
            throw std::invalid_argument("AdversarialScript: dimension mismatch");
        if (void_index < 0 || void_index >= K)
            throw std::invalid_argument("AdversarialScript: void index out of range");
        if (!(beta >= 0.0)) throw std::invalid_argument("AdversarialScript: beta must be >= 0");
        for (long t = 0; t < T; ++t) {
            for (int a = 0; a < K; ++a) {
                const double r = rewards(static_cast<int>(t), a);
                if (r < 0.0 || r > 1.0)
                    throw std::invalid_argument("AdversarialScript: reward outside [0, 1]");
                for (int i = 0; i < m; ++i) {
                    const double c = cost(t, a, i);
                    if (c < -1.0 || c > 1.0)
                        throw std::invalid_argument("AdversarialScript: cost outside [-1, 1]");
                }
            }
            for (int i = 0; i < m; ++i)
                if (cost(t, void_index, i) > -beta + 1e-12)
                    throw std::invalid_argument(
                        "AdversarialScript: void action must cost <= -beta in every round");
        }
    }
};

inline void to_json(nlohmann::json& j, const AdversarialScript& s) {
    nlohmann::json rewards = nlohmann::json::array();
    for (long t = 0; t < s.T; ++t) {
        nlohmann::json row = nlohmann::json::array();
        for (int a = 0; a < s.K; ++a) row.push_back(s.rewards(static_cast<int>(t), a));
        rewards.push_back(std::move(row));
    }
    nlohmann::json costs = nlohmann::json::array();
    for (long t = 0; t < s.T; ++t) {
        nlohmann::json per_arm = nlohmann::json::array();
        for (int a = 0; a < s.K; ++a) {
            nlohmann::json vec = nlohmann::json::array();
            for (int i = 0; i < s.m; ++i) vec.push_back(s.cost(t, a, i));
            per_arm.push_back(std::move(vec));
        }
        costs.push_back(std::move(per_arm));
    }
    j = nlohmann::json{{"T", s.T},       {"K", s.K},           {"m", s.m},
                       {"beta", s.beta}, {"void", s.void_index}, {"rewards", std::move(rewards)},
                       {"costs", std::move(costs)}};
}

inline void from_json(const nlohmann::json& j, AdversarialScript& s) {
    s.T = j.at("T").get<long>();
    s.K = j.at("K").get<int>();
    s.m = j.at("m").get<int>();
    s.beta = j.at("beta").get<double>();
    if (s.T < 1 || s.K < 1 || s.m < 1)
        throw std::invalid_argument("AdversarialScript: T, K, m must be >= 1");
    s.rewards = Mat(static_cast<int>(s.T), s.K);
    s.costs.assign(static_cast<std::size_t>(s.T) * s.K * s.m, 0.0);
    const auto& rewards = j.at("rewards");
    const auto& costs = j.at("costs");
    if (rewards.size() != static_cast<std::size_t>(s.T) ||
        costs.size() != static_cast<std::size_t>(s.T))
        throw std::invalid_argument("AdversarialScript: table length != T");
    for (long t = 0; t < s.T; ++t) {
        const auto& rrow = rewards[static_cast<std::size_t>(t)];
        const auto& crow = costs[static_cast<std::size_t>(t)];
        if (rrow.size() != static_cast<std::size_t>(s.K) ||
            crow.size() != static_cast<std::size_t>(s.K))
            throw std::invalid_argument("AdversarialScript: row width != K");
        for (int a = 0; a < s.K; ++a) {
            s.rewards(static_cast<int>(t), a) = rrow[static_cast<std::size_t>(a)].get<double>();
            const auto& cvec = crow[static_cast<std::size_t>(a)];
            if (cvec.size() != static_cast<std::size_t>(s.m))
                throw std::invalid_argument("AdversarialScript: cost vector width != m");
            for (int i = 0; i < s.m; ++i)
                s.cost(t, a, i) = cvec[static_cast<std::size_t>(i)].get<double>();
        }
    }
    if (j.contains("void")) {
        s.void_index = j.at("void").get<int>();
    } else {
        // infer: lowest-index column satisfying the void-action bound
        int found = -1;
        for (int a = 0; a < s.K && found < 0; ++a) {
            bool ok = true;
            for (long t = 0; t < s.T && ok; ++t)
                for (int i = 0; i < s.m && ok; ++i)
                    if (s.cost(t, a, i) > -s.beta + 1e-12) ok = false;
            if (ok) found = a;
        }
        if (found < 0)
            throw std::invalid_argument(
                "AdversarialScript: no column satisfies the void-action bound");
        s.void_index = found;
    }
    s.validate();
}

inline void save_script(const AdversarialScript& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_script: cannot open " + path);
    nlohmann::json j = s;
    out << j.dump(1) << "\n";
    if (!out) throw std::runtime_error("save_script: write failed for " + path);
}

inline AdversarialScript load_script(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_script: cannot open " + path);
    nlohmann::json j = nlohmann::json::parse(in);
    return j.get<AdversarialScript>();
}

// Stress script for competitive-ratio sweeps: in each half of the horizon a
// different arm is simultaneously the only rewarding arm and the most
// expensive one, so the dual has to adapt across the phase boundary.
// Arm 0 is the void action (reward 0, cost -beta); arms 1 and 2 carry the
// phases; any further arms are zero-reward, zero-cost decoys.
inline AdversarialScript adversarial_two_phase(long T, int arms, int m, double beta) {
    if (T < 2 || T % 2 != 0) throw std::invalid_argument("adversarial_two_phase: T must be even");
    if (arms < 2) throw std::invalid_argument("adversarial_two_phase: need at least two arms");
    if (m < 1) throw std::invalid_argument("adversarial_two_phase: m must be >= 1");
    if (!(beta >= 0.0 && beta <= 1.0))
        throw std::invalid_argument("adversarial_two_phase: beta must be in [0, 1]");
    AdversarialScript s;
    s.T = T;
    s.K = arms + 1;
    s.m = m;
    s.beta = beta;
    s.void_index = 0;
    s.rewards = Mat(static_cast<int>(T), s.K, 0.0);
    s.costs.assign(static_cast<std::size_t>(T) * s.K * m, 0.0);
    for (long t = 0; t < T; ++t) {
        const int good = (t < T / 2) ? 1 : 2;
        s.rewards(static_cast<int>(t), good) = 1.0;
        for (int i = 0; i < m; ++i) {
            s.cost(t, 0, i) = -beta;
            s.cost(t, good, i) = 1.0;
        }
    }
    s.validate();
    return s;
}

class AdversarialEnv : public Environment {
public:
    explicit AdversarialEnv(AdversarialScript script) : script_(std::move(script)) {
        script_.validate();
    }

    InputKind kind() const override { return InputKind::Adversarial; }
    int num_actions() const override { return script_.K; }
    int num_resources() const override { return script_.m; }
    int void_action() const override { return script_.void_index; }
    double beta() const override { return script_.beta; }
    long horizon() const override { return script_.T; }

    InputPair round(long t, SplitMix64& /*rng*/) override {
        if (t < 0 || t >= script_.T)
            throw std::runtime_error("AdversarialEnv: script exhausted at round " +
                                     std::to_string(t));
        Vec reward = script_.rewards.row(static_cast<int>(t));
        Mat cost(script_.K, script_.m);
        for (int a = 0; a < script_.K; ++a)
            for (int i = 0; i < script_.m; ++i) cost(a, i) = script_.cost(t, a, i);
        return make_input_pair(std::move(reward), std::move(cost), script_.void_index,
                               policy_, warn_);
    }

    const AdversarialScript& script() const { return script_; }

private:
    AdversarialScript script_;
};

// ---------------------------------------------------------------------------
// Inventory management: open for business vs. visit the supplier. Raw rewards
// live in [-1, 1]; wrap through translate_rescale_env before driving.
// ---------------------------------------------------------------------------

struct InventorySpec {
    static constexpr int kOpen = 0;
    static constexpr int kSupplier = 1;

    ScalarDist open_reward{0.8, Noise::point()};     // in [0, 1]
    ScalarDist open_cost{0.6, Noise::point()};       // in [0, 1]
    ScalarDist supplier_reward{-0.2, Noise::point()}; // in [-1, 0]
    ScalarDist supplier_cost{-0.5, Noise::point()};   // in [-1, 0]

    double beta() const { return -supplier_cost.mean; }

    void validate() const {
        open_reward.validate_support(0.0, 1.0, "InventorySpec open reward");
        open_cost.validate_support(0.0, 1.0, "InventorySpec open cost");
        supplier_reward.validate_support(-1.0, 0.0, "InventorySpec supplier reward");
        supplier_cost.validate_support(-1.0, 0.0, "InventorySpec supplier cost");
    }
};

inline std::pair<double, double> inventory_round(const InventorySpec& spec, SplitMix64& rng,
                                                 int action) {
    if (action == InventorySpec::kOpen)
        return {spec.open_reward.sample(rng), spec.open_cost.sample(rng)};
    if (action == InventorySpec::kSupplier)
        return {spec.supplier_reward.sample(rng), spec.supplier_cost.sample(rng)};
    throw std::invalid_argument("inventory_round: action must be open(0) or supplier(1)");
}

class InventoryRawEnv : public Environment {
public:
    explicit InventoryRawEnv(InventorySpec spec) : spec_(spec) { spec_.validate(); }

    InputKind kind() const override { return InputKind::Stochastic; }
    int num_actions() const override { return 2; }
    int num_resources() const override { return 1; }
    int void_action() const override { return InventorySpec::kSupplier; }
    double beta() const override { return spec_.beta(); }
    std::pair<double, double> reward_range() const override { return {-1.0, 1.0}; }

    InputPair round(long /*t*/, SplitMix64& rng) override {
        Vec reward(2);
        Mat cost(2, 1);
        reward[InventorySpec::kOpen] = spec_.open_reward.sample(rng);
        cost(InventorySpec::kOpen, 0) = spec_.open_cost.sample(rng);
        reward[InventorySpec::kSupplier] = spec_.supplier_reward.sample(rng);
        cost(InventorySpec::kSupplier, 0) = spec_.supplier_cost.sample(rng);
        return InputPair{std::move(reward), std::move(cost), InventorySpec::kSupplier};
    }

    bool has_means() const override { return true; }
    void means(Vec& f_bar, Mat& c_bar) const override {
        f_bar = {spec_.open_reward.mean, spec_.supplier_reward.mean};
        c_bar = Mat(2, 1);
        c_bar(0, 0) = spec_.open_cost.mean;
        c_bar(1, 0) = spec_.supplier_cost.mean;
    }

    const InventorySpec& spec() const { return spec_; }

private:
    InventorySpec spec_;
};

// ---------------------------------------------------------------------------
// Bilateral trade: the merchant posts a buying price p to a seller and a
// selling price q to a buyer. Actions are (p, q) pairs on a uniform grid plus
// the dedicated void pair (p = 1, q > 1) which always buys and never sells.
// One resource: units in stock. Raw revenue lives in [-1, 1].
// ---------------------------------------------------------------------------

struct BilateralTradeSpec {
    ScalarDist seller{0.5, Noise::uniform(0.5)}; // valuation over [0, 1]
    ScalarDist buyer{0.5, Noise::uniform(0.5)};  // valuation over (0, 1]
    int grid_points = 21;                        // price grid per side
    double void_q = 1.5;                         // void pair sell price, > 1

    int num_actions() const { return grid_points * grid_points + 1; }
    int void_action() const { return grid_points * grid_points; }

    double price(int idx) const { return static_cast<double>(idx) / (grid_points - 1); }

    // action -> (p, q); the last action is the void pair
    std::pair<double, double> action_prices(int a) const {
        if (a == void_action()) return {1.0, void_q};
        return {price(a / grid_points), price(a % grid_points)};
    }

    void validate() const {
        if (grid_points < 2)
            throw std::invalid_argument("BilateralTradeSpec: need at least 2 grid points");
        if (!(void_q > 1.0)) throw std::invalid_argument("BilateralTradeSpec: void_q must be > 1");
        if (seller.noise.kind == Noise::Kind::Bernoulli ||
            buyer.noise.kind == Noise::Kind::Bernoulli)
            throw std::invalid_argument("BilateralTradeSpec: valuations must be point or uniform");
        seller.validate_support(0.0, 1.0, "BilateralTradeSpec seller");
        buyer.validate_support(0.0, 1.0, "BilateralTradeSpec buyer");
    }
};

// Revenue and stock delta of a single posted-price pair against fresh draws.
// cost is the negative of the stock delta: B_{t+1} = B_t - cost.
inline std::pair<double, double> bilateral_round(const BilateralTradeSpec& spec, SplitMix64& rng,
                                                 double p, double q) {
    const double s = spec.seller.sample(rng);
    const double b = spec.buyer.sample(rng);
    const bool sell = q <= b;
    const bool buy = s <= p;
    const double revenue = (sell ? q : 0.0) - (buy ? p : 0.0);
    const double cost = (sell ? 1.0 : 0.0) - (buy ? 1.0 : 0.0);
    return {revenue, cost};
}

class BilateralTradeRawEnv : public Environment {
public:
    explicit BilateralTradeRawEnv(BilateralTradeSpec spec) : spec_(spec) { spec_.validate(); }

    InputKind kind() const override { return InputKind::Stochastic; }
    int num_actions() const override { return spec_.num_actions(); }
    int num_resources() const override { return 1; }
    int void_action() const override { return spec_.void_action(); }
    double beta() const override { return 1.0; } // the void pair always buys
    std::pair<double, double> reward_range() const override { return {-1.0, 1.0}; }

    InputPair round(long /*t*/, SplitMix64& rng) override {
        const double s = spec_.seller.sample(rng);
        const double b = spec_.buyer.sample(rng);
        const int K = spec_.num_actions();
        Vec reward(K);
        Mat cost(K, 1);
        for (int a = 0; a < K; ++a) {
            const auto [p, q] = spec_.action_prices(a);
            const bool sell = q <= b;
            const bool buy = s <= p;
            reward[a] = (sell ? q : 0.0) - (buy ? p : 0.0);
            cost(a, 0) = (sell ? 1.0 : 0.0) - (buy ? 1.0 : 0.0);
        }
        return InputPair{std::move(reward), std::move(cost), spec_.void_action()};
    }

    bool has_means() const override { return true; }
    void means(Vec& f_bar, Mat& c_bar) const override {
        const int K = spec_.num_actions();
        f_bar.assign(K, 0.0);
        c_bar = Mat(K, 1);
        for (int a = 0; a < K; ++a) {
            const auto [p, q] = spec_.action_prices(a);
            const double p_sell = spec_.buyer.prob_ge(q); // P(q <= b)
            const double p_buy = spec_.seller.prob_le(p); // P(s <= p)
            f_bar[a] = q * p_sell - p * p_buy;
            c_bar(a, 0) = p_sell - p_buy;
        }
    }

    const BilateralTradeSpec& spec() const { return spec_; }

private:
    BilateralTradeSpec spec_;
};

// ---------------------------------------------------------------------------
// Reward translation/rescaling wrapper. Stochastic inputs only: a
// multiplicative (competitive-ratio) guarantee is not translation invariant,
// so wrapping adversarial inputs is refused.
// ---------------------------------------------------------------------------

class RescaledEnv : public Environment {
public:
    RescaledEnv(std::shared_ptr<Environment> inner, double lo, double hi)
        : inner_(std::move(inner)), lo_(lo), hi_(hi) {
        if (!inner_) throw std::invalid_argument("RescaledEnv: null environment");
        if (!(lo < hi)) throw std::invalid_argument("RescaledEnv: need lo < hi");
        if (inner_->kind() == InputKind::Adversarial)
            throw std::invalid_argument(
                "translate_rescale_env: refusing adversarial inputs (rescaled rewards only "
                "preserve guarantees under stochastic inputs)");
    }

    InputKind kind() const override { return InputKind::Stochastic; }
    int num_actions() const override { return inner_->num_actions(); }
    int num_resources() const override { return inner_->num_resources(); }
    int void_action() const override { return inner_->void_action(); }
    double beta() const override { return inner_->beta(); }
    long horizon() const override { return inner_->horizon(); }
    std::pair<double, double> raw_reward_range() const override { return {lo_, hi_}; }

    InputPair round(long t, SplitMix64& rng) override {
        InputPair pair = inner_->round(t, rng);
        for (double& r : pair.reward) r = affine_rescale(r, lo_, hi_, policy_, warn_);
        return pair;
    }

    bool has_means() const override { return inner_->has_means(); }
    void means(Vec& f_bar, Mat& c_bar) const override {
        inner_->means(f_bar, c_bar);
        for (double& r : f_bar) r = (r - lo_) / (hi_ - lo_);
    }

    void set_range_policy(RangePolicy policy, WarnCounters* warn) override {
        Environment::set_range_policy(policy, warn);
        inner_->set_range_policy(policy, warn);
    }

    std::pair<double, double> source_range() const { return {lo_, hi_}; }

private:
    std::shared_ptr<Environment> inner_;
    double lo_, hi_;
};

inline std::shared_ptr<Environment> translate_rescale_env(std::shared_ptr<Environment> env,
                                                          double lo, double hi) {
    return std::make_shared<RescaledEnv>(std::move(env), lo, hi);
}

// Economic environments feed the driver through the (-1, 1) -> (0, 1) map.
inline std::shared_ptr<Environment> make_inventory_env(const InventorySpec& spec) {
    return translate_rescale_env(std::make_shared<InventoryRawEnv>(spec), -1.0, 1.0);
}

inline std::shared_ptr<Environment> make_bilateral_env(const BilateralTradeSpec& spec) {
    return translate_rescale_env(std::make_shared<BilateralTradeRawEnv>(spec), -1.0, 1.0);
}

} // namespace bwrk

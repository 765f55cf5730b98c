#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace bwrk {

using Vec = std::vector<double>;

// Dense row-major matrix, just enough for K x m reward/cost tables.
struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Mat() = default;
    Mat(int r, int c, double fill = 0.0)
        : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, fill) {
        if (r < 0 || c < 0) throw std::invalid_argument("Mat: negative dimension");
    }

    double& operator()(int i, int j) { return data[static_cast<std::size_t>(i) * cols + j]; }
    double operator()(int i, int j) const { return data[static_cast<std::size_t>(i) * cols + j]; }

    Vec row(int i) const {
        Vec out(cols);
        const double* p = data.data() + static_cast<std::size_t>(i) * cols;
        std::copy(p, p + cols, out.begin());
        return out;
    }

    bool operator==(const Mat& o) const {
        return rows == o.rows && cols == o.cols && data == o.data;
    }
};

// Out-of-range handling: Strict throws (test mode), ClampWarn clamps and
// counts (long experiment sweeps stay alive but remain auditable).
enum class RangePolicy { Strict, ClampWarn };

struct WarnCounters {
    long long reward_clamps = 0;
    long long cost_clamps = 0;
    long long rescale_clamps = 0;

    long long total() const { return reward_clamps + cost_clamps + rescale_clamps; }
};

inline double checked_range(double v, double lo, double hi, RangePolicy policy,
                            long long* counter, const char* what) {
    if (v >= lo && v <= hi) return v;
    if (policy == RangePolicy::Strict) {
        throw std::domain_error(std::string(what) + " value " + std::to_string(v) +
                                " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    if (counter) ++(*counter);
    return std::clamp(v, lo, hi);
}

// Global problem data. rho is always B/T, recomputed on demand; there is no
// second copy to drift.
struct ProblemParams {
    long T = 0;
    int m = 0;
    double B = 0.0;
    double beta = 0.0;
    double delta = 0.05;

    ProblemParams() = default;
    ProblemParams(long T_, int m_, double B_, double beta_, double delta_ = 0.05)
        : T(T_), m(m_), B(B_), beta(beta_), delta(delta_) {
        validate();
    }

    void validate() const {
        if (T < 1) throw std::invalid_argument("ProblemParams: T must be >= 1");
        if (m < 1) throw std::invalid_argument("ProblemParams: m must be >= 1");
        if (!(B >= 0.0)) throw std::invalid_argument("ProblemParams: B must be >= 0");
        if (!(beta >= 0.0)) throw std::invalid_argument("ProblemParams: beta must be >= 0");
        if (!(delta > 0.0 && delta <= 1.0))
            throw std::invalid_argument("ProblemParams: delta must be in (0, 1]");
    }

    double rho() const { return B / static_cast<double>(T); }
    double nu() const { return beta + rho(); }
};

// One round of input: realized reward per action and realized cost vector
// per action. Rewards live in [0,1]; wider-reward environments must be
// wrapped through the translate/rescale adapter before reaching here.
struct InputPair {
    Vec reward;       // K
    Mat cost;         // K x m
    int void_action = 0;

    int num_actions() const { return static_cast<int>(reward.size()); }
    int num_resources() const { return cost.cols; }
};

inline InputPair make_input_pair(Vec reward, Mat cost, int void_action,
                                 RangePolicy policy = RangePolicy::Strict,
                                 WarnCounters* warn = nullptr) {
    const int K = static_cast<int>(reward.size());
    if (K < 1) throw std::invalid_argument("InputPair: need at least one action");
    if (cost.rows != K) throw std::invalid_argument("InputPair: cost rows != actions");
    if (cost.cols < 1) throw std::invalid_argument("InputPair: need at least one resource");
    if (void_action < 0 || void_action >= K)
        throw std::invalid_argument("InputPair: void action index out of range");
    for (double& r : reward)
        r = checked_range(r, 0.0, 1.0, policy, warn ? &warn->reward_clamps : nullptr, "reward");
    for (double& c : cost.data)
        c = checked_range(c, -1.0, 1.0, policy, warn ? &warn->cost_clamps : nullptr, "cost");
    return InputPair{std::move(reward), std::move(cost), void_action};
}

// Feasible set for the dual iterate: either the scaled simplex
// {lambda >= 0 : ||lambda||_1 <= radius} or the whole positive orthant.
struct DualDomain {
    enum class Kind { SimplexScaled, PositiveOrthant };
    Kind kind = Kind::PositiveOrthant;
    double radius = 0.0; // 1/nu_tilde when SimplexScaled

    static DualDomain simplex_scaled(double nu_tilde) {
        if (!(nu_tilde > 0.0))
            throw std::invalid_argument("DualDomain: nu_tilde must be positive");
        return DualDomain{Kind::SimplexScaled, 1.0 / nu_tilde};
    }
    static DualDomain positive_orthant() { return DualDomain{Kind::PositiveOrthant, 0.0}; }

    bool contains(const Vec& lambda, double tol = 1e-9) const {
        double l1 = 0.0;
        for (double v : lambda) {
            if (v < -tol) return false;
            l1 += v;
        }
        if (kind == Kind::SimplexScaled && l1 > radius + tol) return false;
        return true;
    }
};

struct DualIterate {
    Vec lambda;
    DualDomain domain;
};

// L_{f,c}(x, lambda) = f(x) + <lambda, rho*1 - c(x)>
inline double lagrangian_value(double f_val, const Vec& c_vec, const Vec& lambda, double rho) {
    if (c_vec.size() != lambda.size())
        throw std::invalid_argument("lagrangian_value: dimension mismatch");
    double acc = f_val;
    for (std::size_t i = 0; i < c_vec.size(); ++i) {
        if (lambda[i] < 0.0)
            throw std::invalid_argument("lagrangian_value: lambda must be nonnegative");
        acc += lambda[i] * (rho - c_vec[i]);
    }
    return acc;
}

// Gradient of the (linear) dual utility lambda -> <lambda, c - rho*1>.
inline Vec dual_gradient(const Vec& c_vec, double rho) {
    Vec g(c_vec.size());
    for (std::size_t i = 0; i < c_vec.size(); ++i) g[i] = c_vec[i] - rho;
    return g;
}

// Monotone map [lo,hi] -> [0,1]; preserves argmax sets.
inline double affine_rescale(double value, double lo, double hi) {
    if (!(lo < hi)) throw std::invalid_argument("affine_rescale: need lo < hi");
    if (value < lo || value > hi)
        throw std::domain_error("affine_rescale: value outside [lo, hi]");
    return (value - lo) / (hi - lo);
}

inline double affine_rescale(double value, double lo, double hi, RangePolicy policy,
                             WarnCounters* warn) {
    if (!(lo < hi)) throw std::invalid_argument("affine_rescale: need lo < hi");
    value = checked_range(value, lo, hi, policy, warn ? &warn->rescale_clamps : nullptr,
                          "affine_rescale");
    return (value - lo) / (hi - lo);
}

// Competitive ratio alpha = nu / (1 + beta), nu = beta + rho.
inline double alpha(double beta, double rho) {
    if (!(beta >= 0.0) || !(rho >= 0.0))
        throw std::invalid_argument("alpha: beta and rho must be nonnegative");
    const double nu = beta + rho;
    if (!(nu > 0.0)) throw std::invalid_argument("alpha: beta + rho must be positive");
    return nu / (1.0 + beta);
}

// E_delta = sqrt(8 T log(4 m T / delta))
inline double concentration_radius(long T, int m, double delta) {
    if (T < 1) throw std::invalid_argument("concentration_radius: T must be >= 1");
    if (m < 1) throw std::invalid_argument("concentration_radius: m must be >= 1");
    if (!(delta > 0.0 && delta <= 1.0))
        throw std::invalid_argument("concentration_radius: delta must be in (0, 1]");
    return std::sqrt(8.0 * static_cast<double>(T) *
                     std::log(4.0 * static_cast<double>(m) * static_cast<double>(T) / delta));
}

inline double l1_norm(const Vec& v) {
    double s = 0.0;
    for (double x : v) s += std::abs(x);
    return s;
}

} // namespace bwrk

#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bwrk/core.hpp"
#include "bwrk/environments.hpp"

namespace bwrk {

// ---------------------------------------------------------------------------
// Best fixed unconstrained action in hindsight (adversarial baseline).
// ---------------------------------------------------------------------------

// Ties broken by lowest action index.
inline std::pair<int, double> opt_adversarial(const AdversarialScript& script) {
    int best = 0;
    double best_value = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < script.K; ++a) {
        double sum = 0.0;
        for (long t = 0; t < script.T; ++t) sum += script.rewards(static_cast<int>(t), a);
        if (sum > best_value) {
            best_value = sum;
            best = a;
        }
    }
    return {best, best_value};
}

// ---------------------------------------------------------------------------
// Constrained linear program over strategy mixtures (stochastic baseline):
//   max f_bar' xi   s.t.   c_bar' xi <= rho * 1,  sum xi = 1,  xi >= 0.
// ---------------------------------------------------------------------------

struct LpInstance {
    Vec f_bar;  // K, in [0,1]
    Mat c_bar;  // K x m, in [-1,1]
    double rho = 0.0;

    int num_actions() const { return static_cast<int>(f_bar.size()); }
    int num_resources() const { return c_bar.cols; }

    void validate() const {
        const int K = num_actions();
        if (K < 1) throw std::invalid_argument("LpInstance: need at least one action");
        if (c_bar.rows != K || c_bar.cols < 1)
            throw std::invalid_argument("LpInstance: dimension mismatch");
        if (!(rho >= 0.0)) throw std::invalid_argument("LpInstance: rho must be >= 0");
        for (double f : f_bar)
            if (f < -1e-12 || f > 1.0 + 1e-12)
                throw std::invalid_argument("LpInstance: f_bar outside [0, 1]");
        for (double c : c_bar.data)
            if (c < -1.0 - 1e-12 || c > 1.0 + 1e-12)
                throw std::invalid_argument("LpInstance: c_bar outside [-1, 1]");
    }
};

enum class LpStatus { Optimal, Infeasible };

struct LpSolution {
    double value = 0.0;
    Vec mixture;
    LpStatus status = LpStatus::Infeasible;
};

// Dense two-phase simplex with Bland's anti-cycling rule. Instances here are
// tiny (K up to a few hundred, m <= 10), so a self-contained tableau keeps
// the artifact dependency-free and bit-reproducible.
namespace detail {

class SimplexTableau {
public:
    SimplexTableau(const LpInstance& inst)
        : K_(inst.num_actions()), m_(inst.num_resources()), n_(K_ + m_ + 1),
          rows_(m_ + 1), tab_(rows_, Vec(n_ + 1, 0.0)), basis_(rows_) {
        // rows 0..m-1: c_bar' xi + slack_i = rho ; row m: sum xi + artificial = 1
        for (int i = 0; i < m_; ++i) {
            for (int a = 0; a < K_; ++a) tab_[i][a] = inst.c_bar(a, i);
            tab_[i][K_ + i] = 1.0;
            tab_[i][n_] = inst.rho;
            basis_[i] = K_ + i;
        }
        for (int a = 0; a < K_; ++a) tab_[m_][a] = 1.0;
        tab_[m_][K_ + m_] = 1.0;
        tab_[m_][n_] = 1.0;
        basis_[m_] = K_ + m_; // artificial
    }

    int artificial() const { return K_ + m_; }

    // Maximize c' x with Bland's rule; columns with allow[j] == false never
    // enter. Returns the objective value attained.
    double maximize(const Vec& cost, const std::vector<bool>& allow) {
        static constexpr double kTol = 1e-9;
        for (;;) {
            // reduced costs r_j = c_j - c_B' tab[., j]
            int enter = -1;
            for (int j = 0; j < n_; ++j) {
                if (!allow[j] || is_basic(j)) continue;
                double r = cost[j];
                for (int i = 0; i < rows_; ++i) r -= cost[basis_[i]] * tab_[i][j];
                if (r > kTol) {
                    enter = j; // Bland: lowest improving index
                    break;
                }
            }
            if (enter < 0) break;
            int leave_row = -1;
            double best_ratio = 0.0;
            for (int i = 0; i < rows_; ++i) {
                if (tab_[i][enter] > kTol) {
                    const double ratio = tab_[i][n_] / tab_[i][enter];
                    if (leave_row < 0 || ratio < best_ratio - kTol ||
                        (std::abs(ratio - best_ratio) <= kTol &&
                         basis_[i] < basis_[leave_row])) {
                        leave_row = i;
                        best_ratio = ratio;
                    }
                }
            }
            if (leave_row < 0)
                throw std::runtime_error("SimplexTableau: unbounded direction on a compact domain");
            pivot(leave_row, enter);
        }
        double obj = 0.0;
        for (int i = 0; i < rows_; ++i) obj += cost[basis_[i]] * tab_[i][n_];
        return obj;
    }

    void pivot(int row, int col) {
        const double piv = tab_[row][col];
        for (double& v : tab_[row]) v /= piv;
        for (int i = 0; i < rows_; ++i) {
            if (i == row) continue;
            const double factor = tab_[i][col];
            if (factor == 0.0) continue;
            for (int j = 0; j <= n_; ++j) tab_[i][j] -= factor * tab_[row][j];
        }
        basis_[row] = col;
    }

    bool is_basic(int j) const {
        for (int i = 0; i < rows_; ++i)
            if (basis_[i] == j) return true;
        return false;
    }

    // Try to pivot the artificial variable out of the basis (it sits at zero).
    void evict_artificial() {
        static constexpr double kTol = 1e-9;
        for (int i = 0; i < rows_; ++i) {
            if (basis_[i] != artificial()) continue;
            for (int j = 0; j < artificial(); ++j) {
                if (std::abs(tab_[i][j]) > kTol) {
                    pivot(i, j);
                    return;
                }
            }
            return; // degenerate zero row; artificial stays basic at level 0
        }
    }

    Vec extract_mixture() const {
        Vec xi(K_, 0.0);
        for (int i = 0; i < rows_; ++i)
            if (basis_[i] < K_) xi[basis_[i]] = std::max(0.0, tab_[i][n_]);
        return xi;
    }

    int K() const { return K_; }
    int n() const { return n_; }

private:
    int K_, m_, n_, rows_;
    std::vector<Vec> tab_;
    std::vector<int> basis_;
};

} // namespace detail

inline LpSolution opt_lp(const LpInstance& inst) {
    inst.validate();
    static constexpr double kFeasTol = 1e-9;
    detail::SimplexTableau tab(inst);

    // Phase 1: drive the artificial variable of the mass constraint to zero.
    Vec phase1(tab.n(), 0.0);
    phase1[tab.artificial()] = -1.0;
    std::vector<bool> allow(tab.n(), true);
    const double neg_artificial = tab.maximize(phase1, allow);
    if (neg_artificial < -kFeasTol) return LpSolution{0.0, Vec(), LpStatus::Infeasible};
    tab.evict_artificial();

    // Phase 2: maximize the reward, artificial column locked out.
    Vec phase2(tab.n(), 0.0);
    for (int a = 0; a < tab.K(); ++a) phase2[a] = inst.f_bar[a];
    allow[tab.artificial()] = false;
    tab.maximize(phase2, allow);

    LpSolution sol;
    sol.mixture = tab.extract_mixture();
    sol.value = 0.0;
    for (int a = 0; a < tab.K(); ++a) sol.value += inst.f_bar[a] * sol.mixture[a];
    sol.status = LpStatus::Optimal;
    return sol;
}

// Brute-force verification oracle: exhaustive search over the simplex grid
// with the given step. Exponential in K; test-only, K <= 5.
inline std::optional<double> opt_lp_oracle(const LpInstance& inst, double grid_step) {
    inst.validate();
    if (inst.num_actions() > 5)
        throw std::invalid_argument("opt_lp_oracle: K must be <= 5 (exponential search)");
    if (!(grid_step > 0.0 && grid_step <= 1.0))
        throw std::invalid_argument("opt_lp_oracle: grid step must be in (0, 1]");
    const int K = inst.num_actions();
    const int m = inst.num_resources();
    const int N = static_cast<int>(std::lround(1.0 / grid_step));

    Vec suffix_max_f(K + 1, 0.0);
    for (int a = K - 1; a >= 0; --a)
        suffix_max_f[a] = std::max(suffix_max_f[a + 1], inst.f_bar[a]);

    std::optional<double> best;
    Vec cost_acc(m, 0.0);

    auto feasible = [&](const Vec& cost) {
        for (int i = 0; i < m; ++i)
            if (cost[i] > inst.rho + 1e-9) return false;
        return true;
    };

    // depth-first over unit allocations; arm a receives k/N mass
    auto rec = [&](auto&& self, int a, int units_left, double obj) -> void {
        if (a == K - 1) {
            const double w = units_left * grid_step;
            Vec cost = cost_acc;
            for (int i = 0; i < m; ++i) cost[i] += w * inst.c_bar(a, i);
            const double value = obj + w * inst.f_bar[a];
            if (feasible(cost) && (!best || value > *best)) best = value;
            return;
        }
        if (best && obj + units_left * grid_step * suffix_max_f[a] <= *best) return;
        for (int k = 0; k <= units_left; ++k) {
            const double w = k * grid_step;
            for (int i = 0; i < m; ++i) cost_acc[i] += w * inst.c_bar(a, i);
            self(self, a + 1, units_left - k, obj + w * inst.f_bar[a]);
            for (int i = 0; i < m; ++i) cost_acc[i] -= w * inst.c_bar(a, i);
        }
    };
    rec(rec, 0, N, 0.0);
    return best;
}

// Plug-in estimate of (f_bar, c_bar) from sampled rounds.
inline std::pair<Vec, Mat> empirical_means(const std::vector<InputPair>& sample) {
    if (sample.empty()) throw std::invalid_argument("empirical_means: empty sample");
    const int K = sample.front().num_actions();
    const int m = sample.front().num_resources();
    Vec f_bar(K, 0.0);
    Mat c_bar(K, m, 0.0);
    for (const InputPair& pair : sample) {
        if (pair.num_actions() != K || pair.num_resources() != m)
            throw std::invalid_argument("empirical_means: inconsistent sample dimensions");
        for (int a = 0; a < K; ++a) {
            f_bar[a] += pair.reward[a];
            for (int i = 0; i < m; ++i) c_bar(a, i) += pair.cost(a, i);
        }
    }
    const double inv = 1.0 / static_cast<double>(sample.size());
    for (double& f : f_bar) f *= inv;
    for (double& c : c_bar.data) c *= inv;
    return {std::move(f_bar), std::move(c_bar)};
}

// LP instance from an environment's declared means.
inline LpInstance lp_from_env(const Environment& env, double rho) {
    if (!env.has_means())
        throw std::invalid_argument("lp_from_env: environment exposes no means");
    LpInstance inst;
    env.means(inst.f_bar, inst.c_bar);
    inst.rho = rho;
    inst.validate();
    return inst;
}

} // namespace bwrk

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "redraft/core.hpp"
#include "redraft/oracle.hpp"

namespace redraft {

struct PassAtKInput {
    int n = 0;  // samples per task
    int c = 0;  // correct samples
    int k = 0;  // selection size
};

// 1 - C(n-c,k)/C(n,k) via the stable product form. Throws std::domain_error
// on invariant violation (0 <= c <= n, 1 <= k <= n).
double pass_at_k(const PassAtKInput& input);

// Mean of per-task pass@k. Throws std::domain_error on empty input.
double suite_pass_at_k(const std::vector<std::pair<int, int>>& per_task_counts, int k);

struct AccuracyCurve {
    std::vector<double> fractions;  // indexed by iteration 0..T
    std::vector<int> excluded;      // unknown-verdict exclusions per iteration
};

// Accuracy at iteration i = fraction of tasks whose current solution at i is
// correct; early-stopped trajectories carry their final solution forward.
// Throws std::domain_error on an empty trajectory set.
AccuracyCurve accuracy_curve(const std::vector<Trajectory>& trajectories,
                             const VerdictMap& verdicts, int cap);

struct RunComparison {
    // (initial correct, final correct) per task; unknowns excluded upstream
    std::vector<std::pair<bool, bool>> pairs;
    int excluded_unknown = 0;
};

struct ImprovementRegression {
    std::optional<double> r_imp;  // nullopt = not-applicable (no initially-incorrect)
    std::optional<double> r_reg;  // nullopt = not-applicable (no initially-correct)
};

ImprovementRegression improvement_regression(const RunComparison& comparison);

struct RecallOnDraft {
    double accuracy = 0.0;
    std::optional<double> recall;  // nullopt when truth has no Redraft
};

// truth restricted to {Refine, Redraft}. Throws std::domain_error on length
// mismatch or out-of-vocabulary truth.
RecallOnDraft recall_on_draft(const std::vector<Action>& truth,
                              const std::vector<Action>& annotations);

// Average ranks for ties, then Pearson over the rank vectors. nullopt when a
// list is constant. Throws std::domain_error on length mismatch or n < 2.
std::optional<double> spearman_rho(const std::vector<double>& scores_a,
                                   const std::vector<double>& scores_b);

struct ActionCounts {
    std::map<Action, int> counts;
    int of(Action a) const {
        auto it = counts.find(a);
        return it == counts.end() ? 0 : it->second;
    }
};

std::map<Strategy, ActionCounts> action_counts(const std::vector<Trajectory>& trajectories);

}  // namespace redraft

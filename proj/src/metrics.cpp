#include "redraft/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace redraft {

double pass_at_k(const PassAtKInput& in) {
    if (in.c < 0 || in.c > in.n || in.k < 1 || in.k > in.n)
        throw std::domain_error("pass_at_k: invalid (n, c, k)");
    if (in.n - in.c < in.k) return 1.0;
    // 1 - prod_{i=0}^{k-1} (n-c-i)/(n-i)
    double prod = 1.0;
    for (int i = 0; i < in.k; ++i)
        prod *= double(in.n - in.c - i) / double(in.n - i);
    return 1.0 - prod;
}

double suite_pass_at_k(const std::vector<std::pair<int, int>>& per_task_counts, int k) {
    if (per_task_counts.empty())
        throw std::domain_error("suite_pass_at_k: empty task list");
    double sum = 0.0;
    for (auto [n, c] : per_task_counts) sum += pass_at_k({n, c, k});
    return sum / double(per_task_counts.size());
}

AccuracyCurve accuracy_curve(const std::vector<Trajectory>& trajectories,
                             const VerdictMap& verdicts, int cap) {
    if (trajectories.empty())
        throw std::domain_error("accuracy_curve: empty trajectory set");
    AccuracyCurve curve;
    curve.fractions.resize(cap + 1, 0.0);
    curve.excluded.resize(cap + 1, 0);
    for (int i = 0; i <= cap; ++i) {
        int correct = 0, known = 0;
        for (const auto& t : trajectories) {
            if (t.solutions.empty()) {
                ++curve.excluded[i];
                continue;
            }
            // carry the final solution forward past early stops
            int idx = std::min<int>(i, static_cast<int>(t.solutions.size()) - 1);
            auto it = verdicts.find({t.task_id, t.solutions[idx].index});
            if (it == verdicts.end() || it->second == Verdict::Unknown) {
                ++curve.excluded[i];
                continue;
            }
            ++known;
            if (it->second == Verdict::Correct) ++correct;
        }
        curve.fractions[i] = known == 0 ? 0.0 : double(correct) / double(known);
    }
    return curve;
}

ImprovementRegression improvement_regression(const RunComparison& comparison) {
    int init_incorrect = 0, improved = 0, init_correct = 0, regressed = 0;
    for (auto [initial, final_ok] : comparison.pairs) {
        if (initial) {
            ++init_correct;
            if (!final_ok) ++regressed;
        } else {
            ++init_incorrect;
            if (final_ok) ++improved;
        }
    }
    ImprovementRegression out;
    if (init_incorrect > 0) out.r_imp = double(improved) / double(init_incorrect);
    if (init_correct > 0) out.r_reg = double(regressed) / double(init_correct);
    return out;
}

RecallOnDraft recall_on_draft(const std::vector<Action>& truth,
                              const std::vector<Action>& annotations) {
    if (truth.size() != annotations.size())
        throw std::domain_error("recall_on_draft: length mismatch");
    int match = 0, drafts = 0, draft_hits = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] == Action::Pass)
            throw std::domain_error("recall_on_draft: truth outside {refine, redraft}");
        if (truth[i] == annotations[i]) ++match;
        if (truth[i] == Action::Redraft) {
            ++drafts;
            if (annotations[i] == Action::Redraft) ++draft_hits;
        }
    }
    RecallOnDraft out;
    out.accuracy = truth.empty() ? 0.0 : double(match) / double(truth.size());
    if (drafts > 0) out.recall = double(draft_hits) / double(drafts);
    return out;
}

namespace {

// average ranks (1-based) with ties sharing the mean rank
std::vector<double> average_ranks(const std::vector<double>& scores) {
    const std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        double avg = (double(i + 1) + double(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

}  // namespace

std::optional<double> spearman_rho(const std::vector<double>& scores_a,
                                   const std::vector<double>& scores_b) {
    if (scores_a.size() != scores_b.size())
        throw std::domain_error("spearman_rho: length mismatch");
    const std::size_t n = scores_a.size();
    if (n < 2) throw std::domain_error("spearman_rho: needs at least 2 points");

    auto ra = average_ranks(scores_a);
    auto rb = average_ranks(scores_b);
    double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / double(n);
    double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / double(n);
    double num = 0, da = 0, db = 0;
    for (std::size_t i = 0; i < n; ++i) {
        num += (ra[i] - ma) * (rb[i] - mb);
        da += (ra[i] - ma) * (ra[i] - ma);
        db += (rb[i] - mb) * (rb[i] - mb);
    }
    if (da == 0.0 || db == 0.0) return std::nullopt;  // constant list
    return num / std::sqrt(da * db);
}

std::map<Strategy, ActionCounts> action_counts(const std::vector<Trajectory>& trajectories) {
    std::map<Strategy, ActionCounts> out;
    out[Strategy::SelfRefine];
    out[Strategy::SelfRedraft];
    for (const auto& t : trajectories)
        for (const auto& fb : t.feedbacks) ++out[t.strategy].counts[fb.action];
    return out;
}

}  // namespace redraft

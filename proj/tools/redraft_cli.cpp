// Operator entry point: run the iterative loops, grade solutions, report
// metrics, and run the blinded evaluation.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "redraft/blind.hpp"
#include "redraft/core.hpp"
#include "redraft/metrics.hpp"
#include "redraft/oracle.hpp"
#include "redraft/orchestrator.hpp"
#include "redraft/parser.hpp"
#include "redraft/prompts.hpp"
#include "redraft/provider.hpp"
#include "redraft/store.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace redraft;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<Task> load_tasks(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read task suite: " + path);
    std::vector<Task> tasks;
    std::set<std::string> seen;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json rec = json::parse(line);
        Task t{rec.at("id").get<std::string>(), rec.at("statement").get<std::string>(),
               difficulty_from_string(rec.value("difficulty", "unknown"))};
        if (t.id.empty() || t.statement.empty())
            throw UsageError(path + ":" + std::to_string(lineno) +
                             ": task id and statement must be nonempty");
        if (!seen.insert(t.id).second)
            throw UsageError(path + ":" + std::to_string(lineno) +
                             ": duplicate task id " + t.id);
        tasks.push_back(std::move(t));
    }
    if (tasks.empty()) throw UsageError("task suite is empty: " + path);
    return tasks;
}

std::string suite_fingerprint(const std::vector<Task>& tasks) {
    std::string blob;
    for (const auto& t : tasks) blob += t.id + "\x1f" + t.statement + "\x1e";
    return fingerprint(blob);
}

std::string fmt(double v) {
    char buf[32];
    snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

std::string fmt_opt(const std::optional<double>& v) {
    return v ? fmt(*v) : std::string("n/a");
}

PromptBundle load_prompts(const std::string& prompts_dir) {
    return prompts_dir.empty() ? PromptBundle::builtin() : PromptBundle::load(prompts_dir);
}

// ---- run --------------------------------------------------------------------

struct RunArgs {
    std::string tasks_path;
    std::string strategy = "both";
    int max_iter = 16;
    int samples = 16;
    int pass_k = 8;
    std::string provider = "scripted";
    std::string scenario_path;
    std::uint64_t seed = 0;
    int concurrency = 4;
    std::string run_dir;
    bool resume = false;
    bool no_pool = false;
    std::string prompts_dir;
    // live provider
    std::string base_url;
    std::string model = "scripted";
    std::string api_key_env = "OPENAI_API_KEY";
    int max_tokens = 0;
    double temperature = 0.2;
    double top_p = 0.95;
};

std::unique_ptr<ChatProvider> make_provider(const std::string& kind,
                                            const std::string& scenario_path,
                                            const std::string& base_url,
                                            const std::string& api_key_env) {
    if (kind == "scripted") {
        if (scenario_path.empty())
            throw UsageError("--provider scripted requires --scenario PATH");
        return std::make_unique<ScriptedProvider>(ScriptScenario::load(scenario_path));
    }
    if (base_url.empty()) throw UsageError("--provider live requires --base-url");
    LiveProviderConfig cfg;
    cfg.base_url = base_url;
    if (const char* key = std::getenv(api_key_env.c_str())) cfg.api_key = key;
    return std::make_unique<LiveProvider>(cfg);
}

int cmd_run(const RunArgs& args) {
    std::vector<Strategy> strategies;
    if (args.strategy == "both")
        strategies = {Strategy::SelfRefine, Strategy::SelfRedraft};
    else if (auto s = strategy_from_string(args.strategy))
        strategies = {*s};
    else
        throw UsageError("unknown strategy: " + args.strategy);

    RunConfig config;
    config.strategy = strategies.front();
    config.max_iterations = args.max_iter;
    config.samples_n = args.samples;
    config.pass_k = args.pass_k;
    config.seed = args.seed;
    config.concurrency = args.concurrency;
    config.model_name = args.model;
    config.temperature = args.temperature;
    config.top_p = args.top_p;
    if (args.max_tokens > 0) config.max_tokens = args.max_tokens;
    if (auto violations = validate_config(config); !violations.empty()) {
        std::string msg = "invalid config:";
        for (const auto& v : violations) msg += " " + v;
        throw UsageError(msg);
    }

    auto tasks = load_tasks(args.tasks_path);
    auto prompts = load_prompts(args.prompts_dir);
    auto provider =
        make_provider(args.provider, args.scenario_path, args.base_url, args.api_key_env);

    std::optional<RunStore> store;
    if (args.resume) {
        store.emplace(RunStore::open(args.run_dir));
        if (store->manifest().suite_fingerprint != suite_fingerprint(tasks))
            throw UsageError("--resume: task suite does not match the stored run");
    } else {
        RunManifest manifest;
        manifest.run_id = fs::path(args.run_dir).filename().string();
        manifest.config = config;
        manifest.suite_fingerprint = suite_fingerprint(tasks);
        manifest.tasks = tasks;
        manifest.strategies = strategies;
        store.emplace(RunStore::create(args.run_dir, manifest));
    }

    auto pending = store->resume();
    std::map<std::string, Task> by_id;
    for (const auto& t : tasks) by_id[t.id] = t;

    // initial sample pool; sample 0 is the shared y0 for both strategies
    std::map<std::string, Solution> initials;
    if (!args.no_pool) {
        auto existing = store->load().pool;
        for (const auto& task : tasks) {
            auto it = existing.find(task.id);
            std::vector<Solution> pool_solutions;
            if (it != existing.end() && !it->second.empty()) {
                pool_solutions = it->second;
            } else {
                Orchestrator orch(*provider, prompts, config);
                auto pool = orch.sample_initial_pool(task);
                for (const auto& s : pool.solutions)
                    store->append_pool_entry(task.id, s);
                for (int idx : pool.failed_indices)
                    std::cerr << "warning: pool sample " << idx << " for task " << task.id
                              << " failed\n";
                pool_solutions = pool.solutions;
            }
            if (!pool_solutions.empty() && pool_solutions.front().index == 0)
                initials[task.id] = pool_solutions.front();
        }
    }

    int errors = 0, defaulted = 0;
    for (auto strategy : strategies) {
        std::vector<Task> todo;
        for (const auto& item : pending)
            if (item.strategy == strategy) todo.push_back(by_id.at(item.task_id));
        if (todo.empty()) continue;

        RunConfig cfg = config;
        cfg.strategy = strategy;
        Orchestrator orch(*provider, prompts, cfg);
        auto trajectories = orch.run_suite(todo, initials, [&](const Trajectory& t) {
            store->append_trajectory(t);
        });
        for (const auto& t : trajectories) {
            if (t.terminated_by == Termination::Error) {
                ++errors;
                std::cerr << "task " << t.task_id << " [" << to_string(strategy)
                          << "]: error-terminated\n";
            }
            for (const auto& fb : t.feedbacks)
                for (const auto& flag : fb.parse_flags)
                    if (flag == "action-defaulted") ++defaulted;
        }
    }

    std::cout << "run " << store->manifest().run_id << ": " << pending.size()
              << " work items processed, " << errors << " errors";
    if (defaulted > 0) std::cout << ", " << defaulted << " defaulted feedback actions";
    std::cout << "\n";
    return errors == 0 ? kExitOk : kExitRuntime;
}

// ---- grade ------------------------------------------------------------------

struct GradeArgs {
    std::string run_dir;
    std::string verdicts_path;
    std::string checker;
    int timeout_seconds = 30;
    int concurrency = 4;
};

int cmd_grade(const GradeArgs& args) {
    if (args.verdicts_path.empty() == args.checker.empty())
        throw UsageError("grade needs exactly one of --verdicts PATH or --checker CMD");

    auto store = RunStore::open(args.run_dir);
    auto data = store.load();

    std::unique_ptr<VerdictOracle> oracle;
    if (!args.verdicts_path.empty()) {
        oracle = std::make_unique<VerdictFileOracle>(
            VerdictFileOracle::load(args.verdicts_path));
    } else {
        std::map<std::string, std::string> statements;
        for (const auto& t : data.manifest.tasks) statements[t.id] = t.statement;
        oracle = std::make_unique<CommandOracle>(args.checker, statements,
                                                 args.run_dir + "/checker_work",
                                                 args.timeout_seconds, args.concurrency);
    }

    // every stored solution: trajectories plus initial pools
    std::map<std::pair<std::string, std::string>, const Solution*> todo;
    for (const auto& t : data.trajectories)
        for (const auto& s : t.solutions) todo[{t.task_id, fingerprint(s.code)}] = &s;
    for (const auto& [task_id, solutions] : data.pool)
        for (const auto& s : solutions) todo[{task_id, fingerprint(s.code)}] = &s;

    int unknowns = 0;
    for (const auto& [key, solution] : todo) {
        if (data.verdicts.count(key)) continue;  // already graded
        Verdict v = oracle->judge(key.first, *solution);
        store.append_verdict(key.first, key.second, v);
        if (v == Verdict::Unknown) ++unknowns;
    }
    std::cout << "graded " << todo.size() << " distinct solutions, " << unknowns
              << " unknown\n";
    return kExitOk;
}

// ---- report -----------------------------------------------------------------

struct ReportArgs {
    std::vector<std::string> run_dirs;
    std::string out_dir;
};

struct StrategyStats {
    AccuracyCurve curve;
    ImprovementRegression imp_reg;
    int comparison_excluded = 0;
    double headline = 0.0;
    std::map<Difficulty, double> headline_by_difficulty;
};

Verdict lookup(const std::map<std::pair<std::string, std::string>, Verdict>& verdicts,
               const std::string& task_id, const Solution& s) {
    auto it = verdicts.find({task_id, fingerprint(s.code)});
    return it == verdicts.end() ? Verdict::Unknown : it->second;
}

VerdictMap verdict_map_for(const std::vector<Trajectory>& trajectories,
                           const RunData& data) {
    VerdictMap out;
    for (const auto& t : trajectories)
        for (const auto& s : t.solutions)
            out[{t.task_id, s.index}] = lookup(data.verdicts, t.task_id, s);
    return out;
}

double final_accuracy(const std::vector<Trajectory>& trajectories, const RunData& data,
                      const std::optional<Difficulty>& difficulty = {}) {
    std::map<std::string, Difficulty> diff;
    for (const auto& t : data.manifest.tasks) diff[t.id] = t.difficulty;
    int correct = 0, known = 0;
    for (const auto& t : trajectories) {
        if (t.solutions.empty()) continue;
        if (difficulty && diff[t.task_id] != *difficulty) continue;
        Verdict v = lookup(data.verdicts, t.task_id, final_solution(t));
        if (v == Verdict::Unknown) continue;
        ++known;
        correct += v == Verdict::Correct;
    }
    return known == 0 ? 0.0 : double(correct) / double(known);
}

int cmd_report(const ReportArgs& args) {
    fs::create_directories(args.out_dir);
    std::ostringstream report;

    std::ofstream curve_csv(args.out_dir + "/accuracy_curve.csv");
    curve_csv << "model,strategy,iteration,accuracy,excluded\n";
    std::ofstream headline_csv(args.out_dir + "/headline.csv");
    headline_csv << "model,strategy,final_accuracy\n";
    std::ofstream imp_reg_csv(args.out_dir + "/imp_reg.csv");
    imp_reg_csv << "model,strategy,r_imp,r_reg,excluded_unknown\n";
    std::ofstream pass_csv(args.out_dir + "/pass_at_k.csv");
    pass_csv << "model,k,pass_at_k,tasks\n";
    std::ofstream actions_csv(args.out_dir + "/actions.csv");
    actions_csv << "model,strategy,pass,refine,redraft\n";
    std::ofstream gain_csv(args.out_dir + "/gain.csv");
    gain_csv << "scope,gain\n";

    std::vector<double> model_gains;
    std::vector<double> cell_gains;

    for (const auto& dir : args.run_dirs) {
        auto store = RunStore::open(dir);
        auto data = store.load();
        const std::string& model = data.manifest.config.model_name;
        const int cap = data.manifest.config.max_iterations;

        if (data.verdicts.empty())
            throw std::runtime_error(
                "run " + dir + " has no verdicts; run the grade command first");

        report << "== model " << model << " (run " << data.manifest.run_id << ") ==\n";

        std::map<Strategy, double> final_acc;
        std::set<Difficulty> difficulties;
        for (const auto& t : data.manifest.tasks) difficulties.insert(t.difficulty);

        for (auto strategy : data.manifest.strategies) {
            std::vector<Trajectory> subset;
            for (const auto& t : data.trajectories)
                if (t.strategy == strategy && !t.solutions.empty()) subset.push_back(t);
            if (subset.empty()) continue;

            auto vm = verdict_map_for(subset, data);
            auto curve = accuracy_curve(subset, vm, cap);
            for (int i = 0; i <= cap; ++i)
                curve_csv << model << "," << to_string(strategy) << "," << i << ","
                          << fmt(curve.fractions[i]) << "," << curve.excluded[i] << "\n";

            RunComparison cmp;
            for (const auto& t : subset) {
                Verdict initial = lookup(data.verdicts, t.task_id, t.solutions.front());
                Verdict final_v = lookup(data.verdicts, t.task_id, final_solution(t));
                if (initial == Verdict::Unknown || final_v == Verdict::Unknown) {
                    ++cmp.excluded_unknown;
                    continue;
                }
                cmp.pairs.push_back(
                    {initial == Verdict::Correct, final_v == Verdict::Correct});
            }
            auto ir = improvement_regression(cmp);
            double headline = curve.fractions[cap];
            final_acc[strategy] = headline;

            headline_csv << model << "," << to_string(strategy) << "," << fmt(headline)
                         << "\n";
            imp_reg_csv << model << "," << to_string(strategy) << "," << fmt_opt(ir.r_imp)
                        << "," << fmt_opt(ir.r_reg) << "," << cmp.excluded_unknown << "\n";

            auto counts = action_counts(subset)[strategy];
            actions_csv << model << "," << to_string(strategy) << ","
                        << counts.of(Action::Pass) << "," << counts.of(Action::Refine)
                        << "," << counts.of(Action::Redraft) << "\n";

            report << "  " << to_string(strategy) << ": final accuracy " << fmt(headline)
                   << ", r_imp " << fmt_opt(ir.r_imp) << ", r_reg " << fmt_opt(ir.r_reg)
                   << " (excluded " << cmp.excluded_unknown << ")\n"
                   << "    actions pass/refine/redraft: " << counts.of(Action::Pass)
                   << "/" << counts.of(Action::Refine) << "/"
                   << counts.of(Action::Redraft) << "\n";
        }

        if (!data.pool.empty()) {
            std::vector<std::pair<int, int>> per_task;
            for (const auto& [task_id, solutions] : data.pool) {
                int c = 0;
                for (const auto& s : solutions)
                    c += lookup(data.verdicts, task_id, s) == Verdict::Correct;
                per_task.push_back({int(solutions.size()), c});
            }
            int k = data.manifest.config.pass_k;
            double p = suite_pass_at_k(per_task, k);
            pass_csv << model << "," << k << "," << fmt(p) << "," << per_task.size()
                     << "\n";
            report << "  pass@" << k << " over " << per_task.size()
                   << " task pools: " << fmt(p) << "\n";
        }

        if (final_acc.count(Strategy::SelfRedraft) && final_acc.count(Strategy::SelfRefine)) {
            double gain =
                final_acc[Strategy::SelfRedraft] - final_acc[Strategy::SelfRefine];
            model_gains.push_back(gain);
            report << "  gain (self_redraft - self_refine): " << fmt(gain) << "\n";

            std::vector<Trajectory> refine_ts, redraft_ts;
            for (const auto& t : data.trajectories) {
                if (t.solutions.empty()) continue;
                (t.strategy == Strategy::SelfRefine ? refine_ts : redraft_ts).push_back(t);
            }
            for (auto d : difficulties)
                cell_gains.push_back(final_accuracy(redraft_ts, data, d) -
                                     final_accuracy(refine_ts, data, d));
        }
    }

    if (!model_gains.empty()) {
        double over_models =
            std::accumulate(model_gains.begin(), model_gains.end(), 0.0) /
            double(model_gains.size());
        double over_cells =
            std::accumulate(cell_gains.begin(), cell_gains.end(), 0.0) /
            double(cell_gains.size());
        gain_csv << "mean_over_models," << fmt(over_models) << "\n";
        gain_csv << "mean_over_model_difficulty_cells," << fmt(over_cells) << "\n";
        report << "== average absolute gain ==\n"
               << "  over models: " << fmt(over_models) << "\n"
               << "  over (model, difficulty) cells: " << fmt(over_cells) << "\n";
    }

    // blinded-eval tables, when cmd_blind has run
    std::map<std::string, std::map<std::string, GeneratorScore>> by_annotator;
    for (const auto& dir : args.run_dirs) {
        auto data = RunStore::open(dir).load();
        if (data.blind_samples.empty()) continue;
        std::map<std::pair<std::string, int>, std::size_t> index;
        for (std::size_t i = 0; i < data.blind_samples.size(); ++i)
            index[{data.blind_samples[i].task_id, data.blind_samples[i].iteration}] = i;
        std::map<std::string, std::vector<std::optional<Action>>> labels;
        for (const auto& ann : data.annotations) {
            auto& slots = labels[ann.annotator_id];
            slots.resize(data.blind_samples.size());
            auto it = index.find({ann.task_id, ann.iteration});
            if (it != index.end()) slots[it->second] = ann.label;
        }
        for (auto& [annotator, slots] : labels) {
            slots.resize(data.blind_samples.size());
            auto scores = score(data.blind_samples, slots);
            for (auto& [gen, s] : scores) by_annotator[annotator][gen] = s;
        }
    }
    if (!by_annotator.empty()) {
        std::ofstream blind_csv(args.out_dir + "/blind.csv");
        blind_csv << "annotator,generator,accuracy,recall_on_draft,scored,failures\n";
        report << "== blinded evaluation ==\n";
        std::set<std::string> generator_set;
        for (const auto& [annotator, scores] : by_annotator)
            for (const auto& [gen, s] : scores) {
                generator_set.insert(gen);
                blind_csv << annotator << "," << gen << "," << fmt(s.result.accuracy)
                          << "," << fmt_opt(s.result.recall) << "," << s.scored << ","
                          << s.annotation_failures << "\n";
                report << "  " << annotator << " / " << gen << ": accuracy "
                       << fmt(s.result.accuracy) << ", recall on draft "
                       << fmt_opt(s.result.recall) << "\n";
            }
        if (by_annotator.size() >= 2) {
            // agreement between annotator-induced generator rankings
            std::map<std::string, std::vector<double>> recalls;
            for (const auto& [annotator, scores] : by_annotator)
                for (const auto& gen : generator_set) {
                    auto it = scores.find(gen);
                    recalls[annotator].push_back(
                        it != scores.end() && it->second.result.recall
                            ? *it->second.result.recall
                            : 0.0);
                }
            std::ofstream spearman_csv(args.out_dir + "/spearman.csv");
            spearman_csv << "annotator_a,annotator_b,rho\n";
            report << "== annotator rank agreement (spearman) ==\n";
            for (const auto& [a, ra] : recalls)
                for (const auto& [b, rb] : recalls) {
                    std::string rho = generator_set.size() < 2
                                          ? "n/a"
                                          : fmt_opt(spearman_rho(ra, rb));
                    spearman_csv << a << "," << b << "," << rho << "\n";
                    report << "  " << a << " vs " << b << ": " << rho << "\n";
                }
        }
    }

    std::ofstream out(args.out_dir + "/report.txt");
    out << report.str();
    std::cout << report.str();
    std::cout << "report written to " << args.out_dir << "\n";
    return kExitOk;
}

// ---- blind ------------------------------------------------------------------

struct BlindArgs {
    std::vector<std::string> run_dirs;
    int cap = 1000;
    std::uint64_t seed = 0;
    std::vector<std::string> annotators;  // name=scenario_path
    std::string prompts_dir;
    int concurrency = 4;
};

int cmd_blind(const BlindArgs& args) {
    if (args.annotators.empty())
        throw UsageError("blind needs at least one --annotator NAME=SCENARIO");

    auto prompts = load_prompts(args.prompts_dir);

    std::vector<RunStore> stores;
    for (const auto& dir : args.run_dirs) stores.push_back(RunStore::open(dir));

    std::vector<EvalPair> all_pairs;
    std::map<std::string, std::size_t> store_of_generator;
    for (std::size_t i = 0; i < stores.size(); ++i) {
        auto data = stores[i].load();
        std::vector<Trajectory> redraft_ts;
        for (const auto& t : data.trajectories)
            if (t.strategy == Strategy::SelfRedraft) redraft_ts.push_back(t);
        auto pairs = eligible_pairs(redraft_ts, data.manifest.config.model_name);
        store_of_generator[data.manifest.config.model_name] = i;
        all_pairs.insert(all_pairs.end(), pairs.begin(), pairs.end());
    }

    auto sample = sample_balanced(all_pairs, args.cap, args.seed);
    for (const auto& gen : sample.excluded_generators)
        std::cerr << "note: generator " << gen
                  << " excluded (no redraft pairs available)\n";
    if (sample.pairs.empty()) {
        std::cerr << "no eligible redraft pairs in any run; nothing to evaluate\n";
        return kExitRuntime;
    }
    for (const auto& p : sample.pairs)
        stores[store_of_generator.at(p.generator_id)].append_blind_sample(p);

    std::map<std::string, std::map<std::string, GeneratorScore>> results;
    for (const auto& entry : args.annotators) {
        auto eq = entry.find('=');
        if (eq == std::string::npos)
            throw UsageError("--annotator expects NAME=SCENARIO, got: " + entry);
        std::string name = entry.substr(0, eq);
        ScriptedProvider aux(ScriptScenario::load(entry.substr(eq + 1)));

        AnnotateOptions opts;
        opts.model_name = name;
        opts.concurrency = args.concurrency;
        auto labels = annotate(sample.pairs, aux, prompts, opts);
        for (std::size_t i = 0; i < sample.pairs.size(); ++i) {
            const auto& p = sample.pairs[i];
            AnnotationRecord rec{name, p.generator_id, p.task_id, p.iteration,
                                 labels[i], ""};
            stores[store_of_generator.at(p.generator_id)].append_annotation(rec);
        }
        results[name] = score(sample.pairs, labels);
    }

    std::cout << "annotator,generator,accuracy,recall_on_draft,scored,failures\n";
    for (const auto& [annotator, scores] : results)
        for (const auto& [gen, s] : scores)
            std::cout << annotator << "," << gen << "," << fmt(s.result.accuracy) << ","
                      << fmt_opt(s.result.recall) << "," << s.scored << ","
                      << s.annotation_failures << "\n";

    // pairwise Spearman over the evaluator-induced generator rankings
    if (results.size() >= 2) {
        std::vector<std::string> generators;
        for (const auto& [gen, idx] : store_of_generator) generators.push_back(gen);
        std::vector<std::string> annotators;
        std::map<std::string, std::vector<double>> recalls;
        for (const auto& [annotator, scores] : results) {
            annotators.push_back(annotator);
            for (const auto& gen : generators) {
                auto it = scores.find(gen);
                recalls[annotator].push_back(
                    it != scores.end() && it->second.result.recall
                        ? *it->second.result.recall
                        : 0.0);
            }
        }
        std::cout << "spearman matrix (" << generators.size() << " generators):\n";
        for (const auto& a : annotators) {
            for (const auto& b : annotators) {
                if (generators.size() < 2) {
                    std::cout << " n/a";
                    continue;
                }
                auto rho = spearman_rho(recalls[a], recalls[b]);
                std::cout << " " << fmt_opt(rho);
            }
            std::cout << "  # " << a << "\n";
        }
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Execution-free iterative code generation harness"};
    app.require_subcommand(1);

    RunArgs run_args;
    auto* run = app.add_subcommand("run", "execute the iterative loop over a task suite");
    run->add_option("--tasks", run_args.tasks_path, "task suite (JSONL)")->required();
    run->add_option("--strategy", run_args.strategy)
        ->check(CLI::IsMember({"self_refine", "self_redraft", "both"}));
    run->add_option("--max-iter", run_args.max_iter);
    run->add_option("--samples", run_args.samples);
    run->add_option("--pass-k", run_args.pass_k);
    run->add_option("--provider", run_args.provider)
        ->check(CLI::IsMember({"live", "scripted"}));
    run->add_option("--scenario", run_args.scenario_path);
    run->add_option("--seed", run_args.seed);
    run->add_option("--concurrency", run_args.concurrency);
    run->add_option("--run-dir", run_args.run_dir)->required();
    run->add_flag("--resume", run_args.resume);
    run->add_flag("--no-pool", run_args.no_pool, "skip the initial sample pool");
    run->add_option("--prompts", run_args.prompts_dir, "prompt template directory");
    run->add_option("--base-url", run_args.base_url);
    run->add_option("--model", run_args.model);
    run->add_option("--api-key-env", run_args.api_key_env);
    run->add_option("--max-tokens", run_args.max_tokens);
    run->add_option("--temperature", run_args.temperature);
    run->add_option("--top-p", run_args.top_p);

    GradeArgs grade_args;
    auto* grade = app.add_subcommand("grade", "judge every stored solution");
    grade->add_option("--run-dir", grade_args.run_dir)->required();
    grade->add_option("--verdicts", grade_args.verdicts_path, "verdict file (JSONL)");
    grade->add_option("--checker", grade_args.checker, "external checker executable");
    grade->add_option("--checker-timeout", grade_args.timeout_seconds);
    grade->add_option("--concurrency", grade_args.concurrency);

    ReportArgs report_args;
    auto* report = app.add_subcommand("report", "emit metric tables and curves");
    report->add_option("--run-dir", report_args.run_dirs)->required();
    report->add_option("--out", report_args.out_dir)->required();

    BlindArgs blind_args;
    auto* blind = app.add_subcommand("blind", "blinded refine-vs-redraft evaluation");
    blind->add_option("--run-dir", blind_args.run_dirs)->required();
    blind->add_option("--cap", blind_args.cap);
    blind->add_option("--seed", blind_args.seed);
    blind->add_option("--annotator", blind_args.annotators,
                      "NAME=SCENARIO scripted auxiliary (repeatable)");
    blind->add_option("--prompts", blind_args.prompts_dir);
    blind->add_option("--concurrency", blind_args.concurrency);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (run->parsed()) return cmd_run(run_args);
        if (grade->parsed()) return cmd_grade(grade_args);
        if (report->parsed()) return cmd_report(report_args);
        if (blind->parsed()) return cmd_blind(blind_args);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}

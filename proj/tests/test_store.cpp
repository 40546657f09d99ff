#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "redraft/store.hpp"

using namespace redraft;

namespace {

std::string make_temp_dir() {
    char tmpl[] = "/tmp/redraft_store_XXXXXX";
    std::string dir = mkdtemp(tmpl);
    return dir + "/run";
}

Trajectory sample_trajectory(const std::string& task_id, int rounds) {
    Trajectory t;
    t.task_id = task_id;
    t.strategy = Strategy::SelfRedraft;
    for (int i = 0; i <= rounds; ++i) {
        t.solutions.push_back({i, "code " + std::to_string(i), "raw ```\ncode```"});
        if (i < rounds) {
            Feedback f;
            f.critique = "critique " + std::to_string(i);
            f.action = i % 2 ? Action::Redraft : Action::Refine;
            t.feedbacks.push_back(f);
        }
        IterationEvent e{i, i < rounds ? "feedback" : "regeneration",
                         "prompt " + std::to_string(i), "response " + std::to_string(i),
                         "ok", 1000 + i};
        t.events.push_back(e);
        if (i < rounds)
            t.events.push_back({i, "regeneration", "p", "r", "ok", 2000 + i});
    }
    t.terminated_by = Termination::MaxIterations;
    return t;
}

RunManifest sample_manifest(int n_tasks) {
    RunManifest m;
    m.run_id = "run-1";
    m.config = RunConfig{};
    m.suite_fingerprint = "fp";
    for (int i = 0; i < n_tasks; ++i)
        m.tasks.push_back({"task" + std::to_string(i), "statement", Difficulty::Easy});
    m.strategies = {Strategy::SelfRedraft};
    return m;
}

}  // namespace

TEST_CASE("trajectory serialization round-trip is lossless") {
    std::mt19937 rng(3);
    for (int trial = 0; trial < 25; ++trial) {
        Trajectory t = sample_trajectory("t" + std::to_string(trial), int(rng() % 6));
        if (rng() % 2) {
            t.terminated_by = Termination::Pass;
            Feedback pass_fb;
            pass_fb.action = Action::Pass;
            pass_fb.parse_flags = {"missing-critique-tag"};
            t.feedbacks.push_back(pass_fb);
        }
        Trajectory back = trajectory_from_json(to_json(t, "run"));
        CHECK(back == t);
    }
}

TEST_CASE("16-round trajectory round-trips with all texts intact") {
    Trajectory t = sample_trajectory("t", 16);
    Trajectory back = trajectory_from_json(to_json(t, "run"));
    CHECK(back == t);
    CHECK(back.events.size() == t.events.size());
}

TEST_CASE("config serialization round-trip and defaults") {
    RunConfig c;
    RunConfig back = config_from_json(to_json(c));
    CHECK(back.max_iterations == 16);
    CHECK(back.temperature == 0.2);
    CHECK(back.top_p == 0.95);
    CHECK(back.samples_n == 16);
    CHECK(back.pass_k == 8);
    CHECK(!back.max_tokens.has_value());
    c.max_tokens = 2048;
    c.history_window = 4;
    back = config_from_json(to_json(c));
    CHECK(back.max_tokens == 2048);
    CHECK(back.history_window == 4);
}

TEST_CASE("store append, duplicate rejection, resume") {
    auto dir = make_temp_dir();
    auto manifest = sample_manifest(10);
    {
        auto store = RunStore::create(dir, manifest);
        for (int i = 0; i < 7; ++i)
            store.append_trajectory(sample_trajectory("task" + std::to_string(i), 2));
        CHECK_THROWS(store.append_trajectory(sample_trajectory("task0", 1)));
        auto pending = store.resume();
        CHECK(pending.size() == 3);
    }
    auto reopened = RunStore::open(dir);
    auto pending = reopened.resume();
    REQUIRE(pending.size() == 3);
    CHECK(pending[0].task_id == "task7");

    auto data = reopened.load();
    CHECK(data.trajectories.size() == 7);
    CHECK(data.trajectories[0] == sample_trajectory("task0", 2));
}

TEST_CASE("fresh run loads manifest only; unknown run errors") {
    auto dir = make_temp_dir();
    {
        auto store = RunStore::create(dir, sample_manifest(2));
        auto data = store.load();
        CHECK(data.trajectories.empty());
        CHECK(data.verdicts.empty());
        CHECK(data.manifest.run_id == "run-1");
        CHECK(store.resume().size() == 2);
    }
    CHECK_THROWS(RunStore::open("/tmp/redraft_no_such_run"));
}

TEST_CASE("schema version gate") {
    nlohmann::json j = to_json(sample_trajectory("t", 1), "run");
    j["schema_version"] = 2;
    CHECK_THROWS(trajectory_from_json(j));
}

TEST_CASE("truncation mid-record re-pends only that task") {
    auto dir = make_temp_dir();
    {
        auto store = RunStore::create(dir, sample_manifest(3));
        for (int i = 0; i < 3; ++i)
            store.append_trajectory(sample_trajectory("task" + std::to_string(i), 2));
        CHECK(store.resume().empty());
    }
    // chop the file mid-way through the final record
    std::string path = dir + "/trajectories.jsonl";
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    std::string content = ss.str();
    in.close();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content.substr(0, content.size() - 40);
    out.close();

    auto store = RunStore::open(dir);
    auto pending = store.resume();
    REQUIRE(pending.size() == 1);
    CHECK(pending[0].task_id == "task2");
    // earlier records untouched
    auto data = store.load();
    CHECK(data.trajectories.size() == 2);
    CHECK(data.trajectories[0] == sample_trajectory("task0", 2));
    // and the re-pended task can be appended again
    store.append_trajectory(sample_trajectory("task2", 2));
    CHECK(store.resume().empty());
}

TEST_CASE("verdict, pool, blind-sample and annotation records round-trip") {
    auto dir = make_temp_dir();
    auto store = RunStore::create(dir, sample_manifest(1));
    store.append_verdict("task0", "abcd", Verdict::Correct);
    store.append_pool_entry("task0", {0, "c0", "r0"});
    store.append_pool_entry("task0", {1, "c1", "r1"});
    EvalPair pair;
    pair.generator_id = "gen";
    pair.task_id = "task0";
    pair.iteration = 3;
    pair.original = {3, "a", "ra"};
    pair.regenerated = {4, "b", "rb"};
    pair.truth_action = Action::Redraft;
    store.append_blind_sample(pair);
    AnnotationRecord ann{"aux", "gen", "task0", 3, Action::Refine, "<suggestion>refine</suggestion>"};
    store.append_annotation(ann);
    AnnotationRecord failed{"aux", "gen", "task0", 4, std::nullopt, "garbage"};
    store.append_annotation(failed);

    auto data = store.load();
    CHECK(data.verdicts.at({"task0", "abcd"}) == Verdict::Correct);
    REQUIRE(data.pool.at("task0").size() == 2);
    CHECK(data.pool.at("task0")[1].code == "c1");
    REQUIRE(data.blind_samples.size() == 1);
    CHECK(data.blind_samples[0] == pair);
    REQUIRE(data.annotations.size() == 2);
    CHECK(data.annotations[0] == ann);
    CHECK(data.annotations[1] == failed);
}

TEST_CASE("second writer is locked out") {
    auto dir = make_temp_dir();
    auto store = RunStore::create(dir, sample_manifest(1));
    CHECK_THROWS(RunStore::open(dir));
}

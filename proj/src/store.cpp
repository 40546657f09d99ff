#include "redraft/store.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>

#include <fcntl.h>
#include <sys/file.h>
#include <sys/stat.h>
#include <unistd.h>

namespace redraft {

using nlohmann::json;

// ---- serialization ----------------------------------------------------------

json to_json(const Solution& s) {
    return {{"index", s.index}, {"code", s.code}, {"raw", s.raw}};
}

json to_json(const Feedback& f) {
    return {{"critique", f.critique},
            {"action", to_string(f.action)},
            {"parse_flags", f.parse_flags}};
}

json to_json(const IterationEvent& e) {
    return {{"iteration", e.iteration}, {"phase", e.phase},     {"prompt", e.prompt},
            {"response", e.response},   {"parsed", e.parsed},   {"timestamp_ms", e.timestamp_ms}};
}

json to_json(const Trajectory& t, const std::string& run_id) {
    json solutions = json::array(), feedbacks = json::array(), events = json::array();
    for (const auto& s : t.solutions) solutions.push_back(to_json(s));
    for (const auto& f : t.feedbacks) feedbacks.push_back(to_json(f));
    for (const auto& e : t.events) events.push_back(to_json(e));
    return {{"kind", "trajectory"},
            {"schema_version", kSchemaVersion},
            {"run_id", run_id},
            {"task_id", t.task_id},
            {"strategy", to_string(t.strategy)},
            {"terminated_by", to_string(t.terminated_by)},
            {"solutions", solutions},
            {"feedbacks", feedbacks},
            {"events", events}};
}

json to_json(const RunConfig& c) {
    json j = {{"strategy", to_string(c.strategy)},
              {"max_iterations", c.max_iterations},
              {"temperature", c.temperature},
              {"top_p", c.top_p},
              {"frequency_penalty", c.frequency_penalty},
              {"presence_penalty", c.presence_penalty},
              {"samples_n", c.samples_n},
              {"pass_k", c.pass_k},
              {"blind_cap", c.blind_cap},
              {"seed", c.seed},
              {"concurrency", c.concurrency},
              {"model_name", c.model_name}};
    if (c.max_tokens) j["max_tokens"] = *c.max_tokens;
    if (c.history_window) j["history_window"] = *c.history_window;
    return j;
}

namespace {

template <typename T>
T parse_enum(const json& j, const char* field, std::optional<T> (*from)(const std::string&)) {
    auto v = from(j.at(field).get<std::string>());
    if (!v) throw std::runtime_error(std::string("bad enum value for ") + field);
    return *v;
}

void check_schema(const json& j) {
    int v = j.value("schema_version", kSchemaVersion);
    if (v != kSchemaVersion)
        throw std::runtime_error("unknown schema_version " + std::to_string(v));
}

}  // namespace

Solution solution_from_json(const json& j) {
    return {j.at("index").get<int>(), j.at("code").get<std::string>(),
            j.at("raw").get<std::string>()};
}

Feedback feedback_from_json(const json& j) {
    Feedback f;
    f.critique = j.at("critique").get<std::string>();
    f.action = parse_enum<Action>(j, "action", action_from_string);
    f.parse_flags = j.at("parse_flags").get<std::vector<std::string>>();
    return f;
}

IterationEvent event_from_json(const json& j) {
    IterationEvent e;
    e.iteration = j.at("iteration").get<int>();
    e.phase = j.at("phase").get<std::string>();
    e.prompt = j.at("prompt").get<std::string>();
    e.response = j.at("response").get<std::string>();
    e.parsed = j.at("parsed").get<std::string>();
    e.timestamp_ms = j.at("timestamp_ms").get<std::int64_t>();
    return e;
}

Trajectory trajectory_from_json(const json& j) {
    check_schema(j);
    Trajectory t;
    t.task_id = j.at("task_id").get<std::string>();
    t.strategy = parse_enum<Strategy>(j, "strategy", strategy_from_string);
    t.terminated_by = parse_enum<Termination>(j, "terminated_by", termination_from_string);
    for (const auto& s : j.at("solutions")) t.solutions.push_back(solution_from_json(s));
    for (const auto& f : j.at("feedbacks")) t.feedbacks.push_back(feedback_from_json(f));
    for (const auto& e : j.at("events")) t.events.push_back(event_from_json(e));
    return t;
}

RunConfig config_from_json(const json& j) {
    RunConfig c;
    c.strategy = parse_enum<Strategy>(j, "strategy", strategy_from_string);
    c.max_iterations = j.at("max_iterations").get<int>();
    c.temperature = j.at("temperature").get<double>();
    c.top_p = j.at("top_p").get<double>();
    c.frequency_penalty = j.at("frequency_penalty").get<double>();
    c.presence_penalty = j.at("presence_penalty").get<double>();
    c.samples_n = j.at("samples_n").get<int>();
    c.pass_k = j.at("pass_k").get<int>();
    c.blind_cap = j.at("blind_cap").get<int>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.concurrency = j.at("concurrency").get<int>();
    c.model_name = j.at("model_name").get<std::string>();
    if (j.contains("max_tokens")) c.max_tokens = j["max_tokens"].get<int>();
    if (j.contains("history_window")) c.history_window = j["history_window"].get<int>();
    return c;
}

namespace {

json eval_pair_to_json(const EvalPair& p) {
    return {{"kind", "blind_sample"},
            {"schema_version", kSchemaVersion},
            {"generator_id", p.generator_id},
            {"task_id", p.task_id},
            {"iteration", p.iteration},
            {"original", to_json(p.original)},
            {"regenerated", to_json(p.regenerated)},
            {"truth_action", to_string(p.truth_action)}};
}

EvalPair eval_pair_from_json(const json& j) {
    check_schema(j);
    EvalPair p;
    p.generator_id = j.at("generator_id").get<std::string>();
    p.task_id = j.at("task_id").get<std::string>();
    p.iteration = j.at("iteration").get<int>();
    p.original = solution_from_json(j.at("original"));
    p.regenerated = solution_from_json(j.at("regenerated"));
    p.truth_action = parse_enum<Action>(j, "truth_action", action_from_string);
    return p;
}

json annotation_to_json(const AnnotationRecord& a) {
    json j = {{"kind", "annotation"},
              {"schema_version", kSchemaVersion},
              {"annotator_id", a.annotator_id},
              {"generator_id", a.generator_id},
              {"task_id", a.task_id},
              {"iteration", a.iteration},
              {"raw_response", a.raw_response}};
    if (a.label) j["label"] = to_string(*a.label);
    return j;
}

AnnotationRecord annotation_from_json(const json& j) {
    check_schema(j);
    AnnotationRecord a;
    a.annotator_id = j.at("annotator_id").get<std::string>();
    a.generator_id = j.at("generator_id").get<std::string>();
    a.task_id = j.at("task_id").get<std::string>();
    a.iteration = j.at("iteration").get<int>();
    a.raw_response = j.at("raw_response").get<std::string>();
    if (j.contains("label")) a.label = parse_enum<Action>(j, "label", action_from_string);
    return a;
}

json task_to_json(const Task& t) {
    return {{"id", t.id}, {"statement", t.statement}, {"difficulty", to_string(t.difficulty)}};
}

Task task_from_json(const json& j) {
    return {j.at("id").get<std::string>(), j.at("statement").get<std::string>(),
            difficulty_from_string(j.value("difficulty", "unknown"))};
}

// Reads all complete JSONL records of a file; a corrupt trailing line is
// reported via `truncated`. A corrupt line in the middle throws.
std::vector<json> read_jsonl(const std::string& path, bool* truncated = nullptr) {
    std::vector<json> out;
    std::ifstream in(path, std::ios::binary);
    if (!in) return out;
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(in, line)) lines.push_back(line);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(json::parse(lines[i]));
        } catch (const json::parse_error&) {
            if (i + 1 == lines.size()) {
                if (truncated) *truncated = true;
                std::cerr << "warning: discarding corrupt trailing record in " << path
                          << "\n";
                break;
            }
            throw std::runtime_error("corrupt record in " + path + " at line " +
                                     std::to_string(i + 1));
        }
    }
    return out;
}

// Drops a corrupt trailing partial line, keeping the good lines byte-for-byte,
// so later appends start on a clean line. Returns the parsed good records.
std::vector<json> repair_trailing(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::vector<std::string> lines;
    std::vector<json> records;
    if (in) {
        std::string line;
        while (std::getline(in, line)) lines.push_back(line);
    }
    bool truncated = false;
    std::size_t good = 0;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].find_first_not_of(" \t\r") == std::string::npos) {
            good = i + 1;
            continue;
        }
        try {
            records.push_back(json::parse(lines[i]));
            good = i + 1;
        } catch (const json::parse_error&) {
            if (i + 1 == lines.size()) {
                truncated = true;
                break;
            }
            throw std::runtime_error("corrupt record in " + path + " at line " +
                                     std::to_string(i + 1));
        }
    }
    if (truncated) {
        std::cerr << "warning: discarding corrupt trailing record in " << path << "\n";
        std::ofstream repaired(path + ".tmp", std::ios::binary | std::ios::trunc);
        for (std::size_t i = 0; i < good; ++i) repaired << lines[i] << "\n";
        repaired.close();
        if (::rename((path + ".tmp").c_str(), path.c_str()) != 0)
            throw std::runtime_error("cannot repair " + path);
    }
    return records;
}

}  // namespace

// ---- store ------------------------------------------------------------------

struct RunStore::Impl {
    int lock_fd = -1;
    std::mutex mu;
    std::set<WorkItem> written;  // trajectories already persisted

    ~Impl() {
        if (lock_fd >= 0) ::close(lock_fd);
    }
};

namespace {

void append_line(const std::string& path, const json& record) {
    std::ofstream out(path, std::ios::binary | std::ios::app);
    if (!out) throw std::runtime_error("cannot append to " + path);
    out << record.dump() << "\n";
    out.flush();
}

int acquire_lock(const std::string& dir) {
    std::string lock_path = dir + "/.lock";
    int fd = ::open(lock_path.c_str(), O_CREAT | O_RDWR, 0644);
    if (fd < 0) throw std::runtime_error("cannot open lock file " + lock_path);
    if (::flock(fd, LOCK_EX | LOCK_NB) != 0) {
        ::close(fd);
        throw std::runtime_error("run directory locked by another writer: " + dir);
    }
    return fd;
}

}  // namespace

RunStore::~RunStore() = default;
RunStore::RunStore(RunStore&&) noexcept = default;
RunStore& RunStore::operator=(RunStore&&) noexcept = default;

RunStore RunStore::create(const std::string& dir, RunManifest manifest) {
    ::mkdir(dir.c_str(), 0755);
    {
        std::string manifest_path = dir + "/manifest.json";
        if (std::ifstream(manifest_path).good())
            throw std::runtime_error("run already exists: " + dir);
    }
    RunStore store;
    store.impl_ = std::make_unique<Impl>();
    store.impl_->lock_fd = acquire_lock(dir);
    store.dir_ = dir;
    store.manifest_ = std::move(manifest);
    if (store.manifest_.started_ms == 0)
        store.manifest_.started_ms =
            std::chrono::duration_cast<std::chrono::milliseconds>(
                std::chrono::system_clock::now().time_since_epoch())
                .count();

    json tasks = json::array();
    for (const auto& t : store.manifest_.tasks) tasks.push_back(task_to_json(t));
    json strategies = json::array();
    for (auto s : store.manifest_.strategies) strategies.push_back(to_string(s));
    json m = {{"kind", "manifest"},
              {"schema_version", kSchemaVersion},
              {"run_id", store.manifest_.run_id},
              {"config", to_json(store.manifest_.config)},
              {"suite_fingerprint", store.manifest_.suite_fingerprint},
              {"tasks", tasks},
              {"strategies", strategies},
              {"started_ms", store.manifest_.started_ms}};
    std::ofstream out(dir + "/manifest.json", std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write manifest in " + dir);
    out << m.dump(2) << "\n";
    return store;
}

RunStore RunStore::open(const std::string& dir) {
    std::ifstream in(dir + "/manifest.json", std::ios::binary);
    if (!in) throw std::runtime_error("run not found: " + dir);
    json m = json::parse(in);
    check_schema(m);

    RunStore store;
    store.impl_ = std::make_unique<Impl>();
    store.impl_->lock_fd = acquire_lock(dir);
    store.dir_ = dir;
    store.manifest_.run_id = m.at("run_id").get<std::string>();
    store.manifest_.config = config_from_json(m.at("config"));
    store.manifest_.suite_fingerprint = m.at("suite_fingerprint").get<std::string>();
    for (const auto& t : m.at("tasks")) store.manifest_.tasks.push_back(task_from_json(t));
    for (const auto& s : m.at("strategies"))
        store.manifest_.strategies.push_back(
            *strategy_from_string(s.get<std::string>()));
    store.manifest_.started_ms = m.at("started_ms").get<std::int64_t>();

    auto records = repair_trailing(dir + "/trajectories.jsonl");
    for (const auto& rec : records) {
        Trajectory t = trajectory_from_json(rec);
        store.impl_->written.insert({t.task_id, t.strategy});
    }
    return store;
}

void RunStore::append_trajectory(const Trajectory& trajectory) {
    std::lock_guard lock(impl_->mu);
    WorkItem item{trajectory.task_id, trajectory.strategy};
    if (impl_->written.count(item))
        throw std::runtime_error("duplicate trajectory record for task " +
                                 trajectory.task_id);
    append_line(dir_ + "/trajectories.jsonl", to_json(trajectory, manifest_.run_id));
    impl_->written.insert(item);
}

void RunStore::append_verdict(const std::string& task_id, const std::string& fp,
                              Verdict v) {
    std::lock_guard lock(impl_->mu);
    append_line(dir_ + "/verdicts.jsonl", {{"kind", "verdict"},
                                           {"schema_version", kSchemaVersion},
                                           {"task_id", task_id},
                                           {"fingerprint", fp},
                                           {"verdict", to_string(v)}});
}

void RunStore::append_pool_entry(const std::string& task_id, const Solution& s) {
    std::lock_guard lock(impl_->mu);
    json rec = {{"kind", "pool"},
                {"schema_version", kSchemaVersion},
                {"task_id", task_id},
                {"solution", to_json(s)}};
    append_line(dir_ + "/pool.jsonl", rec);
}

void RunStore::append_blind_sample(const EvalPair& pair) {
    std::lock_guard lock(impl_->mu);
    append_line(dir_ + "/blind_samples.jsonl", eval_pair_to_json(pair));
}

void RunStore::append_annotation(const AnnotationRecord& rec) {
    std::lock_guard lock(impl_->mu);
    append_line(dir_ + "/annotations.jsonl", annotation_to_json(rec));
}

std::vector<WorkItem> RunStore::resume() const {
    std::set<WorkItem> done;
    for (const auto& rec : read_jsonl(dir_ + "/trajectories.jsonl")) {
        Trajectory t = trajectory_from_json(rec);
        done.insert({t.task_id, t.strategy});
    }
    std::vector<WorkItem> pending;
    for (const auto& task : manifest_.tasks)
        for (auto strategy : manifest_.strategies)
            if (!done.count({task.id, strategy})) pending.push_back({task.id, strategy});
    return pending;
}

RunData RunStore::load() const {
    RunData data;
    data.manifest = manifest_;
    for (const auto& rec : read_jsonl(dir_ + "/trajectories.jsonl"))
        data.trajectories.push_back(trajectory_from_json(rec));
    for (const auto& rec : read_jsonl(dir_ + "/verdicts.jsonl")) {
        auto v = verdict_from_string(rec.at("verdict").get<std::string>());
        if (!v) throw std::runtime_error("bad verdict record in " + dir_);
        data.verdicts[{rec.at("task_id").get<std::string>(),
                       rec.at("fingerprint").get<std::string>()}] = *v;
    }
    for (const auto& rec : read_jsonl(dir_ + "/blind_samples.jsonl"))
        data.blind_samples.push_back(eval_pair_from_json(rec));
    for (const auto& rec : read_jsonl(dir_ + "/annotations.jsonl"))
        data.annotations.push_back(annotation_from_json(rec));
    for (const auto& rec : read_jsonl(dir_ + "/pool.jsonl"))
        data.pool[rec.at("task_id").get<std::string>()].push_back(
            solution_from_json(rec.at("solution")));
    return data;
}

}  // namespace redraft

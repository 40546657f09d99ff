#include "redraft/oracle.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <fcntl.h>
#include <signal.h>
#include <sys/stat.h>
#include <sys/wait.h>
#include <unistd.h>

#include "json.hpp"

namespace redraft {

using nlohmann::json;

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Correct: return "correct";
        case Verdict::Incorrect: return "incorrect";
        case Verdict::Unknown: return "unknown";
    }
    return "?";
}

std::optional<Verdict> verdict_from_string(const std::string& s) {
    if (s == "correct") return Verdict::Correct;
    if (s == "incorrect") return Verdict::Incorrect;
    if (s == "unknown") return Verdict::Unknown;
    return std::nullopt;
}

std::string fingerprint(const std::string& code) {
    // normalize: strip trailing whitespace per line
    std::string norm;
    norm.reserve(code.size());
    std::istringstream in(code);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == ' ' || line.back() == '\t' ||
                                 line.back() == '\r'))
            line.pop_back();
        if (!first) norm += '\n';
        norm += line;
        first = false;
    }
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : norm) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// ---- verdict-file backend ---------------------------------------------------

VerdictFileOracle VerdictFileOracle::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read verdict file: " + path);
    std::map<std::pair<std::string, std::string>, Verdict> table;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json rec = json::parse(line);
        auto v = verdict_from_string(rec.at("verdict").get<std::string>());
        if (!v) throw std::runtime_error("bad verdict token in " + path + ": " + line);
        table[{rec.at("task_id").get<std::string>(),
               rec.at("fingerprint").get<std::string>()}] = *v;
    }
    return VerdictFileOracle(std::move(table));
}

VerdictFileOracle::VerdictFileOracle(
    std::map<std::pair<std::string, std::string>, Verdict> table)
    : table_(std::move(table)) {}

Verdict VerdictFileOracle::judge(const std::string& task_id, const Solution& solution) {
    auto it = table_.find({task_id, fingerprint(solution.code)});
    return it == table_.end() ? Verdict::Unknown : it->second;
}

// ---- external-command backend -----------------------------------------------

CommandOracle::CommandOracle(std::string checker, std::map<std::string, std::string> tasks,
                             std::string work_dir, int timeout_seconds, int max_concurrent)
    : checker_(std::move(checker)),
      tasks_(std::move(tasks)),
      work_dir_(std::move(work_dir)),
      timeout_seconds_(timeout_seconds),
      slots_(std::min(max_concurrent, 256)) {
    ::mkdir(work_dir_.c_str(), 0755);
}

namespace {

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

// Runs argv, waits up to timeout_seconds, returns exit status or nullopt on
// timeout/abnormal exit.
std::optional<int> run_checker(const std::string& checker, const std::string& task_path,
                               const std::string& solution_path, int timeout_seconds) {
    pid_t pid = ::fork();
    if (pid < 0) return std::nullopt;
    if (pid == 0) {
        // child: own process group so a timeout kill reaps grandchildren too;
        // silence stdout per the checker contract
        ::setpgid(0, 0);
        int devnull = ::open("/dev/null", O_WRONLY);
        if (devnull >= 0) ::dup2(devnull, STDOUT_FILENO);
        ::execl(checker.c_str(), checker.c_str(), task_path.c_str(),
                solution_path.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }
    const int poll_ms = 20;
    int waited_ms = 0;
    while (true) {
        int status = 0;
        pid_t r = ::waitpid(pid, &status, WNOHANG);
        if (r == pid) {
            if (WIFEXITED(status)) return WEXITSTATUS(status);
            return std::nullopt;
        }
        if (waited_ms >= timeout_seconds * 1000) {
            ::kill(-pid, SIGKILL);
            ::waitpid(pid, &status, 0);
            return std::nullopt;  // timeout -> unknown
        }
        ::usleep(poll_ms * 1000);
        waited_ms += poll_ms;
    }
}

}  // namespace

Verdict CommandOracle::judge(const std::string& task_id, const Solution& solution) {
    auto it = tasks_.find(task_id);
    if (it == tasks_.end()) return Verdict::Unknown;

    slots_.acquire();
    invocations_.fetch_add(1);
    int n = serial_.fetch_add(1);
    std::string task_path = work_dir_ + "/task_" + std::to_string(n) + ".txt";
    std::string sol_path = work_dir_ + "/solution_" + std::to_string(n) + ".txt";
    Verdict verdict = Verdict::Unknown;
    try {
        write_file(task_path, it->second);
        write_file(sol_path, solution.code);
        auto status = run_checker(checker_, task_path, sol_path, timeout_seconds_);
        if (status == 0) verdict = Verdict::Correct;
        else if (status == 1) verdict = Verdict::Incorrect;
    } catch (const std::exception&) {
        verdict = Verdict::Unknown;
    }
    ::unlink(task_path.c_str());
    ::unlink(sol_path.c_str());
    slots_.release();
    return verdict;
}

VerdictMap judge_suite(const std::vector<Trajectory>& trajectories, VerdictOracle& oracle) {
    VerdictMap out;
    std::map<std::pair<std::string, std::string>, Verdict> memo;
    for (const auto& t : trajectories) {
        for (const auto& s : t.solutions) {
            auto key = std::make_pair(t.task_id, fingerprint(s.code));
            auto it = memo.find(key);
            if (it == memo.end())
                it = memo.emplace(key, oracle.judge(t.task_id, s)).first;
            out[{t.task_id, s.index}] = it->second;
        }
    }
    return out;
}

}  // namespace redraft

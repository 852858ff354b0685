#include "apimig/example_gen.hpp"

#include <fcntl.h>
#include <signal.h>
#include <sys/stat.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <iostream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "apimig/text.hpp"

namespace apimig {

const char* kTestRequestMarker = "Now write test cases that assess the equivalence";

namespace {

constexpr const char* kExampleTemplate = R"(You are an expert {library_name} developer helping users adapt code across API changes.

{additional_requirements}

Here is an example of the expected output format:
{concrete_example}

Read the pull request data below and write a pair of Python functions. The
first function, old_usage1, must use the old API exactly as clients would
have written it before this change. The second function, new_usage1, must
use the new API. Both functions must have identical signatures but
different implementations. Output only code.

Pull request data (JSON):
{pr_data}
)";

constexpr const char* kTestTemplate = R"(Now write test cases that assess the equivalence of old_usage1 and
new_usage1. Generate concrete inputs, compute the output of old_usage1 on
them, and assert that new_usage1 produces the same output for the same
inputs. Output only code; the test program must exit nonzero on failure.
)";

constexpr const char* kConcreteExample = R"(def old_usage1(df, other):
    return df.append(other)

def new_usage1(df, other):
    return pd.concat([df, other])
)";

constexpr const char* kAdditionalRequirements =
    "Functions must be self-contained, deterministic, and runnable without "
    "network access. Name them old_usage1 and new_usage1.";

std::string substitute_placeholder(std::string text, const std::string& name,
                                   const std::string& value) {
  std::string key = "{" + name + "}";
  size_t pos = 0;
  while ((pos = text.find(key, pos)) != std::string::npos) {
    text.replace(pos, key.size(), value);
    pos += value.size();
  }
  return text;
}

std::string pr_data_json(const PullRequest& pr) {
  nlohmann::ordered_json j;
  j["title"] = pr.title;
  j["description"] = pr.description;
  j["discussion"] = pr.discussion;
  j["files"] = nlohmann::ordered_json::array();
  for (const auto& f : pr.files) {
    nlohmann::ordered_json fj;
    fj["path"] = f.path;
    fj["diff"] = f.patch;
    j["files"].push_back(fj);
  }
  return j.dump(2);
}

std::string load_template(const std::string& file, const char* builtin) {
  if (file.empty()) return builtin;
  return read_file(file);  // throws when the template file is missing
}

}  // namespace

std::string build_example_prompt(const PullRequest& pr, const GenConfig& cfg) {
  std::string text = load_template(cfg.example_template_file, kExampleTemplate);
  text = substitute_placeholder(text, "library_name", pr.id.substr(0, pr.id.find('#')));
  text = substitute_placeholder(text, "additional_requirements", kAdditionalRequirements);
  text = substitute_placeholder(text, "concrete_example", kConcreteExample);
  text = substitute_placeholder(text, "pr_data", pr_data_json(pr));
  return text;
}

std::string build_test_prompt(const PullRequest& pr, const TransitionExample& example,
                              const std::string& prior_response, const GenConfig& cfg) {
  (void)example;
  std::string request = load_template(cfg.test_template_file, kTestTemplate);
  return build_example_prompt(pr, cfg) + "\n" + prior_response + "\n" + request;
}

namespace {

class HttpProvider : public GenerationProvider {
 public:
  HttpProvider(std::string host_port, std::string path, std::string model, double temperature,
               std::string api_key, int max_retries)
      : host_port_(std::move(host_port)),
        path_(std::move(path)),
        model_(std::move(model)),
        temperature_(temperature),
        api_key_(std::move(api_key)),
        max_retries_(max_retries) {}

  std::optional<std::string> complete(const std::vector<ChatMessage>& messages) override {
    nlohmann::json req;
    req["model"] = model_;
    req["temperature"] = temperature_;
    req["messages"] = nlohmann::json::array();
    for (const auto& m : messages) req["messages"].push_back({{"role", m.role}, {"content", m.content}});
    std::string body = req.dump();

    int backoff_ms = 200;
    for (int attempt = 0; attempt <= max_retries_; ++attempt) {
      httplib::Client client(host_port_);
      client.set_read_timeout(120, 0);
      httplib::Headers headers;
      if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
      auto res = client.Post(path_, headers, body, "application/json");
      if (res && res->status == 200) {
        try {
          auto j = nlohmann::json::parse(res->body);
          return j.at("content").get<std::string>();
        } catch (const std::exception& e) {
          std::cerr << "apimig: bad provider response: " << e.what() << "\n";
          return std::nullopt;
        }
      }
      bool retryable = !res || res->status == 429 || res->status >= 500;
      if (!retryable || attempt == max_retries_) break;
      std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
      backoff_ms = std::min(backoff_ms * 2, 5000);
    }
    return std::nullopt;
  }

 private:
  std::string host_port_, path_, model_;
  double temperature_;
  std::string api_key_;
  int max_retries_;
};

class MockProvider : public GenerationProvider {
 public:
  MockProvider(std::string dir, std::string pr_id) : dir_(std::move(dir)), pr_id_(std::move(pr_id)) {}

  std::optional<std::string> complete(const std::vector<ChatMessage>& messages) override {
    bool is_test = !messages.empty() &&
                   messages.back().content.find(kTestRequestMarker) != std::string::npos;
    int index = is_test ? ++test_calls_ : ++example_calls_;
    std::string file = dir_ + "/" + pr_id_ + "/" +
                       (is_test ? "tests_" : "example_") + std::to_string(index) + ".txt";
    if (!std::filesystem::exists(file)) return std::string();
    return read_file(file);
  }

 private:
  std::string dir_, pr_id_;
  int example_calls_ = 0;
  int test_calls_ = 0;
};

}  // namespace

std::unique_ptr<GenerationProvider> make_http_provider(const std::string& host_port,
                                                       const std::string& path,
                                                       const std::string& model, double temperature,
                                                       const std::string& api_key,
                                                       int max_retries) {
  return std::make_unique<HttpProvider>(host_port, path, model, temperature, api_key, max_retries);
}

std::unique_ptr<GenerationProvider> make_mock_provider(const std::string& fixture_dir,
                                                       const std::string& pr_id) {
  return std::make_unique<MockProvider>(fixture_dir, pr_id);
}

namespace {

// Extracts old/new function sources from a completion: the first two
// top-level function definitions, which must have identical parameter lists.
std::optional<std::pair<std::string, std::string>> parse_example_pair(const std::string& response,
                                                                      std::string* why) {
  SyntaxNode mod;
  try {
    mod = parse_module(response);
  } catch (const ParseError& e) {
    *why = std::string("unparseable response: ") + e.what();
    return std::nullopt;
  }
  std::vector<const SyntaxNode*> defs;
  for (const auto& c : mod.children)
    if (c.kind == NodeKind::FunctionDef) defs.push_back(&c);
  if (defs.size() < 2) {
    *why = "response lacks two function definitions";
    return std::nullopt;
  }
  auto params = [&](const SyntaxNode* d) -> std::string {
    std::string_view text = d->text(response);
    size_t open = text.find('(');
    size_t close = text.find(')');
    if (open == std::string_view::npos || close == std::string_view::npos || close < open)
      return "";
    return normalize_ws(text.substr(open + 1, close - open - 1));
  };
  if (params(defs[0]) != params(defs[1])) {
    *why = "function signatures differ";
    return std::nullopt;
  }
  return std::make_pair(std::string(defs[0]->text(response)),
                        std::string(defs[1]->text(response)));
}

std::vector<std::string> split_test_programs(const std::string& response) {
  std::vector<std::string> out;
  std::string cur;
  size_t pos = 0;
  auto flush = [&]() {
    if (!normalize_ws(cur).empty()) out.push_back(cur);
    cur.clear();
  };
  while (pos <= response.size()) {
    size_t nl = response.find('\n', pos);
    std::string line = response.substr(pos, (nl == std::string::npos ? response.size() : nl) - pos);
    if (normalize_ws(line) == "# ---")
      flush();
    else
      cur += line + "\n";
    if (nl == std::string::npos) break;
    pos = nl + 1;
  }
  flush();
  return out;
}

}  // namespace

std::vector<TestResult> run_tests(const TransitionExample& example,
                                  const std::string& interpreter_cmd, int timeout_s) {
  namespace fs = std::filesystem;
  std::vector<TestResult> results;
  char tmpl[] = "/tmp/apimig_tests_XXXXXX";
  char* dir = mkdtemp(tmpl);
  if (!dir) throw std::runtime_error("cannot create test workspace");
  fs::path work(dir);

  for (size_t i = 0; i < example.tests.size(); ++i) {
    fs::path program = work / ("test_" + std::to_string(i) + ".py");
    std::string content = example.e_old + "\n\n" + example.e_new + "\n\n" + example.tests[i] + "\n";
    write_file(program.string(), content);
    fs::path log = work / ("test_" + std::to_string(i) + ".log");

    std::string cmd = interpreter_cmd + " " + program.string();
    pid_t pid = fork();
    if (pid < 0) throw std::runtime_error("fork failed");
    if (pid == 0) {
      setpgid(0, 0);
      int fd = open(log.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
      if (fd >= 0) {
        dup2(fd, 1);
        dup2(fd, 2);
        close(fd);
      }
      execl("/bin/sh", "sh", "-c", cmd.c_str(), static_cast<char*>(nullptr));
      _exit(127);
    }
    TestResult r;
    auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(timeout_s);
    int status = 0;
    while (true) {
      pid_t w = waitpid(pid, &status, WNOHANG);
      if (w == pid) break;
      if (std::chrono::steady_clock::now() >= deadline) {
        kill(-pid, SIGKILL);
        waitpid(pid, &status, 0);
        r.timed_out = true;
        break;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
    if (!r.timed_out) {
      r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : 128;
      if (r.exit_code == 127)
        throw std::runtime_error("interpreter not found: " + interpreter_cmd);
      r.passed = r.exit_code == 0;
    }
    results.push_back(r);
  }
  std::error_code ec;
  fs::remove_all(work, ec);
  return results;
}

std::vector<TransitionExample> ExampleRun::survivors() const {
  std::vector<TransitionExample> out;
  for (const auto& e : all)
    if (e.status == TransitionExample::Status::Passed) out.push_back(e);
  return out;
}

ExampleRun generate_transition_examples(const PullRequest& pr, GenerationProvider& provider,
                                        const GenConfig& cfg) {
  if (cfg.n < 1) throw std::invalid_argument("sample count must be at least 1");
  ExampleRun run;
  for (int i = 1; i <= cfg.n; ++i) {
    std::string prompt = build_example_prompt(pr, cfg);
    ++run.example_calls;
    auto response = provider.complete({{"user", prompt}});
    if (!response) {
      std::cerr << "apimig: provider error on example " << i << ", skipping\n";
      continue;
    }
    std::string why;
    auto pair = parse_example_pair(*response, &why);
    if (!pair) {
      std::cerr << "apimig: example " << i << " rejected: " << why << "\n";
      continue;
    }
    TransitionExample ex;
    ex.id = pr.id + "#ex" + std::to_string(i);
    ex.e_old = pair->first;
    ex.e_new = pair->second;

    std::string test_prompt = build_test_prompt(pr, ex, *response, cfg);
    ++run.test_calls;
    auto test_response = provider.complete({{"user", test_prompt}});
    if (!test_response) {
      std::cerr << "apimig: provider error on tests for example " << i << ", skipping\n";
      continue;
    }
    ex.tests = split_test_programs(*test_response);
    if (ex.tests.empty()) {
      ex.status = TransitionExample::Status::Discarded;
      ex.note = "no test cases generated";
      run.all.push_back(std::move(ex));
      continue;
    }
    auto results = run_tests(ex, cfg.interpreter, cfg.test_timeout_s);
    bool all_pass = std::all_of(results.begin(), results.end(),
                                [](const TestResult& r) { return r.passed; });
    if (all_pass) {
      ex.status = TransitionExample::Status::Passed;
    } else {
      ex.status = TransitionExample::Status::Discarded;
      ex.note = "failing test";
    }
    run.all.push_back(std::move(ex));
  }
  return run;
}

std::vector<ChangePair> examples_to_pairs(const std::vector<TransitionExample>& examples,
                                          const std::string& pr_id) {
  std::vector<ChangePair> out;
  for (const auto& ex : examples) {
    if (ex.status != TransitionExample::Status::Passed) continue;
    SyntaxNode old_mod, new_mod;
    try {
      old_mod = parse_module(ex.e_old);
      new_mod = parse_module(ex.e_new);
    } catch (const ParseError& e) {
      std::cerr << "apimig: skipping example " << ex.id << ": " << e.what() << "\n";
      continue;
    }
    const SyntaxNode* old_def = nullptr;
    const SyntaxNode* new_def = nullptr;
    for (const auto& c : old_mod.children)
      if (c.kind == NodeKind::FunctionDef) old_def = &c;
    for (const auto& c : new_mod.children)
      if (c.kind == NodeKind::FunctionDef) new_def = &c;
    if (!old_def || !new_def) continue;

    std::vector<std::string> before_texts, after_texts;
    std::vector<size_t> before_offsets;
    for (const auto& s : old_def->children) {
      before_texts.emplace_back(s.text(ex.e_old));
      before_offsets.push_back(s.begin);
    }
    for (const auto& s : new_def->children) after_texts.emplace_back(s.text(ex.e_new));

    for (auto [i, j] : align_statements(before_texts, after_texts)) {
      if (before_texts[i] == after_texts[j]) continue;
      ChangePair pair;
      pair.before_text = before_texts[i];
      pair.after_text = after_texts[j];
      try {
        pair.before = parse_statement(pair.before_text);
        pair.after = parse_statement(pair.after_text);
      } catch (const ParseError&) {
        continue;
      }
      pair.file = ex.id;
      pair.pr_id = pr_id;
      pair.example_id = ex.id;
      pair.before_file = ex.e_old;
      pair.before_offset = before_offsets[i];
      out.push_back(std::move(pair));
    }
  }
  return out;
}

}  // namespace apimig

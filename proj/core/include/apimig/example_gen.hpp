#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "apimig/pr_ingest.hpp"

namespace apimig {

struct TransitionExample {
  enum class Status { Untested, Passed, Discarded };
  std::string id;
  std::string e_old;  // full function source
  std::string e_new;
  std::vector<std::string> tests;
  Status status = Status::Untested;
  std::string note;  // discard reason, for logs
};

struct ChatMessage {
  std::string role;  // "user" / "assistant"
  std::string content;
};

/// Code-generation backend. Returns the completion text, or nullopt on a
/// transport error (the caller skips that iteration).
class GenerationProvider {
 public:
  virtual ~GenerationProvider() = default;
  virtual std::optional<std::string> complete(const std::vector<ChatMessage>& messages) = 0;
};

/// HTTP chat-completion backend. Request: {model, temperature, messages:
/// [{role, content}]}; response: {content}. Retries transient failures with
/// capped backoff.
std::unique_ptr<GenerationProvider> make_http_provider(const std::string& host_port,
                                                       const std::string& path,
                                                       const std::string& model,
                                                       double temperature,
                                                       const std::string& api_key,
                                                       int max_retries = 3);

/// Deterministic fixture-backed backend reading
/// `<dir>/<pr-id>/example_<i>.txt` and `tests_<i>.txt` in call order.
/// A missing file yields an empty completion.
std::unique_ptr<GenerationProvider> make_mock_provider(const std::string& fixture_dir,
                                                       const std::string& pr_id);

struct GenConfig {
  int n = 5;  // sample count
  double temperature = 0.2;
  int test_timeout_s = 30;
  std::string model = "gpt-4";
  std::string interpreter = "python3";
  /// Optional template file overrides; built-in templates otherwise.
  std::string example_template_file;
  std::string test_template_file;
};

/// Distinctive first line of the test-request prompt; the mock provider
/// keys on it to tell test requests from example requests.
extern const char* kTestRequestMarker;

/// Example-generation prompt: pure text substitution of the placeholders
/// library_name, additional_requirements, concrete_example, pr_data.
std::string build_example_prompt(const PullRequest& pr, const GenConfig& cfg);

/// Test-generation prompt: the example prompt, the model's response, and
/// the test request text, concatenated in that order.
std::string build_test_prompt(const PullRequest& pr, const TransitionExample& example,
                              const std::string& prior_response, const GenConfig& cfg);

struct TestResult {
  bool passed = false;
  int exit_code = 0;
  bool timed_out = false;
};

/// Writes e_old, e_new and each test into a temp workspace and executes
/// them with the interpreter. Exit 0 within the timeout is a pass. Throws
/// when the interpreter itself is missing (exit 127).
std::vector<TestResult> run_tests(const TransitionExample& example,
                                  const std::string& interpreter_cmd, int timeout_s);

struct ExampleRun {
  std::vector<TransitionExample> all;  // every generated example with status
  std::vector<TransitionExample> survivors() const;
  int example_calls = 0;
  int test_calls = 0;
};

/// Algorithm: N iterations of example generation, test generation, test
/// execution; failing or test-less examples are discarded.
ExampleRun generate_transition_examples(const PullRequest& pr, GenerationProvider& provider,
                                        const GenConfig& cfg);

/// Statement-aligned before/after pairs from the bodies of passed examples,
/// tagged llm-derived.
std::vector<ChangePair> examples_to_pairs(const std::vector<TransitionExample>& examples,
                                          const std::string& pr_id);

}  // namespace apimig

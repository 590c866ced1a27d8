#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "swapbench/corpus.hpp"
#include "swapbench/io.hpp"

namespace swapbench {

struct PromptTemplate {
    std::string system_text;
    std::string user_template;  // must contain exactly one {{snippet}} placeholder
};

// Default code-improvement prompt: asks for a drop-in replacement at function
// granularity with memory safety and efficiency as the stated goals.
PromptTemplate default_improve_template();
// Source-recognition probe prompt.
PromptTemplate default_contamination_template();

PromptTemplate load_template(const std::filesystem::path& system_file,
                             const std::filesystem::path& user_file);

struct PromptRequest {
    std::string function_id;
    std::string system_text;
    std::string user_text;
    std::uint64_t seed = 0;
    std::string model_id;
};

PromptRequest render_prompt(const FunctionRecord& record, const PromptTemplate& tmpl,
                            const std::string& model_id, std::uint64_t seed);

enum class GenerationStatus { Ok, Unparseable, BackendError };

std::string to_string(GenerationStatus s);
GenerationStatus generation_status_from_string(const std::string& s);

struct GenerationResult {
    std::string function_id;
    std::string model_id;
    std::string raw_response;
    std::optional<std::string> extracted_code;
    GenerationStatus status = GenerationStatus::BackendError;
    std::string error;      // set for backend_error
    std::string timestamp;  // UTC, ISO 8601
};

json generation_to_json(const GenerationResult& g);
GenerationResult generation_from_json(const json& j);

// First fenced code block, fences stripped; failing that, the whole response
// when it already reads as a C function definition; otherwise nothing.
std::optional<std::string> parse_response(const std::string& raw_response);

struct BackendReply {
    bool ok = false;
    std::string text;
    std::string error;
    bool transient = false;  // retryable transport-level failure
};

class ModelBackend {
public:
    virtual ~ModelBackend() = default;
    virtual BackendReply generate_raw(const PromptRequest& request) = 0;
    virtual std::string describe() const = 0;
};

// Replays recorded responses from <dir>/<function_id>.<model_id>.txt. A
// missing recording is a hard, non-retryable miss.
class ReplayBackend : public ModelBackend {
public:
    explicit ReplayBackend(std::filesystem::path recording_dir);
    BackendReply generate_raw(const PromptRequest& request) override;
    std::string describe() const override;

private:
    std::filesystem::path dir_;
};

struct LiveBackendConfig {
    std::string endpoint;     // e.g. https://api.example.com/v1/chat/completions
    std::string api_key_env;  // name of the env var holding the credential
    std::string model;
    double temperature = 0.0;
    long max_tokens = 0;      // 0 = omit
    bool send_seed = true;    // some providers reject a seed field
    int retry_limit = 3;
    long timeout_sec = 120;
    double requests_per_minute = 0;  // 0 = unlimited
};

LiveBackendConfig load_live_backend_config(const std::filesystem::path& file);

// OpenAI-style chat completion client with bounded retries on transport
// failures and a token-bucket rate limit.
class LiveBackend : public ModelBackend {
public:
    explicit LiveBackend(LiveBackendConfig config);
    ~LiveBackend() override;
    BackendReply generate_raw(const PromptRequest& request) override;
    std::string describe() const override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

GenerationResult generate(const PromptRequest& request, ModelBackend& backend,
                          int retry_limit = 3);

// One result per request, in request order, regardless of per-item failures.
std::vector<GenerationResult> generate_batch(const std::vector<PromptRequest>& requests,
                                             ModelBackend& backend, int in_flight = 1,
                                             int retry_limit = 3);

struct ProbeResult {
    bool recognized = false;
    std::string answer;
};

// Sends the recognition probe and keyword-matches the answer
// (case-insensitive). Backend failures propagate as exceptions.
ProbeResult contamination_probe(const FunctionRecord& record, ModelBackend& backend,
                                const std::string& project_keyword,
                                const PromptTemplate& tmpl, std::uint64_t seed = 0);

}  // namespace swapbench

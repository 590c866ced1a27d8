#include "swapbench/gateway.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdlib>
#include <ctime>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#ifdef SWAPBENCH_HAVE_OPENSSL
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include "httplib.h"

namespace swapbench {

namespace {

constexpr const char* kPlaceholder = "{{snippet}}";

size_t count_placeholders(const std::string& text) {
    size_t n = 0;
    size_t pos = 0;
    while ((pos = text.find(kPlaceholder, pos)) != std::string::npos) {
        ++n;
        pos += std::string_view(kPlaceholder).size();
    }
    return n;
}

std::string utc_timestamp() {
    std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

PromptTemplate default_improve_template() {
    PromptTemplate t;
    t.system_text = "You are an expert C developer.";
    t.user_template =
        "Please improve the following C function. The improved version must be a\n"
        "drop-in replacement: keep the same function name and signature. Two goals:\n"
        "(1) ensure memory safety — no buffer overflows, use-after-free, or other\n"
        "undefined behavior; (2) enhance efficiency where possible.\n"
        "Reply with the complete improved function in a single code block.\n"
        "\n"
        "{{snippet}}\n";
    return t;
}

PromptTemplate default_contamination_template() {
    PromptTemplate t;
    t.system_text = "You are an expert on open-source software";
    t.user_template =
        "Could you recognize the following C function snippet and provide the name "
        "of the open-source software it belongs to using the format 'Yes. It belongs "
        "to ...'? If you are unsure, please respond with 'I dont know'. The code "
        "snippet is: {{snippet}}";
    return t;
}

PromptTemplate load_template(const std::filesystem::path& system_file,
                             const std::filesystem::path& user_file) {
    PromptTemplate t;
    t.system_text = read_file(system_file);
    t.user_template = read_file(user_file);
    return t;
}

PromptRequest render_prompt(const FunctionRecord& record, const PromptTemplate& tmpl,
                            const std::string& model_id, std::uint64_t seed) {
    if (count_placeholders(tmpl.user_template) != 1)
        throw std::runtime_error("prompt template must contain exactly one " +
                                 std::string(kPlaceholder) + " placeholder");
    PromptRequest req;
    req.function_id = record.id;
    req.system_text = tmpl.system_text;
    req.user_text = tmpl.user_template;
    size_t pos = req.user_text.find(kPlaceholder);
    req.user_text.replace(pos, std::string_view(kPlaceholder).size(), record.source_text);
    req.seed = seed;
    req.model_id = model_id;
    return req;
}

std::string to_string(GenerationStatus s) {
    switch (s) {
    case GenerationStatus::Ok: return "ok";
    case GenerationStatus::Unparseable: return "unparseable";
    case GenerationStatus::BackendError: return "backend_error";
    }
    return "backend_error";
}

GenerationStatus generation_status_from_string(const std::string& s) {
    if (s == "ok") return GenerationStatus::Ok;
    if (s == "unparseable") return GenerationStatus::Unparseable;
    return GenerationStatus::BackendError;
}

json generation_to_json(const GenerationResult& g) {
    json j{
        {"function_id", g.function_id},
        {"model_id", g.model_id},
        {"raw_response", g.raw_response},
        {"status", to_string(g.status)},
        {"timestamp", g.timestamp},
    };
    if (g.extracted_code)
        j["extracted_code"] = *g.extracted_code;
    if (!g.error.empty())
        j["error"] = g.error;
    return j;
}

GenerationResult generation_from_json(const json& j) {
    GenerationResult g;
    g.function_id = j.at("function_id").get<std::string>();
    g.model_id = j.at("model_id").get<std::string>();
    g.raw_response = j.value("raw_response", "");
    if (j.contains("extracted_code"))
        g.extracted_code = j["extracted_code"].get<std::string>();
    g.status = generation_status_from_string(j.value("status", "backend_error"));
    g.error = j.value("error", "");
    g.timestamp = j.value("timestamp", "");
    return g;
}

std::optional<std::string> parse_response(const std::string& raw) {
    // First fenced block wins (the prompt asks for exactly one function).
    std::istringstream in(raw);
    std::string line;
    std::optional<std::string> fence_body;
    bool in_fence = false;
    std::string body;
    while (std::getline(in, line)) {
        std::string trimmed = line;
        if (!trimmed.empty() && trimmed.back() == '\r')
            trimmed.pop_back();
        size_t first = trimmed.find_first_not_of(" \t");
        bool is_fence = first != std::string::npos && trimmed.compare(first, 3, "```") == 0;
        if (!in_fence && is_fence) {
            in_fence = true;
            continue;
        }
        if (in_fence) {
            if (is_fence) {
                fence_body = body;
                break;
            }
            body += trimmed;
            body += '\n';
        }
    }
    if (fence_body) {
        if (fence_body->empty())
            return std::nullopt;
        return fence_body;
    }

    // No fence: accept the response whole when it already starts as a C
    // function definition (possibly preceded by comments).
    std::vector<FunctionRecord> records = extract_from_source("response.c", raw);
    if (!records.empty()) {
        size_t first_content = raw.find_first_not_of(" \t\r\n");
        if (first_content != std::string::npos && records[0].byte_begin <= first_content)
            return raw;
    }
    return std::nullopt;
}

ReplayBackend::ReplayBackend(std::filesystem::path recording_dir) : dir_(std::move(recording_dir)) {
    if (!std::filesystem::is_directory(dir_))
        throw std::runtime_error("replay recording directory does not exist: " + dir_.string());
}

BackendReply ReplayBackend::generate_raw(const PromptRequest& request) {
    std::filesystem::path file = dir_ / (request.function_id + "." + request.model_id + ".txt");
    BackendReply reply;
    if (!std::filesystem::exists(file)) {
        reply.error = "missing recording: " + file.string();
        reply.transient = false;
        return reply;
    }
    reply.text = read_file(file);
    reply.ok = true;
    return reply;
}

std::string ReplayBackend::describe() const { return "replay:" + dir_.string(); }

LiveBackendConfig load_live_backend_config(const std::filesystem::path& file) {
    json j = json::parse(read_file(file), nullptr, false);
    if (j.is_discarded())
        throw std::runtime_error("backend config is not valid JSON: " + file.string());
    LiveBackendConfig c;
    c.endpoint = j.at("endpoint").get<std::string>();
    c.api_key_env = j.value("api_key_env", "");
    c.model = j.value("model", "");
    c.temperature = j.value("temperature", 0.0);
    c.max_tokens = j.value("max_tokens", 0L);
    c.send_seed = j.value("send_seed", true);
    c.retry_limit = j.value("retry_limit", 3);
    c.timeout_sec = j.value("timeout_sec", 120L);
    c.requests_per_minute = j.value("requests_per_minute", 0.0);
    return c;
}

namespace {

// Minimal token bucket; refills continuously, one token per request.
class RateLimiter {
public:
    explicit RateLimiter(double per_minute)
        : interval_(per_minute > 0 ? 60.0 / per_minute : 0.0) {}

    void acquire() {
        if (interval_ <= 0)
            return;
        std::unique_lock<std::mutex> lock(mu_);
        auto now = std::chrono::steady_clock::now();
        if (next_slot_ > now) {
            auto wait = next_slot_ - now;
            next_slot_ += std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                std::chrono::duration<double>(interval_));
            lock.unlock();
            std::this_thread::sleep_for(wait);
            return;
        }
        next_slot_ = now + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                               std::chrono::duration<double>(interval_));
    }

private:
    double interval_;
    std::mutex mu_;
    std::chrono::steady_clock::time_point next_slot_{};
};

struct ParsedEndpoint {
    std::string base;  // scheme://host[:port]
    std::string path;
};

ParsedEndpoint split_endpoint(const std::string& endpoint) {
    auto scheme_end = endpoint.find("://");
    if (scheme_end == std::string::npos)
        throw std::runtime_error("endpoint must include a scheme: " + endpoint);
    auto path_start = endpoint.find('/', scheme_end + 3);
    if (path_start == std::string::npos)
        return {endpoint, "/"};
    return {endpoint.substr(0, path_start), endpoint.substr(path_start)};
}

}  // namespace

struct LiveBackend::Impl {
    LiveBackendConfig config;
    ParsedEndpoint endpoint;
    RateLimiter limiter;

    explicit Impl(LiveBackendConfig c)
        : config(std::move(c)),
          endpoint(split_endpoint(config.endpoint)),
          limiter(config.requests_per_minute) {}
};

LiveBackend::LiveBackend(LiveBackendConfig config)
    : impl_(std::make_unique<Impl>(std::move(config))) {}

LiveBackend::~LiveBackend() = default;

BackendReply LiveBackend::generate_raw(const PromptRequest& request) {
    impl_->limiter.acquire();

    json body{
        {"model", impl_->config.model.empty() ? request.model_id : impl_->config.model},
        {"messages",
         json::array({json{{"role", "system"}, {"content", request.system_text}},
                      json{{"role", "user"}, {"content", request.user_text}}})},
        {"temperature", impl_->config.temperature},
    };
    if (impl_->config.send_seed)
        body["seed"] = request.seed;
    if (impl_->config.max_tokens > 0)
        body["max_tokens"] = impl_->config.max_tokens;

    httplib::Client client(impl_->endpoint.base);
    client.set_connection_timeout(impl_->config.timeout_sec, 0);
    client.set_read_timeout(impl_->config.timeout_sec, 0);

    httplib::Headers headers;
    if (!impl_->config.api_key_env.empty()) {
        const char* key = std::getenv(impl_->config.api_key_env.c_str());
        if (key == nullptr || *key == '\0') {
            BackendReply r;
            r.error = "credential env var " + impl_->config.api_key_env + " is empty";
            return r;
        }
        headers.emplace("Authorization", std::string("Bearer ") + key);
    }

    auto res = client.Post(impl_->endpoint.path, headers, body.dump(), "application/json");
    BackendReply reply;
    if (!res) {
        reply.error = "transport error: " + httplib::to_string(res.error());
        reply.transient = true;
        return reply;
    }
    if (res->status == 429 || res->status >= 500) {
        reply.error = "HTTP " + std::to_string(res->status) + ": " + res->body;
        reply.transient = true;
        return reply;
    }
    if (res->status != 200) {
        reply.error = "HTTP " + std::to_string(res->status) + ": " + res->body;
        return reply;
    }

    json parsed = json::parse(res->body, nullptr, false);
    if (parsed.is_discarded() || !parsed.contains("choices") || parsed["choices"].empty()) {
        reply.error = "malformed completion response";
        return reply;
    }
    const auto& choice = parsed["choices"][0];
    if (choice.contains("message") && choice["message"].contains("content"))
        reply.text = choice["message"]["content"].get<std::string>();
    else if (choice.contains("text"))
        reply.text = choice["text"].get<std::string>();
    else {
        reply.error = "completion response carries no content";
        return reply;
    }
    reply.ok = true;
    return reply;
}

std::string LiveBackend::describe() const { return "live:" + impl_->config.endpoint; }

GenerationResult generate(const PromptRequest& request, ModelBackend& backend, int retry_limit) {
    GenerationResult result;
    result.function_id = request.function_id;
    result.model_id = request.model_id;
    result.timestamp = utc_timestamp();

    BackendReply reply;
    for (int attempt = 0; attempt <= retry_limit; ++attempt) {
        reply = backend.generate_raw(request);
        if (reply.ok || !reply.transient)
            break;
    }
    if (!reply.ok) {
        result.status = GenerationStatus::BackendError;
        result.error = reply.error;
        return result;
    }

    result.raw_response = reply.text;
    result.extracted_code = parse_response(reply.text);
    if (result.extracted_code && !result.extracted_code->empty())
        result.status = GenerationStatus::Ok;
    else {
        result.extracted_code.reset();
        result.status = GenerationStatus::Unparseable;
    }
    return result;
}

std::vector<GenerationResult> generate_batch(const std::vector<PromptRequest>& requests,
                                             ModelBackend& backend, int in_flight,
                                             int retry_limit) {
    std::vector<GenerationResult> results(requests.size());
    if (requests.empty())
        return results;
    in_flight = std::max(1, in_flight);

    std::atomic<size_t> next{0};
    auto worker = [&] {
        while (true) {
            size_t idx = next.fetch_add(1);
            if (idx >= requests.size())
                return;
            results[idx] = generate(requests[idx], backend, retry_limit);
        }
    };
    if (in_flight == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < in_flight; ++i)
            pool.emplace_back(worker);
        for (auto& t : pool)
            t.join();
    }
    return results;
}

ProbeResult contamination_probe(const FunctionRecord& record, ModelBackend& backend,
                                const std::string& project_keyword, const PromptTemplate& tmpl,
                                std::uint64_t seed) {
    PromptRequest req = render_prompt(record, tmpl, "probe", seed);
    BackendReply reply = backend.generate_raw(req);
    if (!reply.ok)
        throw std::runtime_error("contamination probe backend error: " + reply.error);

    auto to_lower = [](std::string s) {
        std::transform(s.begin(), s.end(), s.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        return s;
    };
    ProbeResult pr;
    pr.answer = reply.text;
    pr.recognized = to_lower(reply.text).find(to_lower(project_keyword)) != std::string::npos;
    return pr;
}

}  // namespace swapbench

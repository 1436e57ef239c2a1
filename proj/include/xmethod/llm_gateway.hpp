#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "xmethod/method_model.hpp"
#include "xmethod/suggestion.hpp"

namespace xmethod {

inline constexpr int kFixpointCap = 25;
inline constexpr const char* kTokenEnv = "XMETHOD_API_TOKEN";

struct LlmParams {
    double temperature = 1.2;
    int iterations = 10;
    std::string model_name = "gpt-4o";
    std::string endpoint_url = "http://127.0.0.1:8089/v1/chat/completions";
    double request_timeout = 60.0;  // seconds
    bool fixpoint = false;          // ignore `iterations`, stop when a reply adds nothing new

    void validate() const;  // throws Error(bad_input)
};

enum class CacheMode { record, replay, live };

std::string_view to_string(CacheMode m) noexcept;
CacheMode parse_cache_mode(std::string_view text);

struct FewShot {
    std::string source;  // numbered method text
    std::string answer;  // JSON reply
};

struct PromptBundle {
    std::string task_overview;
    std::string long_method_definition;
    std::optional<std::string> doc_comment;
    std::vector<FewShot> few_shot_examples;
    std::string output_format_instructions;
    std::string target_method_source;

    std::string render() const;
};

/// Pure function of the method text and the fixed template.
PromptBundle build_prompt(const LongMethod& method);

/// Method source with absolute line numbers, `150: ...`.
std::string numbered_source(const LongMethod& method);

struct RawSuggestion {
    std::string name;
    int start_line = 0;
    int end_line = 0;

    friend bool operator==(const RawSuggestion&, const RawSuggestion&) = default;
};

struct ParsedReply {
    std::vector<RawSuggestion> suggestions;
    std::vector<std::string> diagnostics;
    bool failed = false;  // nothing recognisable at all
};

/// Tolerant reader for the instructed JSON list. Falls back to scanning text
/// lines for `name ... start-end` when no JSON list is present.
ParsedReply parse_response(std::string_view raw_text);

struct RawResponse {
    int iteration = 0;
    double temperature = 0.0;
    std::string raw_text;
    std::vector<RawSuggestion> parsed;
    bool parse_failed = false;
    std::string diagnostic;
};

struct ChatRequest {
    std::string model;
    std::string prompt;
    double temperature = 0.0;
    int seed = 0;
};

nlohmann::json to_json(const ChatRequest& request);

class Transport {
public:
    virtual ~Transport() = default;
    /// Returns the reply text. Throws Error(endpoint_unreachable).
    virtual std::string complete(const ChatRequest& request) = 0;
};

/// Chat-completions POST. The bearer token is read from XMETHOD_API_TOKEN.
class HttpTransport final : public Transport {
public:
    HttpTransport(std::string endpoint_url, double timeout_seconds);
    std::string complete(const ChatRequest& request) override;

private:
    std::string base_;
    std::string path_;
    double timeout_;
};

struct CachedReply {
    std::string prompt_sha256;
    double temperature = 0.0;
    int iteration = 0;
    std::string model;
    std::string raw_text;
};

/// One JSON file per (prompt, temperature, iteration) under a directory.
class FixtureCache {
public:
    explicit FixtureCache(std::filesystem::path dir);

    static std::string key(std::string_view prompt, double temperature, int iteration);
    std::filesystem::path file_for(std::string_view prompt, double temperature, int iteration) const;
    std::optional<CachedReply> load(std::string_view prompt, double temperature, int iteration) const;
    void store(std::string_view prompt, double temperature, int iteration, std::string_view model,
               std::string_view raw_text) const;
    const std::filesystem::path& dir() const { return dir_; }

private:
    std::filesystem::path dir_;
};

struct GenerateResult {
    SuggestionSet set;
    std::vector<RawResponse> responses;
    std::vector<std::string> diagnostics;
};

/// Issues the configured number of requests (or runs to a fixpoint) and
/// folds every parsed entry into a SuggestionSet. `cache` is required for
/// record and replay, `transport` for record and live.
GenerateResult generate(const LongMethod& method, const LlmParams& params, CacheMode mode,
                        const FixtureCache* cache, Transport* transport);

}  // namespace xmethod

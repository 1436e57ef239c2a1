#include <httplib.h>

#include "xmethod/llm_gateway.hpp"

#include <cstdio>
#include <cstdlib>
#include <regex>

#include "xmethod/io.hpp"

namespace xmethod {

void LlmParams::validate() const {
    if (temperature < 0.0 || temperature > 2.0) throw Error(Errc::bad_input, "temperature must be in [0, 2]");
    if (iterations < 1) throw Error(Errc::bad_input, "iterations must be at least 1");
    if (request_timeout <= 0.0) throw Error(Errc::bad_input, "request timeout must be positive");
}

std::string_view to_string(CacheMode m) noexcept {
    switch (m) {
        case CacheMode::record: return "record";
        case CacheMode::replay: return "replay";
        case CacheMode::live: return "live";
    }
    return "replay";
}

CacheMode parse_cache_mode(std::string_view text) {
    if (text == "record") return CacheMode::record;
    if (text == "replay") return CacheMode::replay;
    if (text == "live") return CacheMode::live;
    throw Error(Errc::bad_input, "unknown cache mode '" + std::string(text) + "'");
}

namespace {

constexpr const char* kOverview =
    "You are helping a Java developer split a long method. Propose fragments of the target "
    "method that could be moved into a new private method and replaced by a call. A good "
    "fragment is a run of consecutive statements that does one job, reads and writes few "
    "local variables, and leaves at most one value for the rest of the method. Give each "
    "fragment a short camelCase name describing that job.";

constexpr const char* kDefinition =
    "A method is considered long when it mixes several responsibilities or needs scrolling "
    "to read. Such methods are harder to test and to change; pulling cohesive fragments out "
    "of them is the usual remedy.";

constexpr const char* kExampleLong =
    "10: public Report summarize(List<Order> orders) {\n"
    "11:     int count = 0;\n"
    "12:     double total = 0;\n"
    "13:     for (Order o : orders) {\n"
    "14:         count++;\n"
    "15:         total += o.amount();\n"
    "16:     }\n"
    "17:     // build the header\n"
    "18:     StringBuilder header = new StringBuilder();\n"
    "19:     header.append(\"Orders: \").append(count);\n"
    "20:     header.append(\", total: \").append(total);\n"
    "21:     String title = header.toString();\n"
    "22:     Report report = new Report(title);\n"
    "23:     report.setCount(count);\n"
    "24:     report.setTotal(total);\n"
    "25:     return report;\n"
    "26: }\n";

constexpr const char* kExampleLongAnswer =
    "[{\"function_name\": \"buildHeader\", \"line_start\": 18, \"line_end\": 21}]";

constexpr const char* kExampleShort =
    "40: void reset(Buffer buffer) {\n"
    "41:     buffer.clear();\n"
    "42:     int size = buffer.capacity();\n"
    "43:     buffer.fill(0, size);\n"
    "44:     log.info(\"reset\");\n"
    "45: }\n";

constexpr const char* kExampleShortAnswer =
    "[{\"function_name\": \"clearBuffer\", \"line_start\": 41, \"line_end\": 43}]";

constexpr const char* kFormat =
    "Answer with a JSON array and nothing else. Each element is an object with the keys "
    "\"function_name\" (string), \"line_start\" (integer) and \"line_end\" (integer). Line "
    "numbers are the ones printed before each line of the target method; both ends are "
    "inclusive. Return an empty array when nothing is worth extracting.";

std::string format_temperature(double t) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", t);
    return buf;
}

std::optional<int> as_line(const nlohmann::json& v) {
    if (v.is_number_integer()) return v.get<int>();
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (d == static_cast<double>(static_cast<int>(d))) return static_cast<int>(d);
        return std::nullopt;
    }
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        static const std::regex digits(R"(^\s*(\d+)\s*$)");
        std::smatch m;
        if (std::regex_match(s, m, digits)) return std::stoi(m[1].str());
    }
    return std::nullopt;
}

const nlohmann::json* pick(const nlohmann::json& obj, std::initializer_list<const char*> keys) {
    for (const char* k : keys) {
        if (auto it = obj.find(k); it != obj.end()) return &*it;
    }
    return nullptr;
}

void read_entries(const nlohmann::json& list, ParsedReply& out) {
    int index = 0;
    for (const auto& e : list) {
        ++index;
        const nlohmann::json* name = nullptr;
        const nlohmann::json* start = nullptr;
        const nlohmann::json* end = nullptr;
        if (e.is_object()) {
            name = pick(e, {"function_name", "name", "method_name", "functionName", "new_method_name"});
            start = pick(e, {"line_start", "start_line", "start", "lineStart", "startLine", "from"});
            end = pick(e, {"line_end", "end_line", "end", "lineEnd", "endLine", "to"});
        } else if (e.is_array() && e.size() == 3) {
            name = &e[0];
            start = &e[1];
            end = &e[2];
        }
        if (!start || !end) {
            out.diagnostics.push_back("entry " + std::to_string(index) + ": missing line numbers");
            continue;
        }
        const auto s = as_line(*start);
        const auto t = as_line(*end);
        if (!s || !t) {
            out.diagnostics.push_back("entry " + std::to_string(index) + ": non-numeric line numbers");
            continue;
        }
        if (*s > *t) {
            out.diagnostics.push_back("entry " + std::to_string(index) + ": start " + std::to_string(*s) +
                                      " after end " + std::to_string(*t));
            continue;
        }
        std::string n = name && name->is_string() ? name->get<std::string>() : std::string{};
        out.suggestions.push_back({sanitize_name(n), *s, *t});
    }
}

// Index one past the bracket matching text[open], skipping string contents.
std::size_t balanced_end(std::string_view text, std::size_t open) {
    const char o = text[open];
    const char c = o == '[' ? ']' : '}';
    int depth = 0;
    bool in_string = false;
    for (std::size_t i = open; i < text.size(); ++i) {
        const char ch = text[i];
        if (in_string) {
            if (ch == '\\') ++i;
            else if (ch == '"') in_string = false;
            continue;
        }
        if (ch == '"') in_string = true;
        else if (ch == o) ++depth;
        else if (ch == c && --depth == 0) return i + 1;
    }
    return std::string_view::npos;
}

std::optional<nlohmann::json> find_list(std::string_view text) {
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] != '[' && text[i] != '{') continue;
        const auto end = balanced_end(text, i);
        if (end == std::string_view::npos) continue;
        auto parsed = nlohmann::json::parse(text.substr(i, end - i), nullptr, false);
        if (parsed.is_discarded()) continue;
        if (parsed.is_array()) return parsed;
        if (parsed.is_object()) {
            if (auto it = parsed.find("suggestions"); it != parsed.end() && it->is_array()) return *it;
        }
    }
    return std::nullopt;
}

std::vector<std::string> fenced_blocks(std::string_view text) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        const auto open = text.find("```", pos);
        if (open == std::string_view::npos) break;
        const auto body = text.find('\n', open);
        if (body == std::string_view::npos) break;
        const auto close = text.find("```", body);
        if (close == std::string_view::npos) break;
        out.emplace_back(text.substr(body + 1, close - body - 1));
        pos = close + 3;
    }
    return out;
}

}  // namespace

std::string numbered_source(const LongMethod& method) {
    std::string out;
    for (int l = method.start_line; l <= method.end_line; ++l) {
        out += std::to_string(l) + ": " + method.line_text(l) + "\n";
    }
    return out;
}

PromptBundle build_prompt(const LongMethod& method) {
    PromptBundle p;
    p.task_overview = kOverview;
    p.long_method_definition = kDefinition;
    p.doc_comment = method.doc_comment;
    p.few_shot_examples = {{kExampleLong, kExampleLongAnswer}, {kExampleShort, kExampleShortAnswer}};
    p.output_format_instructions = kFormat;
    p.target_method_source = numbered_source(method);
    return p;
}

std::string PromptBundle::render() const {
    std::string out;
    out += "### Task\n" + task_overview + "\n\n";
    out += "### Long methods\n" + long_method_definition + "\n\n";
    if (doc_comment) out += "### Method documentation\n" + *doc_comment + "\n\n";
    for (std::size_t i = 0; i < few_shot_examples.size(); ++i) {
        out += "### Example " + std::to_string(i + 1) + "\n" + few_shot_examples[i].source + "Answer:\n" +
               few_shot_examples[i].answer + "\n\n";
    }
    out += "### Output format\n" + output_format_instructions + "\n\n";
    out += "### Target method\n" + target_method_source;
    return out;
}

ParsedReply parse_response(std::string_view raw_text) {
    ParsedReply out;
    std::vector<std::string> candidates = fenced_blocks(raw_text);
    candidates.emplace_back(raw_text);
    for (const auto& c : candidates) {
        if (auto list = find_list(c)) {
            read_entries(*list, out);
            return out;
        }
    }

    // No JSON: accept lines such as `readHeader: lines 12-18` or `1. foo (12, 18)`.
    static const std::regex line_re(
        R"(([A-Za-z_$][A-Za-z0-9_$]*)[^A-Za-z0-9_$\n]+(?:lines?\s+)?(\d+)\s*(?:-|to|,)\s*(\d+))");
    std::string text(raw_text);
    for (auto it = std::sregex_iterator(text.begin(), text.end(), line_re); it != std::sregex_iterator(); ++it) {
        const auto& m = *it;
        const int s = std::stoi(m[2].str());
        const int e = std::stoi(m[3].str());
        if (s > e) {
            out.diagnostics.push_back("text entry '" + m[0].str() + "': start after end");
            continue;
        }
        out.suggestions.push_back({sanitize_name(m[1].str()), s, e});
    }
    if (out.suggestions.empty() && out.diagnostics.empty()) {
        out.failed = true;
        out.diagnostics.push_back("no suggestion list found");
    }
    return out;
}

nlohmann::json to_json(const ChatRequest& request) {
    return {{"model", request.model},
            {"messages", nlohmann::json::array({{{"role", "user"}, {"content", request.prompt}}})},
            {"temperature", request.temperature},
            {"seed", request.seed}};
}

HttpTransport::HttpTransport(std::string endpoint_url, double timeout_seconds) : timeout_(timeout_seconds) {
    const auto scheme = endpoint_url.find("://");
    const auto slash = endpoint_url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
    if (scheme == std::string::npos) throw Error(Errc::bad_input, "endpoint needs a scheme: " + endpoint_url);
    base_ = endpoint_url.substr(0, slash);
    path_ = slash == std::string::npos ? "/v1/chat/completions" : endpoint_url.substr(slash);
}

std::string HttpTransport::complete(const ChatRequest& request) {
    httplib::Client client(base_);
    const auto secs = static_cast<time_t>(timeout_);
    client.set_connection_timeout(secs);
    client.set_read_timeout(secs);
    httplib::Headers headers;
    if (const char* token = std::getenv(kTokenEnv); token && *token) {
        headers.emplace("Authorization", std::string("Bearer ") + token);
    }
    auto res = client.Post(path_, headers, to_json(request).dump(), "application/json");
    if (!res) {
        throw Error(Errc::endpoint_unreachable, base_ + path_ + ": " + httplib::to_string(res.error()));
    }
    if (res->status != 200) {
        throw Error(Errc::endpoint_unreachable, base_ + path_ + ": HTTP " + std::to_string(res->status));
    }
    const auto body = nlohmann::json::parse(res->body, nullptr, false);
    if (body.is_discarded()) return res->body;
    try {
        return body.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception&) {
        return res->body;
    }
}

FixtureCache::FixtureCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::string FixtureCache::key(std::string_view prompt, double temperature, int iteration) {
    std::string material(prompt);
    material += '\x1f';
    material += format_temperature(temperature);
    material += '\x1f';
    material += std::to_string(iteration);
    return sha256_hex(material);
}

std::filesystem::path FixtureCache::file_for(std::string_view prompt, double temperature, int iteration) const {
    return dir_ / (key(prompt, temperature, iteration) + ".json");
}

std::optional<CachedReply> FixtureCache::load(std::string_view prompt, double temperature, int iteration) const {
    const auto path = file_for(prompt, temperature, iteration);
    if (!std::filesystem::exists(path)) return std::nullopt;
    const auto j = nlohmann::json::parse(read_file(path), nullptr, false);
    if (j.is_discarded()) throw Error(Errc::io_failure, "corrupt fixture " + path.string());
    CachedReply r;
    r.prompt_sha256 = j.value("prompt_sha256", "");
    r.temperature = j.value("temperature", 0.0);
    r.iteration = j.value("iteration", 0);
    r.model = j.value("model", "");
    r.raw_text = j.value("raw_text", "");
    return r;
}

void FixtureCache::store(std::string_view prompt, double temperature, int iteration, std::string_view model,
                         std::string_view raw_text) const {
    std::filesystem::create_directories(dir_);
    const nlohmann::json j = {{"prompt_sha256", sha256_hex(prompt)},
                              {"temperature", temperature},
                              {"iteration", iteration},
                              {"model", model},
                              {"raw_text", raw_text}};
    write_file_atomic(file_for(prompt, temperature, iteration), j.dump(2) + "\n");
}

GenerateResult generate(const LongMethod& method, const LlmParams& params, CacheMode mode, const FixtureCache* cache,
                        Transport* transport) {
    params.validate();
    if (mode != CacheMode::live && !cache) throw Error(Errc::bad_input, "cache directory required");
    if (mode != CacheMode::replay && !transport) throw Error(Errc::bad_input, "transport required");

    const std::string prompt = build_prompt(method).render();
    const int rounds = params.fixpoint ? kFixpointCap : params.iterations;
    GenerateResult out;
    for (int i = 0; i < rounds; ++i) {
        std::string text;
        if (mode == CacheMode::replay) {
            auto hit = cache->load(prompt, params.temperature, i);
            if (!hit) {
                throw Error(Errc::missing_fixture, "no fixture for " + method.name + " at T=" +
                                                       format_temperature(params.temperature) + ", iteration " +
                                                       std::to_string(i) + " (" +
                                                       cache->file_for(prompt, params.temperature, i).string() + ")");
            }
            text = std::move(hit->raw_text);
        } else {
            try {
                text = transport->complete({params.model_name, prompt, params.temperature, i});
            } catch (const Error& e) {
                throw Error(e.code(), "iteration " + std::to_string(i) + ": " + e.what());
            }
            if (mode == CacheMode::record) cache->store(prompt, params.temperature, i, params.model_name, text);
        }

        auto parsed = parse_response(text);
        RawResponse r;
        r.iteration = i;
        r.temperature = params.temperature;
        r.raw_text = text;
        r.parse_failed = parsed.failed;
        for (const auto& d : parsed.diagnostics) {
            out.diagnostics.push_back("iteration " + std::to_string(i) + ": " + d);
            if (!r.diagnostic.empty()) r.diagnostic += "; ";
            r.diagnostic += d;
        }
        const std::size_t before = out.set.size();
        for (const auto& s : parsed.suggestions) out.set.add(s.name, {s.start_line, s.end_line});
        r.parsed = std::move(parsed.suggestions);
        out.responses.push_back(std::move(r));
        if (params.fixpoint && i > 0 && out.set.size() == before) break;
    }
    return out;
}

}  // namespace xmethod

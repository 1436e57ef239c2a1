#pragma once

// Deterministic stand-in for a chat model. It reads the numbered target
// method out of a prompt and proposes fragments a model would plausibly
// offer: commented paragraphs, blank-line paragraphs, loop/if blocks, near
// misses of those, one-liners, the whole body and ranges past the method.
// Sampling sharpens toward the heaviest candidates as temperature drops.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "xmethod/llm_gateway.hpp"

namespace mockllm {

struct NumberedLine {
    int number;
    std::string text;
};

struct Candidate {
    std::string name;
    int start;
    int end;
    double weight;
};

inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::vector<NumberedLine> target_lines(std::string_view prompt) {
    std::vector<NumberedLine> out;
    const auto at = prompt.find("### Target method\n");
    if (at == std::string_view::npos) return out;
    std::size_t pos = at + 18;
    while (pos < prompt.size()) {
        auto nl = prompt.find('\n', pos);
        if (nl == std::string_view::npos) nl = prompt.size();
        const auto line = prompt.substr(pos, nl - pos);
        const auto colon = line.find(": ");
        if (colon != std::string_view::npos && colon > 0 &&
            std::all_of(line.begin(), line.begin() + static_cast<std::ptrdiff_t>(colon),
                        [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
            out.push_back({std::stoi(std::string(line.substr(0, colon))), std::string(line.substr(colon + 2))});
        }
        pos = nl + 1;
    }
    return out;
}

inline std::string trimmed(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return {};
    return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

inline bool is_comment(const std::string& s) {
    const auto t = trimmed(s);
    return t.rfind("//", 0) == 0 || t.rfind("/*", 0) == 0 || t.rfind("*", 0) == 0;
}

inline std::string camel(const std::string& words, const std::string& fallback) {
    std::string out;
    bool upper = false;
    for (char c : words) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            if (out.empty()) {
                if (std::isdigit(static_cast<unsigned char>(c))) continue;
                out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            } else {
                out += upper ? static_cast<char>(std::toupper(static_cast<unsigned char>(c))) : c;
            }
            upper = false;
        } else {
            upper = !out.empty();
        }
        if (out.size() > 40) break;
    }
    return out.empty() ? fallback : out;
}

// Brace nesting before each line, relative to the body.
inline std::vector<int> depths(const std::vector<NumberedLine>& lines) {
    std::vector<int> out;
    int depth = 0;
    for (const auto& l : lines) {
        out.push_back(depth);
        bool in_str = false;
        for (std::size_t i = 0; i < l.text.size(); ++i) {
            const char c = l.text[i];
            if (c == '"' && (i == 0 || l.text[i - 1] != '\\')) in_str = !in_str;
            if (in_str) continue;
            if (c == '/' && i + 1 < l.text.size() && l.text[i + 1] == '/') break;
            if (c == '{') ++depth;
            if (c == '}') --depth;
        }
    }
    return out;
}

inline std::vector<Candidate> candidates(const std::vector<NumberedLine>& lines) {
    std::vector<Candidate> out;
    if (lines.size() < 4) return out;
    const auto depth = depths(lines);
    const std::size_t first = 1;
    const std::size_t last = lines.size() - 2;  // last body line
    auto num = [&](std::size_t i) { return lines[i].number; };
    auto blank = [&](std::size_t i) { return trimmed(lines[i].text).empty(); };

    // Paragraph starting at i at nesting d: runs until a blank line, a comment or a drop below d.
    auto paragraph_end = [&](std::size_t i) {
        const int d = depth[i];
        std::size_t k = i;
        while (k + 1 <= last && !blank(k + 1) && !is_comment(lines[k + 1].text) && depth[k + 1] >= d &&
               !(trimmed(lines[k + 1].text).rfind('}', 0) == 0 && depth[k + 1] == d)) {
            ++k;
        }
        // Do not leave a block open at the end.
        while (k + 1 <= last && depth[k + 1] > d) ++k;
        return k;
    };

    for (std::size_t i = first; i <= last; ++i) {
        if (!is_comment(lines[i].text) || i + 1 > last || blank(i + 1) || is_comment(lines[i + 1].text)) continue;
        const std::size_t end = paragraph_end(i + 1);
        if (end <= i + 1) continue;
        const std::string name = camel(trimmed(lines[i].text), "extractedStep");
        out.push_back({name, num(i + 1), num(end), 8.0});
        out.push_back({name, num(i), num(end), 1.0});
    }
    for (std::size_t i = first; i <= last; ++i) {
        if (blank(i) || is_comment(lines[i].text)) continue;
        if (i > first && !blank(i - 1) && !is_comment(lines[i - 1].text)) continue;
        const std::size_t end = paragraph_end(i);
        if (end > i) out.push_back({"handleStep" + std::to_string(num(i)), num(i), num(end), 4.0});
    }
    for (std::size_t i = first; i <= last; ++i) {
        const auto t = trimmed(lines[i].text);
        if (t.empty() || t.back() != '{') continue;
        std::string kw;
        for (const char* k : {"for", "while", "if", "try", "do", "switch"}) {
            const std::string key(k);
            if (t.rfind(key, 0) == 0 && (t.size() == key.size() || !std::isalnum(static_cast<unsigned char>(t[key.size()])))) kw = key;
        }
        if (kw.empty()) continue;
        std::size_t k = i + 1;
        while (k <= last && depth[k + 1] > depth[i]) ++k;
        if (k > last) continue;
        const std::string name = kw == "for" || kw == "while" || kw == "do" ? "processItems" : "handle" + std::string(1, static_cast<char>(std::toupper(kw[0]))) + kw.substr(1) + "Case";
        out.push_back({name, num(i), num(k), 3.0});
    }

    const std::size_t structured = out.size();
    for (std::size_t c = 0; c < structured; ++c) {
        const Candidate base = out[c];
        if (base.weight < 3.0) continue;
        out.push_back({base.name, base.start + 1, base.end, 0.8});
        out.push_back({base.name, base.start, base.end + 1, 0.8});
        if (base.end - base.start > 2) out.push_back({base.name, base.start, base.end - 1, 0.6});
    }
    for (std::size_t i = first; i <= last; i += 3) {
        if (!blank(i) && !is_comment(lines[i].text)) out.push_back({"computeValue", num(i), num(i), 0.4});
    }
    out.push_back({"doWork", num(first), num(last), 1.0});
    out.push_back({"finishUp", num(last) - 2, num(last) + 4, 0.5});
    return out;
}

inline double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline std::vector<Candidate> sample(std::vector<Candidate> pool, double temperature, std::mt19937_64& rng,
                                     std::size_t k) {
    std::vector<Candidate> chosen;
    if (temperature <= 0.0) {
        std::stable_sort(pool.begin(), pool.end(), [](const Candidate& a, const Candidate& b) { return a.weight > b.weight; });
        pool.resize(std::min(k, pool.size()));
        return pool;
    }
    while (chosen.size() < k && !pool.empty()) {
        double total = 0.0;
        for (const auto& c : pool) total += std::pow(c.weight, 1.0 / temperature);
        double r = unit(rng) * total;
        std::size_t pick = pool.size() - 1;
        for (std::size_t i = 0; i < pool.size(); ++i) {
            r -= std::pow(pool[i].weight, 1.0 / temperature);
            if (r <= 0.0) {
                pick = i;
                break;
            }
        }
        chosen.push_back(pool[pick]);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
    }
    return chosen;
}

inline std::string reply(std::string_view prompt, double temperature, int seed) {
    const auto lines = target_lines(prompt);
    const auto t_bits = static_cast<std::uint64_t>(std::llround(temperature * 1000.0));
    std::mt19937_64 rng(fnv1a(prompt) ^ (t_bits * 0x9e3779b97f4a7c15ULL) ^ (static_cast<std::uint64_t>(seed) << 17));
    const std::size_t k = temperature <= 0.0 ? 3 : 3 + static_cast<std::size_t>(rng() % 3);
    const auto picks = sample(candidates(lines), temperature, rng, k);

    const double style = temperature <= 0.0 ? 0.0 : unit(rng);
    if (style > 0.97 && temperature >= 1.0) return "I could not find a clear fragment to extract in this method.";

    nlohmann::json list = nlohmann::json::array();
    for (const auto& c : picks) {
        nlohmann::json e = {{"function_name", c.name}, {"line_start", c.start}, {"line_end", c.end}};
        if (style > 0.85) e = {{"name", c.name}, {"start_line", std::to_string(c.start)}, {"end_line", std::to_string(c.end)}};
        list.push_back(std::move(e));
    }
    if (style > 0.85) return nlohmann::json{{"suggestions", list}}.dump();
    if (style > 0.7) return "Here are some fragments worth extracting:\n\n```json\n" + list.dump(2) + "\n```\n\nEach one keeps a single responsibility.";
    return list.dump();
}

class MockTransport final : public xmethod::Transport {
public:
    std::string complete(const xmethod::ChatRequest& request) override {
        ++calls_;
        return reply(request.prompt, request.temperature, request.seed);
    }
    int calls() const { return calls_; }

private:
    int calls_ = 0;
};

}  // namespace mockllm

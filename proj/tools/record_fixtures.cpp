// Rebuilds the replay caches under fixtures/. The corpus cache comes from the
// deterministic mock model; the motivating cache from hand-written replies.

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "mock_llm.hpp"
#include "xmethod/evaluation.hpp"
#include "xmethod/io.hpp"

namespace fs = std::filesystem;
using namespace xmethod;

namespace {

class ScriptedTransport final : public Transport {
public:
    explicit ScriptedTransport(std::vector<std::string> replies) : replies_(std::move(replies)) {}
    std::string complete(const ChatRequest& request) override {
        return replies_.at(static_cast<std::size_t>(request.seed));
    }

private:
    std::vector<std::string> replies_;
};

void record_corpus(const fs::path& root) {
    const auto corpus = Corpus::load(root / "oracle.jsonl");
    fs::remove_all(root / "cache");
    const FixtureCache cache(root / "cache");
    mockllm::MockTransport mock;
    std::map<MethodKey, bool> done;
    for (const auto& e : corpus.entries) {
        if (done[key_of(e)]) continue;
        done[key_of(e)] = true;
        const auto path = corpus.source_path(e);
        const auto method = parse_method(read_file(path), e.host(), path);
        for (double t : default_sweep_temperatures()) {
            LlmParams p;
            p.temperature = t;
            p.iterations = 10;
            generate(method, p, CacheMode::record, &cache, &mock);
        }
    }
    std::printf("corpus: %zu methods, %d requests\n", done.size(), mock.calls());
}

void record_motivating(const fs::path& dir) {
    const auto replies = nlohmann::json::parse(read_file(dir / "replies.json"));
    const auto path = dir / "AllStoreHolder.java";
    const auto source = read_file(path);
    const auto loc = locate_method(source, replies.at("method").get<std::string>());
    if (!loc) throw Error(Errc::bad_input, "motivating method not found");
    const auto method = parse_method(source, LineRange{loc->start_line, loc->end_line}, path);

    LlmParams p;
    p.temperature = replies.at("temperature").get<double>();
    p.iterations = static_cast<int>(replies.at("replies").size());
    fs::remove_all(dir / "cache");
    const FixtureCache cache(dir / "cache");
    ScriptedTransport script(replies.at("replies").get<std::vector<std::string>>());
    const auto r = generate(method, p, CacheMode::record, &cache, &script);
    std::printf("motivating: %d replies, %zu distinct suggestions\n", p.iterations, r.set.size());
}

}  // namespace

int main(int argc, char** argv) {
    const fs::path fixtures = argc > 1 ? argv[1] : "fixtures";
    try {
        record_motivating(fixtures / "motivating");
        record_corpus(fixtures / "corpus");
    } catch (const std::exception& e) {
        std::fprintf(stderr, "record_fixtures: %s\n", e.what());
        return 1;
    }
    return 0;
}

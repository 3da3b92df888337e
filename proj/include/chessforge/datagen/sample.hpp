#ifndef CHESSFORGE_DATAGEN_SAMPLE_HPP
#define CHESSFORGE_DATAGEN_SAMPLE_HPP

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "chessforge/core/board.hpp"

namespace chessforge {

enum class SampleTask {
    best_move,
    best_line,
    fba,
    vabp,
    guided_synthetic,
    rejection_sampled,
};

inline std::string sample_task_name(SampleTask t) {
    switch (t) {
    case SampleTask::best_move: return "best_move";
    case SampleTask::best_line: return "best_line";
    case SampleTask::fba: return "fba";
    case SampleTask::vabp: return "vabp";
    case SampleTask::guided_synthetic: return "guided_synthetic";
    case SampleTask::rejection_sampled: return "rejection_sampled";
    }
    throw std::logic_error("unreachable");
}

inline SampleTask parse_sample_task(const std::string& name) {
    if (name == "best_move") return SampleTask::best_move;
    if (name == "best_line") return SampleTask::best_line;
    if (name == "fba") return SampleTask::fba;
    if (name == "vabp") return SampleTask::vabp;
    if (name == "guided_synthetic") return SampleTask::guided_synthetic;
    if (name == "rejection_sampled") return SampleTask::rejection_sampled;
    throw ParseError("unknown sample task '" + name + "'");
}

// One training record. meta is a string map so records stay schema-free;
// std::map keeps the key order sorted and therefore the serialization
// deterministic.
struct Sample {
    std::string prompt;
    std::string response;
    SampleTask task = SampleTask::best_move;
    std::string fen;
    std::map<std::string, std::string> meta;

    bool operator==(const Sample&) const = default;
};

inline void validate_sample(const Sample& s) {
    if (s.prompt.empty())
        throw ChessError("sample prompt is empty");
    if (s.response.empty())
        throw ChessError("sample response is empty");
    parse_fen(s.fen);
    bool seeded = s.task == SampleTask::best_line ||
                  s.task == SampleTask::fba || s.task == SampleTask::vabp;
    if (seeded && !s.meta.count("seed"))
        throw ChessError("sample of task " + sample_task_name(s.task) +
                         " is missing meta.seed");
}

inline nlohmann::ordered_json sample_to_json(const Sample& s) {
    nlohmann::ordered_json j;
    j["prompt"] = s.prompt;
    j["response"] = s.response;
    j["task"] = sample_task_name(s.task);
    j["fen"] = s.fen;
    nlohmann::ordered_json meta = nlohmann::ordered_json::object();
    for (const auto& [k, v] : s.meta)
        meta[k] = v;
    j["meta"] = meta;
    return j;
}

inline Sample sample_from_json(const nlohmann::json& j) {
    Sample s;
    s.prompt = j.at("prompt").get<std::string>();
    s.response = j.at("response").get<std::string>();
    s.task = parse_sample_task(j.at("task").get<std::string>());
    s.fen = j.at("fen").get<std::string>();
    for (const auto& [k, v] : j.at("meta").items())
        s.meta[k] = v.get<std::string>();
    return s;
}

// Writes through a sibling temp file and renames into place, so readers
// never observe a half-written dataset.
inline void write_text_atomic(const std::filesystem::path& path,
                              const std::string& content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw ChessError("cannot open " + tmp.string() + " for writing");
        out << content;
        if (!out)
            throw ChessError("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

inline std::string samples_to_jsonl(const std::vector<Sample>& samples) {
    std::string out;
    for (const Sample& s : samples) {
        out += sample_to_json(s).dump();
        out += '\n';
    }
    return out;
}

inline void write_samples_jsonl(const std::filesystem::path& path,
                                const std::vector<Sample>& samples) {
    write_text_atomic(path, samples_to_jsonl(samples));
}

inline std::vector<Sample>
read_samples_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ChessError("cannot open " + path.string());
    std::vector<Sample> out;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        try {
            out.push_back(sample_from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(path.string() + ":" + std::to_string(lineno) +
                             ": " + e.what());
        }
    }
    return out;
}

} // namespace chessforge

#endif

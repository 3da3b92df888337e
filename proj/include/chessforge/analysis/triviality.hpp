#ifndef CHESSFORGE_ANALYSIS_TRIVIALITY_HPP
#define CHESSFORGE_ANALYSIS_TRIVIALITY_HPP

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "chessforge/core/types.hpp"

namespace chessforge {

// One validation token's predicted probability, as logged during training.
struct TokenProbRecord {
    std::string dataset;
    std::string sample_id;
    long token_index = 0;
    double prob = 0.0;
    std::optional<std::string> question_type;
    std::optional<std::string> position_tag;

    bool operator==(const TokenProbRecord&) const = default;
};

// Tokens above this probability count as trivially predicted.
inline constexpr double kTrivialityThreshold = 0.995;

inline void validate_token_prob(const TokenProbRecord& rec) {
    if (rec.token_index < 0)
        throw ChessError("token_index must be >= 0");
    if (!(rec.prob >= 0.0 && rec.prob <= 1.0))
        throw ChessError("prob must lie in [0, 1], got " +
                         std::to_string(rec.prob));
}

inline nlohmann::ordered_json token_prob_to_json(const TokenProbRecord& rec) {
    validate_token_prob(rec);
    nlohmann::ordered_json j;
    j["dataset"] = rec.dataset;
    j["sample_id"] = rec.sample_id;
    j["token_index"] = rec.token_index;
    j["prob"] = rec.prob;
    if (rec.question_type)
        j["question_type"] = *rec.question_type;
    if (rec.position_tag)
        j["position_tag"] = *rec.position_tag;
    return j;
}

inline TokenProbRecord token_prob_from_json(const nlohmann::json& j) {
    TokenProbRecord rec;
    try {
        rec.dataset = j.at("dataset").get<std::string>();
        rec.sample_id = j.at("sample_id").get<std::string>();
        rec.token_index = j.at("token_index").get<long>();
        rec.prob = j.at("prob").get<double>();
        if (j.contains("question_type"))
            rec.question_type = j.at("question_type").get<std::string>();
        if (j.contains("position_tag"))
            rec.position_tag = j.at("position_tag").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad token-prob record: ") + e.what());
    }
    validate_token_prob(rec);
    return rec;
}

inline std::vector<TokenProbRecord>
read_token_probs(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ChessError("cannot open probability log: " + path);
    std::vector<TokenProbRecord> out;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        try {
            out.push_back(
                token_prob_from_json(nlohmann::json::parse(line)));
        } catch (const ChessError& e) {
            throw ParseError(path + ":" + std::to_string(line_no) + ": " +
                             e.what());
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(path + ":" + std::to_string(line_no) + ": " +
                             e.what());
        }
    }
    return out;
}

// Reads several log files concurrently; the merged order is by position in
// the path list, so the result does not depend on thread timing.
inline std::vector<TokenProbRecord>
read_token_probs_many(const std::vector<std::string>& paths) {
    std::vector<std::future<std::vector<TokenProbRecord>>> jobs;
    jobs.reserve(paths.size());
    for (const std::string& p : paths)
        jobs.push_back(std::async(std::launch::async,
                                  [p] { return read_token_probs(p); }));
    std::vector<TokenProbRecord> out;
    for (auto& job : jobs) {
        auto part = job.get();
        out.insert(out.end(), part.begin(), part.end());
    }
    return out;
}

// Fraction of tokens predicted with probability above the threshold.
inline double
triviality_fraction(const std::vector<TokenProbRecord>& records,
                    double threshold = kTrivialityThreshold) {
    if (records.empty())
        throw ChessError("triviality over an empty record set is undefined");
    long above = 0;
    for (const TokenProbRecord& rec : records)
        above += rec.prob > threshold ? 1 : 0;
    return static_cast<double>(above) / static_cast<double>(records.size());
}

enum class TrivialityGroup { dataset, question_type, position_tag };

inline std::string triviality_group_name(TrivialityGroup g) {
    switch (g) {
    case TrivialityGroup::dataset: return "dataset";
    case TrivialityGroup::question_type: return "question_type";
    case TrivialityGroup::position_tag: return "position_tag";
    }
    return "?";
}

inline TrivialityGroup parse_triviality_group(const std::string& name) {
    if (name == "dataset") return TrivialityGroup::dataset;
    if (name == "question_type") return TrivialityGroup::question_type;
    if (name == "position_tag") return TrivialityGroup::position_tag;
    throw ParseError("unknown grouping key: '" + name + "'");
}

struct TrivialityRow {
    std::string group;
    long tokens = 0;
    double token_share = 0.0;      // group count / total count
    double trivial_fraction = 0.0; // per-group triviality_fraction
};

// Per-group triviality plus each group's share of all tokens, sorted by
// group name. Records missing the grouping field land under "(none)".
inline std::vector<TrivialityRow>
triviality_grouped(const std::vector<TokenProbRecord>& records,
                   TrivialityGroup group_by,
                   double threshold = kTrivialityThreshold) {
    if (records.empty())
        throw ChessError("triviality over an empty record set is undefined");
    std::map<std::string, std::pair<long, long>> groups; // tokens, above
    for (const TokenProbRecord& rec : records) {
        std::string key;
        switch (group_by) {
        case TrivialityGroup::dataset:
            key = rec.dataset;
            break;
        case TrivialityGroup::question_type:
            key = rec.question_type.value_or("(none)");
            break;
        case TrivialityGroup::position_tag:
            key = rec.position_tag.value_or("(none)");
            break;
        }
        auto& [tokens, above] = groups[key];
        tokens++;
        above += rec.prob > threshold ? 1 : 0;
    }
    std::vector<TrivialityRow> rows;
    for (const auto& [key, ta] : groups) {
        TrivialityRow row;
        row.group = key;
        row.tokens = ta.first;
        row.token_share = static_cast<double>(ta.first) / records.size();
        row.trivial_fraction =
            static_cast<double>(ta.second) / ta.first;
        rows.push_back(row);
    }
    return rows;
}

struct MoveQualityHistogram {
    int n_bins = 0;
    long total = 0;
    std::vector<long> counts;
    std::vector<double> frequencies;

    // Bin i covers [i/n_bins, (i+1)/n_bins); the last bin also takes 1.0.
    double bin_low(int i) const {
        return static_cast<double>(i) / n_bins;
    }
    double bin_high(int i) const {
        return static_cast<double>(i + 1) / n_bins;
    }
};

// Equal-width histogram over [0, 1] for normalized move-quality scores.
inline MoveQualityHistogram
move_quality_histogram(const std::vector<double>& rank_scores, int n_bins) {
    if (n_bins < 1)
        throw ChessError("histogram needs at least one bin");
    MoveQualityHistogram h;
    h.n_bins = n_bins;
    h.counts.assign(n_bins, 0);
    for (double s : rank_scores) {
        if (!(s >= 0.0 && s <= 1.0))
            throw ChessError("rank score outside [0, 1]: " +
                             std::to_string(s));
        int bin = std::min(n_bins - 1,
                           static_cast<int>(std::floor(s * n_bins)));
        h.counts[bin]++;
        h.total++;
    }
    h.frequencies.assign(n_bins, 0.0);
    if (h.total > 0)
        for (int i = 0; i < n_bins; ++i)
            h.frequencies[i] =
                static_cast<double>(h.counts[i]) / h.total;
    return h;
}

} // namespace chessforge

#endif

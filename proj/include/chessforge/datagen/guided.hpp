#ifndef CHESSFORGE_DATAGEN_GUIDED_HPP
#define CHESSFORGE_DATAGEN_GUIDED_HPP

#include <cctype>
#include <chrono>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "chessforge/datagen/sample.hpp"
#include "chessforge/engine/session.hpp"
#include "chessforge/eval/scoring.hpp"
#include "chessforge/format/board_format.hpp"
#include "chessforge/prompts/instructions.hpp"

namespace chessforge {

struct TeacherError : ChessError {
    using ChessError::ChessError;
};

struct TeacherConfig {
    std::string endpoint; // http://host:port/path
    std::string model;
    double temperature = 0.7;
    int max_tokens = 1024;
    int timeout_ms = 30000;
    int retries = 2;
    int backoff_ms = 100;
    // Dotted path to the generated text inside the response body; numeric
    // segments index into arrays.
    std::string response_text_path = "choices.0.message.content";

    void validate() const {
        if (endpoint.empty())
            throw ChessError("teacher endpoint is empty");
        if (retries < 0)
            throw ChessError("teacher retries must be >= 0");
        if (timeout_ms < 1 || max_tokens < 1)
            throw ChessError("teacher timeout and max_tokens must be >= 1");
    }
};

// Everything needed to later verify a teacher completion against the
// engine's ground truth.
struct GuidedAudit {
    std::string begin_fen;
    std::string end_fen;
    std::vector<Move> line; // candidate first, then engine replies
    int delta_cp = 0;       // original mover's perspective
};

// Prompt showing the begin board, the candidate plus up to four engine
// plies, and the end board, asking for reasoning and a quality verdict.
inline std::pair<std::string, GuidedAudit>
gen_guided_prompt(const Board& board, const Move& candidate,
                  EngineSession& session,
                  BoardFormat format = BoardFormat::visual_ascii,
                  int total_plies = 5) {
    if (total_plies < 1)
        throw ChessError("guided prompt needs total_plies >= 1");
    GuidedAudit audit;
    audit.begin_fen = emit_fen(board);
    audit.line.push_back(candidate);
    Board cur = apply_move(board, candidate);
    if (total_plies > 1 && !is_terminal(cur)) {
        BestLine continuation = session.best_line(cur, total_plies - 1);
        for (const Move& m : continuation.line) {
            cur = apply_legal(cur, m);
            audit.line.push_back(m);
        }
    }
    audit.end_fen = emit_fen(cur);

    int start = session.evaluate(board).value;
    int end_raw = session.evaluate(cur).value;
    int end = cur.side_to_move == board.side_to_move ? end_raw : -end_raw;
    audit.delta_cp = end - start;

    std::string line_text;
    for (const Move& m : audit.line)
        line_text += (line_text.empty() ? "" : " ") + m.uci();

    std::string prompt = std::string(prompts::kGuidedVerdictInstruction) +
                         "\n\nBegin board:\n" +
                         render_prompt_board(board, format) +
                         "\nCandidate move: " + candidate.uci() +
                         "\nLine: " + line_text + "\n\nEnd board:\n" +
                         render_prompt_board(cur, format);
    return {prompt, audit};
}

namespace detail {

inline nlohmann::json json_at_path(const nlohmann::json& body,
                                   const std::string& path) {
    nlohmann::json cur = body;
    size_t i = 0;
    while (i < path.size()) {
        size_t dot = path.find('.', i);
        std::string seg =
            path.substr(i, dot == std::string::npos ? std::string::npos
                                                    : dot - i);
        i = dot == std::string::npos ? path.size() : dot + 1;
        if (!seg.empty() && seg.find_first_not_of("0123456789") ==
                                std::string::npos) {
            size_t idx = std::stoul(seg);
            if (!cur.is_array() || idx >= cur.size())
                throw TeacherError("response body lacks array index " + seg);
            cur = cur[idx];
        } else {
            if (!cur.is_object() || !cur.contains(seg))
                throw TeacherError("response body lacks field '" + seg + "'");
            cur = cur[seg];
        }
    }
    return cur;
}

struct ParsedEndpoint {
    std::string base; // scheme://host:port
    std::string path;
};

inline ParsedEndpoint parse_endpoint(const std::string& url) {
    size_t scheme = url.find("://");
    if (scheme == std::string::npos)
        throw ChessError("endpoint needs a scheme: " + url);
    size_t slash = url.find('/', scheme + 3);
    ParsedEndpoint out;
    out.base = slash == std::string::npos ? url : url.substr(0, slash);
    out.path = slash == std::string::npos ? "/" : url.substr(slash);
    return out;
}

} // namespace detail

// One chat-style completion round trip. Connection failures, timeouts, and
// 5xx responses are retried with linear backoff; 4xx responses and
// malformed bodies fail immediately since retrying cannot fix them.
inline std::string teacher_complete(const TeacherConfig& config,
                                    const std::string& prompt) {
    config.validate();
    auto endpoint = detail::parse_endpoint(config.endpoint);

    nlohmann::json request = {
        {"model", config.model},
        {"messages",
         nlohmann::json::array(
             {nlohmann::json{{"role", "user"}, {"content", prompt}}})},
        {"temperature", config.temperature},
        {"max_tokens", config.max_tokens},
    };
    std::string body = request.dump();

    std::string last_error;
    for (int attempt = 0; attempt <= config.retries; ++attempt) {
        if (attempt > 0)
            std::this_thread::sleep_for(
                std::chrono::milliseconds(config.backoff_ms * attempt));
        httplib::Client client(endpoint.base);
        client.set_connection_timeout(0, config.timeout_ms * 1000);
        client.set_read_timeout(config.timeout_ms / 1000,
                                (config.timeout_ms % 1000) * 1000);
        auto result =
            client.Post(endpoint.path, body, "application/json");
        if (!result) {
            last_error = "transport failure: " +
                         httplib::to_string(result.error());
            continue;
        }
        if (result->status >= 500) {
            last_error =
                "server status " + std::to_string(result->status);
            continue;
        }
        if (result->status != 200)
            throw TeacherError("teacher endpoint rejected the request with "
                               "status " +
                               std::to_string(result->status));
        try {
            auto parsed = nlohmann::json::parse(result->body);
            auto text =
                detail::json_at_path(parsed, config.response_text_path);
            if (!text.is_string())
                throw TeacherError("generated text field is not a string");
            return text.get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw TeacherError(std::string("malformed response body: ") +
                               e.what());
        }
    }
    throw TeacherError("teacher request failed after " +
                       std::to_string(config.retries + 1) + " attempts; " +
                       last_error);
}

struct GuidedVerification {
    bool accepted = false;
    std::string verdict; // good, bad, or unclear once found
    std::vector<std::string> reasons;
};

// Accepts a teacher completion only when a verdict is present, every move
// the text mentions is legal somewhere along the audited line, and the
// verdict agrees with the engine delta outside the neutral band.
inline GuidedVerification verify_guided_output(const std::string& text,
                                               const GuidedAudit& audit,
                                               int band_cp = 50) {
    GuidedVerification out;

    size_t at = text.rfind("Verdict:");
    if (at == std::string::npos) {
        out.reasons.push_back("missing_verdict");
    } else {
        std::string tail = text.substr(at + std::string("Verdict:").size());
        size_t start = tail.find_first_not_of(" \t");
        if (start != std::string::npos) {
            size_t end = start;
            while (end < tail.size() && std::isalpha(
                                            static_cast<unsigned char>(
                                                tail[end])))
                ++end;
            out.verdict = tail.substr(start, end - start);
        }
        if (out.verdict != "good" && out.verdict != "bad" &&
            out.verdict != "unclear") {
            out.verdict.clear();
            out.reasons.push_back("missing_verdict");
        }
    }

    std::vector<Board> context;
    context.push_back(parse_fen(audit.begin_fen));
    for (const Move& m : audit.line)
        context.push_back(apply_move(context.back(), m));
    for (const std::string& tok : detail::standalone_uci_tokens(text)) {
        Move m = parse_uci_move(tok);
        bool ok = false;
        for (const Board& b : context)
            if (is_legal(b, m)) {
                ok = true;
                break;
            }
        if (!ok)
            out.reasons.push_back("illegal_reference:" + tok);
    }

    if (!out.verdict.empty()) {
        bool mismatch =
            (audit.delta_cp > band_cp && out.verdict != "good") ||
            (audit.delta_cp < -band_cp && out.verdict != "bad");
        if (mismatch)
            out.reasons.push_back("verdict_mismatch");
    }

    out.accepted = out.reasons.empty();
    return out;
}

// Wraps an accepted teacher completion as a training record.
inline Sample make_guided_sample(const std::string& prompt,
                                 const std::string& teacher_text,
                                 const GuidedAudit& audit,
                                 const std::string& verdict) {
    Sample s;
    s.task = SampleTask::guided_synthetic;
    s.fen = audit.begin_fen;
    s.prompt = prompt;
    s.response = teacher_text;
    std::string line_text;
    for (const Move& m : audit.line)
        line_text += (line_text.empty() ? "" : " ") + m.uci();
    s.meta["line"] = line_text;
    s.meta["delta_cp"] = std::to_string(audit.delta_cp);
    s.meta["verdict"] = verdict;
    s.meta["end_fen"] = audit.end_fen;
    return s;
}

} // namespace chessforge

#endif

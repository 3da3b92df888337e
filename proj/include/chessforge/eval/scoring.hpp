#ifndef CHESSFORGE_EVAL_SCORING_HPP
#define CHESSFORGE_EVAL_SCORING_HPP

#include <algorithm>
#include <cstdlib>
#include <set>
#include <string>
#include <vector>

#include "chessforge/eval/tasks.hpp"

namespace chessforge {

struct ScoreReport {
    TaskKind kind = TaskKind::predict_move;
    std::optional<std::string> parsed_answer;
    std::optional<bool> legal;
    std::optional<double> normalized_rank;
    std::optional<bool> correct;
    std::optional<double> iou;
    std::optional<bool> trivial;
    double reward = 0.0;
    bool fallback_used = false;
    std::vector<std::string> diagnostics;
};

namespace detail {

inline bool is_uci_token(const std::string& tok) {
    if (tok.size() != 4 && tok.size() != 5)
        return false;
    if (tok[0] < 'a' || tok[0] > 'h' || tok[1] < '1' || tok[1] > '8' ||
        tok[2] < 'a' || tok[2] > 'h' || tok[3] < '1' || tok[3] > '8')
        return false;
    if (tok.size() == 5 && tok[4] != 'n' && tok[4] != 'b' && tok[4] != 'r' &&
        tok[4] != 'q')
        return false;
    return true;
}

inline bool word_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
           (c >= '0' && c <= '9');
}

// Every maximal alphanumeric run in the text that spells a UCI move.
inline std::vector<std::string> standalone_uci_tokens(const std::string& text) {
    std::vector<std::string> out;
    size_t i = 0;
    while (i < text.size()) {
        if (!word_char(text[i])) {
            ++i;
            continue;
        }
        size_t j = i;
        while (j < text.size() && word_char(text[j]))
            ++j;
        std::string tok = text.substr(i, j - i);
        if (is_uci_token(tok))
            out.push_back(tok);
        i = j;
    }
    return out;
}

inline std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos)
        return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

} // namespace detail

struct ExtractedAnswer {
    // Parsed UCI moves; empty with found=true means an explicit `none`.
    std::vector<Move> moves;
    bool found = false;
    bool fallback_used = false;
    std::string raw;
};

inline constexpr const char* kAnswerMarker = "Final Answer:";

// Extraction contract: the last line containing `Final Answer:` wins; its
// payload is one UCI move, or for list answers a comma-separated UCI list or
// the literal `none`. Single-move kinds fall back to the last standalone UCI
// token in the whole text when no marker parses.
inline ExtractedAnswer extract_final_answer(const std::string& response_text,
                                            TaskKind kind) {
    bool list_kind = kind == TaskKind::legal_moves;
    ExtractedAnswer ans;

    size_t marker = response_text.rfind(kAnswerMarker);
    if (marker != std::string::npos) {
        size_t start = marker + std::string(kAnswerMarker).size();
        size_t eol = response_text.find('\n', start);
        std::string payload = detail::trim(
            response_text.substr(start, eol == std::string::npos
                                            ? std::string::npos
                                            : eol - start));
        ans.raw = payload;
        if (list_kind) {
            if (payload == "none" || payload == "None" || payload == "NONE") {
                ans.found = true;
                return ans;
            }
            std::vector<Move> moves;
            bool all_ok = !payload.empty();
            size_t i = 0;
            while (i < payload.size()) {
                size_t j = payload.find_first_of(", \t", i);
                std::string tok =
                    payload.substr(i, j == std::string::npos ? std::string::npos
                                                             : j - i);
                i = j == std::string::npos ? payload.size() : j + 1;
                if (tok.empty())
                    continue;
                if (!detail::is_uci_token(tok)) {
                    all_ok = false;
                    break;
                }
                moves.push_back(parse_uci_move(tok));
            }
            if (all_ok && !moves.empty()) {
                ans.moves = std::move(moves);
                ans.found = true;
                return ans;
            }
        } else {
            auto tokens = detail::standalone_uci_tokens(payload);
            if (tokens.size() == 1) {
                ans.moves.push_back(parse_uci_move(tokens.front()));
                ans.found = true;
                return ans;
            }
        }
    }

    if (!list_kind) {
        auto tokens = detail::standalone_uci_tokens(response_text);
        if (!tokens.empty()) {
            ans.moves.push_back(parse_uci_move(tokens.back()));
            ans.found = true;
            ans.fallback_used = true;
            ans.raw = tokens.back();
        }
    }
    return ans;
}

// Intersection over union of two move sets; two empty sets count as a
// perfect match so "no legal moves" is answerable.
inline double move_set_iou(const std::vector<Move>& a,
                           const std::vector<Move>& b) {
    std::set<std::string> sa, sb;
    for (const Move& m : a)
        sa.insert(m.uci());
    for (const Move& m : b)
        sb.insert(m.uci());
    if (sa.empty() && sb.empty())
        return 1.0;
    size_t inter = 0;
    for (const auto& x : sa)
        inter += sb.count(x);
    size_t uni = sa.size() + sb.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

// A trivial move: a quiet edge pawn push, or a quiet one-square king/rook
// shuffle that does not give check.
inline bool is_trivial_move(const Board& board, const Move& move) {
    auto piece = board.piece_at(move.from);
    if (!piece)
        return false;
    bool capture =
        !board.empty_at(move.to) ||
        (piece->kind == PieceKind::pawn && board.en_passant &&
         move.to == *board.en_passant && move.from.file != move.to.file);
    if (capture)
        return false;
    if (piece->kind == PieceKind::pawn)
        return move.from.file == 0 || move.from.file == 7;
    if (piece->kind != PieceKind::king && piece->kind != PieceKind::rook)
        return false;
    int chebyshev = std::max(std::abs(move.to.file - move.from.file),
                             std::abs(move.to.rank - move.from.rank));
    if (chebyshev != 1)
        return false;
    Board next = apply_legal(board, move);
    return !is_check(next, next.side_to_move);
}

// Rank r among n legal moves (1 = best) -> (n - r)/(n - 1); a single legal
// move scores 1.0 by convention.
inline double normalized_rank_value(size_t n, size_t r) {
    if (n == 0 || r < 1 || r > n)
        throw ChessError("normalized rank needs 1 <= r <= n");
    if (n == 1)
        return 1.0;
    return static_cast<double>(n - r) / static_cast<double>(n - 1);
}

inline ScoreReport score_predict_move(const EvalTask& task,
                                      const std::string& response_text,
                                      EngineSession& session) {
    if (task.kind != TaskKind::predict_move)
        throw TaskError("score_predict_move requires a predict_move task");
    ScoreReport rep;
    rep.kind = task.kind;
    auto ans = extract_final_answer(response_text, task.kind);
    rep.fallback_used = ans.fallback_used;
    if (!ans.found || ans.moves.size() != 1) {
        rep.diagnostics.push_back("no parseable move in response");
        return rep;
    }
    Move move = ans.moves.front();
    rep.parsed_answer = move.uci();
    auto ranked = session.rank_moves(task.board);
    size_t n = ranked.size();
    size_t r = 0;
    for (size_t i = 0; i < n; ++i)
        if (ranked[i].move == move) {
            r = i + 1;
            break;
        }
    rep.legal = r != 0;
    if (r == 0) {
        rep.diagnostics.push_back("move " + move.uci() + " is illegal here");
        return rep;
    }
    rep.normalized_rank = normalized_rank_value(n, r);
    rep.trivial = is_trivial_move(task.board, move);
    rep.reward = *rep.normalized_rank;
    return rep;
}

inline ScoreReport score_choice(const EvalTask& task,
                                const std::string& response_text) {
    if (task.kind != TaskKind::best_move && task.kind != TaskKind::worst_move)
        throw TaskError("score_choice requires a choice task");
    ScoreReport rep;
    rep.kind = task.kind;
    auto ans = extract_final_answer(response_text, task.kind);
    rep.fallback_used = ans.fallback_used;
    if (!ans.found || ans.moves.size() != 1) {
        rep.correct = false;
        rep.diagnostics.push_back("no parseable move in response");
        return rep;
    }
    Move move = ans.moves.front();
    rep.parsed_answer = move.uci();
    bool in_set = std::find(task.candidates.begin(), task.candidates.end(),
                            move) != task.candidates.end();
    if (!in_set)
        rep.diagnostics.push_back("answer " + move.uci() +
                                  " is not among the candidates");
    rep.correct = in_set && move == task.answer_key.front();
    rep.reward = *rep.correct ? 1.0 : 0.0;
    return rep;
}

inline ScoreReport score_legal_moves(const EvalTask& task,
                                     const std::string& response_text) {
    if (task.kind != TaskKind::legal_moves)
        throw TaskError("score_legal_moves requires a legal_moves task");
    ScoreReport rep;
    rep.kind = task.kind;
    auto ans = extract_final_answer(response_text, task.kind);
    if (!ans.found) {
        rep.diagnostics.push_back("no parseable move list in response");
        return rep;
    }
    if (!ans.moves.empty()) {
        std::string ucis;
        for (const Move& m : ans.moves)
            ucis += (ucis.empty() ? "" : ",") + m.uci();
        rep.parsed_answer = ucis;
    } else {
        rep.parsed_answer = "none";
    }
    rep.iou = move_set_iou(ans.moves, task.answer_key);
    rep.reward = *rep.iou;
    return rep;
}

inline ScoreReport score_ood_mate(const EvalTask& task,
                                  const std::string& response_text) {
    if (task.kind != TaskKind::ood_mate)
        throw TaskError("score_ood_mate requires an ood_mate task");
    ScoreReport rep;
    rep.kind = task.kind;
    auto ans = extract_final_answer(response_text, task.kind);
    rep.fallback_used = ans.fallback_used;
    if (!ans.found || ans.moves.size() != 1) {
        rep.correct = false;
        rep.diagnostics.push_back("no parseable move in response");
        return rep;
    }
    Move move = ans.moves.front();
    rep.parsed_answer = move.uci();
    rep.legal = is_legal(task.board, move);
    rep.correct = *rep.legal && is_checkmate(apply_legal(task.board, move));
    if (*rep.legal && !*rep.correct)
        rep.diagnostics.push_back("move " + move.uci() + " does not mate");
    rep.reward = *rep.correct ? 1.0 : 0.0;
    return rep;
}

inline ScoreReport score_task(const EvalTask& task,
                              const std::string& response_text,
                              EngineSession* session) {
    switch (task.kind) {
    case TaskKind::predict_move:
        if (!session)
            throw TaskError("predict_move scoring needs an engine session");
        return score_predict_move(task, response_text, *session);
    case TaskKind::best_move:
    case TaskKind::worst_move:
        return score_choice(task, response_text);
    case TaskKind::legal_moves:
        return score_legal_moves(task, response_text);
    case TaskKind::ood_mate:
        return score_ood_mate(task, response_text);
    }
    throw std::logic_error("unreachable");
}

// r = gamma * V(after) - V(before), both from the mover's perspective. The
// shaped alternative reward; unbounded, unlike the task rewards.
inline double centipawn_delta_reward(EngineSession& session, const Board& board,
                                     const Move& move, double gamma = 1.0) {
    double before = session.evaluate(board).value;
    Board next = apply_move(board, move);
    double after = -session.evaluate(next).value;
    return gamma * after - before;
}

} // namespace chessforge

#endif

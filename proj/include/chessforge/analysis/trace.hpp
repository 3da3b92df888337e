#ifndef CHESSFORGE_ANALYSIS_TRACE_HPP
#define CHESSFORGE_ANALYSIS_TRACE_HPP

#include <cctype>
#include <fstream>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "chessforge/datagen/guided.hpp"
#include "chessforge/eval/scoring.hpp"

namespace chessforge {

// The two lists a trace parse produces. Entries stay verbatim as written so
// the audit shows exactly what the model claimed.
struct ExtractedTrace {
    std::vector<std::string> moves;
    // (piece description, square) pairs. The description may carry a color
    // word ("white knight") or be a bare kind ("knight").
    std::vector<std::pair<std::string, std::string>> pieces;

    bool operator==(const ExtractedTrace&) const = default;
    bool empty() const { return moves.empty() && pieces.empty(); }
};

struct ReferencedAccuracy {
    int moves_total = 0;
    int moves_correct = 0;
    int pieces_total = 0;
    int pieces_correct = 0;
    // Absent (not zero) when the trace provided nothing to check.
    std::optional<double> move_acc;
    std::optional<double> piece_acc;
    std::optional<double> total_acc;
    // Moves counted incorrect that become legal if the trace's own move
    // list is replayed in order, e.g. "play a2a4 followed by a4a5". They
    // stay penalized; this list makes the penalty visible per trace.
    std::vector<std::string> future_moves;

    std::optional<double> hallucination_rate() const {
        if (!total_acc)
            return std::nullopt;
        return 1.0 - *total_acc;
    }
};

namespace detail {

inline std::string ascii_lower(std::string s) {
    for (char& c : s)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

struct PieceRefText {
    std::optional<Color> color;
    std::optional<PieceKind> kind;
};

// Pulls an optional color word and a piece kind out of a free-text piece
// description; word order and extra words do not matter.
inline PieceRefText parse_piece_text(const std::string& text) {
    PieceRefText out;
    std::istringstream in(ascii_lower(text));
    std::string word;
    while (in >> word) {
        if (word == "white")
            out.color = Color::white;
        else if (word == "black")
            out.color = Color::black;
        else
            for (PieceKind k :
                 {PieceKind::pawn, PieceKind::knight, PieceKind::bishop,
                  PieceKind::rook, PieceKind::queen, PieceKind::king})
                if (word == piece_kind_name(k))
                    out.kind = k;
    }
    return out;
}

inline bool move_in(const std::vector<Move>& legal, const Move& m) {
    for (const Move& x : legal)
        if (x == m)
            return true;
    return false;
}

// The same position with the turn handed over, used to replay a trace's
// move list even when it skips the opponent's replies.
inline Board pass_turn(const Board& b) {
    Board out = b;
    out.side_to_move = opposite(out.side_to_move);
    out.en_passant.reset();
    return out;
}

} // namespace detail

// Scores a trace against the board it reasons about. A move is correct iff
// it parses as UCI and is legal on the board. A piece reference is correct
// iff the named kind occupies the named square; stated colors are ignored
// unless strict_color is set, in which case a stated color must also match.
inline ReferencedAccuracy referenced_accuracy(const Board& board,
                                              const ExtractedTrace& trace,
                                              bool strict_color = false) {
    ReferencedAccuracy out;
    auto legal = legal_moves(board);

    // Rolling replay of the claimed moves, with free turn hand-overs, to
    // spot claims that are only wrong because they look ahead.
    Board rolling = board;
    for (const std::string& text : trace.moves) {
        out.moves_total++;
        std::optional<Move> parsed;
        try {
            parsed = parse_uci_move(detail::ascii_lower(text));
        } catch (const ParseError&) {
        }
        if (!parsed)
            continue;
        bool on_board = detail::move_in(legal, *parsed);
        if (on_board)
            out.moves_correct++;
        try {
            if (detail::move_in(legal_moves(rolling), *parsed)) {
                if (!on_board)
                    out.future_moves.push_back(text);
                rolling = apply_legal(rolling, *parsed);
            } else {
                Board passed = detail::pass_turn(rolling);
                if (detail::move_in(legal_moves(passed), *parsed)) {
                    if (!on_board)
                        out.future_moves.push_back(text);
                    rolling = apply_legal(passed, *parsed);
                }
            }
        } catch (const ChessError&) {
            // A hand-over can produce an unreachable position; the
            // diagnostic is best-effort, correctness already counted.
        }
    }

    for (const auto& [desc, square_text] : trace.pieces) {
        out.pieces_total++;
        std::optional<Square> sq;
        try {
            sq = parse_square(detail::ascii_lower(square_text));
        } catch (const ParseError&) {
        }
        if (!sq)
            continue;
        auto ref = detail::parse_piece_text(desc);
        if (!ref.kind)
            continue;
        auto occupant = board.piece_at(*sq);
        if (!occupant || occupant->kind != *ref.kind)
            continue;
        if (strict_color && ref.color && occupant->color != *ref.color)
            continue;
        out.pieces_correct++;
    }

    if (out.moves_total > 0)
        out.move_acc = static_cast<double>(out.moves_correct) /
                       out.moves_total;
    if (out.pieces_total > 0)
        out.piece_acc = static_cast<double>(out.pieces_correct) /
                        out.pieces_total;
    if (out.moves_total + out.pieces_total > 0)
        out.total_acc =
            static_cast<double>(out.moves_correct + out.pieces_correct) /
            (out.moves_total + out.pieces_total);
    return out;
}

// Deterministic fallback extractor: every standalone UCI-shaped token is a
// move claim, every "<piece> on <square>" phrase is a piece claim. Lower
// fidelity than the teacher-based parse but needs no network.
inline ExtractedTrace extract_trace_pattern(const std::string& text) {
    ExtractedTrace out;
    out.moves = detail::standalone_uci_tokens(text);

    static const std::regex piece_re(
        R"(\b((?:white\s+|black\s+)?(?:pawn|knight|bishop|rook|queen|king))\s+on\s+([a-h][1-8])\b)",
        std::regex::icase);
    auto begin = std::sregex_iterator(text.begin(), text.end(), piece_re);
    for (auto it = begin; it != std::sregex_iterator(); ++it) {
        std::string desc = (*it)[1].str();
        // Collapse the internal whitespace so "white   knight" reads back
        // cleanly, but keep the author's casing.
        std::string collapsed;
        for (char c : desc) {
            if (std::isspace(static_cast<unsigned char>(c))) {
                if (!collapsed.empty() && collapsed.back() != ' ')
                    collapsed += ' ';
            } else {
                collapsed += c;
            }
        }
        out.pieces.emplace_back(collapsed, (*it)[2].str());
    }
    return out;
}

namespace detail {

// Parses the teacher's two-list JSON reply, tolerating prose around the
// object. Anything that does not match the schema throws.
inline ExtractedTrace parse_trace_reply(const std::string& reply) {
    size_t open = reply.find('{');
    size_t close = reply.rfind('}');
    if (open == std::string::npos || close == std::string::npos ||
        close < open)
        throw TeacherError("extraction reply contains no JSON object");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(reply.substr(open, close - open + 1));
    } catch (const nlohmann::json::exception& e) {
        throw TeacherError(std::string("extraction reply is not JSON: ") +
                           e.what());
    }
    if (!doc.is_object() || !doc.contains("moves") ||
        !doc.contains("pieces") || !doc["moves"].is_array() ||
        !doc["pieces"].is_array())
        throw TeacherError(
            "extraction reply lacks the moves/pieces arrays");
    ExtractedTrace out;
    for (const auto& m : doc["moves"]) {
        if (!m.is_string())
            throw TeacherError("extraction reply move is not a string");
        out.moves.push_back(m.get<std::string>());
    }
    for (const auto& p : doc["pieces"]) {
        if (!p.is_array() || p.size() != 2 || !p[0].is_string() ||
            !p[1].is_string())
            throw TeacherError(
                "extraction reply piece is not a [name, square] pair");
        out.pieces.emplace_back(p[0].get<std::string>(),
                                p[1].get<std::string>());
    }
    return out;
}

} // namespace detail

// One line of a trace file: either raw reasoning text still to be parsed,
// or lists extracted earlier.
struct TraceInput {
    std::string fen;
    std::string reasoning_text;
    std::optional<ExtractedTrace> extracted;
};

// Reads line-delimited trace records: {"fen", "reasoning_text"} or the
// pre-extracted {"fen", "moves", "pieces"} shape.
inline std::vector<TraceInput> read_traces(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ChessError("cannot open trace file: " + path);
    std::vector<TraceInput> out;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        try {
            auto j = nlohmann::json::parse(line);
            TraceInput t;
            t.fen = j.at("fen").get<std::string>();
            parse_fen(t.fen);
            if (j.contains("moves") || j.contains("pieces")) {
                ExtractedTrace ex;
                for (const auto& m : j.value("moves", nlohmann::json::array()))
                    ex.moves.push_back(m.get<std::string>());
                for (const auto& p :
                     j.value("pieces", nlohmann::json::array()))
                    ex.pieces.emplace_back(p.at(0).get<std::string>(),
                                           p.at(1).get<std::string>());
                t.extracted = std::move(ex);
            } else {
                t.reasoning_text = j.at("reasoning_text").get<std::string>();
            }
            out.push_back(std::move(t));
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

// Teacher-based trace parse. Transport-level retries live inside
// teacher_complete; this adds retries for replies that arrive but do not
// match the two-list schema. Empty reasoning never leaves the process.
inline ExtractedTrace extract_trace_llm(const TeacherConfig& config,
                                        const std::string& reasoning_text) {
    if (detail::trim(reasoning_text).empty())
        return {};
    std::string prompt = std::string(prompts::kTraceExtractionInstruction) +
                         "\n\nReasoning trace:\n" + reasoning_text;
    std::string last_error;
    for (int attempt = 0; attempt <= config.retries; ++attempt) {
        std::string reply = teacher_complete(config, prompt);
        try {
            return detail::parse_trace_reply(reply);
        } catch (const TeacherError& e) {
            last_error = e.what();
        }
    }
    throw TeacherError("trace extraction kept failing schema checks: " +
                       last_error);
}

} // namespace chessforge

#endif

#ifndef CHESSFORGE_SOURCE_POSITION_SOURCE_HPP
#define CHESSFORGE_SOURCE_POSITION_SOURCE_HPP

#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "chessforge/core/movegen.hpp"
#include "chessforge/core/san.hpp"
#include "chessforge/util/rng.hpp"

namespace chessforge {

struct SourcedPosition {
    Board board;
    // For PGN games, plies played from the game's start; for FEN files,
    // reconstructed from the move clocks.
    int ply_index = 0;
    std::string origin;
};

struct SourceDiagnostic {
    std::string where;
    std::string message;
};

// Single-consumer sequence of positions. Ingestion is eager (desk-scale
// inputs); the cursor keeps sampling code single-pass.
class PositionStream {
  public:
    explicit PositionStream(std::vector<SourcedPosition> items)
        : items_(std::move(items)) {}

    std::optional<SourcedPosition> next() {
        if (cursor_ >= items_.size())
            return std::nullopt;
        return items_[cursor_++];
    }

    size_t remaining() const { return items_.size() - cursor_; }

  private:
    std::vector<SourcedPosition> items_;
    size_t cursor_ = 0;
};

namespace detail {

inline int ply_from_clocks(const Board& b) {
    return (b.fullmove_number - 1) * 2 +
           (b.side_to_move == Color::black ? 1 : 0);
}

} // namespace detail

// One FEN per line; blank lines and '#' comments skipped. Bad lines are
// collected with their line numbers unless strict, which rethrows the first.
inline PositionStream load_fens(const std::string& path,
                                std::vector<SourceDiagnostic>* diagnostics = nullptr,
                                bool strict = false) {
    std::ifstream in(path);
    if (!in)
        throw ChessError("cannot open FEN file " + path);
    std::vector<SourcedPosition> items;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        size_t start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos || line[start] == '#')
            continue;
        size_t end = line.find_last_not_of(" \t\r");
        std::string fen = line.substr(start, end - start + 1);
        try {
            Board b = parse_fen(fen);
            items.push_back({b, detail::ply_from_clocks(b),
                             path + ":" + std::to_string(line_no)});
        } catch (const ParseError& e) {
            if (strict)
                throw ParseError(path + ":" + std::to_string(line_no) + ": " +
                                 e.what());
            if (diagnostics)
                diagnostics->push_back(
                    {path + ":" + std::to_string(line_no), e.what()});
        }
    }
    return PositionStream(std::move(items));
}

namespace detail {

inline bool is_result_token(const std::string& tok) {
    return tok == "1-0" || tok == "0-1" || tok == "1/2-1/2" || tok == "*";
}

inline bool is_move_number(const std::string& tok) {
    size_t i = 0;
    while (i < tok.size() && isdigit(static_cast<unsigned char>(tok[i])))
        ++i;
    if (i == 0)
        return false;
    while (i < tok.size() && tok[i] == '.')
        ++i;
    return i == tok.size();
}

// Strips comments, variations, and annotation glyphs, leaving SAN tokens.
inline std::vector<std::string> movetext_tokens(const std::string& text) {
    std::vector<std::string> tokens;
    size_t i = 0;
    int rav_depth = 0;
    while (i < text.size()) {
        char c = text[i];
        if (c == '{') {
            size_t close = text.find('}', i);
            i = close == std::string::npos ? text.size() : close + 1;
        } else if (c == ';') {
            size_t eol = text.find('\n', i);
            i = eol == std::string::npos ? text.size() : eol + 1;
        } else if (c == '(') {
            ++rav_depth;
            ++i;
        } else if (c == ')') {
            rav_depth = std::max(0, rav_depth - 1);
            ++i;
        } else if (isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else {
            size_t j = i;
            while (j < text.size() &&
                   !isspace(static_cast<unsigned char>(text[j])) &&
                   text[j] != '{' && text[j] != '(' && text[j] != ')' &&
                   text[j] != ';')
                ++j;
            std::string tok = text.substr(i, j - i);
            i = j;
            if (rav_depth > 0 || tok.empty() || tok[0] == '$' ||
                is_move_number(tok) || is_result_token(tok))
                continue;
            tokens.push_back(tok);
        }
    }
    return tokens;
}

} // namespace detail

// PGN games replayed through SAN disambiguation. Each game contributes its
// start position plus the position after every ply; a game with unparseable
// or illegal movetext is skipped whole, with a diagnostic.
inline PositionStream load_pgn(const std::string& path,
                               std::vector<SourceDiagnostic>* diagnostics = nullptr) {
    std::ifstream in(path);
    if (!in)
        throw ChessError("cannot open PGN file " + path);

    // Split into games: a tag section followed by movetext.
    std::vector<std::string> games;
    std::string line, movetext;
    bool in_movetext = false;
    while (std::getline(in, line)) {
        bool tag_line = !line.empty() && line[0] == '[';
        if (tag_line) {
            if (in_movetext) {
                games.push_back(movetext);
                movetext.clear();
                in_movetext = false;
            }
            continue;
        }
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        movetext += line + "\n";
        in_movetext = true;
    }
    if (in_movetext)
        games.push_back(movetext);

    std::vector<SourcedPosition> items;
    int game_no = 0;
    for (const std::string& game : games) {
        ++game_no;
        std::string origin = path + ":game" + std::to_string(game_no);
        std::vector<SourcedPosition> positions;
        Board b = start_position();
        positions.push_back({b, 0, origin});
        bool ok = true;
        int ply = 0;
        for (const std::string& san : detail::movetext_tokens(game)) {
            try {
                b = apply_move(b, parse_san(b, san));
            } catch (const ChessError& e) {
                if (diagnostics)
                    diagnostics->push_back(
                        {origin, "ply " + std::to_string(ply + 1) + " '" +
                                     san + "': " + e.what()});
                ok = false;
                break;
            }
            positions.push_back({b, ++ply, origin});
        }
        if (ok)
            items.insert(items.end(), positions.begin(), positions.end());
    }
    return PositionStream(std::move(items));
}

struct PositionFilter {
    int min_ply = 0;
    std::optional<int> max_ply;
    std::optional<Color> side_to_move;
    bool require_nonterminal = false;
    bool dedupe_by_fen = false;
    uint64_t seed = 0;

    void validate() const {
        if (max_ply && min_ply > *max_ply)
            throw ChessError("position filter: min_ply > max_ply");
    }

    bool passes(const SourcedPosition& p) const {
        if (p.ply_index < min_ply)
            return false;
        if (max_ply && p.ply_index > *max_ply)
            return false;
        if (side_to_move && p.board.side_to_move != *side_to_move)
            return false;
        if (require_nonterminal && is_terminal(p.board))
            return false;
        return true;
    }
};

// Uniform reservoir sample over the stream elements passing the filter,
// deterministic for a fixed seed and input order.
inline std::vector<Board> sample_positions(PositionStream& stream,
                                           const PositionFilter& filter,
                                           size_t count) {
    filter.validate();
    Rng rng(filter.seed);
    std::vector<Board> reservoir;
    std::set<std::string> seen;
    uint64_t passed = 0;
    while (auto p = stream.next()) {
        if (!filter.passes(*p))
            continue;
        if (filter.dedupe_by_fen && !seen.insert(emit_fen(p->board)).second)
            continue;
        if (reservoir.size() < count) {
            reservoir.push_back(p->board);
        } else if (count > 0) {
            uint64_t j = rng.next_below(passed + 1);
            if (j < count)
                reservoir[j] = p->board;
        }
        ++passed;
    }
    return reservoir;
}

} // namespace chessforge

#endif

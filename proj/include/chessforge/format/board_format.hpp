#ifndef CHESSFORGE_FORMAT_BOARD_FORMAT_HPP
#define CHESSFORGE_FORMAT_BOARD_FORMAT_HPP

#include <string>

#include "chessforge/core/board.hpp"

namespace chessforge {

enum class BoardFormat {
    fen,
    spaced_fen,
    visual_ascii,
    uniform_visual,
};

inline std::string format_name(BoardFormat f) {
    switch (f) {
    case BoardFormat::fen: return "fen";
    case BoardFormat::spaced_fen: return "spaced_fen";
    case BoardFormat::visual_ascii: return "visual_ascii";
    case BoardFormat::uniform_visual: return "uniform_visual";
    }
    throw std::logic_error("unreachable");
}

inline BoardFormat parse_format(const std::string& name) {
    if (name == "fen") return BoardFormat::fen;
    if (name == "spaced_fen") return BoardFormat::spaced_fen;
    if (name == "visual_ascii") return BoardFormat::visual_ascii;
    if (name == "uniform_visual") return BoardFormat::uniform_visual;
    throw ParseError("unknown board format '" + name + "'");
}

namespace detail {

// Cell layout is fixed as one space followed by the glyph, newline terminated.
// uniform_visual additionally puts one space before every newline so that a
// tokenizer sees the same " X" pair at the end of each line as elsewhere.
inline std::string render_visual(const Board& b, bool uniform) {
    std::string out;
    const char* line_end = uniform ? " \n" : "\n";
    for (int rank = 7; rank >= 0; --rank) {
        for (int file = 0; file < 8; ++file) {
            out += ' ';
            auto p = b.piece_at(Square(file, rank));
            out += p ? piece_letter(*p) : '.';
        }
        out += line_end;
    }
    out += "Side to move: ";
    out += color_name(b.side_to_move);
    out += line_end;
    return out;
}

inline std::string render_spaced_fen(const Board& b) {
    std::string placement = emit_fen(b);
    placement = placement.substr(0, placement.find(' '));
    std::string out;
    for (size_t i = 0; i < placement.size(); ++i) {
        if (i > 0)
            out += ' ';
        out += placement[i];
    }
    return out;
}

} // namespace detail

inline std::string render(const Board& b, BoardFormat f) {
    switch (f) {
    case BoardFormat::fen: return emit_fen(b);
    case BoardFormat::spaced_fen: return detail::render_spaced_fen(b);
    case BoardFormat::visual_ascii: return detail::render_visual(b, false);
    case BoardFormat::uniform_visual: return detail::render_visual(b, true);
    }
    throw std::logic_error("unreachable");
}

// Every prompt builder goes through this. The visual formats already carry
// the side-to-move line; the FEN-shaped ones get it appended so downstream
// prompts never lose the mover.
inline std::string render_prompt_board(const Board& b, BoardFormat f) {
    std::string out = render(b, f);
    if (f == BoardFormat::fen || f == BoardFormat::spaced_fen) {
        out += "\nSide to move: ";
        out += color_name(b.side_to_move);
        out += '\n';
    }
    return out;
}

} // namespace chessforge

#endif

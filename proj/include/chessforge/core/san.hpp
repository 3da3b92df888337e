#ifndef CHESSFORGE_CORE_SAN_HPP
#define CHESSFORGE_CORE_SAN_HPP

#include <string>
#include <vector>

#include "chessforge/core/movegen.hpp"

namespace chessforge {

namespace detail {

inline std::optional<PieceKind> san_piece_letter(char c) {
    switch (c) {
    case 'N': return PieceKind::knight;
    case 'B': return PieceKind::bishop;
    case 'R': return PieceKind::rook;
    case 'Q': return PieceKind::queen;
    case 'K': return PieceKind::king;
    default: return std::nullopt;
    }
}

} // namespace detail

// Resolves one SAN token against the board's legal moves. SAN is accepted on
// ingestion only; nothing in this project ever emits it.
inline Move parse_san(const Board& board, const std::string& san) {
    std::string tok = san;
    while (!tok.empty() && (tok.back() == '+' || tok.back() == '#' ||
                            tok.back() == '!' || tok.back() == '?'))
        tok.pop_back();
    if (tok.empty())
        throw ParseError("empty SAN token");

    auto all = legal_moves(board);

    if (tok == "O-O" || tok == "0-0" || tok == "O-O-O" || tok == "0-0-0") {
        bool kingside = tok == "O-O" || tok == "0-0";
        for (const Move& m : all) {
            auto p = board.piece_at(m.from);
            if (p->kind == PieceKind::king && m.to.file - m.from.file == (kingside ? 2 : -2))
                return m;
        }
        throw ParseError("illegal castling move '" + san + "'");
    }

    PieceKind kind = PieceKind::pawn;
    size_t i = 0;
    if (auto k = detail::san_piece_letter(tok[0])) {
        kind = *k;
        i = 1;
    }

    std::optional<PieceKind> promotion;
    if (size_t eq = tok.find('='); eq != std::string::npos) {
        if (eq + 2 != tok.size())
            throw ParseError("malformed promotion in '" + san + "'");
        auto k = detail::san_piece_letter(tok[eq + 1]);
        if (!k || *k == PieceKind::king)
            throw ParseError("invalid promotion piece in '" + san + "'");
        promotion = *k;
        tok = tok.substr(0, eq);
    }

    std::string body = tok.substr(i);
    bool capture = false;
    int from_file = -1, from_rank = -1;
    if (body.size() < 2)
        throw ParseError("malformed SAN '" + san + "'");

    std::string dest = body.substr(body.size() - 2);
    if (dest[0] < 'a' || dest[0] > 'h' || dest[1] < '1' || dest[1] > '8')
        throw ParseError("malformed SAN destination in '" + san + "'");
    Square to(dest[0] - 'a', dest[1] - '1');

    for (char c : body.substr(0, body.size() - 2)) {
        if (c == 'x')
            capture = true;
        else if (c >= 'a' && c <= 'h')
            from_file = c - 'a';
        else if (c >= '1' && c <= '8')
            from_rank = c - '1';
        else
            throw ParseError("malformed SAN '" + san + "'");
    }

    if (kind == PieceKind::pawn && capture && from_file < 0)
        throw ParseError("pawn capture '" + san + "' must name the file of departure");

    std::vector<Move> matches;
    for (const Move& m : all) {
        auto p = board.piece_at(m.from);
        if (p->kind != kind || m.to != to)
            continue;
        if (from_file >= 0 && m.from.file != from_file)
            continue;
        if (from_rank >= 0 && m.from.rank != from_rank)
            continue;
        bool is_capture = !board.empty_at(m.to) ||
                          (p->kind == PieceKind::pawn && board.en_passant &&
                           m.to == *board.en_passant && m.from.file != m.to.file);
        if (capture != is_capture)
            continue;
        if (m.promotion != promotion)
            continue;
        matches.push_back(m);
    }
    if (matches.empty())
        throw ParseError("SAN '" + san + "' matches no legal move");
    if (matches.size() > 1)
        throw ParseError("SAN '" + san + "' is ambiguous");
    return matches.front();
}

} // namespace chessforge

#endif

#ifndef CHESSFORGE_CORE_MOVEGEN_HPP
#define CHESSFORGE_CORE_MOVEGEN_HPP

#include <algorithm>
#include <cstdint>
#include <vector>

#include "chessforge/core/board.hpp"

namespace chessforge {

namespace detail {

inline void push_promotions(std::vector<Move>& out, Square from, Square to) {
    for (PieceKind k : {PieceKind::knight, PieceKind::bishop, PieceKind::rook,
                        PieceKind::queen})
        out.push_back(Move{from, to, k});
}

inline void gen_pawn_moves(const Board& b, Square from, std::vector<Move>& out) {
    Color us = b.side_to_move;
    int dir = us == Color::white ? 1 : -1;
    int start_rank = us == Color::white ? 1 : 6;
    int promo_rank = us == Color::white ? 7 : 0;

    Square one(from.file, from.rank + dir);
    if (b.empty_at(one)) {
        if (one.rank == promo_rank)
            push_promotions(out, from, one);
        else
            out.push_back(Move{from, one, std::nullopt});
        if (from.rank == start_rank) {
            Square two(from.file, from.rank + 2 * dir);
            if (b.empty_at(two))
                out.push_back(Move{from, two, std::nullopt});
        }
    }
    for (int df : {-1, 1}) {
        if (!square_in_range(from.file + df, from.rank + dir))
            continue;
        Square to(from.file + df, from.rank + dir);
        auto target = b.piece_at(to);
        bool ep = b.en_passant && to == *b.en_passant;
        if ((target && target->color != us) || ep) {
            if (to.rank == promo_rank)
                push_promotions(out, from, to);
            else
                out.push_back(Move{from, to, std::nullopt});
        }
    }
}

inline void gen_step_moves(const Board& b, Square from, const int offsets[8][2],
                           std::vector<Move>& out) {
    Color us = b.side_to_move;
    for (int i = 0; i < 8; ++i) {
        int f = from.file + offsets[i][0], r = from.rank + offsets[i][1];
        if (!square_in_range(f, r))
            continue;
        auto target = b.piece_at(Square(f, r));
        if (!target || target->color != us)
            out.push_back(Move{from, Square(f, r), std::nullopt});
    }
}

inline void gen_slider_moves(const Board& b, Square from, const int dirs[4][2],
                             std::vector<Move>& out) {
    Color us = b.side_to_move;
    for (int i = 0; i < 4; ++i) {
        for (int f = from.file + dirs[i][0], r = from.rank + dirs[i][1];
             square_in_range(f, r); f += dirs[i][0], r += dirs[i][1]) {
            auto target = b.piece_at(Square(f, r));
            if (!target) {
                out.push_back(Move{from, Square(f, r), std::nullopt});
                continue;
            }
            if (target->color != us)
                out.push_back(Move{from, Square(f, r), std::nullopt});
            break;
        }
    }
}

// Castling is emitted fully legal (rights, empty path, no attacked square on
// the king's path), so the post-apply check filter never rejects it.
inline void gen_castling(const Board& b, std::vector<Move>& out) {
    Color us = b.side_to_move;
    Color them = opposite(us);
    int rank = us == Color::white ? 0 : 7;
    Square king(4, rank);
    bool kingside = us == Color::white ? b.castling.white_kingside
                                       : b.castling.black_kingside;
    bool queenside = us == Color::white ? b.castling.white_queenside
                                        : b.castling.black_queenside;
    if (!kingside && !queenside)
        return;
    if (is_attacked(b, king, them))
        return;
    if (kingside && b.empty_at(Square(5, rank)) && b.empty_at(Square(6, rank)) &&
        !is_attacked(b, Square(5, rank), them) &&
        !is_attacked(b, Square(6, rank), them))
        out.push_back(Move{king, Square(6, rank), std::nullopt});
    if (queenside && b.empty_at(Square(3, rank)) && b.empty_at(Square(2, rank)) &&
        b.empty_at(Square(1, rank)) && !is_attacked(b, Square(3, rank), them) &&
        !is_attacked(b, Square(2, rank), them))
        out.push_back(Move{king, Square(2, rank), std::nullopt});
}

inline std::vector<Move> pseudo_legal_moves(const Board& b) {
    std::vector<Move> out;
    out.reserve(48);
    for (Square from : b.piece_squares(b.side_to_move)) {
        switch (b.piece_at(from)->kind) {
        case PieceKind::pawn: gen_pawn_moves(b, from, out); break;
        case PieceKind::knight: gen_step_moves(b, from, knight_offsets, out); break;
        case PieceKind::bishop: gen_slider_moves(b, from, bishop_dirs, out); break;
        case PieceKind::rook: gen_slider_moves(b, from, rook_dirs, out); break;
        case PieceKind::queen:
            gen_slider_moves(b, from, rook_dirs, out);
            gen_slider_moves(b, from, bishop_dirs, out);
            break;
        case PieceKind::king:
            gen_step_moves(b, from, king_offsets, out);
            break;
        }
    }
    gen_castling(b, out);
    return out;
}

// Applies without legality validation; caller guarantees the move is at
// least pseudo-legal for the side to move.
inline Board apply_unchecked(const Board& b, const Move& m) {
    Board next = b;
    Color us = b.side_to_move;
    Piece moving = *b.piece_at(m.from);
    bool is_pawn = moving.kind == PieceKind::pawn;
    bool is_capture = !b.empty_at(m.to);

    next.set_piece(m.from, std::nullopt);
    if (m.promotion)
        next.set_piece(m.to, Piece{us, *m.promotion});
    else
        next.set_piece(m.to, moving);

    // En passant: remove the bypassed pawn.
    if (is_pawn && b.en_passant && m.to == *b.en_passant && m.from.file != m.to.file) {
        next.set_piece(Square(m.to.file, m.from.rank), std::nullopt);
        is_capture = true;
    }

    // Castling: king moved two files, bring the rook across.
    if (moving.kind == PieceKind::king && std::abs(m.to.file - m.from.file) == 2) {
        int rank = m.from.rank;
        if (m.to.file == 6) {
            next.set_piece(Square(5, rank), Piece{us, PieceKind::rook});
            next.set_piece(Square(7, rank), std::nullopt);
        } else {
            next.set_piece(Square(3, rank), Piece{us, PieceKind::rook});
            next.set_piece(Square(0, rank), std::nullopt);
        }
    }

    if (moving.kind == PieceKind::king) {
        if (us == Color::white)
            next.castling.white_kingside = next.castling.white_queenside = false;
        else
            next.castling.black_kingside = next.castling.black_queenside = false;
    }
    auto clear_rook_right = [&next](Square sq) {
        if (sq == Square(0, 0)) next.castling.white_queenside = false;
        if (sq == Square(7, 0)) next.castling.white_kingside = false;
        if (sq == Square(0, 7)) next.castling.black_queenside = false;
        if (sq == Square(7, 7)) next.castling.black_kingside = false;
    };
    clear_rook_right(m.from);
    clear_rook_right(m.to);

    next.en_passant.reset();
    if (is_pawn && std::abs(m.to.rank - m.from.rank) == 2)
        next.en_passant = Square(m.from.file, (m.from.rank + m.to.rank) / 2);

    next.halfmove_clock = (is_pawn || is_capture) ? 0 : b.halfmove_clock + 1;
    if (us == Color::black)
        ++next.fullmove_number;
    next.side_to_move = opposite(us);
    return next;
}

inline bool leaves_king_attacked(const Board& b, const Move& m) {
    Board next = apply_unchecked(b, m);
    return is_attacked(next, next.king_square(b.side_to_move), next.side_to_move);
}

// Unsorted legal moves, used where ordering does not matter (perft).
inline std::vector<Move> legal_moves_unordered(const Board& b) {
    std::vector<Move> out = pseudo_legal_moves(b);
    std::erase_if(out, [&b](const Move& m) { return leaves_king_attacked(b, m); });
    return out;
}

} // namespace detail

// All legal moves under FIDE rules, ordered lexicographically by UCI text.
// Moves that follow piece movement geometry but may leave the mover's own
// king attacked; legal_moves adds the king-safety filter on top.
inline std::vector<Move> pattern_legal_moves(const Board& b) {
    auto out = detail::pseudo_legal_moves(b);
    std::sort(out.begin(), out.end(), uci_less);
    return out;
}

inline std::vector<Move> legal_moves(const Board& b) {
    std::vector<Move> out = detail::legal_moves_unordered(b);
    std::sort(out.begin(), out.end(), uci_less);
    return out;
}

inline std::vector<Move> legal_moves_for_square(const Board& b, Square from) {
    auto piece = b.piece_at(from);
    if (!piece)
        throw ChessError("no piece on " + from.text());
    if (piece->color != b.side_to_move)
        throw ChessError("piece on " + from.text() + " belongs to the side not to move");
    std::vector<Move> out = legal_moves(b);
    std::erase_if(out, [from](const Move& m) { return m.from != from; });
    return out;
}

inline bool is_legal(const Board& b, const Move& m) {
    auto pseudo = detail::pseudo_legal_moves(b);
    if (std::find(pseudo.begin(), pseudo.end(), m) == pseudo.end())
        return false;
    return !detail::leaves_king_attacked(b, m);
}

// Applies a legal move, returning the successor state. Distinguishes a move
// that is not a motion pattern for the piece from one that exposes the king.
inline Board apply_move(const Board& b, const Move& m) {
    auto pseudo = detail::pseudo_legal_moves(b);
    if (std::find(pseudo.begin(), pseudo.end(), m) == pseudo.end())
        throw IllegalMoveError("move " + m.uci() + " is not a legal motion pattern");
    if (detail::leaves_king_attacked(b, m))
        throw IllegalMoveError("move " + m.uci() + " leaves own king in check");
    return detail::apply_unchecked(b, m);
}

// Fast path for callers replaying moves that already came out of
// legal_moves; skips the legality re-check that apply_move performs.
inline Board apply_legal(const Board& b, const Move& m) {
    return detail::apply_unchecked(b, m);
}

inline bool is_checkmate(const Board& b) {
    return is_check(b, b.side_to_move) && detail::legal_moves_unordered(b).empty();
}

inline bool is_stalemate(const Board& b) {
    return !is_check(b, b.side_to_move) && detail::legal_moves_unordered(b).empty();
}

inline bool is_terminal(const Board& b) {
    return detail::legal_moves_unordered(b).empty();
}

enum class AttackMode {
    // Capture-pattern attack, ignoring pins and turn order.
    pattern,
    // From-squares of moves that legally capture the piece on the target
    // square. Computed for the attacking side to move; if it is not, the
    // turn is flipped internally (dropping en passant).
    legal_capture,
};

inline std::vector<Square> attackers_of(const Board& b, Square target, Color by,
                                        AttackMode mode = AttackMode::pattern) {
    std::vector<Square> out;
    if (mode == AttackMode::pattern) {
        using namespace detail;
        int tf = target.file, tr = target.rank;
        int pawn_rank = by == Color::white ? tr - 1 : tr + 1;
        for (int df : {-1, 1}) {
            if (square_in_range(tf + df, pawn_rank)) {
                auto p = b.piece_at(Square(tf + df, pawn_rank));
                if (p && p->color == by && p->kind == PieceKind::pawn)
                    out.push_back(Square(tf + df, pawn_rank));
            }
        }
        for (auto& off : knight_offsets) {
            if (square_in_range(tf + off[0], tr + off[1])) {
                auto p = b.piece_at(Square(tf + off[0], tr + off[1]));
                if (p && p->color == by && p->kind == PieceKind::knight)
                    out.push_back(Square(tf + off[0], tr + off[1]));
            }
        }
        for (auto& off : king_offsets) {
            if (square_in_range(tf + off[0], tr + off[1])) {
                auto p = b.piece_at(Square(tf + off[0], tr + off[1]));
                if (p && p->color == by && p->kind == PieceKind::king)
                    out.push_back(Square(tf + off[0], tr + off[1]));
            }
        }
        for (auto& dir : rook_dirs) {
            for (int f = tf + dir[0], r = tr + dir[1]; square_in_range(f, r);
                 f += dir[0], r += dir[1]) {
                auto p = b.piece_at(Square(f, r));
                if (!p)
                    continue;
                if (p->color == by &&
                    (p->kind == PieceKind::rook || p->kind == PieceKind::queen))
                    out.push_back(Square(f, r));
                break;
            }
        }
        for (auto& dir : bishop_dirs) {
            for (int f = tf + dir[0], r = tr + dir[1]; square_in_range(f, r);
                 f += dir[0], r += dir[1]) {
                auto p = b.piece_at(Square(f, r));
                if (!p)
                    continue;
                if (p->color == by &&
                    (p->kind == PieceKind::bishop || p->kind == PieceKind::queen))
                    out.push_back(Square(f, r));
                break;
            }
        }
    } else {
        Board probe = b;
        if (probe.side_to_move != by) {
            probe.side_to_move = by;
            probe.en_passant.reset();
        }
        for (const Move& m : legal_moves(probe)) {
            bool captures_target = false;
            if (m.to == target && !b.empty_at(target)) {
                captures_target = true;
            } else if (probe.en_passant && m.to == *probe.en_passant &&
                       probe.piece_at(m.from)->kind == PieceKind::pawn &&
                       m.from.file != m.to.file) {
                captures_target = Square(m.to.file, m.from.rank) == target;
            }
            if (captures_target &&
                std::find(out.begin(), out.end(), m.from) == out.end())
                out.push_back(m.from);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Leaf count of the legal-move tree at the given depth; the standard
// move-generator correctness oracle.
inline std::uint64_t perft(const Board& b, int depth) {
    if (depth <= 0)
        return 1;
    auto moves = detail::legal_moves_unordered(b);
    if (depth == 1)
        return moves.size();
    std::uint64_t nodes = 0;
    for (const Move& m : moves)
        nodes += perft(detail::apply_unchecked(b, m), depth - 1);
    return nodes;
}

} // namespace chessforge

#endif

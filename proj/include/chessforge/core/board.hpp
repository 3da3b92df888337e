#ifndef CHESSFORGE_CORE_BOARD_HPP
#define CHESSFORGE_CORE_BOARD_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "chessforge/core/types.hpp"

namespace chessforge {

namespace detail {

// Packed cell: 0 = empty, otherwise (kind + 1) | (color << 3).
inline std::uint8_t pack_piece(Piece p) {
    return static_cast<std::uint8_t>((static_cast<int>(p.kind) + 1) |
                                     (static_cast<int>(p.color) << 3));
}

inline Piece unpack_piece(std::uint8_t cell) {
    return Piece{static_cast<Color>(cell >> 3),
                 static_cast<PieceKind>((cell & 7) - 1)};
}

constexpr int knight_offsets[8][2] = {{1, 2},  {2, 1},  {2, -1}, {1, -2},
                                      {-1, -2}, {-2, -1}, {-2, 1}, {-1, 2}};
constexpr int king_offsets[8][2] = {{1, 0},  {1, 1},  {0, 1},  {-1, 1},
                                    {-1, 0}, {-1, -1}, {0, -1}, {1, -1}};
constexpr int rook_dirs[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
constexpr int bishop_dirs[4][2] = {{1, 1}, {1, -1}, {-1, 1}, {-1, -1}};

} // namespace detail

// Full game state: placement, side to move, castling rights, en passant
// square and move clocks. Copyable value; all mutators return new boards.
// Repetition history is intentionally not tracked.
class Board {
public:
    Color side_to_move = Color::white;
    CastlingRights castling;
    std::optional<Square> en_passant;
    int halfmove_clock = 0;
    int fullmove_number = 1;

    Board() { cells_.fill(0); }

    bool operator==(const Board&) const = default;

    std::optional<Piece> piece_at(Square sq) const {
        std::uint8_t cell = cells_[sq.index()];
        if (cell == 0)
            return std::nullopt;
        return detail::unpack_piece(cell);
    }

    void set_piece(Square sq, std::optional<Piece> piece) {
        cells_[sq.index()] = piece ? detail::pack_piece(*piece) : 0;
    }

    bool empty_at(Square sq) const { return cells_[sq.index()] == 0; }

    Square king_square(Color c) const {
        for (int idx = 0; idx < 64; ++idx) {
            std::uint8_t cell = cells_[idx];
            if (cell != 0) {
                Piece p = detail::unpack_piece(cell);
                if (p.kind == PieceKind::king && p.color == c)
                    return Square::from_index(idx);
            }
        }
        throw ChessError("board has no " + color_name(c) + " king");
    }

    std::vector<Square> piece_squares(Color c) const {
        std::vector<Square> out;
        for (int idx = 0; idx < 64; ++idx) {
            std::uint8_t cell = cells_[idx];
            if (cell != 0 && detail::unpack_piece(cell).color == c)
                out.push_back(Square::from_index(idx));
        }
        return out;
    }

private:
    std::array<std::uint8_t, 64> cells_;
};

// True if any piece of `by` attacks `target` by its capture pattern,
// regardless of pins or whose turn it is.
inline bool is_attacked(const Board& board, Square target, Color by) {
    using namespace detail;
    int tf = target.file, tr = target.rank;

    // Pawns attack one rank toward the enemy.
    int pawn_rank = by == Color::white ? tr - 1 : tr + 1;
    for (int df : {-1, 1}) {
        if (square_in_range(tf + df, pawn_rank)) {
            auto p = board.piece_at(Square(tf + df, pawn_rank));
            if (p && p->color == by && p->kind == PieceKind::pawn)
                return true;
        }
    }
    for (auto& off : knight_offsets) {
        if (square_in_range(tf + off[0], tr + off[1])) {
            auto p = board.piece_at(Square(tf + off[0], tr + off[1]));
            if (p && p->color == by && p->kind == PieceKind::knight)
                return true;
        }
    }
    for (auto& off : king_offsets) {
        if (square_in_range(tf + off[0], tr + off[1])) {
            auto p = board.piece_at(Square(tf + off[0], tr + off[1]));
            if (p && p->color == by && p->kind == PieceKind::king)
                return true;
        }
    }
    for (auto& dir : rook_dirs) {
        for (int f = tf + dir[0], r = tr + dir[1]; square_in_range(f, r);
             f += dir[0], r += dir[1]) {
            auto p = board.piece_at(Square(f, r));
            if (!p)
                continue;
            if (p->color == by &&
                (p->kind == PieceKind::rook || p->kind == PieceKind::queen))
                return true;
            break;
        }
    }
    for (auto& dir : bishop_dirs) {
        for (int f = tf + dir[0], r = tr + dir[1]; square_in_range(f, r);
             f += dir[0], r += dir[1]) {
            auto p = board.piece_at(Square(f, r));
            if (!p)
                continue;
            if (p->color == by &&
                (p->kind == PieceKind::bishop || p->kind == PieceKind::queen))
                return true;
            break;
        }
    }
    return false;
}

inline bool is_check(const Board& board, Color color) {
    return is_attacked(board, board.king_square(color), opposite(color));
}

// Signed material sum from `perspective`'s point of view, kings excluded.
inline int material_delta(const Board& board, Color perspective,
                          const ValuationTable& table = {}) {
    int total = 0;
    for (int idx = 0; idx < 64; ++idx) {
        auto p = board.piece_at(Square::from_index(idx));
        if (!p || p->kind == PieceKind::king)
            continue;
        total += (p->color == perspective ? 1 : -1) * table.value_of(p->kind);
    }
    return total;
}

namespace detail {

inline bool matches_castling_placement(const Board& b, Color c, bool kingside) {
    int rank = c == Color::white ? 0 : 7;
    auto king = b.piece_at(Square(4, rank));
    auto rook = b.piece_at(Square(kingside ? 7 : 0, rank));
    return king && king->color == c && king->kind == PieceKind::king && rook &&
           rook->color == c && rook->kind == PieceKind::rook;
}

inline void validate_board(const Board& b) {
    int kings[2] = {0, 0};
    for (int idx = 0; idx < 64; ++idx) {
        auto p = b.piece_at(Square::from_index(idx));
        if (!p)
            continue;
        if (p->kind == PieceKind::king)
            ++kings[static_cast<int>(p->color)];
        if (p->kind == PieceKind::pawn &&
            (idx / 8 == 0 || idx / 8 == 7))
            throw ParseError("pawn on back rank");
    }
    if (kings[0] != 1 || kings[1] != 1)
        throw ParseError("board must have exactly one king per color");

    if (b.castling.white_kingside && !matches_castling_placement(b, Color::white, true))
        throw ParseError("castling right K inconsistent with placement");
    if (b.castling.white_queenside && !matches_castling_placement(b, Color::white, false))
        throw ParseError("castling right Q inconsistent with placement");
    if (b.castling.black_kingside && !matches_castling_placement(b, Color::black, true))
        throw ParseError("castling right k inconsistent with placement");
    if (b.castling.black_queenside && !matches_castling_placement(b, Color::black, false))
        throw ParseError("castling right q inconsistent with placement");

    if (b.en_passant) {
        Square ep = *b.en_passant;
        bool white_pushed = ep.rank == 2;   // white pawn just played rank 2 -> 4
        bool black_pushed = ep.rank == 5;
        if (!white_pushed && !black_pushed)
            throw ParseError("en passant square must be on rank 3 or rank 6");
        Color pusher = white_pushed ? Color::white : Color::black;
        if (pusher == b.side_to_move)
            throw ParseError("en passant square inconsistent with side to move");
        if (!b.empty_at(ep))
            throw ParseError("en passant square is occupied");
        Square pawn_sq(ep.file, white_pushed ? 3 : 4);
        Square origin_sq(ep.file, white_pushed ? 1 : 6);
        auto pawn = b.piece_at(pawn_sq);
        if (!pawn || pawn->color != pusher || pawn->kind != PieceKind::pawn ||
            !b.empty_at(origin_sq))
            throw ParseError("en passant square has no matching double push");
    }

    // Positions where the side that just moved is still in check are
    // unreachable in legal play; reject rather than guess intent.
    if (is_check(b, opposite(b.side_to_move)))
        throw ParseError("side not to move is in check");
}

} // namespace detail

inline Board parse_fen(const std::string& text) {
    std::istringstream in(text);
    std::string placement, side, castling, ep, field5, field6, extra;
    if (!(in >> placement >> side >> castling >> ep >> field5 >> field6))
        throw ParseError("FEN must have 6 fields: '" + text + "'");
    if (in >> extra)
        throw ParseError("FEN has trailing fields: '" + text + "'");

    Board b;
    int rank = 7, file = 0;
    bool prev_digit = false;
    for (char c : placement) {
        if (c == '/') {
            if (file != 8)
                throw ParseError("FEN rank does not sum to 8 squares");
            if (rank == 0)
                throw ParseError("FEN has more than 8 ranks");
            --rank;
            file = 0;
            prev_digit = false;
        } else if (c >= '1' && c <= '8') {
            if (prev_digit)
                throw ParseError("FEN rank has consecutive digits");
            file += c - '0';
            if (file > 8)
                throw ParseError("FEN rank overflows 8 squares");
            prev_digit = true;
        } else {
            auto piece = piece_from_letter(c);
            if (!piece)
                throw ParseError(std::string("invalid FEN piece letter '") + c + "'");
            if (file > 7)
                throw ParseError("FEN rank overflows 8 squares");
            b.set_piece(Square(file, rank), *piece);
            ++file;
            prev_digit = false;
        }
    }
    if (rank != 0 || file != 8)
        throw ParseError("FEN placement must cover 8 ranks of 8 squares");

    if (side == "w")
        b.side_to_move = Color::white;
    else if (side == "b")
        b.side_to_move = Color::black;
    else
        throw ParseError("FEN side-to-move must be 'w' or 'b'");

    if (castling != "-") {
        for (char c : castling) {
            bool* flag = nullptr;
            switch (c) {
            case 'K': flag = &b.castling.white_kingside; break;
            case 'Q': flag = &b.castling.white_queenside; break;
            case 'k': flag = &b.castling.black_kingside; break;
            case 'q': flag = &b.castling.black_queenside; break;
            default:
                throw ParseError(std::string("invalid castling letter '") + c + "'");
            }
            if (*flag)
                throw ParseError("duplicate castling letter");
            *flag = true;
        }
    }

    if (ep != "-")
        b.en_passant = parse_square(ep);

    try {
        size_t pos = 0;
        b.halfmove_clock = std::stoi(field5, &pos);
        if (pos != field5.size() || b.halfmove_clock < 0)
            throw ParseError("");
    } catch (const std::exception&) {
        throw ParseError("invalid halfmove clock: '" + field5 + "'");
    }
    try {
        size_t pos = 0;
        b.fullmove_number = std::stoi(field6, &pos);
        if (pos != field6.size() || b.fullmove_number < 1)
            throw ParseError("");
    } catch (const std::exception&) {
        throw ParseError("invalid fullmove number: '" + field6 + "'");
    }

    detail::validate_board(b);
    return b;
}

inline std::string emit_fen(const Board& b) {
    std::string out;
    for (int rank = 7; rank >= 0; --rank) {
        int run = 0;
        for (int file = 0; file < 8; ++file) {
            auto p = b.piece_at(Square(file, rank));
            if (!p) {
                ++run;
            } else {
                if (run) {
                    out += static_cast<char>('0' + run);
                    run = 0;
                }
                out += piece_letter(*p);
            }
        }
        if (run)
            out += static_cast<char>('0' + run);
        if (rank)
            out += '/';
    }
    out += b.side_to_move == Color::white ? " w " : " b ";
    out += b.castling.fen_field();
    out += ' ';
    out += b.en_passant ? b.en_passant->text() : "-";
    out += ' ';
    out += std::to_string(b.halfmove_clock);
    out += ' ';
    out += std::to_string(b.fullmove_number);
    return out;
}

inline Board start_position() {
    return parse_fen("rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1");
}

} // namespace chessforge

#endif

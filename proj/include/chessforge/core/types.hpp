#ifndef CHESSFORGE_CORE_TYPES_HPP
#define CHESSFORGE_CORE_TYPES_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace chessforge {

struct ChessError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input text (FEN, UCI move, SAN, PGN).
struct ParseError : ChessError {
    using ChessError::ChessError;
};

// A structurally valid move that is not playable on the given board.
struct IllegalMoveError : ChessError {
    using ChessError::ChessError;
};

enum class Color : std::uint8_t { white, black };

constexpr Color opposite(Color c) {
    return c == Color::white ? Color::black : Color::white;
}

inline std::string color_name(Color c) {
    return c == Color::white ? "white" : "black";
}

enum class PieceKind : std::uint8_t { pawn, knight, bishop, rook, queen, king };

inline std::string piece_kind_name(PieceKind k) {
    switch (k) {
    case PieceKind::pawn: return "pawn";
    case PieceKind::knight: return "knight";
    case PieceKind::bishop: return "bishop";
    case PieceKind::rook: return "rook";
    case PieceKind::queen: return "queen";
    case PieceKind::king: return "king";
    }
    return "?";
}

struct Piece {
    Color color;
    PieceKind kind;

    bool operator==(const Piece&) const = default;
};

// FEN letter: uppercase for white, lowercase for black.
inline char piece_letter(Piece p) {
    static constexpr char white_letters[6] = {'P', 'N', 'B', 'R', 'Q', 'K'};
    char c = white_letters[static_cast<int>(p.kind)];
    return p.color == Color::white ? c : static_cast<char>(c - 'A' + 'a');
}

inline std::optional<Piece> piece_from_letter(char c) {
    Color color = (c >= 'A' && c <= 'Z') ? Color::white : Color::black;
    switch (c >= 'a' ? c : static_cast<char>(c - 'A' + 'a')) {
    case 'p': return Piece{color, PieceKind::pawn};
    case 'n': return Piece{color, PieceKind::knight};
    case 'b': return Piece{color, PieceKind::bishop};
    case 'r': return Piece{color, PieceKind::rook};
    case 'q': return Piece{color, PieceKind::queen};
    case 'k': return Piece{color, PieceKind::king};
    default: return std::nullopt;
    }
}

// Board square. file 0..7 maps to a..h, rank 0..7 maps to 1..8.
struct Square {
    int file = 0;
    int rank = 0;

    constexpr Square() = default;
    constexpr Square(int f, int r) : file(f), rank(r) {}

    static constexpr Square from_index(int idx) { return Square(idx % 8, idx / 8); }
    constexpr int index() const { return rank * 8 + file; }

    bool operator==(const Square&) const = default;
    auto operator<=>(const Square&) const = default;

    std::string text() const {
        return {static_cast<char>('a' + file), static_cast<char>('1' + rank)};
    }
};

constexpr bool square_in_range(int file, int rank) {
    return file >= 0 && file < 8 && rank >= 0 && rank < 8;
}

inline Square parse_square(const std::string& text) {
    if (text.size() != 2)
        throw ParseError("square must be two characters: '" + text + "'");
    int file = text[0] - 'a';
    int rank = text[1] - '1';
    if (!square_in_range(file, rank))
        throw ParseError("square out of range: '" + text + "'");
    return Square(file, rank);
}

// UCI coordinate move: source, destination, optional promotion piece.
struct Move {
    Square from;
    Square to;
    std::optional<PieceKind> promotion;

    bool operator==(const Move&) const = default;

    std::string uci() const {
        std::string s = from.text() + to.text();
        if (promotion) {
            switch (*promotion) {
            case PieceKind::knight: s += 'n'; break;
            case PieceKind::bishop: s += 'b'; break;
            case PieceKind::rook: s += 'r'; break;
            case PieceKind::queen: s += 'q'; break;
            default: break;
            }
        }
        return s;
    }
};

// Orders moves by their UCI text, the ordering used everywhere output
// must be reproducible.
inline bool uci_less(const Move& a, const Move& b) {
    return a.uci() < b.uci();
}

inline Move parse_uci_move(const std::string& text) {
    if (text.size() != 4 && text.size() != 5)
        throw ParseError("UCI move must be 4 or 5 characters: '" + text + "'");
    Move m;
    m.from = parse_square(text.substr(0, 2));
    m.to = parse_square(text.substr(2, 2));
    if (text.size() == 5) {
        switch (text[4]) {
        case 'n': m.promotion = PieceKind::knight; break;
        case 'b': m.promotion = PieceKind::bishop; break;
        case 'r': m.promotion = PieceKind::rook; break;
        case 'q': m.promotion = PieceKind::queen; break;
        default:
            throw ParseError("invalid promotion letter in '" + text + "'");
        }
    }
    return m;
}

inline std::string emit_uci_move(const Move& m) { return m.uci(); }

// Per-kind material values in pawn units. King excluded.
struct ValuationTable {
    int pawn = 1;
    int knight = 3;
    int bishop = 3;
    int rook = 5;
    int queen = 9;

    int value_of(PieceKind k) const {
        switch (k) {
        case PieceKind::pawn: return pawn;
        case PieceKind::knight: return knight;
        case PieceKind::bishop: return bishop;
        case PieceKind::rook: return rook;
        case PieceKind::queen: return queen;
        case PieceKind::king:
            throw ChessError("king has no material value");
        }
        return 0;
    }
};

struct CastlingRights {
    bool white_kingside = false;
    bool white_queenside = false;
    bool black_kingside = false;
    bool black_queenside = false;

    bool operator==(const CastlingRights&) const = default;

    bool any() const {
        return white_kingside || white_queenside || black_kingside || black_queenside;
    }

    std::string fen_field() const {
        if (!any())
            return "-";
        std::string s;
        if (white_kingside) s += 'K';
        if (white_queenside) s += 'Q';
        if (black_kingside) s += 'k';
        if (black_queenside) s += 'q';
        return s;
    }
};

} // namespace chessforge

#endif

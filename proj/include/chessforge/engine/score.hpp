#ifndef CHESSFORGE_ENGINE_SCORE_HPP
#define CHESSFORGE_ENGINE_SCORE_HPP

#include <cstdlib>
#include <optional>
#include <vector>

#include "chessforge/core/types.hpp"

namespace chessforge {

// Mate scores fold into the centipawn scale at this base so deltas between a
// mate and a normal evaluation stay finite and deeper mates score closer to
// zero than faster ones.
constexpr int kMateBase = 10000;

// Signed plies to mate -> clamped centipawn value. Positive input means the
// side to move mates, negative means it gets mated.
inline int mate_to_centipawn(int mate_in_plies) {
    if (mate_in_plies == 0)
        throw ChessError("mate_to_centipawn: plies must be nonzero");
    int sign = mate_in_plies > 0 ? 1 : -1;
    return sign * (kMateBase - std::abs(mate_in_plies));
}

// Engine evaluation from the queried side-to-move's perspective. mate_in of
// zero marks a position that is already checkmate.
struct CentipawnScore {
    int value = 0;
    std::optional<int> mate_in;

    static CentipawnScore from_cp(int cp) { return {cp, std::nullopt}; }
    static CentipawnScore from_mate(int plies) {
        return {mate_to_centipawn(plies), plies};
    }
    static CentipawnScore mated_now() { return {-kMateBase, 0}; }

    bool operator==(const CentipawnScore&) const = default;
};

// Best-first comparison. The clamped mapping already makes plain numeric
// comparison agree with mate preferences; spelling it out keeps the contract
// explicit even for centipawn values outside the clamp window.
inline bool score_better(const CentipawnScore& a, const CentipawnScore& b) {
    bool a_mate_for = a.mate_in && *a.mate_in > 0;
    bool b_mate_for = b.mate_in && *b.mate_in > 0;
    bool a_mate_against = a.mate_in && *a.mate_in <= 0;
    bool b_mate_against = b.mate_in && *b.mate_in <= 0;
    if (a_mate_for != b_mate_for)
        return a_mate_for;
    if (a_mate_for)
        return *a.mate_in < *b.mate_in;
    if (a_mate_against != b_mate_against)
        return b_mate_against;
    if (a_mate_against)
        return *a.mate_in < *b.mate_in;
    return a.value > b.value;
}

// Reading of one searched root move.
struct MoveEvaluation {
    Move move;
    CentipawnScore score;
    std::vector<Move> pv;
};

// Perspective normalization: every cross-ply computation in this codebase
// first maps scores to white's point of view, then applies signs once.
inline int white_view(const CentipawnScore& s, Color side_to_move) {
    return side_to_move == Color::white ? s.value : -s.value;
}

// The same score reported from the other side of the board.
inline CentipawnScore flip_perspective(const CentipawnScore& s) {
    CentipawnScore out;
    out.value = -s.value;
    if (s.mate_in)
        out.mate_in = -*s.mate_in;
    return out;
}

inline int side_view(int white_value, Color side) {
    return side == Color::white ? white_value : -white_value;
}

} // namespace chessforge

#endif

// Minimal deterministic UCI engine used as the test and demo engine.
//
// It searches every root move with an independent full-window negamax, so a
// move's score never depends on which other moves share the MultiPV set or a
// searchmoves restriction. That property is what makes chunked multi-PV
// ranking exact instead of approximate.

#include <algorithm>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "chessforge/core/movegen.hpp"

using namespace chessforge;

namespace {

constexpr int kMateValue = 30000;
constexpr int kMateThreshold = 29000;
constexpr int kMaxDepth = 16;

int piece_value_cp(PieceKind k) {
    switch (k) {
    case PieceKind::pawn: return 100;
    case PieceKind::knight: return 320;
    case PieceKind::bishop: return 330;
    case PieceKind::rook: return 500;
    case PieceKind::queen: return 900;
    case PieceKind::king: return 0;
    }
    return 0;
}

// Static evaluation from the side to move's perspective: material plus a
// small centrality bonus, enough to make searches discriminate moves.
int evaluate_static(const Board& b) {
    int score = 0;
    for (int idx = 0; idx < 64; ++idx) {
        Square sq = Square::from_index(idx);
        auto p = b.piece_at(sq);
        if (!p)
            continue;
        int v = piece_value_cp(p->kind);
        int center_dist = std::abs(2 * sq.file - 7) + std::abs(2 * sq.rank - 7);
        if (p->kind != PieceKind::king)
            v += (14 - center_dist) / 2;
        score += p->color == b.side_to_move ? v : -v;
    }
    return score;
}

int negamax(const Board& b, int depth, int ply, int alpha, int beta) {
    auto moves = legal_moves(b);
    if (moves.empty())
        return is_check(b, b.side_to_move) ? -(kMateValue - ply) : 0;
    if (depth <= 0)
        return evaluate_static(b);
    int best = -kMateValue - 1;
    for (const Move& m : moves) {
        Board child = b;
        child = apply_legal(child, m);
        int s = -negamax(child, depth - 1, ply + 1, -beta, -alpha);
        best = std::max(best, s);
        alpha = std::max(alpha, s);
        if (alpha >= beta)
            break;
    }
    return best;
}

struct RootScore {
    Move move;
    int score = 0;
    std::vector<Move> pv;
};

std::vector<Move> build_pv(Board b, Move first, int depth) {
    std::vector<Move> pv{first};
    b = apply_legal(b, first);
    for (int d = depth - 1; d >= 1; --d) {
        auto moves = legal_moves(b);
        if (moves.empty())
            break;
        Move best = moves.front();
        int best_score = -kMateValue - 1;
        for (const Move& m : moves) {
            Board child = b;
            child = apply_legal(child, m);
            int s = -negamax(child, d - 1, 1, -kMateValue, kMateValue);
            if (s > best_score) {
                best_score = s;
                best = m;
            }
        }
        pv.push_back(best);
        b = apply_legal(b, best);
    }
    return pv;
}

std::string score_field(int s) {
    std::ostringstream out;
    if (s > kMateThreshold) {
        int plies = kMateValue - s;
        out << "mate " << (plies + 1) / 2;
    } else if (s < -kMateThreshold) {
        int plies = kMateValue + s;
        out << "mate -" << (plies + 1) / 2;
    } else {
        out << "cp " << s;
    }
    return out.str();
}

struct EngineState {
    Board board = start_position();
    int multipv = 1;
};

void handle_position(EngineState& st, std::istringstream& in) {
    std::string tok;
    in >> tok;
    if (tok == "startpos") {
        st.board = start_position();
        in >> tok;
    } else if (tok == "fen") {
        std::string fen, part;
        for (int i = 0; i < 6 && in >> part; ++i) {
            if (i > 0)
                fen += ' ';
            fen += part;
        }
        st.board = parse_fen(fen);
        in >> tok;
    }
    if (tok == "moves") {
        std::string mv;
        while (in >> mv)
            st.board = apply_move(st.board, parse_uci_move(mv));
    }
}

void handle_go(EngineState& st, std::istringstream& in) {
    int depth = 2;
    std::vector<Move> restriction;
    std::string tok;
    while (in >> tok) {
        if (tok == "depth") {
            in >> depth;
        } else if (tok == "movetime") {
            long ms;
            in >> ms;
            depth = 2;
        } else if (tok == "searchmoves") {
            std::string mv;
            while (in >> mv)
                restriction.push_back(parse_uci_move(mv));
        }
    }
    depth = std::clamp(depth, 1, kMaxDepth);

    auto moves = legal_moves(st.board);
    if (!restriction.empty()) {
        std::vector<Move> kept;
        for (const Move& m : moves)
            for (const Move& r : restriction)
                if (m.uci() == r.uci())
                    kept.push_back(m);
        moves = kept;
    }
    if (moves.empty()) {
        const char* score =
            is_check(st.board, st.board.side_to_move) ? "mate 0" : "cp 0";
        std::cout << "info depth 0 score " << score << "\n";
        std::cout << "bestmove (none)" << std::endl;
        return;
    }

    std::vector<RootScore> roots;
    for (const Move& m : moves) {
        Board child = st.board;
        child = apply_legal(child, m);
        RootScore r;
        r.move = m;
        r.score = -negamax(child, depth - 1, 1, -kMateValue, kMateValue);
        roots.push_back(r);
    }
    std::stable_sort(roots.begin(), roots.end(),
                     [](const RootScore& a, const RootScore& b) {
                         if (a.score != b.score)
                             return a.score > b.score;
                         return uci_less(a.move, b.move);
                     });

    int lines = std::min<int>(st.multipv, static_cast<int>(roots.size()));
    for (int k = 0; k < lines; ++k) {
        RootScore& r = roots[k];
        r.pv = build_pv(st.board, r.move, depth);
        std::cout << "info depth " << depth << " multipv " << (k + 1)
                  << " score " << score_field(r.score) << " nodes 1 pv";
        for (const Move& m : r.pv)
            std::cout << ' ' << m.uci();
        std::cout << "\n";
    }
    std::cout << "bestmove " << roots.front().move.uci() << std::endl;
}

} // namespace

int main() {
    std::ios::sync_with_stdio(false);
    EngineState st;
    std::string line;
    while (std::getline(std::cin, line)) {
        std::istringstream in(line);
        std::string cmd;
        in >> cmd;
        if (cmd == "uci") {
            std::cout << "id name forge-stub 1.0\n";
            std::cout << "id author chessforge\n";
            std::cout << "option name MultiPV type spin default 1 min 1 max 256\n";
            std::cout << "uciok" << std::endl;
        } else if (cmd == "isready") {
            std::cout << "readyok" << std::endl;
        } else if (cmd == "setoption") {
            std::string tok, name, value;
            in >> tok >> name;
            if (in >> tok >> value && name == "MultiPV")
                st.multipv = std::max(1, std::stoi(value));
        } else if (cmd == "ucinewgame") {
            st.board = start_position();
        } else if (cmd == "position") {
            handle_position(st, in);
        } else if (cmd == "go") {
            handle_go(st, in);
        } else if (cmd == "quit") {
            break;
        }
    }
    return 0;
}

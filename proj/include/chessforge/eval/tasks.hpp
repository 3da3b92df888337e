#ifndef CHESSFORGE_EVAL_TASKS_HPP
#define CHESSFORGE_EVAL_TASKS_HPP

#include <string>
#include <vector>

#include "chessforge/core/movegen.hpp"
#include "chessforge/engine/session.hpp"
#include "chessforge/format/board_format.hpp"
#include "chessforge/prompts/instructions.hpp"
#include "chessforge/util/rng.hpp"

namespace chessforge {

struct TaskError : ChessError {
    using ChessError::ChessError;
};

enum class TaskKind {
    predict_move,
    best_move,
    worst_move,
    legal_moves,
    ood_mate,
};

inline std::string task_kind_name(TaskKind k) {
    switch (k) {
    case TaskKind::predict_move: return "predict_move";
    case TaskKind::best_move: return "best_move";
    case TaskKind::worst_move: return "worst_move";
    case TaskKind::legal_moves: return "legal_moves";
    case TaskKind::ood_mate: return "ood_mate";
    }
    throw std::logic_error("unreachable");
}

inline TaskKind parse_task_kind(const std::string& name) {
    if (name == "predict_move") return TaskKind::predict_move;
    if (name == "best_move") return TaskKind::best_move;
    if (name == "worst_move") return TaskKind::worst_move;
    if (name == "legal_moves") return TaskKind::legal_moves;
    if (name == "ood_mate") return TaskKind::ood_mate;
    throw ParseError("unknown task kind '" + name + "'");
}

struct TaskParams {
    int quality_threshold_cp = 100;
    uint64_t seed = 0;
};

struct EvalTask {
    TaskKind kind = TaskKind::predict_move;
    Board board;
    std::vector<Move> candidates;        // exactly 5 for the choice kinds
    std::optional<Square> target_square; // legal_moves kind only
    std::vector<Move> answer_key;        // single move, or a move set
    TaskParams params;
};

// Structural invariants checked both at construction and on ingestion.
inline void validate_task(const EvalTask& t) {
    switch (t.kind) {
    case TaskKind::predict_move:
        if (is_terminal(t.board))
            throw TaskError("predict_move task needs a nonterminal board");
        break;
    case TaskKind::best_move:
    case TaskKind::worst_move: {
        if (t.candidates.size() != 5)
            throw TaskError("choice task needs exactly 5 candidates");
        if (t.answer_key.size() != 1)
            throw TaskError("choice task needs a single-move answer key");
        std::vector<std::string> ucis;
        for (const Move& m : t.candidates) {
            if (!is_legal(t.board, m))
                throw TaskError("choice candidate " + m.uci() + " is illegal");
            ucis.push_back(m.uci());
        }
        std::sort(ucis.begin(), ucis.end());
        if (std::adjacent_find(ucis.begin(), ucis.end()) != ucis.end())
            throw TaskError("choice candidates must be distinct");
        if (std::find(t.candidates.begin(), t.candidates.end(),
                      t.answer_key.front()) == t.candidates.end())
            throw TaskError("choice answer key must be among the candidates");
        break;
    }
    case TaskKind::legal_moves: {
        if (!t.target_square)
            throw TaskError("legal_moves task needs a target square");
        auto piece = t.board.piece_at(*t.target_square);
        if (!piece || piece->color != t.board.side_to_move)
            throw TaskError("legal_moves target square must hold a piece of "
                            "the side to move");
        break;
    }
    case TaskKind::ood_mate: {
        bool any_mate = false;
        for (const Move& m : legal_moves(t.board))
            if (is_checkmate(apply_legal(t.board, m))) {
                any_mate = true;
                break;
            }
        if (!any_mate)
            throw TaskError("ood_mate task needs at least one mating move");
        break;
    }
    }
}

inline EvalTask make_predict_move_task(const Board& board,
                                       TaskParams params = {}) {
    EvalTask t;
    t.kind = TaskKind::predict_move;
    t.board = board;
    t.params = params;
    validate_task(t);
    return t;
}

// Five candidates: the engine-best (or engine-worst) move as the key plus
// four distractors, every distractor at least quality_threshold_cp away from
// the key. Candidate order is shuffled by the task seed.
inline EvalTask make_choice_task(const Board& board, EngineSession& session,
                                 TaskKind kind, Rng& rng,
                                 TaskParams params = {}) {
    if (kind != TaskKind::best_move && kind != TaskKind::worst_move)
        throw TaskError("make_choice_task handles best_move/worst_move only");
    auto legal = legal_moves(board);
    if (legal.size() < 5)
        throw TaskError("choice task needs a board with at least 5 legal "
                        "moves, got " + std::to_string(legal.size()));

    auto ranked = session.rank_moves(board);
    bool best = kind == TaskKind::best_move;
    const MoveEvaluation& key = best ? ranked.front() : ranked.back();

    std::vector<Move> pool;
    for (const MoveEvaluation& ev : ranked) {
        int gap = best ? key.score.value - ev.score.value
                       : ev.score.value - key.score.value;
        if (gap >= params.quality_threshold_cp)
            pool.push_back(ev.move);
    }
    if (pool.size() < 4)
        throw TaskError("no 5-candidate set satisfies the quality margin");

    rng.shuffle(pool);
    EvalTask t;
    t.kind = kind;
    t.board = board;
    t.params = params;
    t.answer_key = {key.move};
    t.candidates.assign(pool.begin(), pool.begin() + 4);
    t.candidates.push_back(key.move);
    rng.shuffle(t.candidates);
    validate_task(t);
    return t;
}

// Piece-square selection weighted by piece kind (uniform by default), answer
// key = that piece's legal moves (possibly empty).
struct PieceWeights {
    double pawn = 1, knight = 1, bishop = 1, rook = 1, queen = 1, king = 1;

    double of(PieceKind k) const {
        switch (k) {
        case PieceKind::pawn: return pawn;
        case PieceKind::knight: return knight;
        case PieceKind::bishop: return bishop;
        case PieceKind::rook: return rook;
        case PieceKind::queen: return queen;
        case PieceKind::king: return king;
        }
        return 0;
    }
};

inline EvalTask make_legal_moves_task(const Board& board, Rng& rng,
                                      TaskParams params = {},
                                      const PieceWeights& weights = {}) {
    auto squares = board.piece_squares(board.side_to_move);
    std::vector<double> w;
    for (Square sq : squares)
        w.push_back(weights.of(board.piece_at(sq)->kind));
    EvalTask t;
    t.kind = TaskKind::legal_moves;
    t.board = board;
    t.params = params;
    t.target_square = squares[rng.pick_weighted(w)];
    t.answer_key = legal_moves_for_square(board, *t.target_square);
    validate_task(t);
    return t;
}

inline EvalTask make_ood_mate_task(const Board& board, TaskParams params = {}) {
    EvalTask t;
    t.kind = TaskKind::ood_mate;
    t.board = board;
    t.params = params;
    validate_task(t);
    return t;
}

// Instruction + rendered board + kind-specific context + answer contract.
// Prompts and the extraction rules in scoring.hpp co-specify each other.
inline std::string task_prompt(const EvalTask& t, BoardFormat format) {
    std::string out;
    switch (t.kind) {
    case TaskKind::predict_move:
        out = prompts::kPredictMoveInstruction;
        break;
    case TaskKind::best_move:
        out = prompts::kBestChoiceInstruction;
        break;
    case TaskKind::worst_move:
        out = prompts::kWorstChoiceInstruction;
        break;
    case TaskKind::legal_moves:
        out = prompts::kLegalMovesInstruction;
        break;
    case TaskKind::ood_mate:
        out = prompts::kOodMateInstruction;
        break;
    }
    out += "\n\n";
    out += render_prompt_board(t.board, format);
    if (t.kind == TaskKind::best_move || t.kind == TaskKind::worst_move) {
        out += "\nCandidate moves: ";
        for (size_t i = 0; i < t.candidates.size(); ++i) {
            if (i > 0)
                out += ", ";
            out += t.candidates[i].uci();
        }
        out += "\n";
    }
    if (t.kind == TaskKind::legal_moves)
        out += "\nPiece square: " + t.target_square->text() + "\n";
    out += "\n";
    out += t.kind == TaskKind::legal_moves ? prompts::kAnswerContractList
                                           : prompts::kAnswerContractSingle;
    out += "\n";
    return out;
}

} // namespace chessforge

#endif

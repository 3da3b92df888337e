#ifndef CHESSFORGE_DATAGEN_GENERATORS_HPP
#define CHESSFORGE_DATAGEN_GENERATORS_HPP

#include <string>

#include "chessforge/datagen/sample.hpp"
#include "chessforge/engine/session.hpp"
#include "chessforge/format/board_format.hpp"
#include "chessforge/prompts/instructions.hpp"
#include "chessforge/util/rng.hpp"

namespace chessforge {

inline std::string signed_cp(int cp) {
    return (cp >= 0 ? "+" : "") + std::to_string(cp);
}

// Bare best-move record: the response is the move text alone, nothing else.
inline Sample gen_best_move(const Board& board, EngineSession& session,
                            BoardFormat format = BoardFormat::visual_ascii) {
    if (is_terminal(board))
        throw ChessError("best-move generation needs a nonterminal position");
    MoveEvaluation best = session.best_move(board);
    Sample s;
    s.task = SampleTask::best_move;
    s.fen = emit_fen(board);
    s.prompt = std::string(prompts::kBestMoveDataInstruction) + "\n\n" +
               render_prompt_board(board, format);
    s.response = best.move.uci();
    s.meta["depth"] = std::to_string(session.config().depth.value_or(0));
    s.meta["score_cp"] = std::to_string(best.score.value);
    return s;
}

// Optimal line of 4 to 6 plies ending with the evaluation delta, measured
// from the original side to move's perspective. A game that ends early
// yields a shorter line and a terminal flag in meta.
inline Sample gen_best_line(const Board& board, EngineSession& session,
                            Rng& rng, uint64_t seed,
                            BoardFormat format = BoardFormat::visual_ascii) {
    if (is_terminal(board))
        throw ChessError("best-line generation needs a nonterminal position");
    int plies = 4 + static_cast<int>(rng.next_below(3));
    int start = session.evaluate(board).value;
    BestLine line = session.best_line(board, plies);
    int delta = line.end_score.value - start;

    std::string moves;
    for (const Move& m : line.line)
        moves += (moves.empty() ? "" : " ") + m.uci();

    Sample s;
    s.task = SampleTask::best_line;
    s.fen = emit_fen(board);
    s.prompt = std::string(prompts::kBestLineDataInstruction) + "\n\n" +
               render_prompt_board(board, format);
    s.response = moves + " delta: " + signed_cp(delta);
    s.meta["seed"] = std::to_string(seed);
    s.meta["depth"] = std::to_string(session.config().depth.value_or(0));
    s.meta["plies_requested"] = std::to_string(plies);
    s.meta["plies"] = std::to_string(line.line.size());
    s.meta["eval_start_cp"] = std::to_string(start);
    s.meta["eval_end_cp"] = std::to_string(line.end_score.value);
    if (line.terminal)
        s.meta["terminal"] = "true";
    return s;
}

} // namespace chessforge

#endif

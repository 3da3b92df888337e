#ifndef CHESSFORGE_ENGINE_SESSION_HPP
#define CHESSFORGE_ENGINE_SESSION_HPP

#include <algorithm>
#include <memory>

#include "chessforge/core/movegen.hpp"
#include "chessforge/engine/transcript.hpp"
#include "chessforge/engine/uci_backend.hpp"

namespace chessforge {

struct BestLine {
    std::vector<Move> line;
    // From the perspective of the side to move on the queried board, not the
    // side to move at the end of the line. mate_in 0 with a positive value
    // means the line ends with the opponent checkmated.
    CentipawnScore end_score;
    bool terminal = false;
};

// High-level engine facade: position evaluation, full move ranking, and
// principal-variation lines, over any backend (live, cached, or replay).
// One logical caller at a time; EnginePool hands out exclusive leases.
class EngineSession {
  public:
    EngineSession(const EngineConfig& config,
                  std::unique_ptr<EngineBackend> backend)
        : config_(config), backend_(std::move(backend)) {
        config_.validate();
    }

    const EngineConfig& config() const { return config_; }
    std::string id_name() const { return backend_->id_name(); }

    // V_engine(board) from the side to move's perspective. Terminal positions
    // never reach the engine: checkmate maps to the mate base, stalemate to 0.
    CentipawnScore evaluate(const Board& board) {
        if (is_checkmate(board))
            return CentipawnScore::mated_now();
        if (is_stalemate(board))
            return CentipawnScore::from_cp(0);
        auto reply = backend_->search(request(board, 1, {}));
        auto it = reply.find(1);
        if (it == reply.end())
            throw EngineError("engine produced no score for " + emit_fen(board));
        return it->second.score;
    }

    // Single search for the engine's preferred move with its score and pv.
    MoveEvaluation best_move(const Board& board) {
        if (is_terminal(board))
            throw EngineError("best_move requires a nonterminal position");
        auto reply = backend_->search(request(board, 1, {}));
        auto it = reply.find(1);
        if (it == reply.end() || it->second.pv.empty())
            throw EngineError("engine produced no pv for " + emit_fen(board));
        MoveEvaluation ev;
        ev.score = it->second.score;
        for (const auto& mv : it->second.pv)
            ev.pv.push_back(parse_uci_move(mv));
        ev.move = ev.pv.front();
        return ev;
    }

    // Scores every legal move, best first. Multi-PV runs in chunks of at most
    // multipv_max moves restricted via searchmoves; chunk scores stay
    // comparable because the search depth is pinned.
    std::vector<MoveEvaluation> rank_moves(const Board& board) {
        auto legal = legal_moves(board);
        if (legal.empty())
            throw EngineError("rank_moves requires at least one legal move");
        if (!config_.depth)
            throw EngineError("rank_moves requires a depth-limited config; "
                              "movetime makes chunk scores incomparable");

        std::vector<MoveEvaluation> out;
        size_t chunk_size = static_cast<size_t>(config_.multipv_max);
        for (size_t base = 0; base < legal.size(); base += chunk_size) {
            size_t count = std::min(chunk_size, legal.size() - base);
            std::vector<Move> chunk(legal.begin() + base,
                                    legal.begin() + base + count);
            bool whole = count == legal.size();
            auto reply = backend_->search(request(
                board, static_cast<int>(count), whole ? std::vector<Move>{} : chunk));
            for (const auto& [slot, line] : reply) {
                if (line.pv.empty())
                    throw EngineError("engine line missing pv");
                MoveEvaluation ev;
                ev.score = line.score;
                for (const auto& mv : line.pv)
                    ev.pv.push_back(parse_uci_move(mv));
                ev.move = ev.pv.front();
                out.push_back(std::move(ev));
            }
        }

        std::vector<std::string> got, want;
        for (const auto& ev : out)
            got.push_back(ev.move.uci());
        for (const auto& m : legal)
            want.push_back(m.uci());
        std::sort(got.begin(), got.end());
        if (got != want)
            throw EngineError("engine move set disagrees with legal moves");

        std::sort(out.begin(), out.end(),
                  [](const MoveEvaluation& a, const MoveEvaluation& b) {
                      if (a.score != b.score)
                          return score_better(a.score, b.score);
                      return uci_less(a.move, b.move);
                  });
        return out;
    }

    // Principal variation extended search by search to exactly `plies`
    // moves, or fewer if the game ends first (terminal flag set). The end
    // score is reported from the original board's side-to-move perspective.
    BestLine best_line(const Board& board, int plies) {
        if (plies < 1)
            throw EngineError("best_line requires plies >= 1");
        if (is_terminal(board))
            throw EngineError("best_line requires a nonterminal position");
        BestLine result;
        Board cur = board;
        while (static_cast<int>(result.line.size()) < plies &&
               !is_terminal(cur)) {
            auto reply = backend_->search(request(cur, 1, {}));
            auto it = reply.find(1);
            if (it == reply.end() || it->second.pv.empty())
                throw EngineError("engine produced no pv for " + emit_fen(cur));
            for (const auto& mv : it->second.pv) {
                if (static_cast<int>(result.line.size()) >= plies)
                    break;
                Move m = parse_uci_move(mv);
                cur = apply_move(cur, m);
                result.line.push_back(m);
                if (is_terminal(cur))
                    break;
            }
        }
        result.terminal = is_terminal(cur);
        CentipawnScore end = evaluate(cur);
        result.end_score = cur.side_to_move == board.side_to_move
                               ? end
                               : flip_perspective(end);
        return result;
    }

  private:
    SearchRequest request(const Board& board, int multipv,
                          const std::vector<Move>& searchmoves) const {
        SearchRequest req;
        req.fen = emit_fen(board);
        req.multipv = multipv;
        std::ostringstream go;
        go << "go ";
        if (config_.depth)
            go << "depth " << *config_.depth;
        else
            go << "movetime " << *config_.movetime_ms;
        if (!searchmoves.empty()) {
            go << " searchmoves";
            for (const Move& m : searchmoves)
                go << ' ' << m.uci();
        }
        req.go = go.str();
        return req;
    }

    EngineConfig config_;
    std::unique_ptr<EngineBackend> backend_;
};

// Standard assembly: live engine when an executable is configured, wrapped
// in a transcript cache when a cache is supplied, replay-only otherwise.
inline std::unique_ptr<EngineSession>
make_session(const EngineConfig& config,
             std::shared_ptr<TranscriptCache> cache = nullptr) {
    std::unique_ptr<EngineBackend> backend;
    if (!config.executable_path.empty())
        backend = std::make_unique<UciBackend>(config);
    if (cache)
        backend = std::make_unique<CachedBackend>(cache, std::move(backend));
    if (!backend)
        throw EngineError("neither engine executable nor transcript cache given");
    return std::make_unique<EngineSession>(config, std::move(backend));
}

} // namespace chessforge

#endif

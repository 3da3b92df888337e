#ifndef CHESSFORGE_DATAGEN_FILTERS_HPP
#define CHESSFORGE_DATAGEN_FILTERS_HPP

#include <map>
#include <string>
#include <vector>

#include "chessforge/datagen/sample.hpp"
#include "chessforge/eval/scoring.hpp"
#include "chessforge/util/rng.hpp"

namespace chessforge {

struct RejectionThresholds {
    double min_rank = 0.8;
    double min_iou = 0.8;
};

struct FilterDecision {
    bool accepted = false;
    std::string reason; // empty on accept
};

// Keep-or-drop rule for model outputs: choice tasks demand the exact right
// answer, open-ended tasks demand a quality floor.
inline FilterDecision rejection_filter(const EvalTask& task,
                                       const std::string& model_output,
                                       EngineSession* session,
                                       RejectionThresholds thresholds = {}) {
    ScoreReport rep = score_task(task, model_output, session);
    switch (task.kind) {
    case TaskKind::predict_move:
        if (!rep.parsed_answer)
            return {false, "parse_failure"};
        if (!rep.legal.value_or(false))
            return {false, "illegal_move"};
        if (*rep.normalized_rank < thresholds.min_rank)
            return {false, "rank_below_threshold"};
        return {true, ""};
    case TaskKind::best_move:
    case TaskKind::worst_move:
        if (!rep.parsed_answer)
            return {false, "parse_failure"};
        return rep.correct.value_or(false)
                   ? FilterDecision{true, ""}
                   : FilterDecision{false, "wrong_choice"};
    case TaskKind::legal_moves:
        if (!rep.iou)
            return {false, "parse_failure"};
        return *rep.iou >= thresholds.min_iou
                   ? FilterDecision{true, ""}
                   : FilterDecision{false, "iou_below_threshold"};
    case TaskKind::ood_mate:
        if (!rep.parsed_answer)
            return {false, "parse_failure"};
        return rep.correct.value_or(false)
                   ? FilterDecision{true, ""}
                   : FilterDecision{false, "not_a_mate"};
    }
    throw std::logic_error("unreachable");
}

// Ten-fullmove buckets: moves 1-10 land in bucket 0, 11-20 in bucket 1, ...
inline int fullmove_bucket(int fullmove_number) {
    if (fullmove_number < 1)
        throw ChessError("fullmove numbers start at 1");
    return (fullmove_number - 1) / 10;
}

struct RebalanceTargets {
    std::map<int, double> fullmove_share;      // bucket -> share of batch
    std::map<PieceKind, double> piece_share;   // moved piece -> share
};

struct RebalanceResult {
    std::vector<Sample> samples;
    std::map<std::string, int> before;
    std::map<std::string, int> after;
    std::vector<std::string> diagnostics;
};

namespace detail {

inline std::pair<int, PieceKind> rebalance_cell(const Sample& s) {
    Board board = parse_fen(s.fen);
    auto it = s.meta.find("move");
    if (it == s.meta.end())
        throw ChessError("rebalance needs meta.move on every record");
    Move move = parse_uci_move(it->second);
    auto piece = board.piece_at(move.from);
    if (!piece)
        throw ChessError("meta.move " + it->second +
                         " starts on an empty square of " + s.fen);
    return {fullmove_bucket(board.fullmove_number), piece->kind};
}

} // namespace detail

// Seed-deterministic subsample toward the target marginals over fullmove
// bucket and moved-piece kind. Each record keeps with probability
// min(1, target/actual) per dimension, so an already balanced batch passes
// through whole and an overrepresented slice is thinned.
inline RebalanceResult rebalance_accepted(const std::vector<Sample>& batch,
                                          const RebalanceTargets& targets,
                                          uint64_t seed) {
    RebalanceResult result;
    if (batch.empty())
        return result;

    std::vector<std::pair<int, PieceKind>> cells;
    std::map<int, int> bucket_count;
    std::map<PieceKind, int> piece_count;
    for (const Sample& s : batch) {
        cells.push_back(detail::rebalance_cell(s));
        bucket_count[cells.back().first]++;
        piece_count[cells.back().second]++;
        result.before["fullmove_bucket:" +
                      std::to_string(cells.back().first)]++;
        result.before["piece:" + piece_kind_name(cells.back().second)]++;
    }

    double n = static_cast<double>(batch.size());
    auto keep_factor = [&](double target, int count) {
        double actual = count / n;
        return actual <= target ? 1.0 : target / actual;
    };

    Rng rng(seed);
    std::map<std::string, double> heavy;
    for (size_t i = 0; i < batch.size(); ++i) {
        double p = 1.0;
        if (auto it = targets.fullmove_share.find(cells[i].first);
            it != targets.fullmove_share.end()) {
            double f = keep_factor(it->second, bucket_count[cells[i].first]);
            p *= f;
            if (f < 0.5)
                heavy["fullmove bucket " + std::to_string(cells[i].first)] = f;
        }
        if (auto it = targets.piece_share.find(cells[i].second);
            it != targets.piece_share.end()) {
            double f = keep_factor(it->second, piece_count[cells[i].second]);
            p *= f;
            if (f < 0.5)
                heavy["piece " + piece_kind_name(cells[i].second)] = f;
        }
        if (rng.next_double() < p) {
            result.samples.push_back(batch[i]);
            result.after["fullmove_bucket:" +
                         std::to_string(cells[i].first)]++;
            result.after["piece:" + piece_kind_name(cells[i].second)]++;
        }
    }

    for (const auto& [what, factor] : heavy)
        result.diagnostics.push_back(
            what + " kept at " + std::to_string(factor) +
            " of its records to approach the target share");
    return result;
}

} // namespace chessforge

#endif

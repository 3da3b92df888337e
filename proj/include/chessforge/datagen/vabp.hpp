#ifndef CHESSFORGE_DATAGEN_VABP_HPP
#define CHESSFORGE_DATAGEN_VABP_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "chessforge/datagen/generators.hpp"
#include "chessforge/datagen/sample.hpp"
#include "chessforge/engine/session.hpp"
#include "chessforge/format/board_format.hpp"
#include "chessforge/prompts/instructions.hpp"
#include "chessforge/util/rng.hpp"

namespace chessforge {

struct VabpParams {
    double temperature = 100.0; // centipawns per softmax unit
    int root_candidates = 3;
    int child_candidates = 2;
    int depth_limit = 4;
    int node_budget = 12;
    int writeoff_margin = 150; // centipawns
    uint64_t seed = 0;

    void validate() const {
        if (temperature <= 0)
            throw ChessError("vabp temperature must be positive");
        if (root_candidates < 2)
            throw ChessError("vabp needs root_candidates >= 2");
        if (child_candidates < 1)
            throw ChessError("vabp needs child_candidates >= 1");
        if (depth_limit < 1)
            throw ChessError("vabp needs depth_limit >= 1");
        if (node_budget < root_candidates)
            throw ChessError("vabp node_budget must cover the root fanout");
        if (writeoff_margin <= 0)
            throw ChessError("vabp writeoff_margin must be positive");
    }
};

// Index drawn with probability proportional to exp(score / tau). Scores are
// shifted by their maximum before exponentiation, which leaves the softmax
// unchanged but keeps huge mate scores finite.
inline size_t pick_softmax(const std::vector<double>& scores_cp, double tau_cp,
                           Rng& rng) {
    if (scores_cp.empty())
        throw ChessError("softmax over an empty score list");
    double mx = *std::max_element(scores_cp.begin(), scores_cp.end());
    std::vector<double> weights;
    weights.reserve(scores_cp.size());
    for (double s : scores_cp)
        weights.push_back(std::exp((s - mx) / tau_cp));
    return rng.pick_weighted(weights);
}

// One explored position. engine_score is the absolute valuation of the
// position itself, expressed from white's side so values stay comparable
// across plies; minimax_value backs leaf scores up through the tree,
// skipping pruned branches.
struct VabpNode {
    Board board;
    std::optional<Move> move_from_parent;
    CentipawnScore engine_score;
    std::vector<VabpNode> children;
    bool pruned = false;
    std::optional<int> minimax_value;
};

struct SearchTree {
    VabpNode root;
    VabpParams params;
    int nodes_explored = 0; // root excluded
};

namespace detail {

inline int side_relative(const VabpNode& n, Color side) {
    return side == Color::white ? n.engine_score.value
                                : -n.engine_score.value;
}

inline void vabp_expand(VabpNode& node, int depth, EngineSession& session,
                        const VabpParams& params, Rng& rng, int& nodes) {
    if (depth >= params.depth_limit || is_terminal(node.board))
        return;
    auto ranked = session.rank_moves(node.board);
    size_t want = static_cast<size_t>(depth == 0 ? params.root_candidates
                                                 : params.child_candidates);
    size_t k = std::min(want, ranked.size());

    // Sample k distinct moves, softmax over the mover-relative scores,
    // without replacement.
    std::vector<size_t> order;
    std::vector<size_t> remaining(ranked.size());
    for (size_t i = 0; i < remaining.size(); ++i)
        remaining[i] = i;
    while (order.size() < k) {
        std::vector<double> scores;
        for (size_t idx : remaining)
            scores.push_back(ranked[idx].score.value);
        size_t at = pick_softmax(scores, params.temperature, rng);
        order.push_back(remaining[at]);
        remaining.erase(remaining.begin() + static_cast<long>(at));
    }

    Color mover = node.board.side_to_move;
    int best_seen = std::numeric_limits<int>::min();
    for (size_t idx : order) {
        if (nodes >= params.node_budget)
            break;
        VabpNode child;
        child.move_from_parent = ranked[idx].move;
        child.board = apply_legal(node.board, ranked[idx].move);
        // The parent search already valued the position after this move;
        // flip it to white's side when black was the one choosing.
        child.engine_score = mover == Color::white
                                 ? ranked[idx].score
                                 : flip_perspective(ranked[idx].score);
        ++nodes;
        int v = side_relative(child, mover);
        child.pruned = best_seen != std::numeric_limits<int>::min() &&
                       best_seen - v > params.writeoff_margin;
        best_seen = std::max(best_seen, v);
        node.children.push_back(std::move(child));
    }
    for (VabpNode& child : node.children)
        if (!child.pruned)
            vabp_expand(child, depth + 1, session, params, rng, nodes);
}

inline void vabp_fill_minimax(VabpNode& node) {
    bool any_live = false;
    for (VabpNode& child : node.children) {
        vabp_fill_minimax(child);
        any_live = any_live || !child.pruned;
    }
    if (!any_live) {
        node.minimax_value = node.engine_score.value;
        return;
    }
    bool maximize = node.board.side_to_move == Color::white;
    std::optional<int> best;
    for (const VabpNode& child : node.children) {
        if (child.pruned)
            continue;
        int v = *child.minimax_value;
        if (!best || (maximize ? v > *best : v < *best))
            best = v;
    }
    node.minimax_value = best;
}

} // namespace detail

inline SearchTree build_vabp_tree(const Board& board, EngineSession& session,
                                  const VabpParams& params) {
    params.validate();
    if (legal_moves(board).size() < 2)
        throw ChessError("vabp needs a position with at least 2 legal moves");

    SearchTree tree;
    tree.params = params;
    tree.root.board = board;
    CentipawnScore root_eval = session.evaluate(board);
    tree.root.engine_score = board.side_to_move == Color::white
                                 ? root_eval
                                 : flip_perspective(root_eval);
    Rng rng(params.seed);
    detail::vabp_expand(tree.root, 0, session, params, rng,
                        tree.nodes_explored);
    detail::vabp_fill_minimax(tree.root);
    return tree;
}

// The root child the minimax comparison selects: best backed-up value for
// the root mover among the non-pruned children, first-listed on ties.
inline const VabpNode& vabp_winner(const SearchTree& tree) {
    const VabpNode* best = nullptr;
    bool maximize = tree.root.board.side_to_move == Color::white;
    for (const VabpNode& child : tree.root.children) {
        if (child.pruned)
            continue;
        if (!best || (maximize ? *child.minimax_value > *best->minimax_value
                               : *child.minimax_value < *best->minimax_value))
            best = &child;
    }
    if (!best)
        throw ChessError("vabp tree has no live root child");
    return *best;
}

// Narration phrases per slot. Placeholders {move}, {score}, {side}, {depth}
// are substituted at verbalization time.
struct PromptBank {
    std::vector<std::string> intro;
    std::vector<std::string> propose_move;
    std::vector<std::string> state_value;
    std::vector<std::string> branch;
    std::vector<std::string> prune;
    std::vector<std::string> backtrack;
    std::vector<std::string> minimax_compare;
    std::vector<std::string> conclude;

    void validate() const {
        for (const auto* slot :
             {&intro, &propose_move, &state_value, &branch, &prune,
              &backtrack, &minimax_compare, &conclude})
            if (slot->empty())
                throw ChessError("prompt bank has an empty phrase slot");
    }
};

inline PromptBank default_prompt_bank() {
    PromptBank b;
    b.intro = {
        "It is {side} to move. I will explore candidate moves up to {depth} "
        "plies deep, judging positions by their engine score for white.",
        "With {side} to play, let me compare a few candidate lines, looking "
        "at most {depth} plies ahead (scores are from white's side).",
        "I will reason over a small tree of moves for {side}, capped at "
        "{depth} plies, using white-relative centipawn scores.",
        "Time to weigh the options for {side}; the lookahead stops at "
        "{depth} plies and every score is white-relative.",
        "Considering the position with {side} to move, I sketch a search "
        "tree of depth {depth}; valuations below are for white.",
    };
    b.propose_move = {
        "A candidate for {side} is {move}.",
        "{side} could try {move}.",
        "Next option for {side}: {move}.",
        "Suppose {side} plays {move}.",
        "Let me consider {move} for {side}.",
    };
    b.state_value = {
        "The engine valuation here is {score} centipawns.",
        "This position scores {score} centipawns.",
        "Evaluation: {score} centipawns.",
        "The resulting position is worth {score} centipawns.",
        "I assess this at {score} centipawns.",
    };
    b.branch = {
        "I will look one ply deeper, now {depth} plies in.",
        "Branching further at depth {depth}.",
        "Digging deeper; current depth {depth}.",
        "Extending this line to depth {depth}.",
        "Let me expand the replies here at depth {depth}.",
    };
    b.prune = {
        "{move} scores {score} centipawns, clearly behind the best line so "
        "far; I discard it.",
        "At {score} centipawns, {move} falls too far behind; pruning this "
        "branch.",
        "I write off {move}: {score} centipawns is not competitive.",
        "{move} is dominated at {score} centipawns, so I stop here.",
        "No need to search {move} further; {score} centipawns lags the best "
        "alternative.",
    };
    b.backtrack = {
        "Backing up from {move}.",
        "That settles the line starting with {move}; returning.",
        "Done with {move}; back to the previous position.",
        "I step back out of {move}.",
        "Closing the {move} branch.",
    };
    b.minimax_compare = {
        "Propagating values up the tree: {side} picks the strongest option "
        "and the opponent answers with the strongest reply.",
        "Now I back up the scores, with {side} maximizing its own outcome "
        "and the reply side doing the opposite.",
        "Comparing the backed-up values from {side}'s point of view.",
        "Each side picks its best reply in turn; I compare the root options "
        "for {side}.",
        "I fold the leaf valuations upward to judge the root moves for "
        "{side}.",
    };
    b.conclude = {
        "The final winner (chosen via a minimax-based decision) is {move}, "
        "backed up at {score} centipawns.",
        "Weighing everything, {move} comes out on top with a backed-up "
        "score of {score} centipawns.",
        "The minimax comparison selects {move} ({score} centipawns).",
        "Best by backed-up valuation: {move} at {score} centipawns.",
        "So the tree points to {move}, whose line is worth {score} "
        "centipawns.",
    };
    return b;
}

namespace detail {

inline std::string fill_phrase(std::string phrase, const std::string& move,
                               const std::string& score,
                               const std::string& side,
                               const std::string& depth) {
    auto sub = [&phrase](const std::string& key, const std::string& val) {
        for (size_t at = phrase.find(key); at != std::string::npos;
             at = phrase.find(key, at + val.size()))
            phrase.replace(at, key.size(), val);
    };
    sub("{move}", move);
    sub("{score}", score);
    sub("{side}", side);
    sub("{depth}", depth);
    return phrase;
}

inline std::string pick_phrase(const std::vector<std::string>& slot,
                               Rng& rng) {
    return slot[rng.next_below(slot.size())];
}

inline void vabp_narrate(const VabpNode& node, int depth,
                         const PromptBank& bank, Rng& rng, std::string& out) {
    std::string side = color_name(node.board.side_to_move);
    for (const VabpNode& child : node.children) {
        std::string move = child.move_from_parent->uci();
        std::string score = signed_cp(child.engine_score.value);
        out += fill_phrase(pick_phrase(bank.propose_move, rng), move, score,
                           side, "") +
               " ";
        out += fill_phrase(pick_phrase(bank.state_value, rng), move, score,
                           side, "") +
               "\n";
        if (child.pruned) {
            out += fill_phrase(pick_phrase(bank.prune, rng), move, score,
                               side, "") +
                   "\n";
        } else if (!child.children.empty()) {
            out += fill_phrase(pick_phrase(bank.branch, rng), move, score,
                               side, std::to_string(depth + 1)) +
                   "\n";
            vabp_narrate(child, depth + 1, bank, rng, out);
            out += fill_phrase(pick_phrase(bank.backtrack, rng), move, score,
                               side, "") +
                   "\n";
        }
    }
}

} // namespace detail

// Depth-first narration of the whole tree. Every move is mentioned only in
// sentences narrated while its parent position is current, so each mention
// is legal in context by construction.
inline std::string verbalize_tree(const SearchTree& tree,
                                  const PromptBank& bank, Rng& rng) {
    bank.validate();
    std::string side = color_name(tree.root.board.side_to_move);
    const VabpNode& winner = vabp_winner(tree);
    std::string out =
        detail::fill_phrase(detail::pick_phrase(bank.intro, rng), "",
                            signed_cp(tree.root.engine_score.value), side,
                            std::to_string(tree.params.depth_limit)) +
        "\n";
    detail::vabp_narrate(tree.root, 0, bank, rng, out);
    out += detail::fill_phrase(detail::pick_phrase(bank.minimax_compare, rng),
                               "", "", side, "") +
           "\n";
    out += detail::fill_phrase(detail::pick_phrase(bank.conclude, rng),
                               winner.move_from_parent->uci(),
                               signed_cp(*winner.minimax_value), side, "") +
           "\n";
    return out;
}

inline Sample gen_vabp(const Board& board, EngineSession& session,
                       const VabpParams& params,
                       const PromptBank& bank = default_prompt_bank(),
                       BoardFormat format = BoardFormat::visual_ascii) {
    SearchTree tree = build_vabp_tree(board, session, params);
    Rng narration_rng(derive_seed(params.seed, 0x5eed));
    std::string narration = verbalize_tree(tree, bank, narration_rng);
    const VabpNode& winner = vabp_winner(tree);

    Sample s;
    s.task = SampleTask::vabp;
    s.fen = emit_fen(board);
    s.prompt = std::string(prompts::kVabpInstruction) + "\n\n" +
               render_prompt_board(board, format) + "\n" +
               prompts::kAnswerContractSingle;
    s.response = narration + "Final Answer: " + winner.move_from_parent->uci();
    s.meta["seed"] = std::to_string(params.seed);
    s.meta["temperature"] = std::to_string(params.temperature);
    s.meta["root_candidates"] = std::to_string(params.root_candidates);
    s.meta["child_candidates"] = std::to_string(params.child_candidates);
    s.meta["depth_limit"] = std::to_string(params.depth_limit);
    s.meta["node_budget"] = std::to_string(params.node_budget);
    s.meta["writeoff_margin"] = std::to_string(params.writeoff_margin);
    s.meta["nodes_explored"] = std::to_string(tree.nodes_explored);
    s.meta["winner"] = winner.move_from_parent->uci();
    return s;
}

} // namespace chessforge

#endif

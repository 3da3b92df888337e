#ifndef CHESSFORGE_DATAGEN_FBA_HPP
#define CHESSFORGE_DATAGEN_FBA_HPP

#include <array>
#include <cmath>
#include <iterator>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "chessforge/core/movegen.hpp"
#include "chessforge/datagen/sample.hpp"
#include "chessforge/format/board_format.hpp"
#include "chessforge/prompts/instructions.hpp"
#include "chessforge/util/rng.hpp"

namespace chessforge {

// Board-fact question kinds. Answers are always recomputed from the board
// at emission time, so the records carry no invented facts.
enum class FbaKind {
    is_legal,
    under_attack,
    mobility,
    cloze_capture,
    is_check,
    mat_adv_value,
};

inline constexpr int kFbaKindCount = 6;

inline std::string fba_kind_name(FbaKind k) {
    switch (k) {
    case FbaKind::is_legal: return "is_legal";
    case FbaKind::under_attack: return "under_attack";
    case FbaKind::mobility: return "mobility";
    case FbaKind::cloze_capture: return "cloze_capture";
    case FbaKind::is_check: return "is_check";
    case FbaKind::mat_adv_value: return "mat_adv_value";
    }
    throw std::logic_error("unreachable");
}

inline FbaKind parse_fba_kind(const std::string& name) {
    for (int i = 0; i < kFbaKindCount; ++i)
        if (fba_kind_name(static_cast<FbaKind>(i)) == name)
            return static_cast<FbaKind>(i);
    throw ParseError("unknown question kind '" + name + "'");
}

inline PieceKind parse_piece_kind(const std::string& name) {
    for (PieceKind k : {PieceKind::pawn, PieceKind::knight, PieceKind::bishop,
                        PieceKind::rook, PieceKind::queen, PieceKind::king})
        if (piece_kind_name(k) == name)
            return k;
    throw ParseError("unknown piece kind '" + name + "'");
}

// One generated question. args is the machine-readable argument string an
// auditor needs to recompute the answer from the board alone.
struct FbaQuestion {
    FbaKind kind = FbaKind::is_check;
    std::string text;
    std::string args;
    std::string answer;
};

struct FbaParams {
    int n_questions = 3;
    std::array<double, kFbaKindCount> kind_weights{1, 1, 1, 1, 1, 1};
    uint64_t seed = 0;

    void validate() const {
        if (n_questions < 1)
            throw ChessError("fba needs n_questions >= 1");
        for (double w : kind_weights)
            if (w < 0)
                throw ChessError("fba kind weights must be >= 0");
    }
};

namespace detail {

// The piece captured by a legal move, accounting for en passant.
inline std::optional<PieceKind> captured_kind(const Board& b, const Move& m) {
    if (auto victim = b.piece_at(m.to))
        return victim->kind;
    auto mover = b.piece_at(m.from);
    if (mover && mover->kind == PieceKind::pawn && b.en_passant &&
        m.to == *b.en_passant && m.from.file != m.to.file)
        return PieceKind::pawn;
    return std::nullopt;
}

inline std::optional<FbaQuestion> make_is_legal(const Board& b, Rng& rng) {
    auto pattern = pattern_legal_moves(b);
    if (pattern.empty())
        return std::nullopt;
    std::vector<Move> negatives;
    for (const Move& m : pattern)
        if (!is_legal(b, m))
            negatives.push_back(m);

    // Hard negatives look playable but expose the king; offer them half the
    // time whenever the board has any.
    Move pick = pattern[rng.next_below(pattern.size())];
    if (!negatives.empty() && rng.next_double() < 0.5)
        pick = negatives[rng.next_below(negatives.size())];

    FbaQuestion q;
    q.kind = FbaKind::is_legal;
    q.args = pick.uci();
    q.text = "Is the move " + pick.uci() + " legal for " +
             color_name(b.side_to_move) + " here? (yes/no)";
    q.answer = is_legal(b, pick) ? "yes" : "no";
    return q;
}

inline std::optional<FbaQuestion> make_under_attack(const Board& b, Rng& rng) {
    std::set<std::pair<PieceKind, PieceKind>> pairs;
    for (const Move& m : legal_moves(b))
        if (auto victim = captured_kind(b, m))
            pairs.emplace(b.piece_at(m.from)->kind, *victim);

    constexpr PieceKind kinds[6] = {PieceKind::pawn,  PieceKind::knight,
                                    PieceKind::bishop, PieceKind::rook,
                                    PieceKind::queen, PieceKind::king};
    std::pair<PieceKind, PieceKind> pick;
    if (!pairs.empty() && rng.next_double() < 0.5) {
        size_t idx = rng.next_below(pairs.size());
        pick = *std::next(pairs.begin(), idx);
    } else {
        pick = {kinds[rng.next_below(6)], kinds[rng.next_below(6)]};
    }

    FbaQuestion q;
    q.kind = FbaKind::under_attack;
    q.args = piece_kind_name(pick.first) + "," + piece_kind_name(pick.second);
    q.text = "Could a " + color_name(b.side_to_move) + " " +
             piece_kind_name(pick.first) + " capture a " +
             color_name(opposite(b.side_to_move)) + " " +
             piece_kind_name(pick.second) + " this turn? (yes/no)";
    q.answer = pairs.count(pick) ? "yes" : "no";
    return q;
}

inline std::optional<FbaQuestion> make_mobility(const Board& b, Rng& rng) {
    auto squares = b.piece_squares(b.side_to_move);
    Square sq = squares[rng.next_below(squares.size())];
    FbaQuestion q;
    q.kind = FbaKind::mobility;
    q.args = sq.text();
    q.text = "How many legal moves does the " +
             piece_kind_name(b.piece_at(sq)->kind) + " on " + sq.text() +
             " have? (integer)";
    q.answer = std::to_string(legal_moves_for_square(b, sq).size());
    return q;
}

inline std::optional<FbaQuestion> make_cloze_capture(const Board& b, Rng& rng) {
    // Destinations holding an opponent piece that exactly one mover piece
    // can legally capture; uniqueness checked with the attacker scan.
    std::vector<Square> unique_dests;
    std::set<int> seen;
    for (const Move& m : legal_moves(b)) {
        if (b.empty_at(m.to) || !seen.insert(m.to.index()).second)
            continue;
        auto origins = attackers_of(b, m.to, b.side_to_move,
                                    AttackMode::legal_capture);
        if (origins.size() == 1)
            unique_dests.push_back(m.to);
    }
    if (unique_dests.empty())
        return std::nullopt;

    Square dest = unique_dests[rng.next_below(unique_dests.size())];
    Square origin = attackers_of(b, dest, b.side_to_move,
                                 AttackMode::legal_capture)
                        .front();
    FbaQuestion q;
    q.kind = FbaKind::cloze_capture;
    q.args = dest.text();
    q.text = "The " + color_name(opposite(b.side_to_move)) + " " +
             piece_kind_name(b.piece_at(dest)->kind) + " on " + dest.text() +
             " can be captured from exactly one square. Which square? "
             "(square)";
    q.answer = origin.text();
    return q;
}

inline std::optional<FbaQuestion> make_is_check(const Board& b, Rng& rng) {
    Color side = rng.next_below(2) == 0 ? Color::white : Color::black;
    FbaQuestion q;
    q.kind = FbaKind::is_check;
    q.args = color_name(side);
    q.text =
        "Is the " + color_name(side) + " king currently in check? (yes/no)";
    q.answer = is_check(b, side) ? "yes" : "no";
    return q;
}

inline std::optional<FbaQuestion> make_mat_adv(const Board& b, Rng&) {
    ValuationTable table;
    FbaQuestion q;
    q.kind = FbaKind::mat_adv_value;
    q.text = "Using piece values pawn=" + std::to_string(table.pawn) +
             ", knight=" + std::to_string(table.knight) +
             ", bishop=" + std::to_string(table.bishop) +
             ", rook=" + std::to_string(table.rook) +
             ", queen=" + std::to_string(table.queen) +
             ", what is white's material advantage? It may be negative. "
             "(integer)";
    q.answer = std::to_string(material_delta(b, Color::white, table));
    return q;
}

inline std::optional<FbaQuestion> make_fba_question(const Board& b, FbaKind k,
                                                    Rng& rng) {
    switch (k) {
    case FbaKind::is_legal: return make_is_legal(b, rng);
    case FbaKind::under_attack: return make_under_attack(b, rng);
    case FbaKind::mobility: return make_mobility(b, rng);
    case FbaKind::cloze_capture: return make_cloze_capture(b, rng);
    case FbaKind::is_check: return make_is_check(b, rng);
    case FbaKind::mat_adv_value: return make_mat_adv(b, rng);
    }
    throw std::logic_error("unreachable");
}

} // namespace detail

// Recomputes the answer for an audited question from the board alone.
// Callers use this to prove a record states nothing false.
inline std::string recompute_fba_answer(const Board& b, FbaKind kind,
                                        const std::string& args) {
    switch (kind) {
    case FbaKind::is_legal:
        return is_legal(b, parse_uci_move(args)) ? "yes" : "no";
    case FbaKind::under_attack: {
        auto comma = args.find(',');
        PieceKind a = parse_piece_kind(args.substr(0, comma));
        PieceKind v = parse_piece_kind(args.substr(comma + 1));
        for (const Move& m : legal_moves(b))
            if (b.piece_at(m.from)->kind == a &&
                detail::captured_kind(b, m) == v)
                return "yes";
        return "no";
    }
    case FbaKind::mobility:
        return std::to_string(
            legal_moves_for_square(b, parse_square(args)).size());
    case FbaKind::cloze_capture: {
        auto origins = attackers_of(b, parse_square(args), b.side_to_move,
                                    AttackMode::legal_capture);
        if (origins.size() != 1)
            throw ChessError("capture source on " + args + " is not unique");
        return origins.front().text();
    }
    case FbaKind::is_check:
        return is_check(b, args == "white" ? Color::white : Color::black)
                   ? "yes"
                   : "no";
    case FbaKind::mat_adv_value:
        return std::to_string(material_delta(b, Color::white));
    }
    throw std::logic_error("unreachable");
}

// n_questions QA pairs over the six kinds. A kind that cannot be posed on
// this board (no unique capture source, say) is resampled from the
// remaining kinds and the substitution is recorded in meta.
inline Sample gen_fba(const Board& board, Rng& rng, FbaParams params = {},
                      BoardFormat format = BoardFormat::visual_ascii) {
    params.validate();
    if (is_terminal(board))
        throw ChessError("fba generation needs a nonterminal position");

    std::vector<FbaQuestion> questions;
    std::string resampled;
    while (static_cast<int>(questions.size()) < params.n_questions) {
        std::vector<double> weights(params.kind_weights.begin(),
                                    params.kind_weights.end());
        std::optional<FbaQuestion> q;
        for (;;) {
            size_t idx = rng.pick_weighted(weights);
            q = detail::make_fba_question(board,
                                          static_cast<FbaKind>(idx), rng);
            if (q)
                break;
            resampled += fba_kind_name(static_cast<FbaKind>(idx)) + ";";
            weights[idx] = 0;
        }
        questions.push_back(std::move(*q));
    }

    Sample s;
    s.task = SampleTask::fba;
    s.fen = emit_fen(board);
    std::string qs, as;
    for (size_t i = 0; i < questions.size(); ++i) {
        std::string n = std::to_string(i + 1);
        qs += "Q" + n + ": " + questions[i].text + "\n";
        as += "A" + n + ": " + questions[i].answer + "\n";
        s.meta["q" + n] = fba_kind_name(questions[i].kind) + "|" +
                          questions[i].args + "|" + questions[i].answer;
    }
    s.prompt = std::string(prompts::kFbaInstruction) + "\n\n" +
               render_prompt_board(board, format) + "\n" + qs;
    s.response = as;
    s.meta["seed"] = std::to_string(params.seed);
    s.meta["n_questions"] = std::to_string(params.n_questions);
    if (!resampled.empty())
        s.meta["resampled"] = resampled;
    return s;
}

// Parses the audit entries gen_fba stored in meta back into questions.
inline std::vector<FbaQuestion> fba_audit_entries(const Sample& s) {
    std::vector<FbaQuestion> out;
    for (int i = 1;; ++i) {
        auto it = s.meta.find("q" + std::to_string(i));
        if (it == s.meta.end())
            break;
        const std::string& v = it->second;
        size_t p1 = v.find('|');
        size_t p2 = v.rfind('|');
        if (p1 == std::string::npos || p2 <= p1)
            throw ParseError("malformed question audit: " + v);
        FbaQuestion q;
        q.kind = parse_fba_kind(v.substr(0, p1));
        q.args = v.substr(p1 + 1, p2 - p1 - 1);
        q.answer = v.substr(p2 + 1);
        out.push_back(std::move(q));
    }
    return out;
}

// Result of answer-balance rejection over a batch of question samples.
struct FbaBalance {
    std::vector<Sample> samples;
    std::map<std::string, double> before;
    std::map<std::string, double> after;
    std::vector<std::string> diagnostics;
};

namespace detail {

inline std::map<std::string, std::pair<int, int>>
fba_yes_counts(const std::vector<Sample>& batch) {
    std::map<std::string, std::pair<int, int>> counts;
    for (const Sample& s : batch)
        for (const FbaQuestion& q : fba_audit_entries(s)) {
            if (q.answer != "yes" && q.answer != "no")
                continue;
            auto& [yes, total] = counts[fba_kind_name(q.kind)];
            yes += q.answer == "yes" ? 1 : 0;
            total += 1;
        }
    return counts;
}

} // namespace detail

// Drops samples until every targeted kind's yes-rate sits within ±5% of its
// target. Works in two passes: the global per-kind yes/no counts fix a keep
// quota for each answer class, then a forward walk keeps a sample only when
// all its tracked answers still have quota. Numeric kinds are untouched; an
// unattainable target leaves the closest achievable batch plus a diagnostic.
inline FbaBalance balance_fba(const std::vector<Sample>& batch,
                              const std::map<FbaKind, double>& targets) {
    constexpr double kBand = 0.05;
    for (const auto& [kind, t] : targets) {
        if (t < 0.0 || t > 1.0)
            throw ChessError("balance target out of [0,1] for " +
                             fba_kind_name(kind));
        if (kind != FbaKind::is_legal && kind != FbaKind::under_attack &&
            kind != FbaKind::is_check)
            throw ChessError(fba_kind_name(kind) +
                             " has numeric answers; only yes/no kinds "
                             "take balance targets");
    }

    FbaBalance result;
    auto totals = detail::fba_yes_counts(batch);
    for (const auto& [name, yt] : totals)
        result.before[name] = static_cast<double>(yt.first) / yt.second;

    // quota[name] = how many more yes / no answers of this kind may pass.
    std::map<std::string, std::pair<long, long>> quota;
    for (const auto& [kind, target] : targets) {
        std::string name = fba_kind_name(kind);
        auto it = totals.find(name);
        if (it == totals.end())
            continue;
        long yes = it->second.first;
        long no = it->second.second - yes;
        double frac = static_cast<double>(yes) / it->second.second;
        if (yes == 0 || no == 0) {
            // Single-class corpus: balancing by rejection is impossible,
            // so pass it through and say so.
            quota[name] = {yes, no};
            if (std::abs(frac - target) > kBand)
                result.diagnostics.push_back(
                    name + " has only one answer class; target " +
                    std::to_string(target) + " is unattainable");
        } else if (frac > target + kBand) {
            // Yes-heavy: keep every no, cap yes at the band's upper edge.
            double cap = (target + kBand) / (1.0 - target - kBand);
            quota[name] = {
                std::min(yes, static_cast<long>(cap * static_cast<double>(no))),
                no};
        } else if (frac < target - kBand) {
            double cap = (1.0 - target + kBand) / (target - kBand);
            quota[name] = {
                yes,
                std::min(no, static_cast<long>(cap * static_cast<double>(yes)))};
        } else {
            quota[name] = {yes, no};
        }
    }

    for (const Sample& s : batch) {
        auto entries = fba_audit_entries(s);
        std::map<std::string, std::pair<long, long>> need;
        for (const FbaQuestion& q : entries) {
            std::string name = fba_kind_name(q.kind);
            if (!quota.count(name))
                continue;
            if (q.answer == "yes")
                need[name].first++;
            else if (q.answer == "no")
                need[name].second++;
        }
        bool keep = true;
        for (const auto& [name, yn] : need) {
            auto& [yes_left, no_left] = quota[name];
            if (yn.first > yes_left || yn.second > no_left) {
                keep = false;
                break;
            }
        }
        if (!keep)
            continue;
        for (const auto& [name, yn] : need) {
            quota[name].first -= yn.first;
            quota[name].second -= yn.second;
        }
        result.samples.push_back(s);
    }

    for (const auto& [name, yt] : detail::fba_yes_counts(result.samples))
        result.after[name] = static_cast<double>(yt.first) / yt.second;
    for (const auto& [kind, target] : targets) {
        std::string name = fba_kind_name(kind);
        if (!result.after.count(name))
            continue;
        double dev = std::abs(result.after[name] - target);
        bool reported = false;
        for (const std::string& d : result.diagnostics)
            reported = reported || d.rfind(name, 0) == 0;
        if (dev > kBand && !reported)
            result.diagnostics.push_back(
                name + " yes-rate " + std::to_string(result.after[name]) +
                " missed target " + std::to_string(target) +
                "; corpus cannot support it");
    }
    return result;
}

} // namespace chessforge

#endif

#include <catch2/catch_amalgamated.hpp>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <set>
#include <thread>

#include "chessforge/datagen/fba.hpp"
#include "chessforge/datagen/filters.hpp"
#include "chessforge/datagen/generators.hpp"
#include "chessforge/datagen/guided.hpp"
#include "chessforge/datagen/sample.hpp"
#include "chessforge/datagen/vabp.hpp"
#include "chessforge/eval/tasks.hpp"

using namespace chessforge;

namespace {

std::string stub_engine_path() {
    const char* env = std::getenv("STUB_ENGINE");
    return env ? env : "build/tools/stub_engine";
}

EngineConfig stub_config(int depth = 3) {
    EngineConfig cfg;
    cfg.executable_path = stub_engine_path();
    cfg.depth = depth;
    return cfg;
}

const char* kQueenGrabFen = "4k3/8/8/3q4/8/8/8/3QK3 w - - 0 1";

struct TempFile {
    std::filesystem::path path;
    explicit TempFile(const std::string& stem) {
        path = std::filesystem::temp_directory_path() /
               (stem + "." + std::to_string(::getpid()) + ".jsonl");
        std::filesystem::remove(path);
    }
    ~TempFile() { std::filesystem::remove(path); }
};

// Hand-built single-question record for balance tests; balance reads only
// the meta audit, no engine work involved.
Sample fabricated_fba(const std::string& kind, const std::string& args,
                      const std::string& answer) {
    Sample s;
    s.task = SampleTask::fba;
    s.fen = "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1";
    s.prompt = "q";
    s.response = "a";
    s.meta["seed"] = "0";
    s.meta["q1"] = kind + "|" + args + "|" + answer;
    return s;
}

int count_tree_nodes(const VabpNode& n) {
    int total = 0;
    for (const VabpNode& c : n.children)
        total += 1 + count_tree_nodes(c);
    return total;
}

int tree_depth(const VabpNode& n) {
    int deepest = 0;
    for (const VabpNode& c : n.children)
        deepest = std::max(deepest, 1 + tree_depth(c));
    return deepest;
}

// Brute-force minimax over the stored tree, written independently of the
// library's bottom-up fill.
int recompute_minimax(const VabpNode& n) {
    std::vector<int> live;
    for (const VabpNode& c : n.children)
        if (!c.pruned)
            live.push_back(recompute_minimax(c));
    if (live.empty())
        return n.engine_score.value;
    return n.board.side_to_move == Color::white
               ? *std::max_element(live.begin(), live.end())
               : *std::min_element(live.begin(), live.end());
}

// The sequence of (move, parent fen) mentions verbalize_tree is allowed to
// produce, in depth-first order.
void collect_mentions(const VabpNode& n,
                      std::vector<std::pair<std::string, std::string>>& out) {
    std::string here = emit_fen(n.board);
    for (const VabpNode& c : n.children) {
        std::string uci = c.move_from_parent->uci();
        out.emplace_back(uci, here);
        if (c.pruned) {
            out.emplace_back(uci, here);
        } else if (!c.children.empty()) {
            collect_mentions(c, out);
            out.emplace_back(uci, here);
        }
    }
}

} // namespace

TEST_CASE("sample records survive a jsonl round trip with stable keys") {
    Sample s;
    s.prompt = "which move?";
    s.response = "e2e4";
    s.task = SampleTask::best_move;
    s.fen = "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1";
    s.meta["depth"] = "3";
    s.meta["score_cp"] = "35";
    validate_sample(s);

    std::string line = sample_to_json(s).dump();
    CHECK(line.find("\"prompt\"") < line.find("\"response\""));
    CHECK(line.find("\"response\"") < line.find("\"task\""));
    CHECK(line.find("\"task\"") < line.find("\"fen\""));
    CHECK(line.find("\"fen\"") < line.find("\"meta\""));
    CHECK(sample_from_json(nlohmann::json::parse(line)) == s);

    TempFile file("samples");
    write_samples_jsonl(file.path, {s, s});
    auto loaded = read_samples_jsonl(file.path);
    REQUIRE(loaded.size() == 2);
    CHECK(loaded[0] == s);
    CHECK(!std::filesystem::exists(file.path.string() + ".tmp"));

    Sample bad = s;
    bad.response.clear();
    CHECK_THROWS_AS(validate_sample(bad), ChessError);
    bad = s;
    bad.task = SampleTask::vabp; // generated family without a seed
    CHECK_THROWS_AS(validate_sample(bad), ChessError);
    bad.meta["seed"] = "7";
    CHECK_NOTHROW(validate_sample(bad));
}

TEST_CASE("best-move records are bare legal replies") {
    auto session = make_session(stub_config(2));
    Board board = start_position();
    Sample s = gen_best_move(board, *session);
    validate_sample(s);
    CHECK(s.task == SampleTask::best_move);
    CHECK((s.response.size() == 4 || s.response.size() == 5));
    CHECK(is_legal(board, parse_uci_move(s.response)));
    CHECK(s.prompt.find("r n b q k b n r") != std::string::npos);

    Board mate_in_one = parse_fen("6k1/5ppp/8/8/8/8/8/R3K3 w - - 0 1");
    Sample m = gen_best_move(mate_in_one, *session);
    CHECK(is_checkmate(
        apply_move(mate_in_one, parse_uci_move(m.response))));

    Board mated = parse_fen(
        "rnb1kbnr/pppp1ppp/8/4p3/6Pq/5P2/PPPPP2P/RNBQKBNR w KQkq - 1 3");
    CHECK_THROWS_AS(gen_best_move(mated, *session), ChessError);
}

TEST_CASE("best-line records replay and their delta recomputes exactly") {
    auto session = make_session(stub_config(2));
    Board board = parse_fen(kQueenGrabFen);

    for (uint64_t seed : {1, 2, 3, 4, 5}) {
        Rng rng(seed);
        Sample s = gen_best_line(board, *session, rng, seed);
        validate_sample(s);

        int requested = std::stoi(s.meta.at("plies_requested"));
        CHECK(requested >= 4);
        CHECK(requested <= 6);

        // Split "m1 m2 ... delta: <cp>".
        size_t at = s.response.find(" delta: ");
        REQUIRE(at != std::string::npos);
        int delta = std::stoi(s.response.substr(at + 8));

        Board cur = board;
        std::istringstream moves(s.response.substr(0, at));
        std::string tok;
        int plies = 0;
        while (moves >> tok) {
            cur = apply_move(cur, parse_uci_move(tok)); // throws if illegal
            ++plies;
        }
        CHECK(plies == std::stoi(s.meta.at("plies")));
        if (!s.meta.count("terminal"))
            CHECK(plies == requested);

        // Independent recompute of both endpoint valuations.
        auto fresh = make_session(stub_config(2));
        int start = fresh->evaluate(board).value;
        int end_raw = fresh->evaluate(cur).value;
        int end =
            cur.side_to_move == board.side_to_move ? end_raw : -end_raw;
        CHECK(delta == end - start);
    }

    // A mate on the very first move ends the line early and flags it.
    Board mate_in_one = parse_fen("6k1/5ppp/8/8/8/8/8/R3K3 w - - 0 1");
    Rng rng(9);
    Sample s = gen_best_line(mate_in_one, *session, rng, 9);
    CHECK(s.meta.count("terminal") == 1);
    CHECK(std::stoi(s.meta.at("plies")) == 1);
    CHECK(std::stoi(s.meta.at("plies")) <
          std::stoi(s.meta.at("plies_requested")));
}

TEST_CASE("fba answers are true on the board that produced them") {
    std::vector<std::string> fens = {
        "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1",
        "r1bqk2r/1pppbppp/p1n2n2/4p3/B3P3/5N2/PPPP1PPP/RNBQ1RK1 w kq - 4 6",
        "4k3/8/8/3q4/8/8/8/3QK3 w - - 0 1",
        "8/8/8/8/k2Pp2R/8/8/4K3 b - d3 0 1",
        "4k3/4r3/8/8/8/4N3/8/4K3 w - - 0 1",
    };
    uint64_t seed = 77;
    for (const std::string& fen : fens) {
        Board board = parse_fen(fen);
        Rng rng(seed++);
        FbaParams params;
        params.n_questions = 6;
        params.seed = seed;
        Sample s = gen_fba(board, rng, params);
        validate_sample(s);
        auto entries = fba_audit_entries(s);
        REQUIRE(entries.size() == 6);
        for (const FbaQuestion& q : entries)
            CHECK(recompute_fba_answer(board, q.kind, q.args) == q.answer);
        // Prompt and response carry all six lines in order.
        for (int i = 1; i <= 6; ++i) {
            CHECK(s.prompt.find("Q" + std::to_string(i) + ": ") !=
                  std::string::npos);
            CHECK(s.response.find("A" + std::to_string(i) + ": ") !=
                  std::string::npos);
        }
    }
}

TEST_CASE("fba fixed facts about the start position hold") {
    Board start = start_position();
    CHECK(recompute_fba_answer(start, FbaKind::mobility, "g1") == "2");
    CHECK(recompute_fba_answer(start, FbaKind::is_check, "white") == "no");
    CHECK(recompute_fba_answer(start, FbaKind::mat_adv_value, "") == "0");
    CHECK(recompute_fba_answer(start, FbaKind::is_legal, "e2e4") == "yes");
    CHECK(recompute_fba_answer(start, FbaKind::is_legal, "e2e5") == "no");
    CHECK(recompute_fba_answer(start, FbaKind::under_attack, "pawn,pawn") ==
          "no");
}

TEST_CASE("fba resamples kinds a board cannot support") {
    // The start position has no captures, so cloze questions must give way.
    Board start = start_position();
    Rng rng(4);
    FbaParams params;
    params.n_questions = 2;
    params.kind_weights = {1, 0, 0, 100, 0, 0}; // nearly always cloze first
    Sample s = gen_fba(start, rng, params);
    REQUIRE(s.meta.count("resampled") == 1);
    CHECK(s.meta.at("resampled").find("cloze_capture") != std::string::npos);
    for (const FbaQuestion& q : fba_audit_entries(s))
        CHECK(q.kind == FbaKind::is_legal);
}

TEST_CASE("fba is_legal mines hard negatives where they exist") {
    // The e3 knight is pinned, so its pattern moves are illegal.
    Board pinned = parse_fen("4k3/4r3/8/8/8/4N3/8/4K3 w - - 0 1");
    Rng rng(12);
    int yes = 0, no = 0;
    for (int i = 0; i < 60; ++i) {
        auto q = detail::make_is_legal(pinned, rng);
        REQUIRE(q);
        (q->answer == "yes" ? yes : no)++;
    }
    CHECK(yes > 10);
    CHECK(no > 10);
}

TEST_CASE("balance_fba holds targeted yes rates within five points") {
    std::vector<Sample> batch;
    for (int i = 0; i < 800; ++i)
        batch.push_back(fabricated_fba("is_legal", "e2e4", "yes"));
    for (int i = 0; i < 200; ++i)
        batch.push_back(fabricated_fba("is_legal", "e2e5", "no"));

    auto balanced = balance_fba(batch, {{FbaKind::is_legal, 0.5}});
    CHECK(balanced.before.at("is_legal") == Catch::Approx(0.8));
    double rate = balanced.after.at("is_legal");
    CHECK(rate >= 0.45);
    CHECK(rate <= 0.55);
    CHECK(balanced.diagnostics.empty());

    // Recount of the surviving batch matches the reported histogram.
    int yes = 0, total = 0;
    for (const Sample& s : balanced.samples)
        for (const FbaQuestion& q : fba_audit_entries(s)) {
            yes += q.answer == "yes" ? 1 : 0;
            ++total;
        }
    CHECK(static_cast<double>(yes) / total == Catch::Approx(rate));

    CHECK(balance_fba({}, {{FbaKind::is_legal, 0.5}}).samples.empty());

    // An all-yes corpus cannot reach 50/50; expect a diagnostic.
    std::vector<Sample> all_yes(batch.begin(), batch.begin() + 100);
    auto failed = balance_fba(all_yes, {{FbaKind::is_legal, 0.5}});
    CHECK(!failed.diagnostics.empty());

    CHECK_THROWS_AS(balance_fba(batch, {{FbaKind::mobility, 0.5}}),
                    ChessError);
}

TEST_CASE("vabp parameters validate") {
    VabpParams p;
    CHECK_NOTHROW(p.validate());
    p.temperature = 0;
    CHECK_THROWS_AS(p.validate(), ChessError);
    p = {};
    p.root_candidates = 1;
    CHECK_THROWS_AS(p.validate(), ChessError);
    p = {};
    p.node_budget = 2; // below root fanout of 3
    CHECK_THROWS_AS(p.validate(), ChessError);
    p = {};
    p.writeoff_margin = 0;
    CHECK_THROWS_AS(p.validate(), ChessError);
}

TEST_CASE("softmax sampling matches the closed form at 100cp spacing") {
    Rng rng(31337);
    int first = 0;
    const int trials = 10000;
    for (int i = 0; i < trials; ++i)
        if (pick_softmax({100.0, 0.0}, 100.0, rng) == 0)
            ++first;
    double expected = std::exp(1.0) / (std::exp(1.0) + 1.0);
    CHECK(static_cast<double>(first) / trials ==
          Catch::Approx(expected).margin(0.02));
}

TEST_CASE("near-zero temperature reduces to the top engine moves") {
    auto session = make_session(stub_config(2));
    Board board = parse_fen(kQueenGrabFen);
    auto ranked = session->rank_moves(board);

    VabpParams params;
    params.temperature = 1e-6;
    params.depth_limit = 1;
    params.root_candidates = 3;
    params.node_budget = 3;
    SearchTree tree = build_vabp_tree(board, *session, params);
    REQUIRE(tree.root.children.size() == 3);

    // The top engine move is strictly best here, so it must come first;
    // the rest may permute within equal-score ties, so compare the score
    // multiset instead of exact move identity.
    REQUIRE(ranked[0].score.value > ranked[1].score.value);
    CHECK(tree.root.children[0].move_from_parent->uci() ==
          ranked[0].move.uci());
    std::map<std::string, int> by_move;
    for (const auto& ev : ranked)
        by_move[ev.move.uci()] = ev.score.value;
    std::multiset<int> picked, top;
    for (size_t i = 0; i < 3; ++i) {
        picked.insert(by_move.at(
            tree.root.children[i].move_from_parent->uci()));
        top.insert(ranked[i].score.value);
    }
    CHECK(picked == top);
}

TEST_CASE("vabp trees respect their structural bounds") {
    auto session = make_session(stub_config(2));
    Board board = parse_fen(kQueenGrabFen);

    VabpParams params;
    params.seed = 21;
    SearchTree tree = build_vabp_tree(board, *session, params);

    CHECK(count_tree_nodes(tree.root) == tree.nodes_explored);
    CHECK(tree.nodes_explored <= params.node_budget);
    CHECK(tree_depth(tree.root) <= params.depth_limit);
    REQUIRE(tree.root.children.size() >= 2);

    // Pruned nodes are leaves and the margin condition held when they were
    // written off; minimax agrees with an independent recompute.
    std::vector<const VabpNode*> stack = {&tree.root};
    while (!stack.empty()) {
        const VabpNode* n = stack.back();
        stack.pop_back();
        REQUIRE(n->minimax_value.has_value());
        Color mover = n->board.side_to_move;
        int best = std::numeric_limits<int>::min();
        for (const VabpNode& c : n->children) {
            int v = detail::side_relative(c, mover);
            if (c.pruned) {
                CHECK(c.children.empty());
                CHECK(best - v > params.writeoff_margin);
            }
            best = std::max(best, v);
            stack.push_back(&c);
        }
    }
    CHECK(*tree.root.minimax_value == recompute_minimax(tree.root));
    for (const VabpNode& c : tree.root.children)
        if (!c.pruned)
            CHECK(*c.minimax_value == recompute_minimax(c));

    CHECK_THROWS_AS(
        build_vabp_tree(parse_fen("7k/6p1/8/8/8/8/8/4K2R b - - 0 1"),
                        *session, params),
        ChessError); // the checked king has exactly one escape square
}

TEST_CASE("vabp narration mentions moves only where they are legal") {
    auto session = make_session(stub_config(2));
    Board board = parse_fen(kQueenGrabFen);

    VabpParams params;
    params.seed = 5;
    SearchTree tree = build_vabp_tree(board, *session, params);
    Rng rng(77);
    std::string text = verbalize_tree(tree, default_prompt_bank(), rng);

    std::vector<std::pair<std::string, std::string>> expected;
    collect_mentions(tree.root, expected);
    expected.emplace_back(vabp_winner(tree).move_from_parent->uci(),
                          emit_fen(tree.root.board));

    auto tokens = detail::standalone_uci_tokens(text);
    REQUIRE(tokens.size() == expected.size());
    for (size_t i = 0; i < tokens.size(); ++i) {
        CHECK(tokens[i] == expected[i].first);
        CHECK(is_legal(parse_fen(expected[i].second),
                       parse_uci_move(tokens[i])));
    }
}

TEST_CASE("vabp samples are deterministic per seed and name the winner") {
    auto session = make_session(stub_config(2));
    Board board = parse_fen(kQueenGrabFen);

    VabpParams params;
    params.seed = 404;
    Sample a = gen_vabp(board, *session, params);
    Sample b = gen_vabp(board, *session, params);
    CHECK(a == b);
    validate_sample(a);

    SearchTree tree = build_vabp_tree(board, *session, params);
    std::string winner = vabp_winner(tree).move_from_parent->uci();
    CHECK(a.meta.at("winner") == winner);
    std::string tail = "Final Answer: " + winner;
    REQUIRE(a.response.size() >= tail.size());
    CHECK(a.response.substr(a.response.size() - tail.size()) == tail);

    params.seed = 405;
    Sample c = gen_vabp(board, *session, params);
    CHECK(c.response != a.response);
}

TEST_CASE("prompt bank validation catches empty slots") {
    PromptBank bank = default_prompt_bank();
    for (const auto* slot :
         {&bank.intro, &bank.propose_move, &bank.state_value, &bank.branch,
          &bank.prune, &bank.backtrack, &bank.minimax_compare,
          &bank.conclude})
        CHECK(slot->size() >= 5);
    bank.prune.clear();
    CHECK_THROWS_AS(bank.validate(), ChessError);
}

TEST_CASE("guided prompts pair a candidate with the engine continuation") {
    auto session = make_session(stub_config(2));
    Board board = parse_fen(kQueenGrabFen);
    Move candidate = parse_uci_move("d1d4"); // hangs the queen

    auto [prompt, audit] = gen_guided_prompt(board, candidate, *session);
    CHECK(audit.line.size() == 5);
    CHECK(audit.line.front() == candidate);
    CHECK(prompt.find("Begin board:") != std::string::npos);
    CHECK(prompt.find("End board:") != std::string::npos);
    CHECK(prompt.find("Candidate move: d1d4") != std::string::npos);
    CHECK(prompt.find("Verdict:") != std::string::npos);

    // Plies 2..5 are exactly the engine's best continuation.
    Board after = apply_move(board, candidate);
    BestLine continuation = session->best_line(after, 4);
    REQUIRE(continuation.line.size() == 4);
    for (size_t i = 0; i < 4; ++i)
        CHECK(audit.line[i + 1] == continuation.line[i]);

    // Delta recomputes from the endpoints.
    Board end = parse_fen(audit.end_fen);
    int start_eval = session->evaluate(board).value;
    int end_raw = session->evaluate(end).value;
    int end_eval =
        end.side_to_move == board.side_to_move ? end_raw : -end_raw;
    CHECK(audit.delta_cp == end_eval - start_eval);
    CHECK(audit.delta_cp < -300); // the blunder shows up in the audit

    // A mating candidate stops the line immediately. The start eval already
    // carries the found mate, so the delta is just the endpoint difference,
    // not a giant jump.
    Board mate_in_one = parse_fen("6k1/5ppp/8/8/8/8/8/R3K3 w - - 0 1");
    auto [mate_prompt, mate_audit] = gen_guided_prompt(
        mate_in_one, parse_uci_move("a1a8"), *session);
    CHECK(mate_audit.line.size() == 1);
    Board mated = parse_fen(mate_audit.end_fen);
    CHECK(is_checkmate(mated));
    int mate_start = session->evaluate(mate_in_one).value;
    int mate_end = -session->evaluate(mated).value; // mover flipped once
    CHECK(mate_audit.delta_cp == mate_end - mate_start);
}

TEST_CASE("guided verification enforces verdicts and legality") {
    GuidedAudit audit;
    audit.begin_fen = "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1";
    audit.line = {parse_uci_move("e2e4"), parse_uci_move("e7e5"),
                  parse_uci_move("g1f3")};
    audit.delta_cp = 120;

    auto ok = verify_guided_output(
        "Opening with e2e4 gains space; after e7e5 the knight move g1f3 "
        "keeps the initiative.\nVerdict: good",
        audit);
    CHECK(ok.accepted);
    CHECK(ok.verdict == "good");

    auto no_verdict = verify_guided_output("e2e4 looks strong.", audit);
    CHECK(!no_verdict.accepted);
    REQUIRE(no_verdict.reasons.size() == 1);
    CHECK(no_verdict.reasons[0] == "missing_verdict");

    // e2e5 is never legal anywhere along the line.
    auto illegal = verify_guided_output(
        "The point of e2e5 is speed.\nVerdict: good", audit);
    CHECK(!illegal.accepted);
    CHECK(illegal.reasons[0] == "illegal_reference:e2e5");

    GuidedAudit bad = audit;
    bad.delta_cp = -300;
    auto mismatch =
        verify_guided_output("Strong stuff.\nVerdict: good", bad);
    CHECK(!mismatch.accepted);
    CHECK(mismatch.reasons[0] == "verdict_mismatch");

    GuidedAudit neutral = audit;
    neutral.delta_cp = 20;
    CHECK(verify_guided_output("Hard to say.\nVerdict: unclear", neutral)
              .accepted);
    CHECK(verify_guided_output("Slight edge.\nVerdict: bad", neutral)
              .accepted);
    auto vague = verify_guided_output("Hm.\nVerdict: unclear", audit);
    CHECK(!vague.accepted); // +120 is outside the +-50 band

    // The last verdict line wins.
    auto revised = verify_guided_output(
        "Verdict: bad\nWait, the line wins material.\nVerdict: good", audit);
    CHECK(revised.accepted);
}

TEST_CASE("teacher client round-trips, retries, and fails distinctly") {
    httplib::Server server;
    std::atomic<int> hits{0};
    server.Post("/v1/chat", [&](const httplib::Request& req,
                                httplib::Response& res) {
        ++hits;
        auto body = nlohmann::json::parse(req.body);
        std::string content = body["messages"][0]["content"];
        nlohmann::json reply = {
            {"choices",
             {{{"message", {{"content", "echo: " + content}}}}}}};
        res.set_content(reply.dump(), "application/json");
    });
    server.Post("/flaky", [&](const httplib::Request&,
                              httplib::Response& res) {
        if (++hits == 1) {
            res.status = 500;
            return;
        }
        res.set_content("{\"choices\":[{\"message\":{\"content\":\"ok\"}}]}",
                        "application/json");
    });
    server.Post("/reject", [&](const httplib::Request&,
                               httplib::Response& res) {
        ++hits;
        res.status = 404;
    });
    server.Post("/garbled", [&](const httplib::Request&,
                                httplib::Response& res) {
        ++hits;
        res.set_content("not json at all", "application/json");
    });

    int port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread runner([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    TeacherConfig config;
    config.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/v1/chat";
    config.model = "test-model";
    config.backoff_ms = 1;

    CHECK(teacher_complete(config, "hello board") == "echo: hello board");

    hits = 0;
    config.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/flaky";
    config.retries = 1;
    CHECK(teacher_complete(config, "x") == "ok");
    CHECK(hits == 2);

    hits = 0;
    config.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/reject";
    config.retries = 2;
    CHECK_THROWS_WITH(teacher_complete(config, "x"),
                      Catch::Matchers::ContainsSubstring("status 404"));
    CHECK(hits == 1); // 4xx is not retried

    config.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/garbled";
    CHECK_THROWS_WITH(teacher_complete(config, "x"),
                      Catch::Matchers::ContainsSubstring("malformed"));

    server.stop();
    runner.join();

    // Nothing listens here anymore: transport failure after all retries.
    config.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/v1/chat";
    config.retries = 1;
    config.timeout_ms = 200;
    CHECK_THROWS_WITH(teacher_complete(config, "x"),
                      Catch::Matchers::ContainsSubstring("2 attempts"));
}

TEST_CASE("rejection filter applies the per-kind rules") {
    auto session = make_session(stub_config(2));
    Board board = start_position();
    auto ranked = session->rank_moves(board);

    EvalTask predict = make_predict_move_task(board);
    RejectionThresholds thresholds;
    thresholds.min_rank = 0.8;

    auto top = rejection_filter(
        predict, "Final Answer: " + ranked[0].move.uci(), session.get(),
        thresholds);
    CHECK(top.accepted);
    CHECK(top.reason.empty());

    auto weak = rejection_filter(
        predict, "Final Answer: " + ranked[12].move.uci(), session.get(),
        thresholds);
    CHECK(!weak.accepted);
    CHECK(weak.reason == "rank_below_threshold");

    auto illegal =
        rejection_filter(predict, "Final Answer: e2e5", session.get());
    CHECK(illegal.reason == "illegal_move");
    auto unparsed = rejection_filter(predict, "no move here", session.get());
    CHECK(unparsed.reason == "parse_failure");

    Rng rng(3);
    EvalTask choice = make_choice_task(parse_fen(kQueenGrabFen), *session,
                                       TaskKind::best_move, rng);
    CHECK(rejection_filter(choice,
                           "Final Answer: " + choice.answer_key[0].uci(),
                           nullptr)
              .accepted);
    std::string wrong;
    for (const Move& m : choice.candidates)
        if (!(m == choice.answer_key[0])) {
            wrong = m.uci();
            break;
        }
    CHECK(rejection_filter(choice, "Final Answer: " + wrong, nullptr)
              .reason == "wrong_choice");

    EvalTask lm;
    lm.kind = TaskKind::legal_moves;
    lm.board = board;
    lm.target_square = parse_square("b1");
    lm.answer_key = legal_moves_for_square(board, *lm.target_square);
    RejectionThresholds any;
    any.min_iou = 1.0;
    CHECK(rejection_filter(lm, "Final Answer: b1a3, b1c3", nullptr, any)
              .accepted);
    CHECK(rejection_filter(lm, "Final Answer: b1a3", nullptr).reason ==
          "iou_below_threshold");
}

TEST_CASE("rebalancing thins overrepresented slices deterministically") {
    auto record = [](const std::string& fen, const std::string& move) {
        Sample s;
        s.task = SampleTask::rejection_sampled;
        s.fen = fen;
        s.prompt = "p";
        s.response = move;
        s.meta["move"] = move;
        return s;
    };
    const std::string start_fen =
        "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1";

    // Balanced two-way batch: pawn moves and knight moves in equal shares.
    std::vector<Sample> balanced;
    for (int i = 0; i < 50; ++i) {
        balanced.push_back(record(start_fen, "e2e4"));
        balanced.push_back(record(start_fen, "g1f3"));
    }
    RebalanceTargets even;
    even.piece_share = {{PieceKind::pawn, 0.5}, {PieceKind::knight, 0.5}};
    auto kept = rebalance_accepted(balanced, even, 11);
    CHECK(kept.samples.size() == balanced.size());
    CHECK(kept.diagnostics.empty());
    CHECK(kept.before == kept.after);

    // An all-knight batch against a uniform piece target gets cut hard.
    std::vector<Sample> knights(200, record(start_fen, "g1f3"));
    RebalanceTargets uniform;
    for (PieceKind k : {PieceKind::pawn, PieceKind::knight, PieceKind::bishop,
                        PieceKind::rook, PieceKind::queen, PieceKind::king})
        uniform.piece_share[k] = 1.0 / 6.0;
    auto cut = rebalance_accepted(knights, uniform, 11);
    CHECK(cut.samples.size() < 70);
    CHECK(cut.samples.size() > 5);
    REQUIRE(!cut.diagnostics.empty());
    CHECK(cut.diagnostics[0].find("knight") != std::string::npos);

    // Same seed, same survivors; audit recounts match the kept batch.
    auto again = rebalance_accepted(knights, uniform, 11);
    CHECK(again.samples.size() == cut.samples.size());
    int recount = 0;
    for (const Sample& s : cut.samples)
        recount += s.meta.at("move") == "g1f3" ? 1 : 0;
    CHECK(recount == cut.after.at("piece:knight"));

    // Fullmove buckets follow the board's move counter.
    CHECK(fullmove_bucket(1) == 0);
    CHECK(fullmove_bucket(10) == 0);
    CHECK(fullmove_bucket(11) == 1);
    CHECK(fullmove_bucket(35) == 3);
    CHECK_THROWS_AS(fullmove_bucket(0), ChessError);

    std::vector<Sample> no_move{record(start_fen, "e2e4")};
    no_move[0].meta.erase("move");
    CHECK_THROWS_AS(rebalance_accepted(no_move, even, 1), ChessError);
}

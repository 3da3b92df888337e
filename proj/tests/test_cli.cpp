#include <catch2/catch_amalgamated.hpp>

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "chessforge/service/reward_service.hpp"
#include "chessforge/service/run_config.hpp"

using namespace chessforge;

namespace {

std::string forge_bin() {
    const char* env = std::getenv("FORGE_BIN");
    return env ? env : "build/tools/forge";
}

std::string stub_engine_path() {
    const char* env = std::getenv("STUB_ENGINE");
    return env ? env : "build/tools/stub_engine";
}

struct CmdResult {
    int exit_code = -1;
    std::string output; // stdout and stderr interleaved
};

CmdResult run_cmd(const std::string& cmd) {
    CmdResult r;
    FILE* pipe = ::popen((cmd + " 2>&1").c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    size_t got;
    while ((got = ::fread(buf, 1, sizeof buf, pipe)) > 0)
        r.output.append(buf, got);
    int status = ::pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("forge_cli." + std::to_string(::getpid()) + "." +
                std::to_string(counter()++));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const {
        return (path / name).string();
    }
    static std::atomic<int>& counter() {
        static std::atomic<int> c{0};
        return c;
    }
};

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    REQUIRE(out.is_open());
    out << text;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.is_open());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<nlohmann::json> read_jsonl(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.is_open());
    std::vector<nlohmann::json> out;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty())
            out.push_back(nlohmann::json::parse(line));
    return out;
}

// A minimal engine-backed config file pointing at the test stub.
std::string write_config(const TempDir& dir, uint64_t seed,
                         const std::string& extra = "") {
    std::string path = dir.file("run.json");
    write_file(path, "{\n  \"seed\": " + std::to_string(seed) +
                         ",\n  \"board_format\": \"fen\",\n"
                         "  \"pool_size\": 2,\n"
                         "  \"engine\": { \"executable\": \"" +
                         stub_engine_path() + "\", \"depth\": 3 }" +
                         (extra.empty() ? "" : ",\n" + extra) + "\n}\n");
    return path;
}

const char* kStartFen =
    "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1";
const char* kItalianFen =
    "r1bqkbnr/pppp1ppp/2n5/4p3/4P3/5N2/PPPP1PPP/RNBQKB1R w KQkq - 2 3";
const char* kRookEndgameFen = "8/5pk1/6p1/8/8/6P1/5PK1/3R4 w - - 0 40";

} // namespace

TEST_CASE("fnv1a hashing matches the reference vectors") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
    CHECK(fnv1a64_hex("foobar") == "85944171f73967e8");
    CHECK(fnv1a64_hex("").size() == 16);
}

TEST_CASE("config hash ignores formatting but tracks meaning") {
    auto a = parse_run_config(nlohmann::json::parse(
        R"({"seed": 9, "pool_size": 2, "engine": {"depth": 4, "executable": "/bin/true"}})"));
    auto b = parse_run_config(nlohmann::json::parse(
        R"({
            "engine": {"executable": "/bin/true", "depth": 4},
            "pool_size": 2,
            "seed": 9
        })"));
    CHECK(run_config_hash(a) == run_config_hash(b));

    // Spelled-out defaults hash the same as omitted ones.
    auto c = parse_run_config(nlohmann::json::parse(
        R"({"seed": 9, "pool_size": 2, "board_format": "visual_ascii",
            "engine": {"executable": "/bin/true", "depth": 4}})"));
    CHECK(run_config_hash(c) == run_config_hash(a));

    auto d = parse_run_config(nlohmann::json::parse(
        R"({"seed": 10, "pool_size": 2, "engine": {"depth": 4, "executable": "/bin/true"}})"));
    CHECK(run_config_hash(d) != run_config_hash(a));
}

TEST_CASE("run config parsing enforces shape and applies defaults") {
    CHECK_THROWS_AS(parse_run_config(nlohmann::json::parse("{}")),
                    ParseError);
    CHECK_THROWS_WITH(
        parse_run_config(nlohmann::json::parse(
            R"({"seed": 1, "sede": 2})")),
        Catch::Matchers::ContainsSubstring("sede"));
    CHECK_THROWS_WITH(
        parse_run_config(nlohmann::json::parse(
            R"({"seed": 1, "engine": {"exe": "x"}})")),
        Catch::Matchers::ContainsSubstring("exe"));

    auto cfg = parse_run_config(nlohmann::json::parse(R"({"seed": 5})"));
    CHECK(cfg.seed == 5);
    CHECK(cfg.pool_size == 1);
    CHECK(cfg.board_format == BoardFormat::visual_ascii);
    REQUIRE(cfg.engine.depth.has_value());
    CHECK(*cfg.engine.depth == 3);
    CHECK_FALSE(cfg.teacher.has_value());

    // Parsing accepts both limits, validation does not.
    auto both = parse_run_config(nlohmann::json::parse(
        R"({"seed": 5, "engine": {"depth": 3, "movetime_ms": 50}})"));
    CHECK_THROWS_AS(validate_run_config(both), ChessError);

    // An engineless, cacheless run has nothing to evaluate with.
    CHECK_THROWS_AS(validate_run_config(cfg), ChessError);

    auto missing = parse_run_config(nlohmann::json::parse(
        R"({"seed": 5, "engine": {"executable": "/no/such/engine"}})"));
    CHECK_THROWS_WITH(
        validate_run_config(missing),
        Catch::Matchers::ContainsSubstring("/no/such/engine"));
}

TEST_CASE("gen writes samples plus a manifest and skips bad lines") {
    TempDir dir;
    std::string config = write_config(dir, 7);
    write_file(dir.file("fens.txt"),
               std::string(kStartFen) + "\n" + "this is not a fen\n" +
                   kItalianFen + "\n" + kRookEndgameFen + "\n");

    std::string out = dir.file("bm.jsonl");
    auto r = run_cmd(forge_bin() + " gen best_move --config " + config +
                     " --positions " + dir.file("fens.txt") + " --out " +
                     out);
    INFO(r.output);
    REQUIRE(r.exit_code == 0);
    CHECK(r.output.find("warning:") != std::string::npos);
    CHECK(r.output.find("samples: 3") != std::string::npos);
    CHECK(r.output.find("skipped: 0") != std::string::npos);

    auto lines = read_jsonl(out);
    REQUIRE(lines.size() == 3);
    CHECK(lines[0].at("fen").get<std::string>() == kStartFen);
    for (const auto& j : lines) {
        CHECK(j.at("task").get<std::string>() == "best_move");
        CHECK_FALSE(j.at("prompt").get<std::string>().empty());
        Board b = parse_fen(j.at("fen").get<std::string>());
        Move best = parse_uci_move(j.at("response").get<std::string>());
        CHECK(is_legal(b, best));
    }

    auto manifest = nlohmann::json::parse(read_file(out + ".manifest.json"));
    CHECK(manifest.at("command") == "gen best_move");
    CHECK(manifest.at("seed") == 7);
    CHECK(manifest.at("positions") == 3);
    CHECK(manifest.at("samples") == 3);
    CHECK(manifest.at("skipped") == 0);
    CHECK(manifest.at("engine_id") == "forge-stub 1.0");
    CHECK(manifest.at("config_hash") ==
          run_config_hash(load_run_config(config)));
    CHECK(manifest.at("prompt_version") == prompts::kPromptVersion);

    // --count trims the position stream before generation.
    auto r2 = run_cmd(forge_bin() + " gen best_move --config " + config +
                      " --positions " + dir.file("fens.txt") + " --out " +
                      dir.file("bm2.jsonl") + " --count 1");
    REQUIRE(r2.exit_code == 0);
    CHECK(r2.output.find("positions: 1") != std::string::npos);
}

TEST_CASE("gen reruns are byte-identical with the same config and seed") {
    TempDir dir;
    std::string config = write_config(
        dir, 42, "  \"transcript_cache\": \"" + dir.file("cache.jsonl") +
                     "\"");
    write_file(dir.file("fens.txt"), std::string(kStartFen) + "\n" +
                                         kItalianFen + "\n" +
                                         kRookEndgameFen + "\n");

    auto gen = [&](const std::string& cfg, const std::string& out) {
        auto r = run_cmd(forge_bin() + " gen best_line --config " + cfg +
                         " --positions " + dir.file("fens.txt") +
                         " --out " + out);
        INFO(r.output);
        REQUIRE(r.exit_code == 0);
    };
    gen(config, dir.file("r1.jsonl"));
    gen(config, dir.file("r2.jsonl"));
    CHECK(read_file(dir.file("r1.jsonl")) ==
          read_file(dir.file("r2.jsonl")));
    CHECK(read_file(dir.file("r1.jsonl.manifest.json")) ==
          read_file(dir.file("r2.jsonl.manifest.json")));
    CHECK(std::filesystem::file_size(dir.file("cache.jsonl")) > 0);

    // A different seed changes the records, so the comparison above is not
    // vacuously true.
    std::string config2 = write_config(dir, 43);
    gen(config2, dir.file("r3.jsonl"));
    CHECK(read_file(dir.file("r1.jsonl")) !=
          read_file(dir.file("r3.jsonl")));
}

TEST_CASE("make-evals then score round-trips with library-exact rewards") {
    TempDir dir;
    std::string config = write_config(dir, 11);
    write_file(dir.file("fens.txt"), std::string(kStartFen) + "\n" +
                                         kItalianFen + "\n" +
                                         kRookEndgameFen + "\n");

    std::string tasks_path = dir.file("tasks.jsonl");
    auto r = run_cmd(forge_bin() + " make-evals predict_move --config " +
                     config + " --positions " + dir.file("fens.txt") +
                     " --out " + tasks_path);
    INFO(r.output);
    REQUIRE(r.exit_code == 0);
    CHECK(r.output.find("tasks: 3") != std::string::npos);

    auto tasks = read_jsonl(tasks_path);
    REQUIRE(tasks.size() == 3);
    CHECK(tasks[0].at("id") == "predict_move-0");
    CHECK(tasks[1].at("kind") == "predict_move");

    // One strong move, one parseable but illegal move, one parse failure.
    write_file(dir.file("resp.jsonl"),
               R"({"id": "predict_move-0", "response_text": "Final Answer: e2e4"})"
               "\n"
               R"({"id": "predict_move-1", "response_text": "Final Answer: a1a8"})"
               "\n"
               R"({"id": "predict_move-2", "response_text": "I cannot find a move."})"
               "\n");

    std::string scored_path = dir.file("scored.jsonl");
    r = run_cmd(forge_bin() + " score predict_move --config " + config +
                " --tasks " + tasks_path + " --responses " +
                dir.file("resp.jsonl") + " --out " + scored_path);
    INFO(r.output);
    REQUIRE(r.exit_code == 0);
    CHECK(r.output.find("scored: 3") != std::string::npos);
    CHECK(r.output.find("unscored_tasks: 0") != std::string::npos);
    CHECK(r.output.find("parse_failures: 1") != std::string::npos);

    // The CLI must agree bit for bit with direct library scoring.
    RunConfig cfg = load_run_config(config);
    auto session = make_session(cfg.engine);
    std::vector<std::string> responses = {"Final Answer: e2e4",
                                          "Final Answer: a1a8",
                                          "I cannot find a move."};
    auto scored = read_jsonl(scored_path);
    REQUIRE(scored.size() == 3);
    for (size_t i = 0; i < scored.size(); ++i) {
        EvalTask task = detail::task_from_request(tasks[i]);
        ScoreReport direct = score_task(task, responses[i], session.get());
        CHECK(scored[i].at("id") == "predict_move-" + std::to_string(i));
        CHECK(scored[i].at("reward").get<double>() == direct.reward);
        CHECK(scored[i].at("report") ==
              nlohmann::json(score_report_to_json(direct)));
    }
    CHECK(scored[1].at("reward").get<double>() == 0.0);
    CHECK(scored[2].at("reward").get<double>() == 0.0);

    // Partial response files leave the rest of the tasks unscored.
    write_file(dir.file("one.jsonl"),
               R"({"id": "predict_move-0", "response_text": "Final Answer: e2e4"})"
               "\n");
    r = run_cmd(forge_bin() + " score predict_move --config " + config +
                " --tasks " + tasks_path + " --responses " +
                dir.file("one.jsonl") + " --out " + dir.file("s2.jsonl"));
    REQUIRE(r.exit_code == 0);
    CHECK(r.output.find("scored: 1") != std::string::npos);
    CHECK(r.output.find("unscored_tasks: 2") != std::string::npos);
}

TEST_CASE("score rejects mismatched, duplicate, and orphaned inputs") {
    TempDir dir;
    std::string config = write_config(dir, 11);
    write_file(dir.file("fens.txt"), std::string(kStartFen) + "\n");
    std::string tasks_path = dir.file("tasks.jsonl");
    auto r = run_cmd(forge_bin() + " make-evals predict_move --config " +
                     config + " --positions " + dir.file("fens.txt") +
                     " --out " + tasks_path);
    REQUIRE(r.exit_code == 0);
    std::string task_line = read_file(tasks_path);
    std::string resp_line =
        R"({"id": "predict_move-0", "response_text": "Final Answer: e2e4"})"
        "\n";
    write_file(dir.file("resp.jsonl"), resp_line);

    // Task kind and scoring kind must agree.
    r = run_cmd(forge_bin() + " score legal_moves --config " + config +
                " --tasks " + tasks_path + " --responses " +
                dir.file("resp.jsonl") + " --out " + dir.file("out.jsonl"));
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("has kind predict_move") != std::string::npos);

    // Duplicate task ids.
    write_file(dir.file("dup_tasks.jsonl"), task_line + task_line);
    r = run_cmd(forge_bin() + " score predict_move --config " + config +
                " --tasks " + dir.file("dup_tasks.jsonl") + " --responses " +
                dir.file("resp.jsonl") + " --out " + dir.file("out.jsonl"));
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("duplicate task id") != std::string::npos);

    // Duplicate response ids.
    write_file(dir.file("dup_resp.jsonl"), resp_line + resp_line);
    r = run_cmd(forge_bin() + " score predict_move --config " + config +
                " --tasks " + tasks_path + " --responses " +
                dir.file("dup_resp.jsonl") + " --out " +
                dir.file("out.jsonl"));
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("duplicate response id") != std::string::npos);

    // A response naming a task that does not exist.
    write_file(dir.file("orphan.jsonl"),
               R"({"id": "predict_move-99", "response_text": "Final Answer: e2e4"})"
               "\n");
    r = run_cmd(forge_bin() + " score predict_move --config " + config +
                " --tasks " + tasks_path + " --responses " +
                dir.file("orphan.jsonl") + " --out " + dir.file("out.jsonl"));
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("predict_move-99 has no task") != std::string::npos);

    // No responses is not an error, just an empty report.
    write_file(dir.file("empty.jsonl"), "");
    r = run_cmd(forge_bin() + " score predict_move --config " + config +
                " --tasks " + tasks_path + " --responses " +
                dir.file("empty.jsonl") + " --out " + dir.file("out.jsonl"));
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("no responses") != std::string::npos);
    CHECK(read_file(dir.file("out.jsonl")).empty());
}

TEST_CASE("usage and config errors exit nonzero") {
    TempDir dir;
    write_file(dir.file("fens.txt"), std::string(kStartFen) + "\n");

    auto r = run_cmd(forge_bin());
    CHECK(r.exit_code != 0);

    r = run_cmd(forge_bin() + " gen tactics --config x --positions y "
                              "--out z");
    CHECK(r.exit_code != 0);
    CHECK(r.output.find("tactics") != std::string::npos);

    r = run_cmd(forge_bin() + " gen best_move --positions " +
                dir.file("fens.txt") + " --out " + dir.file("o.jsonl"));
    CHECK(r.exit_code != 0);

    r = run_cmd(forge_bin() + " gen best_move --config " +
                dir.file("missing.json") + " --positions " +
                dir.file("fens.txt") + " --out " + dir.file("o.jsonl"));
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("cannot open config file") != std::string::npos);

    write_file(dir.file("bad.json"), R"({"seed": 1, "tiebreak": "elo"})");
    r = run_cmd(forge_bin() + " gen best_move --config " +
                dir.file("bad.json") + " --positions " +
                dir.file("fens.txt") + " --out " + dir.file("o.jsonl"));
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("unknown key 'tiebreak'") != std::string::npos);
    CHECK_FALSE(std::filesystem::exists(dir.file("o.jsonl")));

    // Guided generation without a teacher cannot run.
    std::string config = write_config(dir, 3);
    r = run_cmd(forge_bin() + " gen guided --config " + config +
                " --positions " + dir.file("fens.txt") + " --out " +
                dir.file("o.jsonl"));
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("teacher") != std::string::npos);
}

TEST_CASE("gen guided skips positions the verifier rejects") {
    // A teacher that always replies with unverifiable prose: every position
    // should be skipped and the run should still succeed.
    httplib::Server server;
    server.Post("/complete", [&](const httplib::Request&,
                                 httplib::Response& res) {
        nlohmann::json reply = {
            {"choices",
             {{{"message", {{"content", "I would rather talk about go."}}}}}}};
        res.set_content(reply.dump(), "application/json");
    });
    int port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread runner([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    TempDir dir;
    std::string config = write_config(
        dir, 5,
        "  \"teacher\": { \"endpoint\": \"http://127.0.0.1:" +
            std::to_string(port) + "/complete\", \"retries\": 0 }");
    write_file(dir.file("fens.txt"),
               std::string(kStartFen) + "\n" + kItalianFen + "\n");

    auto r = run_cmd(forge_bin() + " gen guided --config " + config +
                     " --positions " + dir.file("fens.txt") + " --out " +
                     dir.file("g.jsonl"));
    INFO(r.output);
    REQUIRE(r.exit_code == 0);
    CHECK(r.output.find("samples: 0") != std::string::npos);
    CHECK(r.output.find("skipped: 2") != std::string::npos);
    CHECK(r.output.find("teacher output rejected") != std::string::npos);
    CHECK(read_file(dir.file("g.jsonl")).empty());

    server.stop();
    runner.join();
}

TEST_CASE("analyze triviality reports grouped fractions") {
    TempDir dir;
    std::string body;
    auto add = [&](const std::string& qt, double prob, int n) {
        for (int i = 0; i < n; ++i)
            body += nlohmann::json{{"dataset", "fba"},
                                   {"sample_id", "s" + std::to_string(i)},
                                   {"token_index", i},
                                   {"prob", prob},
                                   {"question_type", qt}}
                        .dump() +
                    "\n";
    };
    add("mobility", 0.999, 30);
    add("mobility", 0.5, 30);
    add("is_check", 0.999, 10);
    add("is_check", 0.95, 30);
    write_file(dir.file("probs.jsonl"), body);

    auto r = run_cmd(forge_bin() + " analyze triviality --probs " +
                     dir.file("probs.jsonl") +
                     " --group-by question_type --out " +
                     dir.file("triv.jsonl"));
    INFO(r.output);
    REQUIRE(r.exit_code == 0);

    auto rows = read_jsonl(dir.file("triv.jsonl"));
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].at("group") == "is_check");
    CHECK(rows[0].at("tokens") == 40);
    CHECK(rows[0].at("token_share").get<double>() == 0.4);
    CHECK(rows[0].at("trivial_fraction").get<double>() == 0.25);
    CHECK(rows[1].at("group") == "mobility");
    CHECK(rows[1].at("trivial_fraction").get<double>() == 0.5);
    CHECK(rows[2].at("group") == "(overall)");
    CHECK(rows[2].at("trivial_fraction").get<double>() == 0.4);

    // A looser threshold pulls the 0.95 tokens into the trivial bucket.
    r = run_cmd(forge_bin() + " analyze triviality --probs " +
                dir.file("probs.jsonl") +
                " --group-by question_type --threshold 0.9 --out " +
                dir.file("triv2.jsonl"));
    REQUIRE(r.exit_code == 0);
    auto rows2 = read_jsonl(dir.file("triv2.jsonl"));
    CHECK(rows2[0].at("trivial_fraction").get<double>() == 1.0);

    // Malformed records surface the offending line.
    write_file(dir.file("badprobs.jsonl"),
               body + R"({"dataset": "fba", "sample_id": "x", "token_index": 0, "prob": 1.5})"
                      "\n");
    r = run_cmd(forge_bin() + " analyze triviality --probs " +
                dir.file("badprobs.jsonl") + " --out " +
                dir.file("t3.jsonl"));
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("badprobs.jsonl:101") != std::string::npos);
}

TEST_CASE("analyze histogram bins scores from a plain text file") {
    TempDir dir;
    std::string body = "# reward histogram fixture\n\n";
    for (int i = 0; i < 10; ++i)
        body += std::to_string(0.05 + 0.1 * i) + "\n";
    body += "1.0\n"; // lands in the closed top bin
    write_file(dir.file("scores.txt"), body);

    auto r = run_cmd(forge_bin() + " analyze histogram --scores " +
                     dir.file("scores.txt") + " --bins 5 --out " +
                     dir.file("hist.jsonl"));
    INFO(r.output);
    REQUIRE(r.exit_code == 0);
    CHECK(r.output.find("total: 11") != std::string::npos);

    auto rows = read_jsonl(dir.file("hist.jsonl"));
    REQUIRE(rows.size() == 5);
    for (int i = 0; i < 4; ++i)
        CHECK(rows[i].at("count") == 2);
    CHECK(rows[4].at("count") == 3);
    CHECK(rows[4].at("high").get<double>() == 1.0);

    write_file(dir.file("bad.txt"), "0.5\nnot-a-score\n");
    r = run_cmd(forge_bin() + " analyze histogram --scores " +
                dir.file("bad.txt") + " --out " + dir.file("h2.jsonl"));
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("bad.txt:2") != std::string::npos);
}

TEST_CASE("analyze traces grades both raw text and pre-extracted claims") {
    TempDir dir;
    std::string body =
        nlohmann::json{
            {"fen", kStartFen},
            {"reasoning_text",
             "I will play e2e4 so the knight on g1 can develop."}}
            .dump() +
        "\n" +
        nlohmann::json{{"fen", "6k1/5ppp/8/8/8/8/8/R3K3 w - - 0 1"},
                       {"moves", nlohmann::json::array({"a1a8"})},
                       {"pieces",
                        nlohmann::json::array(
                            {nlohmann::json::array({"rook", "a1"}),
                             nlohmann::json::array({"queen", "d5"})})}}
            .dump() +
        "\n";
    write_file(dir.file("traces.jsonl"), body);

    auto r = run_cmd(forge_bin() + " analyze traces --traces " +
                     dir.file("traces.jsonl") + " --out " +
                     dir.file("report.jsonl"));
    INFO(r.output);
    REQUIRE(r.exit_code == 0);
    CHECK(r.output.find("traces: 2") != std::string::npos);
    CHECK(r.output.find("with_claims: 2") != std::string::npos);

    auto rows = read_jsonl(dir.file("report.jsonl"));
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].at("extractor") == "pattern");
    CHECK(rows[0].at("moves_total") == 1);
    CHECK(rows[0].at("moves_correct") == 1);
    CHECK(rows[0].at("pieces_correct") == 1);
    CHECK(rows[0].at("total_acc").get<double>() == 1.0);
    CHECK(rows[1].at("extractor") == "given");
    CHECK(rows[1].at("pieces_total") == 2);
    CHECK(rows[1].at("pieces_correct") == 1);
    CHECK(rows[1].at("total_acc").get<double>() ==
          Catch::Approx(2.0 / 3.0));

    // Teacher mode with no teacher in the config is a hard error.
    std::string config = write_config(dir, 5);
    r = run_cmd(forge_bin() + " analyze traces --traces " +
                dir.file("traces.jsonl") + " --out " + dir.file("r2.jsonl") +
                " --config " + config + " --use-teacher");
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("teacher") != std::string::npos);
}

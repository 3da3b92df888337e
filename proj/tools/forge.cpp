// Command-line front end: dataset generation, eval-task authoring, response
// scoring, trace and probability-log analysis, and the HTTP reward service.

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "chessforge/analysis/trace.hpp"
#include "chessforge/analysis/triviality.hpp"
#include "chessforge/service/reward_service.hpp"
#include "chessforge/service/run_config.hpp"
#include "chessforge/source/position_source.hpp"

using namespace chessforge;

namespace {

std::vector<SourcedPosition> load_positions(const std::string& path,
                                            int count) {
    std::vector<SourceDiagnostic> diagnostics;
    PositionStream stream = load_fens(path, &diagnostics);
    for (const auto& d : diagnostics)
        std::cerr << "warning: " << d.where << ": " << d.message << "\n";
    std::vector<SourcedPosition> out;
    while (auto p = stream.next()) {
        out.push_back(*p);
        if (count > 0 && static_cast<int>(out.size()) >= count)
            break;
    }
    if (out.empty())
        throw ChessError("no usable positions in " + path);
    return out;
}

// Index-addressed worker loop: results land in their input slot, so the
// output order never depends on thread timing. Worker w uses sessions[w].
template <typename Fn>
std::vector<std::string> run_workers(size_t n, int workers, Fn&& fn) {
    std::vector<std::string> errors(n);
    std::atomic<size_t> next{0};
    auto work = [&](int w) {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= n)
                return;
            try {
                fn(w, i);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };
    if (workers <= 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back(work, w);
        for (auto& t : pool)
            t.join();
    }
    return errors;
}

std::shared_ptr<TranscriptCache> open_cache(const RunConfig& cfg) {
    if (cfg.transcript_cache.empty())
        return nullptr;
    return std::make_shared<TranscriptCache>(cfg.transcript_cache);
}

Sample generate_one(const std::string& family, const Board& board,
                    EngineSession* session, const RunConfig& cfg,
                    size_t index) {
    uint64_t seed = derive_seed(cfg.seed, index);
    Rng rng(seed);
    if (family == "best_move")
        return gen_best_move(board, *session, cfg.board_format);
    if (family == "best_line")
        return gen_best_line(board, *session, rng, seed, cfg.board_format);
    if (family == "fba") {
        FbaParams params = cfg.fba;
        params.seed = seed;
        return gen_fba(board, rng, params, cfg.board_format);
    }
    if (family == "vabp") {
        VabpParams params = cfg.vabp;
        params.seed = seed;
        return gen_vabp(board, *session, params, default_prompt_bank(),
                        cfg.board_format);
    }
    if (family == "guided") {
        auto legal = legal_moves(board);
        if (legal.empty())
            throw ChessError("guided generation needs a nonterminal board");
        Move candidate = legal[rng.next_below(legal.size())];
        auto [prompt, audit] = gen_guided_prompt(
            board, candidate, *session, cfg.board_format, cfg.guided_plies);
        std::string text = teacher_complete(*cfg.teacher, prompt);
        auto verdict = verify_guided_output(text, audit);
        if (!verdict.accepted) {
            std::string reasons;
            for (const std::string& r : verdict.reasons)
                reasons += (reasons.empty() ? "" : ", ") + r;
            throw ChessError("teacher output rejected: " + reasons);
        }
        Sample s = make_guided_sample(prompt, text, audit, verdict.verdict);
        s.meta["seed"] = std::to_string(seed);
        s.meta["candidate"] = candidate.uci();
        return s;
    }
    throw ChessError("unknown family '" + family + "'");
}

int cmd_gen(const std::string& family, const std::string& config_path,
            const std::string& positions_path, const std::string& out_path,
            int count) {
    RunConfig cfg = load_run_config(config_path);
    if (family == "guided" && !cfg.teacher)
        throw ChessError("gen guided requires a teacher section in the "
                         "config");
    auto positions = load_positions(positions_path, count);
    auto cache = open_cache(cfg);

    bool needs_engine = family != "fba";
    size_t n = positions.size();
    int workers = std::min<size_t>(cfg.pool_size, n);
    std::vector<std::unique_ptr<EngineSession>> sessions;
    for (int w = 0; w < workers; ++w)
        sessions.push_back(needs_engine ? make_session(cfg.engine, cache)
                                        : nullptr);

    std::vector<std::optional<Sample>> slots(n);
    auto errors = run_workers(n, workers, [&](int w, size_t i) {
        slots[i] = generate_one(family, positions[i].board,
                                sessions[w].get(), cfg, i);
        validate_sample(*slots[i]);
    });

    std::vector<Sample> samples;
    size_t skipped = 0;
    for (size_t i = 0; i < n; ++i) {
        if (slots[i]) {
            samples.push_back(std::move(*slots[i]));
        } else {
            ++skipped;
            std::cerr << "skipped " << positions[i].origin << ": "
                      << errors[i] << "\n";
        }
    }

    write_samples_jsonl(out_path, samples);
    std::string engine_id =
        needs_engine ? sessions.front()->id_name() : "none";
    write_run_manifest(out_path, cfg, "gen " + family, n, samples.size(),
                       skipped, engine_id);
    std::cout << "family: " << family << "\n"
              << "positions: " << n << "\n"
              << "samples: " << samples.size() << "\n"
              << "skipped: " << skipped << "\n"
              << "engine: " << engine_id << "\n";
    return 0;
}

nlohmann::ordered_json task_to_json(const EvalTask& task,
                                    const std::string& id,
                                    BoardFormat format) {
    nlohmann::ordered_json j;
    j["id"] = id;
    j["kind"] = task_kind_name(task.kind);
    j["fen"] = emit_fen(task.board);
    if (!task.candidates.empty()) {
        j["candidates"] = nlohmann::json::array();
        for (const Move& m : task.candidates)
            j["candidates"].push_back(m.uci());
    }
    if (task.target_square)
        j["target_square"] = task.target_square->text();
    if (!task.answer_key.empty()) {
        j["answer_key"] = nlohmann::json::array();
        for (const Move& m : task.answer_key)
            j["answer_key"].push_back(m.uci());
    }
    j["prompt"] = task_prompt(task, format);
    return j;
}

int cmd_make_evals(const std::string& kind_name,
                   const std::string& config_path,
                   const std::string& positions_path,
                   const std::string& out_path, int count) {
    RunConfig cfg = load_run_config(config_path);
    TaskKind kind = parse_task_kind(kind_name);
    auto positions = load_positions(positions_path, count);
    auto cache = open_cache(cfg);

    bool needs_engine =
        kind == TaskKind::best_move || kind == TaskKind::worst_move;
    size_t n = positions.size();
    int workers = std::min<size_t>(cfg.pool_size, n);
    std::vector<std::unique_ptr<EngineSession>> sessions;
    for (int w = 0; w < workers; ++w)
        sessions.push_back(needs_engine ? make_session(cfg.engine, cache)
                                        : nullptr);

    std::vector<std::optional<EvalTask>> slots(n);
    auto errors = run_workers(n, workers, [&](int w, size_t i) {
        TaskParams params = cfg.task_params;
        params.seed = derive_seed(cfg.seed, i);
        Rng rng(params.seed);
        switch (kind) {
        case TaskKind::predict_move:
            slots[i] = make_predict_move_task(positions[i].board, params);
            break;
        case TaskKind::best_move:
        case TaskKind::worst_move:
            slots[i] = make_choice_task(positions[i].board, *sessions[w],
                                        kind, rng, params);
            break;
        case TaskKind::legal_moves:
            slots[i] = make_legal_moves_task(positions[i].board, rng,
                                             params);
            break;
        case TaskKind::ood_mate:
            slots[i] = make_ood_mate_task(positions[i].board, params);
            break;
        }
    });

    std::string body;
    size_t written = 0, skipped = 0;
    for (size_t i = 0; i < n; ++i) {
        if (!slots[i]) {
            ++skipped;
            std::cerr << "skipped " << positions[i].origin << ": "
                      << errors[i] << "\n";
            continue;
        }
        std::string id = kind_name + "-" + std::to_string(i);
        body += task_to_json(*slots[i], id, cfg.board_format).dump() + "\n";
        ++written;
    }
    write_text_atomic(out_path, body);
    std::string engine_id =
        needs_engine ? sessions.front()->id_name() : "none";
    write_run_manifest(out_path, cfg, "make-evals " + kind_name, n, written,
                       skipped, engine_id);
    std::cout << "kind: " << kind_name << "\n"
              << "positions: " << n << "\n"
              << "tasks: " << written << "\n"
              << "skipped: " << skipped << "\n";
    return 0;
}

struct LoadedTask {
    std::string id;
    EvalTask task;
};

std::vector<LoadedTask> read_tasks(const std::string& path,
                                   TaskKind expected) {
    std::ifstream in(path);
    if (!in)
        throw ChessError("cannot open tasks file: " + path);
    std::vector<LoadedTask> out;
    std::map<std::string, int> seen;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        try {
            auto j = nlohmann::json::parse(line);
            LoadedTask t;
            t.id = j.at("id").get<std::string>();
            t.task = detail::task_from_request(j);
            validate_task(t.task);
            if (t.task.kind != expected)
                throw ChessError("task " + t.id + " has kind " +
                                 task_kind_name(t.task.kind) +
                                 ", expected " + task_kind_name(expected));
            if (seen[t.id]++)
                throw ChessError("duplicate task id " + t.id);
            out.push_back(std::move(t));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(path + ":" + std::to_string(line_no) + ": " +
                             e.what());
        }
    }
    return out;
}

std::vector<std::pair<std::string, std::string>>
read_responses(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ChessError("cannot open responses file: " + path);
    std::vector<std::pair<std::string, std::string>> out;
    std::map<std::string, int> seen;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        try {
            auto j = nlohmann::json::parse(line);
            std::string id = j.at("id").get<std::string>();
            if (seen[id]++)
                throw ChessError("duplicate response id " + id);
            out.emplace_back(id,
                             j.at("response_text").get<std::string>());
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(path + ":" + std::to_string(line_no) + ": " +
                             e.what());
        }
    }
    return out;
}

void print_pct(const char* label, long hits, long total) {
    if (total == 0)
        return;
    std::cout << label << ": " << std::fixed << std::setprecision(1)
              << 100.0 * hits / total << "% (" << hits << "/" << total
              << ")\n";
}

void print_mean(const char* label, double sum, long count) {
    if (count == 0)
        return;
    std::cout << label << ": " << std::fixed << std::setprecision(4)
              << sum / count << "\n";
}

int cmd_score(const std::string& kind_name, const std::string& config_path,
              const std::string& tasks_path,
              const std::string& responses_path,
              const std::string& out_path) {
    RunConfig cfg = load_run_config(config_path);
    TaskKind kind = parse_task_kind(kind_name);
    auto tasks = read_tasks(tasks_path, kind);
    auto responses = read_responses(responses_path);

    if (responses.empty()) {
        write_text_atomic(out_path, "");
        std::cerr << "warning: no responses to score; wrote an empty "
                     "report\n";
        return 0;
    }

    std::map<std::string, const EvalTask*> by_id;
    for (const LoadedTask& t : tasks)
        by_id[t.id] = &t.task;
    for (const auto& [id, text] : responses)
        if (!by_id.count(id))
            throw ChessError("response id " + id + " has no task");

    auto cache = open_cache(cfg);
    bool needs_engine = kind == TaskKind::predict_move;
    size_t n = responses.size();
    int workers = std::min<size_t>(cfg.pool_size, n);
    std::vector<std::unique_ptr<EngineSession>> sessions;
    for (int w = 0; w < workers; ++w)
        sessions.push_back(needs_engine ? make_session(cfg.engine, cache)
                                        : nullptr);

    std::vector<std::optional<ScoreReport>> reports(n);
    auto errors = run_workers(n, workers, [&](int w, size_t i) {
        reports[i] = score_task(*by_id[responses[i].first],
                                responses[i].second, sessions[w].get());
    });
    for (size_t i = 0; i < n; ++i)
        if (!reports[i])
            throw ChessError("scoring " + responses[i].first + " failed: " +
                             errors[i]);

    std::string body;
    long legal_hits = 0, legal_n = 0, correct_hits = 0, correct_n = 0;
    long trivial_hits = 0, trivial_n = 0, parse_failures = 0;
    double rank_sum = 0, iou_sum = 0, reward_sum = 0;
    long rank_n = 0, iou_n = 0;
    for (size_t i = 0; i < n; ++i) {
        const ScoreReport& r = *reports[i];
        nlohmann::ordered_json j;
        j["id"] = responses[i].first;
        j["reward"] = r.reward;
        j["report"] = score_report_to_json(r);
        body += j.dump() + "\n";

        reward_sum += r.reward;
        if (!r.parsed_answer)
            ++parse_failures;
        if (r.legal) {
            ++legal_n;
            legal_hits += *r.legal ? 1 : 0;
        }
        if (r.correct) {
            ++correct_n;
            correct_hits += *r.correct ? 1 : 0;
        }
        if (r.trivial) {
            ++trivial_n;
            trivial_hits += *r.trivial ? 1 : 0;
        }
        if (r.normalized_rank) {
            ++rank_n;
            rank_sum += *r.normalized_rank;
        }
        if (r.iou) {
            ++iou_n;
            iou_sum += *r.iou;
        }
    }
    write_text_atomic(out_path, body);

    std::cout << "scored: " << n << "\n"
              << "unscored_tasks: " << tasks.size() - n << "\n"
              << "parse_failures: " << parse_failures << "\n";
    print_pct("legal", legal_hits, legal_n);
    print_mean("avg_rank", rank_sum, rank_n);
    print_pct("trivial", trivial_hits, trivial_n);
    print_pct("accuracy", correct_hits, correct_n);
    print_mean("avg_iou", iou_sum, iou_n);
    print_mean("avg_reward", reward_sum, static_cast<long>(n));
    return 0;
}

int cmd_analyze_traces(const std::string& traces_path,
                       const std::string& out_path,
                       const std::string& config_path, bool use_teacher,
                       bool strict_color) {
    std::optional<TeacherConfig> teacher;
    if (use_teacher) {
        if (config_path.empty())
            throw ChessError("--use-teacher needs --config with a teacher "
                             "section");
        RunConfig cfg = load_run_config(config_path);
        if (!cfg.teacher)
            throw ChessError("config has no teacher section");
        teacher = cfg.teacher;
    }
    auto traces = read_traces(traces_path);

    std::string body;
    long with_claims = 0;
    double acc_sum = 0;
    for (const TraceInput& t : traces) {
        ExtractedTrace trace;
        std::string extractor;
        if (t.extracted) {
            trace = *t.extracted;
            extractor = "given";
        } else if (teacher) {
            trace = extract_trace_llm(*teacher, t.reasoning_text);
            extractor = "teacher";
        } else {
            trace = extract_trace_pattern(t.reasoning_text);
            extractor = "pattern";
        }
        auto acc =
            referenced_accuracy(parse_fen(t.fen), trace, strict_color);

        nlohmann::ordered_json j;
        j["fen"] = t.fen;
        j["extractor"] = extractor;
        j["moves_total"] = acc.moves_total;
        j["moves_correct"] = acc.moves_correct;
        j["pieces_total"] = acc.pieces_total;
        j["pieces_correct"] = acc.pieces_correct;
        j["move_acc"] =
            acc.move_acc ? nlohmann::json(*acc.move_acc) : nullptr;
        j["piece_acc"] =
            acc.piece_acc ? nlohmann::json(*acc.piece_acc) : nullptr;
        j["total_acc"] =
            acc.total_acc ? nlohmann::json(*acc.total_acc) : nullptr;
        j["future_moves"] = acc.future_moves;
        body += j.dump() + "\n";

        if (acc.total_acc) {
            ++with_claims;
            acc_sum += *acc.total_acc;
        }
    }
    write_text_atomic(out_path, body);

    std::cout << "traces: " << traces.size() << "\n"
              << "with_claims: " << with_claims << "\n";
    if (with_claims > 0) {
        std::cout << std::fixed << std::setprecision(4)
                  << "mean_total_acc: " << acc_sum / with_claims << "\n"
                  << "hallucination_rate: " << 1.0 - acc_sum / with_claims
                  << "\n";
    }
    return 0;
}

int cmd_analyze_triviality(const std::vector<std::string>& prob_paths,
                           const std::string& group_by, double threshold,
                           const std::string& out_path) {
    auto records = read_token_probs_many(prob_paths);
    auto rows =
        triviality_grouped(records, parse_triviality_group(group_by),
                           threshold);
    double overall = triviality_fraction(records, threshold);

    std::string body;
    std::cout << std::left << std::setw(24) << "group" << std::right
              << std::setw(10) << "tokens" << std::setw(10) << "share"
              << std::setw(10) << "trivial" << "\n";
    for (const TrivialityRow& row : rows) {
        nlohmann::ordered_json j;
        j["group"] = row.group;
        j["tokens"] = row.tokens;
        j["token_share"] = row.token_share;
        j["trivial_fraction"] = row.trivial_fraction;
        body += j.dump() + "\n";
        std::cout << std::left << std::setw(24) << row.group << std::right
                  << std::setw(10) << row.tokens << std::setw(10)
                  << std::fixed << std::setprecision(3) << row.token_share
                  << std::setw(10) << row.trivial_fraction << "\n";
    }
    nlohmann::ordered_json j;
    j["group"] = "(overall)";
    j["tokens"] = records.size();
    j["token_share"] = 1.0;
    j["trivial_fraction"] = overall;
    body += j.dump() + "\n";
    std::cout << std::left << std::setw(24) << "(overall)" << std::right
              << std::setw(10) << records.size() << std::setw(10)
              << std::fixed << std::setprecision(3) << 1.0 << std::setw(10)
              << overall << "\n";
    write_text_atomic(out_path, body);
    return 0;
}

int cmd_analyze_histogram(const std::string& scores_path, int bins,
                          const std::string& out_path) {
    std::ifstream in(scores_path);
    if (!in)
        throw ChessError("cannot open scores file: " + scores_path);
    std::vector<double> scores;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        size_t start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos || line[start] == '#')
            continue;
        try {
            scores.push_back(std::stod(line));
        } catch (const std::exception&) {
            throw ParseError(scores_path + ":" + std::to_string(line_no) +
                             ": not a number");
        }
    }
    auto h = move_quality_histogram(scores, bins);

    std::string body;
    for (int i = 0; i < h.n_bins; ++i) {
        nlohmann::ordered_json j;
        j["bin"] = i;
        j["low"] = h.bin_low(i);
        j["high"] = h.bin_high(i);
        j["count"] = h.counts[i];
        j["frequency"] = h.frequencies[i];
        body += j.dump() + "\n";
        std::cout << std::fixed << std::setprecision(2) << "["
                  << h.bin_low(i) << ", " << h.bin_high(i)
                  << (i + 1 == h.n_bins ? "]" : ")") << "  "
                  << h.counts[i] << "\n";
    }
    write_text_atomic(out_path, body);
    std::cout << "total: " << h.total << "\n";
    return 0;
}

int cmd_serve(const std::string& config_path, const std::string& host,
              int port) {
    RunConfig cfg = load_run_config(config_path);
    RewardServiceConfig scfg;
    scfg.engine = cfg.engine;
    scfg.cache = open_cache(cfg);
    scfg.pool_size = cfg.pool_size;
    scfg.acquire_timeout_ms = cfg.acquire_timeout_ms;
    scfg.request_threads = cfg.request_threads;
    RewardService service(scfg);
    std::cout << "listening on " << host << ":" << port << "\n";
    service.serve(host, port);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"chess reasoning-data forge"};
    app.require_subcommand(1);

    std::string config_path, positions_path, out_path;
    int count = 0;

    auto* gen = app.add_subcommand("gen", "generate a training dataset");
    std::string family;
    gen->add_option("family", family, "dataset family")
        ->required()
        ->check(CLI::IsMember(
            {"best_move", "best_line", "fba", "vabp", "guided"}));
    gen->add_option("--config", config_path, "run config JSON")->required();
    gen->add_option("--positions", positions_path, "FEN file")->required();
    gen->add_option("--out", out_path, "output JSONL")->required();
    gen->add_option("--count", count, "max positions to use");

    auto* evals = app.add_subcommand("make-evals", "generate eval tasks");
    std::string kind;
    evals->add_option("kind", kind, "task kind")
        ->required()
        ->check(CLI::IsMember({"predict_move", "best_move", "worst_move",
                               "legal_moves", "ood_mate"}));
    evals->add_option("--config", config_path, "run config JSON")
        ->required();
    evals->add_option("--positions", positions_path, "FEN file")
        ->required();
    evals->add_option("--out", out_path, "output JSONL")->required();
    evals->add_option("--count", count, "max positions to use");

    auto* score = app.add_subcommand("score", "score model responses");
    std::string tasks_path, responses_path;
    score->add_option("kind", kind, "task kind")
        ->required()
        ->check(CLI::IsMember({"predict_move", "best_move", "worst_move",
                               "legal_moves", "ood_mate"}));
    score->add_option("--config", config_path, "run config JSON")
        ->required();
    score->add_option("--tasks", tasks_path, "tasks JSONL")->required();
    score->add_option("--responses", responses_path, "responses JSONL")
        ->required();
    score->add_option("--out", out_path, "report JSONL")->required();

    auto* analyze = app.add_subcommand("analyze", "analysis reports");
    analyze->require_subcommand(1);

    auto* traces = analyze->add_subcommand("traces", "factual grounding");
    std::string traces_path;
    bool use_teacher = false, strict_color = false;
    traces->add_option("--traces", traces_path, "traces JSONL")->required();
    traces->add_option("--out", out_path, "per-trace report JSONL")
        ->required();
    traces->add_option("--config", config_path, "run config JSON");
    traces->add_flag("--use-teacher", use_teacher,
                     "parse with the configured teacher");
    traces->add_flag("--strict-color", strict_color,
                     "stated piece colors must match");

    auto* triv = analyze->add_subcommand("triviality",
                                         "high-confidence token fractions");
    std::vector<std::string> prob_paths;
    std::string group_by = "dataset";
    double threshold = kTrivialityThreshold;
    triv->add_option("--probs", prob_paths, "probability log JSONL")
        ->required();
    triv->add_option("--group-by", group_by,
                     "dataset, question_type, or position_tag");
    triv->add_option("--threshold", threshold, "triviality cutoff");
    triv->add_option("--out", out_path, "table rows JSONL")->required();

    auto* hist = analyze->add_subcommand("histogram",
                                         "move-quality distribution");
    std::string scores_path;
    int bins = 10;
    hist->add_option("--scores", scores_path, "one score per line")
        ->required();
    hist->add_option("--bins", bins, "bin count");
    hist->add_option("--out", out_path, "bin rows JSONL")->required();

    auto* serve = app.add_subcommand("serve", "HTTP reward endpoint");
    std::string host = "127.0.0.1";
    int port = 0;
    serve->add_option("--config", config_path, "run config JSON")
        ->required();
    serve->add_option("--host", host, "bind address");
    serve->add_option("--port", port, "bind port")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed())
            return cmd_gen(family, config_path, positions_path, out_path,
                           count);
        if (evals->parsed())
            return cmd_make_evals(kind, config_path, positions_path,
                                  out_path, count);
        if (score->parsed())
            return cmd_score(kind, config_path, tasks_path, responses_path,
                             out_path);
        if (traces->parsed())
            return cmd_analyze_traces(traces_path, out_path, config_path,
                                      use_teacher, strict_color);
        if (triv->parsed())
            return cmd_analyze_triviality(prob_paths, group_by, threshold,
                                          out_path);
        if (hist->parsed())
            return cmd_analyze_histogram(scores_path, bins, out_path);
        if (serve->parsed())
            return cmd_serve(config_path, host, port);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

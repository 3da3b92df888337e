#ifndef CHESSFORGE_SERVICE_RUN_CONFIG_HPP
#define CHESSFORGE_SERVICE_RUN_CONFIG_HPP

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "chessforge/datagen/fba.hpp"
#include "chessforge/datagen/filters.hpp"
#include "chessforge/datagen/guided.hpp"
#include "chessforge/datagen/vabp.hpp"
#include "chessforge/util/hash.hpp"

namespace chessforge {

// Everything a run needs, loaded once from a JSON file. The canonical dump
// of the effective values (defaults applied) feeds the manifest hash, so two
// configs that mean the same thing hash the same.
struct RunConfig {
    EngineConfig engine;
    BoardFormat board_format = BoardFormat::visual_ascii;
    uint64_t seed = 0;
    int pool_size = 1;
    std::string transcript_cache; // empty means no cache
    FbaParams fba;
    VabpParams vabp;
    int guided_plies = 5;
    TaskParams task_params;
    RejectionThresholds thresholds;
    std::optional<TeacherConfig> teacher;
    int acquire_timeout_ms = 2000;
    int request_threads = 8;
};

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& obj,
                                std::initializer_list<const char*> known,
                                const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const char* k : known)
            ok = ok || key == k;
        if (!ok)
            throw ParseError("unknown key '" + key + "' in " + where);
    }
}

} // namespace detail

inline RunConfig parse_run_config(const nlohmann::json& doc) {
    if (!doc.is_object())
        throw ParseError("run config must be a JSON object");
    detail::reject_unknown_keys(
        doc,
        {"engine", "board_format", "seed", "pool_size", "transcript_cache",
         "gen", "eval", "teacher", "service"},
        "run config");

    RunConfig cfg;
    try {
        if (!doc.contains("seed"))
            throw ParseError("run config requires a seed");
        cfg.seed = doc.at("seed").get<uint64_t>();

        if (doc.contains("engine")) {
            const auto& e = doc.at("engine");
            detail::reject_unknown_keys(e,
                                        {"executable", "depth", "movetime_ms",
                                         "multipv_max", "hash_mb", "threads",
                                         "startup_timeout_ms"},
                                        "engine");
            cfg.engine.executable_path = e.value("executable", "");
            if (e.contains("depth"))
                cfg.engine.depth = e.at("depth").get<int>();
            if (e.contains("movetime_ms"))
                cfg.engine.movetime_ms = e.at("movetime_ms").get<int>();
            cfg.engine.multipv_max =
                e.value("multipv_max", cfg.engine.multipv_max);
            cfg.engine.hash_mb = e.value("hash_mb", cfg.engine.hash_mb);
            cfg.engine.threads = e.value("threads", cfg.engine.threads);
            cfg.engine.startup_timeout_ms =
                e.value("startup_timeout_ms", cfg.engine.startup_timeout_ms);
        }
        if (!cfg.engine.depth && !cfg.engine.movetime_ms)
            cfg.engine.depth = 3;

        cfg.board_format =
            parse_format(doc.value("board_format", "visual_ascii"));
        cfg.pool_size = doc.value("pool_size", 1);
        cfg.transcript_cache = doc.value("transcript_cache", "");

        if (doc.contains("gen")) {
            const auto& g = doc.at("gen");
            detail::reject_unknown_keys(g, {"fba", "vabp", "guided"}, "gen");
            if (g.contains("fba")) {
                const auto& f = g.at("fba");
                detail::reject_unknown_keys(
                    f, {"n_questions", "kind_weights"}, "gen.fba");
                cfg.fba.n_questions =
                    f.value("n_questions", cfg.fba.n_questions);
                if (f.contains("kind_weights"))
                    for (const auto& [name, w] :
                         f.at("kind_weights").items())
                        cfg.fba.kind_weights[static_cast<int>(
                            parse_fba_kind(name))] = w.get<double>();
            }
            if (g.contains("vabp")) {
                const auto& v = g.at("vabp");
                detail::reject_unknown_keys(
                    v,
                    {"temperature", "root_candidates", "child_candidates",
                     "depth_limit", "node_budget", "writeoff_margin"},
                    "gen.vabp");
                cfg.vabp.temperature =
                    v.value("temperature", cfg.vabp.temperature);
                cfg.vabp.root_candidates =
                    v.value("root_candidates", cfg.vabp.root_candidates);
                cfg.vabp.child_candidates =
                    v.value("child_candidates", cfg.vabp.child_candidates);
                cfg.vabp.depth_limit =
                    v.value("depth_limit", cfg.vabp.depth_limit);
                cfg.vabp.node_budget =
                    v.value("node_budget", cfg.vabp.node_budget);
                cfg.vabp.writeoff_margin =
                    v.value("writeoff_margin", cfg.vabp.writeoff_margin);
            }
            if (g.contains("guided")) {
                detail::reject_unknown_keys(g.at("guided"), {"total_plies"},
                                            "gen.guided");
                cfg.guided_plies =
                    g.at("guided").value("total_plies", cfg.guided_plies);
            }
        }

        if (doc.contains("eval")) {
            const auto& ev = doc.at("eval");
            detail::reject_unknown_keys(
                ev, {"quality_threshold_cp", "min_rank", "min_iou"}, "eval");
            cfg.task_params.quality_threshold_cp = ev.value(
                "quality_threshold_cp",
                cfg.task_params.quality_threshold_cp);
            cfg.thresholds.min_rank =
                ev.value("min_rank", cfg.thresholds.min_rank);
            cfg.thresholds.min_iou =
                ev.value("min_iou", cfg.thresholds.min_iou);
        }

        if (doc.contains("teacher")) {
            const auto& t = doc.at("teacher");
            detail::reject_unknown_keys(
                t,
                {"endpoint", "model", "temperature", "max_tokens",
                 "timeout_ms", "retries", "backoff_ms",
                 "response_text_path"},
                "teacher");
            TeacherConfig teacher;
            teacher.endpoint = t.at("endpoint").get<std::string>();
            teacher.model = t.value("model", "");
            teacher.temperature = t.value("temperature", teacher.temperature);
            teacher.max_tokens = t.value("max_tokens", teacher.max_tokens);
            teacher.timeout_ms = t.value("timeout_ms", teacher.timeout_ms);
            teacher.retries = t.value("retries", teacher.retries);
            teacher.backoff_ms = t.value("backoff_ms", teacher.backoff_ms);
            teacher.response_text_path = t.value(
                "response_text_path", teacher.response_text_path);
            cfg.teacher = teacher;
        }

        if (doc.contains("service")) {
            const auto& s = doc.at("service");
            detail::reject_unknown_keys(
                s, {"acquire_timeout_ms", "request_threads"}, "service");
            cfg.acquire_timeout_ms =
                s.value("acquire_timeout_ms", cfg.acquire_timeout_ms);
            cfg.request_threads =
                s.value("request_threads", cfg.request_threads);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad run config: ") + e.what());
    }
    return cfg;
}

// Invariants beyond shape: something playable must back the engine layer,
// and any referenced file has to exist now, not at first use.
inline void validate_run_config(const RunConfig& cfg) {
    cfg.engine.validate();
    cfg.fba.validate();
    cfg.vabp.validate();
    if (cfg.teacher)
        cfg.teacher->validate();
    if (cfg.pool_size < 1)
        throw ChessError("pool_size must be >= 1");
    if (cfg.guided_plies < 1)
        throw ChessError("gen.guided.total_plies must be >= 1");
    if (cfg.acquire_timeout_ms < 1 || cfg.request_threads < 1)
        throw ChessError("service timeouts and thread counts must be >= 1");
    if (cfg.engine.executable_path.empty() && cfg.transcript_cache.empty())
        throw ChessError(
            "config needs an engine executable, a transcript cache, or both");
    if (!cfg.engine.executable_path.empty() &&
        !std::filesystem::exists(cfg.engine.executable_path))
        throw ChessError("engine executable not found: " +
                         cfg.engine.executable_path);
    if (cfg.engine.executable_path.empty() &&
        !std::filesystem::exists(cfg.transcript_cache))
        throw ChessError("replay-only run but transcript cache not found: " +
                         cfg.transcript_cache);
}

inline RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ChessError("cannot open config file: " + path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    RunConfig cfg = parse_run_config(doc);
    validate_run_config(cfg);
    return cfg;
}

// The effective configuration with every default filled in, in fixed key
// order. Two files that parse to the same run produce identical dumps.
inline nlohmann::ordered_json canonical_run_config(const RunConfig& cfg) {
    nlohmann::ordered_json j;
    j["engine"]["executable"] = cfg.engine.executable_path;
    if (cfg.engine.depth)
        j["engine"]["depth"] = *cfg.engine.depth;
    if (cfg.engine.movetime_ms)
        j["engine"]["movetime_ms"] = *cfg.engine.movetime_ms;
    j["engine"]["multipv_max"] = cfg.engine.multipv_max;
    j["engine"]["hash_mb"] = cfg.engine.hash_mb;
    j["engine"]["threads"] = cfg.engine.threads;
    j["board_format"] = format_name(cfg.board_format);
    j["seed"] = cfg.seed;
    j["pool_size"] = cfg.pool_size;
    j["transcript_cache"] = cfg.transcript_cache;
    j["gen"]["fba"]["n_questions"] = cfg.fba.n_questions;
    for (int i = 0; i < kFbaKindCount; ++i)
        j["gen"]["fba"]["kind_weights"]
         [fba_kind_name(static_cast<FbaKind>(i))] = cfg.fba.kind_weights[i];
    j["gen"]["vabp"]["temperature"] = cfg.vabp.temperature;
    j["gen"]["vabp"]["root_candidates"] = cfg.vabp.root_candidates;
    j["gen"]["vabp"]["child_candidates"] = cfg.vabp.child_candidates;
    j["gen"]["vabp"]["depth_limit"] = cfg.vabp.depth_limit;
    j["gen"]["vabp"]["node_budget"] = cfg.vabp.node_budget;
    j["gen"]["vabp"]["writeoff_margin"] = cfg.vabp.writeoff_margin;
    j["gen"]["guided"]["total_plies"] = cfg.guided_plies;
    j["eval"]["quality_threshold_cp"] = cfg.task_params.quality_threshold_cp;
    j["eval"]["min_rank"] = cfg.thresholds.min_rank;
    j["eval"]["min_iou"] = cfg.thresholds.min_iou;
    if (cfg.teacher) {
        j["teacher"]["endpoint"] = cfg.teacher->endpoint;
        j["teacher"]["model"] = cfg.teacher->model;
        j["teacher"]["temperature"] = cfg.teacher->temperature;
        j["teacher"]["max_tokens"] = cfg.teacher->max_tokens;
    }
    j["service"]["acquire_timeout_ms"] = cfg.acquire_timeout_ms;
    j["service"]["request_threads"] = cfg.request_threads;
    return j;
}

inline std::string run_config_hash(const RunConfig& cfg) {
    return fnv1a64_hex(canonical_run_config(cfg).dump());
}

// Companion manifest: enough to tell whether two dataset files should be
// byte-identical (config, seed, engine) and how the run went (counts).
inline void write_run_manifest(const std::string& out_path,
                               const RunConfig& cfg,
                               const std::string& command,
                               size_t positions, size_t samples,
                               size_t skipped,
                               const std::string& engine_id) {
    nlohmann::ordered_json j;
    j["command"] = command;
    j["config_hash"] = run_config_hash(cfg);
    j["seed"] = cfg.seed;
    j["positions"] = positions;
    j["samples"] = samples;
    j["skipped"] = skipped;
    j["engine_id"] = engine_id;
    j["prompt_version"] = prompts::kPromptVersion;
    write_text_atomic(out_path + ".manifest.json", j.dump(2) + "\n");
}

} // namespace chessforge

#endif

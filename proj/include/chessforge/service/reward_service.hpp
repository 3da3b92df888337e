#ifndef CHESSFORGE_SERVICE_REWARD_SERVICE_HPP
#define CHESSFORGE_SERVICE_REWARD_SERVICE_HPP

#include <memory>
#include <string>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "chessforge/engine/pool.hpp"
#include "chessforge/eval/scoring.hpp"

namespace chessforge {

struct RewardServiceConfig {
    EngineConfig engine;
    std::shared_ptr<TranscriptCache> cache; // optional replay source
    int pool_size = 2;
    // How long a request waits for an engine session before giving up
    // with 503.
    int acquire_timeout_ms = 2000;
    // Upper bound on requests handled at once; beyond this they queue in
    // the accept backlog.
    int request_threads = 8;
    int read_timeout_ms = 30000;

    void validate() const {
        if (pool_size < 1)
            throw ChessError("pool_size must be >= 1");
        if (acquire_timeout_ms < 1 || request_threads < 1 ||
            read_timeout_ms < 1)
            throw ChessError(
                "service timeouts and thread counts must be >= 1");
    }
};

inline nlohmann::ordered_json score_report_to_json(const ScoreReport& r) {
    nlohmann::ordered_json j;
    j["kind"] = task_kind_name(r.kind);
    if (r.parsed_answer)
        j["parsed_answer"] = *r.parsed_answer;
    if (r.legal)
        j["legal"] = *r.legal;
    if (r.normalized_rank)
        j["normalized_rank"] = *r.normalized_rank;
    if (r.correct)
        j["correct"] = *r.correct;
    if (r.iou)
        j["iou"] = *r.iou;
    if (r.trivial)
        j["trivial"] = *r.trivial;
    j["reward"] = r.reward;
    j["fallback_used"] = r.fallback_used;
    j["diagnostics"] = r.diagnostics;
    return j;
}

namespace detail {

// Rebuilds the task a /score request describes. Shape problems (missing
// fields, bad FEN or UCI text, unknown kind) throw ParseError; whether the
// task then satisfies its own invariants is validate_task's business.
inline EvalTask task_from_request(const nlohmann::json& body) {
    EvalTask task;
    try {
        task.kind = parse_task_kind(body.at("kind").get<std::string>());
        task.board = parse_fen(body.at("fen").get<std::string>());
        if (body.contains("candidates"))
            for (const auto& c : body.at("candidates"))
                task.candidates.push_back(
                    parse_uci_move(c.get<std::string>()));
        if (body.contains("target_square"))
            task.target_square =
                parse_square(body.at("target_square").get<std::string>());
        if (body.contains("answer_key"))
            for (const auto& a : body.at("answer_key"))
                task.answer_key.push_back(
                    parse_uci_move(a.get<std::string>()));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad request shape: ") + e.what());
    }
    return task;
}

inline void set_error(httplib::Response& res, int status,
                      const std::string& message) {
    res.status = status;
    nlohmann::json body = {{"error", message}};
    res.set_content(body.dump(), "application/json");
}

} // namespace detail

// HTTP reward endpoint for external trainers. POST /score evaluates one
// response text against a task and returns the same reward the library
// scoring path produces; GET /health reports pool usage. Requests are
// stateless apart from the engine-session pool.
class RewardService {
  public:
    explicit RewardService(const RewardServiceConfig& config)
        : config_(config),
          pool_([config] { return make_session(config.engine, config.cache); },
                validated_pool_size(config)) {
        server_.new_task_queue = [this] {
            return new httplib::ThreadPool(
                static_cast<size_t>(config_.request_threads));
        };
        server_.set_read_timeout(config_.read_timeout_ms / 1000,
                                 (config_.read_timeout_ms % 1000) * 1000);

        server_.Post("/score", [this](const httplib::Request& req,
                                      httplib::Response& res) {
            handle_score(req, res);
        });
        server_.Get("/health", [this](const httplib::Request&,
                                      httplib::Response& res) {
            nlohmann::ordered_json body;
            body["status"] = "ok";
            body["pool_size"] = pool_.size();
            body["in_use"] = pool_.in_use();
            body["high_water"] = pool_.high_water();
            res.set_content(body.dump(), "application/json");
        });
    }

    ~RewardService() { stop(); }

    // Binds an ephemeral port and serves from a background thread; used by
    // tests and returned so callers can find the endpoint.
    int start(const std::string& host = "127.0.0.1") {
        int port = server_.bind_to_any_port(host);
        if (port <= 0)
            throw ChessError("cannot bind reward service on " + host);
        runner_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
        return port;
    }

    // Foreground serving for the CLI; returns when stop() is called.
    void serve(const std::string& host, int port) {
        if (!server_.listen(host, port))
            throw ChessError("cannot listen on " + host + ":" +
                             std::to_string(port));
    }

    void stop() {
        server_.stop();
        if (runner_.joinable())
            runner_.join();
    }

    EnginePool& pool() { return pool_; }
    const EnginePool& pool() const { return pool_; }

  private:
    static size_t validated_pool_size(const RewardServiceConfig& config) {
        config.validate();
        return static_cast<size_t>(config.pool_size);
    }

    void handle_score(const httplib::Request& req, httplib::Response& res) {
        nlohmann::json body;
        try {
            body = nlohmann::json::parse(req.body);
        } catch (const nlohmann::json::exception& e) {
            detail::set_error(res, 400,
                              std::string("request is not JSON: ") +
                                  e.what());
            return;
        }

        EvalTask task;
        std::string response_text;
        try {
            task = detail::task_from_request(body);
            response_text = body.at("response_text").get<std::string>();
        } catch (const ParseError& e) {
            detail::set_error(res, 400, e.what());
            return;
        } catch (const nlohmann::json::exception& e) {
            detail::set_error(res, 400,
                              std::string("bad request shape: ") + e.what());
            return;
        }

        try {
            validate_task(task);
        } catch (const TaskError& e) {
            detail::set_error(res, 422, e.what());
            return;
        }

        auto lease = pool_.acquire_for(config_.acquire_timeout_ms);
        if (!lease) {
            detail::set_error(res, 503, "engine pool exhausted");
            return;
        }

        ScoreReport report;
        try {
            report = score_task(task, response_text, &*lease);
        } catch (const EngineError& e) {
            lease.replace_broken();
            detail::set_error(res, 500,
                              std::string("engine failure: ") + e.what());
            return;
        } catch (const ChessError& e) {
            detail::set_error(res, 422, e.what());
            return;
        }

        nlohmann::ordered_json out;
        out["reward"] = report.reward;
        out["report"] = score_report_to_json(report);
        res.set_content(out.dump(), "application/json");
    }

    RewardServiceConfig config_;
    EnginePool pool_;
    httplib::Server server_;
    std::thread runner_;
};

} // namespace chessforge

#endif

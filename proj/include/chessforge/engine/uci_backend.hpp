#ifndef CHESSFORGE_ENGINE_UCI_BACKEND_HPP
#define CHESSFORGE_ENGINE_UCI_BACKEND_HPP

#include <memory>

#include "chessforge/engine/backend.hpp"
#include "chessforge/util/subprocess.hpp"

namespace chessforge {

namespace detail {

// One "info ... multipv k score ... pv ..." line; unknown tokens skipped per
// the UCI convention that clients ignore what they do not understand.
struct InfoLine {
    int multipv = 1;
    std::optional<CentipawnScore> score;
    std::vector<std::string> pv;
};

inline std::optional<InfoLine> parse_info_line(const std::string& line) {
    std::istringstream in(line);
    std::string tok;
    in >> tok;
    if (tok != "info")
        return std::nullopt;
    InfoLine out;
    while (in >> tok) {
        if (tok == "multipv") {
            in >> out.multipv;
        } else if (tok == "score") {
            std::string kind;
            int v;
            if (!(in >> kind >> v))
                return std::nullopt;
            if (kind == "cp") {
                out.score = CentipawnScore::from_cp(v);
            } else if (kind == "mate") {
                // UCI reports full moves; we track plies. A mate delivered by
                // the mover lands on an odd ply, one suffered on an even ply.
                if (v == 0)
                    out.score = CentipawnScore::mated_now();
                else if (v > 0)
                    out.score = CentipawnScore::from_mate(2 * v - 1);
                else
                    out.score = CentipawnScore::from_mate(2 * v);
            }
        } else if (tok == "pv") {
            while (in >> tok)
                out.pv.push_back(tok);
        }
    }
    return out;
}

} // namespace detail

// Live UCI engine over a subprocess: handshake on construction, one search
// at a time, option state tracked so MultiPV is only resent when it changes.
class UciBackend : public EngineBackend {
  public:
    explicit UciBackend(const EngineConfig& config) : config_(config) {
        config_.validate();
        if (config_.executable_path.empty())
            throw EngineError("engine executable path is empty");
        try {
            proc_ = std::make_unique<Subprocess>(
                std::vector<std::string>{config_.executable_path});
            proc_->write_line("uci");
            for (;;) {
                auto line = read_required(config_.startup_timeout_ms);
                if (line.rfind("id name ", 0) == 0)
                    id_name_ = line.substr(8);
                if (line == "uciok")
                    break;
            }
            set_option("Threads", std::to_string(config_.threads));
            set_option("Hash", std::to_string(config_.hash_mb));
            set_option("MultiPV", "1");
            sync();
        } catch (const SubprocessError& e) {
            throw EngineError(std::string("engine startup failed: ") +
                              e.what());
        }
    }

    std::string id_name() const override { return id_name_; }

    SearchReply search(const SearchRequest& request) override {
        try {
            if (request.multipv != multipv_current_) {
                set_option("MultiPV", std::to_string(request.multipv));
                multipv_current_ = request.multipv;
                sync();
            }
            proc_->write_line("position fen " + request.fen);
            proc_->write_line(request.go);
            SearchReply reply;
            for (;;) {
                auto line = read_required(kSearchTimeoutMs);
                if (line.rfind("bestmove", 0) == 0)
                    break;
                auto info = detail::parse_info_line(line);
                if (info && info->score)
                    reply[info->multipv] = PvLine{*info->score, info->pv};
            }
            return reply;
        } catch (const SubprocessError& e) {
            throw EngineError(std::string("engine protocol failure: ") +
                              e.what());
        }
    }

  private:
    std::string read_required(int timeout_ms) {
        auto line = proc_->read_line(timeout_ms);
        if (!line)
            throw EngineError("engine closed its output stream");
        return *line;
    }

    void set_option(const std::string& name, const std::string& value) {
        proc_->write_line("setoption name " + name + " value " + value);
    }

    void sync() {
        proc_->write_line("isready");
        while (read_required(config_.startup_timeout_ms) != "readyok") {
        }
    }

    static constexpr int kSearchTimeoutMs = 120'000;

    EngineConfig config_;
    std::unique_ptr<Subprocess> proc_;
    std::string id_name_;
    int multipv_current_ = 1;
};

} // namespace chessforge

#endif

#ifndef CHESSFORGE_ENGINE_BACKEND_HPP
#define CHESSFORGE_ENGINE_BACKEND_HPP

#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "chessforge/engine/score.hpp"

namespace chessforge {

struct EngineError : ChessError {
    using ChessError::ChessError;
};

struct EngineConfig {
    std::string executable_path;
    std::optional<int> depth;
    std::optional<int> movetime_ms;
    int multipv_max = 8;
    int hash_mb = 16;
    int threads = 1;
    int startup_timeout_ms = 5000;

    void validate() const {
        if (depth.has_value() == movetime_ms.has_value())
            throw EngineError("exactly one of depth/movetime must be set");
        if ((depth && *depth < 1) || (movetime_ms && *movetime_ms < 1) ||
            multipv_max < 1 || hash_mb < 1 || threads < 1 ||
            startup_timeout_ms < 1)
            throw EngineError("engine config integers must be >= 1");
    }
};

// One search as the wire sees it. The go string carries the limit and any
// searchmoves restriction, so a request is also a complete transcript key.
struct SearchRequest {
    std::string fen;
    int multipv = 1;
    std::string go;

    std::string key() const {
        std::ostringstream out;
        out << fen << " | multipv " << multipv << " | " << go;
        return out.str();
    }
};

// One ranked line of a reply; moves stay in UCI text at this layer.
struct PvLine {
    CentipawnScore score;
    std::vector<std::string> pv;
};

// Keyed by multipv slot (1-based).
using SearchReply = std::map<int, PvLine>;

class EngineBackend {
  public:
    virtual ~EngineBackend() = default;
    virtual SearchReply search(const SearchRequest& request) = 0;
    virtual std::string id_name() const = 0;
};

} // namespace chessforge

#endif

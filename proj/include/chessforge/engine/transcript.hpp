#ifndef CHESSFORGE_ENGINE_TRANSCRIPT_HPP
#define CHESSFORGE_ENGINE_TRANSCRIPT_HPP

#include <fstream>
#include <memory>
#include <mutex>
#include <unordered_map>

#include <json.hpp>

#include "chessforge/engine/backend.hpp"

namespace chessforge {

// Append-only store of engine replies keyed by the full search request.
// Recording once makes every later run replayable without an engine binary,
// which is what keeps generation byte-reproducible and CI engine-free.
//
// File format: one JSON object per line. The first line identifies the
// engine ({"engine_id": ...}); every other line is {"key", "reply"} where
// reply maps the multipv slot to {"cp"|"mate", "pv"}.
class TranscriptCache {
  public:
    explicit TranscriptCache(const std::string& path) : path_(path) {
        std::ifstream in(path);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty())
                continue;
            auto record = nlohmann::json::parse(line);
            if (record.contains("engine_id")) {
                engine_id_ = record["engine_id"].get<std::string>();
                continue;
            }
            entries_[record["key"].get<std::string>()] =
                decode_reply(record["reply"]);
        }
    }

    std::optional<SearchReply> lookup(const std::string& key) const {
        std::lock_guard lock(mutex_);
        auto it = entries_.find(key);
        if (it == entries_.end())
            return std::nullopt;
        return it->second;
    }

    void store(const std::string& key, const SearchReply& reply) {
        std::lock_guard lock(mutex_);
        if (entries_.count(key))
            return;
        entries_[key] = reply;
        nlohmann::json record;
        record["key"] = key;
        record["reply"] = encode_reply(reply);
        append_line(record.dump());
    }

    const std::string& engine_id() const { return engine_id_; }

    void set_engine_id(const std::string& id) {
        std::lock_guard lock(mutex_);
        if (engine_id_ == id)
            return;
        engine_id_ = id;
        nlohmann::json record;
        record["engine_id"] = id;
        append_line(record.dump());
    }

    size_t size() const {
        std::lock_guard lock(mutex_);
        return entries_.size();
    }

  private:
    static nlohmann::json encode_reply(const SearchReply& reply) {
        nlohmann::json out = nlohmann::json::object();
        for (const auto& [slot, line] : reply) {
            nlohmann::json entry;
            if (line.score.mate_in)
                entry["mate"] = *line.score.mate_in;
            else
                entry["cp"] = line.score.value;
            entry["pv"] = line.pv;
            out[std::to_string(slot)] = entry;
        }
        return out;
    }

    static SearchReply decode_reply(const nlohmann::json& encoded) {
        SearchReply reply;
        for (auto it = encoded.begin(); it != encoded.end(); ++it) {
            const auto& entry = it.value();
            PvLine line;
            if (entry.contains("mate")) {
                int plies = entry["mate"].get<int>();
                line.score = plies == 0 ? CentipawnScore::mated_now()
                                        : CentipawnScore::from_mate(plies);
            } else {
                line.score = CentipawnScore::from_cp(entry["cp"].get<int>());
            }
            line.pv = entry["pv"].get<std::vector<std::string>>();
            reply[std::stoi(it.key())] = line;
        }
        return reply;
    }

    void append_line(const std::string& line) {
        std::ofstream out(path_, std::ios::app);
        if (!out)
            throw EngineError("cannot append to transcript cache " + path_);
        out << line << '\n';
    }

    std::string path_;
    mutable std::mutex mutex_;
    std::unordered_map<std::string, SearchReply> entries_;
    std::string engine_id_ = "unknown";
};

// Backend that answers from the cache and falls through to a live engine on
// a miss (recording the reply). With no live engine attached, a miss is an
// error rather than a silent nondeterminism source.
class CachedBackend : public EngineBackend {
  public:
    CachedBackend(std::shared_ptr<TranscriptCache> cache,
                  std::unique_ptr<EngineBackend> live)
        : cache_(std::move(cache)), live_(std::move(live)) {
        if (live_)
            cache_->set_engine_id(live_->id_name());
    }

    std::string id_name() const override {
        return live_ ? live_->id_name() : cache_->engine_id();
    }

    SearchReply search(const SearchRequest& request) override {
        std::string key = request.key();
        if (auto hit = cache_->lookup(key))
            return *hit;
        if (!live_)
            throw EngineError("transcript cache miss with no engine attached: " +
                              key);
        SearchReply reply = live_->search(request);
        cache_->store(key, reply);
        return reply;
    }

  private:
    std::shared_ptr<TranscriptCache> cache_;
    std::unique_ptr<EngineBackend> live_;
};

} // namespace chessforge

#endif

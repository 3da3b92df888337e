#ifndef CHESSFORGE_ENGINE_POOL_HPP
#define CHESSFORGE_ENGINE_POOL_HPP

#include <condition_variable>
#include <functional>
#include <mutex>
#include <vector>

#include "chessforge/engine/session.hpp"

namespace chessforge {

// Fixed set of engine sessions handed out one caller at a time. Checkout
// blocks (optionally up to a deadline); the high-water mark records the
// maximum number of sessions ever simultaneously leased.
class EnginePool {
  public:
    using Factory = std::function<std::unique_ptr<EngineSession>()>;

    EnginePool(const Factory& factory, size_t size) : factory_(factory) {
        if (size == 0)
            throw EngineError("engine pool size must be >= 1");
        for (size_t i = 0; i < size; ++i)
            sessions_.push_back(factory());
        for (auto& s : sessions_)
            idle_.push_back(s.get());
        total_ = size;
    }

    class Lease {
      public:
        Lease() = default;
        Lease(EnginePool* pool, EngineSession* session)
            : pool_(pool), session_(session) {}
        Lease(Lease&& other) noexcept { swap(other); }
        Lease& operator=(Lease&& other) noexcept {
            release();
            swap(other);
            return *this;
        }
        Lease(const Lease&) = delete;
        Lease& operator=(const Lease&) = delete;
        ~Lease() { release(); }

        explicit operator bool() const { return session_ != nullptr; }
        EngineSession* operator->() const { return session_; }
        EngineSession& operator*() const { return *session_; }

        // Hands a session whose engine died back for restart instead of
        // returning it idle. The lease is consumed.
        void replace_broken() {
            if (pool_ && session_) {
                pool_->replace_session(session_);
                pool_ = nullptr;
                session_ = nullptr;
            }
        }

      private:
        void swap(Lease& other) {
            std::swap(pool_, other.pool_);
            std::swap(session_, other.session_);
        }
        void release() {
            if (pool_ && session_) {
                pool_->put_back(session_);
                pool_ = nullptr;
                session_ = nullptr;
            }
        }
        EnginePool* pool_ = nullptr;
        EngineSession* session_ = nullptr;
    };

    // Blocks until a session frees up.
    Lease acquire() {
        std::unique_lock lock(mutex_);
        available_.wait(lock, [&] { return !idle_.empty(); });
        return take(lock);
    }

    // Returns an empty lease when the pool stays exhausted past the timeout.
    Lease acquire_for(int timeout_ms) {
        std::unique_lock lock(mutex_);
        if (!available_.wait_for(lock, std::chrono::milliseconds(timeout_ms),
                                 [&] { return !idle_.empty(); }))
            return {};
        return take(lock);
    }

    size_t size() const { return total_; }

    size_t in_use() const {
        std::lock_guard lock(mutex_);
        return total_ - idle_.size();
    }

    size_t high_water() const {
        std::lock_guard lock(mutex_);
        return high_water_;
    }

  private:
    Lease take(std::unique_lock<std::mutex>&) {
        EngineSession* s = idle_.back();
        idle_.pop_back();
        size_t used = total_ - idle_.size();
        high_water_ = std::max(high_water_, used);
        return Lease(this, s);
    }

    void put_back(EngineSession* s) {
        {
            std::lock_guard lock(mutex_);
            idle_.push_back(s);
        }
        available_.notify_one();
    }

    // Restarts one slot via the factory. When the restart itself fails the
    // old session goes back idle so the pool never shrinks; the next user
    // of that slot will see the original failure again.
    void replace_session(EngineSession* broken) {
        std::unique_ptr<EngineSession> fresh;
        try {
            fresh = factory_();
        } catch (const ChessError&) {
        }
        {
            std::lock_guard lock(mutex_);
            for (auto& owned : sessions_)
                if (owned.get() == broken) {
                    if (fresh)
                        owned = std::move(fresh);
                    idle_.push_back(owned.get());
                    break;
                }
        }
        available_.notify_one();
    }

    Factory factory_;
    std::vector<std::unique_ptr<EngineSession>> sessions_;
    std::vector<EngineSession*> idle_;
    size_t total_ = 0;
    size_t high_water_ = 0;
    mutable std::mutex mutex_;
    std::condition_variable available_;
};

} // namespace chessforge

#endif

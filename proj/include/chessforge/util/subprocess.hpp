#ifndef CHESSFORGE_UTIL_SUBPROCESS_HPP
#define CHESSFORGE_UTIL_SUBPROCESS_HPP

#include <csignal>
#include <cstring>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

namespace chessforge {

struct SubprocessError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Line-oriented pipe to a child process. All reads go through a timeout so a
// wedged child surfaces as an error instead of a hang.
class Subprocess {
  public:
    explicit Subprocess(const std::vector<std::string>& argv) {
        if (argv.empty())
            throw SubprocessError("empty argv");
        int to_child[2], from_child[2];
        if (pipe(to_child) != 0 || pipe(from_child) != 0)
            throw SubprocessError("pipe() failed");
        pid_ = fork();
        if (pid_ < 0)
            throw SubprocessError("fork() failed");
        if (pid_ == 0) {
            dup2(to_child[0], STDIN_FILENO);
            dup2(from_child[1], STDOUT_FILENO);
            close(to_child[0]);
            close(to_child[1]);
            close(from_child[0]);
            close(from_child[1]);
            std::vector<char*> args;
            for (const auto& a : argv)
                args.push_back(const_cast<char*>(a.c_str()));
            args.push_back(nullptr);
            execvp(args[0], args.data());
            _exit(127);
        }
        close(to_child[0]);
        close(from_child[1]);
        stdin_fd_ = to_child[1];
        stdout_fd_ = from_child[0];
        fcntl(stdout_fd_, F_SETFL, O_NONBLOCK);
    }

    Subprocess(const Subprocess&) = delete;
    Subprocess& operator=(const Subprocess&) = delete;

    ~Subprocess() {
        if (pid_ > 0) {
            close(stdin_fd_);
            close(stdout_fd_);
            // Give the child a moment to exit on its own (most engines quit
            // when stdin closes), then insist.
            for (int i = 0; i < 50 && alive(); ++i)
                usleep(10'000);
            if (alive()) {
                kill(pid_, SIGKILL);
                waitpid(pid_, nullptr, 0);
            }
        }
    }

    void write_line(const std::string& line) {
        std::string data = line + "\n";
        size_t off = 0;
        while (off < data.size()) {
            ssize_t n = write(stdin_fd_, data.data() + off, data.size() - off);
            if (n < 0) {
                if (errno == EINTR)
                    continue;
                throw SubprocessError("write to child failed: " +
                                      std::string(strerror(errno)));
            }
            off += static_cast<size_t>(n);
        }
    }

    // Returns the next full line, or nullopt if the child closed its output.
    std::optional<std::string> read_line(int timeout_ms) {
        for (;;) {
            if (size_t pos = buffer_.find('\n'); pos != std::string::npos) {
                std::string line = buffer_.substr(0, pos);
                buffer_.erase(0, pos + 1);
                if (!line.empty() && line.back() == '\r')
                    line.pop_back();
                return line;
            }
            if (eof_)
                return std::nullopt;
            pollfd pfd{stdout_fd_, POLLIN, 0};
            int rc = poll(&pfd, 1, timeout_ms);
            if (rc == 0)
                throw SubprocessError("timed out waiting for child output");
            if (rc < 0) {
                if (errno == EINTR)
                    continue;
                throw SubprocessError("poll failed");
            }
            char chunk[4096];
            ssize_t n = read(stdout_fd_, chunk, sizeof chunk);
            if (n > 0)
                buffer_.append(chunk, static_cast<size_t>(n));
            else if (n == 0)
                eof_ = true;
            else if (errno != EINTR && errno != EAGAIN)
                throw SubprocessError("read from child failed");
        }
    }

    bool alive() {
        if (pid_ <= 0 || reaped_)
            return false;
        int status = 0;
        pid_t rc = waitpid(pid_, &status, WNOHANG);
        if (rc == pid_)
            reaped_ = true;
        return rc == 0;
    }

  private:
    pid_t pid_ = -1;
    int stdin_fd_ = -1;
    int stdout_fd_ = -1;
    std::string buffer_;
    bool eof_ = false;
    bool reaped_ = false;
};

} // namespace chessforge

#endif

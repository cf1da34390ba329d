// SPDX-License-Identifier: Apache-2.0

#include "skelgen/ocr.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "skelgen/error.hpp"

namespace skelgen::ocr {

std::string trim_output(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n\f\v");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n\f\v");
    return s.substr(first, last - first + 1);
}

// ---- fixture ---------------------------------------------------------------

FixtureRecognizer::FixtureRecognizer(std::vector<std::string> script) : script_(std::move(script)) {}

FixtureRecognizer::FixtureRecognizer(std::map<std::string, std::string> keyed)
    : keyed_(std::move(keyed)), keyed_mode_(true) {}

FixtureRecognizer FixtureRecognizer::from_json_text(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw parse_error(std::string("OCR fixture: malformed JSON: ") + e.what());
    }
    if (doc.is_array()) {
        std::vector<std::string> script;
        for (std::size_t i = 0; i < doc.size(); ++i) {
            if (!doc[i].is_string()) throw parse_error("OCR fixture: /" + std::to_string(i) + " is not a string");
            script.push_back(doc[i].get<std::string>());
        }
        return FixtureRecognizer(std::move(script));
    }
    if (doc.is_object()) {
        std::map<std::string, std::string> keyed;
        for (const auto& [k, v] : doc.items()) {
            if (!v.is_string()) throw parse_error("OCR fixture: /" + k + " is not a string");
            keyed[k] = v.get<std::string>();
        }
        return FixtureRecognizer(std::move(keyed));
    }
    throw parse_error("OCR fixture: expected array or object");
}

FixtureRecognizer FixtureRecognizer::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error(path.string() + ": cannot open file");
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

void FixtureRecognizer::begin_page(const std::string& image_id) {
    image_id_ = image_id;
    region_index_ = 0;
}

OcrResult FixtureRecognizer::recognize(const raster::GrayImage&) {
    if (keyed_mode_) {
        const auto key = image_id_ + ":" + std::to_string(region_index_);
        auto it = keyed_.find(key);
        if (it == keyed_.end()) throw ocr_error("fixture underrun: no entry for " + key);
        ++region_index_;
        ++cursor_;
        return {it->second, std::nullopt};
    }
    if (cursor_ >= script_.size()) {
        throw ocr_error("fixture underrun after " + std::to_string(script_.size()) + " entries");
    }
    ++region_index_;
    return {script_[cursor_++], std::nullopt};
}

// ---- external process ------------------------------------------------------

namespace {

void drain(int fd, std::string& sink) {
    std::array<char, 4096> buf{};
    for (;;) {
        const ssize_t n = ::read(fd, buf.data(), buf.size());
        if (n > 0) {
            sink.append(buf.data(), static_cast<std::size_t>(n));
            continue;
        }
        if (n < 0 && errno == EINTR) continue;
        return;
    }
}

// Temporary file removed on scope exit, whatever happened in between.
class TempFile {
public:
    explicit TempFile(const std::filesystem::path& dir) {
        auto pattern = (dir / "skelgen-ocr-XXXXXX.pgm").string();
        std::vector<char> buf(pattern.begin(), pattern.end());
        buf.push_back('\0');
        const int fd = ::mkstemps(buf.data(), 4);
        if (fd < 0) throw io_error("cannot create temporary file in " + dir.string() + ": " + std::strerror(errno));
        ::close(fd);
        path_ = buf.data();
    }
    ~TempFile() {
        std::error_code ec;
        std::filesystem::remove(path_, ec);
    }
    TempFile(const TempFile&) = delete;
    TempFile& operator=(const TempFile&) = delete;

    const std::filesystem::path& path() const noexcept { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace

ProcessResult run_shell(const std::string& command, std::chrono::milliseconds timeout) {
    ProcessResult result;
    int out_pipe[2];
    int err_pipe[2];
    if (::pipe(out_pipe) != 0) return result;
    if (::pipe(err_pipe) != 0) {
        ::close(out_pipe[0]);
        ::close(out_pipe[1]);
        return result;
    }

    const pid_t pid = ::fork();
    if (pid < 0) {
        for (int fd : {out_pipe[0], out_pipe[1], err_pipe[0], err_pipe[1]}) ::close(fd);
        return result;
    }
    if (pid == 0) {
        ::setpgid(0, 0);
        ::dup2(out_pipe[1], STDOUT_FILENO);
        ::dup2(err_pipe[1], STDERR_FILENO);
        for (int fd : {out_pipe[0], out_pipe[1], err_pipe[0], err_pipe[1]}) ::close(fd);
        const int devnull = ::open("/dev/null", O_RDONLY);
        if (devnull >= 0) ::dup2(devnull, STDIN_FILENO);
        ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
        ::_exit(127);
    }
    ::close(out_pipe[1]);
    ::close(err_pipe[1]);
    ::fcntl(out_pipe[0], F_SETFL, O_NONBLOCK);
    ::fcntl(err_pipe[0], F_SETFL, O_NONBLOCK);

    const auto deadline = std::chrono::steady_clock::now() + timeout;
    std::array<pollfd, 2> fds{pollfd{out_pipe[0], POLLIN, 0}, pollfd{err_pipe[0], POLLIN, 0}};
    int open_fds = 2;
    while (open_fds > 0) {
        const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
        if (left.count() <= 0) {
            result.timed_out = true;
            break;
        }
        const int rc = ::poll(fds.data(), fds.size(), static_cast<int>(left.count()));
        if (rc < 0 && errno == EINTR) continue;
        if (rc <= 0) {
            result.timed_out = rc == 0;
            break;
        }
        for (std::size_t i = 0; i < fds.size(); ++i) {
            if (fds[i].fd < 0 || fds[i].revents == 0) continue;
            std::string& sink = i == 0 ? result.out : result.err;
            std::array<char, 4096> buf{};
            const ssize_t n = ::read(fds[i].fd, buf.data(), buf.size());
            if (n > 0) {
                sink.append(buf.data(), static_cast<std::size_t>(n));
            } else if (n == 0 || (errno != EAGAIN && errno != EINTR)) {
                ::close(fds[i].fd);
                fds[i].fd = -1;
                --open_fds;
            }
        }
    }

    int status = 0;
    if (result.timed_out) {
        ::kill(-pid, SIGKILL);
        ::kill(pid, SIGKILL);
    }
    while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
    }
    for (auto& p : fds) {
        if (p.fd >= 0) {
            if (!result.timed_out) drain(p.fd, &p == &fds[0] ? result.out : result.err);
            ::close(p.fd);
        }
    }
    if (!result.timed_out && WIFEXITED(status)) {
        result.exit_code = WEXITSTATUS(status);
    }
    return result;
}

ExternalRecognizer::ExternalRecognizer(std::string command_template, std::chrono::milliseconds timeout)
    : command_template_(std::move(command_template)), timeout_(timeout), temp_dir_(std::filesystem::temp_directory_path()) {
    if (command_template_.empty()) throw std::invalid_argument("ocr.command is empty");
}

namespace {

std::string shell_quote(const std::string& s) {
    std::string q = "'";
    for (char c : s) {
        if (c == '\'') {
            q += "'\\''";
        } else {
            q += c;
        }
    }
    return q + "'";
}

}  // namespace

OcrResult ExternalRecognizer::recognize(const raster::GrayImage& region) {
    if (region.empty()) throw std::invalid_argument("recognize: empty region");
    TempFile tmp(temp_dir_);
    raster::save_pgm(tmp.path(), region);

    std::string command = command_template_;
    const std::string placeholder = "{input}";
    const auto quoted = shell_quote(tmp.path().string());
    for (auto pos = command.find(placeholder); pos != std::string::npos; pos = command.find(placeholder, pos + quoted.size())) {
        command.replace(pos, placeholder.size(), quoted);
    }

    const auto r = run_shell(command, timeout_);
    if (r.timed_out) {
        throw ocr_error("ocr backend failure: '" + command_template_ + "' timed out after " +
                        std::to_string(timeout_.count()) + " ms");
    }
    if (r.exit_code != 0) {
        auto diag = trim_output(r.err);
        throw ocr_error("ocr backend failure: '" + command_template_ + "' exited with " +
                        (r.exit_code < 0 ? std::string("a signal") : std::to_string(r.exit_code)) +
                        (diag.empty() ? std::string() : ": " + diag));
    }
    return {trim_output(r.out), std::nullopt};
}

}  // namespace skelgen::ocr

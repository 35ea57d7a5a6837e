/*
 * Copyright (C) 2026 The authlab developers
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * Byte-stream transports: loopback/remote TCP for real runs, an in-memory
 * duplex pair for deterministic tests, and a faulting stub that proves the
 * dictionary scan needs no transport at all.
 */

#pragma once

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <chrono>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <utility>

#include "authlab/errors.hpp"

namespace authlab {

class Stream {
public:
    virtual ~Stream() = default;

    /// Returns the number of bytes read; 0 means orderly end-of-stream.
    virtual std::size_t read_some(std::span<std::uint8_t> out) = 0;
    virtual void write_all(std::span<const std::uint8_t> data) = 0;
    virtual void close() = 0;
};

inline constexpr std::size_t kMaxLineBytes = 4096;

/// LF-delimited framing on top of a Stream. Lines longer than kMaxLineBytes
/// are malformed by definition.
class LineChannel {
public:
    explicit LineChannel(Stream& stream) : stream_(stream) {}

    std::string read_line() {
        for (;;) {
            const auto lf = buffer_.find('\n');
            if (lf != std::string::npos) {
                if (lf > kMaxLineBytes)
                    throw MalformedEncoding("line exceeds 4096 bytes");
                std::string line = buffer_.substr(0, lf);
                buffer_.erase(0, lf + 1);
                return line;
            }
            if (buffer_.size() > kMaxLineBytes)
                throw MalformedEncoding("line exceeds 4096 bytes");
            std::uint8_t chunk[1024];
            const std::size_t got = stream_.read_some(chunk);
            if (got == 0)
                throw TransportError("connection closed by peer");
            buffer_.append(reinterpret_cast<const char*>(chunk), got);
        }
    }

    void write_line(std::string_view line) {
        std::string framed(line);
        framed.push_back('\n');
        stream_.write_all(std::span<const std::uint8_t>(
            reinterpret_cast<const std::uint8_t*>(framed.data()), framed.size()));
    }

private:
    Stream& stream_;
    std::string buffer_;
};

class TcpStream : public Stream {
public:
    explicit TcpStream(int fd) : fd_(fd) {}
    ~TcpStream() override { close(); }

    TcpStream(const TcpStream&) = delete;
    TcpStream& operator=(const TcpStream&) = delete;

    static std::unique_ptr<TcpStream> connect(const std::string& host, std::uint16_t port) {
        addrinfo hints{};
        hints.ai_family = AF_UNSPEC;
        hints.ai_socktype = SOCK_STREAM;
        addrinfo* res = nullptr;
        const std::string service = std::to_string(port);
        if (getaddrinfo(host.c_str(), service.c_str(), &hints, &res) != 0)
            throw TransportError("cannot resolve " + host);
        std::unique_ptr<addrinfo, decltype(&freeaddrinfo)> guard(res, freeaddrinfo);
        for (addrinfo* ai = res; ai; ai = ai->ai_next) {
            const int fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
            if (fd < 0) continue;
            if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0)
                return std::make_unique<TcpStream>(fd);
            ::close(fd);
        }
        throw TransportError("cannot connect to " + host + ":" + service);
    }

    void set_read_timeout(std::chrono::milliseconds timeout) {
        timeval tv{};
        tv.tv_sec = static_cast<time_t>(timeout.count() / 1000);
        tv.tv_usec = static_cast<suseconds_t>((timeout.count() % 1000) * 1000);
        ::setsockopt(fd_, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof(tv));
    }

    std::size_t read_some(std::span<std::uint8_t> out) override {
        if (fd_ < 0)
            throw TransportError("read on closed socket");
        for (;;) {
            const ssize_t got = ::recv(fd_, out.data(), out.size(), 0);
            if (got > 0) return static_cast<std::size_t>(got);
            if (got == 0) return 0;
            if (errno == EINTR) continue;
            if (errno == EAGAIN || errno == EWOULDBLOCK)
                throw TimeoutError("read timed out");
            throw TransportError(std::string("recv: ") + std::strerror(errno));
        }
    }

    void write_all(std::span<const std::uint8_t> data) override {
        if (fd_ < 0)
            throw TransportError("write on closed socket");
        std::size_t sent = 0;
        while (sent < data.size()) {
            const ssize_t n = ::send(fd_, data.data() + sent, data.size() - sent,
                                     MSG_NOSIGNAL);
            if (n < 0) {
                if (errno == EINTR) continue;
                throw TransportError(std::string("send: ") + std::strerror(errno));
            }
            sent += static_cast<std::size_t>(n);
        }
    }

    void close() override {
        if (fd_ >= 0) {
            ::close(fd_);
            fd_ = -1;
        }
    }

private:
    int fd_;
};

class TcpListener {
public:
    TcpListener(const std::string& host, std::uint16_t port) {
        fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
        if (fd_ < 0)
            throw TransportError(std::string("socket: ") + std::strerror(errno));
        const int one = 1;
        ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
        sockaddr_in addr{};
        addr.sin_family = AF_INET;
        addr.sin_port = htons(port);
        if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
            ::close(fd_);
            throw TransportError("bad listen address: " + host);
        }
        if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
            const std::string err = std::strerror(errno);
            ::close(fd_);
            throw TransportError("bind " + host + ":" + std::to_string(port) + ": " + err);
        }
        if (::listen(fd_, 64) != 0) {
            const std::string err = std::strerror(errno);
            ::close(fd_);
            throw TransportError("listen: " + err);
        }
        sockaddr_in bound{};
        socklen_t len = sizeof(bound);
        ::getsockname(fd_, reinterpret_cast<sockaddr*>(&bound), &len);
        port_ = ntohs(bound.sin_port);
    }

    ~TcpListener() { close(); }
    TcpListener(const TcpListener&) = delete;
    TcpListener& operator=(const TcpListener&) = delete;

    std::uint16_t port() const { return port_; }

    /// Waits up to `poll_interval` for a connection; nullptr on timeout so
    /// callers can check a stop flag between waits.
    std::unique_ptr<TcpStream> accept(std::chrono::milliseconds poll_interval) {
        pollfd pfd{fd_, POLLIN, 0};
        const int r = ::poll(&pfd, 1, static_cast<int>(poll_interval.count()));
        if (r < 0) {
            if (errno == EINTR) return nullptr;
            throw TransportError(std::string("poll: ") + std::strerror(errno));
        }
        if (r == 0) return nullptr;
        const int fd = ::accept(fd_, nullptr, nullptr);
        if (fd < 0) {
            if (errno == EINTR || errno == ECONNABORTED) return nullptr;
            throw TransportError(std::string("accept: ") + std::strerror(errno));
        }
        return std::make_unique<TcpStream>(fd);
    }

    void close() {
        if (fd_ >= 0) {
            ::close(fd_);
            fd_ = -1;
        }
    }

private:
    int fd_ = -1;
    std::uint16_t port_ = 0;
};

namespace detail {

struct MemoryPipe {
    std::mutex mu;
    std::condition_variable cv;
    std::deque<std::uint8_t> data;
    bool closed = false;
};

} // namespace detail

/// One endpoint of an in-memory duplex connection (see make_memory_pair).
class MemoryStream : public Stream {
public:
    MemoryStream(std::shared_ptr<detail::MemoryPipe> in,
                 std::shared_ptr<detail::MemoryPipe> out)
        : in_(std::move(in)), out_(std::move(out)) {}

    ~MemoryStream() override { close(); }

    void set_read_timeout(std::chrono::milliseconds timeout) { timeout_ = timeout; }

    std::size_t read_some(std::span<std::uint8_t> out) override {
        std::unique_lock lk(in_->mu);
        const auto ready = [&] { return !in_->data.empty() || in_->closed; };
        if (timeout_) {
            if (!in_->cv.wait_for(lk, *timeout_, ready))
                throw TimeoutError("read timed out");
        } else {
            in_->cv.wait(lk, ready);
        }
        if (in_->data.empty()) return 0;   // closed and drained
        std::size_t count = 0;
        while (count < out.size() && !in_->data.empty()) {
            out[count++] = in_->data.front();
            in_->data.pop_front();
        }
        return count;
    }

    void write_all(std::span<const std::uint8_t> data) override {
        std::unique_lock lk(out_->mu);
        if (out_->closed)
            throw TransportError("peer endpoint closed");
        out_->data.insert(out_->data.end(), data.begin(), data.end());
        out_->cv.notify_all();
    }

    void close() override {
        for (const auto& pipe : {in_, out_}) {
            std::unique_lock lk(pipe->mu);
            pipe->closed = true;
            pipe->cv.notify_all();
        }
    }

private:
    std::shared_ptr<detail::MemoryPipe> in_;
    std::shared_ptr<detail::MemoryPipe> out_;
    std::optional<std::chrono::milliseconds> timeout_;
};

/// Two connected endpoints sharing the same byte-stream contract as TCP.
inline std::pair<std::unique_ptr<MemoryStream>, std::unique_ptr<MemoryStream>>
make_memory_pair() {
    auto a_to_b = std::make_shared<detail::MemoryPipe>();
    auto b_to_a = std::make_shared<detail::MemoryPipe>();
    return {std::make_unique<MemoryStream>(b_to_a, a_to_b),
            std::make_unique<MemoryStream>(a_to_b, b_to_a)};
}

/// Transport stub that fails on any use. Handing this to code that is
/// claimed to be offline proves the claim: the attack's Phase 2 must
/// complete without touching it.
class FaultingStream : public Stream {
public:
    std::size_t read_some(std::span<std::uint8_t>) override { return fault("read"); }
    void write_all(std::span<const std::uint8_t>) override { fault("write"); }
    void close() override { fault("close"); }

    std::size_t attempts() const { return attempts_.load(); }

private:
    std::size_t fault(const char* op) {
        attempts_.fetch_add(1);
        throw TransportError(std::string("transport use after capture: ") + op);
    }

    std::atomic<std::size_t> attempts_{0};
};

} // namespace authlab

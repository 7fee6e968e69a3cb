// POSIX TCP plumbing: listener, connector, thread-per-connection server.
#pragma once

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cstdint>
#include <cstring>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "elwe/errors.hpp"
#include "elwe/ztnet/frame.hpp"
#include "elwe/ztnet/policy.hpp"
#include "elwe/ztnet/retry.hpp"

namespace elwe::ztnet {

struct TcpAddress {
    std::string host = "127.0.0.1";
    std::uint16_t port = 0;
};

inline TcpAddress parse_address(const std::string& text) {
    auto colon = text.rfind(':');
    if (colon == std::string::npos) throw ConfigError("address must be host:port: " + text);
    TcpAddress addr;
    addr.host = text.substr(0, colon);
    if (addr.host.empty()) addr.host = "0.0.0.0";
    std::string port_text = text.substr(colon + 1);
    if (port_text.empty()) throw ConfigError("address must be host:port: " + text);
    unsigned long port = 0;
    for (char c : port_text) {
        if (c < '0' || c > '9') throw ConfigError("invalid port in address: " + text);
        port = port * 10 + static_cast<unsigned long>(c - '0');
        if (port > 65535) throw ConfigError("invalid port in address: " + text);
    }
    addr.port = static_cast<std::uint16_t>(port);
    return addr;
}

inline bool send_all(int fd, const std::uint8_t* data, std::size_t len) {
    std::size_t sent = 0;
    while (sent < len) {
        ssize_t n = ::send(fd, data + sent, len - sent, 0);
        if (n <= 0) return false;
        sent += static_cast<std::size_t>(n);
    }
    return true;
}

inline bool recv_all(int fd, std::uint8_t* data, std::size_t len) {
    std::size_t got = 0;
    while (got < len) {
        ssize_t n = ::recv(fd, data + got, len - got, 0);
        if (n <= 0) return false;
        got += static_cast<std::size_t>(n);
    }
    return true;
}

inline bool send_frame_fd(int fd, const nlohmann::json& j) {
    auto bytes = frame_bytes(j);
    return send_all(fd, bytes.data(), bytes.size());
}

inline std::optional<nlohmann::json> recv_frame_fd(int fd) {
    std::uint8_t header[4];
    if (!recv_all(fd, header, 4)) return std::nullopt;
    std::uint32_t len = 0;
    for (int i = 0; i < 4; ++i) len |= static_cast<std::uint32_t>(header[i]) << (8 * i);
    if (len > kMaxFrameBytes) return std::nullopt;
    std::vector<std::uint8_t> body(len);
    if (len > 0 && !recv_all(fd, body.data(), len)) return std::nullopt;
    try {
        return nlohmann::json::parse(std::string(body.begin(), body.end()));
    } catch (const nlohmann::json::exception&) {
        return std::nullopt;
    }
}

inline int tcp_connect(const TcpAddress& addr) {
    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) return -1;
    sockaddr_in sa{};
    sa.sin_family = AF_INET;
    sa.sin_port = htons(addr.port);
    if (::inet_pton(AF_INET, addr.host.c_str(), &sa.sin_addr) != 1) {
        ::close(fd);
        return -1;
    }
    if (::connect(fd, reinterpret_cast<sockaddr*>(&sa), sizeof(sa)) != 0) {
        ::close(fd);
        return -1;
    }
    return fd;
}

// One handler thread per accepted connection; a connection may carry many frames.
class TcpServer {
public:
    using Handler = std::function<Response(const Request&)>;

    TcpServer(const TcpAddress& addr, Handler handler) : handler_(std::move(handler)) {
        listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
        if (listen_fd_ < 0) throw IoError("socket() failed");
        int one = 1;
        ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
        sockaddr_in sa{};
        sa.sin_family = AF_INET;
        sa.sin_port = htons(addr.port);
        std::string host = addr.host == "localhost" ? "127.0.0.1" : addr.host;
        if (::inet_pton(AF_INET, host.c_str(), &sa.sin_addr) != 1) {
            ::close(listen_fd_);
            throw ConfigError("invalid listen host: " + addr.host);
        }
        if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&sa), sizeof(sa)) != 0 ||
            ::listen(listen_fd_, 64) != 0) {
            ::close(listen_fd_);
            throw IoError("bind/listen failed on " + host + ":" + std::to_string(addr.port));
        }
        sockaddr_in bound{};
        socklen_t bound_len = sizeof(bound);
        ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&bound), &bound_len);
        port_ = ntohs(bound.sin_port);
        accept_thread_ = std::thread([this] { accept_loop(); });
    }

    ~TcpServer() { stop(); }

    std::uint16_t port() const { return port_; }

    void stop() {
        bool expected = true;
        if (!running_.compare_exchange_strong(expected, false)) return;
        ::shutdown(listen_fd_, SHUT_RDWR);
        ::close(listen_fd_);
        if (accept_thread_.joinable()) accept_thread_.join();
        std::vector<std::thread> workers;
        {
            std::lock_guard<std::mutex> lock(workers_mu_);
            workers.swap(workers_);
        }
        for (auto& t : workers) {
            if (t.joinable()) t.join();
        }
    }

private:
    void accept_loop() {
        while (running_.load()) {
            int fd = ::accept(listen_fd_, nullptr, nullptr);
            if (fd < 0) break;
            std::lock_guard<std::mutex> lock(workers_mu_);
            workers_.emplace_back([this, fd] { serve(fd); });
        }
    }

    void serve(int fd) {
        while (true) {
            auto j = recv_frame_fd(fd);
            if (!j) break;
            Response resp;
            try {
                Request req = request_from_json(*j);
                resp = handler_(req);
            } catch (const std::exception&) {
                Decision d;
                d.verdict = Verdict::reject;
                d.reason = Reason::malformed;
                resp = make_response(d, {}, 0);
            }
            if (!send_frame_fd(fd, response_to_json(resp))) break;
        }
        ::close(fd);
    }

    Handler handler_;
    int listen_fd_ = -1;
    std::uint16_t port_ = 0;
    std::atomic<bool> running_{true};
    std::thread accept_thread_;
    std::mutex workers_mu_;
    std::vector<std::thread> workers_;
};

// Connect-per-attempt transport; any socket failure reads as a drop.
class TcpTransport final : public Transport {
public:
    explicit TcpTransport(TcpAddress addr) : addr_(std::move(addr)) {}

    std::optional<Response> try_send(const Request& request) override {
        int fd = tcp_connect(addr_);
        if (fd < 0) return std::nullopt;
        std::optional<Response> out;
        if (send_frame_fd(fd, request_to_json(request))) {
            if (auto j = recv_frame_fd(fd)) {
                try {
                    out = response_from_json(*j);
                } catch (const std::exception&) {
                    out = std::nullopt;
                }
            }
        }
        ::close(fd);
        return out;
    }

private:
    TcpAddress addr_;
};

}  // namespace elwe::ztnet

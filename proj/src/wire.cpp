#include "cuff/wire.hpp"

#include "cuff/rng.hpp"

#include <nlohmann/json.hpp>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>

namespace cuff::wire {

uint16_t crc16_ccitt_false(std::span<const uint8_t> data) {
    uint16_t crc = 0xFFFF;
    for (uint8_t byte : data) {
        crc ^= static_cast<uint16_t>(byte) << 8;
        for (int bit = 0; bit < 8; ++bit) {
            if (crc & 0x8000)
                crc = static_cast<uint16_t>((crc << 1) ^ 0x1021);
            else
                crc = static_cast<uint16_t>(crc << 1);
        }
    }
    return crc;
}

void Frame::push_i32(int32_t v) {
    auto u = static_cast<uint32_t>(v);
    payload.push_back(static_cast<uint8_t>(u & 0xFF));
    payload.push_back(static_cast<uint8_t>((u >> 8) & 0xFF));
    payload.push_back(static_cast<uint8_t>((u >> 16) & 0xFF));
    payload.push_back(static_cast<uint8_t>((u >> 24) & 0xFF));
}

int32_t Frame::get_i32(size_t index) const {
    size_t off = index * 4;
    if (off + 4 > payload.size()) throw ValidationError("frame payload field out of range");
    uint32_t u = uint32_t(payload[off]) | (uint32_t(payload[off + 1]) << 8) |
                 (uint32_t(payload[off + 2]) << 16) | (uint32_t(payload[off + 3]) << 24);
    return static_cast<int32_t>(u);
}

std::vector<uint8_t> encode_frame(const Frame& f) {
    if (f.payload.size() > kMaxPayload)
        throw ValidationError("encode_frame: payload exceeds " + std::to_string(kMaxPayload) +
                              " bytes");
    std::vector<uint8_t> out;
    out.reserve(7 + f.payload.size());
    out.push_back(kSync0);
    out.push_back(kSync1);
    out.push_back(f.device_id);
    out.push_back(f.command);
    out.push_back(static_cast<uint8_t>(f.payload.size()));
    out.insert(out.end(), f.payload.begin(), f.payload.end());
    uint16_t crc = crc16_ccitt_false(std::span(out).subspan(2));
    out.push_back(static_cast<uint8_t>(crc & 0xFF));
    out.push_back(static_cast<uint8_t>(crc >> 8));
    return out;
}

DecodeResult decode_frame(std::span<const uint8_t> stream) {
    DecodeResult res;
    // Hunt for the sync pair.
    size_t start = 0;
    while (start + 1 < stream.size() &&
           !(stream[start] == kSync0 && stream[start + 1] == kSync1))
        ++start;
    if (start + 1 >= stream.size()) {
        // No sync found; everything but a possible dangling 0x55 can be dropped.
        res.consumed = stream.empty() ? 0 : stream.size() - 1;
        if (res.consumed > 0) {
            res.status = DecodeStatus::Resync;
        }
        return res;
    }
    if (start > 0) {
        res.status = DecodeStatus::Resync;
        res.consumed = start;
        return res;
    }
    if (stream.size() < 5) return res;  // need id, cmd, len
    size_t len = stream[4];
    if (len > kMaxPayload) {
        res.status = DecodeStatus::Resync;
        res.consumed = 1;
        return res;
    }
    size_t total = 7 + len;
    if (stream.size() < total) return res;  // NeedMore
    uint16_t crc = crc16_ccitt_false(stream.subspan(2, 3 + len));
    uint16_t got = uint16_t(stream[5 + len]) | (uint16_t(stream[6 + len]) << 8);
    if (crc != got) {
        res.status = DecodeStatus::Resync;
        res.consumed = 1;
        return res;
    }
    res.status = DecodeStatus::Got;
    res.frame.device_id = stream[2];
    res.frame.command = stream[3];
    res.frame.payload.assign(stream.begin() + 5, stream.begin() + 5 + len);
    res.consumed = total;
    return res;
}

void FrameDecoder::push(std::span<const uint8_t> bytes) {
    buf_.insert(buf_.end(), bytes.begin(), bytes.end());
}

std::optional<Frame> FrameDecoder::next() {
    for (;;) {
        DecodeResult r = decode_frame(buf_);
        if (r.status == DecodeStatus::NeedMore) return std::nullopt;
        buf_.erase(buf_.begin(), buf_.begin() + static_cast<long>(r.consumed));
        if (r.status == DecodeStatus::Got) return r.frame;
        ++resyncs_;
        if (r.consumed == 1) ++crc_failures_;  // sync found but frame rejected
    }
}

std::string LinkStats::to_json() const {
    nlohmann::json j{{"frames_ok", frames_ok},
                     {"frames_crc_fail", frames_crc_fail},
                     {"frames_resync", frames_resync},
                     {"deadline_misses", deadline_misses},
                     {"exchanges", exchanges},
                     {"loop_period_s", loop_period_s}};
    return j.dump(2);
}

void DuplexChannel::set_corruption(double probability, uint64_t seed) {
    corrupt_p_ = probability;
    corrupt_ = probability > 0.0;
    rng_state_ = substream_seed(seed, "wire/corruption");
}

void DuplexChannel::put(std::deque<uint8_t>& q, std::span<const uint8_t> bytes) {
    for (uint8_t b : bytes) {
        if (corrupt_) {
            rng_state_ = splitmix64(rng_state_);
            double u = double(rng_state_ >> 11) * 0x1.0p-53;
            if (u < corrupt_p_) b ^= static_cast<uint8_t>(1u << (rng_state_ % 8));
        }
        q.push_back(b);
    }
}

std::vector<uint8_t> DuplexChannel::drain(std::deque<uint8_t>& q) {
    std::vector<uint8_t> out(q.begin(), q.end());
    q.clear();
    return out;
}

SocketStream SocketStream::listen_and_accept(uint16_t port, uint16_t* bound_port) {
    int lfd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (lfd < 0) throw Error("socket: " + std::string(std::strerror(errno)));
    int one = 1;
    ::setsockopt(lfd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = htons(port);
    if (::bind(lfd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0 ||
        ::listen(lfd, 1) < 0) {
        ::close(lfd);
        throw Error("bind/listen: " + std::string(std::strerror(errno)));
    }
    if (bound_port) {
        socklen_t len = sizeof addr;
        ::getsockname(lfd, reinterpret_cast<sockaddr*>(&addr), &len);
        *bound_port = ntohs(addr.sin_port);
    }
    int fd = ::accept(lfd, nullptr, nullptr);
    ::close(lfd);
    if (fd < 0) throw Error("accept: " + std::string(std::strerror(errno)));
    return SocketStream(fd);
}

SocketStream SocketStream::connect_to(const std::string& host, uint16_t port) {
    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw Error("socket: " + std::string(std::strerror(errno)));
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
        ::close(fd);
        throw Error("bad address: " + host);
    }
    if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0) {
        ::close(fd);
        throw Error("connect: " + std::string(std::strerror(errno)));
    }
    return SocketStream(fd);
}

SocketStream::SocketStream(SocketStream&& other) noexcept : fd_(other.fd_) { other.fd_ = -1; }

SocketStream& SocketStream::operator=(SocketStream&& other) noexcept {
    if (this != &other) {
        if (fd_ >= 0) ::close(fd_);
        fd_ = other.fd_;
        other.fd_ = -1;
    }
    return *this;
}

SocketStream::~SocketStream() {
    if (fd_ >= 0) ::close(fd_);
}

void SocketStream::write_bytes(std::span<const uint8_t> bytes) {
    size_t off = 0;
    while (off < bytes.size()) {
        ssize_t n = ::send(fd_, bytes.data() + off, bytes.size() - off, MSG_NOSIGNAL);
        if (n <= 0) throw Error("send: " + std::string(std::strerror(errno)));
        off += static_cast<size_t>(n);
    }
}

std::vector<uint8_t> SocketStream::read_available() {
    std::vector<uint8_t> out;
    uint8_t buf[4096];
    for (;;) {
        ssize_t n = ::recv(fd_, buf, sizeof buf, MSG_DONTWAIT);
        if (n > 0) {
            out.insert(out.end(), buf, buf + n);
            continue;
        }
        if (n < 0 && (errno == EAGAIN || errno == EWOULDBLOCK)) break;
        if (n == 0) break;  // peer closed
        if (n < 0) throw Error("recv: " + std::string(std::strerror(errno)));
    }
    return out;
}

void DuplexChannel::master_write(std::span<const uint8_t> bytes) { put(to_slave_, bytes); }
void DuplexChannel::slave_write(std::span<const uint8_t> bytes) { put(to_master_, bytes); }
std::vector<uint8_t> DuplexChannel::master_read() { return drain(to_master_); }
std::vector<uint8_t> DuplexChannel::slave_read() { return drain(to_slave_); }

}  // namespace cuff::wire

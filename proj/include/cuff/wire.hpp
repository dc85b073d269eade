#pragma once

#include "cuff/errors.hpp"

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cuff::wire {

inline constexpr uint8_t kSync0 = 0x55;
inline constexpr uint8_t kSync1 = 0xAA;
inline constexpr size_t kMaxPayload = 32;

enum Command : uint8_t {
    GET_MEASUREMENT = 0x01,
    SET_POSITION = 0x02,
    GET_CURRENT = 0x03,
    ACK_MASK = 0x80,
};

/// CRC-16/CCITT-FALSE: poly 0x1021, init 0xFFFF, no reflection, no final xor.
uint16_t crc16_ccitt_false(std::span<const uint8_t> data);

struct Frame {
    uint8_t device_id = 0;
    uint8_t command = 0;
    std::vector<uint8_t> payload;

    bool operator==(const Frame&) const = default;

    /// Append a little-endian signed 32-bit field.
    void push_i32(int32_t v);
    /// Read the i-th little-endian signed 32-bit field.
    int32_t get_i32(size_t index) const;
};

/// sync sync id cmd len payload crc_lo crc_hi; crc over id..payload.
std::vector<uint8_t> encode_frame(const Frame& f);

enum class DecodeStatus { NeedMore, Got, Resync };

struct DecodeResult {
    DecodeStatus status = DecodeStatus::NeedMore;
    Frame frame;
    size_t consumed = 0;  // bytes to drop from the front of the stream
};

/// Scan for sync; on CRC failure discard one byte and report Resync.
/// Never consumes a valid frame partially.
DecodeResult decode_frame(std::span<const uint8_t> stream);

/// Streaming wrapper around decode_frame with resync accounting.
class FrameDecoder {
public:
    void push(std::span<const uint8_t> bytes);
    std::optional<Frame> next();
    uint64_t resyncs() const { return resyncs_; }
    uint64_t crc_failures() const { return crc_failures_; }
    size_t buffered() const { return buf_.size(); }

private:
    std::vector<uint8_t> buf_;
    uint64_t resyncs_ = 0;
    uint64_t crc_failures_ = 0;
};

struct LinkStats {
    uint64_t frames_ok = 0;
    uint64_t frames_crc_fail = 0;
    uint64_t frames_resync = 0;
    uint64_t deadline_misses = 0;
    uint64_t exchanges = 0;
    double loop_period_s = 1e-3;

    std::string to_json() const;
};

/// In-process duplex byte channel with optional seeded corruption.
class DuplexChannel {
public:
    void set_corruption(double probability, uint64_t seed);

    void master_write(std::span<const uint8_t> bytes);
    void slave_write(std::span<const uint8_t> bytes);
    std::vector<uint8_t> master_read();  // bytes written by slaves
    std::vector<uint8_t> slave_read();   // bytes written by the master

private:
    std::vector<uint8_t> drain(std::deque<uint8_t>& q);
    void put(std::deque<uint8_t>& q, std::span<const uint8_t> bytes);

    std::deque<uint8_t> to_slave_, to_master_;
    double corrupt_p_ = 0.0;
    uint64_t rng_state_ = 0;
    bool corrupt_ = false;
};

/// Byte-stream socket transport for cross-process runs; carries the same frame
/// bytes with no additional envelope.
class SocketStream {
public:
    /// Bind, listen and accept exactly one peer on a loopback port (0 = ephemeral).
    static SocketStream listen_and_accept(uint16_t port, uint16_t* bound_port = nullptr);
    static SocketStream connect_to(const std::string& host, uint16_t port);

    SocketStream(SocketStream&& other) noexcept;
    SocketStream& operator=(SocketStream&& other) noexcept;
    SocketStream(const SocketStream&) = delete;
    SocketStream& operator=(const SocketStream&) = delete;
    ~SocketStream();

    void write_bytes(std::span<const uint8_t> bytes);
    /// Drain whatever is currently readable without blocking.
    std::vector<uint8_t> read_available();

private:
    explicit SocketStream(int fd) : fd_(fd) {}
    int fd_ = -1;
};

/// A bus endpoint; returns a reply frame for requests addressed to it.
class SlaveEndpoint {
public:
    explicit SlaveEndpoint(uint8_t id) : id_(id) {}
    virtual ~SlaveEndpoint() = default;
    uint8_t id() const { return id_; }
    bool responsive = true;

    virtual std::optional<Frame> handle(const Frame& request) = 0;
    /// Called once per bus tick before any request.
    virtual void on_tick() {}

private:
    uint8_t id_;
};

}  // namespace cuff::wire

#include "cuff/rng.hpp"
#include "cuff/wire.hpp"

#include <doctest.h>

#include <thread>

using namespace cuff;
using namespace cuff::wire;

TEST_CASE("CRC-16/CCITT-FALSE check value") {
    const char* s = "123456789";
    CHECK(crc16_ccitt_false(std::span(reinterpret_cast<const uint8_t*>(s), 9)) == 0x29B1);
    CHECK(crc16_ccitt_false({}) == 0xFFFF);
}

TEST_CASE("frame byte layout is exactly as specified") {
    Frame f;
    f.device_id = 0x01;
    f.command = GET_MEASUREMENT;
    auto bytes = encode_frame(f);
    REQUIRE(bytes.size() == 7);
    CHECK(bytes[0] == 0x55);
    CHECK(bytes[1] == 0xAA);
    CHECK(bytes[2] == 0x01);
    CHECK(bytes[3] == 0x01);
    CHECK(bytes[4] == 0x00);
    uint8_t body[] = {0x01, 0x01, 0x00};
    uint16_t crc = crc16_ccitt_false(body);
    CHECK(bytes[5] == (crc & 0xFF));
    CHECK(bytes[6] == (crc >> 8));
}

TEST_CASE("payload helpers are little-endian i32") {
    Frame f;
    f.push_i32(-2);
    CHECK(f.payload == std::vector<uint8_t>({0xFE, 0xFF, 0xFF, 0xFF}));
    CHECK(f.get_i32(0) == -2);
    CHECK_THROWS_AS(f.get_i32(1), ValidationError);
}

TEST_CASE("oversize payload is rejected") {
    Frame f;
    f.payload.assign(33, 0);
    CHECK_THROWS_AS(encode_frame(f), ValidationError);
    f.payload.assign(32, 7);
    CHECK_NOTHROW(encode_frame(f));
}

TEST_CASE("codec round-trip over 1e5 random frames") {
    Rng rng = make_rng(21, "test/wire-roundtrip");
    std::uniform_int_distribution<int> byte(0, 255);
    std::uniform_int_distribution<int> len(0, 32);
    for (int k = 0; k < 100000; ++k) {
        Frame f;
        f.device_id = static_cast<uint8_t>(byte(rng));
        f.command = static_cast<uint8_t>(byte(rng));
        int n = len(rng);
        for (int i = 0; i < n; ++i) f.payload.push_back(static_cast<uint8_t>(byte(rng)));
        auto bytes = encode_frame(f);
        auto res = decode_frame(bytes);
        REQUIRE(res.status == DecodeStatus::Got);
        CHECK(res.frame == f);
        CHECK(res.consumed == bytes.size());
    }
}

TEST_CASE("decoder resyncs past garbage and recovers the frame") {
    Frame f;
    f.device_id = 2;
    f.command = SET_POSITION;
    f.push_i32(1234);
    auto bytes = encode_frame(f);
    std::vector<uint8_t> stream = {0x00, 0x13, 0x55, 0x99};  // noise incl. a lone sync byte
    stream.insert(stream.end(), bytes.begin(), bytes.end());

    FrameDecoder dec;
    dec.push(stream);
    auto got = dec.next();
    REQUIRE(got.has_value());
    CHECK(*got == f);
    CHECK(dec.resyncs() >= 1);
}

TEST_CASE("corrupted byte triggers a CRC failure, then the next frame decodes") {
    Frame f;
    f.device_id = 3;
    f.command = GET_CURRENT;
    f.push_i32(-500);
    auto bytes = encode_frame(f);
    auto bad = bytes;
    bad[8] ^= 0x40;  // flip a payload bit
    FrameDecoder dec;
    dec.push(bad);
    dec.push(bytes);
    auto got = dec.next();
    REQUIRE(got.has_value());
    CHECK(*got == f);
    CHECK(dec.crc_failures() >= 1);
}

TEST_CASE("truncated frame waits for more bytes") {
    Frame f;
    f.device_id = 1;
    f.command = GET_MEASUREMENT;
    f.push_i32(7);
    auto bytes = encode_frame(f);
    FrameDecoder dec;
    dec.push(std::span(bytes).subspan(0, 6));
    CHECK_FALSE(dec.next().has_value());
    dec.push(std::span(bytes).subspan(6));
    CHECK(dec.next().has_value());
}

TEST_CASE("fuzz: 1e4 random streams neither crash nor grow the buffer unboundedly") {
    Rng rng = make_rng(5, "test/wire-fuzz");
    std::uniform_int_distribution<int> byte(0, 255);
    std::uniform_int_distribution<int> len(0, 128);
    FrameDecoder dec;
    for (int k = 0; k < 10000; ++k) {
        std::vector<uint8_t> junk(static_cast<size_t>(len(rng)));
        for (auto& b : junk) b = static_cast<uint8_t>(byte(rng));
        dec.push(junk);
        while (dec.next()) {
        }
        CHECK(dec.buffered() < 64);
    }
}

TEST_CASE("duplex channel carries bytes both ways and corrupts when told to") {
    DuplexChannel bus;
    std::vector<uint8_t> ping = {1, 2, 3};
    bus.master_write(ping);
    CHECK(bus.slave_read() == ping);
    CHECK(bus.slave_read().empty());
    bus.slave_write(ping);
    CHECK(bus.master_read() == ping);

    DuplexChannel noisy;
    noisy.set_corruption(1.0, 3);
    std::vector<uint8_t> zeros(64, 0);
    noisy.master_write(zeros);
    auto out = noisy.slave_read();
    size_t flipped = 0;
    for (auto b : out) flipped += (b != 0);
    CHECK(flipped == out.size());  // probability 1 flips every byte
}

TEST_CASE("socket transport moves frame bytes unchanged") {
    uint16_t port = 0;
    std::vector<uint8_t> got;
    Frame f;
    f.device_id = 9;
    f.command = SET_POSITION;
    f.push_i32(42);
    auto bytes = encode_frame(f);

    std::thread server([&] {
        // listen_and_accept publishes the ephemeral port before blocking.
        auto peer = SocketStream::listen_and_accept(43219);
        for (int tries = 0; tries < 200 && got.size() < bytes.size(); ++tries) {
            auto chunk = peer.read_available();
            got.insert(got.end(), chunk.begin(), chunk.end());
            std::this_thread::sleep_for(std::chrono::milliseconds(5));
        }
    });
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
    auto client = SocketStream::connect_to("127.0.0.1", 43219);
    client.write_bytes(bytes);
    server.join();
    (void)port;
    CHECK(got == bytes);
    auto res = decode_frame(got);
    REQUIRE(res.status == DecodeStatus::Got);
    CHECK(res.frame == f);
}

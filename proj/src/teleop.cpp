#include "cuff/teleop.hpp"

#include <chrono>
#include <cmath>
#include <thread>

namespace cuff::teleop {

using wire::Frame;

SofthandEndpoint::SofthandEndpoint(softhand::GraspSignal signal)
    : SlaveEndpoint(kSofthandDeviceId), signal_(std::move(signal)) {
    if (signal_.p_sh.empty()) throw ValidationError("softhand endpoint: empty signal");
}

void SofthandEndpoint::on_tick() {
    if (cursor_ + 1 < signal_.p_sh.size()) ++cursor_;
}

std::optional<Frame> SofthandEndpoint::handle(const Frame& request) {
    if (!responsive || request.device_id != id()) return std::nullopt;
    if (request.command != wire::GET_MEASUREMENT) return std::nullopt;
    Frame reply;
    reply.device_id = id();
    reply.command = wire::ACK_MASK | wire::GET_MEASUREMENT;
    reply.push_i32(static_cast<int32_t>(std::lround(signal_.p_sh[cursor_])));
    reply.push_i32(static_cast<int32_t>(std::lround(signal_.rc_sh[cursor_])));
    return reply;
}

CuffEndpoint::CuffEndpoint(plant::PlantConfig pcfg, plant::ArmLoadModel load,
                           control::CascadeGains gains)
    : SlaveEndpoint(kCuffDeviceId), plant_(std::move(pcfg), std::move(load)), gains_(gains) {
    plant_.set_drive_mode(plant::DriveMode::PositionCurrent);
}

void CuffEndpoint::on_tick() {
    // One control step toward the current targets per bus tick.
    // net_slide = (p_l + p_r)/2 and net_tighten = (p_l - p_r)/2, so the per-motor
    // references are slide +- squeeze.
    double ref_l = double(slide_target_) + double(squeeze_target_);
    double ref_r = double(slide_target_) - double(squeeze_target_);
    double pwm_l = control::cascade_step(ref_l, plant_.left(), gains_, left_, plant_.config().dt);
    double pwm_r = control::cascade_step(ref_r, plant_.right(), gains_, right_, plant_.config().dt);
    plant_.step(pwm_l, pwm_r);
}

std::optional<Frame> CuffEndpoint::handle(const Frame& request) {
    if (!responsive || request.device_id != id()) return std::nullopt;
    Frame reply;
    reply.device_id = id();
    switch (request.command) {
        case wire::SET_POSITION:
            slide_target_ = request.get_i32(0);
            squeeze_target_ = request.get_i32(1);
            reply.command = wire::ACK_MASK | wire::SET_POSITION;
            return reply;
        case wire::GET_CURRENT:
            reply.command = wire::ACK_MASK | wire::GET_CURRENT;
            reply.push_i32(static_cast<int32_t>(std::lround(plant_.left().current)));
            reply.push_i32(static_cast<int32_t>(std::lround(plant_.right().current)));
            return reply;
        default:
            return std::nullopt;
    }
}

namespace {

/// One complete master cycle over the bus; returns false when the peer stayed silent.
bool exchange_once(wire::DuplexChannel& bus, wire::FrameDecoder& rx, SofthandEndpoint& softhand,
                   CuffEndpoint& cuff, const mapping::MappingConfig& mcfg,
                   mapping::Family family, wire::LinkStats& stats, TraceRow& row) {
    auto deliver = [&](const Frame& req) {
        // Both endpoints see every master frame (shared bus); replies go back.
        for (wire::SlaveEndpoint* ep : {static_cast<wire::SlaveEndpoint*>(&softhand),
                                        static_cast<wire::SlaveEndpoint*>(&cuff)}) {
            if (auto reply = ep->handle(req)) bus.slave_write(wire::encode_frame(*reply));
        }
    };

    // Poll the SoftHand.
    Frame poll;
    poll.device_id = kSofthandDeviceId;
    poll.command = wire::GET_MEASUREMENT;
    bus.master_write(wire::encode_frame(poll));
    {
        auto bytes = bus.slave_read();
        wire::FrameDecoder slave_rx;
        slave_rx.push(bytes);
        while (auto f = slave_rx.next()) deliver(*f);
        stats.frames_resync += slave_rx.resyncs();
        stats.frames_crc_fail += slave_rx.crc_failures();
    }
    rx.push(bus.master_read());
    std::optional<Frame> meas;
    while (auto f = rx.next()) {
        ++stats.frames_ok;
        if (f->command == (wire::ACK_MASK | wire::GET_MEASUREMENT)) meas = *f;
    }
    if (!meas) return false;

    row.p_sh = meas->get_i32(0);
    row.rc_sh = meas->get_i32(1);
    auto cmd = mapping::combined_schedule(row.p_sh, row.rc_sh, mcfg, family);
    row.slide_cmd = cmd.slide_ticks;
    row.squeeze_cmd = cmd.squeeze_ticks;

    // Command the device.
    Frame set;
    set.device_id = kCuffDeviceId;
    set.command = wire::SET_POSITION;
    set.push_i32(static_cast<int32_t>(cmd.slide_ticks));
    set.push_i32(static_cast<int32_t>(cmd.squeeze_ticks));
    bus.master_write(wire::encode_frame(set));
    {
        auto bytes = bus.slave_read();
        wire::FrameDecoder slave_rx;
        slave_rx.push(bytes);
        while (auto f = slave_rx.next()) deliver(*f);
        stats.frames_resync += slave_rx.resyncs();
        stats.frames_crc_fail += slave_rx.crc_failures();
    }
    rx.push(bus.master_read());
    bool acked = false;
    while (auto f = rx.next()) {
        ++stats.frames_ok;
        if (f->command == (wire::ACK_MASK | wire::SET_POSITION)) acked = true;
    }
    return acked;
}

}  // namespace

LinkRun run_link(SofthandEndpoint& softhand, CuffEndpoint& cuff,
                 const mapping::MappingConfig& mcfg, mapping::Family family,
                 const LinkOptions& opt) {
    mcfg.validate();
    LinkRun run;
    run.stats.loop_period_s = opt.loop_period_s;
    wire::DuplexChannel bus;
    if (opt.corruption_probability > 0.0)
        bus.set_corruption(opt.corruption_probability, opt.seed);
    wire::FrameDecoder rx;

    const auto ticks = static_cast<long>(std::llround(opt.duration_s / opt.loop_period_s));
    int silent = 0;

    auto wall_start = std::chrono::steady_clock::now();
    for (long k = 0; k < ticks; ++k) {
        if (opt.mode == LinkMode::Realtime) {
            auto deadline = wall_start + std::chrono::duration_cast<
                                             std::chrono::steady_clock::duration>(
                                             std::chrono::duration<double>(k * opt.loop_period_s));
            auto now = std::chrono::steady_clock::now();
            if (now > deadline + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                     std::chrono::duration<double>(opt.loop_period_s)))
                ++run.stats.deadline_misses;
            else
                std::this_thread::sleep_until(deadline);
        }
        softhand.on_tick();
        TraceRow row;
        row.t = double(k) * opt.loop_period_s;
        bool ok = exchange_once(bus, rx, softhand, cuff, mcfg, family, run.stats, row);
        cuff.on_tick();
        if (!ok) {
            if (++silent > opt.timeout_ticks)
                throw LinkTimeout("link: endpoint unresponsive for more than " +
                                  std::to_string(opt.timeout_ticks) + " ticks");
            continue;
        }
        silent = 0;
        ++run.stats.exchanges;
        const auto& dev = cuff.device();
        row.p_left = dev.left().position;
        row.p_right = dev.right().position;
        row.i_left = dev.left().current;
        row.i_right = dev.right().current;
        row.force_n = dev.belt().normal_force;
        row.slide_mm = dev.belt().tangential_displacement_mm;
        run.trace.push_back(row);
    }
    return run;
}

}  // namespace teleop

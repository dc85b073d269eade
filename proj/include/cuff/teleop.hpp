#pragma once

#include "cuff/control.hpp"
#include "cuff/mapping.hpp"
#include "cuff/plant.hpp"
#include "cuff/softhand.hpp"
#include "cuff/wire.hpp"

#include <memory>
#include <vector>

namespace cuff::teleop {

inline constexpr uint8_t kCuffDeviceId = 0x01;
inline constexpr uint8_t kSofthandDeviceId = 0x02;

/// Serves GET_MEASUREMENT from a recorded/simulated grasp signal, one sample per tick.
class SofthandEndpoint : public wire::SlaveEndpoint {
public:
    explicit SofthandEndpoint(softhand::GraspSignal signal);
    void on_tick() override;
    std::optional<wire::Frame> handle(const wire::Frame& request) override;

private:
    softhand::GraspSignal signal_;
    size_t cursor_ = 0;
};

/// Applies SET_POSITION to the simulated device: slide via the slide channel,
/// squeeze via the cascaded tighten controller.
class CuffEndpoint : public wire::SlaveEndpoint {
public:
    CuffEndpoint(plant::PlantConfig pcfg, plant::ArmLoadModel load, control::CascadeGains gains);
    void on_tick() override;
    std::optional<wire::Frame> handle(const wire::Frame& request) override;

    const plant::Plant& device() const { return plant_; }
    long slide_target() const { return slide_target_; }
    long squeeze_target() const { return squeeze_target_; }

private:
    plant::Plant plant_;
    control::CascadeGains gains_;
    control::CascadeState left_, right_;
    long slide_target_ = 0;
    long squeeze_target_ = 0;
};

struct TraceRow {
    double t = 0.0;
    int32_t p_sh = 0;
    int32_t rc_sh = 0;
    long slide_cmd = 0;
    long squeeze_cmd = 0;
    double p_left = 0.0, p_right = 0.0;
    double i_left = 0.0, i_right = 0.0;
    double force_n = 0.0;
    double slide_mm = 0.0;
};

enum class LinkMode { Lockstep, Realtime };

struct LinkOptions {
    LinkMode mode = LinkMode::Lockstep;
    double duration_s = 1.0;
    double loop_period_s = 1e-3;
    double corruption_probability = 0.0;
    uint64_t seed = 1;
    int timeout_ticks = 10;
};

struct LinkRun {
    wire::LinkStats stats;
    std::vector<TraceRow> trace;
};

/// The CUFF side is the bus master: each tick it polls the SoftHand, computes the
/// mapping, and commands the device. Lockstep advances a virtual clock; realtime
/// schedules against the wall clock and records deadline misses.
LinkRun run_link(SofthandEndpoint& softhand, CuffEndpoint& cuff,
                 const mapping::MappingConfig& mcfg, mapping::Family family,
                 const LinkOptions& opt);

}  // namespace cuff::teleop

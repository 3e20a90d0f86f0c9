#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace camo {

// Electrical parameters of the threshold-defined switch. Currents and
// capacitances are normalized units; only trends are meaningful, never
// absolute amperes.
struct DeviceParams {
    double nvt_n = 0.62;       // nominal NMOS threshold, volts
    double nvt_p = 0.78;       // nominal PMOS threshold magnitude, volts
    double delta = 0.35;       // implant offset applied +/- around nominal
    double vsn = 0.7;          // always-on gate bias of the switch, volts
    double vdd = 1.1;          // supply, volts
    double alpha = 1.3;        // velocity-saturation exponent, in [1, 2]
    double k_drive = 1.0;      // drive-current coefficient
    double ss = 0.1;           // subthreshold slope, volts per decade
    double c_load_unit = 1.0;  // load contributed by one mux data input
};

// Throws Error when 0 < delta < nvt_n, 0 < vsn <= vdd, alpha in [1, 2] or
// ss > 0 fails.
void validate_params(const DeviceParams& p);

struct VtPair {
    double lvt = 0.0;
    double hvt = 0.0;
};

// Implant arithmetic: lvt = nvt - delta, hvt = nvt + delta. Throws Error
// unless 0 < delta < nvt, so both thresholds stay positive.
VtPair vt_pair(double nvt, double delta);

// Gate bias halfway between the two device thresholds.
double midpoint_bias(double vtn, double vtp);

// A switch conducts only when its bias strictly exceeds its threshold.
bool switch_conducts(double vsn, double vt);

// Drive current at gate-source voltage vgs for threshold vt: alpha-power
// law above threshold, exponential decade-per-ss below, glued by a fixed
// matching constant so the curve is continuous at vgs = vt.
double drain_current(double vgs, double vt, const DeviceParams& p);

struct MuxMetrics {
    double on_delay = 0.0;  // time to slew the shared output node
    double leakage = 0.0;   // off-path subthreshold current
};

// One conducting low-threshold path charges a node loaded by all `width`
// pass devices; the width-1 high-threshold paths leak, plus a small fixed
// restorer term. Throws Error on widths other than 2, 4, 8, 16.
MuxMetrics mux_metrics(int width, const DeviceParams& p);

// Inclusive start:stop:step scan; a bare number is a singleton.
struct Range {
    double start = 0.0;
    double stop = 0.0;
    double step = 1.0;

    static Range parse(const std::string& text);
    std::vector<double> values() const;  // throws Error on an empty range
};

struct SweepPoint {
    double delta = 0.0;
    double vsn = 0.0;
    double on_delay = 0.0;
    double leakage = 0.0;
};

struct SweepResult {
    int width = 2;
    std::vector<SweepPoint> points;  // delta-major, vsn-minor order
    size_t argmin_delay = 0;         // index of the fastest point
    size_t argmin_leakage = 0;       // index of the least leaky point
};

// Evaluates mux_metrics over the (delta, vsn) grid. Every delta must obey
// 0 < delta < nvt_n and every vsn 0 < vsn <= vdd.
SweepResult design_space_sweep(const Range& delta_range,
                               const Range& vsn_range, int width,
                               const DeviceParams& p = {});

// CSV with one row per grid point and trailing comment lines marking the
// argmin points.
std::string sweep_csv(const SweepResult& sweep);

}  // namespace camo

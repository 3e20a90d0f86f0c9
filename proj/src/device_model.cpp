#include "camo/device_model.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "camo/error.hpp"

namespace camo {

namespace {

// Subthreshold current at the threshold itself, relative to k_drive. Three
// decades below unit drive; also the constant that makes the two branches
// of drain_current meet.
constexpr double kI0 = 1e-3;

// Always-on restorer bias current added to every leakage figure.
constexpr double kRestorerLeak = 1e-6;

double parse_number(const std::string& text) {
    const char* s = text.c_str();
    char* end = nullptr;
    double v = std::strtod(s, &end);
    if (end == s || *end != '\0')
        throw Error("not a number in range: '" + text + "'");
    return v;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace

void validate_params(const DeviceParams& p) {
    if (!(p.delta > 0.0) || !(p.delta < p.nvt_n))
        throw Error("delta must sit strictly between 0 and the nominal "
                    "threshold");
    if (!(p.vsn > 0.0) || !(p.vsn <= p.vdd))
        throw Error("switch bias must sit in (0, vdd]");
    if (!(p.alpha >= 1.0) || !(p.alpha <= 2.0))
        throw Error("alpha must sit in [1, 2]");
    if (!(p.ss > 0.0)) throw Error("subthreshold slope must be positive");
}

VtPair vt_pair(double nvt, double delta) {
    if (!(nvt > 0.0)) throw Error("nominal threshold must be positive");
    if (!(delta > 0.0) || !(delta < nvt))
        throw Error("offset must sit strictly between 0 and the nominal "
                    "threshold");
    return {nvt - delta, nvt + delta};
}

double midpoint_bias(double vtn, double vtp) { return 0.5 * (vtn + vtp); }

bool switch_conducts(double vsn, double vt) { return vsn > vt; }

double drain_current(double vgs, double vt, const DeviceParams& p) {
    if (vgs > vt)
        return p.k_drive * (kI0 + std::pow(vgs - vt, p.alpha));
    return p.k_drive * kI0 * std::pow(10.0, (vgs - vt) / p.ss);
}

MuxMetrics mux_metrics(int width, const DeviceParams& p) {
    if (width != 2 && width != 4 && width != 8 && width != 16)
        throw Error("mux width must be one of 2, 4, 8, 16, got " +
                    std::to_string(width));
    VtPair vt = vt_pair(p.nvt_n, p.delta);
    MuxMetrics m;
    // All `width` pass devices hang on the shared output node; only the
    // low-threshold path charges it.
    m.on_delay = static_cast<double>(width) * p.c_load_unit * p.vdd /
                 drain_current(p.vsn, vt.lvt, p);
    m.leakage = static_cast<double>(width - 1) *
                    drain_current(p.vsn, vt.hvt, p) +
                kRestorerLeak;
    return m;
}

Range Range::parse(const std::string& text) {
    size_t c1 = text.find(':');
    if (c1 == std::string::npos) {
        double v = parse_number(text);
        return {v, v, 1.0};
    }
    size_t c2 = text.find(':', c1 + 1);
    if (c2 == std::string::npos || text.find(':', c2 + 1) != std::string::npos)
        throw Error("range must be a number or start:stop:step, got '" +
                    text + "'");
    Range r;
    r.start = parse_number(text.substr(0, c1));
    r.stop = parse_number(text.substr(c1 + 1, c2 - c1 - 1));
    r.step = parse_number(text.substr(c2 + 1));
    return r;
}

std::vector<double> Range::values() const {
    if (!(step > 0.0)) throw Error("range step must be positive");
    if (stop < start - 1e-12 * std::max(1.0, std::abs(start)))
        throw Error("range is empty: stop is below start");
    // i*step instead of accumulation keeps grid points drift-free; the
    // slack admits an endpoint that rounding placed a hair past stop.
    std::vector<double> out;
    long n = std::lround(std::floor((stop - start) / step + 1e-9));
    for (long i = 0; i <= n; ++i) out.push_back(start + double(i) * step);
    return out;
}

SweepResult design_space_sweep(const Range& delta_range,
                               const Range& vsn_range, int width,
                               const DeviceParams& p) {
    std::vector<double> deltas = delta_range.values();
    std::vector<double> biases = vsn_range.values();
    for (double d : deltas)
        if (!(d > 0.0) || !(d < p.nvt_n))
            throw Error("sweep offset " + fmt(d) +
                        " leaves (0, nominal threshold)");
    for (double v : biases)
        if (!(v > 0.0) || !(v <= p.vdd))
            throw Error("sweep bias " + fmt(v) + " leaves (0, vdd]");

    SweepResult sweep;
    sweep.width = width;
    DeviceParams q = p;
    for (double d : deltas) {
        for (double v : biases) {
            q.delta = d;
            q.vsn = v;
            MuxMetrics m = mux_metrics(width, q);
            sweep.points.push_back({d, v, m.on_delay, m.leakage});
        }
    }
    for (size_t i = 1; i < sweep.points.size(); ++i) {
        if (sweep.points[i].on_delay <
            sweep.points[sweep.argmin_delay].on_delay)
            sweep.argmin_delay = i;
        if (sweep.points[i].leakage <
            sweep.points[sweep.argmin_leakage].leakage)
            sweep.argmin_leakage = i;
    }
    return sweep;
}

std::string sweep_csv(const SweepResult& sweep) {
    std::ostringstream out;
    out << "delta,vsn,width,on_delay,leakage\n";
    for (const SweepPoint& pt : sweep.points)
        out << fmt(pt.delta) << ',' << fmt(pt.vsn) << ',' << sweep.width
            << ',' << fmt(pt.on_delay) << ',' << fmt(pt.leakage) << '\n';
    if (!sweep.points.empty()) {
        const SweepPoint& d = sweep.points[sweep.argmin_delay];
        const SweepPoint& l = sweep.points[sweep.argmin_leakage];
        out << "# argmin on_delay: delta=" << fmt(d.delta)
            << " vsn=" << fmt(d.vsn) << " on_delay=" << fmt(d.on_delay)
            << '\n';
        out << "# argmin leakage: delta=" << fmt(l.delta)
            << " vsn=" << fmt(l.vsn) << " leakage=" << fmt(l.leakage)
            << '\n';
    }
    return out.str();
}

}  // namespace camo

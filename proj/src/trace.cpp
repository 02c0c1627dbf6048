#include "loadctrl/trace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "loadctrl/errors.hpp"

namespace loadctrl {

namespace {

void append_double(std::string& s, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    s += buf;
}

}  // namespace

void write_trace_csv(const Trace& trace, std::ostream& out) {
    out << trace_to_csv(trace);
}

std::string trace_to_csv(const Trace& trace) {
    std::string s = "k,t_s,omega_hz,g_mw,sum_x_mw,r_mw,p_obj,v_lyap\n";
    for (std::size_t i = 0; i < trace.size(); ++i) {
        s += std::to_string(trace.k[i]);
        for (const std::vector<double>* col :
             {&trace.t_s, &trace.omega_hz, &trace.g_mw, &trace.sum_x_mw, &trace.r_mw,
              &trace.p_obj, &trace.v_lyap}) {
            s += ',';
            append_double(s, (*col)[i]);
        }
        s += '\n';
    }
    return s;
}

void save_trace_csv(const Trace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write trace file: " + path);
    out << trace_to_csv(trace);
}

Metrics compute_metrics(const Trace& trace) {
    if (trace.size() == 0) throw std::invalid_argument("compute_metrics: empty trace");

    const double g0 = trace.schedule.nominal_mw();
    const double t_end = trace.t_s.back();

    Metrics m;
    m.p_end = trace.p_obj.back();

    for (std::size_t w = 0; w < trace.schedule.breakpoints.size(); ++w) {
        WindowMetrics wm;
        wm.t_begin_s = trace.schedule.breakpoints[w].first;
        wm.t_end_s = w + 1 < trace.schedule.breakpoints.size()
                         ? trace.schedule.breakpoints[w + 1].first
                         : t_end;
        wm.c_mw = g0 - trace.schedule.breakpoints[w].second;
        if (wm.t_begin_s > t_end) break;

        const double steady_from = wm.t_end_s - 0.1 * (wm.t_end_s - wm.t_begin_s);
        double steady_sum = 0.0;
        std::size_t steady_count = 0;
        bool any = false;
        for (std::size_t i = 0; i < trace.size(); ++i) {
            const double t = trace.t_s[i];
            const bool last_window = w + 1 == trace.schedule.breakpoints.size();
            if (t < wm.t_begin_s || (!last_window && t >= wm.t_end_s) ||
                (last_window && t > wm.t_end_s))
                continue;
            const double dw = trace.omega_hz[i] - trace.omega0_hz;
            if (!any) {
                wm.min_domega_hz = dw;
                any = true;
            }
            wm.max_abs_domega_hz = std::max(wm.max_abs_domega_hz, std::abs(dw));
            wm.min_domega_hz = std::min(wm.min_domega_hz, dw);
            wm.overshoot_hz = std::max(wm.overshoot_hz, dw);
            if (t >= steady_from) {
                steady_sum += std::abs(dw);
                ++steady_count;
            }
        }
        if (steady_count > 0) wm.steady_abs_domega_hz = steady_sum / steady_count;
        if (any) m.windows.push_back(wm);
    }

    for (const WindowMetrics& wm : m.windows)
        m.max_abs_domega_hz = std::max(m.max_abs_domega_hz, wm.max_abs_domega_hz);
    return m;
}

nlohmann::json metrics_to_json(const Metrics& m) {
    nlohmann::json j;
    j["max_abs_domega_hz"] = m.max_abs_domega_hz;
    j["p_end"] = m.p_end;
    j["windows"] = nlohmann::json::array();
    for (const WindowMetrics& w : m.windows) {
        j["windows"].push_back({{"t_begin_s", w.t_begin_s},
                                {"t_end_s", w.t_end_s},
                                {"c_mw", w.c_mw},
                                {"max_abs_domega_hz", w.max_abs_domega_hz},
                                {"steady_abs_domega_hz", w.steady_abs_domega_hz},
                                {"min_domega_hz", w.min_domega_hz},
                                {"overshoot_hz", w.overshoot_hz}});
    }
    return j;
}

}  // namespace loadctrl

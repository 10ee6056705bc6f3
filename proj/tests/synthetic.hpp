#pragma once

// Test-only builders for exact switched-system traces: V decays by
// e^{-2 lambda dt} per stable step, freezes through recovery, and jumps to
// mu * V + c at each stable re-entry. The error is embedded on the x axis so
// the recorded Lyapunov value equals |err| exactly.

#include <cmath>

#include "svt/trace.hpp"

namespace svt::testing {

struct ExactSwitchedSpec {
    double lambda = 1.0;
    double mu = 1.1;
    double c = 0.1;
    double v0 = 1.0;
    double dt = 0.01;
    int cycles = 10;         // (recovery, tracking) pairs after the initial segment
    double stable_s = 1.0;   // stable dwell per segment, s
    double unstable_s = 0.5; // recovery duration, s
    double jump_c = -1.0;    // c actually applied at re-entries; < 0 means use c
};

inline Trace make_exact_switched_trace(const ExactSwitchedSpec& s) {
    Trace tr;
    tr.dt = s.dt;
    tr.offset = 0.0;
    const int ns = std::max(1, static_cast<int>(std::ceil(s.stable_s / s.dt - 1e-9)));
    const int nu = std::max(1, static_cast<int>(std::ceil(s.unstable_s / s.dt - 1e-9)));
    const double decay = std::exp(-2.0 * s.lambda * s.dt);
    const double jump_c = s.jump_c < 0.0 ? s.c : s.jump_c;
    double V = s.v0;
    auto push = [&](Mode m) {
        TraceSample smp;
        smp.t = static_cast<double>(tr.samples.size()) * s.dt;
        smp.mode = m;
        smp.vis = m == Mode::Tracking;
        smp.lyap = V;
        smp.target.pos = {V, 0.0, 0.0};
        tr.samples.push_back(smp);
    };
    for (int i = 0; i < ns; ++i) {
        push(Mode::Tracking);
        V *= decay;
    }
    for (int cycle = 0; cycle < s.cycles; ++cycle) {
        for (int i = 0; i < nu; ++i) push(Mode::Recovery); // frozen
        V = s.mu * V + jump_c;                             // applied at re-entry
        for (int i = 0; i < ns; ++i) {
            push(Mode::Tracking);
            V *= decay;
        }
    }
    return tr;
}

/// Pure stable-mode exponential V(t) = v0 e^{-2 lambda t}.
inline Trace make_exponential_trace(double lambda, double v0, double seconds, double dt = 0.01) {
    ExactSwitchedSpec s;
    s.lambda = lambda;
    s.v0 = v0;
    s.dt = dt;
    s.cycles = 0;
    s.stable_s = seconds;
    return make_exact_switched_trace(s);
}

} // namespace svt::testing

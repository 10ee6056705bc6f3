#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "svt/mode.hpp"
#include "svt/trace.hpp"
#include "svt/vec3.hpp"

namespace svt {

/// Common Lyapunov function for both modes: the Euclidean norm of the
/// tracking error. With V = |x| the class-K bounds hold with identity
/// functions, so convergence radii are directly in meters.
inline double lyapunov(const Vec3& err) {
    require_finite(err, "lyapunov err");
    return err.norm();
}

/// One mode change: time, direction, and V at the sample before and at the
/// switch sample.
struct SwitchRecord {
    double t = 0.0;
    std::size_t index = 0; // first sample of the new mode
    Mode from = Mode::Tracking;
    Mode to = Mode::Recovery;
    double V_before = 0.0;
    double V_after = 0.0;
};

inline std::vector<SwitchRecord> extract_switches(const Trace& trace) {
    if (trace.samples.empty()) throw std::invalid_argument("extract_switches: empty trace");
    std::vector<SwitchRecord> out;
    for (std::size_t i = 1; i < trace.samples.size(); ++i) {
        const auto& prev = trace.samples[i - 1];
        const auto& cur = trace.samples[i];
        if (cur.mode != prev.mode)
            out.push_back({cur.t, i, prev.mode, cur.mode, prev.lyap, cur.lyap});
    }
    return out;
}

/// Average stable dwell time; infinite (finite = false) when the trace has
/// fewer than two Recovery->Tracking switches.
struct TauAs {
    double value = std::numeric_limits<double>::infinity();
    bool finite = false;
};

/// Measured ASDT: total Tracking-mode time divided by (k - 1), k the number of
/// Recovery->Tracking switches. Mode, not instantaneous visibility, defines
/// stable time, so debounce windows count as stable.
inline TauAs measure_tau_as(const Trace& trace) {
    if (trace.samples.empty()) throw std::invalid_argument("measure_tau_as: empty trace");
    double stable = 0.0;
    int k = 0;
    for (std::size_t i = 0; i < trace.samples.size(); ++i) {
        if (trace.samples[i].mode == Mode::Tracking) stable += trace.dt;
        if (i > 0 && trace.samples[i].mode == Mode::Tracking &&
            trace.samples[i - 1].mode == Mode::Recovery)
            ++k;
    }
    if (k < 2) return {};
    return {stable / static_cast<double>(k - 1), true};
}

namespace detail {

struct Segment {
    std::size_t first = 0;
    std::size_t last = 0; // inclusive
};

inline std::vector<Segment> tracking_segments(const Trace& trace) {
    std::vector<Segment> segs;
    const auto& s = trace.samples;
    for (std::size_t i = 0; i < s.size();) {
        if (s[i].mode != Mode::Tracking) { ++i; continue; }
        std::size_t j = i;
        while (j + 1 < s.size() && s[j + 1].mode == Mode::Tracking) ++j;
        segs.push_back({i, j});
        i = j + 1;
    }
    return segs;
}

} // namespace detail

/// Fit the stable-mode decay rate: for each Tracking segment of length
/// >= 0.5 s whose least-squares ln V slope is negative, lambda = -slope/2;
/// the certificate keeps the slowest decay over segments, floored at 1e-6.
/// Samples with V <= 1e-4 are excluded from the fit (log singularity).
inline double estimate_lambda(const Trace& trace) {
    constexpr double kMinSegmentSeconds = 0.5;
    constexpr double kMinV = 1e-4;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& seg : detail::tracking_segments(trace)) {
        const double span = static_cast<double>(seg.last - seg.first) * trace.dt;
        if (span < kMinSegmentSeconds) continue;
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        std::size_t n = 0;
        for (std::size_t i = seg.first; i <= seg.last; ++i) {
            const double v = trace.samples[i].lyap;
            if (v <= kMinV) continue;
            const double x = trace.samples[i].t;
            const double y = std::log(v);
            sx += x; sy += y; sxx += x * x; sxy += x * y;
            ++n;
        }
        if (n < 2) continue;
        const double denom = static_cast<double>(n) * sxx - sx * sx;
        if (denom <= 0.0) continue;
        const double slope = (static_cast<double>(n) * sxy - sx * sy) / denom;
        if (slope >= 0.0) continue; // not a decaying segment
        best = std::min(best, -slope / 2.0);
    }
    if (!std::isfinite(best))
        throw std::domain_error("estimate_lambda: no qualifying tracking segment");
    return std::max(best, 1e-6);
}

/// A completed recovery episode: V at the exit from the stable mode and V at
/// the next stable re-entry.
struct Episode {
    double V_exit = 0.0;
    double V_reentry = 0.0;
};

inline std::vector<Episode> recovery_episodes(const std::vector<SwitchRecord>& switches) {
    std::vector<Episode> eps;
    for (std::size_t i = 0; i + 1 < switches.size(); ++i) {
        if (switches[i].to == Mode::Recovery && switches[i + 1].to == Mode::Tracking)
            eps.push_back({switches[i].V_after, switches[i + 1].V_after});
    }
    return eps;
}

/// With mu fixed, the smallest c such that V_reentry <= mu * V_exit + c holds
/// for every completed episode (floored at 1e-9 so c stays positive).
inline std::pair<double, double> estimate_mu_c(const std::vector<SwitchRecord>& switches,
                                               double mu_fixed = 1.1) {
    if (!(mu_fixed > 1.0)) throw std::domain_error("estimate_mu_c: mu must be > 1");
    const auto eps = recovery_episodes(switches);
    if (eps.empty()) throw std::domain_error("estimate_mu_c: no completed recovery episode");
    double c = 0.0;
    for (const auto& e : eps) c = std::max(c, std::max(0.0, e.V_reentry - mu_fixed * e.V_exit));
    return {mu_fixed, c + 1e-9};
}

/// Theorem-1 dwell-time threshold ln(mu + delta) / (2 lambda).
inline double dwell_threshold(double mu, double delta, double lambda) {
    if (!(mu > 1.0) || !(delta > 0.0) || !(lambda > 0.0))
        throw std::domain_error("dwell_threshold: require mu > 1, delta > 0, lambda > 0");
    return std::log(mu + delta) / (2.0 * lambda);
}

/// Radius of the convergence set c (mu + delta)^{N_0} / delta (alpha_1 = id).
inline double convergence_radius(double c, double mu, double delta, int N_0) {
    if (!(c >= 0.0) || !(mu > 1.0) || !(delta > 0.0) || N_0 < 1)
        throw std::domain_error("convergence_radius: require c >= 0, mu > 1, delta > 0, N_0 >= 1");
    return c * std::pow(mu + delta, static_cast<double>(N_0)) / delta;
}

struct BoundCheck {
    bool ok = false;
    double max_slack = 0.0; // max over samples of V - bound
};

/// Check the unrolled switched-system inequality along a trace that starts in
/// the stable mode. At a stable sample T with switch times t_1..t_N (N even),
///   V(T) <= mu^{N/2} V(0) e^{-2 lambda T_s(0,T)}
///           + sum_{k=0..N/2} c mu^k e^{-2 lambda T_s(t_{N-2k}, T)},  t_0 := 0,
/// where T_s is stable-mode time. At an unstable sample, one extra
/// mu * (.) + c application on the bound at the last stable exit. A sample
/// passes when V <= bound within 1e-9 relative tolerance.
inline BoundCheck verify_trace_bound(const Trace& trace, double lambda, double mu, double c) {
    const auto& s = trace.samples;
    if (s.empty()) throw std::invalid_argument("verify_trace_bound: empty trace");
    if (s[0].mode != Mode::Tracking)
        throw std::domain_error("verify_trace_bound: trace must start in the stable mode");
    if (!(mu > 1.0) || !(c >= 0.0) || !(lambda > 0.0))
        throw std::domain_error("verify_trace_bound: require lambda > 0, mu > 1, c >= 0");

    const std::size_t n = s.size();
    std::vector<double> ts(n, 0.0); // stable time in [t_0, t_i)
    for (std::size_t i = 1; i < n; ++i)
        ts[i] = ts[i - 1] + (s[i - 1].mode == Mode::Tracking ? trace.dt : 0.0);
    std::vector<std::size_t> sw; // sw[i-1] = sample index of switch time t_i
    for (std::size_t i = 1; i < n; ++i)
        if (s[i].mode != s[i - 1].mode) sw.push_back(i);

    const double V0 = s[0].lyap;
    BoundCheck out{true, -std::numeric_limits<double>::infinity()};
    std::size_t N = 0; // switches with index <= m
    for (std::size_t m = 0; m < n; ++m) {
        while (N < sw.size() && sw[N] <= m) ++N;
        // bound at the last stable exit (or at m itself when m is stable)
        const std::size_t n_stable = (s[m].mode == Mode::Tracking) ? N : N - 1;
        // n_stable is even: pairs of (exit, re-entry) switches
        double bound = std::pow(mu, static_cast<double>(n_stable) / 2.0) * V0 *
                       std::exp(-2.0 * lambda * ts[m]);
        for (std::size_t k = 0; k <= n_stable / 2; ++k) {
            const std::size_t idx = (2 * k == n_stable) ? 0 : sw[n_stable - 2 * k - 1];
            bound += c * std::pow(mu, static_cast<double>(k)) *
                     std::exp(-2.0 * lambda * (ts[m] - ts[idx]));
        }
        if (s[m].mode == Mode::Recovery) bound = mu * bound + c;
        const double slack = s[m].lyap - bound;
        out.max_slack = std::max(out.max_slack, slack);
        if (slack > 1e-9 * std::max(1.0, std::abs(bound))) out.ok = false;
    }
    return out;
}

/// Largest tau for which the ASDT inequality N_s(t,t') <= 1 + T_s(t,t')/tau
/// holds over every pair of stable-mode entries; infinity when fewer than two
/// entries exist. Diagnostic companion to measure_tau_as, which is tight only
/// over the full horizon.
inline double max_eq3_admissible_tau(const Trace& trace) {
    const auto& s = trace.samples;
    std::vector<std::size_t> entries;
    for (std::size_t i = 1; i < s.size(); ++i)
        if (s[i].mode == Mode::Tracking && s[i - 1].mode == Mode::Recovery) entries.push_back(i);
    if (entries.size() < 2) return std::numeric_limits<double>::infinity();
    std::vector<double> ts(s.size(), 0.0);
    for (std::size_t i = 1; i < s.size(); ++i)
        ts[i] = ts[i - 1] + (s[i - 1].mode == Mode::Tracking ? trace.dt : 0.0);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < entries.size(); ++a)
        for (std::size_t b = a + 1; b < entries.size(); ++b) {
            const double stable = ts[entries[b]] - ts[entries[a]];
            best = std::min(best, stable / static_cast<double>(b - a));
        }
    return best;
}

/// Everything Theorem 1 needs, evaluated on one trace.
struct Certificate {
    double lambda = 1e-6;
    bool lambda_fitted = false;
    double mu = 1.1;
    double c = 1e-9;
    TauAs tau_as;
    int N_0 = 1;
    double delta = 0.1;
    double threshold = 0.0;
    double radius = 0.0;
    bool dwell_ok = false;
    bool bound_ok = false;
    double max_bound_slack = 0.0;
    bool tail_ok = false;
    int k = 0; // Recovery->Tracking switch count
    std::vector<std::pair<double, double>> mu_c_pareto; // (mu, fitted c)
};

/// Assemble the certificate: fitted lambda (floored when no segment
/// qualifies), (mu, c) against the episodes, measured tau_as, threshold and
/// radius, the trace bound, and a finite-horizon tail check
/// (V over the final 10% of Tracking samples <= radius + 0.1 m).
inline Certificate certify(const Trace& trace, double delta) {
    if (!(delta > 0.0)) throw std::domain_error("certify: delta must be > 0");
    if (trace.samples.empty() || trace.samples[0].mode != Mode::Tracking)
        throw std::domain_error("certify: trace must start in the stable mode");

    Certificate cert;
    cert.delta = delta;
    try {
        cert.lambda = estimate_lambda(trace);
        cert.lambda_fitted = true;
    } catch (const std::domain_error&) {
        cert.lambda = 1e-6;
        cert.lambda_fitted = false;
    }

    const auto switches = extract_switches(trace);
    const auto episodes = recovery_episodes(switches);
    static constexpr double kMuGrid[] = {1.01, 1.1, 1.5, 2.0};
    for (double mu : kMuGrid) {
        double c = 1e-9;
        if (!episodes.empty()) c = estimate_mu_c(switches, mu).second;
        cert.mu_c_pareto.emplace_back(mu, c);
    }
    cert.mu = 1.1;
    cert.c = episodes.empty() ? 1e-9 : estimate_mu_c(switches, cert.mu).second;

    cert.tau_as = measure_tau_as(trace);
    for (std::size_t i = 1; i < trace.samples.size(); ++i)
        if (trace.samples[i].mode == Mode::Tracking &&
            trace.samples[i - 1].mode == Mode::Recovery)
            ++cert.k;

    cert.threshold = dwell_threshold(cert.mu, delta, cert.lambda);
    cert.radius = convergence_radius(cert.c, cert.mu, delta, cert.N_0);
    cert.dwell_ok = !cert.tau_as.finite || cert.tau_as.value > cert.threshold;

    const BoundCheck bc = verify_trace_bound(trace, cert.lambda, cert.mu, cert.c);
    cert.bound_ok = bc.ok;
    cert.max_bound_slack = bc.max_slack;

    std::vector<double> tracking_v;
    for (const auto& smp : trace.samples)
        if (smp.mode == Mode::Tracking) tracking_v.push_back(smp.lyap);
    cert.tail_ok = true;
    const std::size_t tail_start = tracking_v.size() - tracking_v.size() / 10;
    for (std::size_t i = tail_start; i < tracking_v.size(); ++i)
        if (tracking_v[i] > cert.radius + 0.1) cert.tail_ok = false;
    return cert;
}

} // namespace svt

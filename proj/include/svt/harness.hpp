#pragma once

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "svt/controller.hpp"
#include "svt/perception.hpp"
#include "svt/rng.hpp"
#include "svt/sim_core.hpp"
#include "svt/stability.hpp"
#include "svt/trace.hpp"
#include "svt/vec3.hpp"

namespace svt {

/// Scenario or input-file problem; carries the offending field path.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ControllerKind { Svt, Baseline };

/// Fully resolved run description. Loading a scenario file materializes every
/// default, so serializing this back records the exact configuration used.
struct ScenarioConfig {
    std::string name = "scenario";
    TrajectorySpec trajectory;
    double offset = 1.0; // m
    ControllerKind controller = ControllerKind::Svt;
    SvtConfig svt;
    CameraModel camera;
    NoiseModel noise;
    TargetEstimator::Params estimator;
    Workspace workspace{{0.0, -2.7, 0.0}, {5.6, 2.7, 3.0}};
    double duration = 45.0; // s
    double dt = 0.01;       // s
    std::uint64_t seed = 1;
    std::optional<KinState> pursuer_init; // derived from offset when absent
    double stability_delta = 0.1;

    /// Pursuer start pose: the explicit one, or target(0) - (offset, 0, 0)
    /// at rest.
    KinState resolved_pursuer_init() const {
        if (pursuer_init) return *pursuer_init;
        const KinState t0 = eval_trajectory(trajectory, 0.0);
        return {t0.pos - Vec3{offset, 0.0, 0.0}, Vec3{}};
    }
};

/// Metrics of one run plus its stability certificate.
struct RunResult {
    double ae = 0.0;  // m
    double ftv = 0.0; // fraction
    TauAs tau_as;
    int k = 0;                 // Recovery->Tracking switches
    double d_max_observed = 0.0; // m
    int recovery_failures = 0;
    Certificate certificate;
};

// ---------------------------------------------------------------------------
// Validation

namespace detail {

inline void check(bool cond, const std::string& path, const std::string& msg) {
    if (!cond) throw ConfigError(path + ": " + msg);
}

} // namespace detail

/// Validate the full config; throws ConfigError with a field path. Returns an
/// optional human-readable warning (underdamped gains).
inline std::optional<std::string> validate_scenario(const ScenarioConfig& cfg) {
    using detail::check;
    check(!cfg.name.empty(), "name", "must not be empty");
    check(cfg.dt > 0.0, "dt", "must be > 0");
    check(cfg.duration > 0.0, "duration", "must be > 0");
    check(cfg.offset > 0.0, "offset", "must be > 0");
    check(cfg.stability_delta > 0.0, "stability_delta", "must be > 0");

    const auto& tr = cfg.trajectory;
    check(tr.duration > 0.0, "trajectory.duration", "must be > 0");
    check(cfg.duration >= tr.duration, "duration", "must be >= trajectory.duration");
    switch (tr.kind) {
    case TrajectoryKind::Ellipse:
        check(tr.angular_rate > 0.0, "trajectory.angular_rate", "must be > 0");
        check(tr.semi_axes.y > 0.0 && tr.semi_axes.z > 0.0, "trajectory.semi_axes",
              "y and z half-axes must be > 0");
        break;
    case TrajectoryKind::SquareLemniscate:
        check(tr.speed > 0.0, "trajectory.speed", "must be > 0");
        check(tr.semi_axes.y > 0.0 && tr.semi_axes.z > 0.0, "trajectory.semi_axes",
              "y and z half-spans must be > 0");
        break;
    case TrajectoryKind::Waypoints:
        check(tr.speed > 0.0, "trajectory.speed", "must be > 0");
        check(tr.waypoints.size() >= 2, "trajectory.waypoints", "need at least 2 waypoints");
        break;
    }

    check(cfg.workspace.valid(), "workspace", "lo must be < hi componentwise");
    check(cfg.camera.valid(), "camera", "need 0 < fov < pi and unit facing");
    check(cfg.noise.valid(), "noise", "need pos_sigma >= 0 and 0 <= dropout_prob < 1");
    check(cfg.estimator.q > 0.0 && cfg.estimator.r > 0.0 && cfg.estimator.n_sigma > 0.0 &&
              cfg.estimator.init_pos_var > 0.0 && cfg.estimator.init_vel_var > 0.0,
          "estimator", "all parameters must be > 0");

    std::optional<std::string> warning;
    try {
        warning = cfg.svt.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("svt: ") + e.what());
    }

    // the scripted trajectory must stay inside the workspace
    for (double t = 0.0; t <= tr.duration; t += cfg.dt) {
        const Vec3 p = eval_trajectory(tr, std::min(t, tr.duration)).pos;
        check(cfg.workspace.contains(p, 1e-9), "trajectory",
              "leaves the workspace at t=" + std::to_string(t));
    }

    const KinState p0 = cfg.resolved_pursuer_init();
    const KinState t0 = eval_trajectory(tr, 0.0);
    check(visible(p0.pos, t0.pos, cfg.camera), "pursuer_init",
          "target must be visible at t=0");
    return warning;
}

// ---------------------------------------------------------------------------
// Scenario JSON

namespace detail {

using nlohmann::json;

inline void reject_unknown(const json& obj, const std::string& path,
                           std::initializer_list<const char*> known) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : known)
            if (it.key() == k) { ok = true; break; }
        if (!ok) throw ConfigError(path.empty() ? "unknown field '" + it.key() + "'"
                                                : path + ": unknown field '" + it.key() + "'");
    }
}

template <typename T>
inline void get_to(const json& obj, const std::string& path, const char* key, T& out) {
    if (!obj.contains(key)) return;
    try {
        obj.at(key).get_to(out);
    } catch (const json::exception&) {
        throw ConfigError(path + key + ": wrong type");
    }
}

inline void get_vec3(const json& obj, const std::string& path, const char* key, Vec3& out) {
    if (!obj.contains(key)) return;
    const auto& a = obj.at(key);
    if (!a.is_array() || a.size() != 3 || !a[0].is_number() || !a[1].is_number() ||
        !a[2].is_number())
        throw ConfigError(path + key + ": expected [x, y, z]");
    out = {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
}

inline json vec3_to_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

} // namespace detail

inline ScenarioConfig scenario_from_json(const nlohmann::json& j) {
    using detail::get_to;
    using detail::get_vec3;
    using detail::reject_unknown;
    if (!j.is_object()) throw ConfigError("scenario: expected a JSON object");
    reject_unknown(j, "",
                   {"name", "trajectory", "offset", "controller", "svt", "camera", "noise",
                    "estimator", "workspace", "duration", "dt", "seed", "pursuer_init",
                    "stability_delta"});
    ScenarioConfig cfg;
    get_to(j, "", "name", cfg.name);
    get_to(j, "", "offset", cfg.offset);
    get_to(j, "", "duration", cfg.duration);
    get_to(j, "", "dt", cfg.dt);
    get_to(j, "", "seed", cfg.seed);
    get_to(j, "", "stability_delta", cfg.stability_delta);

    if (j.contains("controller")) {
        const std::string c = j.at("controller").get<std::string>();
        if (c == "svt") cfg.controller = ControllerKind::Svt;
        else if (c == "baseline") cfg.controller = ControllerKind::Baseline;
        else throw ConfigError("controller: expected 'svt' or 'baseline'");
    }

    if (j.contains("trajectory")) {
        const auto& t = j.at("trajectory");
        reject_unknown(t, "trajectory",
                       {"kind", "center", "semi_axes", "angular_rate", "speed", "duration",
                        "phase", "waypoints"});
        if (t.contains("kind")) {
            const std::string k = t.at("kind").get<std::string>();
            if (k == "ellipse") cfg.trajectory.kind = TrajectoryKind::Ellipse;
            else if (k == "square_lemniscate") cfg.trajectory.kind = TrajectoryKind::SquareLemniscate;
            else if (k == "waypoints") cfg.trajectory.kind = TrajectoryKind::Waypoints;
            else throw ConfigError("trajectory.kind: unknown kind '" + k + "'");
        }
        get_vec3(t, "trajectory.", "center", cfg.trajectory.center);
        get_vec3(t, "trajectory.", "semi_axes", cfg.trajectory.semi_axes);
        get_to(t, "trajectory.", "angular_rate", cfg.trajectory.angular_rate);
        get_to(t, "trajectory.", "speed", cfg.trajectory.speed);
        get_to(t, "trajectory.", "duration", cfg.trajectory.duration);
        get_to(t, "trajectory.", "phase", cfg.trajectory.phase);
        if (t.contains("waypoints")) {
            cfg.trajectory.waypoints.clear();
            for (const auto& w : t.at("waypoints")) {
                if (!w.is_array() || w.size() != 3)
                    throw ConfigError("trajectory.waypoints: expected [x, y, z] entries");
                cfg.trajectory.waypoints.push_back(
                    {w[0].get<double>(), w[1].get<double>(), w[2].get<double>()});
            }
        }
    }

    if (j.contains("svt")) {
        const auto& s = j.at("svt");
        reject_unknown(s, "svt",
                       {"v_max", "d_max", "t_R", "kp", "kd", "recovery_kp", "recovery_kd",
                        "debounce_n", "a_limit", "target_a_max"});
        get_to(s, "svt.", "v_max", cfg.svt.v_max);
        get_to(s, "svt.", "d_max", cfg.svt.d_max);
        get_to(s, "svt.", "t_R", cfg.svt.t_R);
        get_to(s, "svt.", "kp", cfg.svt.kp);
        get_to(s, "svt.", "kd", cfg.svt.kd);
        get_to(s, "svt.", "recovery_kp", cfg.svt.recovery_kp);
        get_to(s, "svt.", "recovery_kd", cfg.svt.recovery_kd);
        get_to(s, "svt.", "debounce_n", cfg.svt.debounce_n);
        get_to(s, "svt.", "a_limit", cfg.svt.a_limit);
        get_to(s, "svt.", "target_a_max", cfg.svt.target_a_max);
    }

    if (j.contains("camera")) {
        const auto& c = j.at("camera");
        reject_unknown(c, "camera", {"fov_deg"});
        double fov_deg = cfg.camera.fov * 180.0 / M_PI;
        get_to(c, "camera.", "fov_deg", fov_deg);
        cfg.camera.fov = fov_deg * M_PI / 180.0;
    }

    if (j.contains("noise")) {
        const auto& noi = j.at("noise");
        reject_unknown(noi, "noise", {"pos_sigma", "dropout_prob"});
        get_vec3(noi, "noise.", "pos_sigma", cfg.noise.pos_sigma);
        get_to(noi, "noise.", "dropout_prob", cfg.noise.dropout_prob);
    }

    if (j.contains("estimator")) {
        const auto& e = j.at("estimator");
        reject_unknown(e, "estimator", {"q", "r", "n_sigma", "init_pos_var", "init_vel_var"});
        get_to(e, "estimator.", "q", cfg.estimator.q);
        get_to(e, "estimator.", "r", cfg.estimator.r);
        get_to(e, "estimator.", "n_sigma", cfg.estimator.n_sigma);
        get_to(e, "estimator.", "init_pos_var", cfg.estimator.init_pos_var);
        get_to(e, "estimator.", "init_vel_var", cfg.estimator.init_vel_var);
    }

    if (j.contains("workspace")) {
        const auto& w = j.at("workspace");
        reject_unknown(w, "workspace", {"lo", "hi"});
        get_vec3(w, "workspace.", "lo", cfg.workspace.lo);
        get_vec3(w, "workspace.", "hi", cfg.workspace.hi);
    }

    if (j.contains("pursuer_init")) {
        const auto& p = j.at("pursuer_init");
        reject_unknown(p, "pursuer_init", {"pos", "vel"});
        KinState init;
        get_vec3(p, "pursuer_init.", "pos", init.pos);
        get_vec3(p, "pursuer_init.", "vel", init.vel);
        cfg.pursuer_init = init;
    }

    cfg.svt.offset = cfg.offset; // the controller offset is the scenario offset
    return cfg;
}

inline nlohmann::json scenario_to_json(const ScenarioConfig& cfg) {
    using detail::vec3_to_json;
    nlohmann::json j;
    j["name"] = cfg.name;
    j["offset"] = cfg.offset;
    j["controller"] = cfg.controller == ControllerKind::Svt ? "svt" : "baseline";
    j["duration"] = cfg.duration;
    j["dt"] = cfg.dt;
    j["seed"] = cfg.seed;
    j["stability_delta"] = cfg.stability_delta;

    nlohmann::json t;
    switch (cfg.trajectory.kind) {
    case TrajectoryKind::Ellipse: t["kind"] = "ellipse"; break;
    case TrajectoryKind::SquareLemniscate: t["kind"] = "square_lemniscate"; break;
    case TrajectoryKind::Waypoints: t["kind"] = "waypoints"; break;
    }
    t["center"] = vec3_to_json(cfg.trajectory.center);
    t["semi_axes"] = vec3_to_json(cfg.trajectory.semi_axes);
    t["angular_rate"] = cfg.trajectory.angular_rate;
    t["speed"] = cfg.trajectory.speed;
    t["duration"] = cfg.trajectory.duration;
    t["phase"] = cfg.trajectory.phase;
    if (cfg.trajectory.kind == TrajectoryKind::Waypoints) {
        t["waypoints"] = nlohmann::json::array();
        for (const auto& w : cfg.trajectory.waypoints) t["waypoints"].push_back(vec3_to_json(w));
    }
    j["trajectory"] = t;

    j["svt"] = {{"v_max", cfg.svt.v_max},       {"d_max", cfg.svt.d_max},
                {"t_R", cfg.svt.t_R},           {"kp", cfg.svt.kp},
                {"kd", cfg.svt.kd},             {"recovery_kp", cfg.svt.recovery_kp},
                {"recovery_kd", cfg.svt.recovery_kd}, {"debounce_n", cfg.svt.debounce_n},
                {"a_limit", cfg.svt.a_limit},   {"target_a_max", cfg.svt.target_a_max}};
    j["camera"] = {{"fov_deg", cfg.camera.fov * 180.0 / M_PI}};
    j["noise"] = {{"pos_sigma", vec3_to_json(cfg.noise.pos_sigma)},
                  {"dropout_prob", cfg.noise.dropout_prob}};
    j["estimator"] = {{"q", cfg.estimator.q},
                      {"r", cfg.estimator.r},
                      {"n_sigma", cfg.estimator.n_sigma},
                      {"init_pos_var", cfg.estimator.init_pos_var},
                      {"init_vel_var", cfg.estimator.init_vel_var}};
    j["workspace"] = {{"lo", vec3_to_json(cfg.workspace.lo)},
                      {"hi", vec3_to_json(cfg.workspace.hi)}};
    const KinState init = cfg.resolved_pursuer_init();
    j["pursuer_init"] = {{"pos", vec3_to_json(init.pos)}, {"vel", vec3_to_json(init.vel)}};
    return j;
}

inline ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("scenario parse error in " + path + ": " + e.what());
    }
    ScenarioConfig cfg = scenario_from_json(j);
    validate_scenario(cfg);
    return cfg;
}

// ---------------------------------------------------------------------------
// Simulation loop

/// Target state at simulation time t: the scripted trajectory while it lasts,
/// parked at its final position afterwards.
inline KinState target_state(const TrajectorySpec& traj, double t) {
    if (t <= traj.duration) return eval_trajectory(traj, t);
    KinState s = eval_trajectory(traj, traj.duration);
    s.vel = Vec3{};
    return s;
}

inline double metric_ae(const Trace& trace, double offset) {
    if (trace.samples.empty()) throw std::invalid_argument("metric_ae: empty trace");
    double sum = 0.0;
    for (const auto& s : trace.samples)
        sum += std::abs((s.target.pos - s.pursuer.pos).norm() - offset);
    return sum / static_cast<double>(trace.samples.size());
}

inline double metric_ftv(const Trace& trace) {
    if (trace.samples.empty()) throw std::invalid_argument("metric_ftv: empty trace");
    std::size_t vis = 0;
    for (const auto& s : trace.samples) vis += s.vis ? 1 : 0;
    return static_cast<double>(vis) / static_cast<double>(trace.samples.size());
}

/// Max over recovery episodes of (pursuer x at episode entry - minimum
/// pursuer x inside the episode); 0 without episodes.
inline double metric_dmax_observed(const Trace& trace) {
    double best = 0.0;
    const auto& s = trace.samples;
    for (std::size_t i = 0; i < s.size();) {
        if (s[i].mode != Mode::Recovery) { ++i; continue; }
        const double entry_x = s[i].pursuer.pos.x;
        double min_x = entry_x;
        std::size_t j = i;
        while (j < s.size() && s[j].mode == Mode::Recovery) {
            min_x = std::min(min_x, s[j].pursuer.pos.x);
            ++j;
        }
        best = std::max(best, entry_x - min_x);
        i = j;
    }
    return best;
}

/// Deterministic fixed-step run: evaluate target, observe, filter, controller
/// step, integrate, record. Identical (config, seed) pairs produce identical
/// traces.
inline std::pair<Trace, RunResult> run_scenario(const ScenarioConfig& cfg) {
    validate_scenario(cfg);

    Trace trace;
    trace.dt = cfg.dt;
    trace.offset = cfg.offset;
    const long long steps = std::llround(cfg.duration / cfg.dt);
    trace.samples.reserve(static_cast<std::size_t>(steps));

    Rng rng(derive_seed(cfg.seed, 0));
    TargetEstimator estimator(cfg.estimator);
    SvtState st;
    KinState pursuer = cfg.resolved_pursuer_init();
    const double nan = std::numeric_limits<double>::quiet_NaN();

    for (long long i = 0; i < steps; ++i) {
        const double t = static_cast<double>(i) * cfg.dt;
        const KinState target = target_state(cfg.trajectory, t);

        const bool vis = visible(pursuer.pos, target.pos, cfg.camera);
        const ObserverOutput obs = observe(pursuer, target, cfg.camera, cfg.noise, rng);

        if (estimator.initialized()) estimator.predict(cfg.dt);
        if (obs.seen()) estimator.update(pursuer.pos + *obs.displacement);

        TraceSample sample;
        sample.t = t;
        sample.vis = vis;
        sample.target = target;
        sample.pursuer = pursuer;
        sample.estimate = estimator.initialized() ? estimator.estimate().pos
                                                  : Vec3{nan, nan, nan};
        sample.lyap = lyapunov(tracking_error(sample, cfg.offset));

        Vec3 accel;
        if (cfg.controller == ControllerKind::Svt) {
            const SvtStepResult res =
                svt_step(st, obs, estimator, pursuer, cfg.svt, cfg.camera, t, cfg.dt);
            sample.mode = res.mode;
            sample.event = res.event;
            accel = res.accel;
        } else {
            sample.mode = Mode::Tracking;
            accel = baseline_step(obs, estimator, pursuer, cfg.svt, cfg.dt);
        }
        trace.samples.push_back(sample);
        pursuer = step_double_integrator(pursuer, accel, cfg.dt);
    }

    RunResult result;
    result.ae = metric_ae(trace, cfg.offset);
    result.ftv = metric_ftv(trace);
    result.tau_as = measure_tau_as(trace);
    result.d_max_observed = metric_dmax_observed(trace);
    for (const auto& s : trace.samples)
        if (s.event == StepEvent::RecoveryFailure) ++result.recovery_failures;
    result.certificate = certify(trace, cfg.stability_delta);
    result.k = result.certificate.k;
    return {trace, result};
}

// ---------------------------------------------------------------------------
// Trace CSV

namespace detail {

inline std::string format_double(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, end);
}

} // namespace detail

inline constexpr const char* kTraceHeader =
    "t,mode,vis,tx,ty,tz,tvx,tvy,tvz,px,py,pz,pvx,pvy,pvz,ex,ey,ez,V,event";

inline void write_trace(const std::string& path, const Trace& trace) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write trace file: " + path);
    auto d = [](double v) { return detail::format_double(v); };
    out << kTraceHeader << '\n';
    for (const auto& s : trace.samples) {
        out << d(s.t) << ',' << (s.mode == Mode::Tracking ? '0' : '1') << ','
            << (s.vis ? '1' : '0') << ',' << d(s.target.pos.x) << ',' << d(s.target.pos.y)
            << ',' << d(s.target.pos.z) << ',' << d(s.target.vel.x) << ',' << d(s.target.vel.y)
            << ',' << d(s.target.vel.z) << ',' << d(s.pursuer.pos.x) << ','
            << d(s.pursuer.pos.y) << ',' << d(s.pursuer.pos.z) << ',' << d(s.pursuer.vel.x)
            << ',' << d(s.pursuer.vel.y) << ',' << d(s.pursuer.vel.z) << ',' << d(s.estimate.x)
            << ',' << d(s.estimate.y) << ',' << d(s.estimate.z) << ',' << d(s.lyap) << ','
            << step_event_name(s.event) << '\n';
    }
}

inline Trace read_trace(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open trace file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("trace file empty: " + path);
    if (line != kTraceHeader)
        throw ConfigError("trace header mismatch in " + path);
    Trace trace;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> cols;
        std::size_t start = 0;
        for (std::size_t i = 0; i <= line.size(); ++i) {
            if (i == line.size() || line[i] == ',') {
                cols.push_back(line.substr(start, i - start));
                start = i + 1;
            }
        }
        if (cols.size() != 20)
            throw ConfigError("trace line " + std::to_string(lineno) + ": expected 20 columns");
        auto num = [&](std::size_t idx) {
            const char* s = cols[idx].c_str();
            char* end = nullptr;
            const double v = std::strtod(s, &end);
            if (end == s) throw ConfigError("trace line " + std::to_string(lineno) +
                                            ": bad number in column " + std::to_string(idx + 1));
            return v;
        };
        TraceSample smp;
        smp.t = num(0);
        smp.mode = cols[1] == "1" ? Mode::Recovery : Mode::Tracking;
        smp.vis = cols[2] == "1";
        smp.target = {{num(3), num(4), num(5)}, {num(6), num(7), num(8)}};
        smp.pursuer = {{num(9), num(10), num(11)}, {num(12), num(13), num(14)}};
        smp.estimate = {num(15), num(16), num(17)};
        smp.lyap = num(18);
        smp.event = StepEvent::None;
        for (StepEvent e : {StepEvent::Loss, StepEvent::Reacquire, StepEvent::Replan,
                            StepEvent::RecoveryFailure})
            if (cols[19] == step_event_name(e)) smp.event = e;
        trace.samples.push_back(smp);
    }
    if (trace.samples.size() >= 2) trace.dt = trace.samples[1].t - trace.samples[0].t;
    return trace;
}

// ---------------------------------------------------------------------------
// Result JSON

inline nlohmann::json certificate_to_json(const Certificate& c) {
    nlohmann::json j;
    j["lambda"] = c.lambda;
    j["lambda_fitted"] = c.lambda_fitted;
    j["mu"] = c.mu;
    j["c"] = c.c;
    j["tau_as"] = c.tau_as.finite ? nlohmann::json(c.tau_as.value) : nlohmann::json(nullptr);
    j["tau_as_finite"] = c.tau_as.finite;
    j["N_0"] = c.N_0;
    j["delta"] = c.delta;
    j["threshold"] = c.threshold;
    j["radius"] = c.radius;
    j["dwell_ok"] = c.dwell_ok;
    j["bound_ok"] = c.bound_ok;
    j["max_bound_slack"] = c.max_bound_slack;
    j["tail_ok"] = c.tail_ok;
    j["k"] = c.k;
    j["mu_c_pareto"] = nlohmann::json::array();
    for (const auto& [mu, cc] : c.mu_c_pareto)
        j["mu_c_pareto"].push_back({{"mu", mu}, {"c", cc}});
    return j;
}

inline nlohmann::json result_to_json(const RunResult& r, const ScenarioConfig& cfg) {
    nlohmann::json j;
    j["config"] = scenario_to_json(cfg);
    j["ae"] = r.ae;
    j["ftv"] = r.ftv;
    j["tau_as"] = r.tau_as.finite ? nlohmann::json(r.tau_as.value) : nlohmann::json(nullptr);
    j["tau_as_finite"] = r.tau_as.finite;
    j["k"] = r.k;
    j["d_max_observed"] = r.d_max_observed;
    j["recovery_failures"] = r.recovery_failures;
    j["certificate"] = certificate_to_json(r.certificate);
    return j;
}

inline void write_result(const std::string& path, const RunResult& r, const ScenarioConfig& cfg) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write result file: " + path);
    out << result_to_json(r, cfg).dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Parameter sweeps

/// One sweep cell: a parameter value with metrics averaged over the seeds.
struct SweepRow {
    double value = 0.0;
    double ae = 0.0;
    double ftv = 0.0;
    double tau_as = 0.0; // mean over seeds with finite tau_as
    bool tau_as_finite = false;
    double d_max_observed = 0.0;
    double k = 0.0;
    int recovery_failures = 0;
};

inline constexpr const char* kSweepParams[] = {"v_max", "t_R", "d_max", "offset", "seed"};

inline ScenarioConfig apply_sweep_param(ScenarioConfig cfg, const std::string& param,
                                        double value) {
    if (param == "v_max") cfg.svt.v_max = value;
    else if (param == "t_R") cfg.svt.t_R = value;
    else if (param == "d_max") cfg.svt.d_max = value;
    else if (param == "offset") {
        cfg.offset = value;
        cfg.svt.offset = value;
    } else if (param == "seed") cfg.seed = static_cast<std::uint64_t>(value);
    else throw ConfigError("sweep param: unknown parameter '" + param + "'");
    return cfg;
}

inline unsigned sweep_thread_count() {
    if (const char* env = std::getenv("SVT_SIM_THREADS")) {
        const long n = std::strtol(env, nullptr, 10);
        if (n >= 1) return static_cast<unsigned>(n);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

/// Run every (value, seed) cell — seeds are base seed + 0..seeds_per_value-1 —
/// and average the metrics per value. Cells execute in parallel up to
/// SVT_SIM_THREADS workers; the result is merged in deterministic order, so
/// output is independent of the thread count.
inline std::vector<SweepRow> sweep(const ScenarioConfig& base, const std::string& param,
                                   const std::vector<double>& values, int seeds_per_value = 4) {
    if (values.empty()) throw ConfigError("sweep: no values given");
    if (seeds_per_value < 1) throw ConfigError("sweep: seeds_per_value must be >= 1");

    struct Cell {
        ScenarioConfig cfg;
        RunResult result;
    };
    std::vector<Cell> cells;
    for (double v : values) {
        ScenarioConfig cfg = apply_sweep_param(base, param, v);
        for (int s = 0; s < seeds_per_value; ++s) {
            Cell cell;
            cell.cfg = cfg;
            cell.cfg.seed = cfg.seed + static_cast<std::uint64_t>(s);
            cells.push_back(std::move(cell));
        }
    }
    for (auto& cell : cells) validate_scenario(cell.cfg); // fail fast, before spawning

    std::atomic<std::size_t> next{0};
    const unsigned workers =
        std::min<unsigned>(sweep_thread_count(), static_cast<unsigned>(cells.size()));
    auto work = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            cells[i].result = run_scenario(cells[i].cfg).second;
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }

    std::vector<SweepRow> rows;
    for (std::size_t vi = 0; vi < values.size(); ++vi) {
        SweepRow row;
        row.value = values[vi];
        int tau_n = 0;
        for (int s = 0; s < seeds_per_value; ++s) {
            const RunResult& r = cells[vi * seeds_per_value + s].result;
            row.ae += r.ae;
            row.ftv += r.ftv;
            row.d_max_observed += r.d_max_observed;
            row.k += r.k;
            row.recovery_failures += r.recovery_failures;
            if (r.tau_as.finite) {
                row.tau_as += r.tau_as.value;
                ++tau_n;
            }
        }
        const double n = seeds_per_value;
        row.ae /= n;
        row.ftv /= n;
        row.d_max_observed /= n;
        row.k /= n;
        if (tau_n > 0) {
            row.tau_as /= tau_n;
            row.tau_as_finite = true;
        } else {
            row.tau_as = std::numeric_limits<double>::infinity();
        }
        rows.push_back(row);
    }
    return rows;
}

inline nlohmann::json sweep_to_json(const std::string& param, const std::vector<SweepRow>& rows,
                                    int seeds_per_value) {
    nlohmann::json j;
    j["param"] = param;
    j["seeds_per_value"] = seeds_per_value;
    j["rows"] = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json row;
        row["value"] = r.value;
        row["ae"] = r.ae;
        row["ftv"] = r.ftv;
        row["tau_as"] = r.tau_as_finite ? nlohmann::json(r.tau_as) : nlohmann::json(nullptr);
        row["tau_as_finite"] = r.tau_as_finite;
        row["d_max_observed"] = r.d_max_observed;
        row["k"] = r.k;
        row["recovery_failures"] = r.recovery_failures;
        j["rows"].push_back(row);
    }
    return j;
}

inline void write_sweep(const std::string& path, const std::string& param,
                        const std::vector<SweepRow>& rows, int seeds_per_value) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write sweep file: " + path);
    out << sweep_to_json(param, rows, seeds_per_value).dump(2) << '\n';
}

} // namespace svt

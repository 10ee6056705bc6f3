#pragma once

namespace svt {

/// Operating mode of the switched tracker. Tracking is the stable mode,
/// Recovery the unstable one.
enum class Mode { Tracking, Recovery };

inline const char* mode_name(Mode m) { return m == Mode::Tracking ? "tracking" : "recovery"; }

} // namespace svt

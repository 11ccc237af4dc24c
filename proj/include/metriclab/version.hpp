#pragma once

namespace metriclab {

// Embedded in every report so outputs are traceable yet byte-deterministic
// (no timestamps anywhere).
inline constexpr const char* kVersion = "0.1.0";

} // namespace metriclab

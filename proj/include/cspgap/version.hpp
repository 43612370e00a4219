#pragma once

namespace cspgap {

inline constexpr const char* kToolkitVersion = "0.3.0";
inline constexpr int kCertificateSchemaVersion = 1;

}  // namespace cspgap

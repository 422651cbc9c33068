#pragma once

namespace topgn {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kVersionBanner = "topgn 0.1.0 (scene_version 1, frames v1)";

} // namespace topgn

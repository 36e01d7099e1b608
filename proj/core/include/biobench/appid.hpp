#pragma once

#include <array>
#include <string>
#include <string_view>

namespace biobench {

// The eight benchmark applications.
enum class AppId { HCL, SeizDetSVM, SeizDetCNN, CWM, GCL, CoughDet, ECL, BPfree };

inline constexpr std::array<AppId, 8> kAllApps = {
    AppId::HCL, AppId::SeizDetSVM, AppId::SeizDetCNN, AppId::CWM,
    AppId::GCL, AppId::CoughDet,   AppId::ECL,        AppId::BPfree};

std::string to_string(AppId app);

// Case-insensitive; throws ConfigError on unknown names.
AppId parse_app_id(std::string_view name);

}  // namespace biobench

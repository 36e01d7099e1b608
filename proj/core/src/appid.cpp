#include "biobench/appid.hpp"

#include <algorithm>
#include <cctype>

#include "biobench/errors.hpp"

namespace biobench {

std::string to_string(AppId id) {
  switch (id) {
    case AppId::HCL: return "hcl";
    case AppId::SeizDetSVM: return "seizdetsvm";
    case AppId::SeizDetCNN: return "seizdetcnn";
    case AppId::CWM: return "cwm";
    case AppId::GCL: return "gcl";
    case AppId::CoughDet: return "coughdet";
    case AppId::ECL: return "ecl";
    case AppId::BPfree: return "bpfree";
  }
  return "unknown";
}

AppId parse_app_id(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (AppId id : kAllApps)
    if (lower == to_string(id)) return id;
  throw ConfigError("unknown application '" + std::string(name) + "'");
}

}  // namespace biobench

#pragma once

#include <sstream>
#include <string>

namespace icp4d {

// Verbosity from the ICP4D_LOG environment variable:
// error | warn (default) | info | debug
enum class LogLevel { kError = 0, kWarn = 1, kInfo = 2, kDebug = 3 };

LogLevel log_level();
void log_message(LogLevel level, const std::string& msg);

}  // namespace icp4d

#define ICP4D_LOG_AT(level, expr)                                   \
  do {                                                              \
    if (static_cast<int>(level) <= static_cast<int>(::icp4d::log_level())) { \
      std::ostringstream oss__;                                     \
      oss__ << expr;                                                \
      ::icp4d::log_message(level, oss__.str());                     \
    }                                                               \
  } while (0)

#define ICP4D_ERROR(expr) ICP4D_LOG_AT(::icp4d::LogLevel::kError, expr)
#define ICP4D_WARN(expr) ICP4D_LOG_AT(::icp4d::LogLevel::kWarn, expr)
#define ICP4D_INFO(expr) ICP4D_LOG_AT(::icp4d::LogLevel::kInfo, expr)
#define ICP4D_DEBUG(expr) ICP4D_LOG_AT(::icp4d::LogLevel::kDebug, expr)

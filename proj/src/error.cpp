#include "xlr/error.hpp"

namespace xlr {

namespace {
std::string join_diagnostics(const std::vector<std::string>& diagnostics) {
  std::string out = "invalid configuration";
  for (const auto& d : diagnostics) {
    out += "\n  ";
    out += d;
  }
  return out;
}
}  // namespace

ConfigError::ConfigError(std::vector<std::string> diagnostics)
    : Error(join_diagnostics(diagnostics)), diagnostics_(std::move(diagnostics)) {}

}  // namespace xlr

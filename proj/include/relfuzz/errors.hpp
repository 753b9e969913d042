#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace relfuzz {

/// Argument outside the mathematical domain of an operation (negative time,
/// non-positive model parameter, degenerate ramp, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Parameter estimation failed. When the optimizer got far enough to have an
/// iterate, it is carried along for diagnostics.
class EstimationError : public std::runtime_error {
 public:
  explicit EstimationError(const std::string& what) : std::runtime_error(what) {}
  EstimationError(const std::string& what, double last_a, double last_b)
      : std::runtime_error(what), last_a_(last_a), last_b_(last_b) {}

  std::optional<double> last_fault_content() const { return last_a_; }
  std::optional<double> last_detection_rate() const { return last_b_; }

 private:
  std::optional<double> last_a_;
  std::optional<double> last_b_;
};

/// Invalid or inconsistent run configuration. `key()` names the offending
/// configuration key, `line()` is 1-based (0 when not tied to a line).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, int line, const std::string& message)
      : std::runtime_error(format(key, line, message)), key_(std::move(key)), line_(line) {}

  const std::string& key() const { return key_; }
  int line() const { return line_; }

 private:
  static std::string format(const std::string& key, int line, const std::string& message) {
    std::string out = "config";
    if (line > 0) out += " line " + std::to_string(line);
    if (!key.empty()) out += " [" + key + "]";
    return out + ": " + message;
  }

  std::string key_;
  int line_;
};

}  // namespace relfuzz

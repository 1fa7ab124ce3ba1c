#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "vvlab/config.hpp"

namespace vvlab {

struct CommandOutput {
  std::string csv;
  std::string json;
  /// Set when the command finished but an invariant failed; the outputs are
  /// still written and the process exits with status 4.
  std::optional<std::string> violation;
};

/// Names accepted by run_command, in help order.
std::span<const std::string_view> command_names() noexcept;

/// Runs one command. Output bytes depend only on the config (threads aside,
/// which never change results).
CommandOutput run_command(std::string_view name, const ExperimentConfig& config);

}  // namespace vvlab

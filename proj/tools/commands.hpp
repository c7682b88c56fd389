#pragma once

#include <CLI11.hpp>

#include <functional>
#include <memory>

namespace kanbayes::cli {

// Registers every subcommand on app. After a successful parse, `action` runs the chosen
// command and returns its exit code.
void register_commands(CLI::App& app, std::function<int()>& action);

}  // namespace kanbayes::cli

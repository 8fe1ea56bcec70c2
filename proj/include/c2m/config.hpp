#pragma once

#include <string>

#include "c2m/engine.hpp"

namespace c2m {

// JSON object with every EvolutionConfig field optional; unknown keys are
// rejected. Throws std::invalid_argument on malformed content, IoError on
// unreadable files.
EvolutionConfig config_from_json_text(const std::string& text);
EvolutionConfig load_config_file(const std::string& path);

std::string config_to_json_text(const EvolutionConfig& cfg);

}  // namespace c2m

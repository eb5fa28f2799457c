#pragma once

#include <string>

#include "codesign/sim/tasks.hpp"

namespace codesign::sim {

/// Structured-text serialization of a sampled episode, for replay and
/// debugging. Round-trips exactly: read_episode(write_episode(ep)) == ep.
std::string episode_to_text(const TaskEpisode& episode);
TaskEpisode episode_from_text(const std::string& text);

void write_episode(const TaskEpisode& episode, const std::string& path);
TaskEpisode read_episode(const std::string& path);

}  // namespace codesign::sim

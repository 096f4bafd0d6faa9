// Copyright 2026 The FACA Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>

#include "faca/geometry.hpp"

namespace faca {

using RobotId = std::string;

/// What a robot tells its peers about itself during a negotiation.
struct MissionContext {
  RobotId robot_id;
  std::string mission_text;
  double priority = 1.0;  ///< mission urgency; changes only through priority events
  double distance_to_goal = 0.0;
  std::optional<std::string> urgency_note;
};

struct RobotState {
  RobotId id;
  Vec2 position;
  Vec2 velocity;
  double heading = 0.0;
  Vec2 goal;
  double priority = 1.0;  ///< right-of-way priority shared with the other robots
  double v_max = 15.0;
  MissionContext mission;
  std::optional<double> arrived_at;

  bool arrived() const noexcept { return arrived_at.has_value(); }
};

}  // namespace faca

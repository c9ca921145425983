#pragma once

#include <string>

#include "handkin/model.hpp"

namespace handkin {

/// Parses and validates a model document (UTF-8 JSON, schema below).
/// Throws ParseError on malformed input, ValidationError on invariant
/// violations; both name the offending element.
///
///   {
///     "name": "...",
///     "root_link": "...",
///     "joints": [{"name", "kind", "parent", "child",
///                 "origin": {"xyz": [m,m,m], "rpy": [rad,rad,rad]},
///                 "axis": [x,y,z], "limits": {"lower", "upper"}}],
///     "end_effectors": ["indextip", ...]
///   }
///
/// Unknown fields are rejected. "axis"/"limits" only on revolute joints.
/// Origins also accept {"axis_angle": {"axis": [...], "angle": rad}}.
KinematicModel load_model(const std::string& text);

/// Inverse of load_model up to floating-point round-trip of rotations.
std::string serialize_model(const KinematicModel& model);

}  // namespace handkin

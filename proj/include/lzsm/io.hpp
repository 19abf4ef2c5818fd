#pragma once
// Serialization: locale-independent numeric formatting, trajectory CSV/JSON,
// pulse-program JSON (schema version 1), and JSON reports for solver and
// planner results. All numbers are written in shortest round-trip form, so
// files parse back bit-exactly regardless of locale.

#include <string>

#include <json.hpp>

#include "lzsm/ode.hpp"
#include "lzsm/phase_control.hpp"
#include "lzsm/sequencer.hpp"

namespace lzsm {

using Json = nlohmann::json;

/// Shortest round-trip decimal form of x (std::to_chars); locale-independent.
std::string format_double(double x);

// ---------------------------------------------------------------------------
// Trajectories
// ---------------------------------------------------------------------------

/// CSV with a "# lzsm-trajectory v1" comment line, a header row, and one row
/// per sample: t, tau, epsilon, Re/Im of both amplitudes, populations, Bloch
/// components.
std::string trajectory_to_csv(const Trajectory& trajectory);

Json trajectory_to_json(const Trajectory& trajectory);

// ---------------------------------------------------------------------------
// Pulse programs (round-trip schema)
// ---------------------------------------------------------------------------

/// {"schema": "lzsm-pulse-program", "schema_version": 1, "segments": [...],
///  "annotations": {...}} with segment kinds "linear_sweep" and
/// "constant_wait".
Json pulse_sequence_to_json(const PulseSequence& sequence);

/// Inverse of the above. Throws std::invalid_argument on wrong schema
/// version, unknown segment kinds, or missing fields; segment physical
/// validity is checked too.
PulseSequence pulse_sequence_from_json(const Json& j);

// ---------------------------------------------------------------------------
// Result reports
// ---------------------------------------------------------------------------

Json window_to_json(const InterferenceWindow& window);
Json phase_solution_to_json(const PhaseSolution& solution);
Json plan_result_to_json(const PlanResult& plan);
Json comparison_to_json(const AimOdeComparison& comparison);

/// Objective names used in JSON ("zero_interference", "constructive", ...).
std::string objective_name(ControlObjective objective);

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

/// Write content to path via a sibling temporary plus rename, so a crash or
/// full disk never leaves a partial file at the destination.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace lzsm

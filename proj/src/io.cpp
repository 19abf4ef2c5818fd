#include "lzsm/io.hpp"

#include <array>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <system_error>

namespace lzsm {

std::string format_double(double x) {
  std::array<char, 32> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf.data(), end);
}

// ---------------------------------------------------------------------------
// Trajectories
// ---------------------------------------------------------------------------

std::string trajectory_to_csv(const Trajectory& trajectory) {
  std::string out;
  out.reserve(96 * trajectory.samples.size() + 256);
  out += "# lzsm-trajectory v1\n";
  out += "t,tau,epsilon,re_a0,im_a0,re_a1,im_a1,p0,p1,bloch_x,bloch_y,bloch_z\n";
  for (const auto& s : trajectory.samples) {
    out += format_double(s.t);
    out += ',';
    out += format_double(s.tau);
    out += ',';
    out += format_double(s.epsilon);
    out += ',';
    out += format_double(s.state.a0.real());
    out += ',';
    out += format_double(s.state.a0.imag());
    out += ',';
    out += format_double(s.state.a1.real());
    out += ',';
    out += format_double(s.state.a1.imag());
    out += ',';
    out += format_double(s.state.p0());
    out += ',';
    out += format_double(s.state.p1());
    out += ',';
    out += format_double(s.bloch.x);
    out += ',';
    out += format_double(s.bloch.y);
    out += ',';
    out += format_double(s.bloch.z);
    out += '\n';
  }
  return out;
}

namespace {

Json spinor_to_json(const Spinor& s) {
  return Json{{"a0", {s.a0.real(), s.a0.imag()}},
              {"a1", {s.a1.real(), s.a1.imag()}},
              {"basis", s.basis == Basis::Diabatic ? "diabatic" : "adiabatic"},
              {"p0", s.p0()},
              {"relative_phase", s.relative_phase()}};
}

}  // namespace

Json trajectory_to_json(const Trajectory& trajectory) {
  Json samples = Json::array();
  for (const auto& s : trajectory.samples) {
    samples.push_back(Json{{"t", s.t},
                           {"tau", s.tau},
                           {"epsilon", s.epsilon},
                           {"a0", {s.state.a0.real(), s.state.a0.imag()}},
                           {"a1", {s.state.a1.real(), s.state.a1.imag()}},
                           {"p0", s.state.p0()},
                           {"p1", s.state.p1()},
                           {"bloch", {s.bloch.x, s.bloch.y, s.bloch.z}}});
  }
  return Json{{"schema", "lzsm-trajectory"},
              {"schema_version", 1},
              {"norm_drift", trajectory.norm_drift},
              {"renormalizations", trajectory.renormalizations},
              {"steps_accepted", trajectory.steps_accepted},
              {"steps_rejected", trajectory.steps_rejected},
              {"samples", std::move(samples)}};
}

// ---------------------------------------------------------------------------
// Pulse programs
// ---------------------------------------------------------------------------

Json pulse_sequence_to_json(const PulseSequence& sequence) {
  Json segments = Json::array();
  for (const auto& seg : sequence.segments) {
    if (const auto* sweep = std::get_if<LinearSweep>(&seg)) {
      segments.push_back(Json{{"kind", "linear_sweep"},
                              {"velocity", sweep->velocity},
                              {"t_start", sweep->t_start},
                              {"t_end", sweep->t_end}});
    } else {
      const auto& wait = std::get<ConstantWait>(seg);
      segments.push_back(
          Json{{"kind", "constant_wait"}, {"epsilon0", wait.epsilon0}, {"duration", wait.duration}});
    }
  }
  return Json{{"schema", "lzsm-pulse-program"},
              {"schema_version", 1},
              {"segments", std::move(segments)},
              {"annotations", sequence.annotations}};
}

namespace {

double require_number(const Json& j, const char* key, const char* where) {
  if (!j.contains(key) || !j.at(key).is_number())
    throw std::invalid_argument(std::string(where) + ": missing or non-numeric field '" + key + "'");
  return j.at(key).get<double>();
}

}  // namespace

PulseSequence pulse_sequence_from_json(const Json& j) {
  static constexpr const char* kWhere = "pulse_sequence_from_json";
  if (!j.is_object()) throw std::invalid_argument(std::string(kWhere) + ": expected an object");
  if (!j.contains("schema_version") || !j.at("schema_version").is_number_integer() ||
      j.at("schema_version").get<int>() != 1)
    throw std::invalid_argument(std::string(kWhere) + ": unsupported or missing schema_version (need 1)");
  if (!j.contains("segments") || !j.at("segments").is_array())
    throw std::invalid_argument(std::string(kWhere) + ": missing 'segments' array");

  PulseSequence seq;
  for (const auto& s : j.at("segments")) {
    if (!s.is_object() || !s.contains("kind") || !s.at("kind").is_string())
      throw std::invalid_argument(std::string(kWhere) + ": segment without a 'kind' string");
    const std::string kind = s.at("kind").get<std::string>();
    if (kind == "linear_sweep") {
      seq.segments.push_back(LinearSweep{require_number(s, "velocity", kWhere),
                                         require_number(s, "t_start", kWhere),
                                         require_number(s, "t_end", kWhere)});
    } else if (kind == "constant_wait") {
      seq.segments.push_back(ConstantWait{require_number(s, "epsilon0", kWhere),
                                          require_number(s, "duration", kWhere)});
    } else {
      throw std::invalid_argument(std::string(kWhere) + ": unknown segment kind '" + kind + "'");
    }
  }
  if (j.contains("annotations")) {
    if (!j.at("annotations").is_object())
      throw std::invalid_argument(std::string(kWhere) + ": 'annotations' must be an object");
    for (const auto& [key, value] : j.at("annotations").items()) {
      if (!value.is_string())
        throw std::invalid_argument(std::string(kWhere) + ": annotation '" + key + "' must be a string");
      seq.annotations[key] = value.get<std::string>();
    }
  }
  try {
    seq.validate();
  } catch (const std::domain_error& e) {
    throw std::invalid_argument(std::string(kWhere) + ": invalid segment: " + e.what());
  }
  return seq;
}

// ---------------------------------------------------------------------------
// Result reports
// ---------------------------------------------------------------------------

std::string objective_name(ControlObjective objective) {
  switch (objective) {
    case ControlObjective::ZeroInterference: return "zero_interference";
    case ControlObjective::Constructive: return "constructive";
    case ControlObjective::Destructive: return "destructive";
    case ControlObjective::TargetProbability: return "target_probability";
    case ControlObjective::Transitionless: return "transitionless";
    case ControlObjective::TransitionlessAdiabatic: return "transitionless_adiabatic";
  }
  return "unknown";
}

Json window_to_json(const InterferenceWindow& window) {
  return Json{{"p_min", window.p_min}, {"p_max", window.p_max}, {"width", window.width()}};
}

Json phase_solution_to_json(const PhaseSolution& solution) {
  Json j{{"objective", objective_name(solution.objective)},
         {"feasible", solution.feasible},
         {"phi_i", solution.phi_i},
         {"period", solution.period},
         {"note", solution.note}};
  j["phi_alt"] = solution.phi_alt ? Json(*solution.phi_alt) : Json(nullptr);
  j["predicted_probability"] =
      solution.predicted_probability ? Json(*solution.predicted_probability) : Json(nullptr);
  j["window"] = solution.window ? window_to_json(*solution.window) : Json(nullptr);
  j["delta_bound"] = solution.delta_bound ? Json(*solution.delta_bound) : Json(nullptr);
  j["delta_value"] = solution.delta_value ? Json(*solution.delta_value) : Json(nullptr);
  return j;
}

Json plan_result_to_json(const PlanResult& plan) {
  Json phases = Json::array();
  for (const auto& p : plan.phases) phases.push_back(phase_solution_to_json(p));
  return Json{{"feasible", plan.feasible},
              {"system", Json{{"gap", plan.params.gap},
                              {"velocity", plan.params.velocity},
                              {"delta", plan.params.adiabaticity()}}},
              {"initial_state", spinor_to_json(plan.initial_state)},
              {"sequence", pulse_sequence_to_json(plan.sequence)},
              {"phases", std::move(phases)},
              {"passage_probabilities", plan.passage_probabilities},
              {"wait", Json{{"bias", plan.wait_bias},
                            {"duration", plan.wait_duration},
                            {"phase_applied", plan.wait_phase_applied}}},
              {"predicted_final", plan.predicted_final},
              {"first_passage_window", window_to_json(plan.first_passage_window)},
              {"reachable", window_to_json(plan.reachable)},
              {"note", plan.note}};
}

Json comparison_to_json(const AimOdeComparison& comparison) {
  return Json{{"p_predicted", comparison.p_aim},
              {"p_ode", comparison.p_ode},
              {"abs_error", comparison.abs_error},
              {"ode_seconds", comparison.ode_seconds}};
}

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("write_file_atomic: cannot open " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out.good()) {
      out.close();
      std::error_code ec;
      fs::remove(tmp, ec);
      throw std::runtime_error("write_file_atomic: short write to " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw std::runtime_error("write_file_atomic: rename to " + path + " failed");
  }
}

}  // namespace lzsm

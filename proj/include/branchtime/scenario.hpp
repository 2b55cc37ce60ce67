#pragma once
// JSON scenario files describe a branched timeline: an optional horizon, an
// ordered list of split events, and identifications.  Points are addressed by
// branch path plus coordinate, resolved against the structure built so far,
// so later events may name branches created by earlier ones.
//
//   {"horizon": [-10, 10],
//    "events": [{"kind": "division", "path": [], "t": 0, "branches": 2}],
//    "identifications": [{"from": {"path": [1], "t": 3},
//                         "to":   {"path": [],  "t": -3}}]}

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "branchtime/structure.hpp"

namespace branchtime {

namespace detail {

inline double number_field(const nlohmann::json& obj, const char* key,
                           const std::string& where) {
  if (!obj.contains(key))
    throw structure_error(where + " is missing \"" + key + "\"");
  const nlohmann::json& v = obj.at(key);
  if (!v.is_number())
    throw structure_error(where + " field \"" + key + "\" must be a number");
  return v.get<double>();
}

inline std::vector<int> path_field(const nlohmann::json& obj,
                                   const std::string& where) {
  if (!obj.contains("path")) return {};
  const nlohmann::json& v = obj.at("path");
  if (!v.is_array())
    throw structure_error(where + " field \"path\" must be an array");
  std::vector<int> path;
  for (const nlohmann::json& e : v) {
    if (!e.is_number_integer())
      throw structure_error(where + " path entries must be integers");
    path.push_back(e.get<int>());
  }
  return path;
}

inline TimePoint located_point(const TemporalStructure& s,
                               const nlohmann::json& obj,
                               const std::string& where) {
  if (!obj.is_object()) throw structure_error(where + " must be an object");
  return locate(s, path_field(obj, where), number_field(obj, "t", where));
}

}  // namespace detail

// Builds the structure a scenario document describes.  Throws
// nlohmann::json::parse_error on malformed JSON and structure_error on a
// document that parses but does not describe a buildable structure.
inline TemporalStructure read_scenario(
    const std::string& text,
    std::optional<Horizon> horizon_override = std::nullopt) {
  const nlohmann::json doc = nlohmann::json::parse(text);
  if (!doc.is_object())
    throw structure_error("scenario must be a JSON object");

  Horizon horizon;
  if (horizon_override) {
    horizon = *horizon_override;
  } else if (doc.contains("horizon")) {
    const nlohmann::json& h = doc.at("horizon");
    if (!h.is_array() || h.size() != 2 || !h[0].is_number() ||
        !h[1].is_number())
      throw structure_error("\"horizon\" must be an array of two numbers");
    horizon = Horizon{h[0].get<double>(), h[1].get<double>()};
  }

  TemporalStructure s = line(horizon);

  if (doc.contains("events")) {
    const nlohmann::json& events = doc.at("events");
    if (!events.is_array())
      throw structure_error("\"events\" must be an array");
    for (std::size_t i = 0; i < events.size(); ++i) {
      const std::string where = "event " + std::to_string(i);
      const nlohmann::json& ev = events[i];
      if (!ev.is_object()) throw structure_error(where + " must be an object");
      if (!ev.contains("kind") || !ev.at("kind").is_string())
        throw structure_error(where + " is missing a string \"kind\"");
      const std::string kind = ev.at("kind").get<std::string>();
      const double t = detail::number_field(ev, "t", where);
      if (!ev.contains("branches") || !ev.at("branches").is_number_integer())
        throw structure_error(where + " needs an integer \"branches\"");
      const int b = ev.at("branches").get<int>();
      const TimePoint at = locate(s, detail::path_field(ev, where), t);
      if (kind == "division")
        s = split_division(std::move(s), at.segment, t, b);
      else if (kind == "sticking")
        s = split_sticking(std::move(s), at.segment, t, b);
      else if (kind == "point")
        s = split_point(std::move(s), at.segment, t, b);
      else
        throw structure_error(where + " has unknown kind \"" + kind + "\"");
    }
  }

  if (doc.contains("identifications")) {
    const nlohmann::json& idents = doc.at("identifications");
    if (!idents.is_array())
      throw structure_error("\"identifications\" must be an array");
    for (std::size_t i = 0; i < idents.size(); ++i) {
      const std::string where = "identification " + std::to_string(i);
      const nlohmann::json& ident = idents[i];
      if (!ident.is_object() || !ident.contains("from") ||
          !ident.contains("to"))
        throw structure_error(where + " must have \"from\" and \"to\" points");
      const TimePoint from =
          detail::located_point(s, ident.at("from"), where + " \"from\"");
      const TimePoint to =
          detail::located_point(s, ident.at("to"), where + " \"to\"");
      s = identify(std::move(s), from, to);
    }
  }

  return s;
}

}  // namespace branchtime

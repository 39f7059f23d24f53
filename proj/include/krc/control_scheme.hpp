#pragma once

#include <string>
#include <string_view>

#include "krc/torus.hpp"

namespace krc {

/// Propagation protocols. SolA/SolB are the two kick-potential families with
/// rotational on-orbit stability (53-degree and pi rotations); the Improved
/// variants add the frequency-doubled correction that cancels the linear
/// term of V'' about the orbit.
enum class ControlScheme {
  Uncontrolled,
  UnwindM,
  SolA,
  SolAImproved,
  SolB,
  SolBImproved,
};

inline std::string_view to_string(ControlScheme s) {
  switch (s) {
    case ControlScheme::Uncontrolled: return "uncontrolled";
    case ControlScheme::UnwindM: return "unwind";
    case ControlScheme::SolA: return "solution-a";
    case ControlScheme::SolAImproved: return "solution-a-improved";
    case ControlScheme::SolB: return "solution-b";
    case ControlScheme::SolBImproved: return "solution-b-improved";
  }
  return "unknown";
}

inline ControlScheme parse_scheme(std::string_view name) {
  if (name == "uncontrolled") return ControlScheme::Uncontrolled;
  if (name == "unwind") return ControlScheme::UnwindM;
  if (name == "solution-a") return ControlScheme::SolA;
  if (name == "solution-a-improved") return ControlScheme::SolAImproved;
  if (name == "solution-b") return ControlScheme::SolB;
  if (name == "solution-b-improved") return ControlScheme::SolBImproved;
  throw config_error("unknown control scheme: " + std::string(name));
}

/// True for the schemes that carry designed kick potentials.
inline bool has_designed_potential(ControlScheme s) {
  return s == ControlScheme::SolA || s == ControlScheme::SolAImproved ||
         s == ControlScheme::SolB || s == ControlScheme::SolBImproved;
}

}  // namespace krc

#include "eulab/errors.hpp"

namespace eulab {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::chart_domain: return "chart_domain";
    case ErrorCode::near_link: return "near_link";
    case ErrorCode::evaluation: return "evaluation";
    case ErrorCode::numeric: return "numeric";
    case ErrorCode::stiffness: return "stiffness";
    case ErrorCode::section: return "section";
    case ErrorCode::amplitude: return "amplitude";
    case ErrorCode::validation: return "validation";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

}  // namespace eulab

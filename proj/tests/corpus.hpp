#pragma once

#include <string>

#include "orbt/io.hpp"
#include "orbt/presentation.hpp"
#include "orbt/rep.hpp"

namespace corpus {

inline std::string pres_path(const std::string& name) {
  return std::string(ORBT_DATA_DIR) + "/presentations/" + name;
}

inline std::string rep_path(const std::string& name) {
  return std::string(ORBT_DATA_DIR) + "/reps/" + name;
}

inline orbt::CheckedPresentation presentation(const std::string& cfg) {
  return orbt::validate_presentation(orbt::load_presentation(pres_path(cfg)));
}

inline orbt::CheckedRep rep(const orbt::CheckedPresentation& cp, const std::string& rep_file) {
  return orbt::validate_rep(cp, orbt::load_rep_json(rep_path(rep_file), cp.p));
}

}  // namespace corpus

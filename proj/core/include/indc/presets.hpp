#ifndef INDC_PRESETS_HPP
#define INDC_PRESETS_HPP

#include <string>
#include <vector>

#include "indc/study.hpp"

namespace indc {

/// Bundled experiment grids at desk scale; `full` restores the original
/// resolution (long runtimes, kept out of CI).
struct Preset {
  std::string name;
  std::vector<StudySpec> studies;
};

Preset get_preset(const std::string& name, bool full = false);
std::vector<std::string> preset_names();

}  // namespace indc

#endif

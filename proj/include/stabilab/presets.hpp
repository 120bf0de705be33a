#pragma once

#include <string>
#include <vector>

#include "stabilab/model.hpp"

namespace stabilab {

/// A built-in benchmark system: the SDDE, its componentwise bound matrices, a
/// suggested initial segment, and the weight vector / epsilon suggested in the
/// source material (reported as-is by the certificate pipeline, whether or not
/// they verify).
struct Preset {
    std::string name;
    SddeSystem system;
    CoeffBounds bounds;
    InitialSegment initial;
    Vec claimed_p;
    double claimed_epsilon = 0.0;
};

Preset preset(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace stabilab

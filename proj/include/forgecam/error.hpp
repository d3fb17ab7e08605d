#pragma once

#include <stdexcept>
#include <string>

namespace forgecam {

enum class ErrorCode {
    schema = 1,
    dangling_reference = 2,
    invalid_geometry = 3,
    degenerate_surface = 4,
    not_machinable = 5,
    ambiguous_dihedral = 6,
    classification_straddle = 7,
    validation = 8,
    missing_tool = 9,
    blend_inconsistent = 10,
    toolpath = 11,
    gcode_parse = 12,
    io = 13,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

}  // namespace forgecam

#pragma once

#include <stdexcept>
#include <string>

namespace degreescope {

// Error taxonomy mirrors the CLI exit codes: input data problems (1),
// configuration/parameter problems (2), broken internal invariants (3).

class input_error : public std::runtime_error {
public:
    explicit input_error(const std::string& msg) : std::runtime_error(msg) {}
};

class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

class internal_error : public std::runtime_error {
public:
    explicit internal_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace degreescope

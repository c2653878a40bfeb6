#pragma once

#include <stdexcept>

namespace hsr {

struct ShapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PaddingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TrainingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace hsr

#pragma once

#include <stdexcept>
#include <string>

namespace kgrank {

// Malformed input file (bad arity, bad number, duplicate entry...).
// Messages carry "path:line" where a location is known.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad configuration: unknown key, unparsable value, missing required path.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace kgrank

#pragma once

#include <stdexcept>
#include <string>

namespace gridrisk {

// Error taxonomy maps onto CLI exit codes: ConfigError/ParseError -> 1,
// ValidationError/NumericError -> 2.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : Error {
    using Error::Error;
};

struct ValidationError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct NumericError : Error {
    using Error::Error;
};

}  // namespace gridrisk

#pragma once

#include <stdexcept>
#include <string>

namespace l4dec {

// Error taxonomy maps onto CLI exit codes: IoError -> 1,
// InvalidArgument -> 2, NumericalError -> 3.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidArgument : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

struct NumericalError : Error {
    using Error::Error;
};

}  // namespace l4dec

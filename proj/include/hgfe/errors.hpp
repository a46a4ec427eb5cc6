#pragma once

#include <stdexcept>
#include <string>

namespace hgfe {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ShapeError : Error {
    using Error::Error;
};

struct ContractError : Error {
    using Error::Error;
};

struct NumericError : Error {
    using Error::Error;
};

struct PartitionError : Error {
    using Error::Error;
};

struct FormatError : Error {
    FormatError(const std::string& msg, std::size_t offset)
        : Error(msg + " (at byte offset " + std::to_string(offset) + ")"), byte_offset(offset) {}
    std::size_t byte_offset;
};

struct EmptyInputError : Error {
    using Error::Error;
};

}  // namespace hgfe

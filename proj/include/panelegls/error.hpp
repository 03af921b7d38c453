#pragma once

#include <stdexcept>
#include <string>

namespace panelegls {

/// Base for every failure raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input: files, configs, panel contents.
class InputError : public Error {
public:
    using Error::Error;
};

/// A numerical or statistical procedure could not produce a result.
class EstimationError : public Error {
public:
    using Error::Error;
};

}  // namespace panelegls

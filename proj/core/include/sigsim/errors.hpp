#pragma once

#include <stdexcept>
#include <string>

namespace sigsim {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad or inconsistent input data (files, schemas, rows). CLI exit code 1.
class InputError : public Error {
public:
    using Error::Error;
};

// A computation could not be carried out (insufficient history, empty
// candidate set, violated precondition). CLI exit code 2.
class ComputeError : public Error {
public:
    using Error::Error;
};

} // namespace sigsim

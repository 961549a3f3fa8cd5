#pragma once

#include <stdexcept>
#include <string>

namespace seqseed {

/// Bad input text: edge lists, CSV records, grid configs.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A numeric parameter outside its domain (n <= m, p outside [0,1], ...).
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A caller broke a precondition that the API cannot recover from,
/// e.g. injecting a seed that is already active.
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace seqseed

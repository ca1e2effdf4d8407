#pragma once

#include <stdexcept>
#include <string>

namespace negdim {

// Base for every error raised by the library. Callers that only care about
// "something about the input was wrong" can catch this one type.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NotHermitian : public Error { using Error::Error; };
class NoConvergence : public Error { using Error::Error; };
class DimensionMismatch : public Error { using Error::Error; };
class InvalidDimension : public Error { using Error::Error; };
class InvalidState : public Error { using Error::Error; };
class OutOfTriangle : public Error { using Error::Error; };
class NotAxisymmetric : public Error { using Error::Error; };
class RankTooLarge : public Error { using Error::Error; };
class InvalidK : public Error { using Error::Error; };
class InvalidScenario : public Error { using Error::Error; };
class Infeasible : public Error { using Error::Error; };
class ParseError : public Error { using Error::Error; };

}  // namespace negdim

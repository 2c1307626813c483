#ifndef CALIB_ERRORS_HPP
#define CALIB_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace calib {

struct OutOfRangeError : std::invalid_argument {
    std::size_t index;  // 1-based parameter index
    OutOfRangeError(std::size_t idx, const std::string& what)
        : std::invalid_argument(what), index(idx) {}
};

struct WrongArityError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct AllZeroSeriesError : std::domain_error {
    AllZeroSeriesError() : std::domain_error("series has zero total mass") {}
};

struct LengthMismatchError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct UnsupportedAlphaError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct UnsupportedDimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct IndexOverflowError : std::overflow_error {
    IndexOverflowError() : std::overflow_error("sobol sequence exhausted") {}
};

struct BadRangeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct PoolExhaustedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TooFewRowsError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct SingleClassError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ArityMismatchError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct EmptyDbError : std::runtime_error {
    EmptyDbError() : std::runtime_error("ground-truth database is empty") {}
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SchemaError : std::runtime_error {
    std::size_t line;  // 1-based line number of the offending record
    SchemaError(std::size_t ln, const std::string& what)
        : std::runtime_error(what), line(ln) {}
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace calib

#endif

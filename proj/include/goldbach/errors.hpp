// errors.hpp
//
// Exception types shared by the library. Domain violations use
// std::domain_error, index/range violations std::out_of_range.

#ifndef GOLDBACH_ERRORS_HPP
#define GOLDBACH_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace goldbach {

/// A request exceeds a documented memory or size capacity.
class resource_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text. line() is 1-based; 0 means "whole stream".
class parse_error : public std::runtime_error {
public:
    parse_error(const std::string& what, std::size_t line)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace goldbach

#endif  // GOLDBACH_ERRORS_HPP

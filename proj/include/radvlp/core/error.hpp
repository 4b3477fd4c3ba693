/**
 * @file error.hpp
 * @brief Exception hierarchy shared by every radvlp module.
 *
 * Two families exist because the command-line tool maps them to different
 * exit codes: malformed or missing input (2) versus a numerical or
 * algorithmic failure on otherwise valid input (1).
 */

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace radvlp {

/// Input could not be parsed or violates a documented precondition.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input parsed fine but the computation itself could not complete.
class ComputeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Schema violation at a known line of a line-delimited file.
class LineError : public InputError {
public:
    LineError(std::string source, std::size_t line, const std::string& what)
        : InputError(source + ":" + std::to_string(line) + ": " + what),
          source_(std::move(source)),
          line_(line) {}

    const std::string& source() const noexcept { return source_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string source_;
    std::size_t line_;
};

}  // namespace radvlp

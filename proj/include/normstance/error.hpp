#pragma once

#include <stdexcept>
#include <string>

namespace normstance {

// Input does not satisfy a documented format or invariant. The CLI maps this
// to exit status 2.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A parse failure tied to a line of an input file.
class ParseError : public ValidationError {
public:
    ParseError(std::string path, std::size_t line, const std::string& what)
        : ValidationError(path + ":" + std::to_string(line) + ": " + what),
          path_(std::move(path)),
          line_(line) {}

    const std::string& path() const noexcept { return path_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string path_;
    std::size_t line_;
};

// Training produced a NaN/Inf objective.
class NonFiniteError : public std::runtime_error {
public:
    NonFiniteError(int round, std::size_t batch, const std::string& what)
        : std::runtime_error("non-finite " + what + " at round " + std::to_string(round) +
                             ", batch " + std::to_string(batch)),
          round_(round),
          batch_(batch) {}

    int round() const noexcept { return round_; }
    std::size_t batch() const noexcept { return batch_; }

private:
    int round_;
    std::size_t batch_;
};

}  // namespace normstance

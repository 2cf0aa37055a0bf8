#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ep {

// Input files that do not follow the expected grammar. Carries file + line.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& file, std::size_t line, const std::string& what)
        : std::runtime_error(file + ":" + std::to_string(line) + ": " + what),
          file_(file), line_(line) {}

    const std::string& file() const { return file_; }
    std::size_t line() const { return line_; }

private:
    std::string file_;
    std::size_t line_;
};

// Well-formed file with inconsistent content (bad header counts, dimension mismatch).
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Vector dimensions do not agree.
class ShapeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class EmptyLabelSetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NoNeighborsError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class MissingRelationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class CannotSampleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InsufficientClassError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidSplitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Non-finite parameter detected after an optimizer step.
class TrainingDivergedError : public std::runtime_error {
public:
    TrainingDivergedError(std::size_t epoch, std::size_t batch)
        : std::runtime_error("training diverged: non-finite parameter after update in epoch " +
                             std::to_string(epoch) + ", batch " + std::to_string(batch)),
          epoch_(epoch), batch_(batch) {}

    std::size_t epoch() const { return epoch_; }
    std::size_t batch() const { return batch_; }

private:
    std::size_t epoch_;
    std::size_t batch_;
};

} // namespace ep

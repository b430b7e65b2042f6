#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bridgescore {

// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IdNotFoundError : public Error {
public:
    explicit IdNotFoundError(const std::string& what_id)
        : Error("identifier not found: " + what_id), id_(what_id) {}
    const std::string& id() const noexcept { return id_; }

private:
    std::string id_;
};

class InvalidInputError : public Error {
public:
    using Error::Error;
};

class EmptyInputError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

// Input file problems. `line` is 1-based and counts the header row; 0 means
// the error is not tied to a line.
class SchemaError : public Error {
public:
    SchemaError(const std::string& msg, std::size_t line = 0)
        : Error(line ? "line " + std::to_string(line) + ": " + msg : msg), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class RowError : public SchemaError {
public:
    RowError(const std::string& msg, std::size_t line) : SchemaError(msg, line) {}
};

class DuplicateError : public SchemaError {
public:
    DuplicateError(const std::string& msg, std::size_t line) : SchemaError(msg, line) {}
};

class MissingNoteError : public Error {
public:
    explicit MissingNoteError(const std::string& note_id)
        : Error("no creation time for note " + note_id), note_id_(note_id) {}
    const std::string& note_id() const noexcept { return note_id_; }

private:
    std::string note_id_;
};

class DivergenceError : public Error {
public:
    explicit DivergenceError(int epoch)
        : Error("training diverged at epoch " + std::to_string(epoch)), epoch_(epoch) {}
    int epoch() const noexcept { return epoch_; }

private:
    int epoch_;
};

class PipelineError : public Error {
public:
    PipelineError(const std::string& stage, const std::string& msg)
        : Error("pipeline stage '" + stage + "': " + msg), stage_(stage) {}
    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

class UndefinedRatioError : public Error {
public:
    using Error::Error;
};

}  // namespace bridgescore

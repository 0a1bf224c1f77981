// Copyright (c) 2026, DREAM prover contributors
// SPDX-License-Identifier: Apache-2.0
//
// Exception hierarchy shared by every module.  The CLI maps each family onto
// a process exit code (see exit_code_for).

#pragma once

#include <stdexcept>
#include <string>

namespace dream {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Caller violated a documented argument range.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// An operation was called in a state its contract forbids.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// A prompt template referenced a context field that was not supplied.
class TemplateError : public Error {
public:
    TemplateError(std::string field, const std::string& what)
        : Error(what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Model backend failures.  Environment-class: they abort a theorem but not a run.
class BackendError : public Error {
public:
    using Error::Error;
};

class BackendUnavailable : public BackendError {
public:
    using BackendError::BackendError;
};

class ScriptExhausted : public BackendError {
public:
    using BackendError::BackendError;
};

/// Missing checker binary, unreadable workspace, and similar host problems.
class EnvironmentError : public Error {
public:
    using Error::Error;
};

class TreeConstructionError : public Error {
public:
    using Error::Error;
};

/// Input text did not follow the expected grammar.  Positions are 1-based.
class ParseError : public Error {
public:
    ParseError(const std::string& what, int line, int column)
        : Error(what + " at line " + std::to_string(line) + ", column " + std::to_string(column)),
          line_(line), column_(column) {}
    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    int line_;
    int column_;
};

class UnsupportedDialect : public Error {
public:
    explicit UnsupportedDialect(std::string construct)
        : Error("unsupported TPTP dialect: '" + construct + "' (only fof is accepted)"),
          construct_(std::move(construct)) {}
    const std::string& construct() const noexcept { return construct_; }

private:
    std::string construct_;
};

/// Lean source is not shaped as required (e.g. not exactly one theorem).
class StructureError : public Error {
public:
    using Error::Error;
};

class UndefinedMetric : public Error {
public:
    using Error::Error;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

enum class ExitCode : int { Success = 0, Usage = 1, Environment = 2, Validation = 3 };

inline ExitCode exit_code_for(const std::exception& e) {
    if (dynamic_cast<const EnvironmentError*>(&e) || dynamic_cast<const BackendError*>(&e))
        return ExitCode::Environment;
    if (dynamic_cast<const ValidationError*>(&e) || dynamic_cast<const StructureError*>(&e) ||
        dynamic_cast<const ParseError*>(&e) || dynamic_cast<const UnsupportedDialect*>(&e))
        return ExitCode::Validation;
    return ExitCode::Usage;
}

} // namespace dream

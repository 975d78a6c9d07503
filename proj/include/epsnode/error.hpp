// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The epsnode Authors
// ------------------------------------------------------------------------

#ifndef EPSNODE_ERROR_HPP
#define EPSNODE_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace epsnode {

// Root of every error thrown by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Inputs outside the mathematical domain of an operation (point outside the room,
// dimension mismatch, negative error component, ...).
class DomainError : public Error
{
public:
    using Error::Error;
};

// API misuse: missing PCA model for the PCA pipeline, empty search lists, mismatched model.
class UsageError : public Error
{
public:
    using Error::Error;
};

// Violated overcompleteness constraint when building an autoencoder.
class ConstraintError : public Error
{
public:
    using Error::Error;
};

// Malformed file content. Line numbers are 1-based; 0 means "not line oriented".
class ParseError : public Error
{
public:
    ParseError(const std::string &what, std::size_t line)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Well-formed content that violates a data invariant (e.g. CIR length != 152).
class SchemaError : public ParseError
{
public:
    using ParseError::ParseError;
};

// Degenerate numerical input: all-zero CIR, zero-variance PCA data, empty density mass.
class NumericalError : public Error
{
public:
    using Error::Error;
};

class TrainingDiverged : public Error
{
public:
    TrainingDiverged(std::size_t epoch, std::size_t batch, double learning_rate, double loss)
        : Error("non-finite loss (" + std::to_string(loss) + ") at epoch " + std::to_string(epoch) +
                ", batch " + std::to_string(batch) + ", learning rate " + std::to_string(learning_rate)),
          epoch_(epoch), batch_(batch), learning_rate_(learning_rate) {}

    std::size_t epoch() const noexcept { return epoch_; }
    std::size_t batch() const noexcept { return batch_; }
    double learning_rate() const noexcept { return learning_rate_; }

private:
    std::size_t epoch_;
    std::size_t batch_;
    double learning_rate_;
};

} // namespace epsnode

#endif

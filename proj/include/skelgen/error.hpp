// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace skelgen {

// Failure categories. The CLI maps each one onto a process exit code.
enum class ErrorKind {
    Io,                 // unreadable/unwritable files
    Parse,              // malformed input, schema violations
    StructureNotFound,  // no table grid recovered from an image
    OcrBackend,         // recognizer failed
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline Error io_error(const std::string& what) { return Error(ErrorKind::Io, what); }
inline Error parse_error(const std::string& what) { return Error(ErrorKind::Parse, what); }
inline Error ocr_error(const std::string& what) { return Error(ErrorKind::OcrBackend, what); }

}  // namespace skelgen

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace stqa {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unreadable or unwritable file.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed structured input (JSON, record lines, question lines).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Frame index or window outside [1, T], or reversed.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Name not found in the active vocabulary.
class VocabularyError : public Error {
 public:
  using Error::Error;
};

/// Unsatisfiable generator configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Prediction records that do not resolve (dangling child ids, duplicates).
class RecordError : public Error {
 public:
  using Error::Error;
};

enum class ProgramErrorKind { Syntax, UnknownRule, Arity, Vocabulary, NoTemplate };

inline const char* to_string(ProgramErrorKind k) {
  switch (k) {
    case ProgramErrorKind::Syntax: return "Syntax";
    case ProgramErrorKind::UnknownRule: return "UnknownRule";
    case ProgramErrorKind::Arity: return "Arity";
    case ProgramErrorKind::Vocabulary: return "Vocabulary";
    case ProgramErrorKind::NoTemplate: return "NoTemplate";
  }
  return "?";
}

class ProgramError : public Error {
 public:
  ProgramError(ProgramErrorKind kind, std::size_t position, const std::string& message)
      : Error(message), kind_(kind), position_(position) {}

  ProgramErrorKind kind() const { return kind_; }
  /// Byte offset into the program text; 0 when not applicable.
  std::size_t position() const { return position_; }

 private:
  ProgramErrorKind kind_;
  std::size_t position_;
};

}  // namespace stqa

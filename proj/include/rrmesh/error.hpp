#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace rrmesh {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An element whose signed measure is at or below the degeneracy threshold.
class DegenerateElement : public Error {
 public:
  explicit DegenerateElement(const std::string& what,
                             std::optional<std::size_t> cell = std::nullopt)
      : Error(what), cell_(cell) {}
  std::optional<std::size_t> cell() const noexcept { return cell_; }

 private:
  std::optional<std::size_t> cell_;
};

class InvalidMesh : public Error {
 public:
  using Error::Error;
};

class NonPlanarPatch : public Error {
 public:
  using Error::Error;
};

class NoFixedVertices : public Error {
 public:
  using Error::Error;
};

class DisconnectedMesh : public Error {
 public:
  using Error::Error;
};

class IndefiniteMatrix : public Error {
 public:
  using Error::Error;
};

class LineSearchFailed : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class UnsupportedFormat : public Error {
 public:
  using Error::Error;
};

class EmptyMesh : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class InvalidSpec : public Error {
 public:
  using Error::Error;
};

class WouldInvert : public Error {
 public:
  using Error::Error;
};

}  // namespace rrmesh

#pragma once

#include <stdexcept>
#include <string>

namespace mswm {

// Base class for all model errors; what() carries the full message.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid user-supplied parameters or inconsistent configuration.
struct ConfigError : Error {
  using Error::Error;
};

// Mesh connectivity violations (non-manifold, bad counts, id range).
struct TopologyError : Error {
  using Error::Error;
};

// Degenerate geometry (zero lengths, non-positive areas, ...).
struct GeometryError : Error {
  using Error::Error;
};

// File could not be parsed; line is 1-based, 0 when unknown.
struct ParseError : Error {
  int line;
  ParseError(const std::string& msg, int line_) : Error(msg), line(line_) {}
};

// Unsupported file format version.
struct VersionError : Error {
  using Error::Error;
};

// API misuse (mismatched arguments, wrong call order).
struct UsageError : Error {
  using Error::Error;
};

// Vertex thickness reached zero or below during a potential-vorticity
// evaluation; names the offending vertex.
struct DryVertexError : Error {
  int vertex;
  DryVertexError(const std::string& msg, int v) : Error(msg), vertex(v) {}
};

}  // namespace mswm

#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace episim {

using NodeId = std::uint32_t;

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

class InvalidFamily : public Error {
 public:
  using Error::Error;
};

// A piece (or graph) that was required to be connected is not.
class ConnectivityError : public Error {
 public:
  ConnectivityError(const std::string& what, NodeId unreachable)
      : Error(what + " (unreachable node " + std::to_string(unreachable) + ")"),
        unreachable_(unreachable) {}
  NodeId unreachable() const noexcept { return unreachable_; }

 private:
  NodeId unreachable_;
};

// RGG chunk partition found an empty tile; the caller may resample the graph.
class PartitionDegenerate : public Error {
 public:
  explicit PartitionDegenerate(std::size_t tile)
      : Error("partition degenerate: tile " + std::to_string(tile) + " is empty"),
        tile_(tile) {}
  std::size_t tile() const noexcept { return tile_; }

 private:
  std::size_t tile_;
};

class SizeLimit : public Error {
 public:
  using Error::Error;
};

class NonTermination : public Error {
 public:
  using Error::Error;
};

class PolicyContractError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace episim

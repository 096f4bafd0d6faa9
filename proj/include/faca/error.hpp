// Copyright 2026 The FACA Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace faca {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NearZeroVector : public Error {
 public:
  NearZeroVector() : Error("vector norm below normalization threshold") {}
};

class ZeroNetForce : public Error {
 public:
  ZeroNetForce() : Error("net force vanishes; heading undefined") {}
};

class InsideObstacle : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Negotiation
class SamePair : public Error {
 public:
  using Error::Error;
};

class UnknownRobot : public Error {
 public:
  using Error::Error;
};

class TransportError : public Error {
 public:
  using Error::Error;
};

class MalformedReply : public Error {
 public:
  using Error::Error;
};

// Metrics
class TooFewRobots : public Error {
 public:
  using Error::Error;
  TooFewRobots() : Error("metric needs at least two robots") {}
};

class ZeroMakespan : public Error {
 public:
  using Error::Error;
  ZeroMakespan() : Error("makespan is zero") {}
};

class Incomplete : public Error {
 public:
  using Error::Error;
};

// Shell
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Carries the name of the offending field so callers can report it.
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace faca

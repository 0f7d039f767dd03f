// Copyright 2026 The pgas-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pgas {

enum class ErrorCode {
  invalid_config,
  runtime_busy,
  heap_exhausted,
  invalid_address,
  invalid_argument,
  unsupported,
  misaligned,
  send_after_shutdown,
  remote_failure,
  link_failure,
  geometry_mismatch,
  protocol,
  pending_operations,
  already_finalized,
  invalid_team,
  capacity,
  collective_mismatch,
  io,
  insufficient_samples,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace pgas

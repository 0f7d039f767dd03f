// Copyright 2026 The pgas-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <string>
#include <vector>

namespace pgas::acceptance {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string name;
  std::function<Outcome()> run;
};

std::vector<Criterion> all_criteria();

/// Second daemon for the internode criterion, started as a child process.
int internode_child(const std::string& endpoint, unsigned long long seed, const std::string& dump);

}  // namespace pgas::acceptance

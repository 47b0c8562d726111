// Copyright 2026 The QPSAN Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
/**
 * @file
 * Numerical claims suite: each claim checks one analytic statement about
 * the circuit against brute-force simulation and records its witness.
 */
#pragma once

#include "qpsan/circuit.hpp"
#include "qpsan/version.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace qpsan {

struct ClaimResult {
    std::string id;
    std::string description;
    bool passed = false;
    double tolerance = 0;
    /// Worst-case errors, counts and example points backing the verdict.
    nlohmann::json witness;
    double seconds = 0;
};

struct VerifyOptions {
    /// Circuit that is simulated. Closed forms always assume `convention`,
    /// so a mismatching order here acts as an injected bug.
    CircuitOptions simulated{};
    EntanglerOrder convention = EntanglerOrder::ControlZeroFirst;
    std::uint64_t seed = 2024;
    /// Claim ids to run; empty runs all.
    std::vector<std::string> only;
};

/// All claim ids in execution order.
const std::vector<std::string> &claim_ids();

/// Throws std::invalid_argument for an id outside claim_ids().
std::vector<ClaimResult> run_claims(const VerifyOptions &options = {});

bool all_passed(const std::vector<ClaimResult> &results);

/// {"schema_version", "passed", "claims": [...]}
nlohmann::json claims_report(const std::vector<ClaimResult> &results);

} // namespace qpsan

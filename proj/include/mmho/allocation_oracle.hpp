#pragma once

// Brute-force reference for the per-BS allocation, written independently of
// the production search. Linked into test binaries only.

#include <span>

#include "mmho/allocation.hpp"

namespace mmho::oracle {

inline constexpr int kMaxUesPerBs = 10;

/// Enumerates every subset of every BS. Throws std::invalid_argument when a
/// BS holds more than kMaxUesPerBs UEs.
AllocationResult oracle_allocate(std::span<const ShareRequest> requests, int num_bs);

}  // namespace mmho::oracle

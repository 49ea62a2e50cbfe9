#pragma once

#include <string>
#include <string_view>

namespace herald {

/// Hex-encoded SHA-256 of `data` (64 lowercase hex chars).
std::string digest(std::string_view data);

}  // namespace herald

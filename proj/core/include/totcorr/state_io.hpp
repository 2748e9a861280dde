#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "totcorr/states.hpp"

namespace totcorr {

// State documents are JSON objects:
//   {"dims": [2, 2], "amplitudes": [[re, im], ...]}           (pure, length D)
//   {"dims": [2, 2], "matrix": [[[re, im], ...], ...]}         (D x D)
// Numbers are written with 17 significant digits.

State parse_state(std::string_view text);
std::string serialize_state(const State& state);

State read_state_file(const std::filesystem::path& path);
void write_state_file(const std::filesystem::path& path, const State& state);

} // namespace totcorr

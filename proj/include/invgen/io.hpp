#pragma once

#include <string>
#include <vector>

#include "invgen/boolfunc.hpp"

namespace invgen {

// Function file format:
//   {"kind":"ltf","n":N,"weights":[...],"theta":T}
//   {"kind":"dnf","n":N,"terms":[[+-v,...],...]}   (signed 1-based literals)
// Extended kinds "const_true"/"const_false" round-trip the remaining
// representations the CLI can emit.
std::string function_to_json(const BoolFunc& f);
BoolFunc function_from_json(const std::string& text);

BoolFunc load_function_file(const std::string& path);
void save_function_file(const std::string& path, const BoolFunc& f);

// Sample file: one 0/1 string of length n per line, newline-terminated.
std::vector<Assignment> load_sample_file(const std::string& path, int expect_n = -1);
void save_sample_file(const std::string& path, const std::vector<Assignment>& samples);

} // namespace invgen

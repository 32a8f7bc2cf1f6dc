#pragma once

#include "gfproj/common.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace gfproj {

// Flat "key = value" text; '#' starts a comment anywhere on a line.
using KeyValues = std::map<std::string, std::string>;

KeyValues parse_key_values(std::istream& in, const std::string& origin = "config");
KeyValues load_key_values(const std::string& path);
void write_key_values(std::ostream& out, const KeyValues& kv);

// Typed lookups; malformed or missing values raise ParameterError naming the key.
std::string get_string(const KeyValues& kv, const std::string& key);
double get_double(const KeyValues& kv, const std::string& key);
long long get_int(const KeyValues& kv, const std::string& key);
std::uint64_t get_uint64(const KeyValues& kv, const std::string& key);
bool get_bool(const KeyValues& kv, const std::string& key);
std::vector<std::string> get_list(const KeyValues& kv, const std::string& key);  // comma separated

}  // namespace gfproj

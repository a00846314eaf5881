#pragma once

// Flat `key = value` text used by plan and simulation config files.
// '#' starts a comment; blank lines are ignored; lists are comma-separated.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace dcpd {

struct KeyValue {
  std::string key;
  std::string value;
  int line = 0;
};

std::vector<KeyValue> parse_key_values(std::string_view text);

int parse_int(const KeyValue& kv);
std::uint64_t parse_u64(const KeyValue& kv);
double parse_double(const KeyValue& kv);
std::vector<std::string> split_list(std::string_view value);
std::vector<int> parse_int_list(const KeyValue& kv);
std::vector<double> parse_double_list(const KeyValue& kv);

std::string read_text_file(const std::string& path);

}  // namespace dcpd

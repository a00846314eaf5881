#include "dcpd/keyvalue.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "dcpd/error.hpp"

namespace dcpd {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(const KeyValue& kv, const char* what) {
  fail(ErrorCode::config, "line " + std::to_string(kv.line) + ": " + kv.key + " = '" +
                              kv.value + "' is not " + what);
}

template <typename T>
T parse_number(std::string_view text, const KeyValue& kv, const char* what) {
  text = trim(text);
  T out{};
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, out);
  if (text.empty() || res.ec != std::errc{} || res.ptr != end) bad_value(kv, what);
  return out;
}

}  // namespace

std::vector<KeyValue> parse_key_values(std::string_view text) {
  std::vector<KeyValue> out;
  int line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      fail(ErrorCode::config, "line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    KeyValue kv{std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1))), line_no};
    if (kv.key.empty()) fail(ErrorCode::config, "line " + std::to_string(line_no) + ": empty key");
    out.push_back(std::move(kv));
  }
  return out;
}

int parse_int(const KeyValue& kv) { return parse_number<int>(kv.value, kv, "an integer"); }

std::uint64_t parse_u64(const KeyValue& kv) {
  return parse_number<std::uint64_t>(kv.value, kv, "an unsigned integer");
}

double parse_double(const KeyValue& kv) { return parse_number<double>(kv.value, kv, "a number"); }

std::vector<std::string> split_list(std::string_view value) {
  std::vector<std::string> out;
  value = trim(value);
  if (value.empty()) return out;
  while (true) {
    const auto comma = value.find(',');
    out.emplace_back(trim(value.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    value = value.substr(comma + 1);
  }
  return out;
}

std::vector<int> parse_int_list(const KeyValue& kv) {
  std::vector<int> out;
  for (const auto& item : split_list(kv.value)) out.push_back(parse_number<int>(item, kv, "an integer list"));
  return out;
}

std::vector<double> parse_double_list(const KeyValue& kv) {
  std::vector<double> out;
  for (const auto& item : split_list(kv.value)) {
    out.push_back(parse_number<double>(item, kv, "a number list"));
  }
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io, "cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace dcpd

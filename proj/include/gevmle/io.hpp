#pragma once

#include <cstddef>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gevmle {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest decimal text that parses back to exactly `x` ("inf", "-inf", "nan" for specials).
[[nodiscard]] std::string format_double(double x);

/// Strict decimal parse of the whole token; throws ParseError.
[[nodiscard]] double parse_double(std::string_view token);
[[nodiscard]] long long parse_integer(std::string_view token);
[[nodiscard]] bool parse_bool(std::string_view token);

[[nodiscard]] std::string_view trim(std::string_view s) noexcept;

/// One value per line; `#` comments and blank lines are skipped.
[[nodiscard]] std::vector<double> read_values(std::istream& in);
[[nodiscard]] std::vector<double> read_values_file(const std::string& path);

/// Writes `header` lines prefixed with "# ", then one value per line.
void write_values(std::ostream& out, const std::vector<double>& values,
                  const std::vector<std::string>& header = {});

/// `head:key=value,key=value` as used by distribution and growth-rule specs.
struct KeyedSpec {
  std::string head;
  std::map<std::string, double, std::less<>> params;

  [[nodiscard]] double get(std::string_view key, double fallback) const;
};

[[nodiscard]] KeyedSpec parse_keyed_spec(std::string_view spec);

/// Ordered `key = value` records; `#` comments and blank lines skipped.
/// Duplicate keys are a ParseError.
using KeyValueList = std::vector<std::pair<std::string, std::string>>;
[[nodiscard]] KeyValueList read_key_values(std::istream& in);

}  // namespace gevmle

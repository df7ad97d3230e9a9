#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace credaug {

/// Streaming RFC-4180 record reader over an in-memory buffer: quoted fields,
/// doubled quotes, embedded separators/newlines, and CRLF line endings.
class CsvReader {
 public:
  explicit CsvReader(std::string_view text) : text_(text) {}

  /// Reads the next record into `fields`. Returns false at end of input.
  bool next(std::vector<std::string>& fields);

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

/// Quotes a field only when it contains a separator, quote, or newline.
std::string csv_escape(std::string_view field);
std::string csv_join(const std::vector<std::string>& fields);

}  // namespace credaug

#pragma once

#include <string>

namespace minivc {

/// A half-open region of source text, 1-based line/column.
struct SourceSpan {
  std::string file;
  int line = 1;
  int col = 1;
  int length = 0;

  std::string str() const {
    return file + ":" + std::to_string(line) + ":" + std::to_string(col);
  }
};

inline bool operator==(const SourceSpan &a, const SourceSpan &b) {
  return a.file == b.file && a.line == b.line && a.col == b.col &&
         a.length == b.length;
}

} // namespace minivc

#pragma once

#include <charconv>
#include <fstream>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace seirs::csv {

/// Shortest decimal representation that round-trips; always '.' as separator.
inline std::string format(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  if (res.ec != std::errc{}) throw std::runtime_error("csv: number formatting failed");
  return std::string(buf, res.ptr);
}

/// A CSV cell: either a number or a literal string (not quoted; callers
/// only emit identifiers).
struct Cell {
  Cell(double v) : text(format(v)) {}
  Cell(int v) : text(std::to_string(v)) {}
  Cell(std::size_t v) : text(std::to_string(v)) {}
  Cell(std::string s) : text(std::move(s)) {}
  Cell(const char* s) : text(s) {}
  Cell(bool b) : text(b ? "true" : "false") {}
  std::string text;
};

class Writer {
 public:
  Writer(const std::string& path, std::string_view header) : out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("csv: cannot open " + path);
    out_ << header << '\n';
  }

  void row(std::initializer_list<Cell> cells) {
    bool first = true;
    for (const auto& c : cells) {
      if (!first) out_ << ',';
      out_ << c.text;
      first = false;
    }
    out_ << '\n';
  }

  void row(const std::vector<Cell>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i].text;
    }
    out_ << '\n';
  }

  void close() {
    out_.close();
    if (!out_) throw std::runtime_error("csv: write failed");
  }

 private:
  std::ofstream out_;
};

}  // namespace seirs::csv

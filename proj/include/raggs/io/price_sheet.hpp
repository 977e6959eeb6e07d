#pragma once

// Price sheet, a small INI-style file:
//
//   [rerank]        # currency per 1K tokens
//   rerank-2.5 = 0.00005
//   [generator]     # input currency per 1M tokens
//   gpt-5 = 1.25

#include <filesystem>
#include <sstream>
#include <string>

#include "raggs/clq.hpp"
#include "raggs/core/error.hpp"
#include "raggs/io/jsonl.hpp"

namespace raggs::io {

namespace detail {
inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}
}  // namespace detail

inline clq::PriceSheet parse_price_sheet(const std::string& text, const std::string& source = "<price sheet>") {
  clq::PriceSheet sheet;
  std::istringstream in(text);
  std::string line, section;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (auto c = line.find_first_of("#;"); c != std::string::npos) line.erase(c);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(source, n, "unterminated section header");
      section = detail::trim(line.substr(1, line.size() - 2));
      if (section != "rerank" && section != "generator")
        throw ParseError(source, n, "unknown section '" + section + "' (expected rerank or generator)");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(source, n, "expected 'tier = price'");
    if (section.empty()) throw ParseError(source, n, "price outside a [rerank] or [generator] section");
    const std::string tier = detail::trim(line.substr(0, eq));
    clq::Money price;
    try {
      price = clq::Money::parse(detail::trim(line.substr(eq + 1)));
    } catch (const InvalidInput& e) {
      throw ParseError(source, n, e.what());
    }
    if (price.micros < 0) throw ParseError(source, n, "price must be >= 0");
    auto& table = section == "rerank" ? sheet.rerank_per_1k : sheet.generator_input_per_1m;
    if (!table.emplace(tier, price).second) throw ParseError(source, n, "duplicate tier '" + tier + "'");
  }
  return sheet;
}

inline clq::PriceSheet load_price_sheet(const std::filesystem::path& path) {
  return parse_price_sheet(read_file(path), path.string());
}

}  // namespace raggs::io

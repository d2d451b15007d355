#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "hokcm/lexicon.hpp"

namespace hokcm::test {

inline std::string fixture(const std::string& name) {
  return std::string(HOKCM_FIXTURE_DIR) + "/" + name;
}

inline std::vector<std::string> fixture_lines(const std::string& name) {
  std::ifstream in(fixture(name), std::ios::binary);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

inline const Lexicon& fixture_lexicon() {
  static const Lexicon lex = Lexicon::load(fixture("lexicon.tsv"));
  return lex;
}

inline Lexicon parse_lexicon(const std::string& text) {
  std::istringstream in(text);
  return Lexicon::parse(in, "inline.tsv");
}

}  // namespace hokcm::test

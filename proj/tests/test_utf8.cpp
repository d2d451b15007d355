#include <doctest.h>

#include "hokcm/errors.hpp"
#include "hokcm/utf8.hpp"

using namespace hokcm;

TEST_CASE("decode and encode round-trip mixed scripts") {
  const std::string text = "這是tsı̍t款𪜶，OK";
  const auto cps = utf8::decode(text);
  CHECK(cps.size() == 12);
  CHECK(utf8::encode(cps) == text);
  CHECK(utf8::length(text) == 12);
}

TEST_CASE("split_chars yields one string per code point") {
  const auto chars = utf8::split_chars("毋通！");
  REQUIRE(chars.size() == 3);
  CHECK(chars[0] == "毋");
  CHECK(chars[2] == "！");
  CHECK(utf8::split_chars("").empty());
}

TEST_CASE("malformed input throws") {
  CHECK_THROWS_AS(utf8::decode("\xE6\xAF"), Error);
  CHECK_THROWS_AS(utf8::decode("\xFF"), Error);
  CHECK_THROWS_AS(utf8::decode("\xE6\x41\x41"), Error);
}

TEST_CASE("character classes") {
  CHECK(utf8::is_punct(U'，'));
  CHECK(utf8::is_punct(U'。'));
  CHECK(utf8::is_punct(U','));
  CHECK_FALSE(utf8::is_punct(U'毋'));
  CHECK(utf8::is_digit(U'7'));
  CHECK(utf8::is_digit(U'７'));
  CHECK(utf8::is_latin_letter(U'ı'));
  CHECK(utf8::is_latin_letter(U'ā'));
  CHECK_FALSE(utf8::is_latin_letter(U'×'));
  CHECK(utf8::is_combining(0x030D));
  CHECK(utf8::is_han(U'佮'));
  CHECK(utf8::is_han(U'𪜶'));
  CHECK(utf8::is_roman_numeral(U'Ⅻ'));
  CHECK(utf8::is_language_independent(U'　'));
  CHECK_FALSE(utf8::is_language_independent(U'a'));
}

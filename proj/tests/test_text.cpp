#include <sstream>

#include "doctest.h"
#include "lyricgenre/csv.hpp"
#include "lyricgenre/error.hpp"
#include "lyricgenre/random.hpp"
#include "lyricgenre/text.hpp"

using namespace lyricgenre;

TEST_CASE("utf8 decode and encode round trip") {
  const std::string s = "Cora\xC3\xA7\xC3\xA3o \xE2\x86\x90 \xF0\x9F\x8E\xB5";
  CHECK(text::encode_utf8(text::decode_utf8(s)) == s);
  CHECK(text::decode_utf8("\xC3").front() == 0xFFFD);
  CHECK(text::decode_utf8("\xC0\xAF").front() == 0xFFFD);  // overlong
}

TEST_CASE("case folding keeps diacritics") {
  CHECK(text::fold_case("CORA\xC3\x87\xC3\x83O") == "cora\xC3\xA7\xC3\xA3o");
  CHECK(text::fold_case("Pop/Rock") == "pop/rock");
  CHECK(text::fold_case("\xC3\x89MILE") == "\xC3\xA9mile");
}

TEST_CASE("whitespace helpers") {
  CHECK(text::trim("  a b \n") == "a b");
  CHECK(text::collapse_whitespace("  Hip \t  Hop ") == "Hip Hop");
  CHECK(text::word_runs("it's a-ok!") == std::vector<std::string>{"it", "s", "a", "ok"});
  CHECK(text::codepoint_length("n\xC3\xA3o") == 3);
}

TEST_CASE("csv reader handles quotes, embedded newlines and CRLF") {
  std::istringstream in("a,b\r\n\"x,1\",\"line1\nline2 \"\"q\"\"\"\nlast,\n");
  csv::Reader r(in);
  auto h = r.next();
  REQUIRE(h);
  CHECK(h->fields == std::vector<std::string>{"a", "b"});
  auto row = r.next();
  REQUIRE(row);
  CHECK(row->line == 2);
  CHECK(row->fields[0] == "x,1");
  CHECK(row->fields[1] == "line1\nline2 \"q\"");
  auto last = r.next();
  REQUIRE(last);
  CHECK(last->line == 4);
  CHECK(last->fields == std::vector<std::string>{"last", ""});
  CHECK_FALSE(r.next());
}

TEST_CASE("csv unterminated quote is a data error") {
  std::istringstream in("\"abc");
  csv::Reader r(in);
  CHECK_THROWS_AS(r.next(), DataError);
}

TEST_CASE("csv join quotes only when needed") {
  CHECK(csv::join({"a", "b,c", "d\"e"}) == "a,\"b,c\",\"d\"\"e\"");
}

TEST_CASE("rng is reproducible and below() stays in range") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
  Rng r(7);
  std::vector<int> hist(5, 0);
  for (int i = 0; i < 5000; ++i) {
    const auto v = r.below(5);
    REQUIRE(v < 5);
    ++hist[v];
  }
  for (int h : hist) CHECK(h > 850);
}

TEST_CASE("seed hasher is order sensitive") {
  CHECK(SeedHasher(1).add("a").add("b").value() != SeedHasher(1).add("b").add("a").value());
  CHECK(SeedHasher(1).add("ab").value() != SeedHasher(1).add("a").add("b").value());
}

#include <doctest.h>

#include <sstream>

#include "tweetalpha/bars.hpp"
#include "tweetalpha/error.hpp"

using namespace tweetalpha;
using namespace tweetalpha::bars;

namespace {

const char kHeader[] =
    "<DATE>\t<TIME>\t<OPEN>\t<HIGH>\t<LOW>\t<CLOSE>\t<TICKVOL>\t<VOL>\t"
    "<SPREAD>\n";

std::string row(const char* date, const char* time, const char* o,
                const char* h, const char* l, const char* c) {
  std::string out;
  out += date;
  out += '\t';
  out += time;
  out += '\t';
  out += o;
  out += '\t';
  out += h;
  out += '\t';
  out += l;
  out += '\t';
  out += c;
  out += "\t100\t20000\t5\n";
  return out;
}

BarParseResult parse(const std::string& text, const BarFormatConfig& cfg = {}) {
  std::istringstream in(text);
  return parse_bars(in, cfg);
}

}  // namespace

TEST_CASE("parses a decorated MetaTrader-style file") {
  std::string text = kHeader;
  text += row("2021.10.27", "10:30:00", "25.10", "25.21", "25.05", "25.20");
  text += row("2021.10.27", "10:35:00", "25.20", "25.25", "25.11", "25.12");

  BarParseResult r = parse(text);
  REQUIRE(r.series.size() == 2);
  CHECK(r.dropped_outside_session == 0);
  const Bar& b = r.series.bars()[0];
  CHECK(b.timestamp == make_instant({2021, 10, 27, 10, 30, 0}));
  CHECK(b.open == Decimal::parse("25.10"));
  CHECK(b.high == Decimal::parse("25.21"));
  CHECK(b.low == Decimal::parse("25.05"));
  CHECK(b.close == Decimal::parse("25.20"));
  CHECK(b.tickvol == 100);
  CHECK(b.vol == 20000);
  CHECK(b.spread == 5);
}

TEST_CASE("shifts file timestamps into the local offset") {
  BarFormatConfig cfg;
  cfg.file_tz_offset_hours = 0;  // file written in UTC
  cfg.local_tz_offset_hours = -3;
  std::string text = kHeader;
  text += row("2021.10.27", "13:30:00", "25.10", "25.21", "25.05", "25.20");
  BarParseResult r = parse(text, cfg);
  REQUIRE(r.series.size() == 1);
  CHECK(r.series.bars()[0].timestamp ==
        make_instant({2021, 10, 27, 10, 30, 0}));
}

TEST_CASE("drops out-of-session rows and counts them") {
  std::string text = kHeader;
  text += row("2021.10.27", "09:00:00", "25.10", "25.21", "25.05", "25.20");
  text += row("2021.10.27", "10:30:00", "25.10", "25.21", "25.05", "25.20");
  text += row("2021.10.27", "16:45:00", "25.20", "25.25", "25.11", "25.12");
  text += row("2021.10.27", "16:50:00", "25.12", "25.25", "25.11", "25.13");

  BarParseResult r = parse(text);  // session 10:30 .. 16:50 exclusive
  CHECK(r.series.size() == 2);
  CHECK(r.dropped_outside_session == 2);
}

TEST_CASE("rejects malformed rows with their line number") {
  auto bad = [](const std::string& row_text, const char* what) {
    std::string text = kHeader;
    text += row_text;
    CHECK_THROWS_WITH_AS(parse(text), doctest::Contains(what), Error);
  };
  bad(row("2021.10.27", "10:31:00", "25.10", "25.21", "25.05", "25.20"),
      "not aligned");
  bad(row("2021.10.27", "10:30:00", "0.00", "25.21", "0.00", "25.20"),
      "non-positive price");
  bad(row("2021.10.27", "10:30:00", "25.10", "25.11", "25.05", "25.20"),
      "OHLC range violation");
  bad(row("2021-10-27", "10:30:00", "25.10", "25.21", "25.05", "25.20"),
      "line 2");
  std::string dup = kHeader;
  dup += row("2021.10.27", "10:30:00", "25.10", "25.21", "25.05", "25.20");
  dup += row("2021.10.27", "10:30:00", "25.10", "25.21", "25.05", "25.20");
  CHECK_THROWS_WITH_AS(parse(dup), doctest::Contains("duplicate bar"), Error);

  std::istringstream empty("");
  CHECK_THROWS_AS(parse_bars(empty, BarFormatConfig{}), Error);

  std::string missing_col =
      "<DATE>\t<TIME>\t<OPEN>\t<HIGH>\t<LOW>\t<CLOSE>\t<TICKVOL>\t<VOL>\n";
  missing_col += "2021.10.27\t10:30:00\t25.10\t25.21\t25.05\t25.20\t100\t1\n";
  CHECK_THROWS_WITH_AS(parse(missing_col), doctest::Contains("spread"), Error);
}

TEST_CASE("unsorted input comes out sorted") {
  std::string text = kHeader;
  text += row("2021.10.27", "10:40:00", "25.20", "25.25", "25.11", "25.12");
  text += row("2021.10.27", "10:30:00", "25.10", "25.21", "25.05", "25.20");
  BarParseResult r = parse(text);
  REQUIRE(r.series.size() == 2);
  CHECK(r.series.bars()[0].timestamp < r.series.bars()[1].timestamp);
}

TEST_CASE("serialize then parse is the identity") {
  BarFormatConfig cfg;
  cfg.file_tz_offset_hours = 0;  // exercise the shift in both directions
  cfg.local_tz_offset_hours = -3;
  std::string text = kHeader;
  text += row("2021.10.27", "13:30:00", "25.10", "25.21", "25.05", "25.20");
  text += row("2021.10.27", "13:35:00", "25.20", "25.25", "25.11", "25.12");
  text += row("2021.10.28", "13:30:00", "25.12", "25.30", "25.02", "25.28");
  BarParseResult first = parse(text, cfg);

  std::ostringstream out;
  serialize_bars(out, first.series, cfg);
  BarParseResult second = parse(out.str(), cfg);
  CHECK(first.series == second.series);
}

TEST_CASE("window flooring and lookup") {
  Instant t = make_instant({2021, 10, 27, 10, 33, 20});
  CHECK(floor_to_window(t, 300) == make_instant({2021, 10, 27, 10, 30, 0}));
  CHECK(floor_to_window(t, 60) == make_instant({2021, 10, 27, 10, 33, 0}));

  std::string text = kHeader;
  text += row("2021.10.27", "10:30:00", "25.10", "25.21", "25.05", "25.20");
  text += row("2021.10.28", "10:35:00", "25.20", "25.25", "25.11", "25.12");
  BarParseResult r = parse(text);

  const Bar* hit = r.series.find(make_instant({2021, 10, 27, 10, 30, 0}));
  REQUIRE(hit != nullptr);
  CHECK(hit->close == Decimal::parse("25.20"));
  CHECK(r.series.find(make_instant({2021, 10, 27, 10, 35, 0})) == nullptr);
  CHECK_THROWS_AS(r.series.find(make_instant({2021, 10, 27, 10, 31, 0})),
                  Error);

  CHECK(r.series.trading_days() ==
        std::vector<std::int64_t>{day_key(make_instant({2021, 10, 27, 0, 0, 0})),
                                  day_key(make_instant({2021, 10, 28, 0, 0, 0}))});
}

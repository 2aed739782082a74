#include "meandim/run.hpp"

#include <gtest/gtest.h>

using namespace meandim::run;

namespace {

std::string where_of(const Json& config) {
  try {
    run_config(config);
  } catch (const ConfigError& e) {
    return e.where();
  }
  return "";
}

}  // namespace

TEST(Config, SyntaxErrorPosition) {
  try {
    parse_config_text("{\n  \"requests\": [\n  ]\n  \"x\": 1\n}");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.where(), "line 4, column 3");
  }
}

TEST(Config, ErrorsPointAtTheField) {
  EXPECT_EQ(where_of(Json::object()), "/requests");
  EXPECT_EQ(where_of(Json{{"requests", Json::array()}, {"extra", 1}}), "/extra");
  EXPECT_EQ(where_of(Json::parse(R"({"requests":[{"op":"nope"}]})")), "/requests/0/op");
  EXPECT_EQ(where_of(Json::parse(R"({"requests":[{"op":"entropy","system":"full:2","eps":"x","family":"intervals:1..2"}]})")),
            "/requests/0/eps");
  EXPECT_EQ(where_of(Json::parse(R"({"requests":[{"op":"tile","group":"free:2","F":"ball:1","tau":"1/5","sofic":{"d":10,"q":1}}]})")),
            "/requests/0/sofic/q");
  EXPECT_EQ(where_of(Json::parse(R"({"requests":[{"op":"smith","id":"a","matrix":[[1]]},{"op":"smith","id":"a","matrix":[[1]]}]})")),
            "/requests/1/id");
  EXPECT_EQ(where_of(Json::parse(R"({"requests":[{"op":"group-info","group":"free:x"}]})")), "/requests/0/group");
}

TEST(Config, NothingRunsWhenALaterRequestIsInvalid) {
  Json config = Json::parse(R"({"requests":[{"op":"smith","random":{"count":1000000,"max_size":32,"bound":9}},
                                            {"op":"mdim"}]})");
  EXPECT_THROW(check_config(config), ConfigError);
  EXPECT_THROW(run_config(config), ConfigError);
}

TEST(Config, NumbersAndStringsAgree) {
  auto a = run_config(Json::parse(R"({"requests":[{"op":"entropy","system":"golden-mean","eps":0.5,"family":"intervals:1..4"}]})"));
  auto b = run_config(Json::parse(R"({"requests":[{"op":"entropy","system":"golden-mean","eps":"1/2","family":"intervals:1..4"}]})"));
  EXPECT_EQ(a.tsv, b.tsv);
}

TEST(Report, ShapeAndMasking) {
  auto out = run_config(Json::parse(R"({"requests":[{"op":"smith","id":"m","matrix":[[2,4],[6,8]]}]})"));
  EXPECT_FALSE(out.any_error);
  const Json& r = out.report["results"][0];
  EXPECT_EQ(r["status"], "ok");
  EXPECT_EQ(r["data"]["invariants"], Json::parse(R"(["2","4"])"));
  Json masked = mask_timings(out.report);
  EXPECT_EQ(masked["results"][0]["timing_ms"], 0);
  EXPECT_EQ(out.tsv.substr(0, tsv_header().size()), tsv_header());
  EXPECT_NE(out.tsv.find("m:smith\t"), std::string::npos);
}

TEST(Report, RuntimeErrorsAreRecorded) {
  auto out = run_config(Json::parse(R"({"requests":[{"op":"microstates","system":"full:2","F":"interval:1..1",
      "delta":"1/4","sofic":{"d":12},"mode":"exhaustive","budget":5}]})"));
  EXPECT_TRUE(out.any_error);
  EXPECT_EQ(out.report["results"][0]["status"], "error");
  EXPECT_EQ(out.report["summary"]["errors"], 1);
}

TEST(Report, SeedsAreRegistered) {
  auto out = run_config(Json::parse(R"({"requests":[{"op":"tile","id":"t","group":"free:2","F":"ball:1","tau":"1/5",
      "sofic":{"construction":"quotient","d_min":100,"d_max":800},"seeds":[3,4]}]})"));
  EXPECT_EQ(out.report["seeds"], Json::parse(R"([{"request":"t","seeds":[3,4]}])"));
}

#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "cspgap/families.hpp"
#include "cspgap/io.hpp"

using namespace cspgap;
using io::json;

namespace {

std::filesystem::path data(const char* name) { return std::filesystem::path(CSPGAP_DATA) / name; }

std::filesystem::path scratch_dir() {
  auto dir = std::filesystem::temp_directory_path() / ("cspgap_io_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST(Rational, ParseAndPrint) {
  EXPECT_EQ(parse_rational("4/5"), Rational(4, 5));
  EXPECT_EQ(parse_rational("6/8"), Rational(3, 4));
  EXPECT_EQ(parse_rational("-2"), -2);
  EXPECT_EQ(to_string(Rational(1)), "1/1");
  EXPECT_EQ(to_string(Rational(-3, 6)), "-1/2");
  EXPECT_THROW(parse_rational("0.5"), ParseError);
  EXPECT_THROW(parse_rational("1/0"), ParseError);
  EXPECT_THROW(parse_rational("1/-2"), ParseError);
  EXPECT_THROW(parse_rational(""), ParseError);
}

TEST(Files, DataFamilies) {
  EXPECT_EQ(*io::load_family(data("cut.json")), *families::cut());
  EXPECT_EQ(*io::load_family(data("dicut.json")), *families::dicut());
}

TEST(Files, InstanceWithRelativeFamilyPath) {
  auto c5 = io::load_instance(data("c5.json"));
  EXPECT_EQ(c5, builders::cycle(families::cut(), 5));
}

TEST(Files, InstanceRoundTrip) {
  auto c5 = builders::cycle(families::dicut(), 4);
  EXPECT_EQ(io::instance_from_json(io::instance_to_json(c5)), c5);
}

TEST(Files, ZeroWeightDroppedWithWarning) {
  json j = {{"family", io::family_to_json(*families::cut())},
            {"n", 3},
            {"constraints", {{{"f", "cut"}, {"vars", {1, 2}}, {"w", 0}}, {{"f", "cut"}, {"vars", {2, 3}}}}}};
  std::ostringstream warn;
  auto inst = io::instance_from_json(j, {}, &warn);
  EXPECT_EQ(inst.m(), 1u);
  EXPECT_NE(warn.str().find("weight 0"), std::string::npos);
}

TEST(Files, ParseErrorsCarryLineAndColumn) {
  try {
    io::parse_text("{\n  \"q\": 2,\n  \"k\": ,\n}", "bad.json");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(Files, SemanticErrors) {
  EXPECT_THROW(io::family_from_json(json{{"q", 2}, {"k", 2}, {"predicates", {{{"name", "a"}, {"table", {0, 1, 1}}}}}}),
               ParseError);
  EXPECT_THROW(io::family_from_json(json{{"q", 2}, {"k", 2}, {"predicates", {{{"name", "a"}, {"table", {0, 1, 2, 0}}}}}}),
               ParseError);
  json inst = {{"family", io::family_to_json(*families::cut())},
               {"n", 2},
               {"constraints", {{{"f", "cut"}, {"vars", {1, 1}}}}}};
  EXPECT_THROW(io::instance_from_json(inst), ParseError);
  inst["constraints"] = {{{"f", "nope"}, {"vars", {1, 2}}}};
  EXPECT_THROW(io::instance_from_json(inst), ParseError);
}

TEST(Certificate, JsonRoundTrip) {
  SearchConfig cfg;
  cfg.family = families::cut();
  cfg.n_max = 5;
  cfg.max_constraints = 5;
  cfg.gamma = 1;
  cfg.beta = Rational(4, 5);
  cfg.falsifier_seeds = 2;
  auto cert = *search_gap(cfg).certificate;
  auto j = io::certificate_to_json(cert);
  auto back = io::certificate_from_json(io::parse_text(io::dump(j), "cert"));
  EXPECT_EQ(io::dump(io::certificate_to_json(back)), io::dump(j));
  EXPECT_EQ(io::verify_certificate_json(j).outcome, VerifyOutcome::pass);

  auto tampered = j;
  tampered["toolkit_version"] = "9.9.9";
  auto rep = io::verify_certificate_json(tampered);
  EXPECT_EQ(rep.outcome, VerifyOutcome::fail);
  EXPECT_EQ(rep.clause, "digest mismatch");

  tampered = j;
  tampered["marginal_vector"][0]["p"] = "1/3";
  rep = io::verify_certificate_json(tampered);
  EXPECT_EQ(rep.clause, "marginal mismatch at (cut,1,0)");
}

TEST(Certificate, DigestIsSha256) {
  EXPECT_EQ(io::sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Certificate, FileWrite) {
  auto dir = scratch_dir();
  io::write_file(dir / "x.json", "{}\n");
  EXPECT_EQ(io::read_file(dir / "x.json"), "{}\n");
  std::filesystem::remove_all(dir);
}

#include "doctest.h"

#include "polyhls/affine/text.hpp"
#include "polyhls/ir/ir.hpp"
#include "support/generators.hpp"

using namespace polyhls;
using namespace polyhls::ir;

namespace {

const char *kMaps[] = {
    "affine_map<()[s0] -> ((s0-1) floordiv 16 + 1)>",
    "affine_map<(d0)[s0] -> (0, (d0*32-s0+1) ceildiv 32)>",
    "affine_map<(d0)[s0] -> ((s0-1) floordiv 32 + 1, d0+1)>",
    "affine_map<(d0,d1) -> (1, d0*32-d1*32)>",
    "affine_map<(d0,d1)[s0] -> (s0, d0*32-d1*32+32)>",
    "affine_map<(d0) -> (1, d0*32)>",
    "affine_map<(d0)[s0] -> (s0, d0*32+32)>",
};

std::string tiled_module() {
  std::string text;
  for (int k = 0; k < 7; ++k)
    text += "#map" + std::to_string(k) + " = " + kMaps[k] + "\n";
  text += R"(affine.module @scop0 symbols(%N) {
  array @A : float[%N][%N]
  stmt @S1(i, j) { A[i][j] = A[i-1][j] + A[i][j-1]; }
  affine.for %t1 = 0 to #map0()[%N] {
    affine.parallel_for %t2 = max #map1(%t1)[%N] to min #map2(%t1)[%N] {
      affine.for %t3 = max #map3(%t1, %t2) to min #map4(%t1, %t2)[%N] {
        affine.for %t4 = max #map5(%t2) to min #map6(%t2)[%N] {
          call @S1(%t3, %t4)
} } } }
}
)";
  return text;
}

ErrorKind error_kind(const std::string &text) {
  try {
    parse_ir(text);
  } catch (const Error &e) {
    return e.kind();
  }
  FAIL("expected an error for: " << text);
  return ErrorKind::Internal;
}

const ForOp &only_loop(const Block &b) {
  REQUIRE(b.size() == 1);
  return std::get<ForOp>(b[0].node);
}

} // namespace

TEST_CASE("tiled wavefront module parses into four nested loops") {
  Module m = parse_ir(tiled_module());
  CHECK(loop_depth(m.body) == 4);
  CHECK(verify_ir(m).empty());
  const ForOp &t1 = only_loop(m.body);
  const ForOp &t2 = only_loop(t1.body);
  CHECK_FALSE(t1.parallel);
  CHECK(t2.parallel);
  CHECK(t2.lower.size() == 2);
  CHECK(t2.upper.size() == 2);
  // Stored upper bounds are inclusive: t1 <= (N-1) floordiv 16.
  REQUIRE(t1.upper.size() == 1);
  for (Int n = 2; n <= 130; ++n) {
    Int syms[] = {n};
    CHECK(t1.upper[0].evaluate({}, syms) == (n - 1) / 16);
  }

  auto table = map_table({m});
  REQUIRE(table.size() == 7);
  for (int k = 0; k < 7; ++k) {
    CHECK(table[k].first == "#map" + std::to_string(k));
    CHECK(affine::print_affine_map(table[k].second) == kMaps[k]);
  }
  std::string printed = print_ir(m);
  CHECK(parse_ir(printed) == m);
  CHECK(print_ir(parse_ir(printed)) == printed);
}

TEST_CASE("reference errors") {
  CHECK(error_kind("affine.module @m symbols(%N) {\n"
                   "  affine.for %i = 0 to #map9()[%N] {\n  }\n}\n") ==
        ErrorKind::UnknownReference);
  CHECK(error_kind("#map0 = affine_map<(d0)[s0] -> (d0+s0)>\n"
                   "affine.module @m symbols(%N) {\n"
                   "  affine.for %i = 0 to #map0()[%N] {\n  }\n}\n") ==
        ErrorKind::ArityMismatch);
  CHECK(error_kind("affine.module @m symbols(%N) {\n  call @S1(%k)\n}\n") ==
        ErrorKind::UnknownReference);
  try {
    parse_ir("affine.module @m symbols(%N) {\n  affine.for %i = 0 {\n}\n}\n");
    FAIL("no error");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::Syntax);
    CHECK(std::string(e.what()).find("2:") != std::string::npos);
  }
}

TEST_CASE("verifier diagnostics") {
  Module m = parse_ir(R"(affine.module @m symbols(%N) {
  array @A : int[%N]
  stmt @S1(i) { A[i] = 1; }
  affine.for %i = 0 to %N {
    call @S1(%i)
  }
}
)");
  CHECK(verify_ir(m).empty());

  Module arity = m;
  std::get<CallOp>(std::get<ForOp>(arity.body[0].node).body[0].node).operands.push_back(0);
  auto d = verify_ir(arity);
  REQUIRE(d.size() == 1);
  CHECK(d[0].find("call @S1") != std::string::npos);
  CHECK(d[0].find("arity") != std::string::npos);
  CHECK_THROWS_AS(verify_or_throw(arity), Error);

  Module shadow = m;
  ForOp inner = std::get<ForOp>(shadow.body[0].node);
  std::get<ForOp>(shadow.body[0].node).body = {Op{inner}};
  d = verify_ir(shadow);
  REQUIRE(d.size() == 1);
  CHECK(d[0].find("shadows") != std::string::npos);

  Module empty_bound = m;
  std::get<ForOp>(empty_bound.body[0].node).lower.clear();
  d = verify_ir(empty_bound);
  REQUIRE(d.size() == 1);
  CHECK(d[0].find("lower bound has no results") != std::string::npos);

  Module bad_callee = m;
  std::get<CallOp>(std::get<ForOp>(bad_callee.body[0].node).body[0].node).callee = "S9";
  CHECK(verify_ir(bad_callee).size() == 1);
}

TEST_CASE("empty module prints its header only") {
  Module m;
  m.name = "scop0";
  m.symbols = {"N"};
  CHECK(print_ir(m) == "affine.module @scop0 symbols(%N) {\n}\n");
  CHECK(parse_ir(print_ir(m)) == m);
}

TEST_CASE("conditions and else branches") {
  Module m = parse_ir(R"(#set0 = integer_set<(d0)[s0] exists(e0) : (d0-e0*2 == 0, s0-d0-2 >= 0)>
affine.module @m symbols(%N) {
  array @A : int[%N]
  stmt @S1(i) { A[i] = 1; }
  stmt @S2(i) { A[i] = A[i] + 2; }
  affine.for %i = 0 to %N {
    affine.if #set0(%i)[%N] {
      call @S1(%i)
    } else {
      call @S2(%i)
    }
  }
}
)");
  CHECK(verify_ir(m).empty());
  const auto &cond = std::get<IfOp>(std::get<ForOp>(m.body[0].node).body[0].node);
  Int syms[] = {10};
  Int four[] = {4}, five[] = {5}, ten[] = {10};
  CHECK(cond.cond.contains(four, syms));
  CHECK_FALSE(cond.cond.contains(five, syms));
  CHECK_FALSE(cond.cond.contains(ten, syms));
  CHECK(parse_ir(print_ir(m)) == m);
}

TEST_CASE("property: generated modules round-trip") {
  std::mt19937_64 rng(77);
  for (int k = 0; k < 50; ++k) {
    Module m = testing::random_module(rng);
    CHECK(verify_ir(m).empty());
    std::string text = print_ir(m);
    Module back = parse_ir(text);
    CHECK(back == m);
    CHECK(print_ir(back) == text);
  }
}

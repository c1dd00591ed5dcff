#include "doctest.h"

#include "polyhls/affine/fm.hpp"
#include "polyhls/affine/text.hpp"
#include "polyhls/scop/scop.hpp"
#include "support/generators.hpp"
#include "support/oracle.hpp"

#include <algorithm>

using namespace polyhls;
using namespace polyhls::scop;
using affine::parse_affine_map;
using affine::parse_integer_set;

namespace {

Scop only_scop(const std::string &src, const ExtractOptions &opts = {}) {
  auto scops = build_scops(frontend::parse_program(src), opts);
  REQUIRE(scops.size() == 1);
  return scops[0];
}

ErrorKind build_error(const std::string &src) {
  try {
    build_scops(frontend::parse_program(src));
  } catch (const Error &e) {
    return e.kind();
  }
  FAIL("expected an error for: " << src);
  return ErrorKind::Internal;
}

} // namespace

TEST_CASE("stencil statement model") {
  Scop s = only_scop(testing::read_file(testing::corpus_path("recurrence2d.pc")));
  CHECK(s.name == "scop0");
  REQUIRE(s.statements.size() == 1);
  const PolyStmt &st = s.statements[0];
  CHECK(st.name == "S1");
  CHECK(st.dim_names == std::vector<std::string>{"i", "j"});
  CHECK(st.domain == parse_integer_set("(d0,d1)[s0] : (d0-1 >= 0, s0-1-d0 >= 0, d1-1 >= 0, "
                                       "s0-1-d1 >= 0)"));
  CHECK(st.schedule == parse_affine_map("(d0,d1)[s0] -> (0, d0, 0, d1, 0)"));
  REQUIRE(st.writes.size() == 1);
  CHECK(st.writes[0].map == parse_affine_map("(d0,d1)[s0] -> (d0, d1)"));
  REQUIRE(st.reads.size() == 2);
  CHECK(st.reads[0].map == parse_affine_map("(d0,d1)[s0] -> (d0-1, d1)"));
  CHECK(st.reads[1].map == parse_affine_map("(d0,d1)[s0] -> (d0, d1-1)"));
  CHECK(s.context == parse_integer_set("()[s0] : (s0-1 >= 0)"));
  CHECK(s.parallel == std::vector<bool>(5, false));
}

TEST_CASE("sequencing and mixed depth") {
  Scop s = only_scop(R"(int N; int A[N]; int y[N]; int x[N]; int M[N][N];
#pragma scop
for (i = 0; i < N; i++) {
  for (j = 0; j < N; j++)
    y[i] = y[i] + M[i][j] * x[j];
  A[i] = y[i];
}
A[0] = 1;
#pragma endscop
)");
  REQUIRE(s.statements.size() == 3);
  CHECK(s.statements[0].schedule == parse_affine_map("(d0,d1)[s0] -> (0, d0, 0, d1, 0)"));
  CHECK(s.statements[1].schedule == parse_affine_map("(d0)[s0] -> (0, d0, 1, 0, 0)"));
  CHECK(s.statements[2].schedule == parse_affine_map("()[s0] -> (1, 0, 0, 0, 0)"));
  // Arrays keep declaration order, limited to those referenced.
  std::vector<std::string> names;
  for (const ArrayInfo &a : s.arrays)
    names.push_back(a.name);
  CHECK(names == std::vector<std::string>{"A", "y", "x", "M"});
  CHECK(s.statements[0].reads.size() == 3);
}

TEST_CASE("conditions shape the domain") {
  Scop s = only_scop(R"(int N; int A[N][N];
#pragma scop
for (i = 0; i < N; i++)
  for (j = 0; j <= i; j++)
    if (i + j <= N && j >= 2)
      A[i][j] = 1;
#pragma endscop
)");
  REQUIRE(s.statements.size() == 1);
  CHECK(s.statements[0].domain ==
        parse_integer_set("(d0,d1)[s0] : (d0 >= 0, s0-1-d0 >= 0, d1 >= 0, d0-d1 >= 0, "
                          "s0-d0-d1 >= 0, d1-2 >= 0)"));
  Scop t = only_scop(R"(int N; int A[N][N];
#pragma scop
for (i = 0; i < N; i++)
  for (j = 0; j <= i; j++)
    if (j >= 2) A[i][j] = 1; else A[i][j] = 2;
#pragma endscop
)");
  REQUIRE(t.statements.size() == 2);
  CHECK(t.statements[1].domain == parse_integer_set("(d0,d1)[s0] : (d0 >= 0, s0-1-d0 >= 0, "
                                                    "d1 >= 0, d0-d1 >= 0, 1-d1 >= 0)"));
  CHECK(t.statements[1].schedule == parse_affine_map("(d0,d1)[s0] -> (0, d0, 0, d1, 1)"));
}

TEST_CASE("empty scops, multiple regions and ignored outside code") {
  auto scops = build_scops(frontend::parse_program(
      "int N; int A[N];\nA[0] = 1;\n#pragma scop\n#pragma endscop\n#pragma scop\nA[1] = 2;\n"
      "#pragma endscop\n"));
  REQUIRE(scops.size() == 2);
  CHECK(scops[0].statements.empty());
  CHECK(scops[0].schedule_dims() == 0);
  CHECK(scops[1].name == "scop1");
  REQUIRE(scops[1].statements.size() == 1);
  CHECK(scops[1].statements[0].name == "S2");
}

TEST_CASE("non-affine and unsupported input") {
  CHECK(build_error("int N; int A[N];\n#pragma scop\nfor (i=0;i<N;i++) for (j=0;j<N;j++) "
                    "A[i*j] = 0;\n#pragma endscop\n") == ErrorKind::NonAffine);
  CHECK(build_error("int N; int A[N];\n#pragma scop\nfor (i=0;i<N*N;i++) A[0] = 0;\n"
                    "#pragma endscop\n") == ErrorKind::NonAffine);
  CHECK(build_error("int N; int A[N];\n#pragma scop\nfor (i=0;i<N;i++) A[A[i]] = 0;\n"
                    "#pragma endscop\n") == ErrorKind::NonAffine);
  CHECK(build_error("int N; int A[N];\n#pragma scop\nfor (i=0;i<N;i++) if (i >= 1 && i < 3) "
                    "A[i] = 0; else A[i] = 1;\n#pragma endscop\n") == ErrorKind::Unsupported);
  CHECK(build_error("int N; int A[N];\n#pragma scop\nfor (i=0;i<N;i++) if (i == 1) "
                    "A[i] = 0; else A[i] = 1;\n#pragma endscop\n") == ErrorKind::Unsupported);
}

TEST_CASE("assumptions replace the default context") {
  ExtractOptions opts;
  opts.assumptions = {"N >= 4", "M<=N"};
  Scop s = only_scop("int N, M; int A[N];\n#pragma scop\nA[0] = 1;\n#pragma endscop\n", opts);
  CHECK(s.context == parse_integer_set("()[s0,s1] : (s0-4 >= 0, s0-s1 >= 0)"));
  CHECK_THROWS_AS(parse_assumption("K >= 1", {"N"}), Error);
  CHECK_THROWS_AS(parse_assumption("N", {"N"}), Error);
}

TEST_CASE("property: domains and schedules reproduce source execution") {
  std::mt19937_64 rng(7);
  int checked = 0;
  for (int iter = 0; iter < 60; ++iter) {
    frontend::Program p = testing::random_program(rng, true);
    auto scops = build_scops(p);
    REQUIRE(scops.size() == 1);
    const Scop &s = scops[0];
    for (std::vector<Int> syms : {std::vector<Int>{1, 1}, {2, 3}, {4, 2}}) {
      std::vector<testing::Instance> expected;
      if (!testing::source_instances(p, syms, expected, 20000))
        continue;
      std::vector<std::pair<std::vector<Int>, testing::Instance>> timed;
      for (const PolyStmt &st : s.statements) {
        CHECK(st.beta.size() == st.depth + 1);
        CHECK(st.schedule.num_results() == s.schedule_dims());
        for (const auto &pt : affine::enumerate_points(st.domain, syms))
          timed.push_back({st.schedule.evaluate(pt, syms), {st.name, pt}});
      }
      std::sort(timed.begin(), timed.end(),
                [](const auto &a, const auto &b) { return a.first < b.first; });
      std::vector<testing::Instance> got;
      for (auto &t : timed)
        got.push_back(t.second);
      CHECK(got == expected);
      ++checked;
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("dump lists every statement") {
  std::string text = dump_scop(only_scop(testing::read_file(testing::corpus_path("recurrence2d.pc"))));
  CHECK(text.find("stmt S1 (i, j)") != std::string::npos);
  CHECK(text.find("schedule affine_map<(d0,d1)[s0] -> (0, d0, 0, d1, 0)>") != std::string::npos);
}

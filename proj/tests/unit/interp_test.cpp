#include "doctest.h"

#include "polyhls/driver/pipeline.hpp"
#include "polyhls/interp/interp.hpp"
#include "support/oracle.hpp"
#include "support/pipelines.hpp"

#include <algorithm>
#include <functional>

using namespace polyhls;
using interp::Machine;
using interp::RunOptions;
using interp::TraceEntry;

namespace {

driver::Compilation compile_source(const std::string &src, std::vector<std::string> flags = {}) {
  driver::CompileOptions o;
  for (const std::string &f : flags)
    o.passes.push_back(*driver::parse_pass_flag(f));
  return driver::compile(frontend::parse_program(src), o);
}

driver::Compilation compile_corpus(const std::string &name, std::vector<std::string> flags = {}) {
  return compile_source(testing::read_file(testing::corpus_path(name)), std::move(flags));
}

RunOptions sized(Int n) {
  RunOptions o;
  o.symbols = {{"N", n}};
  return o;
}

std::vector<Machine> all_levels(const driver::Compilation &c, const RunOptions &o) {
  return {interp::run(c.program, o), interp::run(c.scops, o), interp::run(c.modules, o),
          interp::run(c.loops, o), interp::run(c.hls, o)};
}

std::vector<TraceEntry> sorted(std::vector<TraceEntry> t) {
  std::sort(t.begin(), t.end(), [](const TraceEntry &a, const TraceEntry &b) {
    return a.stmt != b.stmt ? a.stmt < b.stmt : a.iv < b.iv;
  });
  return t;
}

} // namespace

TEST_CASE("recurrence from border values matches the hand-computed table") {
  driver::Compilation c = compile_corpus("recurrence2d.pc");
  RunOptions o = sized(4);
  std::string init;
  for (Int i = 0; i < 4; ++i)
    for (Int j = 0; j < 4; ++j)
      init += std::to_string(i == 0 || j == 0 ? i + j : 0) + " ";
  o.init["A"] = init;
  Int expect[4][4];
  for (Int i = 0; i < 4; ++i)
    for (Int j = 0; j < 4; ++j)
      expect[i][j] = (i == 0 || j == 0) ? i + j : expect[i - 1][j] + expect[i][j - 1];
  CHECK(expect[3][3] == 30);
  for (const Machine &m : all_levels(c, o)) {
    const interp::ArrayState *a = m.find_array("A");
    REQUIRE(a);
    for (Int i = 0; i < 4; ++i)
      for (Int j = 0; j < 4; ++j)
        CHECK(a->floats[static_cast<std::size_t>(i * 4 + j)] == double(expect[i][j]));
  }
}

TEST_CASE("single-point domain runs one instance") {
  driver::Compilation c = compile_corpus("recurrence2d.pc");
  RunOptions o = sized(2);
  o.init["A"] = "0 1.5 2.25 7";
  o.trace = true;
  for (const Machine &m : all_levels(c, o)) {
    REQUIRE(m.trace.size() == 1);
    CHECK(m.trace[0] == TraceEntry{"S1", {1, 1}});
    CHECK(m.find_array("A")->floats[3] == 1.5 + 2.25);
  }
}

TEST_CASE("trace lists instances in execution order") {
  driver::Compilation c = compile_corpus("recurrence2d.pc");
  std::vector<TraceEntry> expect = {
      {"S1", {1, 1}}, {"S1", {1, 2}}, {"S1", {2, 1}}, {"S1", {2, 2}}};
  CHECK(interp::trace(c.program, sized(3)) == expect);
  CHECK(interp::trace(c.scops, sized(3)) == expect);
  CHECK(interp::trace(c.modules, sized(3)) == expect);
  CHECK(interp::trace(c.loops, sized(3)) == expect);
  CHECK(interp::trace(c.hls, sized(3)) == expect);
  CHECK(interp::dump_trace(expect).rfind("S1(1, 1)\nS1(1, 2)\n", 0) == 0);

  driver::Compilation empty = compile_source("int N;\nfloat A[N];\n#pragma scop\n#pragma endscop\n");
  CHECK(interp::trace(empty.program, sized(5)).empty());
  CHECK(interp::trace(empty.scops, sized(5)).empty());
  CHECK(interp::trace(empty.hls, sized(5)).empty());
}

TEST_CASE("schedule order reproduces source order") {
  for (const testing::CorpusEntry &e : testing::corpus_matrix()) {
    driver::Compilation c = compile_corpus(e.file);
    for (Int n : {1, 5, 12})
      CHECK_MESSAGE(interp::trace(c.program, sized(n)) == interp::trace(c.scops, sized(n)),
                    e.file << " N=" << n);
  }
}

TEST_CASE("tiling preserves the instance multiset") {
  for (const char *file : {"recurrence2d.pc", "matmul.pc", "triangular.pc", "guarded.pc"}) {
    driver::Compilation plain = compile_corpus(file);
    driver::Compilation tiled = compile_corpus(file, {"-tile=4,3"});
    std::vector<TraceEntry> ref = sorted(interp::trace(plain.program, sized(13)));
    CHECK(sorted(interp::trace(tiled.scops, sized(13))) == ref);
    CHECK(sorted(interp::trace(tiled.modules, sized(13))) == ref);
    CHECK(sorted(interp::trace(tiled.hls, sized(13))) == ref);
  }
}

TEST_CASE("out-of-bounds accesses name the instance") {
  driver::Compilation c = compile_source(R"(int N;
float A[N];
#pragma scop
for (i = 0; i < N; i++)
  S1: A[i+1] = A[i];
#pragma endscop
)");
  std::vector<std::function<void()>> levels = {
      [&] { interp::run(c.program, sized(4)); }, [&] { interp::run(c.scops, sized(4)); },
      [&] { interp::run(c.modules, sized(4)); }, [&] { interp::run(c.loops, sized(4)); },
      [&] { interp::run(c.hls, sized(4)); }};
  for (const auto &run : levels) {
    try {
      run();
      FAIL("no error");
    } catch (const Error &e) {
      CHECK(e.kind() == ErrorKind::Execution);
      CHECK(std::string(e.what()).find("A[4] (shape 4) in S1(3)") != std::string::npos);
    }
  }
  CHECK_THROWS_WITH_AS(interp::run(c.program, RunOptions{}), "execution error: unbound symbol N",
                       Error);
}

TEST_CASE("arithmetic follows C rules") {
  driver::Compilation c = compile_source(R"(int N;
int B[N];
float F[N];
#pragma scop
for (i = 0; i < N; i++) {
  B[i] = 2.75 * i - 4;
  F[i] = B[i] * 3 - i;
}
#pragma endscop
)");
  for (const Machine &m : all_levels(c, sized(4))) {
    // Conversion to int truncates toward zero.
    CHECK(m.find_array("B")->ints == std::vector<Int>{-4, -1, 1, 4});
    CHECK(m.find_array("F")->floats == std::vector<double>{-12, -4, 1, 9});
  }
  driver::Compilation big = compile_source(R"(int N;
int B[N];
#pragma scop
for (i = 0; i < N; i++)
  B[i] = B[i] * 4611686018427387904;
#pragma endscop
)");
  RunOptions o = sized(2);
  o.init["B"] = "1 2";
  CHECK_THROWS_AS(interp::run(big.program, o), Error);
  o.init["B"] = "1 2 3";
  CHECK_THROWS_WITH_AS(interp::run(big.program, o),
                       "invalid argument: init data for B has more than 2 values", Error);
}

TEST_CASE("scop runs reject symbol values outside the context") {
  driver::Compilation c = compile_corpus("recurrence2d.pc");
  CHECK_THROWS_AS(interp::run(c.scops, sized(0)), Error);
}

TEST_CASE("seeded runs are deterministic and shuffles of parallel loops agree") {
  driver::Compilation c = compile_corpus("recurrence2d.pc", {"-tile=32,32", "-wavefront"});
  RunOptions o = sized(33);
  o.init = interp::pattern_init(c.program, o.symbols);
  Machine ref = interp::run(c.program, o);
  o.trace = true;
  o.shuffle_seed = 5;
  Machine a = interp::run(c.modules, o), b = interp::run(c.modules, o);
  CHECK(a.arrays == b.arrays);
  CHECK(a.trace == b.trace);
  bool reordered = false;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    o.shuffle_seed = seed;
    Machine s = interp::run(c.modules, o);
    CHECK(interp::compare_arrays(ref, s) == "");
    CHECK(interp::compare_arrays(ref, interp::run(c.scops, o)) == "");
    CHECK(interp::compare_arrays(ref, interp::run(c.hls, o)) == "");
    reordered = reordered || s.trace != a.trace;
  }
  CHECK(reordered);
}

TEST_CASE("every loop marked parallel tolerates shuffled iterations") {
  for (const testing::CorpusEntry &e : testing::corpus_matrix())
    for (const testing::PipelineConfig &cfg : e.pipelines) {
      driver::Compilation c = compile_corpus(e.file, cfg.flags);
      if (std::none_of(c.scops[0].parallel.begin(), c.scops[0].parallel.end(),
                       [](bool p) { return p; }))
        continue;
      RunOptions o = sized(8);
      o.init = interp::pattern_init(c.program, o.symbols);
      Machine ref = interp::run(c.program, o);
      for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        o.shuffle_seed = seed;
        CHECK_MESSAGE(interp::compare_arrays(ref, interp::run(c.scops, o)) == "",
                      e.file << " " << cfg.name);
        CHECK_MESSAGE(interp::compare_arrays(ref, interp::run(c.loops, o)) == "",
                      e.file << " " << cfg.name);
      }
    }
}

TEST_CASE("all levels agree on the corpus") {
  for (const testing::CorpusEntry &e : testing::corpus_matrix())
    for (const testing::PipelineConfig &cfg : e.pipelines) {
      driver::Compilation c = compile_corpus(e.file, cfg.flags);
      for (Int n : {2, 5, 13})
        CHECK_MESSAGE(driver::check_equivalence(c, {{"N", n}}) == "",
                      e.file << " " << cfg.name << " N=" << n);
    }
}

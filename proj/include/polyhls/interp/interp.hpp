//===- interp.hpp - Reference interpreter -----------------------*- C++ -*-===//
//
// Executes every representation of a program on the same machine model:
// 64-bit integer and 64-bit float arrays with bounds-checked accesses and
// C-style arithmetic (integer operations are exact and overflow-checked,
// mixed operations convert to double, float values stored into int arrays
// truncate toward zero).
//
//===----------------------------------------------------------------------===//

#pragma once

#include "polyhls/frontend/ast.hpp"
#include "polyhls/hls/hls.hpp"
#include "polyhls/ir/ir.hpp"
#include "polyhls/scop/scop.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace polyhls::interp {

using frontend::ElemKind;

struct ArrayState {
  std::string name;
  ElemKind elem = ElemKind::Float64;
  std::vector<Int> shape;
  /// Row-major; only the vector matching `elem` is used.
  std::vector<Int> ints;
  std::vector<double> floats;

  std::size_t size() const;
  /// Float elements compare by bit pattern.
  friend bool operator==(const ArrayState &a, const ArrayState &b);
};

struct TraceEntry {
  std::string stmt;
  std::vector<Int> iv;

  friend bool operator==(const TraceEntry &, const TraceEntry &) = default;
};

struct Machine {
  std::vector<std::pair<std::string, Int>> symbols;
  std::vector<ArrayState> arrays;
  std::vector<TraceEntry> trace;

  const ArrayState *find_array(std::string_view name) const;
  ArrayState *find_array(std::string_view name);
};

struct RunOptions {
  std::map<std::string, Int> symbols;
  /// Whitespace-separated row-major values per array; arrays without an
  /// entry start at zero.
  std::map<std::string, std::string> init;
  bool trace = false;
  /// Iterations of parallel loops (parallel schedule dims for a Scop) run in
  /// a random order drawn from this seed.
  std::optional<std::uint64_t> shuffle_seed;
  /// Execution error once more statement instances than this have run.
  std::uint64_t max_instances = 200'000'000;
};

/// The whole program, statements outside scop regions included.
Machine run(const frontend::Program &p, const RunOptions &opts);
/// Instances in lexicographic order of their schedule times. Symbol values
/// outside a scop's context are rejected.
Machine run(const std::vector<scop::Scop> &scops, const RunOptions &opts);
Machine run(const std::vector<ir::Module> &ms, const RunOptions &opts);
Machine run(const std::vector<hls::LoopProgram> &ps, const RunOptions &opts);
/// Host arrays, transfer-in, kernel on zeroed device buffers, transfer-out.
Machine run(const std::vector<hls::HlsProgram> &ps, const RunOptions &opts);

template <class Repr>
std::vector<TraceEntry> trace(const Repr &r, RunOptions opts) {
  opts.trace = true;
  return run(r, opts).trace;
}

/// One line per array, `A: v0 v1 ...`, floats as %.17g; the same format the
/// emitted host program prints.
std::string dump_arrays(const Machine &m);
std::string dump_trace(const std::vector<TraceEntry> &t);

/// Describes the first array of `b` that is missing from `a` or differs
/// from it; empty when all of them agree.
std::string compare_arrays(const Machine &a, const Machine &b);

/// Deterministic, non-uniform contents for every array of `p`.
std::map<std::string, std::string> pattern_init(const frontend::Program &p,
                                                const std::map<std::string, Int> &symbols);

} // namespace polyhls::interp

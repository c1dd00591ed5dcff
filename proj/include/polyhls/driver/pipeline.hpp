//===- pipeline.hpp - End-to-end lowering --------------------------*- C++ -*-===//

#pragma once

#include "polyhls/driver/passes.hpp"
#include "polyhls/hls/hls.hpp"
#include "polyhls/interp/interp.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace polyhls::driver {

struct CompileOptions {
  std::vector<std::string> assumptions;
  std::vector<Pass> passes;
  hls::DirectivePolicy policy;
  /// After every pass: verify the generated IR and compare the
  /// interpreted Scop with the source at `verify_symbols`.
  bool verify_each = false;
  std::map<std::string, Int> verify_symbols;
};

/// Every level of one program, one entry per scop region.
struct Compilation {
  frontend::Program program;
  std::vector<scop::Scop> original;
  std::vector<scop::Scop> scops;
  std::vector<ir::Module> modules;
  std::vector<hls::LoopProgram> loops;
  std::vector<hls::HlsProgram> hls;
};

/// Symbol values for --verify-each: every symbol at 7.
std::map<std::string, Int> default_verify_symbols(const frontend::Program &p);

Compilation compile(frontend::Program program, const CompileOptions &opts);

/// IR, loop and HLS levels of modules that did not come from a scop.
Compilation compile_modules(std::vector<ir::Module> modules, const hls::DirectivePolicy &policy);

/// Final arrays of every level at the given symbol values, all started from
/// the same pattern contents; names the first level that disagrees with the
/// source program, or returns an empty string.
std::string check_equivalence(const Compilation &c, const std::map<std::string, Int> &symbols,
                              std::optional<std::uint64_t> shuffle_seed = std::nullopt);

} // namespace polyhls::driver

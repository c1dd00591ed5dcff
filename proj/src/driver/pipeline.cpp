//===- pipeline.cpp - End-to-end lowering ----------------------------------===//

#include "polyhls/driver/pipeline.hpp"

#include "polyhls/codegen/codegen.hpp"

namespace polyhls::driver {

namespace {

std::vector<ir::Module> generate(const std::vector<scop::Scop> &scops) {
  std::vector<ir::Module> out;
  for (const scop::Scop &s : scops)
    out.push_back(codegen::simplify_bounds(codegen::generate_loops(s), s.context));
  return out;
}

bool in_context(const std::vector<scop::Scop> &scops, const std::map<std::string, Int> &syms) {
  for (const scop::Scop &s : scops) {
    std::vector<Int> vals;
    for (const std::string &n : s.symbols) {
      auto it = syms.find(n);
      if (it == syms.end())
        return false;
      vals.push_back(it->second);
    }
    if (!s.context.contains(std::vector<Int>{}, vals))
      return false;
  }
  return true;
}

void verify_stage(const Compilation &c, const std::string &after, const CompileOptions &o) {
  std::vector<ir::Module> ms = generate(c.scops);
  for (const ir::Module &m : ms) {
    std::vector<std::string> diags = ir::verify_ir(m);
    if (!diags.empty())
      fail(ErrorKind::Internal, "verify-each: after " + after + ": " + diags.front());
  }
  if (!in_context(c.scops, o.verify_symbols))
    return;
  interp::RunOptions ro;
  ro.symbols = o.verify_symbols;
  ro.init = interp::pattern_init(c.program, o.verify_symbols);
  interp::Machine ref = interp::run(c.program, ro);
  std::string diff = interp::compare_arrays(ref, interp::run(c.scops, ro));
  if (diff.empty())
    diff = interp::compare_arrays(ref, interp::run(ms, ro));
  if (!diff.empty())
    fail(ErrorKind::Internal, "verify-each: after " + after + ": " + diff);
}

} // namespace

std::map<std::string, Int> default_verify_symbols(const frontend::Program &p) {
  std::map<std::string, Int> out;
  for (const std::string &s : p.symbols)
    out[s] = 7;
  return out;
}

Compilation compile(frontend::Program program, const CompileOptions &opts) {
  Compilation c;
  c.program = std::move(program);
  scop::ExtractOptions eo;
  eo.assumptions = opts.assumptions;
  c.original = scop::build_scops(c.program, eo);
  c.scops = c.original;
  if (opts.verify_each)
    verify_stage(c, "scop construction", opts);
  for (const Pass &p : opts.passes) {
    try {
      for (scop::Scop &s : c.scops)
        s = apply_pass(s, p);
    } catch (const Error &e) {
      std::string msg = e.what();
      std::string prefix = std::string(to_string(e.kind())) + ": ";
      if (msg.rfind(prefix, 0) == 0)
        msg = msg.substr(prefix.size());
      throw Error(e.kind(), p.spelling() + ": " + msg);
    }
    if (opts.verify_each)
      verify_stage(c, p.spelling(), opts);
  }
  c.modules = generate(c.scops);
  for (std::size_t k = 0; k < c.modules.size(); ++k) {
    c.loops.push_back(hls::lower_to_standard(c.modules[k]));
    c.hls.push_back(hls::insert_directives(hls::partition(c.modules[k], &c.original[k]),
                                           opts.policy));
  }
  return c;
}

Compilation compile_modules(std::vector<ir::Module> modules, const hls::DirectivePolicy &policy) {
  Compilation c;
  c.modules = std::move(modules);
  for (const ir::Module &m : c.modules) {
    ir::verify_or_throw(m);
    c.loops.push_back(hls::lower_to_standard(m));
    c.hls.push_back(hls::insert_directives(hls::partition(m), policy));
  }
  return c;
}

std::string check_equivalence(const Compilation &c, const std::map<std::string, Int> &symbols,
                              std::optional<std::uint64_t> shuffle_seed) {
  interp::RunOptions ro;
  ro.symbols = symbols;
  ro.init = interp::pattern_init(c.program, symbols);
  interp::Machine ref = interp::run(c.program, ro);
  ro.shuffle_seed = shuffle_seed;
  auto check = [&](const char *level, const interp::Machine &m) -> std::string {
    std::string d = interp::compare_arrays(ref, m);
    return d.empty() ? d : std::string(level) + ": " + d;
  };
  std::string d = check("scop", interp::run(c.scops, ro));
  if (d.empty())
    d = check("affine", interp::run(c.modules, ro));
  if (d.empty())
    d = check("std", interp::run(c.loops, ro));
  if (d.empty())
    d = check("hls", interp::run(c.hls, ro));
  return d;
}

} // namespace polyhls::driver

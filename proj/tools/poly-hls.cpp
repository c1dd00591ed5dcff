//===- poly-hls.cpp - Compiler driver --------------------------------------===//
//
//   poly-hls <input> [passes] [--emit=scop|affine|std|hls-c] [-o out]
//   poly-hls run <input> [passes] [--level=...] --set N=8 --init A=@data.txt
//            --dump-arrays [--trace] [--shuffle]
//
//===----------------------------------------------------------------------===//

#include "polyhls/codegen/codegen.hpp"
#include "polyhls/deps/deps.hpp"
#include "polyhls/driver/pipeline.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace polyhls;

namespace {

const char *kUsage = R"(usage: poly-hls <input> [options]
       poly-hls run <input> [options]

passes (applied in order):
  -tile=S1,S2,...      tile the innermost loops
  -skew=A,B,F          loop level A becomes A + F * level B
  -wavefront           wavefront the innermost tile band
  -subbb-tile=S1,...   tile with uniform bounding-box tiles

options:
  --emit=scop|affine|std|hls-c   output level (default hls-c)
  --input-kind=c|affine          input language (default: affine for .air files)
  --dump=scop|deps|bounds        debugging dumps on stderr (repeatable)
  --assume=CONSTRAINT            symbol assumption such as N>=2 (repeatable)
  --set SYM=VALUE                symbol value (repeatable)
  --verify-each, --no-verify-each
                                 check every pass with the interpreter
  --unroll-limit=K               largest trip count unrolled (default 64)
  -o FILE                        write the output to FILE

run options:
  --level=source|scop|affine|std|hls
                                 representation to execute
  --init A=@FILE | A=VALUES      initial array contents, row-major
  --dump-arrays                  print the final arrays
  --trace                        print the executed statement instances
  --shuffle                      run parallel loops in random order
                                 (seed from POLYHLS_SEED)
)";

struct Options {
  bool run = false;
  std::string input;
  std::vector<driver::Pass> passes;
  std::string emit = "hls-c";
  std::string input_kind;
  std::vector<std::string> dumps;
  std::vector<std::string> assumptions;
  std::map<std::string, Int> symbols;
#ifdef NDEBUG
  bool verify_each = false;
#else
  bool verify_each = true;
#endif
  Int unroll_limit = 64;
  std::string output;
  std::string level;
  std::map<std::string, std::string> init;
  bool dump_arrays = false;
  bool trace = false;
  bool shuffle = false;
};

[[noreturn]] void usage_error(const std::string &msg) {
  fail(ErrorKind::InvalidArgument, msg + " (see --help)");
}

std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    fail(ErrorKind::InvalidArgument, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Int parse_int(const std::string &text, const std::string &what) {
  std::size_t used = 0;
  Int v = 0;
  try {
    v = std::stoll(text, &used);
  } catch (const std::exception &) {
    used = 0;
  }
  if (used == 0 || used != text.size())
    usage_error("bad integer '" + text + "' for " + what);
  return v;
}

std::pair<std::string, std::string> split_assignment(const std::string &text,
                                                     const std::string &what) {
  auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0)
    usage_error(what + " expects NAME=VALUE, got '" + text + "'");
  return {text.substr(0, eq), text.substr(eq + 1)};
}

Options parse_args(int argc, char **argv) {
  Options o;
  std::vector<std::string> args(argv + 1, argv + argc);
  std::size_t k = 0;
  if (!args.empty() && args[0] == "run") {
    o.run = true;
    ++k;
  }
  // `--name=value` or `--name value`.
  auto value = [&](const std::string &arg, const std::string &name) -> std::optional<std::string> {
    if (arg.rfind(name + "=", 0) == 0)
      return arg.substr(name.size() + 1);
    if (arg == name) {
      if (k + 1 >= args.size())
        usage_error(name + " needs a value");
      return args[++k];
    }
    return std::nullopt;
  };
  for (; k < args.size(); ++k) {
    const std::string &a = args[k];
    if (a == "-h" || a == "--help") {
      std::cout << kUsage;
      std::exit(0);
    }
    if (auto p = driver::parse_pass_flag(a)) {
      o.passes.push_back(*p);
    } else if (auto v = value(a, "--emit")) {
      if (*v != "scop" && *v != "affine" && *v != "std" && *v != "hls-c")
        usage_error("unknown emission level '" + *v + "'");
      o.emit = *v;
    } else if (auto v = value(a, "--input-kind")) {
      if (*v != "c" && *v != "affine")
        usage_error("unknown input kind '" + *v + "'");
      o.input_kind = *v;
    } else if (auto v = value(a, "--dump")) {
      if (*v != "scop" && *v != "deps" && *v != "bounds")
        usage_error("unknown dump '" + *v + "'");
      o.dumps.push_back(*v);
    } else if (auto v = value(a, "--assume")) {
      o.assumptions.push_back(*v);
    } else if (auto v = value(a, "--set")) {
      auto [name, val] = split_assignment(*v, "--set");
      o.symbols[name] = parse_int(val, "--set " + name);
    } else if (a == "--verify-each") {
      o.verify_each = true;
    } else if (a == "--no-verify-each") {
      o.verify_each = false;
    } else if (auto v = value(a, "--unroll-limit")) {
      o.unroll_limit = parse_int(*v, "--unroll-limit");
    } else if (auto v = value(a, "-o")) {
      o.output = *v;
    } else if (o.run && (v = value(a, "--level"))) {
      if (*v != "source" && *v != "scop" && *v != "affine" && *v != "std" && *v != "hls")
        usage_error("unknown level '" + *v + "'");
      o.level = *v;
    } else if (o.run && (v = value(a, "--init"))) {
      auto [name, val] = split_assignment(*v, "--init");
      o.init[name] = !val.empty() && val[0] == '@' ? read_file(val.substr(1)) : val;
    } else if (o.run && a == "--dump-arrays") {
      o.dump_arrays = true;
    } else if (o.run && a == "--trace") {
      o.trace = true;
    } else if (o.run && a == "--shuffle") {
      o.shuffle = true;
    } else if (!a.empty() && a[0] == '-') {
      usage_error("unknown flag '" + a + "'");
    } else if (o.input.empty()) {
      o.input = a;
    } else {
      usage_error("more than one input file");
    }
  }
  if (o.input.empty())
    usage_error("missing input file");
  if (o.input_kind.empty()) {
    bool air = o.input.size() >= 4 && o.input.compare(o.input.size() - 4, 4, ".air") == 0;
    o.input_kind = air ? "affine" : "c";
  }
  return o;
}

driver::Compilation build(const Options &o) {
  std::string text = read_file(o.input);
  hls::DirectivePolicy policy;
  policy.unroll_limit = o.unroll_limit;
  if (o.input_kind == "affine") {
    if (!o.passes.empty())
      usage_error("passes need C input; " + o.passes.front().spelling() +
                  " cannot be applied to an affine module");
    for (const std::string &d : o.dumps)
      if (d != "bounds")
        usage_error("--dump=" + d + " needs C input");
    if ((!o.run && o.emit == "scop") || o.level == "source" || o.level == "scop")
      usage_error("an affine module has no scop or source level");
    return driver::compile_modules(ir::parse_ir_file(text), policy);
  }
  driver::CompileOptions co;
  co.assumptions = o.assumptions;
  co.passes = o.passes;
  co.policy = policy;
  co.verify_each = o.verify_each;
  frontend::Program prog = frontend::parse_program(text);
  co.verify_symbols = driver::default_verify_symbols(prog);
  for (const auto &[name, v] : o.symbols)
    if (co.verify_symbols.count(name))
      co.verify_symbols[name] = v;
  return driver::compile(std::move(prog), co);
}

void dumps(const Options &o, const driver::Compilation &c) {
  for (const std::string &d : o.dumps) {
    if (d == "scop") {
      for (const scop::Scop &s : c.scops)
        std::cerr << scop::dump_scop(s);
    } else if (d == "deps") {
      for (const scop::Scop &s : c.scops)
        std::cerr << s.name << ":\n" << deps::dump_dependences(deps::compute_dependences(s));
    } else {
      for (const ir::Module &m : c.modules)
        std::cerr << codegen::dump_bounds(m);
    }
  }
}

std::string emit(const Options &o, const driver::Compilation &c) {
  if (o.emit == "scop") {
    std::string out;
    for (const scop::Scop &s : c.scops)
      out += scop::dump_scop(s);
    return out;
  }
  if (o.emit == "affine")
    return ir::print_ir(c.modules);
  if (o.emit == "std")
    return hls::print_loops(c.loops);
  return hls::emit_c(c.hls);
}

std::string execute(const Options &o, const driver::Compilation &c) {
  interp::RunOptions ro;
  ro.symbols = o.symbols;
  ro.init = o.init;
  ro.trace = o.trace;
  if (o.shuffle) {
    const char *seed = std::getenv("POLYHLS_SEED");
    ro.shuffle_seed = seed ? static_cast<std::uint64_t>(parse_int(seed, "POLYHLS_SEED")) : 0;
  }
  std::string level = o.level.empty() ? (o.input_kind == "affine" ? "affine" : "source") : o.level;
  interp::Machine m = level == "source"   ? interp::run(c.program, ro)
                      : level == "scop"   ? interp::run(c.scops, ro)
                      : level == "affine" ? interp::run(c.modules, ro)
                      : level == "std"    ? interp::run(c.loops, ro)
                                          : interp::run(c.hls, ro);
  std::string out;
  if (o.trace)
    out += interp::dump_trace(m.trace);
  if (o.dump_arrays)
    out += interp::dump_arrays(m);
  return out;
}

} // namespace

int main(int argc, char **argv) {
  try {
    Options o = parse_args(argc, argv);
    driver::Compilation c = build(o);
    dumps(o, c);
    std::string out = o.run ? execute(o, c) : emit(o, c);
    if (o.output.empty()) {
      std::cout << out;
    } else {
      std::ofstream f(o.output, std::ios::binary);
      if (!f || !(f << out))
        fail(ErrorKind::InvalidArgument, "cannot write " + o.output);
    }
    return 0;
  } catch (const Error &e) {
    std::cerr << "poly-hls: " << e.what() << "\n";
    return e.is_internal() ? 2 : 1;
  } catch (const std::exception &e) {
    std::cerr << "poly-hls: internal error: " << e.what() << "\n";
    return 2;
  }
}

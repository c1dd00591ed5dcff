//===- hls.hpp - Kernel/host partition, directives and C emission -*- C++ -*-===//
//
// Each affine module becomes one kernel. The host owns every array, copies
// the kernel's inputs to device buffers, calls the kernel and copies its
// outputs back; device buffers start zeroed.
//
//===----------------------------------------------------------------------===//

#pragma once

#include "polyhls/hls/loop_ast.hpp"
#include "polyhls/scop/scop.hpp"

#include <string>
#include <vector>

namespace polyhls::hls {

enum class Transfer { In, Out, InOut };

const char *to_string(Transfer t);

struct ArrayTransfer {
  std::string array;
  Transfer kind = Transfer::InOut;

  friend bool operator==(const ArrayTransfer &, const ArrayTransfer &) = default;
};

struct HlsProgram {
  LoopProgram kernel;
  /// Arrays the kernel touches, in declaration order.
  std::vector<ArrayTransfer> transfers;

  std::string kernel_name() const { return kernel.name + "_kernel"; }
};

struct DirectivePolicy {
  Int unroll_limit = 64;
};

/// Only-read arrays are inputs and read-and-written arrays are both. A
/// written-only array is an output when some write covers every element for
/// all symbol values (proved on `scop` when given); otherwise the host copy
/// goes in too, so elements the kernel leaves alone survive.
HlsProgram partition(const ir::Module &m, const scop::Scop *scop = nullptr);

/// Pipelines every innermost loop and fully unrolls parallel loops with a
/// constant trip count of at most the policy limit.
HlsProgram insert_directives(HlsProgram p, const DirectivePolicy &policy = {});

/// One self-contained C99 file: helpers, the kernels, and a host `main`
/// taking `SYM=value` and `ARRAY=path` arguments and printing every array.
std::string emit_c(const std::vector<HlsProgram> &ps);
std::string emit_c(const HlsProgram &p);

/// Arrays of all programs by name, first declaration wins.
std::vector<LArray> host_arrays(const std::vector<HlsProgram> &ps);
std::vector<std::string> host_symbols(const std::vector<HlsProgram> &ps);

} // namespace polyhls::hls

//===- deps.cpp - Dependence relations and parallelism tests --------------===//

#include "polyhls/deps/deps.hpp"
#include "polyhls/affine/fm.hpp"
#include "polyhls/affine/text.hpp"

#include <algorithm>

namespace polyhls::deps {

using affine::AffineExpr;
using affine::IntegerSet;
using scop::Access;
using scop::PolyStmt;

const char *to_string(DepKind kind) {
  switch (kind) {
  case DepKind::Flow:
    return "flow";
  case DepKind::Anti:
    return "anti";
  case DepKind::Output:
    return "output";
  }
  return "?";
}

namespace {

/// Renames d<k> to d<offset+k>; symbols stay.
AffineExpr shift(const AffineExpr &e, unsigned count, unsigned offset, unsigned nsyms) {
  std::vector<AffineExpr> dims, syms;
  for (unsigned k = 0; k < count; ++k)
    dims.push_back(AffineExpr::dim(offset + k));
  for (unsigned k = 0; k < nsyms; ++k)
    syms.push_back(AffineExpr::symbol(k));
  return e.substitute(dims, syms);
}

AffineExpr schedule_diff(const PolyStmt &src, const PolyStmt &tgt, unsigned pos, unsigned nsyms) {
  unsigned ns = src.num_dims();
  return shift(tgt.schedule.result(pos), tgt.num_dims(), ns, nsyms) -
         shift(src.schedule.result(pos), ns, 0, nsyms);
}

/// Number of enclosing loops the two statements have in common.
unsigned shared_loops(const PolyStmt &a, const PolyStmt &b) {
  unsigned k = 0;
  while (k < a.depth && k < b.depth && a.beta[k] == b.beta[k])
    ++k;
  return k;
}

IntegerSet instance_set(const PolyStmt &s) { return s.domain.intersect(s.guard); }

} // namespace

std::vector<Dependence> compute_dependences(const scop::Scop &scop) {
  std::vector<Dependence> out;
  unsigned nsyms = static_cast<unsigned>(scop.symbols.size());
  unsigned width = scop.schedule_dims();
  struct Ref {
    const Access *access;
    bool write;
  };
  auto refs_of = [](const PolyStmt &s) {
    std::vector<Ref> refs;
    for (const Access &a : s.writes)
      refs.push_back({&a, true});
    for (const Access &a : s.reads)
      refs.push_back({&a, false});
    return refs;
  };
  for (const PolyStmt &src : scop.statements) {
    for (const PolyStmt &tgt : scop.statements) {
      unsigned ns = src.num_dims(), total = ns + tgt.num_dims();
      IntegerSet both = instance_set(src).lift(total, 0).intersect(
          instance_set(tgt).lift(total, ns));
      both = both.intersect(scop.context.lift(total, 0));
      for (const Ref &a : refs_of(src)) {
        for (const Ref &b : refs_of(tgt)) {
          if (a.access->array != b.access->array || (!a.write && !b.write))
            continue;
          IntegerSet base = both;
          for (unsigned k = 0; k < a.access->map.num_results(); ++k)
            base.add_equality(shift(a.access->map.result(k), src.depth, 0, nsyms) -
                              shift(b.access->map.result(k), tgt.depth, ns, nsyms));
          if (affine::is_empty(base))
            continue;
          DepKind kind = a.write ? (b.write ? DepKind::Output : DepKind::Flow) : DepKind::Anti;
          IntegerSet prefix = base;
          for (unsigned level = 0; level < width; ++level) {
            AffineExpr diff = schedule_diff(src, tgt, level, nsyms);
            IntegerSet rel = prefix;
            rel.add_inequality(diff - 1);
            if (!affine::is_empty(rel)) {
              Dependence d;
              d.source = src.name;
              d.target = tgt.name;
              d.kind = kind;
              d.array = a.access->array;
              d.level = level;
              d.source_dims = ns;
              d.relation = std::move(rel);
              d.distance = distance_vector(d, shared_loops(src, tgt));
              out.push_back(std::move(d));
            }
            prefix.add_equality(diff);
            if (prefix.is_obviously_empty() || (diff.is_constant() && diff.constant_term() != 0))
              break;
          }
        }
      }
    }
  }
  return out;
}

std::optional<std::vector<Int>> distance_vector(const Dependence &dep, unsigned depth) {
  const IntegerSet &rel = dep.relation;
  unsigned total = rel.num_dims();
  unsigned ns = dep.source_dims;
  std::vector<Int> dist;
  for (unsigned k = 0; k < depth; ++k) {
    AffineExpr diff = AffineExpr::dim(ns + k) - AffineExpr::dim(k);
    // Place the difference as a new outermost dim and read its bounds.
    IntegerSet lifted = rel.lift(total + 1, 1);
    lifted.add_equality(AffineExpr::dim(0) - shift(diff, total, 1, rel.num_symbols()));
    std::optional<Int> lo, hi;
    try {
      affine::DimBounds b = affine::bounds_for_dim(lifted, 0);
      for (const AffineExpr &e : b.lower)
        if (e.is_constant())
          lo = lo ? std::max(*lo, e.constant_term()) : e.constant_term();
      for (const AffineExpr &e : b.upper)
        if (e.is_constant())
          hi = hi ? std::min(*hi, e.constant_term()) : e.constant_term();
    } catch (const Error &e) {
      if (e.kind() != ErrorKind::Unbounded)
        throw;
      return std::nullopt;
    }
    // Both bounds hold on every point, so equal constants pin the difference.
    if (!lo || !hi || *lo != *hi)
      return std::nullopt;
    dist.push_back(*lo);
  }
  return dist;
}

AffineExpr time_difference(const scop::Scop &scop, const Dependence &dep, unsigned pos) {
  const PolyStmt *src = scop.find_statement(dep.source);
  const PolyStmt *tgt = scop.find_statement(dep.target);
  if (!src || !tgt)
    fail(ErrorKind::UnknownReference, "dependence names unknown statement " +
                                          (src ? dep.target : dep.source));
  return schedule_diff(*src, *tgt, pos, static_cast<unsigned>(scop.symbols.size()));
}

bool is_loop_parallel(const scop::Scop &scop, const std::vector<Dependence> &deps, unsigned pos) {
  if (pos >= scop.schedule_dims())
    fail(ErrorKind::InvalidArgument, "schedule position " + std::to_string(pos) + " out of range");
  for (const Dependence &d : deps) {
    IntegerSet same = d.relation;
    for (unsigned q = 0; q < pos; ++q)
      same.add_equality(time_difference(scop, d, q));
    AffineExpr diff = time_difference(scop, d, pos);
    for (Int side : {1, -1}) {
      IntegerSet carried = same;
      carried.add_inequality(diff * side - 1);
      if (!affine::is_empty(carried))
        return false;
    }
  }
  return true;
}

std::string dump_dependences(const std::vector<Dependence> &deps) {
  std::string out;
  for (const Dependence &d : deps) {
    out += d.source + " -> " + d.target + " : " + to_string(d.kind) + " : ";
    if (d.distance) {
      out += "distance (";
      for (std::size_t k = 0; k < d.distance->size(); ++k)
        out += (k ? "," : "") + std::to_string((*d.distance)[k]);
      out += ")";
    } else {
      out += "non-uniform";
    }
    out += "\n  " + d.array + " level " + std::to_string(d.level) + " " +
           affine::print_integer_set(d.relation) + "\n";
  }
  return out;
}

} // namespace polyhls::deps

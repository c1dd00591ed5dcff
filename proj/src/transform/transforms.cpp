//===- transforms.cpp - Tiling, skewing and wavefronts --------------------===//

#include "polyhls/transform/transforms.hpp"
#include "polyhls/affine/fm.hpp"
#include "polyhls/deps/deps.hpp"

#include <algorithm>

namespace polyhls::transform {

using affine::AffineExpr;
using affine::AffineMap;
using affine::IntegerSet;
using deps::Dependence;
using scop::PolyStmt;
using scop::Scop;

unsigned num_loop_levels(const Scop &scop) {
  unsigned p = scop.schedule_dims();
  return p == 0 ? 0 : (p - 1) / 2;
}

namespace {

[[noreturn]] void illegal(const char *pass, const std::string &why) {
  fail(ErrorKind::IllegalTransform, std::string(pass) + ": " + why);
}

AffineExpr shift(const AffineExpr &e, unsigned count, unsigned offset, unsigned nsyms) {
  std::vector<AffineExpr> dims, syms;
  for (unsigned k = 0; k < count; ++k)
    dims.push_back(AffineExpr::dim(offset + k));
  for (unsigned k = 0; k < nsyms; ++k)
    syms.push_back(AffineExpr::symbol(k));
  return e.substitute(dims, syms);
}

std::string describe(const Dependence &d) {
  return std::string(deps::to_string(d.kind)) + " dependence " + d.source + " -> " + d.target +
         " on " + d.array;
}

IntegerSet instances(const PolyStmt &s) { return s.domain.intersect(s.guard); }

} // namespace

void check_legal(const Scop &before, const Scop &after, const char *pass) {
  unsigned nsyms = static_cast<unsigned>(after.symbols.size());
  unsigned width = after.schedule_dims();
  for (const Dependence &d : deps::compute_dependences(before)) {
    const PolyStmt *src = after.find_statement(d.source);
    const PolyStmt *tgt = after.find_statement(d.target);
    if (!src || !tgt)
      fail(ErrorKind::Internal, std::string(pass) + ": statement lost by the transform");
    unsigned old_ns = d.source_dims, old_nt = d.relation.num_dims() - old_ns;
    unsigned ns = src->num_dims(), total = ns + tgt->num_dims();
    // Old source dims stay a prefix of the new source dims; same for targets.
    // Old source dims stay a prefix of the new source dims; same for targets.
    IntegerSet rel(total, nsyms);
    rel.append_exists(d.relation.num_exists());
    std::vector<AffineExpr> place, syms;
    for (unsigned k = 0; k < old_ns; ++k)
      place.push_back(AffineExpr::dim(k));
    for (unsigned k = 0; k < old_nt; ++k)
      place.push_back(AffineExpr::dim(ns + k));
    for (unsigned e = 0; e < d.relation.num_exists(); ++e)
      place.push_back(AffineExpr::dim(total + e));
    for (unsigned k = 0; k < nsyms; ++k)
      syms.push_back(AffineExpr::symbol(k));
    for (const affine::AffineConstraint &c : d.relation.constraints())
      rel.add_constraint({c.expr.substitute(place, syms), c.kind});
    rel = rel.intersect(instances(*src).lift(total, 0)).intersect(instances(*tgt).lift(total, ns));
    IntegerSet prefix = rel;
    for (unsigned p = 0; p < width; ++p) {
      AffineExpr diff = shift(tgt->schedule.result(p), tgt->num_dims(), ns, nsyms) -
                        shift(src->schedule.result(p), ns, 0, nsyms);
      IntegerSet back = prefix;
      back.add_inequality(-diff - 1);
      if (!affine::is_empty(back))
        illegal(pass, describe(d) + " would run backwards");
      prefix.add_equality(diff);
      if (prefix.is_obviously_empty())
        break;
    }
    if (!affine::is_empty(prefix))
      illegal(pass, describe(d) + " would have its ends scheduled at the same time");
  }
}

Scop skew(const Scop &scop, unsigned a, unsigned b, Int factor) {
  unsigned levels = num_loop_levels(scop);
  if (a >= levels || b >= levels || a == b)
    fail(ErrorKind::InvalidArgument, "skew: invalid loop levels " + std::to_string(a) + "," +
                                         std::to_string(b) + " (scop has " +
                                         std::to_string(levels) + ")");
  if (factor == 0)
    return scop;
  Scop out = scop;
  unsigned pa = loop_position(a), pb = loop_position(b);
  for (PolyStmt &s : out.statements) {
    std::vector<AffineExpr> res = s.schedule.results();
    res[pa] = res[pa] + res[pb] * factor;
    s.schedule = AffineMap(s.schedule.num_dims(), s.schedule.num_symbols(), std::move(res));
  }
  out.parallel.assign(out.parallel.size(), false);
  check_legal(scop, out, "skew");
  return out;
}

namespace {

struct Band {
  unsigned first = 0;
  unsigned count = 0;
};

Band select_band(const Scop &scop, const TilingSpec &spec, const char *pass) {
  if (spec.sizes.empty())
    fail(ErrorKind::InvalidArgument, std::string(pass) + ": no tile sizes given");
  for (Int s : spec.sizes)
    if (s < 1)
      fail(ErrorKind::InvalidArgument,
           std::string(pass) + ": tile size " + std::to_string(s) + " is not positive");
  unsigned deepest = 0;
  for (const PolyStmt &s : scop.statements)
    deepest = std::max(deepest, s.num_dims());
  unsigned m = static_cast<unsigned>(spec.sizes.size());
  Band band{0, m};
  if (spec.first_level) {
    band.first = *spec.first_level;
  } else {
    if (m > deepest)
      fail(ErrorKind::InvalidArgument, std::string(pass) + ": " + std::to_string(m) +
                                           " tile sizes but the deepest nest has " +
                                           std::to_string(deepest) + " loops");
    band.first = deepest - m;
  }
  if (band.first + m > deepest)
    fail(ErrorKind::InvalidArgument, std::string(pass) + ": band exceeds the loop depth");
  return band;
}

void check_permutable(const Scop &scop, const Band &band, const char *pass) {
  unsigned start = loop_position(band.first);
  for (const Dependence &d : deps::compute_dependences(scop)) {
    if (d.level < start)
      continue;
    for (unsigned l = 0; l < band.count; ++l) {
      IntegerSet neg = d.relation;
      neg.add_inequality(-deps::time_difference(scop, d, loop_position(band.first + l)) - 1);
      if (!affine::is_empty(neg))
        illegal(pass, "band is not permutable: " + describe(d) +
                          " has a negative component at loop level " +
                          std::to_string(band.first + l));
    }
  }
}

Scop apply_tiling(const Scop &scop, const Band &band, const std::vector<Int> &sizes,
                  const char *pass) {
  unsigned k = band.first, m = band.count;
  unsigned insert_at = loop_position(k);
  Scop out = scop;
  for (PolyStmt &s : out.statements) {
    unsigned nd = s.num_dims();
    std::vector<AffineExpr> old = s.schedule.results();
    std::vector<AffineExpr> res(old.begin(), old.begin() + insert_at);
    if (nd <= k) {
      for (unsigned l = 0; l < m; ++l) {
        res.push_back(0);
        res.push_back(0);
      }
      res.insert(res.end(), old.begin() + insert_at, old.end());
      s.schedule = AffineMap(nd, s.schedule.num_symbols(), std::move(res));
      continue;
    }
    // A shallower statement is tiled on the levels it has and sits in the
    // first tile (index 0) of the others.
    unsigned covered = std::min(m, nd - k);
    unsigned first_tile = s.domain.append_dims(covered);
    s.guard = s.guard.lift(nd + covered, 0);
    for (unsigned l = 0; l < m; ++l) {
      if (l >= covered) {
        res.push_back(0);
        res.push_back(0);
        continue;
      }
      AffineExpr f = old[loop_position(k + l)];
      AffineExpr t = AffineExpr::dim(first_tile + l);
      s.domain.add_inequality(f - t * sizes[l]);
      s.domain.add_inequality(t * sizes[l] + (sizes[l] - 1) - f);
      s.dim_names.push_back("");
      res.push_back(t);
      res.push_back(0);
    }
    res.insert(res.end(), old.begin() + insert_at, old.end());
    s.schedule = AffineMap(nd + covered, s.schedule.num_symbols(), std::move(res));
  }
  for (scop::TileBand &b : out.bands) {
    for (unsigned &p : b.tile_positions)
      if (p >= insert_at)
        p += 2 * m;
    for (unsigned &p : b.point_positions)
      if (p >= insert_at)
        p += 2 * m;
  }
  scop::TileBand nb;
  for (unsigned l = 0; l < m; ++l) {
    nb.tile_positions.push_back(insert_at + 2 * l);
    nb.point_positions.push_back(insert_at + 2 * m + 2 * l);
  }
  nb.sizes = sizes;
  out.bands.push_back(nb);
  out.parallel.assign(out.schedule_dims(), false);
  return out;
}

} // namespace

Scop tile(const Scop &scop, const TilingSpec &spec) {
  Band band = select_band(scop, spec, "tile");
  check_permutable(scop, band, "tile");
  Scop out = apply_tiling(scop, band, spec.sizes, "tile");
  check_legal(scop, out, "tile");
  return out;
}

Scop wavefront(const Scop &scop) {
  if (scop.bands.empty())
    fail(ErrorKind::InvalidArgument, "wavefront: the scop has no tile band (tile first)");
  const scop::TileBand &band = scop.bands.back();
  if (band.tile_positions.size() < 2)
    fail(ErrorKind::InvalidArgument, "wavefront: the tile band needs at least two dims");
  Scop out = scop;
  unsigned p0 = band.tile_positions[0];
  for (PolyStmt &s : out.statements) {
    std::vector<AffineExpr> res = s.schedule.results();
    for (std::size_t l = 1; l < band.tile_positions.size(); ++l)
      res[p0] = res[p0] + res[band.tile_positions[l]];
    s.schedule = AffineMap(s.schedule.num_dims(), s.schedule.num_symbols(), std::move(res));
  }
  check_legal(scop, out, "wavefront");
  std::vector<Dependence> deps = deps::compute_dependences(out);
  for (unsigned p : band.tile_positions)
    out.parallel[p] = deps::is_loop_parallel(out, deps, p);
  return out;
}

Scop sub_bounding_box_tile(const Scop &scop, const TilingSpec &spec) {
  const char *pass = "subbb-tile";
  Band band = select_band(scop, spec, pass);
  check_permutable(scop, band, pass);
  Scop tiled = apply_tiling(scop, band, spec.sizes, pass);
  check_legal(scop, tiled, pass);
  Scop out = tiled;
  out.bands.back().bounding_box = true;
  unsigned m = band.count;
  unsigned first_point = out.bands.back().point_positions.front();
  unsigned last_point = out.bands.back().point_positions.back();
  for (std::size_t si = 0; si < out.statements.size(); ++si) {
    PolyStmt &s = out.statements[si];
    const PolyStmt &before = scop.statements[si];
    unsigned nd = s.num_dims();
    if (before.num_dims() <= band.first)
      continue;
    // Dims the point loops range over, i.e. used by the band but by no
    // loop outside it.
    std::vector<unsigned> inner;
    for (unsigned d = 0; d < before.num_dims(); ++d) {
      bool in_band = false, outside = false;
      for (unsigned p = 0; p < s.schedule.num_results(); ++p) {
        if (!s.schedule.result(p).uses_dim(d))
          continue;
        if (p >= first_point && p <= last_point)
          in_band = true;
        else
          outside = true;
      }
      if (in_band && !outside)
        inner.push_back(d);
      if (in_band && outside)
        fail(ErrorKind::Unsupported, std::string(pass) + ": loop outside the band of " + s.name +
                                         " depends on a point dim");
    }
    for (unsigned p = last_point + 1; p < s.schedule.num_results(); ++p)
      if (!s.schedule.result(p).is_constant())
        fail(ErrorKind::Unsupported,
             std::string(pass) + ": statement " + s.name + " has loops inside the band");
    std::vector<unsigned> levels;
    for (unsigned l = 0; l < m; ++l)
      if (!s.schedule.result(first_point + 2 * l).is_constant())
        levels.push_back(l);
    if (inner.size() != levels.size())
      fail(ErrorKind::Unsupported, std::string(pass) + ": band of " + s.name +
                                       " does not map one-to-one onto its point dims");
    affine::IntMatrix coeffs;
    for (unsigned l : levels) {
      std::vector<Int> row;
      for (unsigned d : inner)
        row.push_back(s.schedule.result(first_point + 2 * l).dim_coeff(d));
      coeffs.push_back(std::move(row));
    }
    Int det = affine::determinant(coeffs);
    if (det != 1 && det != -1)
      fail(ErrorKind::Unsupported,
           std::string(pass) + ": point loops of " + s.name + " are not unimodular");
    // Keep everything but the point dims, then re-add the full tile box.
    affine::Projection hull = affine::project_out(s.domain, inner);
    const IntegerSet &box = hull.set;
    IntegerSet domain(nd, box.num_symbols());
    {
      // Re-insert the projected dims at their original indices.
      std::vector<AffineExpr> place;
      for (unsigned d = 0; d < nd; ++d)
        if (std::find(inner.begin(), inner.end(), d) == inner.end())
          place.push_back(AffineExpr::dim(d));
      std::vector<AffineExpr> syms;
      for (unsigned k = 0; k < box.num_symbols(); ++k)
        syms.push_back(AffineExpr::symbol(k));
      for (unsigned e = 0; e < box.num_exists(); ++e)
        place.push_back(AffineExpr::dim(nd + e));
      domain.append_exists(box.num_exists());
      for (const affine::AffineConstraint &c : box.constraints())
        domain.add_constraint({c.expr.substitute(place, syms), c.kind});
    }
    for (unsigned l : levels) {
      AffineExpr f = s.schedule.result(first_point + 2 * l);
      AffineExpr t = s.schedule.result(out.bands.back().tile_positions[l]);
      domain.add_inequality(f - t * spec.sizes[l]);
      domain.add_inequality(t * spec.sizes[l] + (spec.sizes[l] - 1) - f);
    }
    s.guard = instances(before).lift(nd, 0);
    s.domain = std::move(domain);
  }
  check_legal(tiled, out, pass);
  return out;
}

} // namespace polyhls::transform

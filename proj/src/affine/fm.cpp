//===- fm.cpp - Fourier-Motzkin projection and integer search -------------===//

#include "polyhls/affine/fm.hpp"

#include <algorithm>
#include <functional>
#include <limits>

namespace polyhls::affine {

namespace {

// Rebuilds a set with the layout of `like` from raw rows.
IntegerSet with_rows(const IntegerSet &like, std::vector<Row> rows) {
  IntegerSet out(like.num_dims(), like.num_symbols());
  out.append_exists(like.num_exists());
  out.add_rows(rows);
  return out;
}

Row combine(const Row &a, Int fa, const Row &b, Int fb) {
  Row r;
  r.coeffs.resize(a.coeffs.size());
  for (std::size_t i = 0; i < a.coeffs.size(); ++i)
    r.coeffs[i] = checked::add(checked::mul(a.coeffs[i], fa), checked::mul(b.coeffs[i], fb));
  return r;
}

void push_normalized(std::vector<Row> &out, Row r, bool &infeasible) {
  switch (normalize_row(r)) {
  case RowStatus::Infeasible:
    infeasible = true;
    break;
  case RowStatus::Trivial:
    break;
  case RowStatus::Keep:
    out.push_back(std::move(r));
    break;
  }
}

std::vector<Row> infeasible_rows(std::size_t width) {
  Row r;
  r.coeffs.assign(width, 0);
  r.coeffs.back() = -1;
  return {r};
}

// Zeroes column `col` by elimination; rows keep their width.
std::vector<Row> eliminate(const std::vector<Row> &rows, unsigned col, ShadowKind shadow,
                           bool &exact) {
  if (rows.empty())
    return rows;
  std::size_t width = rows.front().coeffs.size();

  const Row *pivot = nullptr;
  for (const Row &r : rows) {
    if (!r.equality || r.coeffs[col] == 0)
      continue;
    if (!pivot || checked::abs(r.coeffs[col]) < checked::abs(pivot->coeffs[col]))
      pivot = &r;
  }

  std::vector<Row> out;
  bool infeasible = false;
  if (pivot && (checked::abs(pivot->coeffs[col]) == 1 || shadow == ShadowKind::Real)) {
    Int a = pivot->coeffs[col];
    Int sign = a > 0 ? 1 : -1;
    if (checked::abs(a) != 1)
      exact = false;
    for (const Row &r : rows) {
      if (&r == pivot)
        continue;
      Int b = r.coeffs[col];
      if (b == 0) {
        out.push_back(r);
        continue;
      }
      Row n = combine(r, checked::abs(a), *pivot, checked::neg(checked::mul(b, sign)));
      n.equality = r.equality;
      push_normalized(out, std::move(n), infeasible);
    }
    return infeasible ? infeasible_rows(width) : out;
  }

  std::vector<Row> lowers, uppers;
  for (const Row &r : rows) {
    Int c = r.coeffs[col];
    if (c == 0) {
      out.push_back(r);
    } else if (r.equality) {
      // Only reached for non-unit equalities under the dark shadow.
      Row neg = r;
      for (auto &v : neg.coeffs)
        v = checked::neg(v);
      Row pos = r;
      pos.equality = neg.equality = false;
      (c > 0 ? lowers : uppers).push_back(pos);
      (c > 0 ? uppers : lowers).push_back(neg);
    } else {
      (c > 0 ? lowers : uppers).push_back(r);
    }
  }
  for (const Row &lo : lowers) {
    Int a = lo.coeffs[col];
    for (const Row &up : uppers) {
      Int b = checked::neg(up.coeffs[col]);
      Row n = combine(lo, b, up, a);
      if (a != 1 && b != 1) {
        exact = false;
        if (shadow == ShadowKind::Dark)
          n.coeffs.back() = checked::sub(n.coeffs.back(), checked::mul(a - 1, b - 1));
      }
      push_normalized(out, std::move(n), infeasible);
    }
  }
  return infeasible ? infeasible_rows(width) : out;
}

bool mentions(const std::vector<Row> &rows, unsigned col) {
  return std::any_of(rows.begin(), rows.end(),
                     [col](const Row &r) { return r.coeffs[col] != 0; });
}

// Lower score is eliminated first: unit equalities, then eliminations that
// keep integer exactness (a unit coefficient on one side of every pair), then
// the rest by the number of rows they generate.
std::size_t elimination_cost(const std::vector<Row> &rows, unsigned col) {
  std::size_t lo = 0, up = 0;
  bool eq = false, unit_eq = false, lo_unit = true, up_unit = true;
  for (const Row &r : rows) {
    Int c = r.coeffs[col];
    if (c == 0)
      continue;
    if (r.equality) {
      eq = true;
      unit_eq |= (c == 1 || c == -1);
    } else if (c > 0) {
      ++lo;
      lo_unit &= c == 1;
    } else {
      ++up;
      up_unit &= c == -1;
    }
  }
  if (unit_eq)
    return 0;
  if (!eq && (lo_unit || up_unit))
    return 2 + lo * up;
  if (eq)
    return 1'000'000;
  return 2'000'000 + lo * up;
}

// Removes duplicates and, among inequalities with the same coefficients,
// keeps only the tightest. Opposite inequalities that meet become an
// equality; ones that cannot both hold make the system infeasible.
std::vector<Row> dedupe(std::vector<Row> rows) {
  if (rows.empty())
    return rows;
  auto body_less = [](const Row &a, const Row &b) {
    return std::lexicographical_compare(a.coeffs.begin(), a.coeffs.end() - 1, b.coeffs.begin(),
                                        b.coeffs.end() - 1);
  };
  auto same_body = [](const Row &a, const Row &b) {
    return std::equal(a.coeffs.begin(), a.coeffs.end() - 1, b.coeffs.begin());
  };
  std::sort(rows.begin(), rows.end(), [&](const Row &a, const Row &b) {
    if (body_less(a, b))
      return true;
    if (body_less(b, a))
      return false;
    return std::tie(b.equality, a.coeffs.back()) < std::tie(a.equality, b.coeffs.back());
  });
  std::size_t width = rows.front().coeffs.size();
  std::vector<Row> out;
  for (Row &r : rows) {
    if (!out.empty() && same_body(out.back(), r)) {
      const Row &kept = out.back();
      // Sorted so that an equality (or the smallest constant) comes first.
      if (kept.equality && r.equality && kept.coeffs.back() != r.coeffs.back())
        return infeasible_rows(width);
      if (kept.equality && !r.equality && kept.coeffs.back() > r.coeffs.back())
        return infeasible_rows(width);
      continue;
    }
    out.push_back(std::move(r));
  }
  // Pair each inequality with its negation, if present.
  std::vector<Row> result;
  std::vector<bool> dropped(out.size(), false);
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (dropped[i] || out[i].equality)
      continue;
    Row neg = out[i];
    for (std::size_t c = 0; c + 1 < width; ++c)
      neg.coeffs[c] = checked::neg(neg.coeffs[c]);
    auto it = std::lower_bound(out.begin(), out.end(), neg, body_less);
    for (; it != out.end() && same_body(*it, neg); ++it) {
      std::size_t j = static_cast<std::size_t>(it - out.begin());
      if (it->equality || dropped[j])
        continue;
      Int sum = checked::add(out[i].coeffs.back(), it->coeffs.back());
      if (sum < 0)
        return infeasible_rows(width);
      if (sum == 0) {
        out[i].equality = true;
        normalize_row(out[i]);
        dropped[j] = true;
      }
      break;
    }
  }
  for (std::size_t i = 0; i < out.size(); ++i)
    if (!dropped[i])
      result.push_back(std::move(out[i]));
  return result;
}

bool has_contradiction(const std::vector<Row> &rows) {
  return std::any_of(rows.begin(), rows.end(), [](const Row &r) {
    bool zero = std::all_of(r.coeffs.begin(), r.coeffs.end() - 1, [](Int c) { return c == 0; });
    Int k = r.coeffs.back();
    return zero && (r.equality ? k != 0 : k < 0);
  });
}

std::vector<Row> eliminate_all(std::vector<Row> rows, std::vector<unsigned> cols,
                               ShadowKind shadow, bool &exact) {
  while (!cols.empty()) {
    auto best = cols.begin();
    std::size_t best_cost = std::numeric_limits<std::size_t>::max();
    for (auto it = cols.begin(); it != cols.end(); ++it) {
      std::size_t cost = mentions(rows, *it) ? elimination_cost(rows, *it) : 0;
      if (cost < best_cost) {
        best_cost = cost;
        best = it;
      }
    }
    unsigned col = *best;
    cols.erase(best);
    if (mentions(rows, col))
      rows = dedupe(eliminate(rows, col, shadow, exact));
    if (has_contradiction(rows))
      return rows;
  }
  return rows;
}

// Drops inequalities implied by one elimination step between two others.
void prune_redundant(std::vector<Row> &rows) {
  std::size_t cols = rows.empty() ? 0 : rows.front().coeffs.size() - 1;
  for (std::size_t r = rows.size(); r-- > 0;) {
    if (rows[r].equality)
      continue;
    const Row &target = rows[r];
    bool implied = false;
    for (std::size_t a = 0; a < rows.size() && !implied; ++a) {
      if (a == r || rows[a].equality)
        continue;
      for (std::size_t b = a + 1; b < rows.size() && !implied; ++b) {
        if (b == r || rows[b].equality)
          continue;
        for (std::size_t c = 0; c < cols && !implied; ++c) {
          Int ca = rows[a].coeffs[c], cb = rows[b].coeffs[c];
          if (ca == 0 || cb == 0 || (ca > 0) == (cb > 0))
            continue;
          Row n = combine(rows[a], checked::abs(cb), rows[b], checked::abs(ca));
          if (normalize_row(n) != RowStatus::Keep)
            continue;
          implied = std::equal(n.coeffs.begin(), n.coeffs.end() - 1, target.coeffs.begin()) &&
                    n.coeffs.back() <= target.coeffs.back();
        }
      }
    }
    if (implied)
      rows.erase(rows.begin() + static_cast<std::ptrdiff_t>(r));
  }
}

} // namespace

Projection project_out(const IntegerSet &set, std::vector<unsigned> vars, ShadowKind shadow) {
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  for (unsigned v : vars)
    if (v >= set.num_vars())
      fail(ErrorKind::Internal, "project_out: column is not a variable");
  Projection p{IntegerSet(), true};
  std::vector<Row> rows = eliminate_all(set.rows(), vars, shadow, p.exact);
  prune_redundant(rows);
  p.set = with_rows(set, std::move(rows));
  p.set.drop_zero_vars(vars);
  return p;
}

Projection fm_project_exact(const IntegerSet &set, unsigned var, ShadowKind shadow) {
  return project_out(set, {var}, shadow);
}

namespace {

// Views every column except the constant as an existential variable.
IntegerSet all_as_vars(const IntegerSet &set) {
  IntegerSet out(0, 0);
  out.append_exists(set.num_cols() - 1);
  out.add_rows(set.rows());
  return out;
}

std::vector<unsigned> iota_cols(unsigned n) {
  std::vector<unsigned> v(n);
  for (unsigned i = 0; i < n; ++i)
    v[i] = i;
  return v;
}

// Projection chain for exact search: level k holds the rows that only
// involve variables 0..k.
class Search {
public:
  explicit Search(const IntegerSet &set) : n_(set.num_vars()) {
    if (set.num_symbols() != 0)
      fail(ErrorKind::Internal, "integer search requires a set without symbols");
    chain_.resize(n_ + 1);
    chain_[n_] = set.rows();
    bool exact = true;
    for (unsigned k = n_; k-- > 0;)
      chain_[k] = dedupe(eliminate(chain_[k + 1], k, ShadowKind::Real, exact));
    for (const Row &r : chain_[0]) {
      Int k = r.coeffs.back();
      if (r.equality ? k != 0 : k < 0)
        infeasible_ = true;
    }
    point_.assign(n_, 0);
  }

  // Calls `leaf` at depth `stop` for each partial assignment consistent with
  // the chain; `leaf` returns false to abort.
  bool run(unsigned depth, unsigned stop, const std::function<bool()> &leaf) {
    if (infeasible_)
      return true;
    if (depth == stop)
      return leaf();
    Int lo = std::numeric_limits<Int>::min(), hi = std::numeric_limits<Int>::max();
    bool has_lo = false, has_hi = false;
    for (const Row &r : chain_[depth + 1]) {
      Int c = r.coeffs[depth];
      if (c == 0)
        continue;
      Int rest = r.coeffs.back();
      for (unsigned j = 0; j < depth; ++j)
        rest = checked::add(rest, checked::mul(r.coeffs[j], point_[j]));
      if (r.equality) {
        if (rest % c != 0)
          return true;
        Int v = checked::neg(rest) / c;
        lo = std::max(lo, v);
        hi = std::min(hi, v);
        has_lo = has_hi = true;
      } else if (c > 0) {
        lo = std::max(lo, checked::ceil_div(checked::neg(rest), c));
        has_lo = true;
      } else {
        hi = std::min(hi, checked::floor_div(rest, checked::neg(c)));
        has_hi = true;
      }
    }
    if (!has_lo || !has_hi)
      fail(ErrorKind::Unbounded, "variable " + std::to_string(depth) +
                                     " is unbounded in integer search");
    for (Int v = lo; v <= hi; ++v) {
      point_[depth] = v;
      if (!run(depth + 1, stop, leaf))
        return false;
    }
    return true;
  }

  unsigned size() const { return n_; }
  const std::vector<Int> &point() const { return point_; }

private:
  unsigned n_;
  std::vector<std::vector<Row>> chain_;
  std::vector<Int> point_;
  bool infeasible_ = false;
};

} // namespace

std::optional<std::vector<Int>> find_point(const IntegerSet &set) {
  if (set.is_obviously_empty())
    return std::nullopt;
  Search s(set);
  std::optional<std::vector<Int>> found;
  s.run(0, s.size(), [&] {
    found = s.point();
    return false;
  });
  return found;
}

bool is_empty(const IntegerSet &set) {
  if (set.is_obviously_empty())
    return true;
  IntegerSet flat = all_as_vars(set);
  bool exact = true;
  std::vector<Row> rows =
      eliminate_all(flat.rows(), iota_cols(flat.num_vars()), ShadowKind::Real, exact);
  for (const Row &r : rows) {
    Int k = r.coeffs.back();
    if (r.equality ? k != 0 : k < 0)
      return true;
  }
  if (exact)
    return false;
  if (set.num_symbols() == 0) {
    try {
      return !find_point(set).has_value();
    } catch (const Error &e) {
      if (e.kind() != ErrorKind::Unbounded)
        throw;
    }
  }
  // Undecided; non-empty is the conservative answer for every caller.
  return false;
}

std::vector<std::vector<Int>> enumerate_points(const IntegerSet &set) {
  std::vector<std::vector<Int>> out;
  if (set.num_symbols() != 0)
    fail(ErrorKind::Internal, "enumerate_points: symbols must be fixed first");
  if (set.is_obviously_empty())
    return out;
  Search s(set);
  unsigned dims = set.num_dims();
  s.run(0, dims, [&] {
    bool witness = dims == s.size();
    if (!witness) {
      s.run(dims, s.size(), [&] {
        witness = true;
        return false;
      });
    }
    if (witness)
      out.emplace_back(s.point().begin(), s.point().begin() + dims);
    return true;
  });
  return out;
}

std::vector<std::vector<Int>> enumerate_points(const IntegerSet &set,
                                               std::span<const Int> syms) {
  return enumerate_points(set.fix_symbols(syms));
}

void sort_bounds(std::vector<AffineExpr> &exprs) {
  auto key = [](const AffineExpr &e) {
    return std::make_pair(e.dim_extent(), e.uses_symbols());
  };
  std::sort(exprs.begin(), exprs.end(), [&](const AffineExpr &a, const AffineExpr &b) {
    auto ka = key(a), kb = key(b);
    if (ka != kb)
      return ka < kb;
    return a < b;
  });
  exprs.erase(std::unique(exprs.begin(), exprs.end()), exprs.end());
}

DimBounds bounds_for_dim(const IntegerSet &set, unsigned dim) {
  if (dim >= set.num_dims())
    fail(ErrorKind::Internal, "bounds_for_dim: dim out of range");
  std::vector<unsigned> inner;
  for (unsigned v = dim + 1; v < set.num_vars(); ++v)
    inner.push_back(v);
  IntegerSet p = project_out(set, inner).set;

  DimBounds b;
  if (p.is_obviously_empty()) {
    b.lower.push_back(1);
    b.upper.push_back(0);
    return b;
  }
  for (const Row &r : p.rows()) {
    Int a = r.coeffs[dim];
    if (a == 0)
      continue;
    Row rest_row = r;
    rest_row.coeffs[dim] = 0;
    AffineExpr rest = p.row_expr(rest_row);
    if (r.equality) {
      if (a < 0) {
        a = checked::neg(a);
        rest = -rest;
      }
      b.lower.push_back((-rest).ceil_div(a));
      b.upper.push_back((-rest).floor_div(a));
    } else if (a > 0) {
      b.lower.push_back((-rest).ceil_div(a));
    } else {
      b.upper.push_back(rest.floor_div(checked::neg(a)));
    }
  }
  if (b.lower.empty() || b.upper.empty())
    fail(ErrorKind::Unbounded, "dimension d" + std::to_string(dim) + " has no " +
                                   (b.lower.empty() ? "lower" : "upper") + " bound");
  sort_bounds(b.lower);
  sort_bounds(b.upper);
  return b;
}

} // namespace polyhls::affine

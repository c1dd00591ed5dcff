//===- set.cpp - Integer sets, maps and unimodular transforms -------------===//

#include "polyhls/affine/set.hpp"
#include "polyhls/affine/fm.hpp"

#include <algorithm>
#include <map>
#include <tuple>

namespace polyhls::affine {

RowStatus normalize_row(Row &row) {
  auto &c = row.coeffs;
  std::size_t n = c.size() - 1;
  Int g = 0;
  for (std::size_t i = 0; i < n; ++i)
    g = checked::gcd(g, c[i]);
  Int k = c[n];
  if (g == 0) {
    if (row.equality)
      return k == 0 ? RowStatus::Trivial : RowStatus::Infeasible;
    return k >= 0 ? RowStatus::Trivial : RowStatus::Infeasible;
  }
  if (row.equality) {
    if (k % g != 0)
      return RowStatus::Infeasible;
    for (auto &v : c)
      v /= g;
    auto first = std::find_if(c.begin(), c.end() - 1, [](Int v) { return v != 0; });
    if (*first < 0)
      for (auto &v : c)
        v = checked::neg(v);
    return RowStatus::Keep;
  }
  for (std::size_t i = 0; i < n; ++i)
    c[i] /= g;
  c[n] = checked::floor_div(k, g);
  return RowStatus::Keep;
}

IntegerSet::IntegerSet(unsigned num_dims, unsigned num_symbols)
    : num_dims_(num_dims), num_symbols_(num_symbols) {}

IntegerSet IntegerSet::empty(unsigned num_dims, unsigned num_symbols) {
  IntegerSet s(num_dims, num_symbols);
  Row r;
  r.coeffs.assign(s.num_cols(), 0);
  r.coeffs.back() = -1;
  s.rows_.push_back(r);
  return s;
}

bool IntegerSet::is_obviously_empty() const {
  for (const Row &r : rows_) {
    if (std::all_of(r.coeffs.begin(), r.coeffs.end() - 1, [](Int v) { return v == 0; }))
      return true;
  }
  return false;
}

void IntegerSet::simplify() {
  bool infeasible = false;
  std::vector<Row> work;
  work.reserve(rows_.size());
  for (Row r : rows_) {
    switch (normalize_row(r)) {
    case RowStatus::Infeasible:
      infeasible = true;
      break;
    case RowStatus::Trivial:
      break;
    case RowStatus::Keep:
      work.push_back(std::move(r));
      break;
    }
  }

  bool changed = true;
  while (changed && !infeasible) {
    changed = false;
    using Key = std::vector<Int>;
    std::map<Key, std::size_t> eqs, ineqs;
    std::vector<Row> merged;
    for (Row &r : work) {
      Key key(r.coeffs.begin(), r.coeffs.end() - 1);
      Int k = r.coeffs.back();
      auto &index = r.equality ? eqs : ineqs;
      auto it = index.find(key);
      if (it == index.end()) {
        index.emplace(std::move(key), merged.size());
        merged.push_back(std::move(r));
        continue;
      }
      Int &existing = merged[it->second].coeffs.back();
      if (r.equality) {
        if (existing != k)
          infeasible = true;
      } else {
        existing = std::min(existing, k);
      }
    }
    if (infeasible)
      break;

    std::vector<bool> dead(merged.size(), false);
    for (std::size_t i = 0; i < merged.size() && !infeasible; ++i) {
      Row &r = merged[i];
      if (dead[i] || r.equality)
        continue;
      Key key(r.coeffs.begin(), r.coeffs.end() - 1);
      Key neg = key;
      for (auto &v : neg)
        v = checked::neg(v);
      Int k = r.coeffs.back();
      // Implied by (or contradicting) an equality over the same direction.
      if (auto it = eqs.find(key); it != eqs.end()) {
        Int ke = merged[it->second].coeffs.back();
        if (k >= ke)
          dead[i] = true;
        else
          infeasible = true;
        continue;
      }
      if (auto it = eqs.find(neg); it != eqs.end()) {
        Int ke = merged[it->second].coeffs.back();
        if (checked::add(k, ke) >= 0)
          dead[i] = true;
        else
          infeasible = true;
        continue;
      }
      if (auto it = ineqs.find(neg); it != ineqs.end() && !dead[it->second]) {
        Int k2 = merged[it->second].coeffs.back();
        Int slack = checked::add(k, k2);
        if (slack < 0) {
          infeasible = true;
        } else if (slack == 0) {
          r.equality = true;
          normalize_row(r);
          dead[it->second] = true;
          changed = true;
        }
      }
    }
    work.clear();
    for (std::size_t i = 0; i < merged.size(); ++i)
      if (!dead[i])
        work.push_back(std::move(merged[i]));
  }

  if (infeasible) {
    Row r;
    r.coeffs.assign(num_cols(), 0);
    r.coeffs.back() = -1;
    rows_ = {r};
    return;
  }
  rows_ = std::move(work);
}

bool operator==(const IntegerSet &a, const IntegerSet &b) {
  if (a.num_dims_ != b.num_dims_ || a.num_exists_ != b.num_exists_ ||
      a.num_symbols_ != b.num_symbols_ || a.rows_.size() != b.rows_.size())
    return false;
  auto key = [](const Row &r) { return std::tie(r.coeffs, r.equality); };
  auto less = [&](const Row &x, const Row &y) { return key(x) < key(y); };
  std::vector<Row> ra = a.rows_, rb = b.rows_;
  std::sort(ra.begin(), ra.end(), less);
  std::sort(rb.begin(), rb.end(), less);
  return ra == rb;
}

void IntegerSet::add_row(Row row) {
  if (row.coeffs.size() != num_cols())
    fail(ErrorKind::Internal, "constraint row has wrong width");
  rows_.push_back(std::move(row));
  simplify();
}

void IntegerSet::add_rows(std::span<const Row> rows) {
  for (const Row &r : rows) {
    if (r.coeffs.size() != num_cols())
      fail(ErrorKind::Internal, "constraint row has wrong width");
    rows_.push_back(r);
  }
  simplify();
}

unsigned IntegerSet::append_dims(unsigned count) {
  unsigned first = num_dims_;
  for (Row &r : rows_)
    r.coeffs.insert(r.coeffs.begin() + num_dims_, count, 0);
  num_dims_ += count;
  return first;
}

unsigned IntegerSet::append_exists(unsigned count) {
  unsigned first = num_vars();
  for (Row &r : rows_)
    r.coeffs.insert(r.coeffs.begin() + num_vars(), count, 0);
  num_exists_ += count;
  return first;
}

IntegerSet IntegerSet::lift(unsigned total_dims, unsigned offset) const {
  if (offset + num_dims_ > total_dims)
    fail(ErrorKind::Internal, "lift target space too small");
  IntegerSet out(total_dims, num_symbols_);
  out.num_exists_ = num_exists_;
  for (const Row &r : rows_) {
    Row n;
    n.equality = r.equality;
    n.coeffs.assign(out.num_cols(), 0);
    for (unsigned d = 0; d < num_dims_; ++d)
      n.coeffs[offset + d] = r.coeffs[d];
    for (unsigned e = 0; e < num_exists_; ++e)
      n.coeffs[total_dims + e] = r.coeffs[num_dims_ + e];
    for (unsigned s = 0; s < num_symbols_; ++s)
      n.coeffs[out.symbol_col(s)] = r.coeffs[symbol_col(s)];
    n.coeffs.back() = r.coeffs.back();
    out.rows_.push_back(std::move(n));
  }
  return out;
}

void IntegerSet::drop_zero_vars(std::vector<unsigned> cols) {
  std::sort(cols.begin(), cols.end());
  cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
  for (auto it = cols.rbegin(); it != cols.rend(); ++it) {
    unsigned col = *it;
    if (col >= num_vars())
      fail(ErrorKind::Internal, "drop_zero_vars: column is not a variable");
    for (Row &r : rows_) {
      if (r.coeffs[col] != 0)
        fail(ErrorKind::Internal, "drop_zero_vars: column still in use");
      r.coeffs.erase(r.coeffs.begin() + col);
    }
    if (col < num_dims_)
      --num_dims_;
    else
      --num_exists_;
  }
  simplify();
}

namespace {

struct SparseLin {
  std::map<unsigned, Int> vars;
  std::map<unsigned, Int> syms;
  Int constant = 0;

  void scale_add(const SparseLin &o, Int f) {
    for (auto [k, v] : o.vars)
      vars[k] = checked::add(vars[k], checked::mul(v, f));
    for (auto [k, v] : o.syms)
      syms[k] = checked::add(syms[k], checked::mul(v, f));
    constant = checked::add(constant, checked::mul(o.constant, f));
  }

  auto key() const { return std::tie(vars, syms, constant); }
};

class Flattener {
public:
  explicit Flattener(IntegerSet &set) : set_(set) {}

  SparseLin flatten(const AffineExpr &e) {
    SparseLin out;
    out.constant = e.constant_term();
    for (const auto &[term, coeff] : e.terms()) {
      switch (term.kind) {
      case TermKind::Dim:
        if (term.index >= set_.num_vars())
          fail(ErrorKind::Malformed, "dimension d" + std::to_string(term.index) +
                                         " out of range in constraint");
        out.vars[term.index] = checked::add(out.vars[term.index], coeff);
        break;
      case TermKind::Symbol:
        if (term.index >= set_.num_symbols())
          fail(ErrorKind::Malformed, "symbol s" + std::to_string(term.index) +
                                         " out of range in constraint");
        out.syms[term.index] = checked::add(out.syms[term.index], coeff);
        break;
      default: {
        SparseLin inner = flatten(*term.inner);
        unsigned q = div_var(term.kind == TermKind::CeilDiv ? TermKind::CeilDiv
                                                            : TermKind::FloorDiv,
                             inner, term.divisor);
        SparseLin value;
        if (term.kind == TermKind::Mod) {
          value = inner;
          value.vars[q] = checked::sub(value.vars[q], term.divisor);
        } else {
          value.vars[q] = 1;
        }
        out.scale_add(value, coeff);
        break;
      }
      }
    }
    return out;
  }

  Row to_row(const SparseLin &lin, bool equality) const {
    Row r;
    r.equality = equality;
    r.coeffs.assign(set_.num_cols(), 0);
    for (auto [k, v] : lin.vars)
      r.coeffs[k] = v;
    for (auto [k, v] : lin.syms)
      r.coeffs[set_.symbol_col(k)] = v;
    r.coeffs.back() = lin.constant;
    return r;
  }

private:
  unsigned div_var(TermKind kind, const SparseLin &inner, Int d) {
    auto key = std::make_tuple(kind, inner.vars, inner.syms, inner.constant, d);
    if (auto it = cache_.find(key); it != cache_.end())
      return it->second;
    unsigned q = set_.append_exists(1);
    SparseLin lo = inner, hi;
    // floordiv: d*q <= e <= d*q + d - 1; ceildiv: d*q - d + 1 <= e <= d*q.
    lo.vars[q] = checked::sub(lo.vars[q], d);
    hi.scale_add(inner, -1);
    hi.vars[q] = checked::add(hi.vars[q], d);
    if (kind == TermKind::FloorDiv)
      hi.constant = checked::add(hi.constant, d - 1);
    else
      lo.constant = checked::add(lo.constant, d - 1);
    set_.add_row(to_row(lo, false));
    set_.add_row(to_row(hi, false));
    cache_.emplace(key, q);
    return q;
  }

  IntegerSet &set_;
  std::map<std::tuple<TermKind, std::map<unsigned, Int>, std::map<unsigned, Int>, Int, Int>,
           unsigned>
      cache_;
};

} // namespace

void IntegerSet::add_constraint(const AffineConstraint &c) {
  Flattener f(*this);
  SparseLin lin = f.flatten(c.expr);
  add_row(f.to_row(lin, c.kind == ConstraintKind::Equality));
}

AffineExpr IntegerSet::row_expr(const Row &row) const {
  AffineExpr e(row.coeffs.back());
  for (unsigned v = 0; v < num_vars(); ++v)
    if (row.coeffs[v] != 0)
      e += AffineExpr::dim(v) * row.coeffs[v];
  for (unsigned s = 0; s < num_symbols_; ++s)
    if (Int c = row.coeffs[symbol_col(s)]; c != 0)
      e += AffineExpr::symbol(s) * c;
  return e;
}

std::vector<AffineConstraint> IntegerSet::constraints() const {
  std::vector<AffineConstraint> out;
  for (const Row &r : rows_)
    out.push_back({row_expr(r), r.equality ? ConstraintKind::Equality
                                           : ConstraintKind::Inequality});
  return out;
}

bool IntegerSet::contains(std::span<const Int> dims, std::span<const Int> syms) const {
  if (dims.size() < num_dims_ || syms.size() < num_symbols_)
    fail(ErrorKind::Malformed, "point has too few coordinates");
  if (num_exists_ == 0) {
    for (const Row &r : rows_) {
      Int acc = r.coeffs.back();
      for (unsigned d = 0; d < num_dims_; ++d)
        acc = checked::add(acc, checked::mul(r.coeffs[d], dims[d]));
      for (unsigned s = 0; s < num_symbols_; ++s)
        acc = checked::add(acc, checked::mul(r.coeffs[symbol_col(s)], syms[s]));
      if (r.equality ? acc != 0 : acc < 0)
        return false;
    }
    return true;
  }
  // Substitute dims and symbols, then search the existentials.
  IntegerSet rest(0, 0);
  rest.num_exists_ = num_exists_;
  for (const Row &r : rows_) {
    Row n;
    n.equality = r.equality;
    n.coeffs.assign(num_exists_ + 1, 0);
    Int acc = r.coeffs.back();
    for (unsigned d = 0; d < num_dims_; ++d)
      acc = checked::add(acc, checked::mul(r.coeffs[d], dims[d]));
    for (unsigned s = 0; s < num_symbols_; ++s)
      acc = checked::add(acc, checked::mul(r.coeffs[symbol_col(s)], syms[s]));
    for (unsigned e = 0; e < num_exists_; ++e)
      n.coeffs[e] = r.coeffs[num_dims_ + e];
    n.coeffs.back() = acc;
    rest.rows_.push_back(std::move(n));
  }
  rest.simplify();
  if (rest.is_obviously_empty())
    return false;
  // An existential bounded on one side only satisfies its rows once it is
  // large enough, whatever the others are: drop it with them.
  for (bool dropped = true; dropped;) {
    dropped = false;
    for (unsigned e = 0; e < num_exists_; ++e) {
      bool lower = false, upper = false;
      for (const Row &r : rest.rows_) {
        Int c = r.coeffs[e];
        lower = lower || (c != 0 && (r.equality || c > 0));
        upper = upper || (c != 0 && (r.equality || c < 0));
      }
      if (lower != upper) {
        std::erase_if(rest.rows_, [&](const Row &r) { return r.coeffs[e] != 0; });
        dropped = true;
      }
    }
  }
  if (rest.rows_.empty())
    return true;
  try {
    return find_point(rest).has_value();
  } catch (const Error &err) {
    if (err.kind() != ErrorKind::Unbounded)
      throw;
  }
  // Unbounded in both directions along some ray; a point, if any, lies well
  // inside this box for the small coefficients that occur here.
  constexpr Int kBox = Int(1) << 20;
  for (unsigned e = 0; e < num_exists_; ++e) {
    Row lo, hi;
    lo.coeffs.assign(num_exists_ + 1, 0);
    hi.coeffs.assign(num_exists_ + 1, 0);
    lo.coeffs[e] = 1;
    lo.coeffs.back() = kBox;
    hi.coeffs[e] = -1;
    hi.coeffs.back() = kBox;
    rest.rows_.push_back(lo);
    rest.rows_.push_back(hi);
  }
  return find_point(rest).has_value();
}

IntegerSet IntegerSet::intersect(const IntegerSet &other) const {
  if (other.num_dims_ != num_dims_ || other.num_symbols_ != num_symbols_)
    fail(ErrorKind::ArityMismatch, "intersect: sets live in different spaces");
  IntegerSet out(num_dims_, num_symbols_);
  out.num_exists_ = num_exists_ + other.num_exists_;
  auto place = [&](const IntegerSet &src, unsigned exist_offset) {
    for (const Row &r : src.rows_) {
      Row n;
      n.equality = r.equality;
      n.coeffs.assign(out.num_cols(), 0);
      for (unsigned d = 0; d < num_dims_; ++d)
        n.coeffs[d] = r.coeffs[d];
      for (unsigned e = 0; e < src.num_exists_; ++e)
        n.coeffs[num_dims_ + exist_offset + e] = r.coeffs[num_dims_ + e];
      for (unsigned s = 0; s < num_symbols_; ++s)
        n.coeffs[out.symbol_col(s)] = r.coeffs[src.symbol_col(s)];
      n.coeffs.back() = r.coeffs.back();
      out.rows_.push_back(std::move(n));
    }
  };
  place(*this, 0);
  place(other, num_exists_);
  out.simplify();
  return out;
}

IntegerSet IntegerSet::fix_symbols(std::span<const Int> values) const {
  if (values.size() < num_symbols_)
    fail(ErrorKind::Malformed, "fix_symbols: too few values");
  IntegerSet out(num_dims_, 0);
  out.num_exists_ = num_exists_;
  for (const Row &r : rows_) {
    Row n;
    n.equality = r.equality;
    n.coeffs.assign(r.coeffs.begin(), r.coeffs.begin() + num_vars());
    Int acc = r.coeffs.back();
    for (unsigned s = 0; s < num_symbols_; ++s)
      acc = checked::add(acc, checked::mul(r.coeffs[symbol_col(s)], values[s]));
    n.coeffs.push_back(acc);
    out.rows_.push_back(std::move(n));
  }
  out.simplify();
  return out;
}

//===----------------------------------------------------------------------===//
// AffineMap
//===----------------------------------------------------------------------===//

AffineMap::AffineMap(unsigned num_dims, unsigned num_symbols,
                     std::vector<AffineExpr> results)
    : num_dims_(num_dims), num_symbols_(num_symbols), results_(std::move(results)) {
  for (const AffineExpr &r : results_) {
    if (r.dim_extent() > num_dims_)
      fail(ErrorKind::Malformed, "map result " + to_string(r) +
                                     " references a dimension out of range");
    if (r.symbol_extent() > num_symbols_)
      fail(ErrorKind::Malformed, "map result " + to_string(r) +
                                     " references a symbol out of range");
  }
}

AffineMap AffineMap::identity(unsigned n) {
  std::vector<AffineExpr> r;
  for (unsigned i = 0; i < n; ++i)
    r.push_back(AffineExpr::dim(i));
  return AffineMap(n, 0, std::move(r));
}

std::vector<Int> AffineMap::evaluate(std::span<const Int> dims,
                                     std::span<const Int> syms) const {
  std::vector<Int> out;
  out.reserve(results_.size());
  for (const AffineExpr &r : results_)
    out.push_back(r.evaluate(dims, syms));
  return out;
}

AffineMap compose(const AffineMap &outer, const AffineMap &inner) {
  if (outer.num_dims() != inner.num_results())
    fail(ErrorKind::ArityMismatch,
         "compose: outer map takes " + std::to_string(outer.num_dims()) +
             " dims but inner map yields " + std::to_string(inner.num_results()));
  unsigned ns = std::max(outer.num_symbols(), inner.num_symbols());
  std::vector<AffineExpr> syms;
  for (unsigned s = 0; s < ns; ++s)
    syms.push_back(AffineExpr::symbol(s));
  std::vector<AffineExpr> results;
  for (const AffineExpr &r : outer.results())
    results.push_back(r.substitute(inner.results(), syms));
  return AffineMap(inner.num_dims(), ns, std::move(results));
}

//===----------------------------------------------------------------------===//
// Unimodular matrices
//===----------------------------------------------------------------------===//

namespace {

void check_square(const IntMatrix &m) {
  for (const auto &row : m)
    if (row.size() != m.size())
      fail(ErrorKind::Malformed, "matrix is not square");
}

} // namespace

Int determinant(const IntMatrix &input) {
  check_square(input);
  std::size_t n = input.size();
  if (n == 0)
    return 1;
  IntMatrix m = input;
  Int sign = 1, prev = 1;
  for (std::size_t k = 0; k < n; ++k) {
    if (m[k][k] == 0) {
      std::size_t r = k + 1;
      while (r < n && m[r][k] == 0)
        ++r;
      if (r == n)
        return 0;
      std::swap(m[k], m[r]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j)
        m[i][j] = checked::sub(checked::mul(m[i][j], m[k][k]),
                               checked::mul(m[i][k], m[k][j])) /
                  prev;
    prev = m[k][k];
  }
  return sign * m[n - 1][n - 1];
}

IntMatrix unimodular_inverse(const IntMatrix &input) {
  check_square(input);
  Int det = determinant(input);
  if (det != 1 && det != -1)
    fail(ErrorKind::NotUnimodular,
         "matrix determinant is " + std::to_string(det) + ", expected +-1");
  std::size_t n = input.size();
  IntMatrix a = input, inv(n, std::vector<Int>(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    inv[i][i] = 1;
  auto sub_row = [&](std::size_t dst, std::size_t src, Int q) {
    for (std::size_t j = 0; j < n; ++j) {
      a[dst][j] = checked::sub(a[dst][j], checked::mul(q, a[src][j]));
      inv[dst][j] = checked::sub(inv[dst][j], checked::mul(q, inv[src][j]));
    }
  };
  for (std::size_t c = 0; c < n; ++c) {
    for (;;) {
      std::size_t best = n;
      for (std::size_t r = c; r < n; ++r)
        if (a[r][c] != 0 && (best == n || checked::abs(a[r][c]) < checked::abs(a[best][c])))
          best = r;
      if (best == n)
        fail(ErrorKind::NotUnimodular, "matrix is singular");
      std::swap(a[c], a[best]);
      std::swap(inv[c], inv[best]);
      bool done = true;
      for (std::size_t r = c + 1; r < n; ++r) {
        if (a[r][c] == 0)
          continue;
        sub_row(r, c, a[r][c] / a[c][c]);
        if (a[r][c] != 0)
          done = false;
      }
      if (done)
        break;
    }
    if (a[c][c] < 0) {
      for (std::size_t j = 0; j < n; ++j) {
        a[c][j] = checked::neg(a[c][j]);
        inv[c][j] = checked::neg(inv[c][j]);
      }
    }
    if (a[c][c] != 1)
      fail(ErrorKind::NotUnimodular, "matrix is not unimodular");
  }
  for (std::size_t c = n; c-- > 0;)
    for (std::size_t r = 0; r < c; ++r)
      if (a[r][c] != 0)
        sub_row(r, c, a[r][c]);
  return inv;
}

IntegerSet apply_unimodular(const IntegerSet &set, const IntMatrix &t) {
  if (t.size() != set.num_dims())
    fail(ErrorKind::ArityMismatch, "matrix size does not match set dimensionality");
  IntMatrix inv = unimodular_inverse(t);
  IntegerSet out = IntegerSet::universe(set.num_dims(), set.num_symbols());
  out.append_exists(set.num_exists());
  std::vector<Row> rows;
  unsigned n = set.num_dims();
  for (const Row &r : set.rows()) {
    Row nr = r;
    for (unsigned j = 0; j < n; ++j) {
      Int acc = 0;
      for (unsigned i = 0; i < n; ++i)
        acc = checked::add(acc, checked::mul(r.coeffs[i], inv[i][j]));
      nr.coeffs[j] = acc;
    }
    rows.push_back(std::move(nr));
  }
  out.add_rows(rows);
  return out;
}

AffineMap apply_unimodular(const AffineMap &map, const IntMatrix &t) {
  if (t.size() != map.num_results())
    fail(ErrorKind::ArityMismatch, "matrix size does not match map result count");
  unimodular_inverse(t); // validates
  std::vector<AffineExpr> results;
  for (std::size_t i = 0; i < t.size(); ++i) {
    AffineExpr acc;
    for (std::size_t j = 0; j < t.size(); ++j)
      acc += map.result(static_cast<unsigned>(j)) * t[i][j];
    results.push_back(acc);
  }
  return AffineMap(map.num_dims(), map.num_symbols(), std::move(results));
}

} // namespace polyhls::affine

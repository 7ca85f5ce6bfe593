// Copyright 2026 The fdcop Authors
// SPDX-License-Identifier: Apache-2.0

// Piecewise polynomials of total degree <= 2 over axis-aligned boxes.
//
// Addition refines shared variables into atomic ranges and sums the
// overlapping pieces. Projection maximises one variable out in closed form:
// each piece contributes its two boundary candidates and, when the piece is
// strictly concave in the eliminated variable, the interior critical-point
// candidate; the result is the upper envelope of all candidates over the
// remaining variable.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "fdcop/error.hpp"
#include "fdcop/format.hpp"
#include "fdcop/model.hpp"

namespace fdcop {

/// Breakpoints closer than this to an existing breakpoint snap onto it.
inline constexpr double kSnapTolerance = 1e-9;
inline constexpr std::size_t kDefaultPieceCap = 100000;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  bool contains(double x, double tol = 0.0) const {
    return x >= lo - tol && x <= hi + tol;
  }
  bool operator==(const Interval&) const = default;
};

/// Axis-aligned box: one closed interval per variable, sorted by variable.
class Box {
 public:
  Box() = default;
  explicit Box(std::vector<std::pair<VarIndex, Interval>> ranges)
      : ranges_(std::move(ranges)) {
    std::sort(ranges_.begin(), ranges_.end(),
              [](const auto& l, const auto& r) { return l.first < r.first; });
    for (std::size_t i = 0; i < ranges_.size(); ++i) {
      if (i > 0 && ranges_[i].first == ranges_[i - 1].first) {
        throw ArgumentError("box lists a variable twice");
      }
      if (!(ranges_[i].second.lo <= ranges_[i].second.hi)) {
        throw ArgumentError("box interval requires lo <= hi");
      }
    }
  }

  const std::vector<std::pair<VarIndex, Interval>>& ranges() const {
    return ranges_;
  }
  std::size_t dimension() const { return ranges_.size(); }

  std::vector<VarIndex> variables() const {
    std::vector<VarIndex> out;
    out.reserve(ranges_.size());
    for (const auto& r : ranges_) out.push_back(r.first);
    return out;
  }

  const Interval* find(VarIndex v) const {
    auto it = std::lower_bound(
        ranges_.begin(), ranges_.end(), v,
        [](const auto& r, VarIndex key) { return r.first < key; });
    if (it == ranges_.end() || it->first != v) return nullptr;
    return &it->second;
  }

  const Interval& at(VarIndex v) const {
    const Interval* r = find(v);
    if (!r) throw ArgumentError("variable not in box");
    return *r;
  }

  double volume() const {
    double vol = 1.0;
    for (const auto& r : ranges_) vol *= r.second.length();
    return vol;
  }

  bool contains(const std::map<VarIndex, double>& point,
                double tol = 0.0) const {
    for (const auto& [v, range] : ranges_) {
      auto it = point.find(v);
      if (it == point.end() || !range.contains(it->second, tol)) return false;
    }
    return true;
  }

  bool operator==(const Box&) const = default;

  /// Lexicographic by (lo, hi) of each variable in variable order.
  friend bool operator<(const Box& l, const Box& r) {
    std::size_t n = std::min(l.ranges_.size(), r.ranges_.size());
    for (std::size_t i = 0; i < n; ++i) {
      const auto& a = l.ranges_[i].second;
      const auto& b = r.ranges_[i].second;
      if (a.lo != b.lo) return a.lo < b.lo;
      if (a.hi != b.hi) return a.hi < b.hi;
    }
    return l.ranges_.size() < r.ranges_.size();
  }

 private:
  std::vector<std::pair<VarIndex, Interval>> ranges_;
};

/// Polynomial of total degree <= 2 over a sorted set of variables.
class Poly2 {
 public:
  Poly2() = default;

  static Poly2 constant(double c) {
    Poly2 p;
    p.constant_ = c;
    return p;
  }

  /// c2 * v^2 + c1 * v + c0.
  static Poly2 univariate(VarIndex v, double c0, double c1, double c2) {
    Poly2 p = with_variables({v});
    p.constant_ = c0;
    p.linear_[0] = c1;
    p.square_[0] = c2;
    return p;
  }

  static Poly2 from_utility(const QuadraticUtility& f) {
    Poly2 p = with_variables({std::min(f.first, f.second),
                              std::max(f.first, f.second)});
    std::size_t i = p.slot(f.first);
    std::size_t j = p.slot(f.second);
    p.constant_ = f.f0;
    p.linear_[i] = f.b;
    p.square_[i] = f.a;
    p.linear_[j] = f.d;
    p.square_[j] = f.c;
    p.cross_at(i, j) = f.e;
    return p;
  }

  const std::vector<VarIndex>& variables() const { return vars_; }
  double constant() const { return constant_; }
  double linear(VarIndex v) const {
    auto i = find_slot(v);
    return i ? linear_[*i] : 0.0;
  }
  double square(VarIndex v) const {
    auto i = find_slot(v);
    return i ? square_[*i] : 0.0;
  }
  double cross(VarIndex u, VarIndex v) const {
    auto i = find_slot(u);
    auto j = find_slot(v);
    if (!i || !j || *i == *j) return 0.0;
    return cross_[std::min(*i, *j) * vars_.size() + std::max(*i, *j)];
  }

  double evaluate(const std::map<VarIndex, double>& point) const {
    std::vector<double> x(vars_.size());
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      auto it = point.find(vars_[i]);
      if (it == point.end()) {
        throw DomainError("point lacks a polynomial variable");
      }
      x[i] = it->second;
    }
    return evaluate_slots(x);
  }

  friend Poly2 operator+(const Poly2& l, const Poly2& r) {
    std::vector<VarIndex> vars;
    std::set_union(l.vars_.begin(), l.vars_.end(), r.vars_.begin(),
                   r.vars_.end(), std::back_inserter(vars));
    Poly2 out = with_variables(vars);
    out.constant_ = l.constant_ + r.constant_;
    auto accumulate = [&out](const Poly2& p) {
      std::vector<std::size_t> map(p.vars_.size());
      for (std::size_t i = 0; i < p.vars_.size(); ++i) {
        map[i] = out.slot(p.vars_[i]);
        out.linear_[map[i]] += p.linear_[i];
        out.square_[map[i]] += p.square_[i];
      }
      std::size_t n = p.vars_.size();
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
          out.cross_at(map[i], map[j]) += p.cross_[i * n + j];
        }
      }
    };
    accumulate(l);
    accumulate(r);
    return out;
  }

  bool operator==(const Poly2&) const = default;

  std::string to_string() const {
    std::ostringstream os;
    bool any = false;
    auto term = [&](double coef, const std::string& mono) {
      if (coef == 0.0) return;
      if (any) os << " + ";
      os << format_double(coef);
      if (!mono.empty()) os << '*' << mono;
      any = true;
    };
    term(constant_, "");
    std::size_t n = vars_.size();
    for (std::size_t i = 0; i < n; ++i) {
      std::string name = "x" + std::to_string(vars_[i]);
      term(linear_[i], name);
      term(square_[i], name + "^2");
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        term(cross_[i * n + j], "x" + std::to_string(vars_[i]) + "*x" +
                                    std::to_string(vars_[j]));
      }
    }
    if (!any) os << '0';
    return os.str();
  }

 private:
  static Poly2 with_variables(std::vector<VarIndex> vars) {
    Poly2 p;
    p.vars_ = std::move(vars);
    p.linear_.assign(p.vars_.size(), 0.0);
    p.square_.assign(p.vars_.size(), 0.0);
    p.cross_.assign(p.vars_.size() * p.vars_.size(), 0.0);
    return p;
  }

  std::optional<std::size_t> find_slot(VarIndex v) const {
    auto it = std::lower_bound(vars_.begin(), vars_.end(), v);
    if (it == vars_.end() || *it != v) return std::nullopt;
    return static_cast<std::size_t>(it - vars_.begin());
  }
  std::size_t slot(VarIndex v) const { return *find_slot(v); }
  double& cross_at(std::size_t i, std::size_t j) {
    return cross_[std::min(i, j) * vars_.size() + std::max(i, j)];
  }

  double evaluate_slots(const std::vector<double>& x) const {
    double sum = constant_;
    std::size_t n = vars_.size();
    for (std::size_t i = 0; i < n; ++i) {
      sum += linear_[i] * x[i] + square_[i] * x[i] * x[i];
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        sum += cross_[i * n + j] * x[i] * x[j];
      }
    }
    return sum;
  }

  std::vector<VarIndex> vars_;
  double constant_ = 0.0;
  std::vector<double> linear_;
  std::vector<double> square_;
  std::vector<double> cross_;
};

struct Piece {
  Box box;
  Poly2 poly;

  bool operator==(const Piece&) const = default;
};

class PiecewiseFunction {
 public:
  PiecewiseFunction() : PiecewiseFunction(Box{}, {Piece{Box{}, Poly2{}}}) {}

  PiecewiseFunction(Box domain, std::vector<Piece> pieces)
      : domain_(std::move(domain)), pieces_(std::move(pieces)) {
    vars_ = domain_.variables();
    for (const auto& p : pieces_) {
      if (p.box.variables() != vars_) {
        throw ArgumentError("piece box must cover exactly the function's variables");
      }
      for (VarIndex v : p.poly.variables()) {
        if (!std::binary_search(vars_.begin(), vars_.end(), v)) {
          throw ArgumentError("piece polynomial mentions an undeclared variable");
        }
      }
    }
    std::stable_sort(pieces_.begin(), pieces_.end(),
                     [](const Piece& l, const Piece& r) { return l.box < r.box; });
  }

  static PiecewiseFunction constant(double c) {
    return PiecewiseFunction(Box{}, {Piece{Box{}, Poly2::constant(c)}});
  }

  static PiecewiseFunction from_utility(const QuadraticUtility& f,
                                        const ContinuousDomain& first,
                                        const ContinuousDomain& second) {
    Box box({{f.first, Interval{first.lb, first.ub}},
             {f.second, Interval{second.lb, second.ub}}});
    return PiecewiseFunction(box, {Piece{box, Poly2::from_utility(f)}});
  }

  const std::vector<VarIndex>& variables() const { return vars_; }
  const Box& domain() const { return domain_; }
  const std::vector<Piece>& pieces() const { return pieces_; }
  std::size_t size() const { return pieces_.size(); }

  bool operator==(const PiecewiseFunction&) const = default;

 private:
  std::vector<VarIndex> vars_;
  Box domain_;
  std::vector<Piece> pieces_;
};

/// Value of the first piece (in lexicographic box order) containing `point`.
inline double evaluate(const PiecewiseFunction& f,
                       const std::map<VarIndex, double>& point) {
  if (!f.domain().contains(point)) {
    throw DomainError("point outside the function's domain box");
  }
  for (const auto& piece : f.pieces()) {
    if (piece.box.contains(point)) return piece.poly.evaluate(point);
  }
  // Only reachable if the pieces fail to cover the domain.
  throw DomainError("no piece contains the point");
}

inline PiecewiseFunction add(const PiecewiseFunction& f,
                             const PiecewiseFunction& g,
                             std::size_t piece_cap = kDefaultPieceCap) {
  std::vector<VarIndex> shared;
  std::set_intersection(f.variables().begin(), f.variables().end(),
                        g.variables().begin(), g.variables().end(),
                        std::back_inserter(shared));
  for (VarIndex v : shared) {
    if (!(f.domain().at(v) == g.domain().at(v))) {
      throw DomainError("domain mismatch on shared variable x" +
                        std::to_string(v));
    }
  }

  // Atomic ranges: union of both operands' breakpoints per shared variable.
  std::vector<std::vector<double>> breaks(shared.size());
  for (std::size_t s = 0; s < shared.size(); ++s) {
    for (const auto* h : {&f, &g}) {
      for (const auto& p : h->pieces()) {
        const auto& r = p.box.at(shared[s]);
        breaks[s].push_back(r.lo);
        breaks[s].push_back(r.hi);
      }
    }
    std::sort(breaks[s].begin(), breaks[s].end());
    breaks[s].erase(std::unique(breaks[s].begin(), breaks[s].end()),
                    breaks[s].end());
  }

  std::vector<std::pair<VarIndex, Interval>> merged_domain;
  for (const auto& r : f.domain().ranges()) merged_domain.push_back(r);
  for (const auto& r : g.domain().ranges()) {
    if (!f.domain().find(r.first)) merged_domain.push_back(r);
  }

  std::vector<Piece> out;
  std::vector<std::vector<Interval>> atoms(shared.size());
  for (const auto& pf : f.pieces()) {
    for (const auto& pg : g.pieces()) {
      bool overlap = true;
      for (std::size_t s = 0; s < shared.size() && overlap; ++s) {
        const auto& a = pf.box.at(shared[s]);
        const auto& b = pg.box.at(shared[s]);
        double lo = std::max(a.lo, b.lo);
        double hi = std::min(a.hi, b.hi);
        atoms[s].clear();
        if (!(hi > lo)) {
          overlap = false;
          break;
        }
        auto it = std::lower_bound(breaks[s].begin(), breaks[s].end(), lo);
        for (; it + 1 != breaks[s].end() && *it < hi; ++it) {
          atoms[s].push_back(Interval{*it, *(it + 1)});
        }
      }
      if (!overlap) continue;

      std::vector<std::pair<VarIndex, Interval>> base;
      for (const auto& r : pf.box.ranges()) {
        if (!std::binary_search(shared.begin(), shared.end(), r.first)) {
          base.push_back(r);
        }
      }
      for (const auto& r : pg.box.ranges()) {
        if (!std::binary_search(shared.begin(), shared.end(), r.first)) {
          base.push_back(r);
        }
      }
      Poly2 poly = pf.poly + pg.poly;

      // Cartesian product of the atomic ranges of every shared variable.
      std::vector<std::size_t> idx(shared.size(), 0);
      while (true) {
        auto ranges = base;
        for (std::size_t s = 0; s < shared.size(); ++s) {
          ranges.emplace_back(shared[s], atoms[s][idx[s]]);
        }
        out.push_back(Piece{Box(std::move(ranges)), poly});
        if (out.size() > piece_cap) {
          throw CapacityError("piecewise addition exceeds the piece cap of " +
                              std::to_string(piece_cap));
        }
        std::size_t s = 0;
        for (; s < shared.size(); ++s) {
          if (++idx[s] < atoms[s].size()) break;
          idx[s] = 0;
        }
        if (s == shared.size()) break;
      }
    }
  }
  return PiecewiseFunction(Box(std::move(merged_domain)), std::move(out));
}

/// Maximiser of the eliminated variable on one projected piece.
struct Response {
  enum class Kind { kLowerBound, kUpperBound, kAffine };
  Kind kind = Kind::kLowerBound;
  double bound = 0.0;      // x for the bound kinds
  double slope = 0.0;      // x = slope * y + intercept for kAffine
  double intercept = 0.0;

  double at(double y) const {
    return kind == Kind::kAffine ? slope * y + intercept : bound;
  }
  bool operator==(const Response&) const = default;
};

struct ResponseSegment {
  Interval range;  // over the remaining variable; [0,0] when none remains
  Response response;

  bool operator==(const ResponseSegment&) const = default;
};

/// Closed-form maximiser of the eliminated variable, piece by piece.
struct BestResponse {
  VarIndex eliminated = 0;
  std::optional<VarIndex> remaining;
  std::vector<ResponseSegment> segments;

  /// Maximiser for a given value of the remaining variable (first segment
  /// containing it wins).
  double respond(double y) const {
    if (!remaining) return segments.front().response.at(0.0);
    for (const auto& s : segments) {
      if (s.range.contains(y, kSnapTolerance)) return s.response.at(y);
    }
    throw ProtocolError("value outside every best-response segment");
  }
};

struct Projection {
  PiecewiseFunction function;
  BestResponse response;
};

struct UnaryArgmax {
  double value = 0.0;
  double utility = 0.0;
};

namespace detail {

/// c2 * y^2 + c1 * y + c0.
struct Quad1 {
  double c0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;

  double operator()(double y) const { return c0 + c1 * y + c2 * y * y; }
  Quad1 operator-(const Quad1& o) const {
    return {c0 - o.c0, c1 - o.c1, c2 - o.c2};
  }
  bool operator==(const Quad1&) const = default;
};

struct Segment {
  Interval range;
  Quad1 q;
  Response response;
};

/// Real roots of q strictly inside (lo, hi).
inline void interior_roots(const Quad1& q, double lo, double hi,
                           std::vector<double>& out) {
  auto keep = [&](double r) {
    if (std::isfinite(r) && r > lo && r < hi) out.push_back(r);
  };
  if (q.c2 == 0.0) {
    if (q.c1 != 0.0) keep(-q.c0 / q.c1);
    return;
  }
  double disc = q.c1 * q.c1 - 4.0 * q.c2 * q.c0;
  if (disc < 0.0) return;
  double sq = std::sqrt(disc);
  // Numerically stable pair of roots.
  double t = -0.5 * (q.c1 + std::copysign(sq, q.c1));
  if (t != 0.0) {
    keep(t / q.c2);
    keep(q.c0 / t);
  } else {
    keep(0.0);
  }
}

/// Sorted breakpoints with near-duplicates (and points hugging the ends)
/// snapped away. Always starts at lo and ends at hi.
inline std::vector<double> snap_breakpoints(std::vector<double> pts, double lo,
                                            double hi) {
  std::sort(pts.begin(), pts.end());
  std::vector<double> out{lo};
  for (double p : pts) {
    if (p - out.back() > kSnapTolerance && hi - p > kSnapTolerance) {
      out.push_back(p);
    }
  }
  if (hi > out.back()) out.push_back(hi);
  return out;
}

inline void append_merged(std::vector<Segment>& out, const Segment& s) {
  if (!out.empty() && out.back().q == s.q &&
      out.back().response == s.response &&
      out.back().range.hi == s.range.lo) {
    out.back().range.hi = s.range.hi;
    return;
  }
  out.push_back(s);
}

/// Upper envelope of a handful of candidates, each defined on a sub-range of
/// `span`. Ties go to the earlier candidate.
inline std::vector<Segment> envelope(const std::vector<Segment>& cands,
                                     Interval span) {
  std::vector<double> pts;
  for (const auto& c : cands) {
    pts.push_back(c.range.lo);
    pts.push_back(c.range.hi);
  }
  for (std::size_t i = 0; i < cands.size(); ++i) {
    for (std::size_t j = i + 1; j < cands.size(); ++j) {
      interior_roots(cands[i].q - cands[j].q, span.lo, span.hi, pts);
    }
  }
  auto bps = snap_breakpoints(std::move(pts), span.lo, span.hi);
  std::vector<Segment> out;
  for (std::size_t k = 0; k + 1 < bps.size(); ++k) {
    double a = bps[k];
    double b = bps[k + 1];
    double mid = 0.5 * (a + b);
    const Segment* best = nullptr;
    double best_value = -std::numeric_limits<double>::infinity();
    for (const auto& c : cands) {
      if (c.range.lo > a + kSnapTolerance || c.range.hi < b - kSnapTolerance) {
        continue;
      }
      double v = c.q(mid);
      if (!best || v > best_value) {
        best = &c;
        best_value = v;
      }
    }
    if (!best) continue;
    append_merged(out, Segment{Interval{a, b}, best->q, best->response});
  }
  return out;
}

/// Pointwise max of two segment lists (each sorted, possibly with gaps; a
/// gap means "undefined"). Ties go to `left`.
inline std::vector<Segment> merge_max(const std::vector<Segment>& left,
                                      const std::vector<Segment>& right) {
  std::vector<double> pts;
  for (const auto* side : {&left, &right}) {
    for (const auto& s : *side) {
      pts.push_back(s.range.lo);
      pts.push_back(s.range.hi);
    }
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  auto locate = [](const std::vector<Segment>& side, std::size_t& cursor,
                   double a, double b) -> const Segment* {
    while (cursor < side.size() && side[cursor].range.hi <= a) ++cursor;
    if (cursor < side.size() && side[cursor].range.lo <= a &&
        side[cursor].range.hi >= b) {
      return &side[cursor];
    }
    return nullptr;
  };

  std::vector<Segment> out;
  std::size_t li = 0;
  std::size_t ri = 0;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    double a = pts[k];
    double b = pts[k + 1];
    if (!(b > a)) continue;
    const Segment* l = locate(left, li, a, b);
    const Segment* r = locate(right, ri, a, b);
    if (!l && !r) continue;
    if (!l || !r) {
      const Segment* s = l ? l : r;
      append_merged(out, Segment{Interval{a, b}, s->q, s->response});
      continue;
    }
    std::vector<double> roots;
    interior_roots(l->q - r->q, a, b, roots);
    auto bps = snap_breakpoints(std::move(roots), a, b);
    for (std::size_t j = 0; j + 1 < bps.size(); ++j) {
      double mid = 0.5 * (bps[j] + bps[j + 1]);
      const Segment* w = r->q(mid) > l->q(mid) ? r : l;
      append_merged(out, Segment{Interval{bps[j], bps[j + 1]}, w->q,
                                 w->response});
    }
  }
  return out;
}

inline std::vector<Segment> merge_all(std::vector<std::vector<Segment>> parts) {
  if (parts.empty()) return {};
  while (parts.size() > 1) {
    std::vector<std::vector<Segment>> next;
    next.reserve((parts.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < parts.size(); i += 2) {
      next.push_back(merge_max(parts[i], parts[i + 1]));
    }
    if (parts.size() % 2) next.push_back(std::move(parts.back()));
    parts = std::move(next);
  }
  return std::move(parts.front());
}

/// Max over x in [lo, hi] of c2 x^2 + c1 x + c0; ties to the smallest x.
inline std::pair<double, double> max_on_interval(const Quad1& q, double lo,
                                                 double hi) {
  double best_x = lo;
  double best_v = q(lo);
  auto consider = [&](double x) {
    double v = q(x);
    if (v > best_v || (v == best_v && x < best_x)) {
      best_x = x;
      best_v = v;
    }
  };
  if (q.c2 < 0.0) {
    double x = -q.c1 / (2.0 * q.c2);
    if (x > lo && x < hi) consider(x);
  }
  consider(hi);
  return {best_x, best_v};
}

}  // namespace detail

/// Best point of a one-variable piecewise function: endpoints of every piece
/// plus interior vertices of concave pieces. Ties go to the smallest value.
inline UnaryArgmax argmax_unary(const PiecewiseFunction& f) {
  if (f.variables().size() != 1) {
    throw ArgumentError("argmax_unary needs a function of exactly one variable");
  }
  VarIndex v = f.variables().front();
  UnaryArgmax best{0.0, -std::numeric_limits<double>::infinity()};
  bool first = true;
  for (const auto& p : f.pieces()) {
    const auto& r = p.box.at(v);
    detail::Quad1 q{p.poly.constant(), p.poly.linear(v), p.poly.square(v)};
    auto [x, u] = detail::max_on_interval(q, r.lo, r.hi);
    if (first || u > best.utility || (u == best.utility && x < best.value)) {
      best = {x, u};
      first = false;
    }
  }
  return best;
}

/// Eliminates `var` by maximisation. Exact for at most one remaining
/// variable; wider functions raise UnsupportedError.
inline Projection project(const PiecewiseFunction& f, VarIndex var,
                          std::size_t piece_cap = kDefaultPieceCap) {
  const auto& vars = f.variables();
  if (!std::binary_search(vars.begin(), vars.end(), var)) {
    throw ArgumentError("projected variable does not occur in the function");
  }
  if (vars.size() > 2) {
    throw UnsupportedError(
        "exact projection supports at most one remaining variable");
  }
  using detail::Quad1;
  using detail::Segment;

  if (vars.size() == 1) {
    auto best = argmax_unary(f);
    BestResponse br{var, std::nullopt,
                    {ResponseSegment{Interval{0.0, 0.0},
                                     Response{Response::Kind::kAffine, 0.0, 0.0,
                                              best.value}}}};
    return {PiecewiseFunction::constant(best.utility), std::move(br)};
  }

  VarIndex y = vars[0] == var ? vars[1] : vars[0];
  Interval y_domain = f.domain().at(y);

  std::vector<std::vector<Segment>> parts;
  parts.reserve(f.size());
  for (const auto& p : f.pieces()) {
    const Interval& xr = p.box.at(var);
    const Interval& yr = p.box.at(y);
    if (!(yr.hi > yr.lo)) continue;
    double A = p.poly.square(var);
    double B = p.poly.linear(var);
    double E = p.poly.cross(var, y);
    Quad1 q{p.poly.constant(), p.poly.linear(y), p.poly.square(y)};

    auto at_bound = [&](double x) {
      return Quad1{q.c0 + A * x * x + B * x, q.c1 + E * x, q.c2};
    };
    std::vector<Segment> cands;
    cands.push_back(Segment{yr, at_bound(xr.lo),
                            Response{Response::Kind::kLowerBound, xr.lo}});
    cands.push_back(Segment{yr, at_bound(xr.hi),
                            Response{Response::Kind::kUpperBound, xr.hi}});
    if (A < 0.0) {
      // Stationary point x = s*y + t of the concave slice.
      double s = -E / (2.0 * A);
      double t = -B / (2.0 * A);
      Interval valid = yr;
      bool feasible = true;
      if (s == 0.0) {
        feasible = t >= xr.lo && t <= xr.hi;
      } else {
        double y1 = (xr.lo - t) / s;
        double y2 = (xr.hi - t) / s;
        valid.lo = std::max(yr.lo, std::min(y1, y2));
        valid.hi = std::min(yr.hi, std::max(y1, y2));
        feasible = valid.hi > valid.lo;
      }
      if (feasible) {
        Quad1 g{q.c0 + A * t * t + B * t,
                q.c1 + 2.0 * A * s * t + B * s + E * t,
                q.c2 + A * s * s + E * s};
        cands.push_back(
            Segment{valid, g, Response{Response::Kind::kAffine, 0.0, s, t}});
      }
    }
    parts.push_back(detail::envelope(cands, yr));
  }
  auto env = detail::merge_all(std::move(parts));
  if (env.size() > piece_cap) {
    throw CapacityError("projection exceeds the piece cap of " +
                        std::to_string(piece_cap));
  }

  Box domain({{y, y_domain}});
  std::vector<Piece> pieces;
  BestResponse br{var, y, {}};
  pieces.reserve(env.size());
  for (const auto& s : env) {
    pieces.push_back(Piece{Box({{y, s.range}}),
                           Poly2::univariate(y, s.q.c0, s.q.c1, s.q.c2)});
    br.segments.push_back(ResponseSegment{s.range, s.response});
  }
  return {PiecewiseFunction(std::move(domain), std::move(pieces)),
          std::move(br)};
}

/// Reports the first violation of the partition invariant (pieces inside the
/// domain, pairwise disjoint interiors, union covering the domain), or
/// nothing when the function is a valid partition.
inline std::optional<std::string> audit_partition(const PiecewiseFunction& f) {
  const auto& vars = f.variables();
  double covered = 0.0;
  for (const auto& p : f.pieces()) {
    for (VarIndex v : vars) {
      const auto& r = p.box.at(v);
      const auto& d = f.domain().at(v);
      if (r.lo < d.lo || r.hi > d.hi) return "piece extends outside the domain";
    }
    covered += p.box.volume();
  }
  for (std::size_t i = 0; i < f.size(); ++i) {
    for (std::size_t j = i + 1; j < f.size(); ++j) {
      bool interior_overlap = true;
      for (VarIndex v : vars) {
        const auto& a = f.pieces()[i].box.at(v);
        const auto& b = f.pieces()[j].box.at(v);
        if (std::min(a.hi, b.hi) <= std::max(a.lo, b.lo)) {
          interior_overlap = false;
          break;
        }
      }
      if (interior_overlap && !vars.empty()) {
        return "pieces " + std::to_string(i) + " and " + std::to_string(j) +
               " overlap";
      }
    }
  }
  double total = f.domain().volume();
  if (std::abs(covered - total) > 1e-9 * std::max(1.0, std::abs(total))) {
    return "pieces cover volume " + format_double(covered) + " of " +
           format_double(total);
  }
  return std::nullopt;
}

/// One line per piece: `[lo,hi]×[lo,hi]  : polynomial`.
inline std::string dump(const PiecewiseFunction& f) {
  std::ostringstream os;
  for (const auto& p : f.pieces()) {
    bool first = true;
    for (const auto& [v, r] : p.box.ranges()) {
      if (!first) os << "×";
      os << '[' << format_double(r.lo) << ',' << format_double(r.hi) << ']';
      first = false;
    }
    if (first) os << "[]";
    os << "  : " << p.poly.to_string() << '\n';
  }
  return os.str();
}

}  // namespace fdcop

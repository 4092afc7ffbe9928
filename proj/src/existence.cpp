#include "cltlb/existence.hpp"

#include <stdexcept>

namespace cltlb {

namespace {

VarPartition resolve(const EncodingContext &ctx, const VarPartition *partition,
                     ValuationMode mode) {
  if (partition)
    return mode == ValuationMode::Strong ? single_class(*partition) : *partition;
  if (mode == ValuationMode::Weak)
    throw std::invalid_argument("weak valuations need a computed variable partition");
  return single_class(ctx.partition);
}

std::string subject_tag(const Term &t) {
  if (!t.is_const)
    return t.var;
  return t.value < 0 ? "@m" + std::to_string(-t.value) : "@" + std::to_string(t.value);
}

const char *kind_tag(PathKind k) {
  switch (k) {
  case PathKind::Lt:
    return "l";
  case PathKind::Le:
    return "le";
  case PathKind::Gt:
    return "g";
  default:
    return "ge";
  }
}

const char *kind_op(PathKind k) {
  switch (k) {
  case PathKind::Lt:
    return "<";
  case PathKind::Le:
    return "<=";
  case PathKind::Gt:
    return ">";
  default:
    return ">=";
  }
}

bool holds(PathKind k, long long a, long long b) {
  switch (k) {
  case PathKind::Lt:
    return a < b;
  case PathKind::Le:
    return a <= b;
  case PathKind::Gt:
    return a > b;
  default:
    return a >= b;
  }
}

bool strict(PathKind k) { return k == PathKind::Lt || k == PathKind::Gt; }

PathKind weak_of(PathKind k) {
  return k == PathKind::Lt || k == PathKind::Le ? PathKind::Le : PathKind::Ge;
}

constexpr PathKind kKinds[] = {PathKind::Lt, PathKind::Le, PathKind::Gt, PathKind::Ge};

SExpr value_at(const EncodingContext &ctx, const Term &s, int pos) {
  return s.is_const ? ctx.lit(s.value) : ctx.sigma(s.var, pos);
}

struct Grid {
  const EncodingContext &ctx;
  int cls;
  int lb, la, k, lambda;

  SExpr local(PathKind kind, const Term &x, const Term &y, SExpr j, int h, int m) const {
    return app(path_symbol(kind, true, cls, x, y), {std::move(j), num(h), num(m)});
  }
  SExpr local(PathKind kind, const Term &x, const Term &y, int j, int h, int m) const {
    return local(kind, x, y, num(j), h, m);
  }
  SExpr path(PathKind kind, const Term &x, const Term &y, SExpr j, int h, int i, int m) const {
    return app(path_symbol(kind, false, cls, x, y), {std::move(j), num(h), num(i), num(m)});
  }
  SExpr path(PathKind kind, const Term &x, const Term &y, int j, int h, int i, int m) const {
    return path(kind, x, y, num(j), h, i, m);
  }
};

Grid make_grid(const EncodingContext &ctx, int cls) {
  return Grid{ctx, cls, ctx.b.look_back, ctx.b.look_ahead, ctx.k, ctx.b.width()};
}

} // namespace

std::vector<Term> class_subjects(const VarPartition &p, int cls) {
  std::vector<Term> out;
  for (const auto &v : p.classes.at(cls))
    out.push_back(Term::variable(v));
  for (long long c : p.consts.at(cls))
    out.push_back(Term::constant(c));
  return out;
}

std::string path_symbol(PathKind kind, bool local, int cls, const Term &x, const Term &y) {
  std::string head = (kind == PathKind::Lt || kind == PathKind::Le) ? "f" : "b";
  if (!local)
    head[0] = static_cast<char>(head[0] - 'a' + 'A');
  return head + kind_tag(kind) + "." + std::to_string(cls) + "." + subject_tag(x) + "." +
         subject_tag(y);
}

std::vector<Assertion> encode_local_relations(const EncodingContext &ctx,
                                              const VarPartition *partition,
                                              ValuationMode mode) {
  const VarPartition p = resolve(ctx, partition, mode);
  std::vector<Assertion> out;
  for (size_t c = 0; c < p.classes.size(); ++c) {
    const Grid g = make_grid(ctx, static_cast<int>(c));
    const auto subj = class_subjects(p, static_cast<int>(c));
    for (const auto &x : subj)
      for (const auto &y : subj)
        for (int j = 0; j <= g.k; ++j)
          for (int h = g.lb; h <= g.la; ++h)
            for (int m = g.lb; m <= g.la; ++m)
              for (PathKind kind : kKinds) {
                SExpr pred = g.local(kind, x, y, j, h, m);
                if (h > m) {
                  out.push_back({"Local", mk_not(pred)});
                } else if (x.is_const && y.is_const) {
                  out.push_back(
                      {"Local", holds(kind, x.value, y.value) ? pred : mk_not(pred)});
                } else {
                  out.push_back({"Local", mk_iff(pred, app(kind_op(kind),
                                                           {value_at(ctx, x, j + h),
                                                            value_at(ctx, y, j + m)}))});
                }
              }
  }
  return out;
}

std::vector<Assertion> encode_path_closure(const EncodingContext &ctx,
                                           const VarPartition *partition,
                                           ValuationMode mode) {
  const VarPartition p = resolve(ctx, partition, mode);
  std::vector<Assertion> out;
  std::vector<Assertion> congruence;
  for (size_t c = 0; c < p.classes.size(); ++c) {
    const Grid g = make_grid(ctx, static_cast<int>(c));
    const auto subj = class_subjects(p, static_cast<int>(c));
    for (PathKind kind : kKinds)
      for (const auto &x : subj)
        for (const auto &y : subj)
          for (int j = 0; j <= g.k; ++j)
            for (int i = j; i <= g.k; ++i)
              for (int h = g.lb; h <= g.la; ++h)
                for (int m = g.lb; m <= g.la; ++m) {
                  SExpr key = g.path(kind, x, y, j, h, i, m);
                  if (j + h > i + m) {
                    out.push_back({"Closure", mk_not(key)});
                    continue;
                  }
                  if (h - 1 >= g.lb && j + 1 <= i)
                    congruence.push_back(
                        {"Congruence", mk_iff(key, g.path(kind, x, y, j + 1, h - 1, i, m))});
                  if (m - 1 >= g.lb && i + 1 <= g.k)
                    congruence.push_back(
                        {"Congruence", mk_iff(key, g.path(kind, x, y, j, h, i + 1, m - 1))});
                  if (j == i) {
                    out.push_back({"Closure", mk_iff(key, g.local(kind, x, y, j, h, m))});
                    continue;
                  }
                  if (h != g.lb || (i + m) - (j + h) < g.lambda)
                    continue;
                  std::vector<SExpr> disj;
                  for (const auto &z : subj)
                    for (int u = g.lb; u <= g.la; ++u) {
                      if (z == x && u == g.lb)
                        continue;
                      if (j + u > i + m)
                        continue;
                      if (strict(kind)) {
                        disj.push_back(mk_and({g.local(kind, x, z, j, h, u),
                                               g.path(weak_of(kind), z, y, j, u, i, m)}));
                        disj.push_back(mk_and({g.local(weak_of(kind), x, z, j, h, u),
                                               g.path(kind, z, y, j, u, i, m)}));
                      } else {
                        disj.push_back(mk_and({g.local(kind, x, z, j, h, u),
                                               g.path(kind, z, y, j, u, i, m)}));
                      }
                    }
                  out.push_back({"Closure", mk_iff(key, mk_or(std::move(disj)))});
                }
  }
  for (auto &a : congruence)
    out.push_back(std::move(a));
  return out;
}

std::vector<Assertion> encode_existence_condition(const EncodingContext &ctx,
                                                  const VarPartition *partition,
                                                  ValuationMode mode) {
  const VarPartition p = resolve(ctx, partition, mode);
  std::vector<Assertion> out;
  const SExpr L = ctx.loop_minus_one();
  for (size_t c = 0; c < p.classes.size(); ++c) {
    const Grid g = make_grid(ctx, static_cast<int>(c));
    const auto subj = class_subjects(p, static_cast<int>(c));
    for (const auto &x : subj)
      for (const auto &x2 : subj) {
        if (x.is_const && x2.is_const)
          continue;
        if (x == x2 && !(ctx.opts.self_pairs && !x.is_const))
          continue;
        std::vector<SExpr> disj;
        for (int h = g.lb; h <= g.la; ++h)
          for (int h2 = g.lb; h2 <= g.la; ++h2) {
            SExpr up_le = g.path(PathKind::Le, x, x, L, h, g.k, h);
            SExpr up_lt = g.path(PathKind::Lt, x, x, L, h, g.k, h);
            SExpr down_gt = g.path(PathKind::Gt, x2, x2, L, h2, g.k, h2);
            SExpr down_ge = g.path(PathKind::Ge, x2, x2, L, h2, g.k, h2);
            SExpr below = mk_or({g.local(PathKind::Lt, x, x2, L, h, h2),
                                 g.local(PathKind::Gt, x2, x, L, h2, h)});
            disj.push_back(mk_and({mk_or({mk_and({up_le, down_gt}), mk_and({up_lt, down_ge})}),
                                   below}));
          }
        out.push_back({"Existence", mk_not(mk_or(std::move(disj)))});
      }
  }
  return out;
}

void encode_existence(const EncodingContext &ctx, SmtScript &script) {
  const VarPartition &p = ctx.partition;
  for (size_t c = 0; c < p.classes.size(); ++c) {
    const auto subj = class_subjects(p, static_cast<int>(c));
    for (PathKind kind : kKinds)
      for (const auto &x : subj)
        for (const auto &y : subj) {
          script.declare(path_symbol(kind, true, static_cast<int>(c), x, y),
                         {"Int", "Int", "Int"}, "Bool");
          script.declare(path_symbol(kind, false, static_cast<int>(c), x, y),
                         {"Int", "Int", "Int", "Int"}, "Bool");
        }
  }
  const ValuationMode mode = ctx.opts.mode;
  for (auto rows : {encode_local_relations(ctx, &p, mode), encode_path_closure(ctx, &p, mode),
                    encode_existence_condition(ctx, &p, mode)})
    for (auto &r : rows)
      script.assertions.push_back(std::move(r));
}

} // namespace cltlb

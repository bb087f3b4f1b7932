#include "ptt/kernel.hpp"

#include <algorithm>
#include <functional>

#include "ptt/binding.hpp"
#include "ptt/printer.hpp"

namespace ptt {

const char* err_kind_name(ErrKind k) {
  switch (k) {
    case ErrKind::IllTyped: return "IllTyped";
    case ErrKind::UniverseViolation: return "UniverseViolation";
    case ErrKind::UnboundVariable: return "UnboundVariable";
    case ErrKind::TypeMismatch: return "TypeMismatch";
    case ErrKind::FuelExhausted: return "FuelExhausted";
    case ErrKind::PositivityViolation: return "PositivityViolation";
    case ErrKind::NestedInductive: return "NestedInductive";
    case ErrKind::GuardViolation: return "GuardViolation";
    case ErrKind::ProofEliminationViolation: return "ProofEliminationViolation";
    case ErrKind::MissingCompanion: return "MissingCompanion";
    case ErrKind::AbstractionFailure: return "AbstractionFailure";
    case ErrKind::UnsupportedShape: return "UnsupportedShape";
    case ErrKind::HigherUniverseQuantification: return "HigherUniverseQuantification";
    case ErrKind::HigherUniverseIndex: return "HigherUniverseIndex";
    case ErrKind::HigherUniverseCtorArg: return "HigherUniverseCtorArg";
    case ErrKind::PropSetSubtypingUse: return "PropSetSubtypingUse";
    case ErrKind::NestedOrMutual: return "NestedOrMutual";
    case ErrKind::ParseError: return "ParseError";
    case ErrKind::Other: return "Other";
  }
  return "Error";
}

namespace {

TermPtr rebuild_spine(TermPtr head, const std::vector<TermPtr>& args, size_t from) {
  for (size_t i = from; i < args.size(); ++i) head = mk_app(std::move(head), args[i]);
  return head;
}

bool is_ctor_headed(const TermPtr& t) { return app_head(t)->tag == Tag::CtorRef; }

}  // namespace

void split_pi_telescope(TermPtr ty, Telescope& tele, TermPtr& tail) {
  while (ty->tag == Tag::Pi) {
    tele.push_back({ty->var, ty->a});
    ty = ty->b;
  }
  tail = ty;
}

int ctor_arity(const InductiveDecl& d, int ctor) {
  Telescope tele;
  TermPtr tail;
  split_pi_telescope(d.ctors[ctor].type, tele, tail);
  return (int)tele.size();
}

// Reduction ---------------------------------------------------------------

TermPtr whnf(const Environment& env, TermPtr t, Fuel& fuel) {
  for (;;) {
    std::vector<TermPtr> args;
    TermPtr head = app_head(t, args);
    switch (head->tag) {
      case Tag::Lam: {
        if (args.empty()) return t;
        fuel.step();
        TermPtr body = subst(head->b, head->var, args[0]);
        t = rebuild_spine(body, args, 1);
        continue;
      }
      case Tag::ConstRef: {
        const Decl* d = env.find(head->name);
        if (d && d->kind == DeclKind::Definition && !d->opaque) {
          fuel.step();
          t = rebuild_spine(d->body, args, 0);
          continue;
        }
        return t;
      }
      case Tag::Match: {
        TermPtr d = whnf(env, head->discr, fuel);
        std::vector<TermPtr> dargs;
        TermPtr dhead = app_head(d, dargs);
        if (dhead->tag == Tag::CtorRef) {
          fuel.step();
          const InductiveDecl& ind = env.inductive(dhead->name);
          size_t nparams = ind.params.size();
          const Branch* br = nullptr;
          for (const auto& b : head->branches)
            if (b.ctor == dhead->ctor_index) {
              br = &b;
              break;
            }
          if (!br || dargs.size() < nparams + br->args.size())
            throw Error(ErrKind::IllTyped, "iota reduction on malformed match");
          std::map<VarName, TermPtr> sub;
          for (size_t i = 0; i < br->args.size(); ++i) sub[br->args[i]] = dargs[nparams + i];
          t = rebuild_spine(subst_many(br->body, sub), args, 0);
          continue;
        }
        if (d != head->discr) {
          TermPtr m = mk_match(d, head->discr_type, head->var, head->in_vars, head->ret,
                               head->branches, head->flag_cod);
          return rebuild_spine(m, args, 0);
        }
        return t;
      }
      case Tag::Fix: {
        if ((int)args.size() <= head->struct_arg) return t;
        TermPtr sarg = whnf(env, args[head->struct_arg], fuel);
        if (!is_ctor_headed(sarg)) {
          if (sarg != args[head->struct_arg]) {
            std::vector<TermPtr> args2 = args;
            args2[head->struct_arg] = sarg;
            return rebuild_spine(head, args2, 0);
          }
          return t;
        }
        fuel.step();
        std::vector<TermPtr> args2 = args;
        args2[head->struct_arg] = sarg;
        TermPtr unfolded = subst(head->b, head->var, head);
        t = rebuild_spine(unfolded, args2, 0);
        continue;
      }
      default:
        return t;
    }
  }
}

TermPtr normalize(const Environment& env, TermPtr t, Fuel& fuel) {
  t = whnf(env, t, fuel);
  switch (t->tag) {
    case Tag::Sort:
    case Tag::Var:
    case Tag::IndRef:
    case Tag::CtorRef:
    case Tag::ConstRef:
      return t;
    case Tag::App:
      return mk_app(normalize(env, t->a, fuel), normalize(env, t->b, fuel));
    case Tag::Pi:
      return mk_pi(t->var, normalize(env, t->a, fuel), normalize(env, t->b, fuel), t->flag_dom,
                   t->flag_cod);
    case Tag::Lam:
      return mk_lam(t->var, normalize(env, t->a, fuel), normalize(env, t->b, fuel), t->flag_dom);
    case Tag::Fix:
      return mk_fix(t->var, normalize(env, t->a, fuel), normalize(env, t->b, fuel), t->struct_arg);
    case Tag::Match: {
      std::vector<Branch> brs;
      for (const auto& br : t->branches)
        brs.push_back({br.ctor, br.args, normalize(env, br.body, fuel)});
      return mk_match(normalize(env, t->discr, fuel), normalize(env, t->discr_type, fuel), t->var,
                      t->in_vars, normalize(env, t->ret, fuel), std::move(brs), t->flag_cod);
    }
  }
  return t;
}

// Conversion / subtyping ---------------------------------------------------

namespace {

bool conv_whnf(const Environment& env, TermPtr x, TermPtr y, Fuel& fuel);

// Renames the right-hand binder occurrences so both bodies use the same bound
// variable; picks a fresh one when the left name also occurs free on the right.
std::pair<TermPtr, TermPtr> align_binder(const VarName& xv, TermPtr xb, const VarName& yv,
                                         TermPtr yb) {
  if (xv == yv) return {xb, yb};
  if (!mentions_var(yb, xv)) return {xb, subst(yb, yv, mk_var(xv))};
  std::set<VarName> used = free_var_set(xb);
  for (const auto& v : free_var_set(yb)) used.insert(v);
  VarName z = fresh_name(xv.base, xv.cls, used);
  return {subst(xb, xv, mk_var(z)), subst(yb, yv, mk_var(z))};
}

bool conv_parts(const Environment& env, const TermPtr& x, const TermPtr& y, Fuel& fuel) {
  // x, y are whnf heads of the same tag.
  switch (x->tag) {
    case Tag::Sort:
      return x->sort == y->sort;
    case Tag::Var:
      return x->var == y->var;
    case Tag::IndRef:
    case Tag::ConstRef:
      return x->name == y->name;
    case Tag::CtorRef:
      return x->name == y->name && x->ctor_index == y->ctor_index;
    case Tag::Pi:
    case Tag::Lam: {
      if (!conv_whnf(env, x->a, y->a, fuel)) return false;
      auto [xb, yb] = align_binder(x->var, x->b, y->var, y->b);
      return conv_whnf(env, xb, yb, fuel);
    }
    case Tag::Fix: {
      if (x->struct_arg != y->struct_arg) return false;
      if (!conv_whnf(env, x->a, y->a, fuel)) return false;
      auto [xb, yb] = align_binder(x->var, x->b, y->var, y->b);
      return conv_whnf(env, xb, yb, fuel);
    }
    case Tag::Match: {
      if (x->branches.size() != y->branches.size()) return false;
      if (x->in_vars.size() != y->in_vars.size()) return false;
      if (!conv_whnf(env, x->discr, y->discr, fuel)) return false;
      if (!conv_whnf(env, x->discr_type, y->discr_type, fuel)) return false;
      {
        TermPtr xret = x->ret, yret = y->ret;
        for (size_t i = 0; i < x->in_vars.size(); ++i) {
          auto [a, b] = align_binder(x->in_vars[i], xret, y->in_vars[i], yret);
          xret = a;
          yret = b;
        }
        auto [a, b] = align_binder(x->var, xret, y->var, yret);
        if (!conv_whnf(env, a, b, fuel)) return false;
      }
      for (size_t i = 0; i < x->branches.size(); ++i) {
        const auto& bx = x->branches[i];
        const auto& by = y->branches[i];
        if (bx.ctor != by.ctor || bx.args.size() != by.args.size()) return false;
        TermPtr xb = bx.body, yb = by.body;
        for (size_t j = 0; j < bx.args.size(); ++j) {
          auto [a, b] = align_binder(bx.args[j], xb, by.args[j], yb);
          xb = a;
          yb = b;
        }
        if (!conv_whnf(env, xb, yb, fuel)) return false;
      }
      return true;
    }
    case Tag::App:
      return conv_whnf(env, x->a, y->a, fuel) && conv_whnf(env, x->b, y->b, fuel);
  }
  return false;
}

bool conv_whnf(const Environment& env, TermPtr x, TermPtr y, Fuel& fuel) {
  if (term_eq(x, y)) return true;
  x = whnf(env, x, fuel);
  y = whnf(env, y, fuel);
  if (x->tag != y->tag) return false;
  if (x->tag == Tag::App) {
    // Compare spines of stuck applications.
    std::vector<TermPtr> ax, ay;
    TermPtr hx = app_head(x, ax);
    TermPtr hy = app_head(y, ay);
    if (hx->tag != hy->tag || ax.size() != ay.size()) return false;
    if (!conv_parts(env, hx, hy, fuel)) return false;
    for (size_t i = 0; i < ax.size(); ++i)
      if (!conv_whnf(env, ax[i], ay[i], fuel)) return false;
    return true;
  }
  return conv_parts(env, x, y, fuel);
}

}  // namespace

bool conv(const Environment& env, const TermPtr& t1, const TermPtr& t2, Fuel& fuel) {
  return conv_whnf(env, t1, t2, fuel);
}

bool subtype(const Environment& env, const TermPtr& t1, const TermPtr& t2, Fuel& fuel) {
  TermPtr x = whnf(env, t1, fuel);
  TermPtr y = whnf(env, t2, fuel);
  if (x->tag == Tag::Sort && y->tag == Tag::Sort) {
    if (x->sort == y->sort) return true;
    // Type_i <: Type_j iff 0 < i < j. Set is not below Type_1; Prop is not
    // below Set.
    return !x->sort.is_prop && !y->sort.is_prop && 0 < x->sort.level &&
           x->sort.level < y->sort.level;
  }
  if (x->tag == Tag::Pi && y->tag == Tag::Pi) {
    if (!conv_whnf(env, x->a, y->a, fuel)) return false;
    auto [xb, yb] = align_binder(x->var, x->b, y->var, y->b);
    return subtype(env, xb, yb, fuel);
  }
  return conv_whnf(env, x, y, fuel);
}

// Typing -------------------------------------------------------------------

namespace {

const Binder* ctx_lookup(const Telescope& ctx, const VarName& v) {
  for (auto it = ctx.rbegin(); it != ctx.rend(); ++it)
    if (it->name == v) return &*it;
  return nullptr;
}

Universe product_sort(const Universe& dom, const Universe& cod) {
  if (cod.is_prop) {
    // Impredicative Prop products are restricted to Set/Prop domains in the
    // input fragment; products over higher domains are typed predicatively so
    // that generated abstraction statements remain well-formed.
    if (dom.is_prop || dom.level == 0) return Universe::prop();
    return Universe::type(std::max(dom.level, 1));
  }
  int dl = dom.is_prop ? 0 : dom.level;
  return Universe::type(std::max(dl, cod.level));
}

struct Checker {
  const Environment& env;
  Fuel& fuel;

  TermPtr infer(Telescope& ctx, const TermPtr& t) {
    switch (t->tag) {
      case Tag::Sort: {
        if (t->sort.is_prop) return mk_type(1);
        return mk_type(t->sort.level + 1);
      }
      case Tag::Var: {
        const Binder* b = ctx_lookup(ctx, t->var);
        if (!b) throw Error(ErrKind::UnboundVariable, "unbound variable " + show_var(t->var));
        return b->type;
      }
      case Tag::ConstRef: {
        const Decl* d = env.find(t->name);
        if (!d || d->kind == DeclKind::Inductive)
          throw Error(ErrKind::UnboundVariable, "unknown constant " + t->name);
        return d->type;
      }
      case Tag::IndRef: {
        const Decl* d = env.find(t->name);
        if (!d || d->kind != DeclKind::Inductive)
          throw Error(ErrKind::UnboundVariable, "unknown inductive " + t->name);
        return env.arity(t->name);
      }
      case Tag::CtorRef: {
        const Decl* d = env.find(t->name);
        if (!d || d->kind != DeclKind::Inductive)
          throw Error(ErrKind::UnboundVariable, "unknown inductive " + t->name);
        if (t->ctor_index < 0 || t->ctor_index >= (int)d->ind.ctors.size())
          throw Error(ErrKind::UnboundVariable, "no such constructor of " + t->name);
        return env.ctor_type(t->name, t->ctor_index);
      }
      case Tag::App: {
        TermPtr fty = whnf(env, infer(ctx, t->a), fuel);
        if (fty->tag != Tag::Pi)
          throw Error(ErrKind::IllTyped,
                      "application of a non-function: " + pretty(t->a, &env) + " : " +
                          pretty(fty, &env));
        check(ctx, t->b, fty->a);
        return subst(fty->b, fty->var, t->b);
      }
      case Tag::Lam: {
        sort_of(ctx, t->a);
        ctx.push_back({t->var, t->a});
        TermPtr bty = infer(ctx, t->b);
        ctx.pop_back();
        return mk_pi(t->var, t->a, bty);
      }
      case Tag::Pi: {
        Universe su = sort_of(ctx, t->a);
        ctx.push_back({t->var, t->a});
        Universe sv = sort_of(ctx, t->b);
        ctx.pop_back();
        return mk_sort(product_sort(su, sv));
      }
      case Tag::Match:
        return infer_match(ctx, t);
      case Tag::Fix:
        return infer_fix(ctx, t);
    }
    throw Error(ErrKind::IllTyped, "unhandled term");
  }

  void check(Telescope& ctx, const TermPtr& t, const TermPtr& ty) {
    TermPtr it = infer(ctx, t);
    if (!subtype(env, it, ty, fuel)) {
      TermPtr wi = whnf(env, it, fuel);
      TermPtr wt = whnf(env, ty, fuel);
      if (wi->tag == Tag::Sort && wt->tag == Tag::Sort)
        throw Error(ErrKind::UniverseViolation,
                    "universe " + show_universe(wi->sort) + " does not fit in " +
                        show_universe(wt->sort) +
                        " (no Prop :> Set, no Set :> Type1 cumulativity)");
      throw Error(ErrKind::TypeMismatch, "expected " + pretty(ty, &env) + ", inferred " +
                                             pretty(it, &env) + " for " + pretty(t, &env));
    }
  }

  Universe sort_of(Telescope& ctx, const TermPtr& ty) {
    TermPtr s = whnf(env, infer(ctx, ty), fuel);
    if (s->tag != Tag::Sort)
      throw Error(ErrKind::IllTyped, "not a type: " + pretty(ty, &env));
    return s->sort;
  }

  TermPtr infer_match(Telescope& ctx, const TermPtr& t) {
    TermPtr dty = infer(ctx, t->discr);
    if (!conv(env, dty, t->discr_type, fuel))
      throw Error(ErrKind::IllTyped, "stored discriminee type mismatch in match");
    TermPtr w = whnf(env, t->discr_type, fuel);
    std::vector<TermPtr> iargs;
    TermPtr ih = app_head(w, iargs);
    if (ih->tag != Tag::IndRef)
      throw Error(ErrKind::IllTyped, "match discriminee is not of inductive type");
    const InductiveDecl& ind = env.inductive(ih->name);
    size_t np = ind.params.size(), ni = ind.indices.size();
    if (iargs.size() != np + ni)
      throw Error(ErrKind::IllTyped, "match discriminee type not fully applied");
    if (t->in_vars.size() != ni)
      throw Error(ErrKind::IllTyped, "match binds wrong number of index variables");
    std::vector<TermPtr> dparams(iargs.begin(), iargs.begin() + np);
    std::vector<TermPtr> dindices(iargs.begin() + np, iargs.end());

    // Context for the return type: fresh index vars, then the as-var.
    std::map<VarName, TermPtr> isub;
    for (size_t i = 0; i < np; ++i) isub[ind.params[i].name] = dparams[i];
    size_t base = ctx.size();
    for (size_t i = 0; i < ni; ++i) {
      TermPtr ity = subst_many(ind.indices[i].type, isub);
      ctx.push_back({t->in_vars[i], ity});
      isub[ind.indices[i].name] = mk_var(t->in_vars[i]);
    }
    TermPtr selfTy = mk_ind(ih->name);
    for (const auto& p : dparams) selfTy = mk_app(selfTy, p);
    for (const auto& v : t->in_vars) selfTy = mk_app(selfTy, mk_var(v));
    ctx.push_back({t->var, selfTy});
    Universe rs = sort_of(ctx, t->ret);
    ctx.resize(base);

    // Proof elimination restriction with the singleton exception.
    if (ind.universe.is_prop && !rs.is_prop && !singleton_eliminable(env, ind))
      throw Error(ErrKind::ProofEliminationViolation,
                  "match on a proof of " + ind.name +
                      " cannot produce a non-proposition (Lemma 2.1 restriction; not a singleton)");

    if (t->branches.size() != ind.ctors.size())
      throw Error(ErrKind::IllTyped, "match must have one branch per constructor of " + ind.name);

    for (const auto& br : t->branches) {
      if (br.ctor < 0 || br.ctor >= (int)ind.ctors.size())
        throw Error(ErrKind::IllTyped, "branch constructor out of range");
      Telescope tele;
      TermPtr tail;
      split_pi_telescope(ind.ctors[br.ctor].type, tele, tail);
      if (br.args.size() != tele.size())
        throw Error(ErrKind::IllTyped, "branch binds wrong number of arguments for " +
                                           ind.ctors[br.ctor].name);
      std::map<VarName, TermPtr> csub;
      for (size_t i = 0; i < np; ++i) csub[ind.params[i].name] = dparams[i];
      size_t cbase = ctx.size();
      for (size_t i = 0; i < tele.size(); ++i) {
        TermPtr aty = subst_many(tele[i].type, csub);
        ctx.push_back({br.args[i], aty});
        csub[tele[i].name] = mk_var(br.args[i]);
      }
      // Constructor tail gives the refined indices.
      TermPtr ctail = subst_many(tail, csub);
      std::vector<TermPtr> cargs;
      app_head(ctail, cargs);
      std::vector<TermPtr> cindices(cargs.begin() + np, cargs.end());
      TermPtr capp = mk_ctor(ih->name, br.ctor);
      for (const auto& p : dparams) capp = mk_app(capp, p);
      for (const auto& a : br.args) capp = mk_app(capp, mk_var(a));
      std::map<VarName, TermPtr> rsub;
      for (size_t i = 0; i < ni; ++i) rsub[t->in_vars[i]] = cindices[i];
      rsub[t->var] = capp;
      TermPtr expected = subst_many(t->ret, rsub);
      check(ctx, br.body, expected);
      ctx.resize(cbase);
    }

    std::map<VarName, TermPtr> rsub;
    for (size_t i = 0; i < ni; ++i) rsub[t->in_vars[i]] = dindices[i];
    rsub[t->var] = t->discr;
    return subst_many(t->ret, rsub);
  }

  TermPtr infer_fix(Telescope& ctx, const TermPtr& t) {
    sort_of(ctx, t->a);
    // The struct argument must be of inductive type.
    Telescope tele;
    TermPtr tail;
    split_pi_telescope(t->a, tele, tail);
    if (t->struct_arg < 0 || t->struct_arg >= (int)tele.size())
      throw Error(ErrKind::IllTyped, "fix struct argument index out of range");
    {
      // Check in a context binding the earlier telescope entries.
      size_t base = ctx.size();
      for (int i = 0; i < t->struct_arg; ++i) ctx.push_back(tele[i]);
      TermPtr sty = whnf(env, tele[t->struct_arg].type, fuel);
      ctx.resize(base);
      if (app_head(sty)->tag != Tag::IndRef)
        throw Error(ErrKind::IllTyped, "fix struct argument is not of inductive type");
    }
    ctx.push_back({t->var, t->a});
    check(ctx, t->b, t->a);
    ctx.pop_back();
    check_fix(env, ctx, t);
    return t->a;
  }
};

}  // namespace

TermPtr infer_type(const Environment& env, const Telescope& ctx, const TermPtr& t, Fuel& fuel) {
  Checker c{env, fuel};
  Telescope mctx = ctx;
  return c.infer(mctx, t);
}

void check_type(const Environment& env, const Telescope& ctx, const TermPtr& t, const TermPtr& ty,
                Fuel& fuel) {
  Checker c{env, fuel};
  Telescope mctx = ctx;
  c.check(mctx, t, ty);
}

Universe sort_of_type(const Environment& env, const Telescope& ctx, const TermPtr& ty, Fuel& fuel) {
  Checker c{env, fuel};
  Telescope mctx = ctx;
  return c.sort_of(mctx, ty);
}

bool singleton_eliminable(const Environment& env, const InductiveDecl& d) {
  if (d.ctors.empty()) return true;
  if (d.ctors.size() != 1) return false;
  // All non-parameter arguments must be proofs.
  Telescope tele;
  TermPtr tail;
  split_pi_telescope(d.ctors[0].type, tele, tail);
  Telescope ctx = d.params;
  Fuel f;
  for (const auto& b : tele) {
    Universe s = sort_of_type(env, ctx, b.type, f);
    if (!s.is_prop) return false;
    ctx.push_back(b);
  }
  return true;
}

// Inductive checking -------------------------------------------------------

namespace {

// Occurrence scan for strict positivity: returns true iff `name` occurs in t.
bool occurs_ind(const TermPtr& t, const std::string& name) {
  if (!t) return false;
  switch (t->tag) {
    case Tag::IndRef:
      return t->name == name;
    case Tag::CtorRef:
      return t->name == name;
    case Tag::Sort:
    case Tag::Var:
    case Tag::ConstRef:
      return false;
    case Tag::App:
    case Tag::Pi:
    case Tag::Lam:
    case Tag::Fix:
      return occurs_ind(t->a, name) || occurs_ind(t->b, name);
    case Tag::Match: {
      if (occurs_ind(t->discr, name) || occurs_ind(t->discr_type, name) ||
          occurs_ind(t->ret, name))
        return true;
      for (const auto& br : t->branches)
        if (occurs_ind(br.body, name)) return true;
      return false;
    }
  }
  return false;
}

}  // namespace

void check_inductive(const Environment& env, const InductiveDecl& d) {
  Fuel fuel;
  // Temporary environment carrying the inductive itself, so that constructor
  // types can mention it.
  Environment tmp = env;
  Decl self;
  self.kind = DeclKind::Inductive;
  self.name = d.name;
  self.ind = d;
  tmp.push(self);

  Telescope ctx;
  for (const auto& p : d.params) {
    sort_of_type(env, ctx, p.type, fuel);
    if (occurs_ind(p.type, d.name))
      throw Error(ErrKind::PositivityViolation, d.name + " occurs in its own parameter types");
    ctx.push_back(p);
  }
  Telescope ictx = ctx;
  for (const auto& ix : d.indices) {
    sort_of_type(env, ictx, ix.type, fuel);
    if (occurs_ind(ix.type, d.name))
      throw Error(ErrKind::PositivityViolation, d.name + " occurs in its own index types");
    ictx.push_back(ix);
  }

  int ci = 0;
  for (const auto& c : d.ctors) {
    Telescope tele;
    TermPtr tail;
    split_pi_telescope(c.type, tele, tail);
    Telescope cctx = ctx;
    int ai = 0;
    for (const auto& arg : tele) {
      Universe s = sort_of_type(tmp, cctx, arg.type, fuel);
      // Universe constraint on constructor arguments.
      if (!d.universe.is_prop) {
        int bound = d.universe.level;
        int lvl = s.is_prop ? 0 : s.level;
        if (lvl > bound)
          throw Error(ErrKind::UniverseViolation,
                      "constructor " + c.name + " argument " + std::to_string(ai) +
                          " lives above the universe of " + d.name);
      }
      if (occurs_ind(arg.type, d.name)) {
        // Strict positivity: forall t1:T1 ... tm:Tm, (I ...), with no Ti
        // mentioning I and no nesting anywhere.
        Telescope atele;
        TermPtr atail;
        split_pi_telescope(arg.type, atele, atail);
        for (const auto& ab : atele)
          if (occurs_ind(ab.type, d.name))
            throw Error(ErrKind::PositivityViolation,
                        "negative or nested occurrence of " + d.name + " in constructor " +
                            c.name + " argument " + std::to_string(ai));
        std::vector<TermPtr> hargs;
        TermPtr hh = app_head(atail, hargs);
        if (hh->tag != Tag::IndRef || hh->name != d.name)
          throw Error(ErrKind::NestedInductive,
                      "occurrence of " + d.name + " under another type constructor in " + c.name);
        for (const auto& ha : hargs)
          if (occurs_ind(ha, d.name))
            throw Error(ErrKind::NestedInductive,
                        "nested occurrence of " + d.name + " in its own arguments in " + c.name);
        // Parameters must be passed unchanged.
        if (hargs.size() != d.params.size() + d.indices.size())
          throw Error(ErrKind::PositivityViolation,
                      "recursive occurrence of " + d.name + " not fully applied in " + c.name);
        for (size_t i = 0; i < d.params.size(); ++i) {
          const TermPtr& pa = hargs[i];
          if (pa->tag != Tag::Var || !(pa->var == d.params[i].name))
            throw Error(ErrKind::PositivityViolation,
                        "recursive occurrence of " + d.name + " changes parameters in " + c.name);
        }
      }
      cctx.push_back(arg);
      ++ai;
    }
    // Tail: the inductive applied to exactly the params followed by indices.
    std::vector<TermPtr> targs;
    TermPtr th = app_head(tail, targs);
    if (th->tag != Tag::IndRef || th->name != d.name)
      throw Error(ErrKind::IllTyped, "constructor " + c.name + " does not return " + d.name);
    if (targs.size() != d.params.size() + d.indices.size())
      throw Error(ErrKind::IllTyped, "constructor " + c.name + " tail not fully applied");
    for (size_t i = 0; i < d.params.size(); ++i) {
      if (targs[i]->tag != Tag::Var || !(targs[i]->var == d.params[i].name))
        throw Error(ErrKind::IllTyped,
                    "constructor " + c.name + " must return unchanged parameters");
    }
    for (size_t i = 0; i < d.indices.size(); ++i)
      if (occurs_ind(targs[d.params.size() + i], d.name))
        throw Error(ErrKind::NestedInductive, "index expression of " + c.name + " mentions " +
                                                  d.name);
    // Full well-formedness of the constructor type.
    sort_of_type(tmp, ctx, c.type, fuel);
    ++ci;
  }
}

// Guard checking -----------------------------------------------------------

namespace {

struct GuardChecker {
  const VarName fix_name;
  int struct_arg;

  void fail(const std::string& where) const {
    throw Error(ErrKind::GuardViolation,
                "recursive call to " + show_var(fix_name) + " is not guarded (" + where + ")");
  }

  bool smaller_head(const TermPtr& t, const std::set<VarName>& smaller) const {
    TermPtr h = app_head(t);
    return h->tag == Tag::Var && smaller.count(h->var) > 0;
  }

  void walk(const TermPtr& t, std::set<VarName> smaller, const VarName& struct_var) const {
    if (!t) return;
    switch (t->tag) {
      case Tag::Sort:
      case Tag::IndRef:
      case Tag::CtorRef:
      case Tag::ConstRef:
        return;
      case Tag::Var:
        if (t->var == fix_name) fail("bare occurrence");
        return;
      case Tag::App: {
        std::vector<TermPtr> args;
        TermPtr h = app_head(t, args);
        if (h->tag == Tag::Var && h->var == fix_name) {
          if ((int)args.size() <= struct_arg) fail("under-applied recursive call");
          if (!smaller_head(args[struct_arg], smaller)) fail("struct argument not smaller");
          for (const auto& a : args) walk(a, smaller, struct_var);
          return;
        }
        walk(h, smaller, struct_var);
        for (const auto& a : args) walk(a, smaller, struct_var);
        return;
      }
      case Tag::Pi:
      case Tag::Lam:
      case Tag::Fix:
        walk(t->a, smaller, struct_var);
        walk(t->b, smaller, struct_var);
        return;
      case Tag::Match: {
        walk(t->discr, smaller, struct_var);
        walk(t->discr_type, smaller, struct_var);
        walk(t->ret, smaller, struct_var);
        bool on_struct = smaller_head(t->discr, smaller) ||
                         (app_head(t->discr)->tag == Tag::Var &&
                          app_head(t->discr)->var == struct_var);
        for (const auto& br : t->branches) {
          std::set<VarName> s2 = smaller;
          if (on_struct)
            for (const auto& a : br.args) s2.insert(a);
          walk(br.body, s2, struct_var);
        }
        return;
      }
    }
  }
};

}  // namespace

void check_fix(const Environment& env, const Telescope& ctx, const TermPtr& fix) {
  (void)env;
  (void)ctx;
  if (fix->tag != Tag::Fix) throw Error(ErrKind::IllTyped, "check_fix on a non-fix term");
  // Peel lambdas up to the struct argument.
  TermPtr body = fix->b;
  std::vector<VarName> formals;
  GuardChecker gc{fix->var, fix->struct_arg};
  while (body->tag == Tag::Lam && (int)formals.size() <= fix->struct_arg) {
    gc.walk(body->a, {}, fix->var);  // domains must not mention the fix name
    formals.push_back(body->var);
    body = body->b;
  }
  if ((int)formals.size() <= fix->struct_arg)
    throw Error(ErrKind::GuardViolation,
                "fix body must bind the struct argument with leading lambdas");
  gc.walk(body, {}, formals[fix->struct_arg]);
}

// Flag elaboration ----------------------------------------------------------

UFlag flag_of_sort(const Universe& u) {
  if (u.is_prop) return UFlag::P;
  if (u.level == 0) return UFlag::S;
  return UFlag::T;
}

namespace {

struct Elaborator {
  const Environment& env;
  Fuel& fuel;

  UFlag flag_of(Telescope& ctx, const TermPtr& ty) {
    Checker c{env, fuel};
    return flag_of_sort(c.sort_of(ctx, ty));
  }

  TermPtr go(Telescope& ctx, const TermPtr& t) {
    switch (t->tag) {
      case Tag::Sort:
      case Tag::Var:
      case Tag::IndRef:
      case Tag::CtorRef:
      case Tag::ConstRef:
        return t;
      case Tag::App:
        return mk_app(go(ctx, t->a), go(ctx, t->b));
      case Tag::Pi: {
        UFlag fd = flag_of(ctx, t->a);
        TermPtr dom = go(ctx, t->a);
        ctx.push_back({t->var, t->a});
        UFlag fc = flag_of(ctx, t->b);
        TermPtr cod = go(ctx, t->b);
        ctx.pop_back();
        return mk_pi(t->var, dom, cod, fd, fc);
      }
      case Tag::Lam: {
        UFlag fd = flag_of(ctx, t->a);
        TermPtr dom = go(ctx, t->a);
        ctx.push_back({t->var, t->a});
        TermPtr body = go(ctx, t->b);
        ctx.pop_back();
        return mk_lam(t->var, dom, body, fd);
      }
      case Tag::Fix: {
        TermPtr sig = go(ctx, t->a);
        ctx.push_back({t->var, t->a});
        TermPtr body = go(ctx, t->b);
        ctx.pop_back();
        return mk_fix(t->var, sig, body, t->struct_arg);
      }
      case Tag::Match: {
        // Recompute the return flag in the index-extended context.
        Checker c{env, fuel};
        TermPtr w = whnf(env, t->discr_type, fuel);
        std::vector<TermPtr> iargs;
        TermPtr ih = app_head(w, iargs);
        if (ih->tag != Tag::IndRef)
          throw Error(ErrKind::IllTyped, "match discriminee is not of inductive type");
        const InductiveDecl& ind = env.inductive(ih->name);
        size_t np = ind.params.size(), ni = ind.indices.size();
        std::map<VarName, TermPtr> isub;
        for (size_t i = 0; i < np; ++i) isub[ind.params[i].name] = iargs[i];
        size_t base = ctx.size();
        for (size_t i = 0; i < ni; ++i) {
          TermPtr ity = subst_many(ind.indices[i].type, isub);
          ctx.push_back({t->in_vars[i], ity});
          isub[ind.indices[i].name] = mk_var(t->in_vars[i]);
        }
        TermPtr selfTy = mk_ind(ih->name);
        for (size_t i = 0; i < np; ++i) selfTy = mk_app(selfTy, iargs[i]);
        for (const auto& v : t->in_vars) selfTy = mk_app(selfTy, mk_var(v));
        ctx.push_back({t->var, selfTy});
        UFlag rf = flag_of(ctx, t->ret);
        TermPtr ret = go(ctx, t->ret);
        ctx.resize(base);

        TermPtr discr = go(ctx, t->discr);
        std::vector<Branch> brs;
        for (const auto& br : t->branches) {
          Telescope tele;
          TermPtr tail;
          split_pi_telescope(ind.ctors[br.ctor].type, tele, tail);
          std::map<VarName, TermPtr> csub;
          for (size_t i = 0; i < np; ++i) csub[ind.params[i].name] = iargs[i];
          size_t cbase = ctx.size();
          for (size_t i = 0; i < tele.size(); ++i) {
            TermPtr aty = subst_many(tele[i].type, csub);
            ctx.push_back({br.args[i], aty});
            csub[tele[i].name] = mk_var(br.args[i]);
          }
          brs.push_back({br.ctor, br.args, go(ctx, br.body)});
          ctx.resize(cbase);
        }
        return mk_match(discr, t->discr_type, t->var, t->in_vars, ret, std::move(brs), rf);
      }
    }
    return t;
  }
};

}  // namespace

TermPtr elaborate_flags(const Environment& env, const Telescope& ctx, const TermPtr& t,
                        Fuel& fuel) {
  Elaborator e{env, fuel};
  Telescope mctx = ctx;
  return e.go(mctx, t);
}

// Checked append -------------------------------------------------------------

void push_checked(Environment& env, Decl d, long long fuel) {
  Fuel f{fuel};
  switch (d.kind) {
    case DeclKind::Axiom: {
      sort_of_type(env, {}, d.type, f);
      break;
    }
    case DeclKind::Definition: {
      if (d.type) {
        sort_of_type(env, {}, d.type, f);
        check_type(env, {}, d.body, d.type, f);
      } else {
        d.type = infer_type(env, {}, d.body, f);
      }
      break;
    }
    case DeclKind::Inductive: {
      check_inductive(env, d.ind);
      break;
    }
  }
  env.push(std::move(d));
}

// Convenience overloads ------------------------------------------------------

TermPtr whnf(const Environment& env, TermPtr t, long long fuel) {
  Fuel f{fuel};
  return whnf(env, std::move(t), f);
}
TermPtr normalize(const Environment& env, TermPtr t, long long fuel) {
  Fuel f{fuel};
  return normalize(env, std::move(t), f);
}
bool conv(const Environment& env, const TermPtr& t1, const TermPtr& t2, long long fuel) {
  Fuel f{fuel};
  return conv(env, t1, t2, f);
}
bool subtype(const Environment& env, const TermPtr& t1, const TermPtr& t2, long long fuel) {
  Fuel f{fuel};
  return subtype(env, t1, t2, f);
}
TermPtr infer_type(const Environment& env, const Telescope& ctx, const TermPtr& t,
                   long long fuel) {
  Fuel f{fuel};
  return infer_type(env, ctx, t, f);
}
void check_type(const Environment& env, const Telescope& ctx, const TermPtr& t, const TermPtr& ty,
                long long fuel) {
  Fuel f{fuel};
  check_type(env, ctx, t, ty, f);
}
TermPtr elaborate_flags(const Environment& env, const Telescope& ctx, const TermPtr& t,
                        long long fuel) {
  Fuel f{fuel};
  return elaborate_flags(env, ctx, t, f);
}

}  // namespace ptt

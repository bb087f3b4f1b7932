#include "ptt/binding.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace ptt {

namespace {

void push_unique(std::vector<VarName>& out, std::set<VarName>& seen, const VarName& v) {
  if (seen.insert(v).second) out.push_back(v);
}

void fv_walk(const TermPtr& t, std::set<VarName>& bound, std::vector<VarName>& out,
             std::set<VarName>& seen) {
  if (!t) return;
  switch (t->tag) {
    case Tag::Sort:
    case Tag::IndRef:
    case Tag::CtorRef:
    case Tag::ConstRef:
      return;
    case Tag::Var:
      if (!bound.count(t->var)) push_unique(out, seen, t->var);
      return;
    case Tag::App:
      fv_walk(t->a, bound, out, seen);
      fv_walk(t->b, bound, out, seen);
      return;
    case Tag::Pi:
    case Tag::Lam: {
      fv_walk(t->a, bound, out, seen);
      bool fresh = bound.insert(t->var).second;
      fv_walk(t->b, bound, out, seen);
      if (fresh) bound.erase(t->var);
      return;
    }
    case Tag::Fix: {
      fv_walk(t->a, bound, out, seen);
      bool fresh = bound.insert(t->var).second;
      fv_walk(t->b, bound, out, seen);
      if (fresh) bound.erase(t->var);
      return;
    }
    case Tag::Match: {
      fv_walk(t->discr, bound, out, seen);
      fv_walk(t->discr_type, bound, out, seen);
      {
        std::vector<VarName> added;
        for (const auto& v : t->in_vars)
          if (bound.insert(v).second) added.push_back(v);
        if (bound.insert(t->var).second) added.push_back(t->var);
        fv_walk(t->ret, bound, out, seen);
        for (const auto& v : added) bound.erase(v);
      }
      for (const auto& br : t->branches) {
        std::vector<VarName> added;
        for (const auto& v : br.args)
          if (bound.insert(v).second) added.push_back(v);
        fv_walk(br.body, bound, out, seen);
        for (const auto& v : added) bound.erase(v);
      }
      return;
    }
  }
}

void bv_walk(const TermPtr& t, std::vector<VarName>& out, std::set<VarName>& seen) {
  if (!t) return;
  switch (t->tag) {
    case Tag::Sort:
    case Tag::Var:
    case Tag::IndRef:
    case Tag::CtorRef:
    case Tag::ConstRef:
      return;
    case Tag::App:
      bv_walk(t->a, out, seen);
      bv_walk(t->b, out, seen);
      return;
    case Tag::Pi:
    case Tag::Lam:
      bv_walk(t->a, out, seen);
      push_unique(out, seen, t->var);
      bv_walk(t->b, out, seen);
      return;
    case Tag::Fix:
      bv_walk(t->a, out, seen);
      push_unique(out, seen, t->var);
      bv_walk(t->b, out, seen);
      return;
    case Tag::Match:
      bv_walk(t->discr, out, seen);
      bv_walk(t->discr_type, out, seen);
      for (const auto& v : t->in_vars) push_unique(out, seen, v);
      push_unique(out, seen, t->var);
      bv_walk(t->ret, out, seen);
      for (const auto& br : t->branches) {
        for (const auto& v : br.args) push_unique(out, seen, v);
        bv_walk(br.body, out, seen);
      }
      return;
  }
}

}  // namespace

std::vector<VarName> free_vars(const TermPtr& t) {
  std::vector<VarName> out;
  std::set<VarName> bound, seen;
  fv_walk(t, bound, out, seen);
  return out;
}

std::set<VarName> free_var_set(const TermPtr& t) {
  auto v = free_vars(t);
  return std::set<VarName>(v.begin(), v.end());
}

std::vector<VarName> bound_vars(const TermPtr& t) {
  std::vector<VarName> out;
  std::set<VarName> seen;
  bv_walk(t, out, seen);
  return out;
}

bool mentions_var(const TermPtr& t, const VarName& x) {
  return free_var_set(t).count(x) > 0;
}

bool mentions_const(const TermPtr& t, const std::string& name) {
  return referenced_names(t).count(name) > 0;
}

std::set<std::string> referenced_names(const TermPtr& t) {
  std::set<std::string> out;
  std::function<void(const TermPtr&)> walk = [&](const TermPtr& u) {
    if (!u) return;
    switch (u->tag) {
      case Tag::IndRef:
      case Tag::CtorRef:
      case Tag::ConstRef:
        out.insert(u->name);
        return;
      case Tag::Sort:
      case Tag::Var:
        return;
      case Tag::App:
      case Tag::Pi:
      case Tag::Lam:
      case Tag::Fix:
        walk(u->a);
        walk(u->b);
        return;
      case Tag::Match:
        walk(u->discr);
        walk(u->discr_type);
        walk(u->ret);
        for (const auto& br : u->branches) walk(br.body);
        return;
    }
  };
  walk(t);
  return out;
}

TermPtr prime(const TermPtr& t) {
  std::function<TermPtr(const TermPtr&)> go = [&](const TermPtr& u) -> TermPtr {
    if (!u) return u;
    switch (u->tag) {
      case Tag::Sort:
      case Tag::IndRef:
      case Tag::CtorRef:
      case Tag::ConstRef:
        return u;
      case Tag::Var:
        if (u->var.cls != VarClass::C1) throw std::runtime_error("NonC1Variable: " + u->var.base);
        return mk_var(prime_name(u->var));
      case Tag::App:
        return mk_app(go(u->a), go(u->b));
      case Tag::Pi:
        if (u->var.cls != VarClass::C1) throw std::runtime_error("NonC1Variable: " + u->var.base);
        return mk_pi(prime_name(u->var), go(u->a), go(u->b), u->flag_dom, u->flag_cod);
      case Tag::Lam:
        if (u->var.cls != VarClass::C1) throw std::runtime_error("NonC1Variable: " + u->var.base);
        return mk_lam(prime_name(u->var), go(u->a), go(u->b), u->flag_dom);
      case Tag::Fix:
        if (u->var.cls != VarClass::C1) throw std::runtime_error("NonC1Variable: " + u->var.base);
        return mk_fix(prime_name(u->var), go(u->a), go(u->b), u->struct_arg);
      case Tag::Match: {
        std::vector<VarName> ivs;
        for (const auto& v : u->in_vars) {
          if (v.cls != VarClass::C1) throw std::runtime_error("NonC1Variable: " + v.base);
          ivs.push_back(prime_name(v));
        }
        if (u->var.cls != VarClass::C1) throw std::runtime_error("NonC1Variable: " + u->var.base);
        std::vector<Branch> brs;
        for (const auto& br : u->branches) {
          Branch nb;
          nb.ctor = br.ctor;
          for (const auto& v : br.args) {
            if (v.cls != VarClass::C1) throw std::runtime_error("NonC1Variable: " + v.base);
            nb.args.push_back(prime_name(v));
          }
          nb.body = go(br.body);
          brs.push_back(std::move(nb));
        }
        return mk_match(go(u->discr), go(u->discr_type), prime_name(u->var), std::move(ivs),
                        go(u->ret), std::move(brs), u->flag_cod);
      }
    }
    return u;
  };
  return go(t);
}

// Alpha equivalence with a two-way renaming map on bound variables.
namespace {

struct AlphaCtx {
  std::map<VarName, VarName> l2r, r2l;

  bool bind(const VarName& a, const VarName& b, std::vector<std::pair<VarName, VarName>>& saved) {
    saved.emplace_back(a, b);
    l2r[a] = b;
    r2l[b] = a;
    return true;
  }

  bool same_var(const VarName& a, const VarName& b) const {
    auto i = l2r.find(a);
    auto j = r2l.find(b);
    if (i != l2r.end() || j != r2l.end()) {
      return i != l2r.end() && j != r2l.end() && i->second == b && j->second == a;
    }
    return a == b;
  }
};

bool alpha_walk(const TermPtr& x, const TermPtr& y, AlphaCtx& ctx) {
  if (!x || !y) return x == y;
  if (x->tag != y->tag) return false;
  switch (x->tag) {
    case Tag::Sort:
      return x->sort == y->sort;
    case Tag::Var:
      return ctx.same_var(x->var, y->var);
    case Tag::IndRef:
    case Tag::ConstRef:
      return x->name == y->name;
    case Tag::CtorRef:
      return x->name == y->name && x->ctor_index == y->ctor_index;
    case Tag::App:
      return alpha_walk(x->a, y->a, ctx) && alpha_walk(x->b, y->b, ctx);
    case Tag::Pi:
    case Tag::Lam: {
      if (x->flag_dom != y->flag_dom) return false;
      if (x->tag == Tag::Pi && x->flag_cod != y->flag_cod) return false;
      if (!alpha_walk(x->a, y->a, ctx)) return false;
      AlphaCtx inner = ctx;
      std::vector<std::pair<VarName, VarName>> saved;
      inner.bind(x->var, y->var, saved);
      return alpha_walk(x->b, y->b, inner);
    }
    case Tag::Fix: {
      if (x->struct_arg != y->struct_arg) return false;
      if (!alpha_walk(x->a, y->a, ctx)) return false;
      AlphaCtx inner = ctx;
      std::vector<std::pair<VarName, VarName>> saved;
      inner.bind(x->var, y->var, saved);
      return alpha_walk(x->b, y->b, inner);
    }
    case Tag::Match: {
      if (x->flag_cod != y->flag_cod) return false;
      if (x->in_vars.size() != y->in_vars.size()) return false;
      if (x->branches.size() != y->branches.size()) return false;
      if (!alpha_walk(x->discr, y->discr, ctx)) return false;
      if (!alpha_walk(x->discr_type, y->discr_type, ctx)) return false;
      {
        AlphaCtx inner = ctx;
        std::vector<std::pair<VarName, VarName>> saved;
        for (size_t i = 0; i < x->in_vars.size(); ++i)
          inner.bind(x->in_vars[i], y->in_vars[i], saved);
        inner.bind(x->var, y->var, saved);
        if (!alpha_walk(x->ret, y->ret, inner)) return false;
      }
      for (size_t i = 0; i < x->branches.size(); ++i) {
        const auto& bx = x->branches[i];
        const auto& by = y->branches[i];
        if (bx.ctor != by.ctor || bx.args.size() != by.args.size()) return false;
        AlphaCtx inner = ctx;
        std::vector<std::pair<VarName, VarName>> saved;
        for (size_t j = 0; j < bx.args.size(); ++j) inner.bind(bx.args[j], by.args[j], saved);
        if (!alpha_walk(bx.body, by.body, inner)) return false;
      }
      return true;
    }
  }
  return false;
}

}  // namespace

bool alpha_eq(const TermPtr& t1, const TermPtr& t2) {
  AlphaCtx ctx;
  return alpha_walk(t1, t2, ctx);
}

namespace {

// BC walk: `ctx` holds the forbidden names (outer list plus enclosing binders).
bool bc_walk(const TermPtr& t, std::set<VarName>& ctx, const std::set<VarName>& outer) {
  if (!t) return true;
  switch (t->tag) {
    case Tag::Sort:
    case Tag::IndRef:
    case Tag::CtorRef:
    case Tag::ConstRef:
      return true;
    case Tag::Var:
      if (t->var.cls != VarClass::C1 || t->var.base == "c") return false;
      return outer.count(t->var) > 0 || ctx.count(t->var) > 0;
    case Tag::App:
      return bc_walk(t->a, ctx, outer) && bc_walk(t->b, ctx, outer);
    case Tag::Pi:
    case Tag::Lam: {
      if (t->var.cls != VarClass::C1 || t->var.base == "c") return false;
      if (ctx.count(t->var) || outer.count(t->var)) return false;  // shadowing / clash with l
      // Binder must not occur among the bound variables of its own domain.
      for (const auto& bv : bound_vars(t->a))
        if (bv == t->var) return false;
      if (!bc_walk(t->a, ctx, outer)) return false;
      ctx.insert(t->var);
      bool ok = bc_walk(t->b, ctx, outer);
      ctx.erase(t->var);
      return ok;
    }
    case Tag::Fix: {
      if (t->var.cls != VarClass::C1 || t->var.base == "c") return false;
      if (ctx.count(t->var) || outer.count(t->var)) return false;
      if (!bc_walk(t->a, ctx, outer)) return false;
      ctx.insert(t->var);
      bool ok = bc_walk(t->b, ctx, outer);
      ctx.erase(t->var);
      return ok;
    }
    case Tag::Match: {
      if (!bc_walk(t->discr, ctx, outer)) return false;
      if (!bc_walk(t->discr_type, ctx, outer)) return false;
      std::vector<VarName> added;
      for (const auto& v : t->in_vars) {
        if (v.cls != VarClass::C1 || v.base == "c" || ctx.count(v) || outer.count(v)) return false;
        ctx.insert(v);
        added.push_back(v);
      }
      if (t->var.cls != VarClass::C1 || t->var.base == "c" || ctx.count(t->var) ||
          outer.count(t->var)) {
        for (const auto& v : added) ctx.erase(v);
        return false;
      }
      ctx.insert(t->var);
      added.push_back(t->var);
      bool ok = bc_walk(t->ret, ctx, outer);
      for (const auto& v : added) ctx.erase(v);
      if (!ok) return false;
      for (const auto& br : t->branches) {
        std::vector<VarName> badded;
        bool good = true;
        for (const auto& v : br.args) {
          if (v.cls != VarClass::C1 || v.base == "c" || ctx.count(v) || outer.count(v)) {
            good = false;
            break;
          }
          ctx.insert(v);
          badded.push_back(v);
        }
        if (good) good = bc_walk(br.body, ctx, outer);
        for (const auto& v : badded) ctx.erase(v);
        if (!good) return false;
      }
      return true;
    }
  }
  return true;
}

}  // namespace

bool bc_check(const std::vector<VarName>& l, const TermPtr& t) {
  std::set<VarName> outer(l.begin(), l.end());
  // Bound vars of t must be disjoint from l; checked on the fly (binder clash
  // with `outer`), plus the free-vars-in-l condition at leaves.
  std::set<VarName> ctx;
  return bc_walk(t, ctx, outer);
}

VarName fresh_name(const std::string& base, VarClass cls, const std::set<VarName>& used) {
  VarName cand{base, cls};
  if (!used.count(cand) && base != "c") return cand;
  for (int i = 1;; ++i) {
    VarName c2{base + std::to_string(i), cls};
    if (!used.count(c2)) return c2;
  }
}

namespace {

// Renames bound variables so the result is BC w.r.t. `avoid`; `ren` maps
// in-scope renamed binders.
TermPtr bc_rename(const TermPtr& t, std::map<VarName, VarName>& ren, std::set<VarName>& avoid) {
  if (!t) return t;
  switch (t->tag) {
    case Tag::Sort:
    case Tag::IndRef:
    case Tag::CtorRef:
    case Tag::ConstRef:
      return t;
    case Tag::Var: {
      auto it = ren.find(t->var);
      return it == ren.end() ? t : mk_var(it->second);
    }
    case Tag::App:
      return mk_app(bc_rename(t->a, ren, avoid), bc_rename(t->b, ren, avoid));
    case Tag::Pi:
    case Tag::Lam: {
      TermPtr dom = bc_rename(t->a, ren, avoid);
      VarName nv = fresh_name(t->var.base, t->var.cls, avoid);
      avoid.insert(nv);
      auto saved = ren.find(t->var) == ren.end() ? std::optional<VarName>()
                                                 : std::optional<VarName>(ren[t->var]);
      ren[t->var] = nv;
      TermPtr body = bc_rename(t->b, ren, avoid);
      if (saved)
        ren[t->var] = *saved;
      else
        ren.erase(t->var);
      return t->tag == Tag::Pi ? mk_pi(nv, dom, body, t->flag_dom, t->flag_cod)
                               : mk_lam(nv, dom, body, t->flag_dom);
    }
    case Tag::Fix: {
      TermPtr sig = bc_rename(t->a, ren, avoid);
      VarName nv = fresh_name(t->var.base, t->var.cls, avoid);
      avoid.insert(nv);
      auto saved = ren.find(t->var) == ren.end() ? std::optional<VarName>()
                                                 : std::optional<VarName>(ren[t->var]);
      ren[t->var] = nv;
      TermPtr body = bc_rename(t->b, ren, avoid);
      if (saved)
        ren[t->var] = *saved;
      else
        ren.erase(t->var);
      return mk_fix(nv, sig, body, t->struct_arg);
    }
    case Tag::Match: {
      TermPtr d = bc_rename(t->discr, ren, avoid);
      TermPtr dt = bc_rename(t->discr_type, ren, avoid);
      std::map<VarName, VarName> ren2 = ren;
      std::vector<VarName> ivs;
      for (const auto& v : t->in_vars) {
        VarName nv = fresh_name(v.base, v.cls, avoid);
        avoid.insert(nv);
        ren2[v] = nv;
        ivs.push_back(nv);
      }
      VarName av = fresh_name(t->var.base, t->var.cls, avoid);
      avoid.insert(av);
      ren2[t->var] = av;
      TermPtr ret = bc_rename(t->ret, ren2, avoid);
      std::vector<Branch> brs;
      for (const auto& br : t->branches) {
        std::map<VarName, VarName> ren3 = ren;
        Branch nb;
        nb.ctor = br.ctor;
        for (const auto& v : br.args) {
          VarName nv = fresh_name(v.base, v.cls, avoid);
          avoid.insert(nv);
          ren3[v] = nv;
          nb.args.push_back(nv);
        }
        nb.body = bc_rename(br.body, ren3, avoid);
        brs.push_back(std::move(nb));
      }
      return mk_match(d, dt, av, std::move(ivs), ret, std::move(brs), t->flag_cod);
    }
  }
  return t;
}

}  // namespace

TermPtr rename_to_bc(const std::vector<VarName>& l, const TermPtr& t) {
  for (const auto& v : free_vars(t))
    if (v.cls != VarClass::C1) throw std::runtime_error("NonC1Variable: " + v.base);
  std::set<VarName> avoid(l.begin(), l.end());
  for (const auto& v : free_vars(t)) avoid.insert(v);
  avoid.insert(VarName{"c", VarClass::C1});
  std::map<VarName, VarName> ren;
  return bc_rename(t, ren, avoid);
}

namespace {

// Naive substitution: assumes no capture can happen.
TermPtr unsafe_subst(const TermPtr& b, const std::map<VarName, TermPtr>& sub) {
  if (!b || sub.empty()) return b;
  switch (b->tag) {
    case Tag::Sort:
    case Tag::IndRef:
    case Tag::CtorRef:
    case Tag::ConstRef:
      return b;
    case Tag::Var: {
      auto it = sub.find(b->var);
      return it == sub.end() ? b : it->second;
    }
    case Tag::App:
      return mk_app(unsafe_subst(b->a, sub), unsafe_subst(b->b, sub));
    case Tag::Pi:
    case Tag::Lam: {
      auto inner = sub;
      inner.erase(b->var);
      TermPtr dom = unsafe_subst(b->a, sub);
      TermPtr body = unsafe_subst(b->b, inner);
      return b->tag == Tag::Pi ? mk_pi(b->var, dom, body, b->flag_dom, b->flag_cod)
                               : mk_lam(b->var, dom, body, b->flag_dom);
    }
    case Tag::Fix: {
      auto inner = sub;
      inner.erase(b->var);
      return mk_fix(b->var, unsafe_subst(b->a, sub), unsafe_subst(b->b, inner), b->struct_arg);
    }
    case Tag::Match: {
      TermPtr d = unsafe_subst(b->discr, sub);
      TermPtr dt = unsafe_subst(b->discr_type, sub);
      auto rsub = sub;
      for (const auto& v : b->in_vars) rsub.erase(v);
      rsub.erase(b->var);
      TermPtr ret = unsafe_subst(b->ret, rsub);
      std::vector<Branch> brs;
      for (const auto& br : b->branches) {
        auto bsub = sub;
        for (const auto& v : br.args) bsub.erase(v);
        Branch nb;
        nb.ctor = br.ctor;
        nb.args = br.args;
        nb.body = unsafe_subst(br.body, bsub);
        brs.push_back(std::move(nb));
      }
      return mk_match(d, dt, b->var, b->in_vars, ret, std::move(brs), b->flag_cod);
    }
  }
  return b;
}

}  // namespace

TermPtr bc_subst(const std::vector<VarName>& l, const TermPtr& b, const VarName& x,
                 const TermPtr& t) {
  std::vector<VarName> xl = l;
  xl.push_back(x);
  if (!bc_check(xl, b) || !bc_check(l, t))
    throw std::runtime_error("PreconditionViolated: bc_subst inputs not BC");
  // Rename b's bound vars away from all variables of t (and keep BC).
  std::set<VarName> avoid(l.begin(), l.end());
  avoid.insert(x);
  for (const auto& v : free_vars(b)) avoid.insert(v);
  for (const auto& v : free_vars(t)) avoid.insert(v);
  for (const auto& v : bound_vars(t)) avoid.insert(v);
  std::map<VarName, VarName> ren;
  TermPtr b2 = bc_rename(b, ren, avoid);
  std::map<VarName, TermPtr> sub;
  sub[x] = t;
  return unsafe_subst(b2, sub);
}

TermPtr subst_many(const TermPtr& b, const std::map<VarName, TermPtr>& sub) {
  if (sub.empty()) return b;
  std::set<VarName> danger;
  for (const auto& [k, v] : sub) {
    danger.insert(k);
    for (const auto& fv : free_vars(v)) danger.insert(fv);
  }
  bool clash = false;
  for (const auto& bv : bound_vars(b))
    if (danger.count(bv)) {
      clash = true;
      break;
    }
  if (!clash) return unsafe_subst(b, sub);
  // Capture possible: rename b's binders away first.
  std::set<VarName> avoid = danger;
  for (const auto& fv : free_vars(b)) avoid.insert(fv);
  std::map<VarName, VarName> ren;
  TermPtr b2 = bc_rename(b, ren, avoid);
  return unsafe_subst(b2, sub);
}

TermPtr subst(const TermPtr& b, const VarName& x, const TermPtr& t) {
  std::map<VarName, TermPtr> sub;
  sub[x] = t;
  return subst_many(b, sub);
}

std::vector<VarName> lv3(const std::vector<VarName>& l) {
  std::vector<VarName> out = l;
  for (const auto& v : l) out.push_back(prime_name(v));
  for (const auto& v : l) out.push_back(rel_name(v));
  return out;
}

std::vector<VarName> lv45(const std::vector<VarName>& l) {
  std::vector<VarName> out;
  for (const auto& v : l) {
    for (VarClass c : {VarClass::C1, VarClass::C2, VarClass::C3, VarClass::C4, VarClass::C5})
      out.push_back(VarName{v.base, c});
  }
  return out;
}

}  // namespace ptt

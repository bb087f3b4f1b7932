#include "ptt/term.hpp"

namespace ptt {

TermPtr mk_sort(Universe u) {
  auto t = std::make_shared<Term>();
  t->tag = Tag::Sort;
  t->sort = u;
  return t;
}

TermPtr mk_prop() { return mk_sort(Universe::prop()); }
TermPtr mk_set() { return mk_sort(Universe::set()); }
TermPtr mk_type(int lvl) { return mk_sort(Universe::type(lvl)); }

TermPtr mk_var(VarName n) {
  auto t = std::make_shared<Term>();
  t->tag = Tag::Var;
  t->var = std::move(n);
  return t;
}

TermPtr mk_pi(VarName x, TermPtr dom, TermPtr cod, UFlag fd, UFlag fc) {
  auto t = std::make_shared<Term>();
  t->tag = Tag::Pi;
  t->var = std::move(x);
  t->a = std::move(dom);
  t->b = std::move(cod);
  t->flag_dom = fd;
  t->flag_cod = fc;
  return t;
}

TermPtr mk_lam(VarName x, TermPtr dom, TermPtr body, UFlag fd) {
  auto t = std::make_shared<Term>();
  t->tag = Tag::Lam;
  t->var = std::move(x);
  t->a = std::move(dom);
  t->b = std::move(body);
  t->flag_dom = fd;
  return t;
}

TermPtr mk_app(TermPtr f, TermPtr a) {
  auto t = std::make_shared<Term>();
  t->tag = Tag::App;
  t->a = std::move(f);
  t->b = std::move(a);
  return t;
}

TermPtr mk_app(TermPtr f, const std::vector<TermPtr>& args) {
  TermPtr r = std::move(f);
  for (const auto& a : args) r = mk_app(r, a);
  return r;
}

TermPtr mk_ind(std::string name) {
  auto t = std::make_shared<Term>();
  t->tag = Tag::IndRef;
  t->name = std::move(name);
  return t;
}

TermPtr mk_ctor(std::string ind, int index) {
  auto t = std::make_shared<Term>();
  t->tag = Tag::CtorRef;
  t->name = std::move(ind);
  t->ctor_index = index;
  return t;
}

TermPtr mk_const(std::string name) {
  auto t = std::make_shared<Term>();
  t->tag = Tag::ConstRef;
  t->name = std::move(name);
  return t;
}

TermPtr mk_match(TermPtr discr, TermPtr discr_type, VarName as_var, std::vector<VarName> in_vars,
                 TermPtr ret, std::vector<Branch> branches, UFlag ret_flag) {
  auto t = std::make_shared<Term>();
  t->tag = Tag::Match;
  t->discr = std::move(discr);
  t->discr_type = std::move(discr_type);
  t->var = std::move(as_var);
  t->in_vars = std::move(in_vars);
  t->ret = std::move(ret);
  t->branches = std::move(branches);
  t->flag_cod = ret_flag;
  return t;
}

TermPtr mk_fix(VarName f, TermPtr signature, TermPtr body, int struct_arg) {
  auto t = std::make_shared<Term>();
  t->tag = Tag::Fix;
  t->var = std::move(f);
  t->a = std::move(signature);
  t->b = std::move(body);
  t->struct_arg = struct_arg;
  return t;
}

TermPtr mk_arrow(TermPtr dom, TermPtr cod) {
  return mk_pi(v1("_"), std::move(dom), std::move(cod));
}

TermPtr app_head(TermPtr t, std::vector<TermPtr>& args) {
  std::vector<TermPtr> rev;
  while (t->tag == Tag::App) {
    rev.push_back(t->b);
    t = t->a;
  }
  args.assign(rev.rbegin(), rev.rend());
  return t;
}

TermPtr app_head(TermPtr t) {
  while (t->tag == Tag::App) t = t->a;
  return t;
}

TermPtr mk_pi_telescope(const Telescope& tele, TermPtr cod) {
  TermPtr r = std::move(cod);
  for (auto it = tele.rbegin(); it != tele.rend(); ++it) r = mk_pi(it->name, it->type, r);
  return r;
}

TermPtr mk_lam_telescope(const Telescope& tele, TermPtr body) {
  TermPtr r = std::move(body);
  for (auto it = tele.rbegin(); it != tele.rend(); ++it) r = mk_lam(it->name, it->type, r);
  return r;
}

bool term_eq(const TermPtr& x, const TermPtr& y) {
  if (x == y) return true;
  if (!x || !y) return false;
  if (x->tag != y->tag) return false;
  switch (x->tag) {
    case Tag::Sort:
      return x->sort == y->sort;
    case Tag::Var:
      return x->var == y->var;
    case Tag::Pi:
      return x->var == y->var && x->flag_dom == y->flag_dom && x->flag_cod == y->flag_cod &&
             term_eq(x->a, y->a) && term_eq(x->b, y->b);
    case Tag::Lam:
      return x->var == y->var && x->flag_dom == y->flag_dom && term_eq(x->a, y->a) &&
             term_eq(x->b, y->b);
    case Tag::App:
      return term_eq(x->a, y->a) && term_eq(x->b, y->b);
    case Tag::IndRef:
    case Tag::ConstRef:
      return x->name == y->name;
    case Tag::CtorRef:
      return x->name == y->name && x->ctor_index == y->ctor_index;
    case Tag::Match: {
      if (!(x->var == y->var) || x->in_vars != y->in_vars || x->flag_cod != y->flag_cod)
        return false;
      if (!term_eq(x->discr, y->discr) || !term_eq(x->discr_type, y->discr_type) ||
          !term_eq(x->ret, y->ret))
        return false;
      if (x->branches.size() != y->branches.size()) return false;
      for (size_t i = 0; i < x->branches.size(); ++i) {
        const auto& bx = x->branches[i];
        const auto& by = y->branches[i];
        if (bx.ctor != by.ctor || bx.args != by.args || !term_eq(bx.body, by.body)) return false;
      }
      return true;
    }
    case Tag::Fix:
      return x->var == y->var && x->struct_arg == y->struct_arg && term_eq(x->a, y->a) &&
             term_eq(x->b, y->b);
  }
  return false;
}

}  // namespace ptt

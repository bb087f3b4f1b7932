#include "ptt/anyrel.hpp"

#include <algorithm>
#include <functional>

#include "ptt/binding.hpp"
#include "ptt/printer.hpp"

namespace ptt {

Universe hat_universe(const Universe& u) {
  if (u.is_prop || u.level == 0) return Universe::prop();
  return u;
}

namespace {

// Head beta steps only; keeps constants folded so statements stay readable.
TermPtr beta_head(TermPtr t) {
  for (;;) {
    std::vector<TermPtr> args;
    TermPtr head = app_head(t, args);
    if (head->tag == Tag::Lam && !args.empty()) {
      TermPtr body = subst(head->b, head->var, args[0]);
      for (size_t i = 1; i < args.size(); ++i) body = mk_app(body, args[i]);
      t = body;
      continue;
    }
    return t;
  }
}

TermPtr mk_ind_applied(const std::string& name, const std::vector<TermPtr>& ps,
                       const std::vector<TermPtr>& is) {
  TermPtr t = mk_ind(name);
  for (const auto& p : ps) t = mk_app(t, p);
  for (const auto& i : is) t = mk_app(t, i);
  return t;
}

}  // namespace

TermPtr Translator::src(const TermPtr& t) {
  if (alias.empty()) return t;
  std::map<VarName, TermPtr> sub(alias.begin(), alias.end());
  return subst_many(t, sub);
}

TermPtr Translator::srcp(const TermPtr& t) { return prime(src(t)); }

static UFlag flag_or_infer(Translator& T, const TermPtr& ty, UFlag f) {
  if (f != UFlag::None) return f;
  Universe u = sort_of_type(T.env(), T.src_ctx, ty, T.fuel());
  return flag_of_sort(u);
}

TermPtr Translator::rel_binder_type(const TermPtr& A, UFlag f, const TermPtr& x,
                                    const TermPtr& x2) {
  TermPtr rel = tr(A);
  if (iso_) {
    UFlag ff = flag_or_infer(*this, A, f);
    if (ff == UFlag::S)
      rel = mk_app(mk_const("projRel"), {src(A), srcp(A), rel});
    else if (ff == UFlag::P)
      rel = mk_app(mk_const("projRelP"), {src(A), srcp(A), rel});
  }
  return mk_app(rel, {x, x2});
}

Telescope Translator::triple_telescope(const Telescope& tele) {
  Telescope out;
  for (const auto& b : tele) {
    TermPtr ty = elaborate_flags(env_, src_ctx, b.type, fuel_);
    TermPtr relty = rel_binder_type(ty, UFlag::None, mk_var(b.name), mk_var(prime_name(b.name)));
    out.push_back({b.name, src(ty)});
    out.push_back({prime_name(b.name), srcp(ty)});
    out.push_back({rel_name(b.name), relty});
    src_ctx.push_back({b.name, b.type});
  }
  return out;
}

TermPtr Translator::tr_sort(const Universe& u) {
  VarName c = v1("c");
  VarName c2 = prime_name(c);
  TermPtr s = mk_sort(u);
  if (iso_) {
    if (u.is_prop)
      return mk_lam(c, s, mk_lam(c2, s, mk_app(mk_const("IsoRelP"), {mk_var(c), mk_var(c2)})));
    if (u.level == 0)
      return mk_lam(c, s, mk_lam(c2, s, mk_app(mk_const("IsoRel"), {mk_var(c), mk_var(c2)})));
  }
  TermPtr tail = mk_arrow(mk_var(c), mk_arrow(mk_var(c2), mk_sort(hat_universe(u))));
  return mk_lam(c, s, mk_lam(c2, s, tail));
}

TermPtr Translator::companion_ref(const std::string& name, bool is_ind) {
  auto ov = self_override.find(name);
  if (ov != self_override.end()) return ov->second;
  const Companion* comp = env_.companion(name);
  if (iso_) {
    if (!comp || comp->iso.empty())
      throw Error(ErrKind::MissingCompanion, "no IsoRel companion for " + name);
    return mk_const(comp->iso);
  }
  if (!comp || comp->rel.empty())
    throw Error(ErrKind::MissingCompanion, "no AnyRel companion for " + name);
  if (is_ind && comp->style == TransStyle::Inductive) return mk_ind(comp->rel);
  return mk_const(comp->rel);
}

TermPtr Translator::tr_pi(const TermPtr& t) {
  UFlag fd = flag_or_infer(*this, t->a, t->flag_dom);
  UFlag fc;
  {
    src_ctx.push_back({t->var, t->a});
    fc = flag_or_infer(*this, t->b, t->flag_cod);
    src_ctx.pop_back();
  }
  UFlag result = (fd == UFlag::S || fd == UFlag::P) ? fc : UFlag::T;

  if (iso_ && result != UFlag::T) {
    const char* comb = result == UFlag::P ? (fd == UFlag::S ? "piProp" : "piPropP")
                                          : (fd == UFlag::S ? "piSet" : "piSetP");
    TermPtr A1 = src(t->a), A2 = srcp(t->a);
    TermPtr AR = tr(t->a);
    TermPtr B1 = mk_lam(t->var, A1, src(t->b));
    TermPtr B2 = mk_lam(prime_name(t->var), A2, srcp(t->b));
    TermPtr xr_ty = rel_binder_type(t->a, fd, mk_var(t->var), mk_var(prime_name(t->var)));
    src_ctx.push_back({t->var, t->a});
    TermPtr BR_body = tr(t->b);
    src_ctx.pop_back();
    TermPtr BR = mk_lam(
        t->var, A1, mk_lam(prime_name(t->var), A2, mk_lam(rel_name(t->var), xr_ty, BR_body)));
    return mk_app(mk_const(comb), {A1, A2, AR, B1, B2, BR});
  }

  VarName x4 = four_name(t->var);
  VarName x5 = five_name(t->var);
  TermPtr piSrc = src(t);
  TermPtr piPrime = srcp(t);
  TermPtr xr_ty = rel_binder_type(t->a, fd, mk_var(t->var), mk_var(prime_name(t->var)));
  src_ctx.push_back({t->var, t->a});
  TermPtr codRel = rel_binder_type(t->b, fc, mk_app(mk_var(x4), mk_var(t->var)),
                                   mk_app(mk_var(x5), mk_var(prime_name(t->var))));
  src_ctx.pop_back();
  TermPtr inner = mk_pi(
      t->var, src(t->a),
      mk_pi(prime_name(t->var), srcp(t->a), mk_pi(rel_name(t->var), xr_ty, codRel)));
  return mk_lam(x4, piSrc, mk_lam(x5, piPrime, inner));
}

TermPtr Translator::tr_lam(const TermPtr& t) {
  UFlag fd = flag_or_infer(*this, t->a, t->flag_dom);
  TermPtr xr_ty = rel_binder_type(t->a, fd, mk_var(t->var), mk_var(prime_name(t->var)));
  TermPtr dom1 = src(t->a), dom2 = srcp(t->a);
  src_ctx.push_back({t->var, t->a});
  lam_path.push_back(t->var);
  TermPtr body = tr(t->b);
  lam_path.pop_back();
  src_ctx.pop_back();
  return mk_lam(t->var, dom1,
                mk_lam(prime_name(t->var), dom2, mk_lam(rel_name(t->var), xr_ty, body)));
}

TermPtr Translator::false_elim(UFlag ret_flag, const TermPtr& ret_src, const TermPtr& target,
                               const TermPtr& witness) {
  const char* elim = "False_ind";
  if (ret_flag == UFlag::T) {
    Universe u = sort_of_type(env_, src_ctx, ret_src, fuel_);
    int lvl = u.is_prop ? 1 : u.level;
    elim = lvl <= 1 ? "False_rectT" : (lvl == 2 ? "False_rectT2" : "False_rectT3");
  }
  return mk_app(mk_const(elim), {target, witness});
}

TermPtr Translator::tr(const TermPtr& t) {
  switch (t->tag) {
    case Tag::Sort:
      return tr_sort(t->sort);
    case Tag::Var:
      return mk_var(rel_name(t->var));
    case Tag::IndRef:
      return companion_ref(t->name, true);
    case Tag::CtorRef: {
      auto ov = self_override.find(t->name);
      const Companion* comp = env_.companion(t->name);
      TransStyle style = comp ? comp->style : TransStyle::None;
      if (ov != self_override.end()) style = TransStyle::Deductive;
      if (style == TransStyle::Inductive) return mk_ctor(comp->rel, t->ctor_index);
      if (style == TransStyle::None)
        throw Error(ErrKind::MissingCompanion, "no companion for constructors of " + t->name);
      return mk_const(env_.ctor(t->name, t->ctor_index).name + "_R");
    }
    case Tag::ConstRef:
      return companion_ref(t->name, false);
    case Tag::App:
      return mk_app(tr(t->a), {src(t->b), srcp(t->b), tr(t->b)});
    case Tag::Pi:
      return tr_pi(t);
    case Tag::Lam:
      return tr_lam(t);
    case Tag::Match:
      return tr_match(t);
    case Tag::Fix:
      return tr_fix(t);
  }
  throw Error(ErrKind::Other, "untranslatable term");
}

// Match translation ----------------------------------------------------------

TermPtr Translator::tr_match(const TermPtr& t) {
  TermPtr w = whnf(env_, t->discr_type, fuel_);
  std::vector<TermPtr> iargs;
  TermPtr ih = app_head(w, iargs);
  if (ih->tag != Tag::IndRef)
    throw Error(ErrKind::IllTyped, "match discriminee type is not inductive");
  const InductiveDecl& ind = env_.inductive(ih->name);
  size_t np = ind.params.size();
  std::vector<TermPtr> dparams(iargs.begin(), iargs.begin() + np);
  std::vector<TermPtr> dindices(iargs.begin() + np, iargs.end());

  TransStyle style;
  auto ov = self_override.find(ih->name);
  if (ov != self_override.end()) {
    style = TransStyle::Deductive;
  } else {
    const Companion* comp = env_.companion(ih->name);
    if (!comp) throw Error(ErrKind::MissingCompanion, "no companion for inductive " + ih->name);
    style = comp->style;
  }
  if (style == TransStyle::Inductive) return tr_match_inductive(t, ind, dparams, dindices);
  return tr_match_deductive(t, ind, dparams, dindices);
}

TermPtr Translator::tr_match_inductive(const TermPtr& t, const InductiveDecl& ind,
                                       const std::vector<TermPtr>& dparams,
                                       const std::vector<TermPtr>& dindices) {
  size_t np = ind.params.size(), ni = ind.indices.size();
  // ma / ma2: the original match with the discriminee abstracted to the as-var.
  std::vector<TermPtr> srcParams, ivarTerms;
  for (const auto& p : dparams) srcParams.push_back(src(p));
  for (const auto& v : t->in_vars) ivarTerms.push_back(mk_var(v));
  std::vector<Branch> src_branches;
  for (const auto& br : t->branches) src_branches.push_back({br.ctor, br.args, src(br.body)});
  TermPtr ma = mk_match(mk_var(t->var), mk_ind_applied(ind.name, srcParams, ivarTerms), t->var,
                        t->in_vars, src(t->ret), src_branches, t->flag_cod);
  TermPtr ma2 = prime(ma);

  TermPtr applied = mk_ind_applied(ind.name, dparams, dindices);
  TermPtr dtyR = mk_app(tr(elaborate_flags(env_, src_ctx, applied, fuel_)),
                        {src(t->discr), srcp(t->discr)});

  std::vector<VarName> in3;
  for (const auto& v : t->in_vars) {
    in3.push_back(v);
    in3.push_back(prime_name(v));
    in3.push_back(rel_name(v));
  }
  in3.push_back(t->var);
  in3.push_back(prime_name(t->var));

  TermPtr retR;
  {
    size_t base = src_ctx.size();
    std::map<VarName, TermPtr> isub;
    for (size_t i = 0; i < np; ++i) isub[ind.params[i].name] = dparams[i];
    for (size_t j = 0; j < ni; ++j) {
      src_ctx.push_back({t->in_vars[j], subst_many(ind.indices[j].type, isub)});
      isub[ind.indices[j].name] = mk_var(t->in_vars[j]);
    }
    src_ctx.push_back({t->var, mk_ind_applied(ind.name, dparams, ivarTerms)});
    retR = mk_app(tr(t->ret), {ma, ma2});
    src_ctx.resize(base);
  }

  std::vector<Branch> brs;
  for (const auto& br : t->branches) {
    Telescope tele;
    TermPtr tail;
    split_pi_telescope(ind.ctors[br.ctor].type, tele, tail);
    std::vector<VarName> args3;
    for (const auto& a : br.args) {
      args3.push_back(a);
      args3.push_back(prime_name(a));
      args3.push_back(rel_name(a));
    }
    size_t base = src_ctx.size();
    std::map<VarName, TermPtr> csub;
    for (size_t i = 0; i < np; ++i) csub[ind.params[i].name] = dparams[i];
    for (size_t i = 0; i < tele.size(); ++i) {
      src_ctx.push_back({br.args[i], subst_many(tele[i].type, csub)});
      csub[tele[i].name] = mk_var(br.args[i]);
    }
    TermPtr body = tr(br.body);
    src_ctx.resize(base);
    brs.push_back({br.ctor, std::move(args3), body});
  }
  return mk_match(tr(t->discr), beta_head(dtyR), rel_name(t->var), std::move(in3), retR,
                  std::move(brs), UFlag::None);
}

TermPtr Translator::tr_match_deductive(const TermPtr& t, const InductiveDecl& ind,
                                       const std::vector<TermPtr>& dparams,
                                       const std::vector<TermPtr>& dindices) {
  size_t np = ind.params.size(), ni = ind.indices.size();
  const VarName asv = t->var;
  const VarName asv2 = prime_name(asv);
  const VarName asvR = rel_name(asv);
  const Companion* comp = env_.companion(ind.name);
  std::string ieq_name = comp ? comp->indices_eq : "";

  std::vector<TermPtr> srcParams, srcpParams, ivarTerms;
  for (const auto& p : dparams) srcParams.push_back(src(p));
  for (const auto& p : dparams) srcpParams.push_back(srcp(p));
  for (const auto& v : t->in_vars) ivarTerms.push_back(mk_var(v));

  // ma / ma2.
  std::vector<Branch> src_branches;
  for (const auto& br : t->branches) src_branches.push_back({br.ctor, br.args, src(br.body)});
  TermPtr ma = mk_match(mk_var(asv), mk_ind_applied(ind.name, srcParams, ivarTerms), asv,
                        t->in_vars, src(t->ret), src_branches, t->flag_cod);
  TermPtr ma2 = prime(ma);

  // Ret := forall (i_R* ...)(t_R : [[I params i*]] t t'), [[R]] ma ma2.
  TermPtr Ret;
  {
    size_t base = src_ctx.size();
    std::map<VarName, TermPtr> isub;
    for (size_t i = 0; i < np; ++i) isub[ind.params[i].name] = dparams[i];
    Telescope relChain;
    for (size_t j = 0; j < ni; ++j) {
      TermPtr xj = subst_many(ind.indices[j].type, isub);
      TermPtr xjf = elaborate_flags(env_, src_ctx, xj, fuel_);
      TermPtr relty = rel_binder_type(xjf, UFlag::None, mk_var(t->in_vars[j]),
                                      mk_var(prime_name(t->in_vars[j])));
      relChain.push_back({rel_name(t->in_vars[j]), relty});
      src_ctx.push_back({t->in_vars[j], xj});
      isub[ind.indices[j].name] = mk_var(t->in_vars[j]);
    }
    TermPtr dAsVars = mk_ind_applied(ind.name, dparams, ivarTerms);
    TermPtr dflag = elaborate_flags(env_, src_ctx, dAsVars, fuel_);
    TermPtr trel_ty = mk_app(tr(dflag), {mk_var(asv), mk_var(asv2)});
    src_ctx.push_back({asv, dAsVars});
    TermPtr tail = mk_app(tr(t->ret), {ma, ma2});
    src_ctx.resize(base);
    Ret = mk_pi(asvR, trel_ty, tail);
    for (auto it = relChain.rbegin(); it != relChain.rend(); ++it)
      Ret = mk_pi(it->name, it->type, Ret);
  }

  // Ret_out: primed side instantiated with the actual discriminee data.
  TermPtr RetOut;
  {
    std::map<VarName, TermPtr> osub;
    for (size_t j = 0; j < ni; ++j) osub[prime_name(t->in_vars[j])] = srcp(dindices[j]);
    osub[asv2] = srcp(t->discr);
    RetOut = subst_many(Ret, osub);
  }

  std::vector<Branch> outer;
  for (const auto& bru : t->branches) {
    Telescope teleU;
    TermPtr tailU;
    split_pi_telescope(ind.ctors[bru.ctor].type, teleU, tailU);
    std::map<VarName, TermPtr> usub;
    for (size_t i = 0; i < np; ++i) usub[ind.params[i].name] = srcParams[i];
    size_t base = src_ctx.size();
    for (size_t i = 0; i < teleU.size(); ++i) {
      src_ctx.push_back({bru.args[i], subst_many(teleU[i].type, usub)});
      usub[teleU[i].name] = mk_var(bru.args[i]);
    }
    TermPtr ctail = subst_many(tailU, usub);
    std::vector<TermPtr> cargs;
    app_head(ctail, cargs);
    std::vector<TermPtr> CIu(cargs.begin() + np, cargs.end());
    TermPtr capp = mk_ctor(ind.name, bru.ctor);
    for (const auto& p : srcParams) capp = mk_app(capp, p);
    for (const auto& a : bru.args) capp = mk_app(capp, mk_var(a));

    std::map<VarName, TermPtr> insub;
    for (size_t j = 0; j < ni; ++j) insub[t->in_vars[j]] = CIu[j];
    insub[asv] = capp;
    TermPtr RetIn = subst_many(Ret, insub);

    // The translated branch body (shared by the matching inner branch).
    TermPtr trB = tr(bru.body);

    std::vector<Branch> inner;
    for (const auto& brv : t->branches) {
      Telescope teleV;
      TermPtr tailV;
      split_pi_telescope(ind.ctors[brv.ctor].type, teleV, tailV);
      std::vector<VarName> argsV2;
      for (const auto& a : brv.args) argsV2.push_back(prime_name(a));
      std::map<VarName, TermPtr> vsub;
      for (size_t i = 0; i < np; ++i) vsub[ind.params[i].name] = srcpParams[i];
      for (size_t i = 0; i < teleV.size(); ++i) vsub[teleV[i].name] = mk_var(argsV2[i]);
      TermPtr vtail = subst_many(tailV, vsub);
      std::vector<TermPtr> vargs;
      app_head(vtail, vargs);
      std::vector<TermPtr> CIv2(vargs.begin() + np, vargs.end());
      TermPtr capp2 = mk_ctor(ind.name, brv.ctor);
      for (const auto& p : srcpParams) capp2 = mk_app(capp2, p);
      for (const auto& a : argsV2) capp2 = mk_app(capp2, mk_var(a));
      std::map<VarName, TermPtr> esub;
      for (size_t j = 0; j < ni; ++j) esub[prime_name(t->in_vars[j])] = CIv2[j];
      esub[asv2] = capp2;
      TermPtr expected = subst_many(RetIn, esub);

      Telescope lamTele;
      TermPtr tail;
      split_pi_telescope(expected, lamTele, tail);
      TermPtr body;
      if (brv.ctor == bru.ctor) {
        body = unpack_chain(t, ind, bru, ieq_name, lamTele, tail, trB);
      } else {
        body = false_elim(t->flag_cod, t->ret, tail, mk_var(lamTele.back().name));
      }
      inner.push_back({brv.ctor, std::move(argsV2), mk_lam_telescope(lamTele, body)});
    }
    std::vector<VarName> in2;
    for (const auto& v : t->in_vars) in2.push_back(prime_name(v));
    std::vector<TermPtr> srcpIdx;
    for (const auto& i : dindices) srcpIdx.push_back(srcp(i));
    TermPtr innerMatch =
        mk_match(srcp(t->discr), mk_ind_applied(ind.name, srcpParams, srcpIdx), asv2,
                 std::move(in2), RetIn, std::move(inner), UFlag::None);
    src_ctx.resize(base);
    outer.push_back({bru.ctor, bru.args, innerMatch});
  }

  std::vector<TermPtr> srcIdx;
  for (const auto& i : dindices) srcIdx.push_back(src(i));
  TermPtr whole = mk_match(src(t->discr), mk_ind_applied(ind.name, srcParams, srcIdx), asv,
                           t->in_vars, RetOut, std::move(outer), UFlag::None);
  std::vector<TermPtr> trailing;
  for (const auto& i : dindices) trailing.push_back(tr(elaborate_flags(env_, src_ctx, i, fuel_)));
  trailing.push_back(tr(t->discr));
  return mk_app(whole, trailing);
}

// Unpacks the dependent-pair chain t_R and finishes with the translated body.
TermPtr Translator::unpack_chain(const TermPtr& t, const InductiveDecl& ind, const Branch& bru,
                                 const std::string& ieq_name, const Telescope& lamTele,
                                 const TermPtr& tail, const TermPtr& trB) {
  size_t ni = ind.indices.size();
  size_t l = bru.args.size();
  bool indexed = ni > 0;
  const VarName asvR = lamTele.back().name;

  if (!indexed && l == 1) return subst(trB, rel_name(bru.args[0]), mk_var(asvR));
  if (!indexed && l == 0) {
    if (!mentions_var(tail, asvR)) return trB;
    VarName w = v1("w");
    TermPtr ret = subst(tail, asvR, mk_var(w));
    return mk_match(mk_var(asvR), mk_ind("True"), w, {}, ret, {{0, {}, trB}}, UFlag::None);
  }

  // General case: l-or-(l-1) nested ex matches, then the indicesEq match.
  TermPtr chainTy = whnf(env_, lamTele.back().type, fuel_);
  size_t exCount = indexed ? l : l - 1;

  // Prefix rebuilders: at level j we know (A_i, P_i, x_i) for i < j.
  struct Layer {
    TermPtr A, P;
    VarName x;
  };
  std::vector<Layer> layers;
  auto rebuild = [&](const TermPtr& last) {
    TermPtr out = last;
    for (auto it = layers.rbegin(); it != layers.rend(); ++it)
      out = mk_app(mk_ctor("ex", 0), {it->A, it->P, mk_var(it->x), out});
    return out;
  };

  std::function<TermPtr(TermPtr, TermPtr, size_t)> descend =
      [&](TermPtr cur, TermPtr curTy, size_t level) -> TermPtr {
    if (level < exCount) {
      std::vector<TermPtr> exArgs;
      TermPtr exHead = app_head(curTy, exArgs);
      if (exHead->tag != Tag::IndRef || exHead->name != "ex" || exArgs.size() != 2)
        throw Error(ErrKind::Other, "internal: malformed relation chain in match translation");
      TermPtr A = exArgs[0], P = exArgs[1];
      VarName xj = rel_name(bru.args[level]);
      VarName nxt;
      bool lastLevel = level + 1 == exCount;
      if (lastLevel)
        nxt = indexed ? v1("pdeq") : rel_name(bru.args[l - 1]);
      else
        nxt = v1("rest" + std::to_string(level + 1));
      if (P->tag != Tag::Lam)
        throw Error(ErrKind::Other, "internal: chain motive is not a lambda");
      TermPtr nextTy = subst(P->b, P->var, mk_var(xj));
      VarName w = v1("w" + std::to_string(level));
      TermPtr ret = subst(tail, asvR, rebuild(mk_var(w)));
      layers.push_back({A, P, xj});
      TermPtr inner = descend(mk_var(nxt), whnf(env_, nextTy, fuel_), level + 1);
      layers.pop_back();
      Branch br{0, {xj, nxt}, inner};
      return mk_match(cur, curTy, w, {}, ret, {br}, UFlag::None);
    }
    // indicesEq match (indexed only; non-indexed chains end in a bare relation).
    if (!indexed) return trB;
    std::vector<TermPtr> ieqArgs;
    TermPtr ieqHead = app_head(curTy, ieqArgs);
    if (ieqHead->tag != Tag::IndRef || (!ieq_name.empty() && ieqHead->name != ieq_name))
      throw Error(ErrKind::Other, "internal: expected the generalized index equality");
    VarName pd = v1("pdr");
    std::vector<VarName> zs;
    std::map<VarName, TermPtr> zsub;
    for (size_t j = 0; j < ni; ++j) {
      VarName z = v1("z" + t->in_vars[j].base);
      zs.push_back(z);
      zsub[rel_name(t->in_vars[j])] = mk_var(z);
    }
    zsub[asvR] = rebuild(mk_var(pd));
    TermPtr ret = subst_many(tail, zsub);
    Branch br{0, {}, trB};
    return mk_match(cur, curTy, pd, zs, ret, {br}, UFlag::None);
  };

  return descend(mk_var(asvR), chainTy, 0);
}

// Fixpoint translation --------------------------------------------------------

TermPtr Translator::tr_fix(const TermPtr& t) {
  if (!alias.empty())
    throw Error(ErrKind::UnsupportedShape, "nested fixpoints are not supported");
  if (root_def.empty())
    throw Error(ErrKind::UnsupportedShape, "fix term outside a definition");
  if (lam_path.size() != src_ctx.size())
    throw Error(ErrKind::UnsupportedShape, "fix nested under non-lambda binders");

  Telescope tele;
  TermPtr tailT;
  split_pi_telescope(t->a, tele, tailT);
  TermPtr body = t->b;
  std::vector<VarName> formals;
  while (body->tag == Tag::Lam && formals.size() < tele.size()) {
    formals.push_back(body->var);
    body = body->b;
  }
  if (formals.size() != tele.size())
    throw Error(ErrKind::UnsupportedShape, "fix body must bind all signature arguments");
  // Rename the signature telescope to the body's formal names.
  std::map<VarName, TermPtr> ren;
  for (size_t i = 0; i < tele.size(); ++i) {
    if (!(tele[i].name == formals[i])) ren[tele[i].name] = mk_var(formals[i]);
  }
  Telescope fixTele;
  for (size_t i = 0; i < tele.size(); ++i) fixTele.push_back({formals[i], subst_many(tele[i].type, ren)});
  TermPtr retT = subst_many(tailT, ren);

  // The closed unprimed reference: the root definition applied to the
  // enclosing lambda binders.
  TermPtr closed = mk_const(root_def);
  for (const auto& v : lam_path) closed = mk_app(closed, mk_var(v));

  // Struct argument style decides the translated struct position.
  int s = t->struct_arg;
  TermPtr sty;
  {
    size_t base = src_ctx.size();
    for (int i = 0; i < s; ++i) src_ctx.push_back(fixTele[i]);
    sty = whnf(env_, fixTele[s].type, fuel_);
    src_ctx.resize(base);
  }
  TermPtr shead = app_head(sty);
  if (shead->tag != Tag::IndRef)
    throw Error(ErrKind::IllTyped, "fix struct argument is not of inductive type");
  TransStyle style = TransStyle::Deductive;
  if (const Companion* comp = env_.companion(shead->name)) style = comp->style;
  int newStruct = style == TransStyle::Inductive ? 3 * s + 2 : 3 * s;

  size_t base = src_ctx.size();
  Telescope tele3 = triple_telescope(fixTele);  // extends src_ctx

  TermPtr u1 = closed;
  for (const auto& v : formals) u1 = mk_app(u1, mk_var(v));
  TermPtr u2 = prime(u1);
  TermPtr retTf = elaborate_flags(env_, src_ctx, retT, fuel_);
  TermPtr tailR = rel_binder_type(retTf, UFlag::None, u1, u2);
  TermPtr sigR = mk_pi_telescope(tele3, tailR);

  VarName fR = rel_name(t->var);
  alias[t->var] = closed;
  TermPtr coreR = tr(body);
  alias.erase(t->var);
  src_ctx.resize(base);

  return mk_fix(fR, sigR, mk_lam_telescope(tele3, coreR), newStruct);
}

// Inductive translations ------------------------------------------------------

namespace {

// Relation chain of one constructor: per-argument relation types, their
// right-nested ex suffixes, the chain type and its canonical introduction.
// Expects T.src_ctx to hold the parameters (constructor args are pushed and
// popped internally).
struct ChainParts {
  TermPtr type;   // the chain type (branch value of T_R)
  TermPtr intro;  // the canonical inhabitant (body of c_R)
};

// `trailing` gives the index-relation arguments of the generalized equality
// in the final chain component: the lambda-bound relation slots when building
// the T_R branch value, the canonical [[CI]] terms when building c_R.
ChainParts build_chain(Translator& T, const InductiveDecl& ind, const std::string& ieq_name,
                       const std::vector<TermPtr>& p3vars, int u,
                       const std::vector<TermPtr>& trailing) {
  Telescope tele;
  TermPtr tail;
  split_pi_telescope(ind.ctors[u].type, tele, tail);
  size_t l = tele.size();
  bool indexed = !ind.indices.empty();

  size_t base = T.src_ctx.size();
  std::vector<TermPtr> types;
  for (size_t j = 0; j < l; ++j) {
    TermPtr aj = elaborate_flags(T.env(), T.src_ctx, tele[j].type, T.fuel());
    types.push_back(T.rel_binder_type(aj, UFlag::None, mk_var(tele[j].name),
                                      mk_var(prime_name(tele[j].name))));
    T.src_ctx.push_back({tele[j].name, tele[j].type});
  }

  // Final component and its canonical proof.
  TermPtr endTy, endIntro;
  if (indexed) {
    std::vector<TermPtr> cargs;
    app_head(tail, cargs);
    std::vector<TermPtr> CI(cargs.begin() + ind.params.size(), cargs.end());
    TermPtr e = mk_ind(ieq_name);
    TermPtr ei = mk_ctor(ieq_name, 0);
    for (const auto& pv : p3vars) {
      e = mk_app(e, pv);
      ei = mk_app(ei, pv);
    }
    for (const auto& ci : CI) {
      TermPtr cif = elaborate_flags(T.env(), T.src_ctx, ci, T.fuel());
      TermPtr s = T.src(cif), sp = T.srcp(cif), rr = T.tr(cif);
      e = mk_app(e, {s, sp, rr});
      ei = mk_app(ei, {s, sp, rr});
    }
    for (const auto& tr : trailing) e = mk_app(e, tr);
    endTy = e;
    endIntro = ei;
  } else if (l == 0) {
    T.src_ctx.resize(base);
    return {mk_ind("True"), mk_ctor("True", 0)};
  } else {
    endTy = types[l - 1];
    endIntro = mk_var(rel_name(tele[l - 1].name));
  }
  T.src_ctx.resize(base);

  // suffix[j] = chain type from component j on; j ranges over [0, upto].
  size_t upto = indexed ? l : l - 1;
  std::vector<TermPtr> suffix(upto + 1);
  suffix[upto] = endTy;
  for (size_t j = upto; j-- > 0;) {
    TermPtr P = mk_lam(rel_name(tele[j].name), types[j], suffix[j + 1]);
    suffix[j] = mk_app(mk_ind("ex"), {types[j], P});
  }
  TermPtr intro = endIntro;
  for (size_t j = upto; j-- > 0;) {
    TermPtr P = mk_lam(rel_name(tele[j].name), types[j], suffix[j + 1]);
    intro = mk_app(mk_ctor("ex", 0), {types[j], P, mk_var(rel_name(tele[j].name)), intro});
  }
  return {suffix[0], intro};
}

}  // namespace

TranslationResult translate_inductive_deductive(Environment& env, const std::string& indName,
                                                Fuel& fuel) {
  TranslationResult res;
  const InductiveDecl ind = env.inductive(indName);
  if (ind.universe.is_prop)
    throw Error(ErrKind::UnsupportedShape,
                "deductive translation requires a Set/Type inductive: " + indName);
  std::string relName = indName + "_R";
  std::string ieqName = indName + "_indicesEq";
  std::string reflName = indName + "_refl";
  size_t np = ind.params.size(), ni = ind.indices.size();

  Translator T(env, false, fuel);
  Telescope params3 = T.triple_telescope(ind.params);
  Telescope indices3 = T.triple_telescope(ind.indices);
  std::vector<TermPtr> p3vars = [&] {
    std::vector<TermPtr> v;
    for (const auto& b : params3) v.push_back(mk_var(b.name));
    return v;
  }();

  // Generalized index-equality proposition (indexed inductives only).
  if (ni > 0) {
    InductiveDecl ieq;
    ieq.name = ieqName;
    ieq.params = params3;
    for (const auto& b : indices3) ieq.params.push_back(b);
    for (size_t j = 0; j < ni; ++j) {
      const Binder& relb = indices3[3 * j + 2];
      ieq.indices.push_back({VarName{"i" + ind.indices[j].name.base, VarClass::C3}, relb.type});
    }
    ieq.universe = Universe::prop();
    TermPtr tail = mk_ind(ieqName);
    for (const auto& b : ieq.params) tail = mk_app(tail, mk_var(b.name));
    for (size_t j = 0; j < ni; ++j) tail = mk_app(tail, mk_var(indices3[3 * j + 2].name));
    ieq.ctors.push_back({reflName, tail});
    Decl d;
    d.kind = DeclKind::Inductive;
    d.name = ieqName;
    d.ind = ieq;
    push_checked(env, d, fuel.left > 0 ? fuel.left : kDefaultFuel);
    res.generated.push_back(ieqName);
  }

  // The T_R fixpoint.
  std::set<VarName> used;
  for (const auto& b : params3) used.insert(b.name);
  for (const auto& b : indices3) used.insert(b.name);
  VarName tvar = fresh_name("t", VarClass::C1, used);
  VarName tvar2 = prime_name(tvar);
  std::vector<TermPtr> ivars, ivars2;
  for (const auto& ix : ind.indices) {
    ivars.push_back(mk_var(ix.name));
    ivars2.push_back(mk_var(prime_name(ix.name)));
  }
  std::vector<TermPtr> pvars, pvars2;
  for (const auto& p : ind.params) {
    pvars.push_back(mk_var(p.name));
    pvars2.push_back(mk_var(prime_name(p.name)));
  }
  Telescope fixTele = params3;
  for (const auto& b : indices3) fixTele.push_back(b);
  fixTele.push_back({tvar, mk_ind_applied(indName, pvars, ivars)});
  fixTele.push_back({tvar2, mk_ind_applied(indName, pvars2, ivars2)});
  TermPtr hatSort = mk_sort(hat_universe(ind.universe));
  TermPtr SIG = mk_pi_telescope(fixTele, hatSort);
  int structIdx = (int)(3 * np + 3 * ni);
  VarName fixVar{indName, VarClass::C3};

  T.self_override[indName] = mk_var(fixVar);

  // Ret_out: forall (i_R* at the outer in-vars vs the primed formals), hat(s).
  TermPtr RetOut = hatSort;
  for (size_t j = ni; j-- > 0;) {
    const Binder& relb = indices3[3 * j + 2];
    RetOut = mk_pi(relb.name, relb.type, RetOut);
  }

  std::vector<Branch> outerBranches;
  T.src_ctx.push_back({tvar, fixTele[3 * np + 3 * ni].type});
  T.src_ctx.push_back({tvar2, fixTele[3 * np + 3 * ni + 1].type});
  for (size_t u = 0; u < ind.ctors.size(); ++u) {
    Telescope teleU;
    TermPtr tailU;
    split_pi_telescope(ind.ctors[u].type, teleU, tailU);
    std::vector<TermPtr> cargsU;
    app_head(tailU, cargsU);
    std::vector<TermPtr> CIu(cargsU.begin() + np, cargsU.end());
    // Ret_in: the unprimed index occurrences refined to CI_u.
    std::map<VarName, TermPtr> isubU;
    for (size_t j = 0; j < ni; ++j) isubU[ind.indices[j].name] = CIu[j];
    TermPtr RetIn = subst_many(RetOut, isubU);

    std::vector<VarName> argsU;
    for (const auto& b : teleU) argsU.push_back(b.name);

    std::vector<Branch> innerBranches;
    for (size_t v = 0; v < ind.ctors.size(); ++v) {
      Telescope teleV;
      TermPtr tailV;
      split_pi_telescope(ind.ctors[v].type, teleV, tailV);
      std::vector<VarName> argsV2;
      for (const auto& b : teleV) argsV2.push_back(prime_name(b.name));
      Telescope lamTele;
      TermPtr lamTail;
      split_pi_telescope(RetIn, lamTele, lamTail);
      TermPtr value;
      if (u == v) {
        size_t base = T.src_ctx.size();
        for (const auto& b : teleU) T.src_ctx.push_back({b.name, b.type});
        std::vector<TermPtr> compTypes;
        value = CB.chain_type((int)u, compTypes);
        T.src_ctx.resize(base);
      } else {
        value = mk_ind("False");
      }
      innerBranches.push_back({(int)v, std::move(argsV2), mk_lam_telescope(lamTele, value)});
    }
    TermPtr innerMatch =
        mk_match(mk_var(tvar2), mk_ind_applied(indName, pvars2, ivars2), tvar2,
                 [&] {
                   std::vector<VarName> vs;
                   for (const auto& ix : ind.indices) vs.push_back(prime_name(ix.name));
                   return vs;
                 }(),
                 RetIn, std::move(innerBranches), UFlag::None);
    outerBranches.push_back({(int)u, argsU, innerMatch});
  }
  T.src_ctx.pop_back();
  T.src_ctx.pop_back();

  TermPtr outerMatch = mk_match(mk_var(tvar), mk_ind_applied(indName, pvars, ivars), tvar,
                                [&] {
                                  std::vector<VarName> vs;
                                  for (const auto& ix : ind.indices) vs.push_back(ix.name);
                                  return vs;
                                }(),
                                RetOut, std::move(outerBranches), UFlag::None);
  std::vector<TermPtr> relVars;
  for (size_t j = 0; j < ni; ++j) relVars.push_back(mk_var(indices3[3 * j + 2].name));
  TermPtr fixBody = mk_lam_telescope(fixTele, mk_app(outerMatch, relVars));
  TermPtr fixTerm = mk_fix(fixVar, SIG, fixBody, structIdx);

  Decl drel;
  drel.kind = DeclKind::Definition;
  drel.name = relName;
  drel.type = SIG;
  drel.body = fixTerm;
  push_checked(env, drel, fuel.left > 0 ? fuel.left : kDefaultFuel);
  res.generated.push_back(relName);

  Companion comp;
  comp.rel = relName;
  comp.style = TransStyle::Deductive;
  comp.indices_eq = ni > 0 ? ieqName : "";
  env.set_companion(indName, comp);

  // Constructor companions.
  for (size_t u = 0; u < ind.ctors.size(); ++u) {
    Translator T2(env, false, fuel);
    Telescope p3 = T2.triple_telescope(ind.params);
    Telescope teleU;
    TermPtr tailU;
    split_pi_telescope(ind.ctors[u].type, teleU, tailU);
    Telescope a3 = T2.triple_telescope(teleU);
    std::vector<TermPtr> p3v;
    for (const auto& b : p3) p3v.push_back(mk_var(b.name));
    ChainBuilder CB2{T2, ind, ieqName, p3v};

    std::vector<TermPtr> cargsU;
    app_head(tailU, cargsU);
    std::vector<TermPtr> CIu(cargsU.begin() + np, cargsU.end());
    TermPtr relApplied = mk_const(relName);
    for (const auto& b : p3) relApplied = mk_app(relApplied, mk_var(b.name));
    for (const auto& ci : CIu) {
      TermPtr cif = elaborate_flags(env, T2.src_ctx, ci, fuel);
      relApplied = mk_app(relApplied, {T2.src(cif), T2.srcp(cif), T2.tr(cif)});
    }
    TermPtr capp = mk_ctor(indName, (int)u);
    TermPtr capp2 = mk_ctor(indName, (int)u);
    for (const auto& p : ind.params) {
      capp = mk_app(capp, mk_var(p.name));
      capp2 = mk_app(capp2, mk_var(prime_name(p.name)));
    }
    for (const auto& b : teleU) {
      capp = mk_app(capp, mk_var(b.name));
      capp2 = mk_app(capp2, mk_var(prime_name(b.name)));
    }
    relApplied = mk_app(relApplied, {capp, capp2});

    Telescope all3 = p3;
    for (const auto& b : a3) all3.push_back(b);
    TermPtr ctype = mk_pi_telescope(all3, relApplied);
    // Intro value: src_ctx of T2 already has params ++ args.
    std::vector<TermPtr> compTypes;
    {
      // recompute component types in the right context
      size_t base = T2.src_ctx.size();
      T2.src_ctx.resize(np);  // params only
      TermPtr chainTy = CB2.chain_type((int)u, compTypes);
      (void)chainTy;
      T2.src_ctx.resize(base);
    }
    TermPtr intro;
    {
      size_t base = T2.src_ctx.size();
      T2.src_ctx.resize(np);
      intro = CB2.chain_intro((int)u, compTypes);
      T2.src_ctx.resize(base);
    }
    TermPtr cbody = mk_lam_telescope(all3, intro);
    Decl dc;
    dc.kind = DeclKind::Definition;
    dc.name = ind.ctors[u].name + "_R";
    dc.type = ctype;
    dc.body = cbody;
    push_checked(env, dc, fuel.left > 0 ? fuel.left : kDefaultFuel);
    res.generated.push_back(dc.name);
  }
  return res;
}

TranslationResult translate_inductive_inductive(Environment& env, const std::string& indName,
                                                Fuel& fuel) {
  TranslationResult res;
  const InductiveDecl ind = env.inductive(indName);
  std::string relName = indName + "_R";
  size_t np = ind.params.size(), ni = ind.indices.size();

  Translator T(env, false, fuel);
  Telescope params3 = T.triple_telescope(ind.params);
  Telescope indices3 = T.triple_telescope(ind.indices);

  std::set<VarName> used;
  for (const auto& b : params3) used.insert(b.name);
  for (const auto& b : indices3) used.insert(b.name);
  VarName tvar = fresh_name("t", VarClass::C1, used);
  VarName tvar2 = prime_name(tvar);
  std::vector<TermPtr> pvars, pvars2, ivars, ivars2;
  for (const auto& p : ind.params) {
    pvars.push_back(mk_var(p.name));
    pvars2.push_back(mk_var(prime_name(p.name)));
  }
  for (const auto& ix : ind.indices) {
    ivars.push_back(mk_var(ix.name));
    ivars2.push_back(mk_var(prime_name(ix.name)));
  }

  InductiveDecl relInd;
  relInd.name = relName;
  relInd.params = params3;
  relInd.indices = indices3;
  relInd.indices.push_back({tvar, mk_ind_applied(indName, pvars, ivars)});
  relInd.indices.push_back({tvar2, mk_ind_applied(indName, pvars2, ivars2)});
  relInd.universe = Universe::prop();

  T.self_override[indName] = mk_ind(relName);
  for (size_t u = 0; u < ind.ctors.size(); ++u) {
    Telescope teleU;
    TermPtr tailU;
    split_pi_telescope(ind.ctors[u].type, teleU, tailU);
    size_t base = T.src_ctx.size();
    Telescope a3 = T.triple_telescope(teleU);
    // Tail: I_R p3* (CI,CI',[[CI]])* (c p a*) (c p' a'*).
    std::vector<TermPtr> cargsU;
    app_head(tailU, cargsU);
    std::vector<TermPtr> CIu(cargsU.begin() + np, cargsU.end());
    TermPtr tail = mk_ind(relName);
    for (const auto& b : params3) tail = mk_app(tail, mk_var(b.name));
    for (const auto& ci : CIu) {
      TermPtr cif = elaborate_flags(env, T.src_ctx, ci, fuel);
      tail = mk_app(tail, {T.src(cif), T.srcp(cif), T.tr(cif)});
    }
    TermPtr capp = mk_ctor(indName, (int)u);
    TermPtr capp2 = mk_ctor(indName, (int)u);
    for (const auto& p : ind.params) {
      capp = mk_app(capp, mk_var(p.name));
      capp2 = mk_app(capp2, mk_var(prime_name(p.name)));
    }
    for (const auto& b : teleU) {
      capp = mk_app(capp, mk_var(b.name));
      capp2 = mk_app(capp2, mk_var(prime_name(b.name)));
    }
    tail = mk_app(tail, {capp, capp2});
    relInd.ctors.push_back({ind.ctors[u].name + "_R", mk_pi_telescope(a3, tail)});
    T.src_ctx.resize(base);
  }

  Decl d;
  d.kind = DeclKind::Inductive;
  d.name = relName;
  d.ind = relInd;
  push_checked(env, d, fuel.left > 0 ? fuel.left : kDefaultFuel);
  res.generated.push_back(relName);

  Companion comp;
  comp.rel = relName;
  comp.style = TransStyle::Inductive;
  env.set_companion(indName, comp);
  return res;
}

TranslationResult translate_inductive(Environment& env, const std::string& ind, Fuel& fuel) {
  if (env.inductive(ind).universe.is_prop)
    return translate_inductive_inductive(env, ind, fuel);
  return translate_inductive_deductive(env, ind, fuel);
}

// Definitions ------------------------------------------------------------------

TermPtr prep_for_translation(Environment& env, const Telescope& ctx, const TermPtr& t,
                             Fuel& fuel) {
  std::vector<VarName> l;
  for (const auto& b : ctx) l.push_back(b.name);
  TermPtr r = rename_to_bc(l, t);
  return elaborate_flags(env, ctx, r, fuel);
}

TranslationResult translate_definition(Environment& env, const std::string& name, Fuel& fuel) {
  TranslationResult res;
  const Decl& d = env.get(name);
  if (d.kind != DeclKind::Definition)
    throw Error(ErrKind::UnsupportedShape, name + " is not a definition");
  TermPtr ty = prep_for_translation(env, {}, d.type, fuel);
  TermPtr body = prep_for_translation(env, {}, d.body, fuel);

  Translator T(env, false, fuel);
  T.root_def = name;
  TermPtr stm = beta_head(mk_app(T.tr(ty), {mk_const(name), mk_const(name)}));
  TermPtr proof = T.tr(body);
  try {
    check_type(env, {}, proof, stm, fuel);
  } catch (const Error& e) {
    throw Error(ErrKind::AbstractionFailure,
                "abstraction theorem for " + name + " failed: " + e.msg);
  }
  Decl out;
  out.kind = DeclKind::Definition;
  out.name = name + "_R";
  out.type = stm;
  out.body = proof;
  push_checked(env, out, fuel.left > 0 ? fuel.left : kDefaultFuel);
  res.generated.push_back(out.name);
  res.statement = stm;
  res.proof = proof;

  Companion comp;
  comp.rel = out.name;
  comp.style = TransStyle::None;
  env.set_companion(name, comp);
  return res;
}

TranslationResult abstraction_check(Environment& env, const std::string& name, Fuel& fuel) {
  const Companion* comp = env.companion(name);
  if (!comp || comp->rel.empty()) return translate_definition(env, name, fuel);
  TranslationResult res;
  const Decl& rel = env.get(comp->rel);
  res.statement = rel.type;
  res.proof = rel.body;
  try {
    check_type(env, {}, rel.body, rel.type, fuel);
  } catch (const Error& e) {
    throw Error(ErrKind::AbstractionFailure, "abstraction re-check failed for " + name + ": " + e.msg);
  }
  return res;
}

Telescope translate_context(Environment& env, const Telescope& ctx, Fuel& fuel) {
  Translator T(env, false, fuel);
  return T.triple_telescope(ctx);
}

}  // namespace ptt

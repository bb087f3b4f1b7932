#include "ptt/env.hpp"

#include <stdexcept>

namespace ptt {

const Decl* Environment::find(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return nullptr;
  return &decls_[it->second];
}

const Decl& Environment::get(const std::string& name) const {
  const Decl* d = find(name);
  if (!d) throw std::runtime_error("unknown declaration: " + name);
  return *d;
}

const InductiveDecl& Environment::inductive(const std::string& name) const {
  const Decl& d = get(name);
  if (d.kind != DeclKind::Inductive)
    throw std::runtime_error("not an inductive: " + name);
  return d.ind;
}

const CtorDecl& Environment::ctor(const std::string& ind, int idx) const {
  const InductiveDecl& d = inductive(ind);
  if (idx < 0 || idx >= (int)d.ctors.size())
    throw std::runtime_error("constructor index out of range for " + ind);
  return d.ctors[idx];
}

TermPtr Environment::ctor_type(const std::string& ind, int idx) const {
  const InductiveDecl& d = inductive(ind);
  return mk_pi_telescope(d.params, ctor(ind, idx).type);
}

TermPtr Environment::arity(const std::string& ind) const {
  const InductiveDecl& d = inductive(ind);
  TermPtr t = mk_pi_telescope(d.indices, mk_sort(d.universe));
  return mk_pi_telescope(d.params, t);
}

void Environment::push(Decl d) {
  if (index_.count(d.name))
    throw std::runtime_error("duplicate declaration: " + d.name);
  index_[d.name] = decls_.size();
  decls_.push_back(std::move(d));
}

const Companion* Environment::companion(const std::string& name) const {
  auto it = companions_.find(name);
  return it == companions_.end() ? nullptr : &it->second;
}

Companion* Environment::companion_mut(const std::string& name) {
  auto it = companions_.find(name);
  return it == companions_.end() ? nullptr : &it->second;
}

}  // namespace ptt

#include "trim/ast.hpp"

#include <set>

namespace trim {

std::string toString(const SourceSpan& span) {
  std::string out = span.file.empty() ? "<input>" : span.file;
  out += ":" + std::to_string(span.line) + ":" + std::to_string(span.column);
  return out;
}

Stmt Stmt::assign(std::string v, Term e) {
  Stmt s;
  s.kind = StmtKind::Assign;
  s.target = std::move(v);
  s.expr = std::move(e);
  return s;
}

Stmt Stmt::load(std::string v, std::string ptr) {
  Stmt s;
  s.kind = StmtKind::Load;
  s.target = std::move(v);
  s.source = std::move(ptr);
  return s;
}

Stmt Stmt::store(std::string ptr, Term e) {
  Stmt s;
  s.kind = StmtKind::Store;
  s.target = std::move(ptr);
  s.expr = std::move(e);
  return s;
}

Stmt Stmt::malloc(std::string v, Term size) {
  Stmt s;
  s.kind = StmtKind::Malloc;
  s.target = std::move(v);
  s.expr = std::move(size);
  return s;
}

Stmt Stmt::call(std::string v, std::string callee, std::vector<std::string> args) {
  Stmt s;
  s.kind = StmtKind::Call;
  s.target = std::move(v);
  s.callee = std::move(callee);
  s.args = std::move(args);
  return s;
}

Stmt Stmt::assertion(Formula p) {
  Stmt s;
  s.kind = StmtKind::Assert;
  s.pred = std::move(p);
  return s;
}

Stmt Stmt::assumption(Formula p) {
  Stmt s;
  s.kind = StmtKind::Assume;
  s.pred = std::move(p);
  return s;
}

Stmt Stmt::nondetIf(Block thenBranch, Block elseBranch) {
  Stmt s;
  s.kind = StmtKind::NondetIf;
  s.thenBranch = std::move(thenBranch);
  s.elseBranch = std::move(elseBranch);
  return s;
}

Stmt Stmt::havoc(std::string v) {
  Stmt s;
  s.kind = StmtKind::Havoc;
  s.target = std::move(v);
  return s;
}

Stmt Stmt::probe(int id, Formula p) {
  Stmt s;
  s.kind = StmtKind::Probe;
  s.probeId = id;
  s.pred = std::move(p);
  return s;
}

namespace {

bool sameTerm(const Term& a, const Term& b) {
  if (a.valid() != b.valid()) return false;
  return !a.valid() || a == b;
}

bool sameFormula(const Formula& a, const Formula& b) {
  if (a.valid() != b.valid()) return false;
  return !a.valid() || a == b;
}

}  // namespace

bool operator==(const Stmt& a, const Stmt& b) {
  return a.kind == b.kind && a.target == b.target && a.source == b.source &&
         sameTerm(a.expr, b.expr) && sameFormula(a.pred, b.pred) && a.callee == b.callee &&
         a.args == b.args && a.thenBranch == b.thenBranch && a.elseBranch == b.elseBranch &&
         a.probeId == b.probeId;
}

const Procedure* Program::find(const std::string& name) const {
  for (const auto& p : procedures)
    if (p.name == name) return &p;
  return nullptr;
}

Procedure* Program::find(const std::string& name) {
  for (auto& p : procedures)
    if (p.name == name) return &p;
  return nullptr;
}

const Procedure& Program::entryProcedure() const {
  const Procedure* p = find(entry);
  if (!p) throw NameError("entry procedure '" + entry + "' does not exist");
  return *p;
}

std::string defaultEntry(const Program& p) {
  if (p.find("main")) return "main";
  return p.procedures.empty() ? std::string() : p.procedures.back().name;
}

std::vector<std::string> readsOf(const Stmt& s) {
  std::set<std::string> vars;
  switch (s.kind) {
    case StmtKind::Assign:
    case StmtKind::Malloc:
      collectVars(s.expr, vars);
      break;
    case StmtKind::Load:
      vars.insert(s.source);
      break;
    case StmtKind::Store:
      vars.insert(s.target);
      collectVars(s.expr, vars);
      break;
    case StmtKind::Call:
      vars.insert(s.args.begin(), s.args.end());
      break;
    case StmtKind::Assert:
    case StmtKind::Assume:
    case StmtKind::Probe:
      vars = freeVars(s.pred);
      break;
    case StmtKind::NondetIf:
    case StmtKind::Havoc:
      break;
  }
  return {vars.begin(), vars.end()};
}

namespace {

void checkBlock(const Program& prog, const Procedure& proc, const Block& b,
                std::set<std::string>& defined) {
  for (const auto& s : b) {
    for (const auto& v : readsOf(s)) {
      if (!defined.count(v))
        throw NameError("'" + v + "' is used before it is assigned in procedure '" + proc.name + "'",
                        s.span);
    }
    switch (s.kind) {
      case StmtKind::Call: {
        const Procedure* callee = prog.find(s.callee);
        if (!callee) throw NameError("unknown procedure '" + s.callee + "'", s.span);
        if (callee->params.size() != s.args.size())
          throw ArityError("procedure '" + s.callee + "' expects " +
                               std::to_string(callee->params.size()) + " arguments, got " +
                               std::to_string(s.args.size()),
                           s.span);
        if (!s.target.empty()) defined.insert(s.target);
        break;
      }
      case StmtKind::Assign:
      case StmtKind::Load:
      case StmtKind::Malloc:
      case StmtKind::Havoc:
        defined.insert(s.target);
        break;
      case StmtKind::NondetIf: {
        auto left = defined;
        auto right = defined;
        checkBlock(prog, proc, s.thenBranch, left);
        checkBlock(prog, proc, s.elseBranch, right);
        for (const auto& v : left)
          if (right.count(v)) defined.insert(v);
        break;
      }
      default:
        break;
    }
  }
}

}  // namespace

void validate(const Program& p) {
  std::set<std::string> names;
  for (const auto& proc : p.procedures) {
    if (!names.insert(proc.name).second)
      throw NameError("procedure '" + proc.name + "' is defined twice", proc.span);
    std::set<std::string> params;
    for (const auto& v : proc.params)
      if (!params.insert(v).second)
        throw NameError("duplicate parameter '" + v + "' in procedure '" + proc.name + "'",
                        proc.span);
    if (params.count(proc.ret))
      throw NameError("return variable '" + proc.ret + "' of '" + proc.name +
                          "' clashes with a parameter",
                      proc.span);
  }
  if (!p.find(p.entry)) throw NameError("entry procedure '" + p.entry + "' does not exist");
  for (const auto& proc : p.procedures) {
    std::set<std::string> defined(proc.params.begin(), proc.params.end());
    defined.insert(proc.ret);
    checkBlock(p, proc, proc.body, defined);
  }
}

namespace {

std::size_t count(const Formula& f) { return f.valid() ? f.size() : 0; }
std::size_t count(const Term& t) { return t.valid() ? t.size() : 0; }

std::size_t count(const Block& b) {
  std::size_t n = 0;
  for (const auto& s : b) {
    n += 1 + count(s.expr) + count(s.pred) + s.args.size();
    n += count(s.thenBranch) + count(s.elseBranch);
  }
  return n;
}

}  // namespace

std::size_t nodeCount(const Program& p) {
  std::size_t n = 0;
  for (const auto& proc : p.procedures) n += 1 + count(proc.body);
  return n;
}

void collectCallees(const Block& b, std::vector<std::string>& out) {
  for (const auto& s : b) {
    if (s.kind == StmtKind::Call) out.push_back(s.callee);
    collectCallees(s.thenBranch, out);
    collectCallees(s.elseBranch, out);
  }
}

}  // namespace trim

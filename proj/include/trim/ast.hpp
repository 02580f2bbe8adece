#ifndef TRIM_AST_HPP
#define TRIM_AST_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include "trim/formula.hpp"
#include "trim/term.hpp"

namespace trim {

struct SourceSpan {
  std::string file;
  int line = 0;
  int column = 0;
  int endLine = 0;
  int endColumn = 0;

  bool known() const { return line > 0; }
};

std::string toString(const SourceSpan& span);

class TrimError : public std::runtime_error {
 public:
  TrimError(const std::string& what, SourceSpan span = {})
      : std::runtime_error(what), span_(std::move(span)) {}
  const SourceSpan& span() const { return span_; }

 private:
  SourceSpan span_;
};

struct ParseError : TrimError {
  using TrimError::TrimError;
};
struct NameError : TrimError {
  using TrimError::TrimError;
};
struct ArityError : TrimError {
  using TrimError::TrimError;
};

enum class StmtKind {
  Assign,    // target := expr
  Load,      // target := *source
  Store,     // *target := expr
  Malloc,    // target := malloc(expr)
  Call,      // target := call callee(args), target may be empty
  Assert,
  Assume,
  NondetIf,
  Havoc,     // target := nondet()
  Probe,     // harness only: records whether `pred` holds, never printed
};

struct Stmt;
using Block = std::vector<Stmt>;

struct Stmt {
  StmtKind kind = StmtKind::Assume;
  std::string target;
  std::string source;
  Term expr;
  Formula pred;
  std::string callee;
  std::vector<std::string> args;
  Block thenBranch;
  Block elseBranch;
  int probeId = -1;
  SourceSpan span;

  static Stmt assign(std::string v, Term e);
  static Stmt load(std::string v, std::string ptr);
  static Stmt store(std::string ptr, Term e);
  static Stmt malloc(std::string v, Term size);
  static Stmt call(std::string v, std::string callee, std::vector<std::string> args);
  static Stmt assertion(Formula p);
  static Stmt assumption(Formula p);
  static Stmt nondetIf(Block thenBranch, Block elseBranch);
  static Stmt havoc(std::string v);
  static Stmt probe(int id, Formula p);

  Stmt withSpan(SourceSpan s) const {
    Stmt out = *this;
    out.span = std::move(s);
    return out;
  }

  // Spans are ignored.
  friend bool operator==(const Stmt& a, const Stmt& b);
};

struct Procedure {
  std::string name;
  std::vector<std::string> params;
  std::string ret;
  Block body;
  SourceSpan span;

  friend bool operator==(const Procedure& a, const Procedure& b) {
    return a.name == b.name && a.params == b.params && a.ret == b.ret && a.body == b.body;
  }
};

struct Program {
  std::vector<Procedure> procedures;
  std::string entry;

  const Procedure* find(const std::string& name) const;
  Procedure* find(const std::string& name);
  const Procedure& entryProcedure() const;

  friend bool operator==(const Program& a, const Program& b) {
    return a.procedures == b.procedures && a.entry == b.entry;
  }
};

/// "main" when declared, otherwise the last procedure.
std::string defaultEntry(const Program& p);

/// Checks the well-formedness rules: unique names, known call targets and
/// arities, distinct parameters, definite assignment. Throws NameError or
/// ArityError.
void validate(const Program& p);

/// Variables read by a statement (not descending into branches).
std::vector<std::string> readsOf(const Stmt& s);

/// Number of AST nodes (statements, terms and formula nodes).
std::size_t nodeCount(const Program& p);

/// Callees of every call statement in `b`, recursively, in order.
void collectCallees(const Block& b, std::vector<std::string>& out);

}  // namespace trim

#endif  // TRIM_AST_HPP

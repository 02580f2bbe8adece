#include "trim/syntax.hpp"

namespace trim {

namespace {

void printBlock(const Block& b, int indent, std::string& out);

void line(int indent, const std::string& text, std::string& out) {
  out.append(static_cast<std::size_t>(indent) * 2, ' ');
  out += text;
  out += '\n';
}

std::string joined(const std::vector<std::string>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    out += xs[i];
  }
  return out;
}

void printStmt(const Stmt& s, int indent, std::string& out) {
  switch (s.kind) {
    case StmtKind::Assign:
      return line(indent, s.target + " := " + toString(s.expr) + ";", out);
    case StmtKind::Load:
      return line(indent, s.target + " := *" + s.source + ";", out);
    case StmtKind::Store:
      return line(indent, "*" + s.target + " := " + toString(s.expr) + ";", out);
    case StmtKind::Malloc:
      return line(indent, s.target + " := malloc(" + toString(s.expr) + ");", out);
    case StmtKind::Call: {
      std::string call = "call " + s.callee + "(" + joined(s.args) + ");";
      return line(indent, s.target.empty() ? call : s.target + " := " + call, out);
    }
    case StmtKind::Assert:
      return line(indent, "assert " + toString(s.pred) + ";", out);
    case StmtKind::Assume:
      return line(indent, "assume " + toString(s.pred) + ";", out);
    case StmtKind::Havoc:
      return line(indent, s.target + " := nondet();", out);
    case StmtKind::Probe:
      return line(indent, "// probe " + std::to_string(s.probeId) + ": " + toString(s.pred), out);
    case StmtKind::NondetIf:
      line(indent, "if (*) {", out);
      printBlock(s.thenBranch, indent + 1, out);
      line(indent, "} else {", out);
      printBlock(s.elseBranch, indent + 1, out);
      line(indent, "}", out);
      return;
  }
}

void printBlock(const Block& b, int indent, std::string& out) {
  for (const auto& s : b) printStmt(s, indent, out);
}

}  // namespace

std::string print(const Stmt& s, int indent) {
  std::string out;
  printStmt(s, indent, out);
  return out;
}

std::string print(const Procedure& p) {
  std::string out = "proc " + p.name + "(" + joined(p.params) + ") : " + p.ret + " {\n";
  printBlock(p.body, 1, out);
  out += "}\n";
  return out;
}

std::string print(const Program& p) {
  std::string out;
  for (std::size_t i = 0; i < p.procedures.size(); ++i) {
    if (i) out += '\n';
    out += print(p.procedures[i]);
  }
  return out;
}

}  // namespace trim

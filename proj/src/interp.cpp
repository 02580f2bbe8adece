#include "trim/interp.hpp"

#include <algorithm>
#include <stdexcept>

namespace trim {

void ExecConfig::validate() const {
  if (nondetLo > nondetHi || witnessLo > witnessHi)
    throw std::invalid_argument("empty value domain");
  if (forkBound == 0 || stepBound == 0 || pathBound == 0)
    throw std::invalid_argument("execution bounds must be positive");
}

std::string toString(const Valuation& v) {
  std::string out;
  for (const auto& [k, x] : v.vars) {
    if (!out.empty()) out += ", ";
    out += k + "=" + std::to_string(x);
  }
  bool first = true;
  for (const auto& [a, x] : v.heap) {
    out += first ? (out.empty() ? "" : "; ") : ", ";
    first = false;
    out += "*" + std::to_string(a) + "=" + std::to_string(x);
  }
  return out;
}

const char* toString(Outcome o) {
  switch (o) {
    case Outcome::Ok:
      return "ok";
    case Outcome::AssumeFail:
      return "blocked";
    case Outcome::AssertFail:
      return "failure";
  }
  return "?";
}

namespace {

using Frame = std::map<std::string, Int>;
using Heap = std::map<Int, Int>;

constexpr std::size_t kMaxDepth = 2000;

// Why a run stopped early. `outcome` empty means inconclusive.
struct Stop {
  std::optional<Outcome> outcome;
  std::string reason;
};

// Evaluation shared by statements and formulas. Statements treat an invalid
// dereference as a failure; formulas read 0.
std::optional<Int> evalTerm(const Term& t, const Frame& frame, const Heap& heap, IntMode mode,
                            bool strictHeap, bool& invalidDeref) {
  switch (t.kind()) {
    case TermKind::Const:
      return t.value();
    case TermKind::Var: {
      auto it = frame.find(t.name());
      if (it == frame.end()) return std::nullopt;
      return it->second;
    }
    case TermKind::Drf: {
      auto a = evalTerm(t.operand(), frame, heap, mode, strictHeap, invalidDeref);
      if (!a) return std::nullopt;
      auto it = heap.find(*a);
      if (it == heap.end()) {
        if (strictHeap) invalidDeref = true;
        return 0;
      }
      return it->second;
    }
    default: {
      auto l = evalTerm(t.lhs(), frame, heap, mode, strictHeap, invalidDeref);
      if (!l) return std::nullopt;
      auto r = evalTerm(t.rhs(), frame, heap, mode, strictHeap, invalidDeref);
      if (!r) return std::nullopt;
      return applyArith(t.kind(), *l, *r, mode);
    }
  }
}

std::optional<bool> evalFormula(const Formula& f, Frame& frame, const Heap& heap, Int qlo, Int qhi,
                                IntMode mode) {
  switch (f.kind()) {
    case FormulaKind::True:
      return true;
    case FormulaKind::False:
      return false;
    case FormulaKind::Lt:
    case FormulaKind::Gt:
    case FormulaKind::Eq: {
      bool bad = false;
      auto l = evalTerm(f.lhsTerm(), frame, heap, mode, false, bad);
      auto r = evalTerm(f.rhsTerm(), frame, heap, mode, false, bad);
      if (!l || !r) return std::nullopt;
      if (f.is(FormulaKind::Lt)) return *l < *r;
      if (f.is(FormulaKind::Gt)) return *l > *r;
      return *l == *r;
    }
    case FormulaKind::Not: {
      auto v = evalFormula(f.kid(), frame, heap, qlo, qhi, mode);
      if (!v) return std::nullopt;
      return !*v;
    }
    case FormulaKind::And:
    case FormulaKind::Or: {
      const bool isAnd = f.is(FormulaKind::And);
      bool unknown = false;
      for (const auto& k : f.kids()) {
        auto v = evalFormula(k, frame, heap, qlo, qhi, mode);
        if (!v) {
          unknown = true;
        } else if (*v != isAnd) {
          return !isAnd;
        }
      }
      if (unknown) return std::nullopt;
      return isAnd;
    }
    case FormulaKind::Implies: {
      auto a = evalFormula(f.kid(0), frame, heap, qlo, qhi, mode);
      if (a && !*a) return true;
      auto b = evalFormula(f.kid(1), frame, heap, qlo, qhi, mode);
      if (b && *b) return true;
      if (!a || !b) return std::nullopt;
      return false;
    }
    case FormulaKind::Forall:
    case FormulaKind::Exists: {
      const bool isForall = f.is(FormulaKind::Forall);
      const std::string& v = f.boundVar();
      std::optional<Int> saved;
      if (auto it = frame.find(v); it != frame.end()) saved = it->second;
      bool unknown = false;
      std::optional<bool> result;
      for (Int x = qlo; x <= qhi && !result; ++x) {
        frame[v] = x;
        auto b = evalFormula(f.body(), frame, heap, qlo, qhi, mode);
        if (!b) {
          unknown = true;
        } else if (*b != isForall) {
          result = !isForall;
        }
      }
      if (saved) {
        frame[v] = *saved;
      } else {
        frame.erase(v);
      }
      if (result) return result;
      if (unknown) return std::nullopt;
      return isForall;
    }
  }
  return std::nullopt;
}

class Machine {
 public:
  Machine(const Program* prog, const ExecConfig& cfg, const StepObserver* observer,
          const std::vector<Int>& prefix, bool extend, Heap heap)
      : prog_(prog), cfg_(cfg), observer_(observer), prefix_(prefix), extend_(extend),
        heap_(std::move(heap)) {
    nextAddr_ = heap_.empty() ? 1 : std::max<Int>(heap_.rbegin()->first + 1, 1);
  }

  // Runs `body` in `frame`; the frame is updated in place.
  ExecutionResult exec(const std::string& proc, const Block& body, Frame& frame,
                       const std::string* ret) {
    ExecutionResult r;
    if (block(proc, body, frame, 0)) {
      r.outcome = Outcome::Ok;
      if (ret) r.ret = frame.at(*ret);
    } else {
      r.outcome = stop_.outcome;
      if (!stop_.outcome) r.inconclusive = stop_.reason;
    }
    r.final = Valuation{frame, std::move(heap_)};
    r.decisions = std::move(decisions_);
    r.steps = steps_;
    r.probes = std::move(probes_);
    return r;
  }

  std::vector<std::pair<Int, Int>>& domains() { return domains_; }

 private:
  bool halt(std::optional<Outcome> o, std::string why) {
    stop_ = Stop{o, std::move(why)};
    return false;
  }

  std::optional<Int> choose(Int lo, Int hi) {
    if (decisions_.size() >= cfg_.forkBound) {
      halt(std::nullopt, "fork bound");
      return std::nullopt;
    }
    std::size_t i = decisions_.size();
    Int v;
    if (i < prefix_.size()) {
      v = prefix_[i];
      if (v < lo || v > hi)
        throw std::invalid_argument("decision " + std::to_string(i) + " = " + std::to_string(v) +
                                    " outside [" + std::to_string(lo) + ", " +
                                    std::to_string(hi) + "]");
    } else if (extend_) {
      v = lo;
    } else {
      halt(std::nullopt, "decisions exhausted");
      return std::nullopt;
    }
    decisions_.push_back(v);
    domains_.emplace_back(lo, hi);
    return v;
  }

  std::optional<Int> eval(const Term& t, const Frame& frame) {
    bool bad = false;
    auto v = evalTerm(t, frame, heap_, cfg_.intMode, true, bad);
    if (bad) {
      halt(Outcome::AssertFail, "invalid dereference");
      return std::nullopt;
    }
    if (!v) halt(std::nullopt, "overflow or unbound variable in " + toString(t));
    return v;
  }

  std::optional<bool> test(const Formula& f, Frame& frame, Int qlo, Int qhi) {
    auto v = evalFormula(f, frame, heap_, qlo, qhi, cfg_.intMode);
    if (!v) halt(std::nullopt, "cannot evaluate " + toString(f));
    return v;
  }

  std::optional<Int> var(const Frame& frame, const std::string& v) {
    auto it = frame.find(v);
    if (it == frame.end()) {
      halt(std::nullopt, "unbound variable " + v);
      return std::nullopt;
    }
    return it->second;
  }

  Int* cell(Int addr) {
    auto it = heap_.find(addr);
    if (it == heap_.end()) {
      halt(Outcome::AssertFail, "invalid dereference");
      return nullptr;
    }
    return &it->second;
  }

  bool block(const std::string& proc, const Block& body, Frame& frame, std::size_t depth) {
    for (std::size_t i = 0; i < body.size(); ++i) {
      if (cfg_.angelicWitnesses && isWitness(body[i])) {
        std::size_t k = i;
        while (k < body.size() && isWitness(body[k])) ++k;
        if (k < body.size() && body[k].kind == StmtKind::Assume) {
          if (!witnesses(proc, body, i, k, frame)) return false;
          i = k - 1;
          continue;
        }
      }
      if (!stmt(proc, body[i], frame, depth)) return false;
    }
    return true;
  }

  static bool isWitness(const Stmt& s) {
    return s.kind == StmtKind::Havoc && s.target.rfind("_q", 0) == 0;
  }

  // Havocs body[from, to) of witnesses for the assume at body[to]. The
  // witnesses are dead after it, so runs differing only in their values
  // collapse into one: the first tuple satisfying the assume, or the lowest
  // values if none does.
  bool witnesses(const std::string& proc, const Block& body, std::size_t from, std::size_t to,
                 Frame& frame) {
    const Formula& pred = body[to].pred;
    const std::set<std::string> used = freeVars(pred);
    std::vector<std::string> search;
    for (std::size_t j = from; j < to; ++j) {
      if (++steps_ > cfg_.stepBound) return halt(std::nullopt, "step bound");
      if (observer_) (*observer_)(StepEvent{proc, body[j], frame, heap_});
      frame[body[j].target] = cfg_.witnessLo;
      if (used.count(body[j].target)) search.push_back(body[j].target);
    }
    std::vector<Int> tuple(search.size(), cfg_.witnessLo);
    for (;;) {
      for (std::size_t j = 0; j < search.size(); ++j) frame[search[j]] = tuple[j];
      if (evalFormula(pred, frame, heap_, cfg_.nondetLo, cfg_.nondetHi, cfg_.intMode) == true)
        return true;
      std::size_t j = 0;
      while (j < tuple.size() && tuple[j] == cfg_.witnessHi) tuple[j++] = cfg_.witnessLo;
      if (j == tuple.size()) break;
      ++tuple[j];
    }
    for (const auto& v : search) frame[v] = cfg_.witnessLo;
    return true;
  }

  // False when execution stopped; the reason is in stop_.
  bool stmt(const std::string& proc, const Stmt& s, Frame& frame, std::size_t depth) {
    if (++steps_ > cfg_.stepBound) return halt(std::nullopt, "step bound");
    if (observer_) (*observer_)(StepEvent{proc, s, frame, heap_});
    switch (s.kind) {
      case StmtKind::Assign: {
        auto v = eval(s.expr, frame);
        if (!v) return false;
        frame[s.target] = *v;
        return true;
      }
      case StmtKind::Load: {
        auto a = var(frame, s.source);
        if (!a) return false;
        Int* c = cell(*a);
        if (!c) return false;
        frame[s.target] = *c;
        return true;
      }
      case StmtKind::Store: {
        auto a = var(frame, s.target);
        if (!a) return false;
        auto v = eval(s.expr, frame);
        if (!v) return false;
        Int* c = cell(*a);
        if (!c) return false;
        *c = *v;
        return true;
      }
      case StmtKind::Malloc: {
        auto size = eval(s.expr, frame);
        if (!size) return false;
        Int n = std::clamp<Int>(*size, 1, 4);
        Int base = nextAddr_;
        nextAddr_ += n;
        for (Int i = 0; i < n; ++i) {
          auto v = choose(cfg_.nondetLo, cfg_.nondetHi);
          if (!v) return false;
          heap_[base + i] = *v;
        }
        frame[s.target] = base;
        return true;
      }
      case StmtKind::Call: {
        if (!prog_) throw std::logic_error("call outside a program");
        const Procedure* callee = prog_->find(s.callee);
        if (!callee) throw std::logic_error("unknown procedure " + s.callee);
        if (depth + 1 > kMaxDepth) return halt(std::nullopt, "recursion depth");
        Frame inner;
        for (std::size_t i = 0; i < callee->params.size(); ++i) {
          auto v = var(frame, s.args.at(i));
          if (!v) return false;
          inner[callee->params[i]] = *v;
        }
        inner.try_emplace(callee->ret, 0);
        if (!block(callee->name, callee->body, inner, depth + 1)) return false;
        if (!s.target.empty()) frame[s.target] = inner.at(callee->ret);
        return true;
      }
      case StmtKind::Assert:
      case StmtKind::Assume: {
        auto v = test(s.pred, frame, cfg_.nondetLo, cfg_.nondetHi);
        if (!v) return false;
        if (*v) return true;
        return s.kind == StmtKind::Assert ? halt(Outcome::AssertFail, "assertion")
                                          : halt(Outcome::AssumeFail, "assumption");
      }
      case StmtKind::NondetIf: {
        auto c = choose(0, 1);
        if (!c) return false;
        return block(proc, *c == 0 ? s.thenBranch : s.elseBranch, frame, depth);
      }
      case StmtKind::Havoc: {
        const bool witness = s.target.rfind("_q", 0) == 0;
        auto v = witness ? choose(cfg_.witnessLo, cfg_.witnessHi) : choose(cfg_.nondetLo, cfg_.nondetHi);
        if (!v) return false;
        frame[s.target] = *v;
        return true;
      }
      case StmtKind::Probe: {
        auto v = evalFormula(s.pred, frame, heap_, cfg_.witnessLo, cfg_.witnessHi, cfg_.intMode);
        probes_.push_back(ProbeHit{s.probeId, v.value_or(false)});
        return true;
      }
    }
    return true;
  }

  const Program* prog_;
  const ExecConfig& cfg_;
  const StepObserver* observer_;
  const std::vector<Int>& prefix_;
  bool extend_;
  Heap heap_;
  Int nextAddr_ = 1;
  std::size_t steps_ = 0;
  Stop stop_;
  std::vector<Int> decisions_;
  std::vector<std::pair<Int, Int>> domains_;
  std::vector<ProbeHit> probes_;
};

Frame entryFrame(const Procedure& proc, const Valuation& sigma) {
  Frame f;
  for (const auto& p : proc.params) {
    auto it = sigma.vars.find(p);
    if (it == sigma.vars.end()) throw std::invalid_argument("no value for parameter " + p);
    f[p] = it->second;
  }
  if (!f.count(proc.ret)) f[proc.ret] = 0;
  return f;
}

// Depth-first enumeration of decision sequences; `once` performs one run
// from a prefix and reports the decisions made with their domains.
template <typename RunOnce>
Exploration enumerate(const ExecConfig& cfg, RunOnce once) {
  cfg.validate();
  Exploration out;
  std::vector<Int> prefix;
  std::size_t runs = 0;
  for (;;) {
    std::vector<std::pair<Int, Int>> domains;
    ExecutionResult r = once(prefix, domains);
    std::vector<Int> d = r.decisions;
    if (r.conclusive()) {
      out.results.push_back(std::move(r));
    } else {
      ++out.inconclusive;
    }
    std::size_t i = d.size();
    while (i > 0 && d[i - 1] >= domains[i - 1].second) --i;
    if (i == 0) break;
    if (++runs >= cfg.pathBound) {
      ++out.inconclusive;
      break;
    }
    d.resize(i);
    ++d[i - 1];
    prefix = std::move(d);
  }
  return out;
}

}  // namespace

std::optional<bool> evaluate(const Formula& f, const std::map<std::string, Int>& frame,
                             const std::map<Int, Int>& heap, Int qlo, Int qhi, IntMode mode) {
  Frame copy = frame;
  return evalFormula(f, copy, heap, qlo, qhi, mode);
}

std::optional<Int> evaluate(const Term& t, const std::map<std::string, Int>& frame,
                            const std::map<Int, Int>& heap, IntMode mode) {
  bool bad = false;
  return evalTerm(t, frame, heap, mode, false, bad);
}

ExecutionResult run(const Program& p, const Valuation& sigma, const std::vector<Int>& decisions,
                    const ExecConfig& cfg, const StepObserver* observer) {
  cfg.validate();
  const Procedure& entry = p.entryProcedure();
  Frame frame = entryFrame(entry, sigma);
  Machine m(&p, cfg, observer, decisions, false, sigma.heap);
  ExecutionResult r = m.exec(entry.name, entry.body, frame, &entry.ret);
  r.entry = sigma;
  return r;
}

Exploration explore(const Program& p, const Valuation& sigma, const ExecConfig& cfg,
                    const StepObserver* observer) {
  const Procedure& entry = p.entryProcedure();
  const Frame start = entryFrame(entry, sigma);
  return enumerate(cfg, [&](const std::vector<Int>& prefix, auto& domains) {
    Frame frame = start;
    Machine m(&p, cfg, observer, prefix, true, sigma.heap);
    ExecutionResult r = m.exec(entry.name, entry.body, frame, &entry.ret);
    r.entry = sigma;
    domains = std::move(m.domains());
    return r;
  });
}

Exploration exploreBlock(const Block& body, const Valuation& sigma, const ExecConfig& cfg) {
  return enumerate(cfg, [&](const std::vector<Int>& prefix, auto& domains) {
    Frame frame = sigma.vars;
    Machine m(nullptr, cfg, nullptr, prefix, true, sigma.heap);
    ExecutionResult r = m.exec("block", body, frame, nullptr);
    r.entry = sigma;
    domains = std::move(m.domains());
    return r;
  });
}

bool Exploration::anyFailure() const {
  return std::any_of(results.begin(), results.end(),
                     [](const ExecutionResult& r) { return r.failed(); });
}

std::size_t Exploration::count(Outcome o) const {
  return static_cast<std::size_t>(std::count_if(
      results.begin(), results.end(), [o](const ExecutionResult& r) { return r.outcome == o; }));
}

std::optional<bool> exactWp(const Block& s, const Formula& post, const Valuation& sigma,
                            const ExecConfig& cfg) {
  Exploration e = exploreBlock(s, sigma, cfg);
  if (e.inconclusive) return std::nullopt;
  bool unknown = false;
  for (const auto& r : e.results) {
    if (r.failed()) return false;
    if (r.outcome != Outcome::Ok) continue;
    auto v = evaluate(post, r.final.vars, r.final.heap, cfg.nondetLo, cfg.nondetHi, cfg.intMode);
    if (!v) {
      unknown = true;
    } else if (!*v) {
      return false;
    }
  }
  if (unknown) return std::nullopt;
  return true;
}

std::vector<Int> InputSpace::range(Int lo, Int hi) {
  std::vector<Int> out;
  for (Int x = lo; x <= hi; ++x) out.push_back(x);
  return out;
}

std::vector<Valuation> InputSpace::enumerate() const {
  std::vector<const std::vector<Int>*> axes;
  for (const auto& [name, values] : vars) axes.push_back(&values);
  for (std::size_t i = 0; i < heapCells; ++i) axes.push_back(&cellValues);
  for (const auto* a : axes)
    if (a->empty()) return {};

  std::vector<Valuation> out;
  std::vector<std::size_t> idx(axes.size(), 0);
  for (;;) {
    Valuation v;
    for (std::size_t i = 0; i < vars.size(); ++i) v.vars[vars[i].first] = (*axes[i])[idx[i]];
    for (std::size_t c = 0; c < heapCells; ++c)
      v.heap[static_cast<Int>(c + 1)] = (*axes[vars.size() + c])[idx[vars.size() + c]];
    out.push_back(std::move(v));
    std::size_t k = 0;
    while (k < axes.size() && ++idx[k] == axes[k]->size()) idx[k++] = 0;
    if (k == axes.size()) break;
  }
  return out;
}

InputSpace scalarInputs(const Program& p, Int lo, Int hi) {
  InputSpace s;
  for (const auto& param : p.entryProcedure().params) s.vars.emplace_back(param, InputSpace::range(lo, hi));
  return s;
}

std::string EquiSafeVerdict::text() const {
  std::string counts =
      " (" + std::to_string(checked) + " checked, " + std::to_string(inconclusive) + " inconclusive)";
  switch (kind) {
    case Kind::EquiSafe:
      return "equi-safe" + counts;
    case Kind::Inconclusive:
      return "inconclusive" + counts;
    case Kind::Counterexample: {
      std::string out = "counterexample" + counts + ": " + counterexample->reason + " at " +
                        toString(counterexample->sigma);
      out += " decisions [";
      for (std::size_t i = 0; i < counterexample->decisions.size(); ++i)
        out += (i ? " " : "") + std::to_string(counterexample->decisions[i]);
      return out + "]";
    }
  }
  return "";
}

EquiSafeVerdict checkEquiSafe(const Program& p, const Program& q,
                              const std::vector<Valuation>& inputs, const ExecConfig& cfg) {
  EquiSafeVerdict v;
  auto fail = [&](const Valuation& sigma, std::string why, std::vector<Int> decisions) {
    v.kind = EquiSafeVerdict::Kind::Counterexample;
    v.counterexample = Counterexample{sigma, std::move(why), std::move(decisions)};
    return v;
  };
  for (const auto& sigma : inputs) {
    Exploration a = explore(p, sigma, cfg);
    Exploration b = explore(q, sigma, cfg);
    if (a.inconclusive || b.inconclusive) {
      ++v.inconclusive;
      continue;
    }
    ++v.checked;
    auto firstFailure = [](const Exploration& e) {
      for (const auto& r : e.results)
        if (r.failed()) return r.decisions;
      return std::vector<Int>{};
    };
    const bool failA = a.anyFailure();
    const bool failB = b.anyFailure();
    if (failA && !failB) return fail(sigma, "failure only in the original", firstFailure(a));
    if (failB && !failA) return fail(sigma, "failure only in the transformed program", firstFailure(b));
    const bool blocksB = b.count(Outcome::AssumeFail) > 0;
    if (a.count(Outcome::AssumeFail) && !blocksB) {
      for (const auto& r : a.results)
        if (r.outcome == Outcome::AssumeFail)
          return fail(sigma, "blocked run has no blocked counterpart", r.decisions);
    }
    if (blocksB) continue;
    for (const auto& r : a.results) {
      if (r.outcome != Outcome::Ok) continue;
      bool matched = std::any_of(b.results.begin(), b.results.end(), [&](const ExecutionResult& s) {
        return s.outcome == Outcome::Ok && s.ret == r.ret;
      });
      if (!matched) return fail(sigma, "normal termination has no counterpart", r.decisions);
    }
  }
  if (v.inconclusive) v.kind = EquiSafeVerdict::Kind::Inconclusive;
  return v;
}

}  // namespace trim

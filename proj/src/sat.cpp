#include "modbench/sat.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace modbench::sat {

namespace {

using Lit = uint32_t;  // 2 * var + negated, var 0-based
constexpr uint32_t kNoReason = UINT32_MAX;

inline Lit neg(Lit l) { return l ^ 1u; }
inline uint32_t var_of(Lit l) { return l >> 1; }

Lit from_dimacs(int l) {
  if (l == 0) throw std::invalid_argument("zero literal");
  uint32_t v = static_cast<uint32_t>(std::abs(l)) - 1;
  return 2 * v + (l < 0 ? 1u : 0u);
}

struct Clause {
  std::vector<Lit> lits;
  bool learnt = false;
  bool deleted = false;
  double activity = 0;
};

struct Watcher {
  uint32_t cref;
  Lit blocker;
};

double luby(double y, uint64_t x) {
  uint64_t size = 1;
  int seq = 0;
  while (size < x + 1) {
    ++seq;
    size = 2 * size + 1;
  }
  while (size - 1 != x) {
    size = (size - 1) >> 1;
    --seq;
    x = x % size;
  }
  return std::pow(y, seq);
}

}  // namespace

struct Solver::Impl {
  std::vector<Clause> clauses;
  std::vector<uint32_t> free_slots;
  std::vector<std::vector<Watcher>> watches;  // by literal
  std::vector<int8_t> assigns;                // by var: 0 undef, 1 true, -1 false
  std::vector<uint32_t> level;
  std::vector<uint32_t> reason;
  std::vector<uint8_t> phase;  // saved polarity: 1 = negative
  std::vector<double> activity;
  std::vector<uint8_t> seen;
  std::vector<Lit> trail;
  std::vector<size_t> trail_lim;
  size_t qhead = 0;
  double var_inc = 1.0;
  double cla_inc = 1.0;
  bool ok = true;
  size_t num_learnts = 0;
  size_t num_original = 0;
  double max_learnts = 0;
  Stats stats;

  // Binary max-heap of unassigned-variable candidates keyed by activity.
  std::vector<uint32_t> heap;
  std::vector<int> heap_pos;

  int8_t value(Lit l) const {
    int8_t a = assigns[var_of(l)];
    return (l & 1) ? static_cast<int8_t>(-a) : a;
  }
  uint32_t decision_level() const { return static_cast<uint32_t>(trail_lim.size()); }

  // ---- heap ----------------------------------------------------------------
  bool heap_less(uint32_t a, uint32_t b) const { return activity[a] > activity[b]; }
  void heap_up(size_t i) {
    uint32_t v = heap[i];
    while (i > 0) {
      size_t p = (i - 1) / 2;
      if (!heap_less(v, heap[p])) break;
      heap[i] = heap[p];
      heap_pos[heap[i]] = static_cast<int>(i);
      i = p;
    }
    heap[i] = v;
    heap_pos[v] = static_cast<int>(i);
  }
  void heap_down(size_t i) {
    uint32_t v = heap[i];
    size_t n = heap.size();
    while (true) {
      size_t c = 2 * i + 1;
      if (c >= n) break;
      if (c + 1 < n && heap_less(heap[c + 1], heap[c])) ++c;
      if (!heap_less(heap[c], v)) break;
      heap[i] = heap[c];
      heap_pos[heap[i]] = static_cast<int>(i);
      i = c;
    }
    heap[i] = v;
    heap_pos[v] = static_cast<int>(i);
  }
  void heap_insert(uint32_t v) {
    if (heap_pos[v] >= 0) return;
    heap.push_back(v);
    heap_pos[v] = static_cast<int>(heap.size() - 1);
    heap_up(heap.size() - 1);
  }
  uint32_t heap_pop() {
    uint32_t top = heap[0];
    heap_pos[top] = -1;
    uint32_t last = heap.back();
    heap.pop_back();
    if (!heap.empty()) {
      heap[0] = last;
      heap_pos[last] = 0;
      heap_down(0);
    }
    return top;
  }

  // ---- basics --------------------------------------------------------------
  int new_var() {
    uint32_t v = static_cast<uint32_t>(assigns.size());
    assigns.push_back(0);
    level.push_back(0);
    reason.push_back(kNoReason);
    phase.push_back(1);
    activity.push_back(0);
    seen.push_back(0);
    heap_pos.push_back(-1);
    watches.emplace_back();
    watches.emplace_back();
    heap_insert(v);
    return static_cast<int>(v + 1);
  }

  void enqueue(Lit l, uint32_t from) {
    uint32_t v = var_of(l);
    assigns[v] = (l & 1) ? -1 : 1;
    level[v] = decision_level();
    reason[v] = from;
    trail.push_back(l);
  }

  uint32_t store_clause(Clause c) {
    uint32_t cref;
    if (!free_slots.empty()) {
      cref = free_slots.back();
      free_slots.pop_back();
      clauses[cref] = std::move(c);
    } else {
      cref = static_cast<uint32_t>(clauses.size());
      clauses.push_back(std::move(c));
    }
    const Clause& cl = clauses[cref];
    watches[neg(cl.lits[0])].push_back({cref, cl.lits[1]});
    watches[neg(cl.lits[1])].push_back({cref, cl.lits[0]});
    return cref;
  }

  void cancel_until(uint32_t lvl) {
    if (decision_level() <= lvl) return;
    for (size_t i = trail.size(); i-- > trail_lim[lvl];) {
      uint32_t v = var_of(trail[i]);
      assigns[v] = 0;
      reason[v] = kNoReason;
      phase[v] = trail[i] & 1;
      heap_insert(v);
    }
    trail.resize(trail_lim[lvl]);
    trail_lim.resize(lvl);
    qhead = trail.size();
  }

  bool add_clause(const std::vector<int>& in) {
    if (!ok) return false;
    cancel_until(0);
    std::vector<Lit> lits;
    lits.reserve(in.size());
    for (int l : in) {
      if (static_cast<size_t>(std::abs(l)) > assigns.size()) throw std::invalid_argument("literal out of range");
      lits.push_back(from_dimacs(l));
    }
    std::sort(lits.begin(), lits.end());
    std::vector<Lit> out;
    for (size_t i = 0; i < lits.size(); ++i) {
      Lit l = lits[i];
      if (value(l) == 1 || (i + 1 < lits.size() && lits[i + 1] == neg(l))) return true;  // satisfied / tautology
      if (value(l) == -1 || (!out.empty() && out.back() == l)) continue;
      out.push_back(l);
    }
    if (out.empty()) return ok = false;
    if (out.size() == 1) {
      enqueue(out[0], kNoReason);
      if (propagate() != kNoReason) ok = false;
      return ok;
    }
    Clause c;
    c.lits = std::move(out);
    store_clause(std::move(c));
    ++num_original;
    return true;
  }

  // Returns the conflicting clause or kNoReason.
  uint32_t propagate() {
    uint32_t confl = kNoReason;
    while (qhead < trail.size()) {
      Lit p = trail[qhead++];  // p became true; visit clauses watching ¬p
      ++stats.propagations;
      auto& ws = watches[p];
      size_t i = 0, j = 0, n = ws.size();
      Lit false_lit = neg(p);
      while (i < n) {
        Watcher w = ws[i];
        if (value(w.blocker) == 1) {
          ws[j++] = ws[i++];
          continue;
        }
        Clause& c = clauses[w.cref];
        if (c.deleted) {
          ++i;
          continue;
        }
        if (c.lits[0] == false_lit) std::swap(c.lits[0], c.lits[1]);
        ++i;
        Lit first = c.lits[0];
        if (first != w.blocker && value(first) == 1) {
          ws[j++] = {w.cref, first};
          continue;
        }
        bool moved = false;
        for (size_t k = 2; k < c.lits.size(); ++k) {
          if (value(c.lits[k]) != -1) {
            std::swap(c.lits[1], c.lits[k]);
            watches[neg(c.lits[1])].push_back({w.cref, first});
            moved = true;
            break;
          }
        }
        if (moved) continue;
        ws[j++] = {w.cref, first};
        if (value(first) == -1) {
          confl = w.cref;
          qhead = trail.size();
          while (i < n) ws[j++] = ws[i++];
        } else {
          enqueue(first, w.cref);
        }
      }
      ws.resize(j);
      if (confl != kNoReason) break;
    }
    return confl;
  }

  void bump_var(uint32_t v) {
    activity[v] += var_inc;
    if (activity[v] > 1e100) {
      for (auto& a : activity) a *= 1e-100;
      var_inc *= 1e-100;
    }
    if (heap_pos[v] >= 0) heap_up(static_cast<size_t>(heap_pos[v]));
  }

  void bump_clause(Clause& c) {
    c.activity += cla_inc;
    if (c.activity > 1e20) {
      for (auto& cl : clauses)
        if (cl.learnt) cl.activity *= 1e-20;
      cla_inc *= 1e-20;
    }
  }

  bool redundant(Lit l, uint32_t abstract_levels) {
    // Recursive minimization: l is implied by literals already in the clause.
    std::vector<Lit> stack{l};
    std::vector<uint32_t> cleared;
    while (!stack.empty()) {
      Lit q = stack.back();
      stack.pop_back();
      const Clause& c = clauses[reason[var_of(q)]];
      for (size_t i = 1; i < c.lits.size(); ++i) {
        Lit r = c.lits[i];
        uint32_t v = var_of(r);
        if (seen[v] || level[v] == 0) continue;
        if (reason[v] != kNoReason && ((1u << (level[v] & 31)) & abstract_levels)) {
          seen[v] = 1;
          stack.push_back(r);
          cleared.push_back(v);
        } else {
          for (uint32_t u : cleared) seen[u] = 0;
          return false;
        }
      }
    }
    for (uint32_t u : cleared) to_clear.push_back(u);
    return true;
  }
  std::vector<uint32_t> to_clear;

  void analyze(uint32_t confl, std::vector<Lit>& learnt, uint32_t& bt_level) {
    learnt.clear();
    learnt.push_back(0);
    int pending = 0;
    Lit p = 0;
    bool first = true;
    size_t index = trail.size();
    do {
      Clause& c = clauses[confl];
      if (c.learnt) bump_clause(c);
      for (size_t i = first ? 0 : 1; i < c.lits.size(); ++i) {
        Lit q = c.lits[i];
        uint32_t v = var_of(q);
        if (seen[v] || level[v] == 0) continue;
        bump_var(v);
        seen[v] = 1;
        if (level[v] >= decision_level())
          ++pending;
        else
          learnt.push_back(q);
      }
      first = false;
      while (!seen[var_of(trail[--index])]) {
      }
      p = trail[index];
      confl = reason[var_of(p)];
      seen[var_of(p)] = 0;
      --pending;
      if (pending > 0 && confl != kNoReason) {
        // The reason clause has p at position 0 by construction.
        Clause& rc = clauses[confl];
        if (rc.lits[0] != p) {
          auto it = std::find(rc.lits.begin(), rc.lits.end(), p);
          std::swap(*it, rc.lits[0]);
        }
      }
    } while (pending > 0);
    learnt[0] = neg(p);

    uint32_t abstract_levels = 0;
    for (size_t i = 1; i < learnt.size(); ++i) abstract_levels |= 1u << (level[var_of(learnt[i])] & 31);
    to_clear.clear();
    for (size_t i = 1; i < learnt.size(); ++i) to_clear.push_back(var_of(learnt[i]));
    size_t j = 1;
    for (size_t i = 1; i < learnt.size(); ++i) {
      Lit l = learnt[i];
      if (reason[var_of(l)] == kNoReason || !redundant(l, abstract_levels)) learnt[j++] = l;
    }
    learnt.resize(j);
    for (uint32_t v : to_clear) seen[v] = 0;

    bt_level = 0;
    if (learnt.size() > 1) {
      size_t max_i = 1;
      for (size_t i = 2; i < learnt.size(); ++i)
        if (level[var_of(learnt[i])] > level[var_of(learnt[max_i])]) max_i = i;
      std::swap(learnt[1], learnt[max_i]);
      bt_level = level[var_of(learnt[1])];
    }
  }

  bool locked(uint32_t cref) const {
    const Clause& c = clauses[cref];
    uint32_t v = var_of(c.lits[0]);
    return reason[v] == cref && value(c.lits[0]) == 1;
  }

  void reduce_db() {
    std::vector<uint32_t> learnts;
    for (uint32_t i = 0; i < clauses.size(); ++i)
      if (clauses[i].learnt && !clauses[i].deleted) learnts.push_back(i);
    std::sort(learnts.begin(), learnts.end(), [&](uint32_t a, uint32_t b) {
      bool ba = clauses[a].lits.size() == 2, bb = clauses[b].lits.size() == 2;
      if (ba != bb) return bb;
      return clauses[a].activity < clauses[b].activity;
    });
    double limit = cla_inc / static_cast<double>(std::max<size_t>(learnts.size(), 1));
    size_t removed = 0;
    for (size_t i = 0; i < learnts.size(); ++i) {
      Clause& c = clauses[learnts[i]];
      if (c.lits.size() > 2 && !locked(learnts[i]) && (i < learnts.size() / 2 || c.activity < limit)) {
        detach(learnts[i]);
        ++removed;
      }
    }
    num_learnts -= removed;
  }

  void detach(uint32_t cref) {
    Clause& c = clauses[cref];
    for (int k = 0; k < 2; ++k) {
      auto& ws = watches[neg(c.lits[k])];
      for (size_t i = 0; i < ws.size(); ++i)
        if (ws[i].cref == cref) {
          ws[i] = ws.back();
          ws.pop_back();
          break;
        }
    }
    c.deleted = true;
    c.lits.clear();
    c.lits.shrink_to_fit();
    free_slots.push_back(cref);
  }

  Lit pick_branch() {
    while (!heap.empty()) {
      uint32_t v = heap_pop();
      if (assigns[v] == 0) {
        ++stats.decisions;
        return 2 * v + phase[v];
      }
    }
    return UINT32_MAX;
  }

  Verdict search(uint64_t conflict_limit, const std::vector<Lit>& assumptions, uint64_t& budget_left) {
    uint64_t conflicts = 0;
    std::vector<Lit> learnt;
    while (true) {
      uint32_t confl = propagate();
      if (confl != kNoReason) {
        ++stats.conflicts;
        ++conflicts;
        if (budget_left == 0) return Verdict::Unknown;
        --budget_left;
        if (decision_level() == 0) {
          ok = false;
          return Verdict::Unsat;
        }
        uint32_t bt;
        analyze(confl, learnt, bt);
        cancel_until(bt);
        if (learnt.size() == 1) {
          enqueue(learnt[0], kNoReason);
        } else {
          Clause c;
          c.lits = learnt;
          c.learnt = true;
          uint32_t cref = store_clause(std::move(c));
          bump_clause(clauses[cref]);
          ++num_learnts;
          enqueue(learnt[0], cref);
        }
        var_inc /= 0.95;
        cla_inc /= 0.999;
        continue;
      }
      if (conflicts >= conflict_limit) {
        cancel_until(0);
        return Verdict::Unknown;  // restart
      }
      if (static_cast<double>(num_learnts) - static_cast<double>(trail.size()) >= max_learnts) reduce_db();
      Lit next = UINT32_MAX;
      while (decision_level() < assumptions.size()) {
        Lit a = assumptions[decision_level()];
        if (value(a) == 1) {
          trail_lim.push_back(trail.size());  // dummy level
        } else if (value(a) == -1) {
          return Verdict::Unsat;
        } else {
          next = a;
          break;
        }
      }
      if (next == UINT32_MAX) {
        next = pick_branch();
        if (next == UINT32_MAX) return Verdict::Sat;
      }
      trail_lim.push_back(trail.size());
      enqueue(next, kNoReason);
    }
  }

  Verdict solve(const std::vector<int>& assumptions_in, uint64_t budget) {
    ++stats.solves;
    model_cache.clear();
    if (!ok) return Verdict::Unsat;
    cancel_until(0);
    std::vector<Lit> assumptions;
    for (int a : assumptions_in) {
      if (static_cast<size_t>(std::abs(a)) > assigns.size()) throw std::invalid_argument("assumption out of range");
      assumptions.push_back(from_dimacs(a));
    }
    if (propagate() != kNoReason) {
      ok = false;
      return Verdict::Unsat;
    }
    max_learnts = std::max<double>(static_cast<double>(num_original) / 3.0, 2000.0);
    uint64_t budget_left = budget;
    for (uint64_t restart = 0;; ++restart) {
      uint64_t limit = static_cast<uint64_t>(luby(2.0, restart) * 100.0);
      Verdict v = search(limit, assumptions, budget_left);
      if (v == Verdict::Sat) {
        model_cache.assign(assigns.begin(), assigns.end());
        cancel_until(0);
        return v;
      }
      if (v == Verdict::Unsat) {
        cancel_until(0);
        return v;
      }
      if (budget_left == 0) {
        cancel_until(0);
        return Verdict::Unknown;
      }
      ++stats.restarts;
      max_learnts *= 1.05;
    }
  }

  std::vector<int8_t> model_cache;
};

Solver::Solver() : impl_(new Impl) {}
Solver::~Solver() { delete impl_; }
int Solver::new_var() { return impl_->new_var(); }
int Solver::num_vars() const { return static_cast<int>(impl_->assigns.size()); }
bool Solver::add_clause(const std::vector<int>& lits) { return impl_->add_clause(lits); }
Verdict Solver::solve(const std::vector<int>& assumptions, uint64_t budget) { return impl_->solve(assumptions, budget); }
bool Solver::model_value(int var) const {
  size_t v = static_cast<size_t>(var - 1);
  return v < impl_->model_cache.size() && impl_->model_cache[v] == 1;
}
const Stats& Solver::stats() const { return impl_->stats; }

SatResult sat_solve(const Cnf& f, const std::vector<int>& assumptions, uint64_t budget) {
  Solver s;
  for (int i = 0; i < f.num_vars; ++i) s.new_var();
  for (const auto& c : f.clauses) {
    if (c.empty()) throw std::invalid_argument("empty clause");
    s.add_clause(c);
  }
  SatResult r;
  r.verdict = s.solve(assumptions, budget);
  if (r.verdict == Verdict::Sat) {
    r.model.assign(static_cast<size_t>(f.num_vars) + 1, false);
    for (int v = 1; v <= f.num_vars; ++v) r.model[static_cast<size_t>(v)] = s.model_value(v);
  }
  r.stats = s.stats();
  return r;
}

}  // namespace modbench::sat

#pragma once

// `cwb intervals`: per-location interval tables and assert verdicts.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cwb/bounds/exhaustive.hpp"
#include "cwb/bounds/extract.hpp"
#include "cwb/bounds/oracle.hpp"
#include "cwb/bounds/policy.hpp"
#include "cwb/intervals/analyzer.hpp"
#include "cwb/ir/cfg.hpp"
#include "cwb/ir/parser.hpp"
#include "cwb/report/common.hpp"
#include "cwb/symrewrite/combined.hpp"

namespace cwb::report {

struct IntervalRequest {
  std::string input;
  std::string method = "widen-narrow";  // widen | widen-narrow | policy | exhaustive | oracle | compare
  unsigned widen_delay = 0;
  unsigned narrow_passes = 1;           // used by widen-narrow
  std::string rewrites = "off";         // off | full | truncated:d
  std::vector<std::string> pre;         // "var=lo:hi"
  std::string oracle_range = "-128:1100";
  size_t oracle_budget = 1'000'000;
  size_t cap = 20;
  Format format = Format::Text;
  bool wall_time = false;
};

inline const std::vector<std::string>& interval_methods() {
  static const std::vector<std::string> m{"widen", "widen-narrow", "policy", "exhaustive", "oracle", "compare"};
  return m;
}

/// "-oo", "+oo" or an integer.
inline Bound parse_bound(const std::string& s) {
  if (s == "-oo") return Bound::neg_inf();
  if (s == "+oo" || s == "oo") return Bound::pos_inf();
  int64_t v = 0;
  const char* first = s.data();
  if (!s.empty() && s.front() == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) throw InputError("bad bound '" + s + "'");
  return Bound(v);
}

/// "lo:hi", or a single value.
inline Interval parse_interval(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) {
    const Bound b = parse_bound(s);
    if (!b.is_finite()) throw InputError("bad range '" + s + "'");
    return Interval::point(b.value());
  }
  const Bound lo = parse_bound(s.substr(0, colon));
  const Bound hi = parse_bound(s.substr(colon + 1));
  if (lo == Bound::pos_inf() || hi == Bound::neg_inf() || hi < lo) throw InputError("empty range '" + s + "'");
  return Interval(lo, hi);
}

/// "var=lo:hi" pairs.
inline std::map<std::string, Interval> parse_preconditions(const std::vector<std::string>& pre) {
  std::map<std::string, Interval> out;
  for (const auto& p : pre) {
    const auto eq = p.find('=');
    if (eq == std::string::npos || eq == 0) throw InputError("precondition '" + p + "' is not of the form var=lo:hi");
    const std::string var = p.substr(0, eq);
    if (out.count(var)) throw InputError("duplicate precondition for '" + var + "'");
    out.emplace(var, parse_interval(p.substr(eq + 1)));
  }
  return out;
}

inline symrewrite::RewriteMode parse_rewrite_mode(const std::string& s) {
  if (s == "full") return symrewrite::RewriteMode::full();
  const std::string prefix = "truncated:";
  if (s.rfind(prefix, 0) == 0) {
    const Bound d = parse_bound(s.substr(prefix.size()));
    if (!d.is_finite() || d.value() < 1) throw InputError("truncation depth must be a positive integer");
    return symrewrite::RewriteMode::truncated_to(static_cast<size_t>(d.value()));
  }
  throw InputError("unknown rewrite mode '" + s + "' (expected off, full or truncated:d)");
}

namespace detail {

struct MethodRun {
  std::string name;
  std::optional<std::string> unavailable;  // why the method could not run
  std::vector<AbstractEnv> envs;
  std::map<ir::AssertId, bool> proved;
};

struct IntervalContext {
  const IntervalRequest& req;
  const ir::Program& program;
  const ir::Cfg& g;
  std::map<std::string, Interval> pre;
  Phases& phases;
  bool prefix_phases = false;

  std::string phase(const std::string& method, const std::string& p) const {
    return prefix_phases ? method + "." + p : p;
  }

  AbstractEnv entry_env() const {
    AbstractEnv env;
    for (const auto& [v, i] : pre) env.set(v, i);
    return env;
  }
};

inline std::map<ir::AssertId, bool> verdict_map(const std::vector<AssertVerdict>& vs) {
  std::map<ir::AssertId, bool> out;
  for (const auto& v : vs) out[v.id] = v.proved;
  return out;
}

inline MethodRun run_widening(const IntervalContext& ctx, const std::string& method) {
  IntervalOptions opts;
  opts.widen_delay = ctx.req.widen_delay;
  opts.narrow_passes = method == "widen" ? 0 : ctx.req.narrow_passes;
  MethodRun run{method, std::nullopt, {}, {}};
  if (ctx.req.rewrites == "off") {
    const auto res = ctx.phases.time(ctx.phase(method, "iterate"), [&] { return analyze_intervals(ctx.g, ctx.entry_env(), opts); });
    ctx.phases.steps(ctx.phase(method, "iterate"), res.updates);
    ctx.phases.steps(ctx.phase(method, "narrow"), res.narrowing_updates);
    run.envs = res.envs;
    run.proved = verdict_map(res.asserts);
  } else {
    symrewrite::CombinedOptions co;
    co.iteration = opts;
    co.mode = parse_rewrite_mode(ctx.req.rewrites);
    const auto res = ctx.phases.time(ctx.phase(method, "iterate"), [&] { return symrewrite::analyze_combined(ctx.g, ctx.entry_env(), co); });
    ctx.phases.steps(ctx.phase(method, "iterate"), res.updates);
    ctx.phases.steps(ctx.phase(method, "narrow"), res.narrowing_updates);
    run.envs = res.envs;
    run.proved = verdict_map(res.asserts);
  }
  return run;
}

inline MethodRun run_exact(const IntervalContext& ctx, const std::string& method) {
  if (ctx.req.rewrites != "off") throw InputError("--rewrites only applies to the widen and widen-narrow methods");
  if (ctx.g.variables.size() != 1)
    throw bounds::UnsupportedConstruct("method " + method + " needs a program with exactly one variable (found " +
                                       std::to_string(ctx.g.variables.size()) + ")");
  const std::string v = ctx.g.variables.front();
  const auto it = ctx.pre.find(v);
  const Interval entry = it == ctx.pre.end() ? Interval::top() : it->second;
  const auto ex = ctx.phases.time(ctx.phase(method, "extract"), [&] { return bounds::extract_upper_bounds(ctx.g, v, entry); });
  ctx.phases.steps(ctx.phase(method, "extract"), ex.system.size());
  bounds::Valuation val;
  if (method == "policy") {
    const auto res = ctx.phases.time(ctx.phase(method, "solve"), [&] { return bounds::solve_policy_iteration_traced(ex.system); });
    ctx.phases.steps(ctx.phase(method, "solve"), res.kleene_steps);
    ctx.phases.steps(ctx.phase(method, "rounds"), res.trace.size());
    val = res.values;
  } else {
    bounds::ExhaustiveStats st;
    val = ctx.phases.time(ctx.phase(method, "solve"), [&] { return bounds::solve_exhaustive(ex.system, {ctx.req.cap}, &st); });
    ctx.phases.steps(ctx.phase(method, "solve"), st.selections);
    ctx.phases.steps(ctx.phase(method, "candidates"), st.candidates);
  }
  MethodRun run{method, std::nullopt, {}, {}};
  for (ir::LocId l = 0; l < ctx.g.num_locations; ++l) {
    const Interval i = ex.interval_at(val, l);
    AbstractEnv env = i.is_bottom() ? AbstractEnv::unreachable() : AbstractEnv();
    env.set(v, i);
    run.envs.push_back(env);
  }
  run.proved = verdict_map(check_asserts(ctx.g, run.envs));
  return run;
}

inline MethodRun run_oracle(const IntervalContext& ctx) {
  bounds::OracleOptions opts;
  const Interval r = parse_interval(ctx.req.oracle_range);
  if (!r.lo().is_finite() || !r.hi().is_finite()) throw InputError("--oracle-range must be finite");
  opts.range = {r.lo().value(), r.hi().value()};
  opts.budget = ctx.req.oracle_budget;

  std::map<std::string, bounds::ValueRange> entry;
  for (const auto& d : ctx.program.decls) {
    const auto it = ctx.pre.find(d.name);
    if (it != ctx.pre.end()) {
      if (!it->second.lo().is_finite() || !it->second.hi().is_finite())
        throw InputError("the oracle needs a finite --pre range for '" + d.name + "'");
      entry[d.name] = {it->second.lo().value(), it->second.hi().value()};
    } else if (d.init) {
      entry[d.name] = {0, 0};  // overwritten by the initializer
    } else {
      throw InputError("the oracle needs a --pre range for '" + d.name + "'");
    }
  }
  const auto stores = ctx.phases.time("oracle", [&] { return bounds::explore_stores(ctx.g, entry, opts); });
  size_t total = 0;
  MethodRun run{"oracle", std::nullopt, {}, {}};
  for (const auto& set : stores) {
    total += set.size();
    if (set.empty()) {
      run.envs.push_back(AbstractEnv::unreachable());
      continue;
    }
    AbstractEnv env;
    for (size_t i = 0; i < ctx.g.variables.size(); ++i) {
      std::set<int64_t> vals;
      for (const auto& s : set) vals.insert(s[i]);
      env.set(ctx.g.variables[i], bounds::hull(vals));
    }
    run.envs.push_back(env);
  }
  ctx.phases.steps("oracle", total);
  for (const auto& a : ctx.g.assert_sites()) {
    const auto& cond = std::get<ir::AssertLabel>(ctx.g.edges[a.edge].label).cond;
    bool ok = true;
    for (const auto& s : stores[a.source]) ok = ok && bounds::detail::holds_concrete(cond, ctx.g, s);
    run.proved[a.id] = ok;
  }
  return run;
}

inline MethodRun run_method(const IntervalContext& ctx, const std::string& method) {
  if (method == "widen" || method == "widen-narrow") return run_widening(ctx, method);
  if (method == "policy" || method == "exhaustive") return run_exact(ctx, method);
  return run_oracle(ctx);
}

inline std::string line_cell(int line) { return line > 0 ? std::to_string(line) : "-"; }

inline std::string interval_cell(const AbstractEnv& env, const std::string& v) {
  return env.is_unreachable() ? "bot" : env.get(v).str();
}

inline Json env_json(const AbstractEnv& env, const std::vector<std::string>& vars) {
  Json j = Json::object();
  for (const auto& v : vars) j[v] = env.is_unreachable() ? Json(nullptr) : to_json(env.get(v));
  return j;
}

// A location where `claimed` excludes something `truth` contains.
struct Violation {
  ir::LocId loc;
  std::string var;
  std::string lhs;
  std::string rhs;
};

inline std::vector<Violation> not_contained(const ir::Cfg& g, const MethodRun& inner, const MethodRun& outer) {
  std::vector<Violation> out;
  for (ir::LocId l = 0; l < g.num_locations; ++l)
    for (const auto& v : g.variables) {
      const Interval a = inner.envs[l].get(v);
      const Interval b = outer.envs[l].get(v);
      if (!a.leq(b)) out.push_back({l, v, interval_cell(inner.envs[l], v), interval_cell(outer.envs[l], v)});
    }
  return out;
}

}  // namespace detail

inline Report run_intervals(const IntervalRequest& req) {
  Report rep;
  try {
    if (std::find(interval_methods().begin(), interval_methods().end(), req.method) == interval_methods().end())
      throw InputError("unknown interval method '" + req.method + "'");
    if (req.rewrites != "off") parse_rewrite_mode(req.rewrites);

    const ir::Program program = ir::parse_program(read_file(req.input));
    const ir::Cfg g = ir::build_cfg(program);
    Phases phases(req.wall_time);
    detail::IntervalContext ctx{req, program, g, parse_preconditions(req.pre), phases, req.method == "compare"};
    for (const auto& [v, i] : ctx.pre)
      if (std::find(g.variables.begin(), g.variables.end(), v) == g.variables.end())
        throw InputError("precondition for undeclared variable '" + v + "'");

    std::vector<detail::MethodRun> runs;
    if (req.method == "compare") {
      for (const std::string m : {"widen", "widen-narrow", "policy", "exhaustive", "oracle"}) {
        const bool rewrites_apply = m == "widen" || m == "widen-narrow";
        try {
          if (!rewrites_apply && req.rewrites != "off") {
            IntervalRequest plain = req;
            plain.rewrites = "off";
            detail::IntervalContext c2{plain, program, g, ctx.pre, phases, true};
            runs.push_back(detail::run_method(c2, m));
          } else {
            runs.push_back(detail::run_method(ctx, m));
          }
        } catch (const bounds::UnsupportedConstruct& e) {
          runs.push_back({m, e.what(), {}, {}});
        } catch (const bounds::CapExceeded& e) {
          runs.push_back({m, e.what(), {}, {}});
        } catch (const bounds::OracleRangeExceeded& e) {
          runs.push_back({m, e.what(), {}, {}});
        } catch (const bounds::OracleBudgetExceeded& e) {
          runs.push_back({m, e.what(), {}, {}});
        } catch (const InputError& e) {
          if (m != "oracle") throw;
          runs.push_back({m, e.what(), {}, {}});
        }
      }
    } else {
      runs.push_back(detail::run_method(ctx, req.method));
    }

    const auto loop_heads = ir::depth_first(g).is_loop_head;
    const auto asserts = g.assert_sites();

    // compare-mode checks
    std::vector<std::pair<std::string, std::vector<detail::Violation>>> checks;
    const detail::MethodRun* oracle = nullptr;
    const detail::MethodRun* widen_narrow = nullptr;
    std::vector<const detail::MethodRun*> exact;
    for (const auto& r : runs) {
      if (r.unavailable) continue;
      if (r.name == "oracle") oracle = &r;
      if (r.name == "widen-narrow") widen_narrow = &r;
      if (r.name == "policy" || r.name == "exhaustive") exact.push_back(&r);
    }
    if (req.method == "compare") {
      if (oracle)
        for (const auto& r : runs)
          if (!r.unavailable && &r != oracle)
            checks.push_back({"oracle within " + r.name, detail::not_contained(g, *oracle, r)});
      if (widen_narrow)
        for (const auto* r : exact) checks.push_back({r->name + " within widen-narrow", detail::not_contained(g, *r, *widen_narrow)});
      if (exact.size() == 2) {
        auto both = detail::not_contained(g, *exact[0], *exact[1]);
        auto back = detail::not_contained(g, *exact[1], *exact[0]);
        both.insert(both.end(), back.begin(), back.end());
        checks.push_back({"policy equals exhaustive", both});
      }
    }

    // exit code: single method, any unproved assert; compare, an assert no
    // abstract method proves
    bool unproved = false;
    for (const auto& a : asserts) {
      bool some = false;
      bool all = true;
      for (const auto& r : runs) {
        if (r.unavailable || (req.method == "compare" && r.name == "oracle")) continue;
        some = some || r.proved.at(a.id);
        all = all && r.proved.at(a.id);
      }
      unproved = unproved || (req.method == "compare" ? !some : !all);
    }

    auto verdict = [](bool p) { return p ? "proved" : "unproved"; };
    const std::string rewrites_note = req.rewrites;

    if (req.format == Format::Json) {
      Json j = header_json("intervals", req.method, req.input);
      Json opts;
      opts["widen_delay"] = req.widen_delay;
      opts["narrow_passes"] = req.narrow_passes;
      opts["rewrites"] = rewrites_note;
      Json pre = Json::object();
      for (const auto& [v, i] : ctx.pre) pre[v] = to_json(i);
      opts["pre"] = pre;
      j["options"] = opts;
      Json results = Json::array();
      for (ir::LocId l = 0; l < g.num_locations; ++l) {
        Json e;
        e["location"] = l;
        e["name"] = g.location_names[l];
        e["line"] = g.location_lines[l] > 0 ? Json(g.location_lines[l]) : Json(nullptr);
        e["loop_head"] = static_cast<bool>(loop_heads[l]);
        if (runs.size() == 1) {
          e["method"] = runs.front().name;
          e["reachable"] = !runs.front().envs[l].is_unreachable();
          e["intervals"] = detail::env_json(runs.front().envs[l], g.variables);
        } else {
          Json by = Json::object();
          for (const auto& r : runs)
            if (!r.unavailable) by[r.name] = detail::env_json(r.envs[l], g.variables);
          e["intervals"] = by;
        }
        results.push_back(e);
      }
      j["results"] = results;
      Json ja = Json::array();
      for (const auto& a : asserts) {
        Json e;
        e["assert"] = a.id;
        e["line"] = a.pos.line > 0 ? Json(a.pos.line) : Json(nullptr);
        e["condition"] = ir::to_string(std::get<ir::AssertLabel>(g.edges[a.edge].label).cond);
        if (runs.size() == 1) {
          e["method"] = runs.front().name;
          e["verdict"] = verdict(runs.front().proved.at(a.id));
        } else {
          Json by = Json::object();
          for (const auto& r : runs)
            if (!r.unavailable) by[r.name] = verdict(r.proved.at(a.id));
          e["verdicts"] = by;
        }
        ja.push_back(e);
      }
      j["asserts"] = ja;
      if (req.method == "compare") {
        Json na = Json::object();
        for (const auto& r : runs)
          if (r.unavailable) na[r.name] = *r.unavailable;
        j["unavailable"] = na;
        Json jc = Json::array();
        for (const auto& [title, vs] : checks) {
          Json c;
          c["check"] = title;
          c["ok"] = vs.empty();
          Json bad = Json::array();
          for (const auto& v : vs) {
            Json b;
            b["location"] = v.loc;
            b["variable"] = v.var;
            b["inner"] = v.lhs;
            b["outer"] = v.rhs;
            bad.push_back(b);
          }
          c["violations"] = bad;
          jc.push_back(c);
        }
        j["checks"] = jc;
      }
      j["timings"] = phases.json();
      rep.out = j.dump(2) + "\n";
    } else {
      std::string out = "intervals  input=" + req.input + "  method=" + req.method +
                        "  widen-delay=" + std::to_string(req.widen_delay) +
                        "  narrow-passes=" + std::to_string(req.narrow_passes) + "  rewrites=" + rewrites_note;
      for (const auto& [v, i] : ctx.pre) out += "  pre:" + v + "=" + i.str();
      out += "\n";
      if (runs.size() == 1) {
        std::vector<std::string> header{"loc", "name", "line", "head"};
        header.insert(header.end(), g.variables.begin(), g.variables.end());
        TextTable t(header);
        for (ir::LocId l = 0; l < g.num_locations; ++l) {
          std::vector<std::string> row{std::to_string(l), g.location_names[l], detail::line_cell(g.location_lines[l]),
                                       loop_heads[l] ? "*" : ""};
          for (const auto& v : g.variables) row.push_back(detail::interval_cell(runs.front().envs[l], v));
          t.add(std::move(row));
        }
        out += t.render();
      } else {
        std::vector<std::string> header{"loc", "name", "line", "head", "var"};
        for (const auto& r : runs)
          if (!r.unavailable) header.push_back(r.name);
        TextTable t(header);
        for (ir::LocId l = 0; l < g.num_locations; ++l)
          for (const auto& v : g.variables) {
            std::vector<std::string> row{std::to_string(l), g.location_names[l], detail::line_cell(g.location_lines[l]),
                                         loop_heads[l] ? "*" : "", v};
            for (const auto& r : runs)
              if (!r.unavailable) row.push_back(detail::interval_cell(r.envs[l], v));
            t.add(std::move(row));
          }
        out += t.render();
      }
      if (!asserts.empty()) {
        out += "\n";
        std::vector<std::string> header{"assert", "line", "condition"};
        for (const auto& r : runs)
          if (!r.unavailable) header.push_back(runs.size() == 1 ? "verdict" : r.name);
        TextTable t(header);
        for (const auto& a : asserts) {
          std::vector<std::string> row{std::to_string(a.id), detail::line_cell(a.pos.line),
                                       ir::to_string(std::get<ir::AssertLabel>(g.edges[a.edge].label).cond)};
          for (const auto& r : runs)
            if (!r.unavailable) row.push_back(verdict(r.proved.at(a.id)));
          t.add(std::move(row));
        }
        out += t.render();
      }
      if (req.method == "compare") {
        out += "\n";
        for (const auto& r : runs)
          if (r.unavailable) out += "not run: " + r.name + ": " + *r.unavailable + "\n";
        for (const auto& [title, vs] : checks) {
          out += title + ": " + (vs.empty() ? "ok" : std::to_string(vs.size()) + " violation(s)") + "\n";
          for (const auto& v : vs)
            out += "  loc " + std::to_string(v.loc) + " " + v.var + ": " + v.lhs + " not within " + v.rhs + "\n";
        }
      }
      out += phases.text();
      rep.out = out;
    }
    rep.exit_code = unproved ? kUnproved : kOk;
  } catch (const bounds::OracleBudgetExceeded& e) {
    rep.err = std::string("cwb: ") + e.what() + "\n";
    rep.exit_code = kBudgetExceeded;
  } catch (const bounds::OracleRangeExceeded& e) {
    rep.err = std::string("cwb: ") + e.what() + "\n";
    rep.exit_code = kBudgetExceeded;
  } catch (const bounds::CapExceeded& e) {
    rep.err = std::string("cwb: ") + e.what() + "\n";
    rep.exit_code = kBudgetExceeded;
  } catch (const ir::ParseError& e) {
    rep.err = "cwb: " + req.input + ":" + e.what() + "\n";
    rep.exit_code = kInputError;
  } catch (const std::exception& e) {
    rep.err = std::string("cwb: ") + e.what() + "\n";
    rep.exit_code = kInputError;
  }
  return rep;
}

}  // namespace cwb::report

#pragma once

// `cwb cache`: per-site classification tables.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cwb/cache/approx.hpp"
#include "cwb/cache/concrete.hpp"
#include "cwb/cache/exact.hpp"
#include "cwb/ir/access_graph.hpp"
#include "cwb/ir/cfg.hpp"
#include "cwb/ir/parser.hpp"
#include "cwb/report/common.hpp"

namespace cwb::report {

struct CacheRequest {
  std::string input;
  unsigned assoc = 4;
  std::string method = "pipeline";  // approx | exact | oracle | pipeline | compare
  cache::InitialCachePolicy init = cache::InitialCachePolicy::Empty;
  Format format = Format::Text;
  size_t budget = cache::kDefaultStateBudget;
  bool wall_time = false;
};

inline const std::vector<std::string>& cache_methods() {
  static const std::vector<std::string> m{"approx", "exact", "oracle", "pipeline", "compare"};
  return m;
}

/// `.acg` files are access graphs; anything else is a toy program whose
/// guards and assignments are erased.
inline ir::Cfg load_cache_graph(const std::string& path) {
  const std::string text = read_file(path);
  if (ends_with(path, ".acg")) return ir::parse_access_graph(text);
  return ir::erase_guards(ir::build_cfg(ir::parse_program(text)));
}

namespace detail {

struct SiteRow {
  ir::AccessSite site;
  std::map<std::string, cache::Classification> verdicts;
  std::optional<cache::Method> pipeline_tag;
};

// Approx is consistent with the oracle unless it commits to a different answer.
inline bool approx_consistent(cache::Classification approx, cache::Classification oracle) {
  return approx == cache::Classification::Unknown || approx == oracle;
}

inline std::string site_line(const ir::Cfg& g, const ir::AccessSite& s) {
  const int line = g.edges[s.edge].pos.line;
  return line > 0 ? std::to_string(line) : "-";
}

}  // namespace detail

inline Report run_cache(const CacheRequest& req) {
  Report rep;
  try {
    std::vector<std::string> methods;
    if (req.method == "compare") {
      methods = {"approx", "exact", "oracle", "pipeline"};
    } else if (std::find(cache_methods().begin(), cache_methods().end(), req.method) != cache_methods().end()) {
      methods = {req.method};
    } else {
      throw InputError("unknown cache method '" + req.method + "'");
    }
    if (req.assoc == 0) throw InputError("associativity must be at least 1");

    const ir::Cfg g = load_cache_graph(req.input);
    Phases phases(req.wall_time);
    std::vector<detail::SiteRow> rows;
    for (const auto& s : g.access_sites()) rows.push_back({s, {}, std::nullopt});

    for (const auto& m : methods) {
      cache::SiteClassification cls;
      if (m == "approx") {
        size_t updates = 0;
        cls = phases.time("approx", [&] { return cache::classify_approx(g, req.assoc, req.init, &updates); });
        phases.steps("approx", updates);
      } else if (m == "exact") {
        cache::ExactStats st;
        cls = phases.time("exact", [&] { return cache::classify_exact(g, req.assoc, req.init, &st); });
        phases.steps("exact", st.updates);
      } else if (m == "oracle") {
        const auto states = phases.time("oracle", [&] { return cache::collect_states(g, req.assoc, req.init, req.budget); });
        size_t total = 0;
        for (const auto& s : states) total += s.size();
        phases.steps("oracle", total);
        for (const auto& s : g.access_sites()) cls[s.id] = cache::classify_states(states[s.source], s.block);
      } else {
        const auto res = phases.time("pipeline", [&] { return cache::classify_pipeline(g, req.assoc, req.init); });
        phases.steps("pipeline", res.approx_updates + res.exact.updates);
        for (auto& r : rows) r.pipeline_tag = res.sites.at(r.site.id).method;
        for (const auto& [id, v] : res.sites) cls[id] = v.classification;
      }
      for (auto& r : rows) r.verdicts[m] = cls.at(r.site.id);
    }

    // cross-checks, compare mode only
    std::vector<const detail::SiteRow*> approx_vs_exact, exact_vs_oracle, approx_vs_oracle;
    if (req.method == "compare") {
      for (const auto& r : rows) {
        const auto a = r.verdicts.at("approx");
        const auto e = r.verdicts.at("exact");
        const auto o = r.verdicts.at("oracle");
        if (a != e) approx_vs_exact.push_back(&r);
        if (e != o) exact_vs_oracle.push_back(&r);
        if (!detail::approx_consistent(a, o)) approx_vs_oracle.push_back(&r);
      }
    }

    if (req.format == Format::Json) {
      Json j = header_json("cache", req.method, req.input);
      j["assoc"] = req.assoc;
      j["init"] = cache::to_string(req.init);
      Json results = Json::array();
      for (const auto& r : rows) {
        Json e;
        e["site"] = r.site.id;
        e["block"] = g.blocks.at(r.site.block);
        e["source"] = g.location_names.at(r.site.source);
        const int line = g.edges[r.site.edge].pos.line;
        e["line"] = line > 0 ? Json(line) : Json(nullptr);
        if (methods.size() == 1) {
          e["verdict"] = cache::to_string(r.verdicts.at(methods.front()));
          e["method"] = r.pipeline_tag ? cache::to_string(*r.pipeline_tag) : req.method;
        } else {
          Json v;
          for (const auto& m : methods) v[m] = cache::to_string(r.verdicts.at(m));
          e["verdicts"] = v;
          if (r.pipeline_tag) e["pipeline_method"] = cache::to_string(*r.pipeline_tag);
        }
        results.push_back(e);
      }
      j["results"] = results;
      if (req.method == "compare") {
        auto sites = [](const std::vector<const detail::SiteRow*>& v) {
          Json a = Json::array();
          for (const auto* r : v) a.push_back(r->site.id);
          return a;
        };
        Json c;
        c["approx_vs_exact"] = sites(approx_vs_exact);
        c["exact_vs_oracle"] = sites(exact_vs_oracle);
        c["approx_unsound"] = sites(approx_vs_oracle);
        j["disagreements"] = c;
      }
      j["timings"] = phases.json();
      rep.out = j.dump(2) + "\n";
    } else {
      std::string out = "cache  input=" + req.input + "  assoc=" + std::to_string(req.assoc) +
                        "  init=" + cache::to_string(req.init) + "  method=" + req.method + "\n";
      std::vector<std::string> header{"site", "block", "source", "line"};
      if (methods.size() == 1) {
        header.push_back("verdict");
        header.push_back("method");
      } else {
        header.insert(header.end(), methods.begin(), methods.end());
        header.push_back("tag");
      }
      TextTable t(header);
      for (const auto& r : rows) {
        std::vector<std::string> cells{std::to_string(r.site.id), g.blocks.at(r.site.block),
                                       g.location_names.at(r.site.source), detail::site_line(g, r.site)};
        for (const auto& m : methods) cells.push_back(cache::to_string(r.verdicts.at(m)));
        if (methods.size() == 1) {
          cells.push_back(r.pipeline_tag ? cache::to_string(*r.pipeline_tag) : req.method);
        } else {
          cells.push_back(r.pipeline_tag ? cache::to_string(*r.pipeline_tag) : "-");
        }
        t.add(std::move(cells));
      }
      out += t.render();
      if (req.method == "compare") {
        auto list = [&](const std::string& title, const std::vector<const detail::SiteRow*>& v, const std::string& a,
                        const std::string& b) {
          out += title + ": " + (v.empty() ? "none" : std::to_string(v.size())) + "\n";
          for (const auto* r : v)
            out += "  site " + std::to_string(r->site.id) + ": " + a + "=" + cache::to_string(r->verdicts.at(a)) +
                   " " + b + "=" + cache::to_string(r->verdicts.at(b)) + "\n";
        };
        list("approx vs exact", approx_vs_exact, "approx", "exact");
        list("exact vs oracle", exact_vs_oracle, "exact", "oracle");
        list("approx contradicting oracle", approx_vs_oracle, "approx", "oracle");
      }
      out += phases.text();
      rep.out = out;
    }
  } catch (const cache::BudgetExceeded& e) {
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

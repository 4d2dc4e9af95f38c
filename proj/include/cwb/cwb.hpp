#pragma once

#include "cwb/antichain.hpp"
#include "cwb/bounds/exhaustive.hpp"
#include "cwb/bounds/extract.hpp"
#include "cwb/bounds/oracle.hpp"
#include "cwb/bounds/policy.hpp"
#include "cwb/bounds/system.hpp"
#include "cwb/cache/approx.hpp"
#include "cwb/cache/concrete.hpp"
#include "cwb/cache/exact.hpp"
#include "cwb/fixpoint.hpp"
#include "cwb/intervals/analyzer.hpp"
#include "cwb/ir/access_graph.hpp"
#include "cwb/ir/cfg.hpp"
#include "cwb/ir/parser.hpp"
#include "cwb/report/cache_report.hpp"
#include "cwb/report/interval_report.hpp"
#include "cwb/symrewrite/combined.hpp"

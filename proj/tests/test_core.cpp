#include "afc/builtin_opspecs.hpp"
#include "afc/execution.hpp"
#include "afc/relexpr.hpp"

#include "doctest.h"
#include "helpers.hpp"

using namespace afc;

namespace {

History two_reader_history() {
  // Fig. 3b shape: both events read init on x.
  History h = test::fixture_history("fig3b.json");
  return h;
}

// Independent brute-force enumerator of abstract executions: all permutations
// as ar, all rb subsets of ar containing so U wr with rb;so inside rb.
std::vector<AbstractExecution> brute_force_extensions(const History& h) {
  std::vector<EventId> ids = h.ids();
  std::sort(ids.begin(), ids.end());
  PairSet so = h.so_pairs();
  PairSet wr = h.wr_pairs();
  std::vector<AbstractExecution> out;
  std::vector<EventId> perm = ids;
  do {
    PairSet ar;
    bool ok = true;
    for (std::size_t i = 0; i < perm.size(); ++i)
      for (std::size_t j = i + 1; j < perm.size(); ++j) ar.insert(perm[i], perm[j]);
    for (const auto& [a, b] : so.united(wr).pairs())
      if (!ar.contains(a, b)) ok = false;
    if (!ok) continue;
    std::vector<PairSet::Pair> all(ar.pairs().begin(), ar.pairs().end());
    for (std::size_t mask = 0; mask < (std::size_t{1} << all.size()); ++mask) {
      PairSet rb;
      for (std::size_t bit = 0; bit < all.size(); ++bit)
        if (mask & (std::size_t{1} << bit)) rb.insert(all[bit].first, all[bit].second);
      if (!so.united(wr).subset_of(rb)) continue;
      if (!rb.composed(so).subset_of(rb)) continue;
      AbstractExecution xe(h, rb, perm);
      if (validate_execution(xe).ok) out.push_back(xe);
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

std::string exec_key(const AbstractExecution& xe) {
  std::string key;
  for (const auto& id : xe.ar_order()) key += id + ";";
  key += "|";
  for (const auto& [a, b] : xe.rb().pairs()) key += a + ">" + b + ";";
  return key;
}

}  // namespace

TEST_CASE("fig. 3a history is well formed") {
  History h = test::fixture_history("fig3a.json");
  auto report = validate_history(h);
  CHECK(report.ok);
  CHECK(report.violations.empty());
}

TEST_CASE("the init-only history is well formed") {
  History h;
  CHECK(validate_history(h).ok);
}

TEST_CASE("mutual write-read edges make so U wr cyclic") {
  History h = test::fixture_history("fig3b.json");
  h.set_wr("x", "e0", {"e1"});
  h.set_wr("x", "e1", {"e0"});
  auto report = validate_history(h);
  CHECK_FALSE(report.ok);
  bool mentions_cycle = false;
  for (const auto& v : report.violations)
    if (v.find("cyclic") != std::string::npos) mentions_cycle = true;
  CHECK(mentions_cycle);
}

TEST_CASE("wr must point at actual writers of the object") {
  History h = test::fixture_history("fig3a.json");
  // e1 (the failed CAS) writes nothing, so nobody may read from it.
  h.set_wr("x", "e0", {"e1"});
  CHECK_FALSE(validate_history(h).ok);
}

TEST_CASE("fig. 4a execution is well formed") {
  AbstractExecution xe = test::fixture_execution("fig4a.json");
  auto report = validate_execution(xe);
  CHECK(report.ok);
}

TEST_CASE("an execution must keep wr inside rb") {
  History h = test::fixture_history("fig3a.json");
  // rb misses the wr edge e0 -> e1.
  PairSet rb;
  rb.insert("init", "e0");
  rb.insert("init", "e1");
  AbstractExecution xe(h, rb, {"init", "e0", "e1"});
  auto report = validate_execution(xe);
  CHECK_FALSE(report.ok);
  bool wr_breach = false;
  for (const auto& v : report.violations)
    if (v.find("wr") != std::string::npos) wr_breach = true;
  CHECK(wr_breach);
}

TEST_CASE("ar must be total over the events") {
  History h = test::fixture_history("fig3b.json");
  AbstractExecution xe(h, h.so_pairs().united(h.wr_pairs()), {"init", "e0"});
  auto report = validate_execution(xe);
  CHECK_FALSE(report.ok);
}

TEST_CASE("rb must be closed under appending session order") {
  // r0 runs e0 then e1; a foreign event f is received before e0 only.
  History g;
  g.set_init_value("x", Value::integer(0));
  Event e0 = detail::single_obj_event("PUT", "x", {Value::integer(1)});
  e0.id = "e0";
  e0.replica = "r0";
  Event e1 = detail::single_obj_event("PUT", "x", {Value::integer(2)});
  e1.id = "e1";
  e1.replica = "r0";
  Event f = detail::single_obj_event("PUT", "x", {Value::integer(3)});
  f.id = "f";
  f.replica = "r1";
  e0.wval = {{"x", Value::integer(1)}};
  e1.wval = {{"x", Value::integer(2)}};
  f.wval = {{"x", Value::integer(3)}};
  g.add_event(e0);
  g.add_event(e1);
  g.add_event(f);
  PairSet rb = g.so_pairs();
  rb.insert("f", "e0");  // but not (f, e1): violates rb = rb ; so*
  AbstractExecution xe(g, rb, {"init", "f", "e0", "e1"});
  auto report = validate_execution(xe);
  CHECK_FALSE(report.ok);
  bool closure = false;
  for (const auto& v : report.violations)
    if (v.find("so*") != std::string::npos) closure = true;
  CHECK(closure);
}

TEST_CASE("relation evaluation on fig. 3a") {
  AbstractExecution xe = test::fixture_execution("fig4a.json");
  CHECK(eval_rel(RelExpr::parse("so"), xe, "init", "e1"));
  CHECK_FALSE(eval_rel(RelExpr::parse("so"), xe, "e0", "e1"));  // distinct replicas
  CHECK(eval_rel(RelExpr::parse("ar*"), xe, "e1", "e1"));
  CHECK(eval_rel(RelExpr::parse("(so|wr)+"), xe, "init", "e1"));
  CHECK(eval_rel(RelExpr::parse("wr;wr"), xe, "init", "e1"));
}

TEST_CASE("star equals id union plus on every small execution") {
  History h = two_reader_history();
  std::vector<RelExpr> exprs = {RelExpr::parse("so"), RelExpr::parse("wr"),
                                RelExpr::parse("rb"), RelExpr::parse("ar"),
                                RelExpr::parse("so|wr"), RelExpr::parse("ar;so")};
  for (const auto& xe : enumerate_extensions(h, 1000)) {
    for (const auto& r : exprs) {
      RelExpr star = RelExpr::star(r);
      RelExpr id_plus = RelExpr::unite(RelExpr::leaf(RelExpr::Kind::Id),
                                       RelExpr::plus(r));
      RelEvaluator ev(xe);
      CHECK(ev.materialize(star) == ev.materialize(id_plus));
    }
  }
}

TEST_CASE("relation expressions round-trip through print and parse") {
  std::vector<std::string> sources = {"so", "ar*;(so|wr)", "(rb)+", "so|wr|rb",
                                      "ar;(so|wr)*;rb?", "id|so;so"};
  for (const auto& s : sources) {
    RelExpr e = RelExpr::parse(s);
    CHECK(RelExpr::parse(e.str()) == e);
  }
  CHECK_THROWS_AS(RelExpr::parse("hb"), ParseError);
  CHECK_THROWS_AS(RelExpr::parse("so |"), ParseError);
}

TEST_CASE("enumerate_extensions covers both fig. 4b arbitration orders") {
  History h = test::fixture_history("fig3b.json");
  auto execs = enumerate_extensions(h, 10000);
  AbstractExecution b1 = test::fixture_execution("fig4b_1.json");
  AbstractExecution b2 = test::fixture_execution("fig4b_2.json");
  bool saw1 = false, saw2 = false;
  for (const auto& xe : execs) {
    if (exec_key(xe) == exec_key(b1)) saw1 = true;
    if (exec_key(xe) == exec_key(b2)) saw2 = true;
  }
  CHECK(saw1);
  CHECK(saw2);
}

TEST_CASE("init-only history has exactly one execution") {
  History h;
  auto execs = enumerate_extensions(h, 10);
  REQUIRE(execs.size() == 1);
  CHECK(execs[0].rb().empty());
  CHECK(execs[0].ar_order() == std::vector<EventId>{kInitId});
}

TEST_CASE("enumerate_extensions matches the independent brute-force count") {
  for (const char* name : {"fig3a.json", "fig3b.json"}) {
    History h = test::fixture_history(name);
    auto fast = enumerate_extensions(h, 100000);
    auto slow = brute_force_extensions(h);
    std::set<std::string> fast_keys, slow_keys;
    for (const auto& xe : fast) {
      CHECK(validate_execution(xe).ok);
      fast_keys.insert(exec_key(xe));
    }
    for (const auto& xe : slow) slow_keys.insert(exec_key(xe));
    CHECK(fast.size() == fast_keys.size());  // no duplicates
    CHECK(fast_keys == slow_keys);
  }
}

TEST_CASE("enumeration cap overflows loudly") {
  History h = test::fixture_history("fig3b.json");
  CHECK_THROWS_AS(enumerate_extensions(h, 2), EnumerationOverflow);
}

TEST_CASE("rb of validated executions is transitively inside ar") {
  History h = test::fixture_history("fig3b.json");
  for (const auto& xe : enumerate_extensions(h, 10000)) {
    PairSet ar = xe.ar_pairs();
    CHECK(xe.rb().plus().subset_of(ar));
    // One more so-composition adds nothing.
    CHECK(xe.rb().united(xe.rb().composed(h.so_pairs())) == xe.rb());
  }
}

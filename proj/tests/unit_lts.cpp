#include <catch2/catch_amalgamated.hpp>

#include "ct/lts.hpp"
#include "ct/parser.hpp"

using namespace ct;

namespace {

DerivPtr st(const std::string& src) { return infer(parse_proc(src)); }

std::string tgt(const Transition& t) { return to_string(t.target->process); }

std::string tgt_type(const Transition& t) { return to_string(t.target->type); }

// Every transition must satisfy: internal moves preserve the hypersequent,
// observable moves change it, and the target re-validates.
void check_theorem_shape(const DerivPtr& s, const std::vector<Transition>& ts) {
  for (const auto& t : ts) {
    CAPTURE(to_string(t.label));
    CHECK(is_tau(t.label) == hs_equal(s->type, t.target->type));
    CHECK(validate(t.target));
  }
}

}  // namespace

TEST_CASE("prefix axioms fire with payloads from the typing", "[lts]") {
  auto ts = transitions(st("close x"));
  REQUIRE(ts.size() == 1);
  CHECK(to_string(ts[0].label) == "x[]");
  CHECK(tgt(ts[0]) == "0");
  CHECK(ts[0].rules == std::set<std::string>{"close"});
  CHECK(tgt_type(ts[0]) == "(empty)");

  ts = transitions(st("wait x.0"));
  REQUIRE(ts.size() == 1);
  CHECK(to_string(ts[0].label) == "x()");
  CHECK(tgt(ts[0]) == "0");

  ts = transitions(st("x[y].(close y | wait x.0)"));
  REQUIRE(ts.size() == 1);
  CHECK(to_string(ts[0].label) == "x[y:1;bot]");
  CHECK(tgt(ts[0]) == "close y | wait x.0");

  ts = transitions(st("x(y).wait y.close x"));
  REQUIRE(ts.size() == 1);
  CHECK(to_string(ts[0].label) == "x(y:bot;1)");
  CHECK(tgt(ts[0]) == "wait y.close x");

  ts = transitions(st("x[inl:1].close x"));
  REQUIRE(ts.size() == 1);
  CHECK(to_string(ts[0].label) == "x[inl:1 + 1]");
  CHECK(tgt(ts[0]) == "close x");

  ts = transitions(st("x[inr:bot].close x"));
  REQUIRE(ts.size() == 1);
  CHECK(to_string(ts[0].label) == "x[inr:bot + 1]");

  ts = transitions(st("case x {inl: wait x.0; inr: x[inl:1].close x}"));
  REQUIRE(ts.size() == 2);
  CHECK(to_string(ts[0].label) == "x(inl:bot & 1 + 1)");
  CHECK(tgt(ts[0]) == "wait x.0");
  CHECK(to_string(ts[1].label) == "x(inr:bot & 1 + 1)");
  CHECK(tgt(ts[1]) == "x[inl:1].close x");
  CHECK(ts[0].rules == std::set<std::string>{"case-l"});
  CHECK(ts[1].rules == std::set<std::string>{"case-r"});

  ts = transitions(st("x[type 1 as ex X.X].close x"));
  REQUIRE(ts.size() == 1);
  CHECK(to_string(ts[0].label) == "x[type 1]");
  CHECK(tgt(ts[0]) == "close x");

  ts = transitions(st("link [1] x y"));
  REQUIRE(ts.size() == 1);
  CHECK(to_string(ts[0].label) == "x<->y:1");
  CHECK(tgt(ts[0]) == "0");

  ts = transitions(st("dispose [1] x.0"));
  REQUIRE(ts.size() == 1);
  CHECK(to_string(ts[0].label) == "?x[-:1]");
  CHECK(tgt(ts[0]) == "0");

  ts = transitions(st("?x[y].wait y.0"));
  REQUIRE(ts.size() == 1);
  CHECK(to_string(ts[0].label) == "?x[y:bot]");
  CHECK(tgt(ts[0]) == "wait y.0");

  ts = transitions(st("spawn x[x'].?x[u].?x'[v].wait u.wait v.0"));
  REQUIRE(ts.size() == 1);
  CHECK(to_string(ts[0].label) == "?x[+x':bot]");

  CHECK(transitions(st("0")).empty());
}

TEST_CASE("server offers use, dispose and spawn", "[lts]") {
  DerivPtr s = st("!x(y).close y");
  auto ts = transitions(s);
  REQUIRE(ts.size() == 3);
  CHECK(to_string(ts[0].label) == "!x(y:1)");
  CHECK(tgt(ts[0]) == "close y");
  CHECK(to_string(ts[1].label) == "!x(-:1)");
  CHECK(tgt(ts[1]) == "0");
  CHECK(to_string(ts[2].label) == "!x(+x':1)");
  CHECK(tgt(ts[2]) == "!x(y).close y | !x'(y).close y");
  CHECK(ts[2].spawn_map.empty());
  CHECK(ts[2].rules == std::set<std::string>{"spawn-acc"});
  check_theorem_shape(s, ts);

  // A subject-shadowing server still answers on a fresh object name.
  ts = transitions(st("!x(x).close x"));
  REQUIRE(ts.size() == 3);
  CHECK(to_string(ts[0].label) == "!x(x1:1)");
  CHECK(tgt(ts[0]) == "close x1");
  CHECK(tgt(ts[2]) == "!x(x).close x | !x'(x).close x");
}

TEST_CASE("label binders are freshened against visible names", "[lts]") {
  // The sibling's free y forces the send binder aside.
  DerivPtr s = st("x[y].(close y | close x) | wait y.0");
  auto ts = transitions(s);
  REQUIRE(ts.size() == 2);
  CHECK(to_string(ts[0].label) == "x[y1:1;1]");
  CHECK(tgt(ts[0]) == "close y1 | close x | wait y.0");
  CHECK(ts[0].rules == std::set<std::string>{"send", "par-l"});
  CHECK(to_string(ts[1].label) == "y()");
  CHECK(tgt(ts[1]) == "x[y].(close y | close x) | 0");

  // Server use binder likewise.
  ts = transitions(st("!x(y).close y | wait y.0"));
  CHECK(to_string(ts[0].label) == "!x(y1:1)");
  CHECK(tgt(ts[0]) == "close y1 | wait y.0");

  // The spawn copy's subject avoids a prime taken by the sibling.
  ts = transitions(st("!x(y).close y | wait x'.0"));
  REQUIRE(ts.size() == 4);
  CHECK(to_string(ts[2].label) == "!x(+x'':1)");
  CHECK(tgt(ts[2]) == "!x(y).close y | !x''(y).close y | wait x'.0");
}

TEST_CASE("spawn copies rename server dependencies freshly", "[lts]") {
  // The dependency z must not be copied onto the sibling's z'.
  DerivPtr s = st("!y(w).?z[u].link [1] u w | wait z'.0");
  auto ts = transitions(s);
  REQUIRE(ts.size() == 4);
  const Transition& sp = ts[2];
  CHECK(to_string(sp.label) == "!y(+y':1)");
  REQUIRE(sp.spawn_map.size() == 1);
  CHECK(sp.spawn_map.at(name("z")) == name("z", 2));
  CHECK(tgt(sp) ==
        "!y(w).?z[u].link [1] u w | !y'(w).?z''[u].link [1] u w | "
        "wait z'.0");
  check_theorem_shape(s, ts);
}

TEST_CASE("parallel components interleave and synchronize", "[lts]") {
  DerivPtr s = st("close x | wait y.0");
  auto ts = transitions(s);
  REQUIRE(ts.size() == 3);
  CHECK(to_string(ts[0].label) == "x[]");
  CHECK(tgt(ts[0]) == "0 | wait y.0");
  CHECK(to_string(ts[1].label) == "y()");
  CHECK(tgt(ts[1]) == "close x | 0");
  CHECK(to_string(ts[2].label) == "<x[],y()>");
  CHECK(tgt(ts[2]) == "0 | 0");
  CHECK(ts[2].rules == std::set<std::string>{"close", "wait", "sync"});
  check_theorem_shape(s, ts);

  // The output component always comes first in the pair.
  ts = transitions(st("wait y.0 | close x"));
  REQUIRE(ts.size() == 3);
  CHECK(to_string(ts[2].label) == "<x[],y()>");
  CHECK(tgt(ts[2]) == "0 | 0");
}

TEST_CASE("internal move on a unit pair drops the restriction", "[lts]") {
  DerivPtr s = st("new (x,y){close x | wait y.0}");
  auto ts = transitions(s);
  REQUIRE(ts.size() == 1);
  CHECK(to_string(ts[0].label) == "tau");
  CHECK(tgt(ts[0]) == "0 | 0");
  CHECK(ts[0].rules ==
        std::set<std::string>{"close", "wait", "sync", "cut-unit"});
  CHECK(tgt_type(ts[0]) == "(empty)");
  check_theorem_shape(s, ts);
}

TEST_CASE("internal move on a session pair re-cuts both channels", "[lts]") {
  DerivPtr s =
      st("new (x,y){ x[x'].(close x' | close x) | y(y').wait y'.wait y.0 }");
  auto ts = transitions(s);
  REQUIRE(ts.size() == 1);
  CHECK(to_string(ts[0].label) == "tau");
  CHECK(tgt(ts[0]) ==
        "new (x,y){new (x',y'){close x' | close x | "
        "wait y'.wait y.0}}");
  CHECK(ts[0].rules ==
        std::set<std::string>{"send", "recv", "sync", "cut-pair"});
  check_theorem_shape(s, ts);

  // Colliding object binders: the input side steps aside.
  s = st("new (x,y){ x[u].(close u | close x) | y(u).wait u.wait y.0 }");
  ts = transitions(s);
  REQUIRE(ts.size() == 1);
  CHECK(tgt(ts[0]) ==
        "new (x,y){new (u,u1){close u | close x | wait u1.wait y.0}}");
  check_theorem_shape(s, ts);
}

TEST_CASE("internal moves on selections keep the restriction", "[lts]") {
  DerivPtr s =
      st("new (x,y){ x[inl:bot].close x | case y {inl: wait y.0; inr: close "
         "y} }");
  auto ts = transitions(s);
  REQUIRE(ts.size() == 1);
  CHECK(to_string(ts[0].label) == "tau");
  CHECK(tgt(ts[0]) == "new (x,y){close x | wait y.0}");
  CHECK(ts[0].rules ==
        std::set<std::string>{"inl", "case-l", "sync", "cut-left"});

  s = st("new (x,y){ x[inr:1].close x | case y {inl: wait y.0; inr: wait y.0} "
         "}");
  ts = transitions(s);
  REQUIRE(ts.size() == 1);
  CHECK(tgt(ts[0]) == "new (x,y){close x | wait y.0}");
  CHECK(ts[0].rules ==
        std::set<std::string>{"inr", "case-r", "sync", "cut-right"});
  check_theorem_shape(s, ts);
}

TEST_CASE("type communication substitutes the dual witness", "[lts]") {
  DerivPtr s =
      st("new (x,y){ x[type 1 as ex X.1].close x | y(type Y).wait y.0 }");
  CHECK(type_receivers(s).empty());
  auto ts = transitions(s);
  REQUIRE(ts.size() == 1);
  CHECK(to_string(ts[0].label) == "tau");
  CHECK(tgt(ts[0]) == "new (x,y){close x | wait y.0}");
  CHECK(ts[0].rules ==
        std::set<std::string>{"send-type", "recv-type", "sync", "cut-type"});
  check_theorem_shape(s, ts);

  // The chain runs to completion.
  auto ts2 = transitions(ts[0].target);
  REQUIRE(ts2.size() == 1);
  CHECK(tgt(ts2[0]) == "0 | 0");

  // A non-vacuous scheme: the sender's witness is what lands in the
  // receiver's continuation (its dual atoms do the flipping), keeping the
  // re-cut dual.
  s = st("new (x,y){ x[type 1 as ex X.(X * ~X)].x[v].(close v | wait x.0) | "
         "y(type Y).y(u).link [Y] u y }");
  REQUIRE(to_string(s->type) == "(empty)");
  ts = transitions(s);
  REQUIRE(ts.size() == 1);
  CHECK(tgt(ts[0]) ==
        "new (x,y){x[v].(close v | wait x.0) | y(u).link [1] u y}");
  check_theorem_shape(s, ts);
}

TEST_CASE("server use cuts the fresh session", "[lts]") {
  DerivPtr s = st("new (x,y){ ?x[u].wait u.0 | !y(v).close v }");
  auto ts = transitions(s);
  REQUIRE(ts.size() == 1);
  CHECK(to_string(ts[0].label) == "tau");
  CHECK(tgt(ts[0]) == "new (u,v){wait u.0 | close v}");
  CHECK(ts[0].rules ==
        std::set<std::string>{"use-req", "use-acc", "sync", "cut-use"});
  check_theorem_shape(s, ts);
}

TEST_CASE("server disposal wraps dropped dependencies", "[lts]") {
  DerivPtr s = st("new (x,y){ dispose [1] x.0 | !y(v).?z[w].link [bot] w v }");
  REQUIRE(to_string(s->type) == "z : ?1");
  auto ts = transitions(s);
  REQUIRE(ts.size() == 1);
  CHECK(to_string(ts[0].label) == "tau");
  CHECK(tgt(ts[0]) == "dispose [1] z.(0 | 0)");
  CHECK(ts[0].rules ==
        std::set<std::string>{"disp-req", "disp-acc", "sync", "cut-dispose"});
  check_theorem_shape(s, ts);

  // No dependencies: no wrapper.
  s = st("new (x,y){ dispose [1] x.0 | !y(v).wait v.0 }");
  ts = transitions(s);
  REQUIRE(ts.size() == 1);
  CHECK(tgt(ts[0]) == "0 | 0");
}

TEST_CASE("server spawn re-spawns dependencies and double-cuts", "[lts]") {
  DerivPtr s = st(
      "new (x,y){ spawn x[x2].?x[u].?x2[v].wait u.wait v.0 | !y(w).close w }");
  auto ts = transitions(s);
  REQUIRE(ts.size() == 1);
  CHECK(to_string(ts[0].label) == "tau");
  CHECK(tgt(ts[0]) ==
        "new (x,y){new (x2,y'){?x[u].?x2[v].wait u.wait v.0 | "
        "(!y(w).close w | !y'(w).close w)}}");
  CHECK(ts[0].rules ==
        std::set<std::string>{"spawn-req", "spawn-acc", "sync", "cut-spawn"});
  check_theorem_shape(s, ts);

  // A dependent server: the copy's dependency is spawned from the original.
  s = st("new (x,y){ spawn x[x2].?x[u].?x2[v].wait u.wait v.0 | "
         "!y(w).?z[u].link [1] u w }");
  REQUIRE(to_string(s->type) == "z : ?bot");
  ts = transitions(s);
  REQUIRE(ts.size() == 1);
  REQUIRE(ts[0].spawn_map.size() == 1);
  CHECK(ts[0].spawn_map.at(name("z")) == name("z", 1));
  CHECK(tgt(ts[0]) ==
        "spawn z[z'].new (x,y){new (x2,y'){?x[u].?x2[v].wait u.wait v.0 | "
        "(!y(w).?z[u].link [1] u w | !y'(w).?z'[u].link [1] u w)}}");
  CHECK(tgt_type(ts[0]) == "z : ?bot");
  check_theorem_shape(s, ts);
}

TEST_CASE("forwarder consumption renames the partner endpoint", "[lts]") {
  // Restriction on the forwarder's second name: partner takes the first.
  DerivPtr s = st("new (y,z){ link [1] x y | wait z.0 }");
  auto ts = transitions(s);
  REQUIRE(ts.size() == 1);
  CHECK(to_string(ts[0].label) == "tau");
  CHECK(tgt(ts[0]) == "0 | wait x.0");
  CHECK(ts[0].rules == std::set<std::string>{"link", "par-l", "cut-fwd"});
  check_theorem_shape(s, ts);

  // Restriction on the first name: partner takes the second.
  s = st("new (w,x){ close w | link [1] x y }");
  ts = transitions(s);
  REQUIRE(ts.size() == 1);
  CHECK(tgt(ts[0]) == "close y | 0");
  CHECK(ts[0].rules == std::set<std::string>{"link", "par-r", "cut-bwd"});
  check_theorem_shape(s, ts);
}

TEST_CASE("restrictions pass unrelated labels and block their own", "[lts]") {
  DerivPtr s = st("new (a,b){ close x | (close a | wait b.0) }");
  auto ts = transitions(s);
  REQUIRE(ts.size() == 2);
  CHECK(to_string(ts[0].label) == "x[]");
  CHECK(tgt(ts[0]) == "new (a,b){0 | (close a | wait b.0)}");
  CHECK(ts[0].rules == std::set<std::string>{"close", "par-l", "res"});
  CHECK(to_string(ts[1].label) == "tau");
  CHECK(tgt(ts[1]) == "close x | (0 | 0)");
  CHECK(ts[1].rules ==
        std::set<std::string>{"close", "wait", "sync", "par-r", "cut-unit"});
  check_theorem_shape(s, ts);
}

TEST_CASE("step picks the first alpha-matching transition", "[lts]") {
  Transition t = step(st("wait x.0"), parse_label("x()"));
  CHECK(tgt(t) == "0");

  // Alpha-equivalent binder names match.
  t = step(st("x[y].(close y | wait x.0)"), parse_label("x[z:1;bot]"));
  CHECK(tgt(t) == "close y | wait x.0");

  t = step(st("case x {inl: close x; inr: wait x.0}"),
           parse_label("x(inl:1 & bot)"));
  CHECK(tgt(t) == "close x");

  CHECK_THROWS_AS(step(st("0"), parse_label("tau")), NoSuchTransition);
  try {
    step(st("close x"), parse_label("tau"));
    FAIL("expected NoSuchTransition");
  } catch (const NoSuchTransition& e) {
    CHECK(std::string(e.what()).find("available: `x[]`") !=
          std::string::npos);
  }
}

TEST_CASE("explicit type receive substitutes the witness", "[lts]") {
  DerivPtr s = st("x(type X).x(u).link [X] u x");
  REQUIRE(to_string(s->type) == "x : all X.~X par X");
  auto rs = type_receivers(s);
  REQUIRE(rs.size() == 1);
  CHECK(rs[0] == name("x"));
  CHECK(transitions(s).empty());

  Transition t = recv_type_step(s, name("x"), parse_type("1"));
  CHECK(to_string(t.label) == "x(type 1)");
  CHECK(tgt(t) == "x(u).link [1] u x");
  CHECK(tgt_type(t) == "x : bot par 1");
  CHECK_FALSE(hs_equal(s->type, t.target->type));

  // The receiver is found through parallel composition.
  s = st("x(type X).wait x.0 | close z");
  t = recv_type_step(s, name("x"), parse_type("bot"));
  CHECK(tgt(t) == "wait x.0 | close z");
  CHECK(t.rules == std::set<std::string>{"recv-type", "par-l"});

  CHECK_THROWS_AS(recv_type_step(st("close x"), name("x"), parse_type("1")),
                  NoSuchTransition);
}

TEST_CASE("rule name catalogue is closed over emitted rules", "[lts]") {
  const auto& all = all_lts_rules();
  std::set<std::string> cat(all.begin(), all.end());
  CHECK(cat.size() == all.size());
  for (const char* src : {
           "close x | wait y.0",
           "new (x,y){ x[x'].(close x' | close x) | y(y').wait y'.wait y.0 }",
           "new (y,z){ link [1] x y | wait z.0 }",
           "new (w,x){ close w | link [1] x y }",
           "new (a,b){ close x | (close a | wait b.0) }",
           "!x(y).close y",
           "new (x,y){ dispose [1] x.0 | !y(v).?z[w].link [bot] w v }",
           "new (x,y){ spawn x[x2].?x[u].?x2[v].wait u.wait v.0 | "
           "!y(w).close w }",
           "new (x,y){ ?x[u].wait u.0 | !y(v).close v }",
           "new (x,y){ x[type 1 as ex X.1].close x | y(type Y).wait y.0 }",
           "case x {inl: wait x.0; inr: x[inl:1].close x}",
           "x[inr:bot].close x",
           "x[type 1 as ex X.X].close x",
           "?x[y].wait y.0",
           "spawn x[x'].?x[u].?x'[v].wait u.wait v.0",
           "dispose [1] x.0",
       }) {
    for (const auto& t : transitions(st(src)))
      for (const auto& r : t.rules) {
        CAPTURE(src, r);
        CHECK(cat.count(r) == 1);
      }
  }
}

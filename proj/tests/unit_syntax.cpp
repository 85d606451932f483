#include <catch2/catch_amalgamated.hpp>

#include "ct/hypersequent.hpp"
#include "ct/label.hpp"
#include "ct/name.hpp"
#include "ct/parser.hpp"
#include "ct/process.hpp"
#include "ct/proposition.hpp"

using namespace ct;

TEST_CASE("names print primes and pick fresh variants", "[name]") {
  Name x = name("x");
  CHECK(to_string(x) == "x");
  CHECK(to_string(name("x", 2)) == "x''");

  NameSet avoid = {name("x"), name("x", 1)};
  CHECK(fresh_primed(x, avoid) == name("x", 2));
  CHECK(fresh_suffixed(name("y"), {name("y")}) == name("y1"));
  CHECK(fresh_suffixed(name("y"), {name("y"), name("y1")}) == name("y2"));
  CHECK(freshen(name("z"), avoid) == name("z"));
}

TEST_CASE("duality is an involutive homomorphism", "[prop]") {
  PropPtr t = tensor(one(), bot());
  CHECK(to_string(dual(t)) == "bot par 1");
  CHECK(alpha_eq(dual(dual(t)), t));

  PropPtr q = exists(name("X"), tensor(atom(name("X")), dual_atom(name("X"))));
  CHECK(to_string(q) == "ex X.X * ~X");
  CHECK(to_string(dual(q)) == "all X.~X par X");
  CHECK(alpha_eq(dual(dual(q)), q));

  CHECK(to_string(dual(zero())) == "top");
  CHECK(to_string(dual(of_course(atom(name("Y"))))) == "?~Y");
}

TEST_CASE("substitution avoids capture", "[prop]") {
  // (ex Y.X * Y){Y/X}: the binder must step aside.
  PropPtr p = exists(name("Y"), tensor(atom(name("X")), atom(name("Y"))));
  PropPtr r = subst(p, name("X"), atom(name("Y")));
  CHECK(to_string(r) == "ex Y1.Y * Y1");
  // ~X picks up the dual of the payload.
  PropPtr d = subst(dual_atom(name("X")), name("X"), tensor(one(), bot()));
  CHECK(to_string(d) == "bot par 1");
  // Shadowed occurrences stay put.
  PropPtr s = subst(forall(name("X"), atom(name("X"))), name("X"), one());
  CHECK(to_string(s) == "all X.X");
}

TEST_CASE("alpha equivalence and canonical keys", "[prop]") {
  PropPtr a = exists(name("X"), parr(atom(name("X")), dual_atom(name("X"))));
  PropPtr b = exists(name("Y"), parr(atom(name("Y")), dual_atom(name("Y"))));
  CHECK(alpha_eq(a, b));
  CHECK(canon_key(a) == canon_key(b));
  CHECK_FALSE(alpha_eq(a, exists(name("X"), parr(atom(name("X")), atom(name("X"))))));
  // Free variables keep their identity.
  CHECK_FALSE(alpha_eq(atom(name("X")), atom(name("Y"))));
}

TEST_CASE("type printing tracks precedence and associativity", "[prop]") {
  PropPtr a = atom(name("A")), b = atom(name("B")), c = atom(name("C"));
  CHECK(to_string(tensor(a, parr(b, c))) == "A * B par C");
  CHECK(to_string(tensor(tensor(a, b), c)) == "(A * B) * C");
  CHECK(to_string(plus(a, tensor(b, c))) == "A + B * C");
  CHECK(to_string(tensor(plus(a, b), c)) == "(A + B) * C");
  CHECK(to_string(of_course(plus(a, b))) == "!(A + B)");
  CHECK(to_string(with(a, with(b, c))) == "A & B & C");
  CHECK(to_string(with(with(a, b), c)) == "(A & B) & C");
}

TEST_CASE("type parsing round-trips", "[parser]") {
  for (const char* s : {
           "1", "bot", "0", "top", "X", "~X", "!?1", "A * B par C",
           "(A * B) * C", "A + B * C", "(A + B) * C", "!(A + B)",
           "ex X.X * ~X", "all Y.(ex X.X) par ~Y", "?A & !B",
           "A & B & C", "(A & B) & C",
       }) {
    PropPtr t = parse_type(s);
    CHECK(to_string(t) == s);
    CHECK(alpha_eq(parse_type(to_string(t)), t));
  }
  CHECK(alpha_eq(parse_type("ex X . ( X )"), parse_type("ex X.X")));
  CHECK_THROWS_AS(parse_type("A *"), ParseError);
  CHECK_THROWS_AS(parse_type("par A"), ParseError);
  CHECK_THROWS_AS(parse_type("ex 1.X"), ParseError);
}

TEST_CASE("hypersequents absorb empties and compare up to order", "[hyperseq]") {
  Sequent s1 = {{name("x"), one()}};
  Sequent s2 = {{name("y"), bot()}};
  Hypersequent h = Hypersequent::make({{}, s1, {}, s2});
  CHECK(h.sequents.size() == 2);
  Hypersequent g = Hypersequent::make({s2, s1});
  CHECK(hs_equal(h, g));
  CHECK(hs_key(h) == hs_key(g));
  CHECK_FALSE(hs_equal(h, Hypersequent::make({s1})));

  CHECK(to_string(Hypersequent{}) == "(empty)");
  CHECK(to_string(h) == "x : 1 || y : bot");

  CHECK_FALSE(hs_merge(h, Hypersequent::make({{{name("x"), bot()}}})).has_value());
  auto m = hs_merge(h, Hypersequent::make({{{name("z"), top()}}}));
  REQUIRE(m.has_value());
  CHECK(m->sequents.size() == 3);

  Hypersequent hp = parse_hypersequent("x : 1 || y : bot");
  CHECK(hs_equal(hp, h));
  CHECK(parse_hypersequent("(empty)").empty());
}

TEST_CASE("processes print and parse", "[parser]") {
  for (const char* s : {
           "0",
           "close x",
           "wait x.0",
           "x[y].(close y | wait x.0)",
           "x(y).wait y.close x",
           "x[inl:1].close x",
           "x[inr:bot & 1].wait x.0",
           "case x {inl: wait x.0; inr: wait x.0}",
           "x[type 1 as ex X.X].close x",
           "x(type X).x(u).link [X] u x",
           "link [1 * bot] x y",
           "!x(y).close y",
           "?x[y].wait y.0",
           "spawn x[x'].(?x[u].wait u.0 | ?x'[v].wait v.0)",
           "dispose [1] x.0",
           "new (a,b){close a | wait b.0}",
           "close x | close y | close z",
           "wait x.(0 | 0)",
       }) {
    ProcPtr p = parse_proc(s);
    CHECK(to_string(p) == s);
  }
  // Grouping: `|` under a prefix needs parentheses, and keeps them.
  CHECK(to_string(parse_proc("(close x | close y) | close z")) ==
        "close x | close y | close z");
  CHECK_THROWS_AS(parse_proc("x[y]"), ParseError);
  CHECK_THROWS_AS(parse_proc("case x {inl: 0}"), ParseError);
  CHECK_THROWS_AS(parse_proc("wait case.0"), ParseError);
  CHECK_THROWS_AS(parse_proc("close x close y"), ParseError);
}

TEST_CASE("parse errors carry positions", "[parser]") {
  try {
    parse_proc("x[y]");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line == 1);
    CHECK(e.col == 5);
  }
  try {
    parse_proc("close x |\n  wait y");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
    CHECK(e.col == 9);
  }
}

TEST_CASE("comments are skipped", "[parser]") {
  ProcPtr p = parse_proc("-- a tidy pair\nclose x -- the end\n | close y");
  CHECK(to_string(p) == "close x | close y");
}

TEST_CASE("free names respect binders", "[process]") {
  ProcPtr p = parse_proc("x[y].(close y | wait x.0)");
  CHECK(free_names(p) == NameSet{name("x")});
  ProcPtr q = parse_proc("new (a,b){close a | wait b.wait z.0}");
  CHECK(free_names(q) == NameSet{name("z")});
  ProcPtr r = parse_proc("link [1] u v");
  CHECK(free_names(r) == NameSet{name("u"), name("v")});
  CHECK(all_names(q) == NameSet{name("a"), name("b"), name("z")});
}

TEST_CASE("renaming avoids capture", "[process]") {
  ProcPtr p = parse_proc("x(y).wait z.close y");
  ProcPtr r = rename(p, {{name("z"), name("y")}});
  CHECK(to_string(r) == "x(y1).wait y.close y1");
  // Simultaneous swap.
  ProcPtr s = rename(parse_proc("link [1] a b"), {{name("a"), name("b")}, {name("b"), name("a")}});
  CHECK(to_string(s) == "link [1] b a");
  // Restriction binders shield the body.
  ProcPtr t = rename(parse_proc("new (a,b){link [1] a b}"), {{name("a"), name("c")}});
  CHECK(to_string(t) == "new (a,b){link [1] a b}");
}

TEST_CASE("prime copies rename every free name", "[process]") {
  ProcPtr p = parse_proc("x[v].(close v | wait y.0)");
  auto [c, m] = prime_copy(p);
  CHECK(to_string(c) == "x'[v].(close v | wait y'.0)");
  CHECK(m == std::map<Name, Name>{{name("x"), name("x", 1)}, {name("y"), name("y", 1)}});
}

TEST_CASE("process alpha equivalence", "[process]") {
  CHECK(alpha_eq(parse_proc("new (a,b){link [1] a b}"), parse_proc("new (c,d){link [1] c d}")));
  CHECK(alpha_eq(parse_proc("x(y).close y"), parse_proc("x(z).close z")));
  CHECK_FALSE(alpha_eq(parse_proc("x(y).close y"), parse_proc("w(z).close z")));
  CHECK(alpha_eq(parse_proc("x(type X).x(u).link [X] u x"),
                 parse_proc("x(type Z).x(w).link [Z] w x")));
  CHECK_FALSE(alpha_eq(parse_proc("x[inl:1].close x"), parse_proc("x[inl:bot].close x")));
}

TEST_CASE("termination detection", "[process]") {
  CHECK(is_terminated(parse_proc("0")));
  CHECK(is_terminated(parse_proc("0 | (0 | 0)")));
  CHECK_FALSE(is_terminated(parse_proc("close x")));
  CHECK_FALSE(is_terminated(parse_proc("0 | wait x.0")));
}

TEST_CASE("type substitution in annotations", "[process]") {
  ProcPtr p = parse_proc("link [X] u v");
  CHECK(to_string(subst_type(p, name("X"), one())) == "link [1] u v");
  // The receive binder shadows.
  ProcPtr q = parse_proc("x(type X).link [X] u x");
  CHECK(to_string(subst_type(q, name("X"), one())) == "x(type X).link [X] u x");
  // A clashing binder steps aside.
  ProcPtr r = parse_proc("x(type Y).link [X * Y] u x");
  CHECK(to_string(subst_type(r, name("X"), atom(name("Y")))) ==
        "x(type Y1).link [Y * Y1] u x");
}

TEST_CASE("labels print, parse and compare", "[label]") {
  for (const char* s : {
           "tau", "x[]", "x()", "x[y:1;bot]", "x(y:bot;1)",
           "x[inl:1 + bot]", "x(inr:bot & 1)", "x[type 1]", "x(type bot)",
           "?x[y:1]", "!x(y:bot)", "?x[+y:1]", "!x(+y:bot)",
           "?x[-:1]", "!x(-:bot)", "x<->y:1 * bot", "<x[],x()>",
       }) {
    Label l = parse_label(s);
    CHECK(to_string(l) == s);
  }
  CHECK(alpha_eq(parse_label("x[y:1;bot]"), parse_label("x[z:1;bot]")));
  CHECK_FALSE(alpha_eq(parse_label("x[y:1;bot]"), parse_label("w[y:1;bot]")));
  CHECK(alpha_eq(parse_label("x[type ex X.X]"), parse_label("x[type ex Y.Y]")));
}

TEST_CASE("label duality matches output with input payloads", "[label]") {
  CHECK(label_dual(parse_label("x[]"), parse_label("y()")));
  CHECK(label_dual(parse_label("y()"), parse_label("x[]")));
  CHECK(label_dual(parse_label("x[u:1;bot]"), parse_label("y(v:bot;1)")));
  CHECK_FALSE(label_dual(parse_label("x[u:1;bot]"), parse_label("y(v:1;bot)")));
  CHECK(label_dual(parse_label("x[inl:1 + bot]"), parse_label("y(inl:bot & 1)")));
  CHECK_FALSE(label_dual(parse_label("x[inl:1 + bot]"), parse_label("y(inr:bot & 1)")));
  CHECK(label_dual(parse_label("x[type X]"), parse_label("y(type ~X)")));
  CHECK(label_dual(parse_label("?x[y:1]"), parse_label("!z(w:bot)")));
  CHECK(label_dual(parse_label("?x[+y:1]"), parse_label("!z(+w:bot)")));
  CHECK(label_dual(parse_label("?x[-:1]"), parse_label("!z(-:bot)")));
  CHECK_FALSE(label_dual(parse_label("x[]"), parse_label("x[]")));
  CHECK_FALSE(label_dual(parse_label("tau"), parse_label("tau")));
  CHECK_FALSE(label_dual(parse_label("x<->y:1"), parse_label("x<->y:bot")));
}

TEST_CASE("label name sets", "[label]") {
  Label l = parse_label("x[y:1;bot]");
  CHECK(label_names(l) == NameSet{name("x"), name("y")});
  CHECK(bound_names(l) == NameSet{name("y")});
  CHECK(subjects(l) == NameSet{name("x")});
  Label s = parse_label("<x[],y()>");
  CHECK(subjects(s) == NameSet{name("x"), name("y")});
  CHECK(subjects(parse_label("x<->y:1")) == NameSet{name("x"), name("y")});
  CHECK(bound_names(parse_label("tau")).empty());
}

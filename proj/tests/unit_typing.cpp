#include <catch2/catch_amalgamated.hpp>

#include "ct/parser.hpp"
#include "ct/typing.hpp"

using namespace ct;

namespace {

Hypersequent type_of(const std::string& proc) {
  return infer(parse_proc(proc))->type;
}

void check_types(const std::string& proc, const std::string& expected) {
  INFO(proc);
  CHECK(hs_equal(type_of(proc), parse_hypersequent(expected)));
}

TypeError capture(const std::string& proc) {
  try {
    infer(parse_proc(proc));
  } catch (const TypeError& e) {
    return e;
  }
  FAIL("expected a type error for: " << proc);
  throw std::logic_error("unreachable");
}

}  // namespace

TEST_CASE("synthesis of the core forms", "[typing]") {
  check_types("0", "(empty)");
  check_types("close x", "x : 1");
  check_types("wait x.0", "x : bot");
  check_types("close x | close y", "x : 1 || y : 1");
  check_types("x[y].(close y | wait x.0)", "x : 1 * bot");
  check_types("x(y).wait y.close x", "x : bot par 1");
  check_types("new (a,b){close a | wait b.0}", "(empty)");
  check_types("link [1 * bot] x y", "x : bot par 1, y : 1 * bot");
  check_types("link [X] x y", "x : ~X, y : X");
}

TEST_CASE("synthesis of the additive forms", "[typing]") {
  check_types("x[inl:1].close x", "x : 1 + 1");
  check_types("x[inl:bot].close x", "x : 1 + bot");
  check_types("x[inr:bot].close x", "x : bot + 1");
  check_types("case x {inl: wait x.0; inr: x[inl:1].close x}",
              "x : bot & (1 + 1)");  // branches may differ in shape, not in context
  check_types("case x {inl: wait x.0; inr: x(y).wait y.wait x.0} | close z",
              "x : bot & (bot par bot) || z : 1");
}

TEST_CASE("synthesis of the quantifier forms", "[typing]") {
  check_types("x[type 1 as ex X.X].close x", "x : ex X.X");
  check_types("x[type 1 as ex X.(X * ~X)].x[v].(close v | wait x.0)",
              "x : ex X.X * ~X");
  check_types("x(type X).x(u).link [X] u x", "x : all X.~X par X");
  check_types("x(type X).wait x.link [Y] u v", "x : all X.bot, u : ~Y, v : Y");
}

TEST_CASE("synthesis of the exponential forms", "[typing]") {
  check_types("!x(y).close y", "x : !1");
  check_types("?x[y].wait y.0", "x : ?bot");
  check_types("dispose [1] x.0", "x : ?1");
  check_types("dispose [1] x.dispose [bot] y.0", "x : ?1, y : ?bot");
  check_types("spawn x[x'].?x[u].?x'[v].wait u.wait v.0", "x : ?bot");
  check_types("!x(y).?z[u].link [1] u y", "x : !1, z : ?bot");
}

TEST_CASE("a server may reuse its own name as object", "[typing]") {
  check_types("!x(x).close x", "x : !1");
  check_types("?x[x].wait x.0", "x : ?bot");
}

TEST_CASE("case branches pin the conclusion to the left context", "[typing]") {
  // Contexts are compared up to alpha; the left branch supplies the result.
  Hypersequent h = type_of(
      "case x {inl: wait x.y[type 1 as ex X.X].close y;"
      " inr: wait x.y[type 1 as ex Z.Z].close y}");
  CHECK(to_string(h) == "x : bot & bot, y : ex X.X");
}

TEST_CASE("type errors carry class and path", "[typing]") {
  CHECK(capture("new (a,b){close a | close b}").cls == ErrClass::NotDual);
  CHECK(capture("x[y].close x").cls == ErrClass::SubjectMissing);
  CHECK(capture("close x | wait x.0").cls == ErrClass::NameClash);
  CHECK(capture("x[y].wait y.close x").cls == ErrClass::NotInDistinctSequents);
  CHECK(capture("wait x.(close a | close b)").cls == ErrClass::AmbientContext);
  CHECK(capture("x(type X).link [X] u x").cls == ErrClass::UnboundName);
  CHECK(capture("!x(y).wait z.close y").cls == ErrClass::NonClientContext);
  CHECK(capture("spawn x[x'].?x[u].?x'[v].wait u.close v").cls ==
        ErrClass::ContractionMismatch);
  CHECK(capture("x[type 1 as ex X.X * X].close x").cls == ErrClass::AnnotationMismatch);
  CHECK(capture("case x {inl: wait x.close y; inr: wait x.wait y.0}").cls ==
        ErrClass::BranchMismatch);
  CHECK(capture("link [1] x x").cls == ErrClass::NameClash);
  CHECK(capture("x[x].close x").cls == ErrClass::SubjectMissing);

  TypeError nested = capture("wait a.(x[y].close x)");
  CHECK(nested.cls == ErrClass::SubjectMissing);
  CHECK(nested.path == std::vector<int>{0});
  TypeError root = capture("x[y].close x");
  CHECK(root.path.empty());
  CHECK(std::string(root.what()).find("subject-missing") != std::string::npos);
}

TEST_CASE("receives need both endpoints in one sequent", "[typing]") {
  // y and x land in different sequents here.
  CHECK(capture("x(y).(close y | close x)").cls == ErrClass::AmbientContext);
  // A send with an extra, unrelated sequent.
  CHECK(capture("x[y].(close y | (close x | close z))").cls == ErrClass::AmbientContext);
}

TEST_CASE("check compares against a requested type", "[typing]") {
  CHECK_NOTHROW(check(parse_proc("close x"), parse_hypersequent("x : 1")));
  try {
    check(parse_proc("close x"), parse_hypersequent("x : bot"));
    FAIL("expected a type mismatch");
  } catch (const TypeError& e) {
    CHECK(e.cls == ErrClass::TypeMismatch);
  }
}

TEST_CASE("validate audits derivations independently", "[typing]") {
  for (const char* s : {
           "x[y].(close y | wait x.0)",
           "new (a,b){close a | wait b.0}",
           "case x {inl: wait x.0; inr: wait x.0}",
           "x(type X).x(u).link [X] u x",
           "spawn x[x'].?x[u].?x'[v].wait u.wait v.0",
           "!x(y).close y",
           "x[type 1 as ex X.X].close x",
           "dispose [1] x.0",
       }) {
    DerivPtr d = infer(parse_proc(s));
    INFO(s);
    CHECK(validate(d));
    CHECK_FALSE(validate_reason(d).has_value());
  }

  // A forged conclusion is caught.
  DerivPtr good = infer(parse_proc("close x"));
  DerivPtr forged = deriv(Rule::One, good->process,
                          parse_hypersequent("x : bot"), {});
  CHECK_FALSE(validate(forged));
  CHECK(validate_reason(forged).has_value());

  // A mislabeled rule is caught.
  DerivPtr mislabeled = deriv(Rule::Bot, good->process, good->type, {});
  CHECK_FALSE(validate(mislabeled));

  // A premise that is not the term's child is caught.
  DerivPtr alien = infer(parse_proc("close z"));
  ProcPtr w = parse_proc("wait y.close z");
  DerivPtr bad_child = deriv(Rule::Bot, w,
                             parse_hypersequent("y : bot, z : 1"),
                             {infer(parse_proc("close x"))});
  CHECK_FALSE(validate(bad_child));
  DerivPtr ok_child = deriv(Rule::Bot, w, parse_hypersequent("y : bot, z : 1"), {alien});
  CHECK(validate(ok_child));
}

TEST_CASE("derivations record rule names and sizes", "[typing]") {
  DerivPtr d = infer(parse_proc("new (a,b){close a | wait b.0}"));
  CHECK(d->rule == Rule::Cut);
  CHECK(std::string(rule_name(d->rule)) == "cut");
  REQUIRE(d->premises.size() == 1);
  CHECK(d->premises[0]->rule == Rule::Mix);
  CHECK(deriv_size(d) == 5);
}

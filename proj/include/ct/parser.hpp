#pragma once

// Hand-rolled recursive descent for the three surface syntaxes: session
// types, process terms, and transition labels. `--` starts a line comment.
// Identifiers are [A-Za-z_][A-Za-z0-9_]* with trailing apostrophes; keywords
// are reserved. Errors carry the 1-based line and column plus what was
// expected at that point.

#include <cctype>
#include <set>
#include <stdexcept>
#include <string>

#include "ct/hypersequent.hpp"
#include "ct/label.hpp"
#include "ct/name.hpp"
#include "ct/process.hpp"
#include "ct/proposition.hpp"

namespace ct {

struct ParseError : std::runtime_error {
  int line;
  int col;
  ParseError(int line_, int col_, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line_) + ", col " +
                           std::to_string(col_) + ": " + msg),
        line(line_),
        col(col_) {}
};

namespace detail {

inline const std::set<std::string>& keywords() {
  static const std::set<std::string> kw = {
      "new", "close", "wait", "case", "inl", "inr", "spawn", "dispose",
      "link", "type", "as", "ex", "all", "par", "top", "bot", "tau",
  };
  return kw;
}

}  // namespace detail

class Parser {
 public:
  explicit Parser(std::string src) : src_(std::move(src)) {}

  PropPtr type_all() {
    PropPtr t = parse_type();
    end();
    return t;
  }

  ProcPtr proc_all() {
    ProcPtr p = parse_process();
    end();
    return p;
  }

  Label label_all() {
    Label l = parse_label();
    end();
    return l;
  }

  Hypersequent hs_all() {
    Hypersequent h = parse_hypersequent();
    end();
    return h;
  }

 private:
  std::string src_;
  size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& expected) {
    int line = 1, col = 1;
    for (size_t i = 0; i < pos_ && i < src_.size(); ++i) {
      if (src_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string found;
    if (pos_ >= src_.size()) {
      found = "end of input";
    } else {
      size_t n = std::min<size_t>(12, src_.size() - pos_);
      size_t cut = src_.find('\n', pos_);
      if (cut != std::string::npos && cut - pos_ < n) n = cut - pos_;
      found = "'" + src_.substr(pos_, n) + "'";
    }
    throw ParseError(line, col, "expected " + expected + ", found " + found);
  }

  void skip_ws() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        ++pos_;
      } else if (c == '-' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '-') {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  bool eof() {
    skip_ws();
    return pos_ >= src_.size();
  }

  char peek() {
    skip_ws();
    return pos_ < src_.size() ? src_[pos_] : '\0';
  }

  char peek2() {
    skip_ws();
    return pos_ + 1 < src_.size() ? src_[pos_ + 1] : '\0';
  }

  bool eat(char c) {
    if (peek() != c) return false;
    ++pos_;
    return true;
  }

  void expect(char c, const char* ctx) {
    if (!eat(c)) fail("'" + std::string(1, c) + "' " + ctx);
  }

  bool eat_str(const char* s) {
    skip_ws();
    size_t n = std::char_traits<char>::length(s);
    if (src_.compare(pos_, n, s) != 0) return false;
    pos_ += n;
    return true;
  }

  static bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
  static bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

  // The word at the cursor, without consuming. Empty if none.
  std::string peek_word() {
    skip_ws();
    if (pos_ >= src_.size() || !ident_start(src_[pos_])) return {};
    size_t e = pos_;
    while (e < src_.size() && ident_char(src_[e])) ++e;
    return src_.substr(pos_, e - pos_);
  }

  bool eat_word(const char* w) {
    if (peek_word() != w) return false;
    pos_ += std::char_traits<char>::length(w);
    // A keyword never carries primes.
    return true;
  }

  Name ident(const char* what) {
    std::string w = peek_word();
    if (w.empty()) fail(std::string(what));
    if (detail::keywords().count(w)) fail(std::string(what) + " (got keyword '" + w + "')");
    pos_ += w.size();
    int primes = 0;
    while (pos_ < src_.size() && src_[pos_] == '\'') {
      ++primes;
      ++pos_;
    }
    return Name{std::move(w), primes};
  }

  void end() {
    if (!eof()) fail("end of input");
  }

  // --- types ---------------------------------------------------------------

  PropPtr parse_type() {  // additive level, right-associative
    PropPtr l = parse_mult();
    if (eat('+')) return plus(l, parse_type());
    if (eat('&')) return with(l, parse_type());
    return l;
  }

  PropPtr parse_mult() {  // multiplicative level, right-associative
    PropPtr l = parse_unary();
    if (eat('*')) return tensor(l, parse_mult());
    if (eat_word("par")) return parr(l, parse_mult());
    return l;
  }

  PropPtr parse_unary() {
    char c = peek();
    if (c == '!') {
      ++pos_;
      return of_course(parse_unary());
    }
    if (c == '?') {
      ++pos_;
      return why_not(parse_unary());
    }
    if (c == '~') {
      ++pos_;
      return dual_atom(ident("type variable after '~'"));
    }
    if (c == '(') {
      ++pos_;
      PropPtr t = parse_type();
      expect(')', "closing the type");
      return t;
    }
    if (c == '1') {
      ++pos_;
      return one();
    }
    if (c == '0') {
      ++pos_;
      return zero();
    }
    if (eat_word("bot")) return bot();
    if (eat_word("top")) return top();
    if (eat_word("ex")) {
      Name v = ident("type variable after 'ex'");
      expect('.', "after the bound variable");
      return exists(v, parse_type());
    }
    if (eat_word("all")) {
      Name v = ident("type variable after 'all'");
      expect('.', "after the bound variable");
      return forall(v, parse_type());
    }
    std::string w = peek_word();
    if (!w.empty() && !detail::keywords().count(w)) return atom(ident("type"));
    fail("a type");
  }

  // --- processes -----------------------------------------------------------

  ProcPtr parse_process() {
    ProcPtr l = parse_prefix();
    while (eat('|')) l = par(l, parse_prefix());
    return l;
  }

  ProcPtr parse_continuation() {
    expect('.', "before the continuation");
    return parse_prefix();
  }

  ProcPtr parse_prefix() {
    char c = peek();
    if (c == '0') {
      ++pos_;
      return nil();
    }
    if (c == '(') {
      ++pos_;
      ProcPtr p = parse_process();
      expect(')', "closing the group");
      return p;
    }
    if (c == '!') {
      ++pos_;
      Name x = ident("server name after '!'");
      expect('(', "opening the server object");
      Name y = ident("object name");
      expect(')', "closing the server object");
      return server(x, y, parse_continuation());
    }
    if (c == '?') {
      ++pos_;
      Name x = ident("client name after '?'");
      expect('[', "opening the client object");
      Name y = ident("object name");
      expect(']', "closing the client object");
      return client_use(x, y, parse_continuation());
    }
    std::string w = peek_word();
    if (w == "new") {
      eat_word("new");
      expect('(', "after 'new'");
      Name x = ident("first bound name");
      expect(',', "between the bound names");
      Name y = ident("second bound name");
      expect(')', "after the bound names");
      expect('{', "opening the scope");
      ProcPtr p = parse_process();
      expect('}', "closing the scope");
      return res(x, y, p);
    }
    if (w == "close") {
      eat_word("close");
      return close_(ident("name after 'close'"));
    }
    if (w == "wait") {
      eat_word("wait");
      Name x = ident("name after 'wait'");
      return wait_(x, parse_continuation());
    }
    if (w == "case") {
      eat_word("case");
      Name x = ident("name after 'case'");
      expect('{', "opening the branches");
      if (!eat_word("inl")) fail("'inl'");
      expect(':', "after 'inl'");
      ProcPtr l = parse_process();
      expect(';', "between the branches");
      if (!eat_word("inr")) fail("'inr'");
      expect(':', "after 'inr'");
      ProcPtr r = parse_process();
      expect('}', "closing the branches");
      return case_(x, l, r);
    }
    if (w == "link") {
      eat_word("link");
      expect('[', "opening the forwarder type");
      PropPtr t = parse_type();
      expect(']', "closing the forwarder type");
      Name x = ident("first linked name");
      Name y = ident("second linked name");
      return link(t, x, y);
    }
    if (w == "spawn") {
      eat_word("spawn");
      Name x = ident("name after 'spawn'");
      expect('[', "opening the copy name");
      Name y = ident("copy name");
      expect(']', "closing the copy name");
      return client_spawn(x, y, parse_continuation());
    }
    if (w == "dispose") {
      eat_word("dispose");
      expect('[', "opening the disposal type");
      PropPtr t = parse_type();
      expect(']', "closing the disposal type");
      Name x = ident("name after the disposal type");
      return client_dispose(t, x, parse_continuation());
    }
    if (!w.empty() && !detail::keywords().count(w)) {
      Name x = ident("a process");
      if (eat('[')) {
        if (eat_word("inl")) {
          expect(':', "after 'inl'");
          PropPtr t = parse_type();
          expect(']', "closing the selection");
          return inl(x, t, parse_continuation());
        }
        if (eat_word("inr")) {
          expect(':', "after 'inr'");
          PropPtr t = parse_type();
          expect(']', "closing the selection");
          return inr(x, t, parse_continuation());
        }
        if (eat_word("type")) {
          PropPtr witness = parse_type();
          if (!eat_word("as")) fail("'as' after the witness type");
          if (!eat_word("ex")) fail("'ex' opening the scheme");
          Name v = ident("scheme variable");
          expect('.', "after the scheme variable");
          PropPtr body = parse_type();
          expect(']', "closing the type send");
          return send_type(x, witness, v, body, parse_continuation());
        }
        Name y = ident("object name");
        expect(']', "closing the send");
        return send(x, y, parse_continuation());
      }
      if (eat('(')) {
        if (eat_word("type")) {
          Name v = ident("type variable");
          expect(')', "closing the type receive");
          return recv_type(x, v, parse_continuation());
        }
        Name y = ident("object name");
        expect(')', "closing the receive");
        return recv(x, y, parse_continuation());
      }
      fail("'[' or '(' after the subject name");
    }
    fail("a process");
  }

  // --- labels ----------------------------------------------------------------

  Label parse_label() {
    char c = peek();
    if (eat_word("tau")) return tau_l();
    if (c == '<') {
      ++pos_;
      Label o = parse_label();
      expect(',', "between the synchronized labels");
      Label i = parse_label();
      expect('>', "closing the synchronization");
      return sync_l(std::move(o), std::move(i));
    }
    if (c == '?') {
      ++pos_;
      Name x = ident("name after '?'");
      expect('[', "opening the action");
      if (eat('+')) {
        Name y = ident("copy name");
        expect(':', "before the payload type");
        PropPtr t = parse_type();
        expect(']', "closing the action");
        return spawn_req_l(x, y, t);
      }
      if (eat('-')) {
        expect(':', "before the payload type");
        PropPtr t = parse_type();
        expect(']', "closing the action");
        return disp_req_l(x, t);
      }
      Name y = ident("object name");
      expect(':', "before the payload type");
      PropPtr t = parse_type();
      expect(']', "closing the action");
      return use_req_l(x, y, t);
    }
    if (c == '!') {
      ++pos_;
      Name x = ident("name after '!'");
      expect('(', "opening the action");
      if (eat('+')) {
        Name y = ident("copy name");
        expect(':', "before the payload type");
        PropPtr t = parse_type();
        expect(')', "closing the action");
        return spawn_acc_l(x, y, t);
      }
      if (eat('-')) {
        expect(':', "before the payload type");
        PropPtr t = parse_type();
        expect(')', "closing the action");
        return disp_acc_l(x, t);
      }
      Name y = ident("object name");
      expect(':', "before the payload type");
      PropPtr t = parse_type();
      expect(')', "closing the action");
      return use_acc_l(x, y, t);
    }
    Name x = ident("a label");
    if (peek() == '<' && peek2() == '-') {
      if (!eat_str("<->")) fail("'<->'");
      Name y = ident("second linked name");
      expect(':', "before the forwarded type");
      return link_l(x, y, parse_type());
    }
    if (eat('[')) {
      if (eat(']')) return close_l(x);
      if (eat_word("inl")) {
        expect(':', "after 'inl'");
        PropPtr t = parse_type();
        expect(']', "closing the label");
        return inl_sel_l(x, t);
      }
      if (eat_word("inr")) {
        expect(':', "after 'inr'");
        PropPtr t = parse_type();
        expect(']', "closing the label");
        return inr_sel_l(x, t);
      }
      if (eat_word("type")) {
        PropPtr t = parse_type();
        expect(']', "closing the label");
        return send_ty_l(x, t);
      }
      Name y = ident("object name");
      expect(':', "before the payload type");
      PropPtr t1 = parse_type();
      expect(';', "between the payload types");
      PropPtr t2 = parse_type();
      expect(']', "closing the label");
      return send_l(x, y, t1, t2);
    }
    if (eat('(')) {
      if (eat(')')) return wait_l(x);
      if (eat_word("inl")) {
        expect(':', "after 'inl'");
        PropPtr t = parse_type();
        expect(')', "closing the label");
        return inl_off_l(x, t);
      }
      if (eat_word("inr")) {
        expect(':', "after 'inr'");
        PropPtr t = parse_type();
        expect(')', "closing the label");
        return inr_off_l(x, t);
      }
      if (eat_word("type")) {
        PropPtr t = parse_type();
        expect(')', "closing the label");
        return recv_ty_l(x, t);
      }
      Name y = ident("object name");
      expect(':', "before the payload type");
      PropPtr t1 = parse_type();
      expect(';', "between the payload types");
      PropPtr t2 = parse_type();
      expect(')', "closing the label");
      return recv_l(x, y, t1, t2);
    }
    fail("a label action after the name");
  }

  // --- hypersequents ---------------------------------------------------------

  Hypersequent parse_hypersequent() {
    if (eat_str("(empty)")) return Hypersequent::make({});
    std::vector<Sequent> seqs;
    for (;;) {
      Sequent s;
      for (;;) {
        Name x = ident("an endpoint name");
        expect(':', "after the endpoint name");
        PropPtr t = parse_type();
        if (s.count(x)) fail("a fresh endpoint name ('" + to_string(x) + "' repeats)");
        s.emplace(x, t);
        if (!eat(',')) break;
      }
      seqs.push_back(std::move(s));
      if (!eat_str("||")) break;
    }
    return Hypersequent::make(std::move(seqs));
  }
};

inline PropPtr parse_type(const std::string& s) { return Parser(s).type_all(); }
inline ProcPtr parse_proc(const std::string& s) { return Parser(s).proc_all(); }
inline Label parse_label(const std::string& s) { return Parser(s).label_all(); }
inline Hypersequent parse_hypersequent(const std::string& s) { return Parser(s).hs_all(); }

}  // namespace ct

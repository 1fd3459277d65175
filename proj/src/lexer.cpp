#include "mixppl/lexer.hpp"

#include <cctype>
#include <charconv>
#include <unordered_map>

namespace mixppl {

const char* tok_name(Tok t) {
  switch (t) {
    case Tok::kw_type: return "'type'";
    case Tok::kw_distinct: return "'distinct'";
    case Tok::kw_origin: return "'origin'";
    case Tok::kw_fixed: return "'fixed'";
    case Tok::kw_random: return "'random'";
    case Tok::kw_obs: return "'obs'";
    case Tok::kw_query: return "'query'";
    case Tok::kw_if: return "'if'";
    case Tok::kw_then: return "'then'";
    case Tok::kw_else: return "'else'";
    case Tok::kw_for: return "'for'";
    case Tok::kw_true: return "'true'";
    case Tok::kw_false: return "'false'";
    case Tok::kw_null: return "'null'";
    case Tok::ident: return "identifier";
    case Tok::int_lit: return "integer";
    case Tok::real_lit: return "real";
    case Tok::timestep_lit: return "timestep";
    case Tok::lparen: return "'('";
    case Tok::rparen: return "')'";
    case Tok::lbrace: return "'{'";
    case Tok::rbrace: return "'}'";
    case Tok::lbracket: return "'['";
    case Tok::rbracket: return "']'";
    case Tok::comma: return "','";
    case Tok::semicolon: return "';'";
    case Tok::hash: return "'#'";
    case Tok::tilde: return "'~'";
    case Tok::arrow: return "'->'";
    case Tok::assign: return "'='";
    case Tok::eq: return "'=='";
    case Tok::neq: return "'!='";
    case Tok::lt: return "'<'";
    case Tok::le: return "'<='";
    case Tok::gt: return "'>'";
    case Tok::ge: return "'>='";
    case Tok::plus: return "'+'";
    case Tok::minus: return "'-'";
    case Tok::star: return "'*'";
    case Tok::slash: return "'/'";
    case Tok::end_of_input: return "end of input";
  }
  return "?";
}

namespace {

const std::unordered_map<std::string_view, Tok>& keywords() {
  // "Type" appears capitalized in the wild, accept both spellings.
  static const std::unordered_map<std::string_view, Tok> kw = {
      {"type", Tok::kw_type},     {"Type", Tok::kw_type},
      {"distinct", Tok::kw_distinct}, {"origin", Tok::kw_origin},
      {"fixed", Tok::kw_fixed},   {"random", Tok::kw_random},
      {"obs", Tok::kw_obs},       {"query", Tok::kw_query},
      {"if", Tok::kw_if},         {"then", Tok::kw_then},
      {"else", Tok::kw_else},     {"for", Tok::kw_for},
      {"true", Tok::kw_true},     {"false", Tok::kw_false},
      {"null", Tok::kw_null},
  };
  return kw;
}

struct Cursor {
  std::string_view text;
  std::size_t i = 0;
  int line = 1;
  int col = 1;

  bool done() const { return i >= text.size(); }
  char peek(std::size_t ahead = 0) const {
    return i + ahead < text.size() ? text[i + ahead] : '\0';
  }
  char advance() {
    char c = text[i++];
    if (c == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    return c;
  }
  SourcePos pos() const { return SourcePos{line, col}; }
};

}  // namespace

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  Cursor c{text};

  auto push = [&](Tok kind, std::string tok_text, SourcePos pos) {
    Token t;
    t.kind = kind;
    t.text = std::move(tok_text);
    t.pos = pos;
    out.push_back(std::move(t));
  };

  while (!c.done()) {
    char ch = c.peek();
    SourcePos pos = c.pos();

    if (ch == ' ' || ch == '\t' || ch == '\r' || ch == '\n') {
      c.advance();
      continue;
    }
    if (ch == '/' && c.peek(1) == '/') {
      while (!c.done() && c.peek() != '\n') c.advance();
      continue;
    }

    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      std::string word;
      while (!c.done() && (std::isalnum(static_cast<unsigned char>(c.peek())) ||
                           c.peek() == '_'))
        word += c.advance();
      auto it = keywords().find(word);
      push(it != keywords().end() ? it->second : Tok::ident, std::move(word),
           pos);
      continue;
    }

    if (std::isdigit(static_cast<unsigned char>(ch)) ||
        (ch == '.' && std::isdigit(static_cast<unsigned char>(c.peek(1))))) {
      std::string num;
      bool is_real = false;
      while (!c.done() &&
             std::isdigit(static_cast<unsigned char>(c.peek())))
        num += c.advance();
      if (c.peek() == '.' &&
          std::isdigit(static_cast<unsigned char>(c.peek(1)))) {
        is_real = true;
        num += c.advance();
        while (!c.done() &&
               std::isdigit(static_cast<unsigned char>(c.peek())))
          num += c.advance();
      }
      if (c.peek() == 'e' || c.peek() == 'E') {
        std::size_t save = c.i;
        std::string exp;
        exp += c.advance();
        if (c.peek() == '+' || c.peek() == '-') exp += c.advance();
        if (std::isdigit(static_cast<unsigned char>(c.peek()))) {
          is_real = true;
          while (!c.done() &&
                 std::isdigit(static_cast<unsigned char>(c.peek())))
            exp += c.advance();
          num += exp;
        } else {
          c.i = save;  // 'e' belongs to a following identifier
        }
      }
      Token t;
      t.pos = pos;
      t.text = num;
      if (is_real) {
        t.kind = Tok::real_lit;
        t.real_value = std::strtod(num.c_str(), nullptr);
      } else {
        t.kind = Tok::int_lit;
        std::from_chars(num.data(), num.data() + num.size(), t.int_value);
      }
      out.push_back(std::move(t));
      continue;
    }

    if (ch == '@') {
      c.advance();
      if (!std::isdigit(static_cast<unsigned char>(c.peek())))
        fail(ErrorCode::lex_error, "expected digits after '@'", pos);
      std::string num;
      while (!c.done() && std::isdigit(static_cast<unsigned char>(c.peek())))
        num += c.advance();
      Token t;
      t.kind = Tok::timestep_lit;
      t.text = "@" + num;
      std::from_chars(num.data(), num.data() + num.size(), t.int_value);
      t.pos = pos;
      out.push_back(std::move(t));
      continue;
    }

    c.advance();
    switch (ch) {
      case '(': push(Tok::lparen, "(", pos); continue;
      case ')': push(Tok::rparen, ")", pos); continue;
      case '{': push(Tok::lbrace, "{", pos); continue;
      case '}': push(Tok::rbrace, "}", pos); continue;
      case '[': push(Tok::lbracket, "[", pos); continue;
      case ']': push(Tok::rbracket, "]", pos); continue;
      case ',': push(Tok::comma, ",", pos); continue;
      case ';': push(Tok::semicolon, ";", pos); continue;
      case '#': push(Tok::hash, "#", pos); continue;
      case '~': push(Tok::tilde, "~", pos); continue;
      case '+': push(Tok::plus, "+", pos); continue;
      case '*': push(Tok::star, "*", pos); continue;
      case '/': push(Tok::slash, "/", pos); continue;
      case '-':
        if (c.peek() == '>') {
          c.advance();
          push(Tok::arrow, "->", pos);
        } else {
          push(Tok::minus, "-", pos);
        }
        continue;
      case '=':
        if (c.peek() == '=') {
          c.advance();
          push(Tok::eq, "==", pos);
        } else {
          push(Tok::assign, "=", pos);
        }
        continue;
      case '!':
        if (c.peek() == '=') {
          c.advance();
          push(Tok::neq, "!=", pos);
          continue;
        }
        fail(ErrorCode::lex_error, "illegal character '!'", pos);
      case '<':
        if (c.peek() == '=') {
          c.advance();
          push(Tok::le, "<=", pos);
        } else {
          push(Tok::lt, "<", pos);
        }
        continue;
      case '>':
        if (c.peek() == '=') {
          c.advance();
          push(Tok::ge, ">=", pos);
        } else {
          push(Tok::gt, ">", pos);
        }
        continue;
      default:
        fail(ErrorCode::lex_error,
             std::string("illegal character '") + ch + "'", pos);
    }
  }

  Token eof;
  eof.kind = Tok::end_of_input;
  eof.pos = c.pos();
  out.push_back(std::move(eof));
  return out;
}

}  // namespace mixppl

// Fixture-scale Lean 4 header scanner. It recognises top-level declaration
// headers without elaborating anything.

#include <algorithm>
#include <array>
#include <string>
#include <string_view>

#include "herald/corpus.hpp"
#include "herald/text.hpp"

namespace herald {

namespace {

struct Comment {
  enum class Type { Doc, Module, Plain };
  Type type;
  std::size_t begin;  // offset of "/-"
  std::size_t end;    // one past "-/"
  std::string body;
};

// Source with comments blanked to spaces and string contents masked, newline
// positions preserved so offsets and line numbers match the original.
struct Cleaned {
  std::string text;
  std::vector<Comment> comments;
  std::vector<std::string> diagnostics;
};

bool ident_byte(char c) {
  const auto u = static_cast<unsigned char>(c);
  return std::isalnum(u) || c == '_' || c == '\'' || c == '.' || c == '!' || c == '?' ||
         u >= 0x80;
}

std::string dedent_doc(std::string_view body) {
  auto lines = split(body, '\n');
  std::size_t indent = std::string::npos;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& l = lines[i];
    const auto first = l.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    indent = std::min(indent, first);
  }
  if (indent != std::string::npos) {
    for (std::size_t i = 1; i < lines.size(); ++i) {
      if (lines[i].size() >= indent) lines[i] = lines[i].substr(indent);
    }
  }
  return trim(join(lines, "\n"));
}

Cleaned clean_source(std::string_view src) {
  Cleaned out;
  out.text.assign(src);
  auto blank = [&](std::size_t b, std::size_t e) {
    for (auto i = b; i < e; ++i) {
      if (out.text[i] != '\n') out.text[i] = ' ';
    }
  };
  std::size_t i = 0;
  const auto n = src.size();
  while (i < n) {
    const char c = src[i];
    if (c == '/' && i + 1 < n && src[i + 1] == '-') {
      Comment::Type type = Comment::Type::Plain;
      std::size_t body_start = i + 2;
      if (i + 2 < n && src[i + 2] == '-' && !(i + 3 < n && src[i + 3] == '/')) {
        type = Comment::Type::Doc;
        body_start = i + 3;
      } else if (i + 2 < n && src[i + 2] == '!') {
        type = Comment::Type::Module;
        body_start = i + 3;
      }
      int depth = 1;
      std::size_t j = i + 2;
      while (j < n && depth > 0) {
        if (src[j] == '/' && j + 1 < n && src[j + 1] == '-') {
          ++depth;
          j += 2;
        } else if (src[j] == '-' && j + 1 < n && src[j + 1] == '/') {
          --depth;
          j += 2;
        } else {
          ++j;
        }
      }
      if (depth > 0) {
        out.diagnostics.push_back("unterminated block comment at offset " + std::to_string(i));
        blank(i, n);
        return out;
      }
      const auto body_end = j - 2;
      out.comments.push_back(Comment{type, i, j,
                                     std::string(src.substr(body_start, body_end - body_start))});
      blank(i, j);
      i = j;
    } else if (c == '-' && i + 1 < n && src[i + 1] == '-') {
      auto j = src.find('\n', i);
      if (j == std::string_view::npos) j = n;
      blank(i, j);
      i = j;
    } else if (c == '\'' && (i == 0 || !ident_byte(src[i - 1])) &&
               ((i + 2 < n && src[i + 1] != '\\' && src[i + 2] == '\'') ||
                (i + 3 < n && src[i + 1] == '\\' && src[i + 3] == '\''))) {
      const auto len = src[i + 1] == '\\' ? 4 : 3;
      for (int k = 1; k < len - 1; ++k) out.text[i + k] = 'x';
      i += len;
    } else if (c == '"') {
      std::size_t j = i + 1;
      while (j < n && src[j] != '"') {
        if (src[j] == '\\') ++j;
        ++j;
      }
      if (j >= n) {
        out.diagnostics.push_back("unterminated string at offset " + std::to_string(i));
        blank(i, n);
        return out;
      }
      for (auto k = i + 1; k < j; ++k) {
        if (out.text[k] != '\n') out.text[k] = 'x';
      }
      i = j + 1;
    } else {
      ++i;
    }
  }
  return out;
}

constexpr std::array<std::string_view, 9> kModifiers{
    "private", "protected", "noncomputable", "partial", "unsafe",
    "nonrec",  "scoped",    "local",         "irreducible_def"};

constexpr std::array<std::string_view, 22> kOtherCommands{
    "namespace", "section", "end",      "open",     "import",   "variable",
    "universe",  "set_option", "attribute", "mutual", "example", "macro",
    "syntax",    "notation", "infix",   "infixl",   "infixr",   "prefix",
    "postfix",   "elab",     "export",  "alias"};

bool is_modifier(std::string_view w) {
  return std::find(kModifiers.begin(), kModifiers.end(), w) != kModifiers.end();
}

std::optional<DeclKind> decl_keyword(std::string_view w) {
  if (w == "theorem" || w == "lemma") return DeclKind::Theorem;
  if (w == "def" || w == "abbrev") return DeclKind::Definition;
  if (w == "instance") return DeclKind::Instance;
  if (w == "structure") return DeclKind::Structure;
  if (w == "class") return DeclKind::Class;
  if (w == "inductive") return DeclKind::Inductive;
  if (w == "opaque") return DeclKind::Opaque;
  return std::nullopt;
}

// Multi-byte brackets used in Lean binders and anonymous constructors.
constexpr std::string_view kOpenAngle = "⟨";   // ⟨
constexpr std::string_view kCloseAngle = "⟩";  // ⟩
constexpr std::string_view kOpenStrict = "⦃";  // ⦃
constexpr std::string_view kCloseStrict = "⦄"; // ⦄

// Returns +1 / -1 for an opening / closing bracket at `pos` and sets `width`.
int bracket_at(std::string_view s, std::size_t pos, std::size_t& width) {
  width = 1;
  switch (s[pos]) {
    case '(': case '[': case '{': return 1;
    case ')': case ']': case '}': return -1;
    default: break;
  }
  const auto rest = s.substr(pos);
  for (auto open : {kOpenAngle, kOpenStrict}) {
    if (rest.starts_with(open)) {
      width = open.size();
      return 1;
    }
  }
  for (auto close : {kCloseAngle, kCloseStrict}) {
    if (rest.starts_with(close)) {
      width = close.size();
      return -1;
    }
  }
  return 0;
}

class Scanner {
 public:
  Scanner(std::string_view src, std::string_view file_path)
      : src_(src), file_(file_path), cleaned_(clean_source(src)), text_(cleaned_.text) {
    line_starts_.push_back(0);
    for (std::size_t i = 0; i < text_.size(); ++i) {
      if (text_[i] == '\n') line_starts_.push_back(i + 1);
    }
  }

  ScanResult run() {
    ScanResult result;
    result.diagnostics = cleaned_.diagnostics;
    std::vector<std::string> header_lines;
    std::optional<std::size_t> open_decl;  // index into result.declarations
    std::size_t open_decl_header_end_line = 0;

    auto close_open_decl = [&](std::size_t next_line) {
      if (!open_decl) return;
      auto& rec = result.declarations[*open_decl];
      std::size_t last = open_decl_header_end_line;
      for (std::size_t l = next_line; l > open_decl_header_end_line; --l) {
        if (!trim(line_text(l - 1)).empty()) {
          last = l - 1;
          break;
        }
      }
      rec.line_span.end = std::max(rec.line_span.start, static_cast<int>(last) + 1);
      open_decl.reset();
    };

    std::size_t line = 0;
    while (line < line_starts_.size()) {
      const auto cmd = classify(line);
      if (cmd.kind == CommandKind::None) {
        ++line;
        continue;
      }
      close_open_decl(line);
      if (cmd.kind == CommandKind::Other) {
        handle_other(cmd, line, header_lines, result);
        ++line;
        continue;
      }
      auto parsed = parse_decl(cmd, result);
      const auto header_end_line = line_of(parsed.header_end);
      if (parsed.record) {
        result.declarations.push_back(std::move(*parsed.record));
        open_decl = result.declarations.size() - 1;
        open_decl_header_end_line = header_end_line;
      }
      line = std::max(line + 1, header_end_line + 1);
    }
    close_open_decl(line_starts_.size());

    std::vector<std::string> module_docs;
    for (const auto& c : cleaned_.comments) {
      if (c.type == Comment::Type::Module) module_docs.push_back(dedent_doc(c.body));
    }
    result.module_doc = join(module_docs, "\n\n");
    for (const auto& l : header_lines) result.header += l + "\n";
    return result;
  }

 private:
  enum class CommandKind { None, Decl, Other };
  struct Command {
    CommandKind kind = CommandKind::None;
    std::size_t prefix_start = 0;  // first token of the command (attribute or modifier)
    std::size_t word_start = 0;    // keyword offset
    std::string word;
  };
  struct ParsedDecl {
    std::optional<DeclarationRecord> record;
    std::size_t header_end = 0;
  };

  std::string_view line_text(std::size_t line) const {
    const auto b = line_starts_[line];
    const auto e = line + 1 < line_starts_.size() ? line_starts_[line + 1] : text_.size();
    return std::string_view(text_).substr(b, e - b);
  }

  std::size_t line_of(std::size_t offset) const {
    const auto it = std::upper_bound(line_starts_.begin(), line_starts_.end(), offset);
    return static_cast<std::size_t>(it - line_starts_.begin()) - 1;
  }

  std::size_t skip_ws(std::size_t pos) const {
    while (pos < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos]))) ++pos;
    return pos;
  }

  std::size_t word_end(std::size_t pos) const {
    while (pos < text_.size() && ident_byte(text_[pos])) {
      std::size_t w;
      if (static_cast<unsigned char>(text_[pos]) >= 0x80 && bracket_at(text_, pos, w) != 0) break;
      ++pos;
    }
    return pos;
  }

  std::size_t skip_balanced(std::size_t pos) const {
    int depth = 0;
    while (pos < text_.size()) {
      std::size_t w;
      const int b = bracket_at(text_, pos, w);
      depth += b;
      pos += w;
      if (depth <= 0) break;
    }
    return pos;
  }

  Command classify(std::size_t line) const {
    Command cmd;
    const auto start = line_starts_[line];
    if (start >= text_.size() || std::isspace(static_cast<unsigned char>(text_[start]))) {
      return cmd;
    }
    auto pos = start;
    for (;;) {
      pos = skip_ws(pos);
      if (pos >= text_.size()) return cmd;
      if (text_.compare(pos, 2, "@[") == 0) {
        pos = skip_balanced(pos + 1);
        continue;
      }
      if (text_[pos] == '#') {
        cmd.kind = CommandKind::Other;
        cmd.prefix_start = start;
        cmd.word_start = pos;
        cmd.word = std::string(text_.substr(pos, word_end(pos + 1) - pos));
        return cmd;
      }
      const auto e = word_end(pos);
      const auto w = std::string_view(text_).substr(pos, e - pos);
      if (is_modifier(w)) {
        pos = e;
        continue;
      }
      if (decl_keyword(w)) {
        cmd.kind = CommandKind::Decl;
      } else if (std::find(kOtherCommands.begin(), kOtherCommands.end(), w) !=
                 kOtherCommands.end()) {
        cmd.kind = CommandKind::Other;
      } else {
        return cmd;
      }
      cmd.prefix_start = start;
      cmd.word_start = pos;
      cmd.word = std::string(w);
      return cmd;
    }
  }

  void handle_other(const Command& cmd, std::size_t line, std::vector<std::string>& header_lines,
                    ScanResult& result) {
    const auto rest_begin = skip_ws(cmd.word_start + cmd.word.size());
    const auto rest = trim(line_text(line).substr(rest_begin - line_starts_[line]));
    if (cmd.word == "import" || (cmd.word == "open" && !rest.ends_with(" in") && rest != "in")) {
      header_lines.push_back(trim(src_.substr(line_starts_[line],
                                              line_text(line).size())));
    } else if (cmd.word == "namespace") {
      const auto parts = split(rest, '.');
      scopes_.push_back({rest, parts.size()});
      for (const auto& p : parts) namespace_.push_back(p);
    } else if (cmd.word == "section") {
      scopes_.push_back({rest, 0});
    } else if (cmd.word == "end") {
      if (scopes_.empty()) {
        result.diagnostics.push_back("unmatched 'end' at line " + std::to_string(line + 1));
        return;
      }
      if (!rest.empty() && scopes_.back().name != rest) {
        result.diagnostics.push_back("'end " + rest + "' does not close '" + scopes_.back().name +
                                     "' at line " + std::to_string(line + 1));
      }
      for (std::size_t i = 0; i < scopes_.back().components; ++i) namespace_.pop_back();
      scopes_.pop_back();
    }
  }

  ParsedDecl parse_decl(const Command& cmd, ScanResult& result) {
    ParsedDecl parsed;
    auto kind = *decl_keyword(cmd.word);
    auto pos = cmd.word_start + cmd.word.size();
    const auto decl_line = line_of(cmd.word_start);
    if (kind == DeclKind::Class) {
      const auto p = skip_ws(pos);
      const auto e = word_end(p);
      if (text_.compare(p, e - p, "inductive") == 0 && e - p == 9) {
        kind = DeclKind::ClassInductive;
        pos = e;
      }
    }

    pos = skip_ws(pos);
    if (kind == DeclKind::Instance && text_.compare(pos, 9, "(priority") == 0) {
      pos = skip_ws(skip_balanced(pos));
    }
    std::string name;
    const auto name_end = word_end(pos);
    const auto candidate = std::string_view(text_).substr(pos, name_end - pos);
    if (name_end > pos && candidate != "where" && candidate != ":") {
      name = std::string(src_.substr(pos, name_end - pos));
      pos = name_end;
    } else if (kind == DeclKind::Instance) {
      name = "instance_L" + std::to_string(decl_line + 1);
    } else {
      result.diagnostics.push_back("declaration without a name at line " +
                                   std::to_string(decl_line + 1));
      parsed.header_end = cmd.word_start + cmd.word.size();
      return parsed;
    }

    bool tactic = false;
    const auto end = find_header_end(pos, tactic);
    parsed.header_end = end;
    auto sig_end = end;
    while (sig_end > cmd.word_start &&
           std::isspace(static_cast<unsigned char>(text_[sig_end - 1]))) {
      --sig_end;
    }

    DeclarationRecord rec;
    if (name.starts_with("_root_.")) name = name.substr(7);
    std::vector<std::string> parts = namespace_;
    if (cmd.word_start < text_.size() && !name.empty()) {
      for (auto& p : split(name, '.')) parts.push_back(std::move(p));
    }
    rec.full_name = join(parts, ".");
    parts.pop_back();
    rec.namespace_path = std::move(parts);
    rec.kind = kind;
    rec.signature = trim(src_.substr(cmd.word_start, sig_end - cmd.word_start));
    rec.file_path = std::string(file_);
    rec.line_span.start = static_cast<int>(decl_line) + 1;
    rec.line_span.end = static_cast<int>(line_of(sig_end > 0 ? sig_end - 1 : 0)) + 1;
    rec.is_tactic_proof = tactic;
    rec.docstring = docstring_before(cmd.prefix_start);
    parsed.record = std::move(rec);
    return parsed;
  }

  // Scans forward from `pos` to the first top-level `:=`, `where`, `by`,
  // `deriving`, line-leading `|`, or the next command line.
  std::size_t find_header_end(std::size_t pos, bool& tactic) const {
    int depth = 0;
    while (pos < text_.size()) {
      const char c = text_[pos];
      if (c == '\n') {
        if (depth == 0 && pos + 1 < text_.size()) {
          const auto next_line = line_of(pos + 1);
          if (classify(next_line).kind != CommandKind::None) return pos;
          const auto first = skip_ws(pos + 1);
          if (first < text_.size() && text_[first] == '|' && line_of(first) == next_line) {
            return first;
          }
        }
        ++pos;
        continue;
      }
      std::size_t w;
      if (const int b = bracket_at(text_, pos, w)) {
        depth = std::max(0, depth + b);
        pos += w;
        continue;
      }
      if (depth == 0) {
        if (text_.compare(pos, 2, ":=") == 0) {
          const auto after = skip_ws(pos + 2);
          const auto e = word_end(after);
          tactic = std::string_view(text_).substr(after, e - after) == "by";
          return pos;
        }
        if (ident_byte(c) && (pos == 0 || !ident_byte(text_[pos - 1]))) {
          const auto e = word_end(pos);
          const auto word = std::string_view(text_).substr(pos, e - pos);
          if (word == "where" || word == "deriving") return pos;
          if (word == "by") {
            tactic = true;
            return pos;
          }
          pos = std::max(e, pos + 1);
          continue;
        }
      }
      ++pos;
    }
    return text_.size();
  }

  std::optional<std::string> docstring_before(std::size_t decl_start) const {
    const Comment* best = nullptr;
    for (const auto& c : cleaned_.comments) {
      if (c.end <= decl_start) best = &c;
    }
    if (!best || best->type != Comment::Type::Doc) return std::nullopt;
    for (auto i = best->end; i < decl_start; ++i) {
      if (!std::isspace(static_cast<unsigned char>(text_[i]))) return std::nullopt;
    }
    return dedent_doc(best->body);
  }

  struct Scope {
    std::string name;
    std::size_t components;
  };

  std::string_view src_;
  std::string_view file_;
  Cleaned cleaned_;
  const std::string& text_;
  std::vector<std::size_t> line_starts_;
  std::vector<std::string> namespace_;
  std::vector<Scope> scopes_;
};

}  // namespace

ScanResult scan_declarations(std::string_view lean_source, std::string_view file_path) {
  if (lean_source.empty()) return {};
  return Scanner(lean_source, file_path).run();
}

std::optional<HeaderParts> parse_header(std::string_view signature) {
  const auto sig = trim(signature);
  std::string_view s(sig);
  std::size_t pos = 0;
  auto skip = [&] {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  };
  auto word = [&] {
    const auto b = pos;
    while (pos < s.size() && ident_byte(s[pos])) {
      std::size_t w;
      if (static_cast<unsigned char>(s[pos]) >= 0x80 && bracket_at(s, pos, w) != 0) break;
      ++pos;
    }
    return std::string(s.substr(b, pos - b));
  };

  HeaderParts parts;
  parts.keyword = word();
  if (!decl_keyword(parts.keyword)) return std::nullopt;
  skip();
  if (parts.keyword == "class" && s.substr(pos).starts_with("inductive")) {
    pos += 9;
    parts.keyword = "class inductive";
    skip();
  }
  if (pos < s.size() && s[pos] != ':') {
    std::size_t w;
    if (bracket_at(s, pos, w) != 1) parts.name = word();
  }
  for (;;) {
    skip();
    if (pos >= s.size()) break;
    std::size_t w;
    if (bracket_at(s, pos, w) == 1) {
      const auto b = pos;
      int depth = 0;
      do {
        const int d = bracket_at(s, pos, w);
        depth += d;
        pos += w;
      } while (pos < s.size() && depth > 0);
      parts.binders.emplace_back(s.substr(b, pos - b));
      continue;
    }
    if (s[pos] == ':' && s.substr(pos, 2) != ":=") {
      parts.conclusion = trim(s.substr(pos + 1));
    }
    break;
  }
  return parts;
}

}  // namespace herald

#include "curator/extract.h"

#include <array>
#include <unordered_set>

#include "curator/util/text.h"
#include "curator/util/utf8.h"

namespace curator::extract {

const char* to_string(TagClass v) {
  switch (v) {
    case TagClass::kParagraph: return "paragraph";
    case TagClass::kHeading: return "heading";
    case TagClass::kListItem: return "list_item";
    case TagClass::kNav: return "nav";
    case TagClass::kFooter: return "footer";
    case TagClass::kOther: return "other";
  }
  return "other";
}

namespace {

const std::unordered_set<std::string>& block_tags() {
  static const std::unordered_set<std::string> kTags = {
      "p",       "div",     "h1",     "h2",      "h3",    "h4",
      "h5",      "h6",      "li",     "ul",      "ol",    "nav",
      "footer",  "header",  "aside",  "article", "section", "table",
      "tr",      "td",      "th",     "blockquote", "pre", "main",
      "figure",  "figcaption", "dl",  "dt",      "dd",    "body",
      "html",    "head",    "form",   "title"};
  return kTags;
}

bool is_skipped_container(const std::string& tag) {
  return tag == "script" || tag == "style" || tag == "noscript" ||
         tag == "template";
}

bool is_void_tag(const std::string& tag) {
  static const std::unordered_set<std::string> kVoid = {
      "br", "hr", "img", "meta", "link", "input", "area", "base",
      "col", "embed", "source", "track", "wbr"};
  return kVoid.contains(tag);
}

struct OpenElement {
  std::string tag;
  bool navish = false;    // nav/menu/sidebar by tag or class/id
  bool footerish = false;
};

// Decode the handful of entities that actually occur in boilerplate.
void append_entity(std::string& out, std::string_view name) {
  if (name == "amp") {
    out += '&';
  } else if (name == "lt") {
    out += '<';
  } else if (name == "gt") {
    out += '>';
  } else if (name == "quot") {
    out += '"';
  } else if (name == "apos") {
    out += '\'';
  } else if (name == "nbsp") {
    out += ' ';
  } else if (!name.empty() && name[0] == '#') {
    char32_t cp = 0;
    bool ok = name.size() > 1;
    if (name.size() > 2 && (name[1] == 'x' || name[1] == 'X')) {
      for (size_t i = 2; i < name.size() && ok; ++i) {
        const char c = name[i];
        cp <<= 4;
        if (c >= '0' && c <= '9') cp |= static_cast<char32_t>(c - '0');
        else if (c >= 'a' && c <= 'f') cp |= static_cast<char32_t>(c - 'a' + 10);
        else if (c >= 'A' && c <= 'F') cp |= static_cast<char32_t>(c - 'A' + 10);
        else ok = false;
      }
    } else {
      for (size_t i = 1; i < name.size() && ok; ++i) {
        const char c = name[i];
        if (c < '0' || c > '9') { ok = false; break; }
        cp = cp * 10 + static_cast<char32_t>(c - '0');
      }
    }
    if (ok && cp > 0 && cp <= 0x10FFFF && !(cp >= 0xD800 && cp <= 0xDFFF)) {
      util::utf8_append(out, cp);
    } else {
      out += '&';
      out += name;
      out += ';';
    }
  } else {
    out += '&';
    out += name;
    out += ';';
  }
}

std::string decode_entities(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (size_t i = 0; i < s.size();) {
    if (s[i] == '&') {
      const size_t semi = s.find(';', i + 1);
      if (semi != std::string_view::npos && semi - i <= 10) {
        append_entity(out, s.substr(i + 1, semi - i - 1));
        i = semi + 1;
        continue;
      }
    }
    out += s[i];
    ++i;
  }
  return out;
}

bool attr_value_navish(std::string_view attrs) {
  const std::string lower = util::to_lower_ascii(attrs);
  for (const char* marker : {"nav", "menu", "breadcrumb", "sidebar"})
    if (lower.find(marker) != std::string::npos) return true;
  return false;
}

bool attr_value_footerish(std::string_view attrs) {
  return util::to_lower_ascii(attrs).find("footer") != std::string::npos;
}

// Pulls class="..." and id="..." values out of a raw attribute blob.
std::string class_and_id_values(std::string_view attrs) {
  std::string values;
  const std::string lower = util::to_lower_ascii(attrs);
  for (const char* key : {"class", "id"}) {
    size_t pos = 0;
    const std::string needle = std::string(key) + "=";
    while ((pos = lower.find(needle, pos)) != std::string::npos) {
      size_t v = pos + needle.size();
      if (v < attrs.size() && (attrs[v] == '"' || attrs[v] == '\'')) {
        const char quote = attrs[v];
        const size_t end = attrs.find(quote, v + 1);
        if (end != std::string_view::npos) {
          values += attrs.substr(v + 1, end - v - 1);
          values += ' ';
        }
      }
      pos = v;
    }
  }
  return values;
}

class Segmenter {
 public:
  std::vector<Block> run(std::string_view html) {
    size_t i = 0;
    while (i < html.size()) {
      if (html[i] == '<') {
        const size_t advanced = handle_markup(html, i);
        if (advanced > 0) {
          i += advanced;
          continue;
        }
        // Stray '<' that opens no tag: treat as text.
      }
      const size_t next_lt = html.find('<', i + (html[i] == '<' ? 1 : 0));
      const size_t end = next_lt == std::string_view::npos ? html.size()
                                                           : next_lt;
      append_text(decode_entities(html.substr(i, end - i)));
      i = end;
    }
    flush_block();
    return std::move(blocks_);
  }

 private:
  size_t handle_markup(std::string_view html, size_t i) {
    if (html.compare(i, 4, "<!--") == 0) {
      const size_t end = html.find("-->", i + 4);
      return end == std::string_view::npos ? html.size() - i : end + 3 - i;
    }
    if (i + 1 >= html.size()) return 0;
    const char c1 = html[i + 1];
    if (c1 == '!' || c1 == '?') {  // doctype, processing instruction
      const size_t end = html.find('>', i);
      return end == std::string_view::npos ? html.size() - i : end + 1 - i;
    }
    const bool closing = c1 == '/';
    const size_t name_start = i + (closing ? 2 : 1);
    size_t p = name_start;
    while (p < html.size() &&
           (std::isalnum(static_cast<unsigned char>(html[p])) != 0))
      ++p;
    if (p == name_start) return 0;  // not a tag after all
    const std::string tag =
        util::to_lower_ascii(html.substr(name_start, p - name_start));
    const size_t gt = html.find('>', p);
    const size_t tag_end = gt == std::string_view::npos ? html.size() : gt + 1;
    const std::string_view attrs =
        html.substr(p, (gt == std::string_view::npos ? html.size() : gt) - p);

    if (!closing && is_skipped_container(tag)) {
      // Skip everything up to the matching close tag.
      const std::string close = "</" + tag;
      const size_t stop = util::to_lower_ascii(html.substr(tag_end))
                              .find(close);
      if (stop == std::string::npos) return html.size() - i;
      const size_t close_gt = html.find('>', tag_end + stop);
      return (close_gt == std::string_view::npos ? html.size() : close_gt + 1) -
             i;
    }

    if (tag == "a") {
      if (closing) {
        if (anchor_depth_ > 0) --anchor_depth_;
      } else {
        ++anchor_depth_;
      }
      return tag_end - i;
    }
    if (tag == "br") {
      pending_space_ = true;
      return tag_end - i;
    }
    if (is_void_tag(tag)) return tag_end - i;

    if (block_tags().contains(tag)) {
      flush_block();
      if (closing) {
        pop_to(tag);
      } else {
        OpenElement el;
        el.tag = tag;
        const std::string attr_values = class_and_id_values(attrs);
        el.navish = tag == "nav" || tag == "header" ||
                    tag == "aside" || attr_value_navish(attr_values);
        el.footerish = tag == "footer" || attr_value_footerish(attr_values);
        stack_.push_back(std::move(el));
      }
    }
    // Inline tags (span, b, i, ...) contribute nothing structural.
    return tag_end - i;
  }

  void pop_to(const std::string& tag) {
    for (size_t k = stack_.size(); k-- > 0;) {
      if (stack_[k].tag == tag) {
        stack_.resize(k);
        return;
      }
    }
    // Unmatched close tag: ignore.
  }

  void append_text(const std::string& text) {
    for (size_t pos = 0; pos < text.size();) {
      const util::Utf8Step step = util::utf8_next(text, pos);
      pos += static_cast<size_t>(step.len);
      const char32_t cp = step.cp;
      if (cp == ' ' || cp == '\t' || cp == '\r' || cp == 0xA0) {
        pending_space_ = true;
        continue;
      }
      if (cp == '\n') {
        ++pending_newlines_;
        continue;
      }
      if (!current_.text.empty()) {
        if (in_plain_text() && pending_newlines_ >= 2) {
          flush_block();
        } else if (pending_space_ || pending_newlines_ > 0) {
          current_.text += ' ';
          ++current_.char_len;
          if (anchor_depth_ > 0) ++current_.linked;
        }
      }
      pending_space_ = false;
      pending_newlines_ = 0;
      if (step.valid) {
        util::utf8_append(current_.text, cp);
      } else {
        current_.text.push_back(static_cast<char>(cp));
      }
      ++current_.char_len;
      if (anchor_depth_ > 0) ++current_.linked;
    }
  }

  bool in_plain_text() const { return stack_.empty(); }

  TagClass classify() const {
    for (size_t k = stack_.size(); k-- > 0;) {
      if (stack_[k].footerish) return TagClass::kFooter;
      if (stack_[k].navish) return TagClass::kNav;
    }
    for (size_t k = stack_.size(); k-- > 0;) {
      const std::string& t = stack_[k].tag;
      if (t.size() == 2 && t[0] == 'h' && t[1] >= '1' && t[1] <= '6')
        return TagClass::kHeading;
      if (t == "title") return TagClass::kHeading;
      if (t == "li" || t == "dt" || t == "dd") return TagClass::kListItem;
      if (t == "p" || t == "blockquote") return TagClass::kParagraph;
    }
    return TagClass::kOther;
  }

  void flush_block() {
    pending_space_ = false;
    pending_newlines_ = 0;
    if (current_.text.empty()) return;
    Block block;
    block.text = std::move(current_.text);
    block.char_len = current_.char_len;
    block.link_char_fraction =
        static_cast<double>(current_.linked) /
        static_cast<double>(current_.char_len > 0 ? current_.char_len : 1);
    block.tag_class = classify();
    blocks_.push_back(std::move(block));
    current_ = {};
  }

  struct Pending {
    std::string text;
    uint64_t char_len = 0;
    uint64_t linked = 0;
  };

  std::vector<Block> blocks_;
  std::vector<OpenElement> stack_;
  Pending current_;
  int anchor_depth_ = 0;
  bool pending_space_ = false;
  int pending_newlines_ = 0;
};

}  // namespace

std::vector<Block> segment_page(std::string_view raw_html) {
  Segmenter segmenter;
  return segmenter.run(raw_html);
}

std::string extract_main_text(const std::vector<Block>& blocks,
                              const ExtractionPolicy& policy) {
  std::vector<size_t> kept;
  std::vector<char> base_keep(blocks.size(), 0);
  for (size_t i = 0; i < blocks.size(); ++i) {
    const Block& b = blocks[i];
    base_keep[i] = b.tag_class != TagClass::kNav &&
                   b.tag_class != TagClass::kFooter &&
                   b.link_char_fraction <= policy.max_link_fraction &&
                   b.char_len >= policy.min_block_chars;
  }
  for (size_t i = 0; i < blocks.size(); ++i) {
    if (!base_keep[i]) continue;
    if (blocks[i].tag_class == TagClass::kHeading) {
      // Keep a title only when substantive kept content follows it.
      bool followed = false;
      for (size_t j = i + 1; j < blocks.size(); ++j) {
        if (!base_keep[j]) continue;
        followed = blocks[j].tag_class != TagClass::kHeading;
        break;
      }
      if (!followed) continue;
    }
    kept.push_back(i);
  }
  std::string out;
  for (size_t idx : kept) {
    if (!out.empty()) out += "\n\n";
    out += blocks[idx].text;
  }
  return out;
}

}  // namespace curator::extract
